"""Walk through the data dictionary, record validation, and cohort building.

Run with:  python demos/01_dictionary_and_cohort.py
"""

import datetime as dt

from gladpred.cohort import apply_exclusions, calibrate_signal, generate_synthetic
from gladpred.schema import PatientRecord, builtin_dictionary, encode, validate

dictionary = builtin_dictionary("base34")
print(f"dictionary edition={dictionary.edition} predictors={len(dictionary.predictors)}")
print(f"content hash: {dictionary.content_hash[:16]}...")
print(f"encoded width: {dictionary.layout().width} (one 3-level variable expands to a one-hot block)\n")

spec = dictionary.get("baseline_pain")
print(f"example variable: {spec.id}")
print(f"  prompt:   {spec.prompt}")
print(f"  kind:     continuous on [{spec.kind.min}, {spec.kind.max}] {spec.units}")
print(f"  marginal: mean {spec.marginal.mean} sd {spec.marginal.sd}\n")

# A hand-built record: values may arrive as raw CSV strings.
values = {p.id: "no" for p in dictionary.predictors if type(p.kind).__name__ == "Binary"}
values.update(
    age="66", bmi="29.1", symptom_duration="24", walk40m="27.5", chair_stands="12",
    baseline_pain="45", painful_areas="3", ucla_activity="6", eq_vas="70",
    koos_qol="48", eq5d="0.8", radiographic_oa="Yes", vas_change="18",
)
record = PatientRecord("demo-1", values, "knee", dt.date(2019, 6, 1), True)
report = validate(dictionary, record)
print(f"validation violations: {len(report.violations)}")
vector = encode(dictionary, record)
print(f"encoded vector: length {vector.shape[0]}, baseline_pain slot -> {vector[22]}\n")

# Break the record and watch validation name the problem.
bad = PatientRecord("demo-2", dict(values, bmi="200"), "knee", dt.date(2019, 6, 1), True)
violation = validate(dictionary, bad).violations[0]
print(f"broken record: {violation.variable_id} is {violation.reason} ({violation.detail})\n")

# Calibrated synthetic cohort: the registry is private, so analysis runs on
# cohorts whose marginals and signal strength are matched to the reported ones.
config = calibrate_signal(dictionary, r2=0.32)
print("synthetic signal coefficients (VAS points per unit):")
for vid, coeff in config.signal.items():
    print(f"  {vid:18s} {coeff:+.4f}")
print(f"noise sd: {config.noise_sd:.3f}  intercept: {config.intercept:.3f}")

cohort = generate_synthetic(config, n=2000, seed=42)
print(f"\ncohort: n={cohort.n}, outcome mean {cohort.outcomes.mean():.2f}, sd {cohort.outcomes.std():.2f}")

# The exclusion pipeline orders reasons deterministically.
records = [
    PatientRecord("p1", values, "knee", dt.date(2019, 6, 1), True),
    PatientRecord("p2", values, "hip", dt.date(2019, 6, 1), True),
    PatientRecord("p3", values, "knee", dt.date(2016, 7, 1), True),
    PatientRecord("p4", values, "knee", dt.date(2019, 6, 1), False),
]
_, exclusions = apply_exclusions(dictionary, records)
print("\nexclusion flow:", exclusions.to_json_obj())
