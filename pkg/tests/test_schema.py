import pytest

from gladpred.errors import ArgumentError, EncodingError, UnknownVariable
from gladpred.schema import (
    Binary,
    Categorical,
    Continuous,
    builtin_dictionary,
    encode,
    parse_value,
    validate,
)

from conftest import make_record


def kind_counts(dictionary):
    kinds = [p.kind for p in dictionary.predictors]
    return (
        sum(isinstance(k, Continuous) for k in kinds),
        sum(isinstance(k, Binary) for k in kinds),
        sum(isinstance(k, Categorical) for k in kinds),
    )


class TestBuiltinDictionary:
    def test_base34_partition(self, base_dict):
        assert len(base_dict.predictors) == 34
        assert kind_counts(base_dict) == (11, 22, 1)

    def test_extended46_count(self, extended_dict):
        assert len(extended_dict.predictors) == 46

    def test_baseline_pain_spec(self, base_dict):
        spec = base_dict.get("baseline_pain")
        assert isinstance(spec.kind, Continuous)
        assert (spec.kind.min, spec.kind.max) == (0.0, 100.0)
        assert spec.marginal.mean == pytest.approx(46.40)
        assert spec.marginal.sd == pytest.approx(21.66)

    def test_outcome_range(self, base_dict):
        assert (base_dict.outcome.kind.min, base_dict.outcome.kind.max) == (-100.0, 100.0)
        assert base_dict.outcome.marginal.mean == pytest.approx(14.06)
        assert base_dict.outcome.marginal.sd == pytest.approx(22.75)

    def test_content_hash_stable(self, base_dict):
        import subprocess
        import sys

        # hash must agree with a fresh interpreter, not just a fresh call
        code = "from gladpred.schema import builtin_dictionary; print(builtin_dictionary('base34').content_hash)"
        fresh = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
        assert fresh.stdout.strip() == base_dict.content_hash
        assert base_dict.content_hash != builtin_dictionary("extended46").content_hash

    def test_unknown_edition(self):
        with pytest.raises(ArgumentError):
            builtin_dictionary("base99")

    def test_unknown_variable(self, base_dict):
        with pytest.raises(UnknownVariable):
            base_dict.get("shoe_size")


class TestKindInvariants:
    def test_continuous_bounds(self):
        with pytest.raises(ArgumentError):
            Continuous(5.0, 5.0)
        with pytest.raises(ArgumentError):
            Continuous(0.0, float("inf"))

    def test_categorical_needs_three_levels(self):
        with pytest.raises(ArgumentError):
            Categorical(("Yes", "No"))


class TestValidate:
    def test_complete_record_clean(self, base_dict):
        assert validate(base_dict, make_record(base_dict)).ok

    def test_missing_eq5d(self, base_dict):
        rec = make_record(base_dict, eq5d=None)
        report = validate(base_dict, rec)
        assert [(v.variable_id, v.reason) for v in report.violations] == [("eq5d", "missing")]

    def test_bmi_out_of_range(self, base_dict):
        report = validate(base_dict, make_record(base_dict, bmi=200))
        assert [(v.variable_id, v.reason) for v in report.violations] == [("bmi", "out-of-range")]

    def test_unparseable_binary(self, base_dict):
        report = validate(base_dict, make_record(base_dict, smoking="maybe"))
        assert [(v.variable_id, v.reason) for v in report.violations] == [("smoking", "unparseable")]

    def test_outcome_checked_when_required(self, base_dict):
        rec = make_record(base_dict, vas_change=None)
        assert validate(base_dict, rec).ok
        assert not validate(base_dict, rec, require_outcome=True).ok


class TestParseValue:
    @pytest.mark.parametrize("raw", ["yes", "Yes", "YES", "y", "true", "1", 1, True])
    def test_binary_truthy_synonyms(self, base_dict, raw):
        spec = base_dict.get("smoking")
        assert parse_value(spec, raw) == (True, None)

    @pytest.mark.parametrize("raw", ["no", "No", "n", "false", "0", 0, False])
    def test_binary_falsy_synonyms(self, base_dict, raw):
        spec = base_dict.get("smoking")
        assert parse_value(spec, raw) == (False, None)

    def test_categorical_case_insensitive(self, base_dict):
        spec = base_dict.get("radiographic_oa")
        assert parse_value(spec, "unknown") == ("Unknown", None)

    def test_continuous_rejects_nan(self, base_dict):
        spec = base_dict.get("age")
        assert parse_value(spec, "nan")[1] == "unparseable"


class TestEncode:
    def test_width_36(self, base_dict):
        vec = encode(base_dict, make_record(base_dict))
        assert vec.shape == (36,)
        assert base_dict.layout().width == 36

    def test_one_hot_unknown_level(self, base_dict):
        vec = encode(base_dict, make_record(base_dict, radiographic_oa="Unknown"))
        start, stop = base_dict.layout().offsets()["radiographic_oa"]
        assert vec[start:stop].tolist() == [0.0, 0.0, 1.0]

    def test_binary_no_encodes_zero(self, base_dict):
        vec = encode(base_dict, make_record(base_dict, smoking="No"))
        start, _ = base_dict.layout().offsets()["smoking"]
        assert vec[start] == 0.0

    def test_deterministic_bytes(self, base_dict):
        rec = make_record(base_dict)
        assert encode(base_dict, rec).tobytes() == encode(base_dict, rec).tobytes()

    def test_one_hot_block_sums_to_one(self, base_dict):
        for level in ("Yes", "No", "Unknown"):
            vec = encode(base_dict, make_record(base_dict, radiographic_oa=level))
            start, stop = base_dict.layout().offsets()["radiographic_oa"]
            assert vec[start:stop].sum() == 1.0

    def test_rejects_invalid_record(self, base_dict):
        with pytest.raises(EncodingError):
            encode(base_dict, make_record(base_dict, bmi=200))

    def test_feature_subset_layout_order(self, base_dict):
        ids = ("baseline_pain", "age")
        vec = encode(base_dict, make_record(base_dict, baseline_pain=50, age=70), feature_ids=ids)
        assert vec.tolist() == [50.0, 70.0]

    def test_standardize_flag(self, base_dict):
        spec = base_dict.get("age")
        vec = encode(base_dict, make_record(base_dict, age=70), feature_ids=("age",), standardize=True)
        assert vec[0] == pytest.approx((70 - spec.marginal.mean) / spec.marginal.sd)

    def test_outcome_not_encodable(self, base_dict):
        with pytest.raises(ArgumentError):
            base_dict.layout(("vas_change",))
