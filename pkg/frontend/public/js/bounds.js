/**
 * Input fields of the concise model and their valid ranges.
 *
 * The bounds mirror the service's dictionary validation exactly: a value the
 * form accepts is a value the service accepts, and vice versa.
 */
export const FIELDS = [
    { id: "baseline_pain", label: "Current knee pain (VAS)", min: 0, max: 100, step: 1, unit: "0–100" },
    { id: "symptom_duration", label: "Duration of symptoms", min: 0, max: 756, step: 1, unit: "months" },
    { id: "eq5d", label: "EQ-5D index score", min: -0.5, max: 1.0, step: 0.01, unit: "−0.50–1.00" },
    { id: "walk40m", label: "40 m walk test time", min: 10, max: 234.91, step: 0.1, unit: "seconds" },
    { id: "age", label: "Age", min: 23, max: 94, step: 1, unit: "years" },
    { id: "bmi", label: "BMI", min: 15.23, max: 70.03, step: 0.1, unit: "kg/m²" },
];
export const MARGINS = [5, 10, 15, 20];
export const DEFAULT_MARGIN = 15;
/** null when the value is acceptable; otherwise a short message. */
export function fieldError(id, value) {
    const spec = FIELDS.find((f) => f.id === id);
    if (!spec)
        return "unknown field";
    if (value === null || value === undefined || Number.isNaN(value))
        return "required";
    if (!Number.isFinite(value))
        return "must be a number";
    if (value < spec.min || value > spec.max)
        return `must be between ${spec.min} and ${spec.max}`;
    return null;
}
export function validateForm(values) {
    const errors = {};
    for (const spec of FIELDS) {
        const problem = fieldError(spec.id, values[spec.id]);
        if (problem)
            errors[spec.id] = problem;
    }
    return { ok: Object.keys(errors).length === 0, errors };
}
