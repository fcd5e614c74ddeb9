/**
 * Scenario submission state: one in-flight request per panel, stale responses
 * discarded by sequence number, and a two-slot store so the previous scenario
 * stays visible for side-by-side comparison.
 */
import { validateForm } from "./bounds.js";
export class ScenarioPanel {
    constructor(api) {
        this.api = api;
        this.seq = 0;
        this.state = { kind: "idle" };
    }
    /**
     * Validate then submit. Resolves to the panel state this submission
     * produced, or null when a newer submission superseded it.
     */
    async submit(values, margin) {
        const check = validateForm(values);
        if (!check.ok) {
            this.state = {
                kind: "invalid",
                message: "fix the highlighted fields",
                fields: Object.keys(check.errors),
            };
            return this.state;
        }
        const complete = values;
        const mySeq = ++this.seq;
        this.state = { kind: "loading", seq: mySeq };
        const outcome = await this.api.predict({ ...complete, margin });
        if (mySeq !== this.seq)
            return null; // a newer submission superseded this one
        if (outcome.kind === "ok") {
            this.state = { kind: "result", scenario: { values: complete, margin, response: outcome.data } };
        }
        else if (outcome.kind === "invalid") {
            this.state = { kind: "invalid", message: outcome.message, fields: outcome.fields };
        }
        else {
            this.state = { kind: "failure", message: outcome.message };
        }
        return this.state;
    }
}
/** Latest scenario plus the one before it (A/B comparison). */
export class ComparisonStore {
    constructor() {
        this.current = null;
        this.previous = null;
    }
    push(scenario) {
        this.previous = this.current;
        this.current = scenario;
    }
    clear() {
        this.current = null;
        this.previous = null;
    }
}
