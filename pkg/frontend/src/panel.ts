/**
 * Scenario submission state: one in-flight request per panel, stale responses
 * discarded by sequence number, and a two-slot store so the previous scenario
 * stays visible for side-by-side comparison.
 */

import type { ApiClient, PredictOutcome, PredictResponse } from "./api.js";
import type { FieldId, FormValues } from "./bounds.js";
import { validateForm } from "./bounds.js";

export interface Scenario {
  values: Record<FieldId, number>;
  margin: number;
  response: PredictResponse;
}

export type PanelState =
  | { kind: "idle" }
  | { kind: "loading"; seq: number }
  | { kind: "result"; scenario: Scenario }
  | { kind: "invalid"; message: string; fields: string[] }
  | { kind: "failure"; message: string };

export class ScenarioPanel {
  private seq = 0;
  state: PanelState = { kind: "idle" };

  constructor(private readonly api: ApiClient) {}

  /**
   * Validate then submit. Resolves to the panel state this submission
   * produced, or null when a newer submission superseded it.
   */
  async submit(values: FormValues, margin: number): Promise<PanelState | null> {
    const check = validateForm(values);
    if (!check.ok) {
      this.state = {
        kind: "invalid",
        message: "fix the highlighted fields",
        fields: Object.keys(check.errors),
      };
      return this.state;
    }
    const complete = values as Record<FieldId, number>;
    const mySeq = ++this.seq;
    this.state = { kind: "loading", seq: mySeq };

    const outcome: PredictOutcome = await this.api.predict({ ...complete, margin });
    if (mySeq !== this.seq) return null; // a newer submission superseded this one

    if (outcome.kind === "ok") {
      this.state = { kind: "result", scenario: { values: complete, margin, response: outcome.data } };
    } else if (outcome.kind === "invalid") {
      this.state = { kind: "invalid", message: outcome.message, fields: outcome.fields };
    } else {
      this.state = { kind: "failure", message: outcome.message };
    }
    return this.state;
  }
}

/** Latest scenario plus the one before it (A/B comparison). */
export class ComparisonStore {
  current: Scenario | null = null;
  previous: Scenario | null = null;

  push(scenario: Scenario): void {
    this.previous = this.current;
    this.current = scenario;
  }

  clear(): void {
    this.current = null;
    this.previous = null;
  }
}
