import { describe, expect, it } from "vitest";

import type { ModelInfo, PredictResponse } from "../src/api.js";
import {
  barGeometry,
  certaintyText,
  changeText,
  curveSeries,
  intervalText,
  polylinePoints,
} from "../src/view.js";

// The worked example: baseline pain 45, the bundle predicts a 20-point
// improvement, margin 15 -> pain between 10 and 40 with ~58% certainty.
const RESPONSE_15: PredictResponse = {
  predicted_change: 20.0,
  predicted_post_pain: 25.0,
  interval: { lower: 10.0, upper: 40.0, margin: 15.0 },
  certainty_pct: 57.95,
  model_info: { dict_edition: "base34", variant: "concise", bundle_hash: "abc" },
};

const RESPONSE_20: PredictResponse = {
  predicted_change: 20.0,
  predicted_post_pain: 25.0,
  interval: { lower: 5.0, upper: 45.0, margin: 20.0 },
  certainty_pct: 70.95,
  model_info: { dict_edition: "base34", variant: "concise", bundle_hash: "abc" },
};

describe("scenario rendering", () => {
  it("renders the worked example interval 10-40 with the bundle certainty", () => {
    const bar = barGeometry(45, RESPONSE_15);
    expect(bar.intervalLeftPct).toBe(10);
    expect(bar.intervalWidthPct).toBe(30);
    expect(bar.baselinePct).toBe(45);
    expect(bar.postPct).toBe(25);
    expect(intervalText(RESPONSE_15)).toBe("pain between 10 and 40 after the program");
    expect(certaintyText(RESPONSE_15)).toBe("with ≈58% certainty");
  });

  it("switching the margin 15 -> 20 widens the interval and never lowers certainty", () => {
    const at15 = barGeometry(45, RESPONSE_15);
    const at20 = barGeometry(45, RESPONSE_20);
    expect(at20.intervalWidthPct).toBeGreaterThan(at15.intervalWidthPct);
    expect(RESPONSE_20.certainty_pct).toBeGreaterThanOrEqual(RESPONSE_15.certainty_pct);
  });

  it("uses response values verbatim — no local recomputation", () => {
    // a deliberately inconsistent response must be rendered as-is
    const odd: PredictResponse = {
      ...RESPONSE_15,
      predicted_post_pain: 33.0,
      interval: { lower: 12.0, upper: 41.0, margin: 15.0 },
    };
    const bar = barGeometry(45, odd);
    expect(bar.post).toBe(33.0);
    expect(bar.lower).toBe(12.0);
    expect(bar.upper).toBe(41.0);
    expect(bar.intervalWidthPct).toBe(29.0);
  });

  it("describes the change direction", () => {
    expect(changeText(RESPONSE_15)).toBe("predicted change: 20 points improvement");
    expect(changeText({ ...RESPONSE_15, predicted_change: -7.5 })).toBe(
      "predicted change: 7.5 points worsening",
    );
  });
});

const MODEL: ModelInfo = {
  model_loaded: true,
  variant: "concise",
  certainty: { "5": 0.2112, "10": 0.4073, "15": 0.5795, "20": 0.7095 },
  certainty_average: { "5": 0.1787, "10": 0.3455, "15": 0.5143, "20": 0.626 },
};

describe("certainty curve", () => {
  it("builds a monotone four-point personalized series", () => {
    const series = curveSeries(MODEL)!;
    expect(series.personalized.map((p) => p.margin)).toEqual([5, 10, 15, 20]);
    const pcts = series.personalized.map((p) => p.pct);
    expect(pcts).toEqual([...pcts].sort((a, b) => a - b));
  });

  it("includes the average line when the bundle carries it", () => {
    const series = curveSeries(MODEL)!;
    expect(series.average).not.toBeNull();
    series.average!.forEach((avg, i) => {
      expect(series.personalized[i].pct).toBeGreaterThanOrEqual(avg.pct);
    });
  });

  it("omits the average line when absent", () => {
    const series = curveSeries({ ...MODEL, certainty_average: undefined })!;
    expect(series.average).toBeNull();
  });

  it("hides entirely when /model is unavailable or empty", () => {
    expect(curveSeries(null)).toBeNull();
    expect(curveSeries({ model_loaded: false })).toBeNull();
    expect(curveSeries({ model_loaded: true, certainty: {} })).toBeNull();
  });

  it("maps points into the viewBox", () => {
    const series = curveSeries(MODEL)!;
    const points = polylinePoints(series.personalized, 360, 200);
    const pairs = points.split(" ").map((p) => p.split(",").map(Number));
    expect(pairs).toHaveLength(4);
    for (const [x, y] of pairs) {
      expect(x).toBeGreaterThanOrEqual(24);
      expect(x).toBeLessThanOrEqual(336);
      expect(y).toBeGreaterThanOrEqual(24);
      expect(y).toBeLessThanOrEqual(176);
    }
    // higher certainty -> smaller y (SVG grows downward)
    expect(pairs[3][1]).toBeLessThan(pairs[0][1]);
  });
});
