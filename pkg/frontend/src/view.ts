/**
 * Pure presentation helpers. Every number shown is taken verbatim from a
 * service response (or the user's own input for the baseline marker); nothing
 * here re-derives model output.
 */

import type { ModelInfo, PredictResponse } from "./api.js";

export interface BarGeometry {
  baselinePct: number;
  postPct: number;
  intervalLeftPct: number;
  intervalWidthPct: number;
  lower: number;
  upper: number;
  post: number;
}

/** Positions on the 0-100 pain bar (the VAS scale doubles as percent). */
export function barGeometry(baseline: number, response: PredictResponse): BarGeometry {
  const { lower, upper } = response.interval;
  const post = response.predicted_post_pain;
  return {
    baselinePct: baseline,
    postPct: post,
    intervalLeftPct: lower,
    intervalWidthPct: upper - lower,
    lower,
    upper,
    post,
  };
}

export function intervalText(response: PredictResponse): string {
  const { lower, upper } = response.interval;
  return `pain between ${formatVas(lower)} and ${formatVas(upper)} after the program`;
}

export function certaintyText(response: PredictResponse): string {
  return `with ≈${Math.round(response.certainty_pct)}% certainty`;
}

export function changeText(response: PredictResponse): string {
  const change = response.predicted_change;
  const direction = change >= 0 ? "improvement" : "worsening";
  return `predicted change: ${formatVas(Math.abs(change))} points ${direction}`;
}

function formatVas(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(1);
}

export interface CurvePoint {
  margin: number;
  pct: number;
}

export interface CurveSeries {
  personalized: CurvePoint[];
  average: CurvePoint[] | null;
}

/** Certainty-vs-margin series from /model; null when there is nothing to draw. */
export function curveSeries(info: ModelInfo | null): CurveSeries | null {
  if (!info || !info.certainty) return null;
  const personalized = toPoints(info.certainty);
  if (personalized.length === 0) return null;
  const average = info.certainty_average ? toPoints(info.certainty_average) : null;
  return { personalized, average };
}

function toPoints(table: Record<string, number>): CurvePoint[] {
  return Object.entries(table)
    .map(([margin, rho]) => ({ margin: Number(margin), pct: 100 * rho }))
    .filter((p) => Number.isFinite(p.margin))
    .sort((a, b) => a.margin - b.margin);
}

/** SVG polyline points for a series inside a width x height viewBox. */
export function polylinePoints(points: CurvePoint[], width: number, height: number, pad = 24): string {
  if (points.length === 0) return "";
  const margins = points.map((p) => p.margin);
  const lo = Math.min(...margins);
  const hi = Math.max(...margins);
  const spanX = hi - lo || 1;
  return points
    .map((p) => {
      const x = pad + ((p.margin - lo) / spanX) * (width - 2 * pad);
      const y = height - pad - (p.pct / 100) * (height - 2 * pad);
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
}
