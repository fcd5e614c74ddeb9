/** DOM construction and updates; all data arrives pre-shaped from view.ts. */
import { FIELDS, MARGINS, DEFAULT_MARGIN } from "./bounds.js";
import { barGeometry, certaintyText, changeText, intervalText, polylinePoints } from "./view.js";
export function buildForm(root) {
    const rows = FIELDS.map((f) => `
    <label class="field" data-field="${f.id}">
      <span class="field-label">${f.label} <small>(${f.unit})</small></span>
      <input type="number" name="${f.id}" min="${f.min}" max="${f.max}" step="${f.step}" inputmode="decimal" />
      <span class="field-error" hidden></span>
    </label>`).join("");
    const options = MARGINS.map((m) => `<option value="${m}" ${m === DEFAULT_MARGIN ? "selected" : ""}>±${m} points</option>`).join("");
    root.innerHTML = `
    ${rows}
    <label class="field">
      <span class="field-label">Acceptable margin</span>
      <select name="margin">${options}</select>
    </label>
    <button type="submit" disabled>Predict</button>
    <p class="banner" hidden></p>`;
}
export function readForm(root) {
    const values = {};
    for (const f of FIELDS) {
        const input = root.querySelector(`input[name="${f.id}"]`);
        values[f.id] = input.value.trim() === "" ? null : Number(input.value);
    }
    const margin = Number(root.querySelector('select[name="margin"]').value);
    return { values, margin };
}
export function showFieldErrors(root, errors) {
    for (const f of FIELDS) {
        const row = root.querySelector(`[data-field="${f.id}"]`);
        const slot = row.querySelector(".field-error");
        const message = errors[f.id];
        row.classList.toggle("invalid", Boolean(message));
        slot.hidden = !message;
        slot.textContent = message ?? "";
    }
}
export function setSubmitEnabled(root, enabled) {
    root.querySelector("button[type=submit]").disabled = !enabled;
}
export function showBanner(root, message) {
    const banner = root.querySelector(".banner");
    banner.hidden = !message;
    banner.textContent = message ?? "";
}
export function renderScenario(target, scenario, title) {
    if (!scenario) {
        target.innerHTML = `<h3>${title}</h3><p class="placeholder">no prediction yet</p>`;
        return;
    }
    const { response, values, margin } = scenario;
    const bar = barGeometry(values.baseline_pain, response);
    const warning = response.warning ? `<p class="warning">${response.warning}</p>` : "";
    target.innerHTML = `
    <h3>${title}</h3>
    <p class="headline">${intervalText(response)} <strong>${certaintyText(response)}</strong></p>
    <p class="sub">${changeText(response)} · margin ±${margin}</p>
    <div class="painbar" role="img" aria-label="pain scale 0 to 100">
      <div class="interval" style="left:${bar.intervalLeftPct}%;width:${bar.intervalWidthPct}%"></div>
      <div class="marker baseline" style="left:${bar.baselinePct}%" title="baseline ${values.baseline_pain}"></div>
      <div class="marker post" style="left:${bar.postPct}%" title="predicted ${bar.post}"></div>
    </div>
    <div class="scale"><span>0 · no pain</span><span>100 · worst pain</span></div>
    ${warning}`;
}
export function renderCurve(container, series) {
    if (!series) {
        container.hidden = true;
        return;
    }
    container.hidden = false;
    const personalized = polylinePoints(series.personalized, 360, 200);
    const average = series.average ? polylinePoints(series.average, 360, 200) : "";
    const labels = series.personalized
        .map((p) => `<text x="${xFor(p.margin, series.personalized)}" y="196" class="tick">±${p.margin}</text>`)
        .join("");
    container.innerHTML = `
    <h3>Certainty by margin</h3>
    <svg viewBox="0 0 360 200" class="curve">
      ${average ? `<polyline class="avg-line" points="${average}" />` : ""}
      <polyline class="pers-line" points="${personalized}" />
      ${labels}
    </svg>
    <p class="legend"><span class="swatch pers"></span> personalized
      ${average ? '<span class="swatch avg"></span> average model' : ""}</p>`;
}
function xFor(margin, points, width = 360, pad = 24) {
    const margins = points.map((p) => p.margin);
    const lo = Math.min(...margins);
    const span = Math.max(...margins) - lo || 1;
    return Math.round(pad + ((margin - lo) / span) * (width - 2 * pad)) - 8;
}
