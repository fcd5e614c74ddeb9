import { ApiClient, resolveBaseUrl } from "./api.js";
import { validateForm } from "./bounds.js";
import { buildForm, readForm, renderCurve, renderScenario, setSubmitEnabled, showBanner, showFieldErrors, } from "./dom.js";
import { ComparisonStore, ScenarioPanel } from "./panel.js";
import { curveSeries } from "./view.js";
const api = new ApiClient(resolveBaseUrl(window.location.search));
const panel = new ScenarioPanel(api);
const comparison = new ComparisonStore();
const form = document.querySelector("#scenario-form");
const resultA = document.querySelector("#result-a");
const resultB = document.querySelector("#result-b");
const curve = document.querySelector("#certainty-curve");
const status = document.querySelector("#service-status");
buildForm(form);
renderScenario(resultA, null, "Scenario A (latest)");
renderScenario(resultB, null, "Scenario B (previous)");
function refreshValidity() {
    const { values } = readForm(form);
    const check = validateForm(values);
    const touched = Array.from(form.querySelectorAll("input[name]")).some((input) => input.value.trim() !== "");
    showFieldErrors(form, touched ? check.errors : {});
    setSubmitEnabled(form, check.ok);
}
form.addEventListener("input", refreshValidity);
form.addEventListener("submit", (event) => {
    event.preventDefault();
    void submitScenario();
});
async function submitScenario() {
    const { values, margin } = readForm(form);
    showBanner(form, null);
    const state = await panel.submit(values, margin);
    if (state === null)
        return; // superseded by a newer submission
    if (state.kind === "result") {
        comparison.push(state.scenario);
        renderScenario(resultA, comparison.current, "Scenario A (latest)");
        renderScenario(resultB, comparison.previous, "Scenario B (previous)");
    }
    else if (state.kind === "invalid") {
        const fieldErrors = Object.fromEntries(state.fields.map((f) => [f, "rejected by the service"]));
        showFieldErrors(form, fieldErrors);
        showBanner(form, state.message);
    }
    else if (state.kind === "failure") {
        showBanner(form, state.message);
    }
}
async function boot() {
    const health = await api.health();
    if (!health || health.status !== "ok") {
        status.hidden = false;
        status.textContent = health
            ? "service is degraded: no model loaded"
            : "prediction service unreachable — is `gladpred serve` running?";
    }
    renderCurve(curve, curveSeries(await api.model()));
}
void boot();
