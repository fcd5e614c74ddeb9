/**
 * Typed client for the prediction service. The UI never computes predictions
 * itself: every displayed number comes from one of these responses.
 */
export class ApiClient {
    constructor(baseUrl = "", fetchFn = (url, init) => fetch(url, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async predict(request) {
        let response;
        try {
            response = await this.fetchFn(`${this.baseUrl}/predict`, {
                method: "POST",
                headers: { "content-type": "application/json" },
                body: JSON.stringify(request),
            });
        }
        catch (err) {
            return { kind: "failure", message: `service unreachable: ${String(err)}` };
        }
        if (response.status === 422) {
            const body = (await response.json());
            return { kind: "invalid", message: body.error ?? "invalid input", fields: body.fields ?? [] };
        }
        if (!response.ok) {
            return { kind: "failure", message: `service error (${response.status})` };
        }
        return { kind: "ok", data: (await response.json()) };
    }
    async model() {
        try {
            const response = await this.fetchFn(`${this.baseUrl}/model`);
            if (!response.ok)
                return null;
            return (await response.json());
        }
        catch {
            return null;
        }
    }
    async health() {
        try {
            const response = await this.fetchFn(`${this.baseUrl}/health`);
            if (!response.ok)
                return null;
            return (await response.json());
        }
        catch {
            return null;
        }
    }
}
/** Base URL override: ?api=http://host:port wins, else same origin. */
export function resolveBaseUrl(search) {
    const fromQuery = new URLSearchParams(search).get("api");
    return fromQuery ? fromQuery.replace(/\/+$/, "") : "";
}
