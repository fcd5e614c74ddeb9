import { describe, expect, it } from "vitest";

import { ApiClient, resolveBaseUrl } from "../src/api.js";

const REQUEST = {
  baseline_pain: 45,
  symptom_duration: 40,
  eq5d: 0.78,
  walk40m: 28.2,
  age: 65,
  bmi: 28.6,
  margin: 15,
};

describe("ApiClient.predict", () => {
  it("posts JSON to <base>/predict and returns the parsed body", async () => {
    let seenUrl = "";
    let seenBody = "";
    const api = new ApiClient("http://svc:8000", async (url, init) => {
      seenUrl = url;
      seenBody = String(init?.body);
      return new Response(JSON.stringify({ predicted_change: 20 }), { status: 200 });
    });
    const outcome = await api.predict(REQUEST);
    expect(seenUrl).toBe("http://svc:8000/predict");
    expect(JSON.parse(seenBody)).toEqual(REQUEST);
    expect(outcome.kind).toBe("ok");
  });

  it("maps 422 to invalid with the offending fields", async () => {
    const api = new ApiClient("", async () =>
      new Response(JSON.stringify({ error: "bad", fields: ["bmi"] }), { status: 422 }),
    );
    expect(await api.predict(REQUEST)).toEqual({ kind: "invalid", message: "bad", fields: ["bmi"] });
  });

  it("maps 500 to failure", async () => {
    const api = new ApiClient("", async () => new Response("{}", { status: 500 }));
    const outcome = await api.predict(REQUEST);
    expect(outcome.kind).toBe("failure");
  });

  it("maps a thrown fetch to failure", async () => {
    const api = new ApiClient("", async () => {
      throw new TypeError("refused");
    });
    const outcome = await api.predict(REQUEST);
    expect(outcome.kind).toBe("failure");
  });
});

describe("ApiClient.model / health", () => {
  it("returns null when the endpoint is unreachable", async () => {
    const api = new ApiClient("", async () => {
      throw new TypeError("refused");
    });
    expect(await api.model()).toBeNull();
    expect(await api.health()).toBeNull();
  });

  it("parses the model payload", async () => {
    const api = new ApiClient("", async () =>
      new Response(JSON.stringify({ model_loaded: true, certainty: { "15": 0.58 } }), { status: 200 }),
    );
    const info = await api.model();
    expect(info?.certainty?.["15"]).toBe(0.58);
  });
});

describe("resolveBaseUrl", () => {
  it("uses same-origin by default", () => {
    expect(resolveBaseUrl("")).toBe("");
  });

  it("honours the ?api= override and strips trailing slashes", () => {
    expect(resolveBaseUrl("?api=http://localhost:8000/")).toBe("http://localhost:8000");
  });
});
