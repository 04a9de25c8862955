import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("prefixes the base url and parses JSON", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ models: [] }));
    vi.stubGlobal("fetch", fetchMock);
    const api = new ApiClient("http://example.test:9");
    await expect(api.listModels()).resolves.toEqual({ models: [] });
    expect(fetchMock).toHaveBeenCalledWith(
      "http://example.test:9/models",
      undefined,
    );
  });

  it("sends overrides as a PATCH body, null meaning removal", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ ok: true }));
    vi.stubGlobal("fetch", fetchMock);
    await new ApiClient("").patchOverrides("abc", { Volume: 110, Price: null });
    const [url, init] = fetchMock.mock.calls[0] as unknown as [
      string,
      RequestInit,
    ];
    expect(url).toBe("/sessions/abc/overrides");
    expect(init.method).toBe("PATCH");
    expect(JSON.parse(String(init.body))).toEqual({ Volume: 110, Price: null });
  });

  it("unwraps the nested error envelope", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () =>
        jsonResponse(
          {
            detail: {
              error: "OverrideNotALeafDriver",
              detail: "'REV' is computed",
            },
          },
          422,
        ),
      ),
    );
    const err = await new ApiClient("")
      .patchOverrides("abc", { REV: 1 })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err).toMatchObject({
      status: 422,
      code: "OverrideNotALeafDriver",
      message: "'REV' is computed",
    });
  });

  it("flattens fastapi request-validation arrays", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () =>
        jsonResponse(
          { detail: [{ msg: "Input should be a valid number", loc: [] }] },
          422,
        ),
      ),
    );
    const err = await new ApiClient("")
      .createSession("gp")
      .catch((e: unknown) => e);
    expect(err).toMatchObject({
      code: "RequestValidation",
      message: "Input should be a valid number",
    });
  });

  it("survives a non-JSON error body", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(
        async () =>
          new Response("boom", { status: 500, statusText: "Server Error" }),
      ),
    );
    const err = await new ApiClient("")
      .listModels()
      .catch((e: unknown) => e);
    expect(err).toMatchObject({ status: 500, code: "HTTP 500" });
  });

  it("returns svg responses as text", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => new Response("<svg/>", { status: 200 })),
    );
    await expect(new ApiClient("").getSvg("gp")).resolves.toBe("<svg/>");
  });
});
