import { defineConfig } from "vitest/config";

// Dev server proxies API paths to a locally running `vdmn serve`.
const API = "http://127.0.0.1:8000";

export default defineConfig({
  server: {
    proxy: {
      "/models": API,
      "/sessions": API,
    },
  },
  test: {
    environment: "jsdom",
    testTimeout: 60_000,
    hookTimeout: 30_000,
  },
});
