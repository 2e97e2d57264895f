import { defineConfig } from "vitest/config";

// Dev server proxies API routes to a running `hpk serve` process.
const API = "http://127.0.0.1:8000";
const routes = ["/root", "/object", "/proc", "/eval", "/result",
                "/shared-table", "/admin"];

export default defineConfig({
  server: {
    proxy: Object.fromEntries(routes.map((r) => [r, API])),
  },
  test: {
    environment: "jsdom",
  },
});
