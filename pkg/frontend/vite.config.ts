/// <reference types="vitest/config" />
import { defineConfig } from "vite";

const backend = "http://127.0.0.1:8000";

export default defineConfig({
  server: {
    proxy: Object.fromEntries(
      ["/sessions", "/products", "/fixtures", "/fixtures-index", "/health"].map((path) => [
        path,
        backend,
      ])
    ),
  },
  test: {
    environment: "jsdom",
    include: ["test/**/*.test.ts"],
    setupFiles: ["test/setup.ts"],
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
