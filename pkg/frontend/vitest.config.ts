import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    globalSetup: "./tests/hub.setup.ts",
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
