import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["test/**/*.test.ts"],
    // the e2e spawns a real metering service and waits on wall-clock drains
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
