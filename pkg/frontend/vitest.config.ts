import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the e2e suite spawns the Python service and waits for readiness
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
