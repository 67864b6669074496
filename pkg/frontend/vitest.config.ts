import { defineConfig } from "vitest/config";

export default defineConfig({
  resolve: {
    // Source imports carry .js extensions for native browser ESM; map them
    // back to the .ts sources for the test runner.
    alias: [{ find: /^(\.{1,2}\/.*)\.js$/, replacement: "$1" }],
  },
  test: {
    environment: "jsdom",
    globalSetup: ["./tests/setup/global.ts"],
    testTimeout: 30000,
    hookTimeout: 120000,
    fileParallelism: false,
  },
});
