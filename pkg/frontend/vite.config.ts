import { defineConfig } from "vite";

export default defineConfig({
  base: "./",
  build: { outDir: "dist" },
  test: {
    environment: "node",
    globalSetup: "./tests/global-setup.ts",
    testTimeout: 60000,
    hookTimeout: 120000,
  },
});
