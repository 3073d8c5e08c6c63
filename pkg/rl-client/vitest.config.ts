import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['test/**/*.test.ts'],
    testTimeout: 1_200_000,
    hookTimeout: 180_000,
    fileParallelism: false, // the training test wants the CPU to itself
  },
});
