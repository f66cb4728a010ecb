import { defineConfig } from 'vitest/config'

export default defineConfig({
  test: {
    include: ['tests/**/*.test.ts'],
    testTimeout: 30_000,
    hookTimeout: 30_000,
    // the parity suite owns a live testbed process; keep files sequential
    fileParallelism: false,
  },
})
