import { defineConfig } from 'vitest/config';

export default defineConfig({
  server: {
    proxy: {
      // forward API calls to a locally running `engine serve`
      '/search': 'http://127.0.0.1:8000',
      '/suggest': 'http://127.0.0.1:8000',
      '/authors': 'http://127.0.0.1:8000',
      '/health': 'http://127.0.0.1:8000',
    },
  },
  test: {
    environment: 'jsdom',
  },
});
