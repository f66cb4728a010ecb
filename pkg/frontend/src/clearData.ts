// Clear browsing state between experiments. Capture logs and saved
// snapshot entries live in the extension, not the site, and survive.

import type { CookieStore } from './cookieStore'

export interface ClearScope {
  domain?: string // undefined clears everything the store can reach
}

export async function clearAll(store: CookieStore, scope: ClearScope = {}): Promise<void> {
  await store.clear(scope.domain)
  if (typeof chrome !== 'undefined' && chrome.browsingData !== undefined) {
    await chrome.browsingData.remove(
      { origins: scope.domain ? [`https://${scope.domain}`, `http://${scope.domain}`] : undefined },
      { cacheStorage: true, localStorage: true, serviceWorkers: true },
    )
  }
}
