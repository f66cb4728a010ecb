// Snapshot capture: freeze the site's jar into an interchange document.

import type { CookieStore } from './cookieStore'
import type { CookieSnapshot } from './interchange'
import { makeSnapshot, serializeSnapshot } from './interchange'

export interface UiSnapshotEntry {
  snapshot: CookieSnapshot
  pageUrl: string
  note: string
}

export async function takeSnapshot(
  store: CookieStore,
  label: string,
  pageUrl: string,
  note = '',
  now: Date = new Date(),
): Promise<UiSnapshotEntry> {
  const records = await store.all()
  return {
    snapshot: makeSnapshot(label, now, records),
    pageUrl,
    note,
  }
}

export function exportSnapshot(entry: UiSnapshotEntry): string {
  return serializeSnapshot(entry.snapshot)
}
