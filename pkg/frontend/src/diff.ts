// Snapshot diffing with the same semantics as the core library: keys are
// (name, domain, path); an attribute-only change still counts as changed
// because a dropped HttpOnly or an extended lifetime is a finding.

import type { CookieRecord, CookieSnapshot } from './interchange'
import { recordKey, sortRecords } from './interchange'

export interface ChangedPair {
  before: CookieRecord
  after: CookieRecord
}

export interface SnapshotDiff {
  added: CookieRecord[]
  removed: CookieRecord[]
  changed: ChangedPair[]
}

function sameRecord(a: CookieRecord, b: CookieRecord): boolean {
  return (
    a.name === b.name &&
    a.value === b.value &&
    a.domain === b.domain &&
    a.path === b.path &&
    a.secure === b.secure &&
    a.httpOnly === b.httpOnly &&
    a.sameSite === b.sameSite &&
    timestampEqual(a.expiresAt, b.expiresAt) &&
    timestampEqual(a.createdAt, b.createdAt)
  )
}

function timestampEqual(a: string | null, b: string | null): boolean {
  if (a === null || b === null) return a === b
  return Date.parse(a) === Date.parse(b)
}

export function diffSnapshots(before: CookieSnapshot, after: CookieSnapshot): SnapshotDiff {
  const old = new Map(before.cookies.map(record => [recordKey(record), record]))
  const fresh = new Map(after.cookies.map(record => [recordKey(record), record]))

  const added = sortRecords(after.cookies.filter(record => !old.has(recordKey(record))))
  const removed = sortRecords(before.cookies.filter(record => !fresh.has(recordKey(record))))
  const changed: ChangedPair[] = []
  for (const record of sortRecords(before.cookies)) {
    const next = fresh.get(recordKey(record))
    if (next !== undefined && !sameRecord(record, next)) {
      changed.push({ before: record, after: next })
    }
  }
  return { added, removed, changed }
}

// JSON document matching the core diff output shape exactly.
export function diffToJson(diff: SnapshotDiff): unknown {
  return {
    added: diff.added,
    removed: diff.removed,
    changed: diff.changed.map(pair => ({ before: pair.before, after: pair.after })),
  }
}

export function candidateKeys(diff: SnapshotDiff): string[] {
  return [...diff.added.map(recordKey), ...diff.changed.map(pair => recordKey(pair.after))].sort()
}
