import { describe, expect, it } from 'vitest'

import {
  FormatError,
  lifetimeDays,
  makeSnapshot,
  parseSnapshot,
  serializeSnapshot,
  sortRecords,
  toRfc3339,
  type CookieRecord,
} from '../src/interchange'

function record(overrides: Partial<CookieRecord> = {}): CookieRecord {
  return {
    name: 'trust',
    value: 'abc',
    domain: 'example.com',
    path: '/',
    secure: true,
    httpOnly: true,
    sameSite: null,
    expiresAt: '2026-09-09T12:00:00Z',
    createdAt: '2026-08-10T12:00:00Z',
    ...overrides,
  }
}

describe('interchange', () => {
  it('round-trips through serialize/parse', () => {
    const snapshot = makeSnapshot('jar', new Date('2026-08-10T12:00:00Z'), [
      record(),
      record({ name: 'sid', expiresAt: null, secure: false, httpOnly: false }),
    ])
    expect(parseSnapshot(serializeSnapshot(snapshot))).toEqual(snapshot)
  })

  it('orders records by domain, path, name', () => {
    const ordered = sortRecords([
      record({ name: 'z' }),
      record({ name: 'a', domain: 'a.example.com' }),
      record({ name: 'a', path: '/x' }),
      record({ name: 'a' }),
    ])
    expect(ordered.map(r => `${r.domain}${r.path}:${r.name}`)).toEqual([
      'a.example.com/:a',
      'example.com/:a',
      'example.com/:z',
      'example.com/x:a',
    ])
  })

  it('rejects duplicate keys', () => {
    expect(() => makeSnapshot('jar', new Date(), [record(), record()])).toThrow(FormatError)
  })

  it('reports the offending record index', () => {
    const payload = JSON.stringify({
      label: 'jar',
      takenAt: '2026-08-10T12:00:00Z',
      cookies: [record(), { ...record({ name: 'b' }), secure: 'nope' }],
    })
    try {
      parseSnapshot(payload)
      expect.unreachable('parse must fail')
    } catch (error) {
      expect(error).toBeInstanceOf(FormatError)
      expect((error as FormatError).recordIndex).toBe(1)
    }
  })

  it('rejects structurally invalid documents', () => {
    expect(() => parseSnapshot('not json')).toThrow(FormatError)
    expect(() => parseSnapshot('[]')).toThrow(FormatError)
    expect(() => parseSnapshot('{"label":"x","cookies":[]}')).toThrow(FormatError)
  })

  it('renders whole-second timestamps without a fraction', () => {
    expect(toRfc3339(new Date('2026-08-10T12:00:00Z'))).toBe('2026-08-10T12:00:00Z')
    expect(toRfc3339(new Date('2026-08-10T12:00:00.123Z'))).toBe('2026-08-10T12:00:00.123000Z')
  })

  it('computes whole-day lifetimes with session as null', () => {
    expect(lifetimeDays(record())).toBe(30)
    expect(lifetimeDays(record({ expiresAt: null }))).toBeNull()
    expect(lifetimeDays(record({ expiresAt: '2026-08-10T12:00:01Z' }))).toBe(1)
  })
})
