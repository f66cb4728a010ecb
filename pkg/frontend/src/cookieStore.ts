// Cookie store abstraction: the extension talks to the browser's jar via
// chrome.cookies (which sees HttpOnly cookies — that is the point of a
// browser-resident agent), while tests drive an in-memory implementation.

import type { CookieRecord, SameSite } from './interchange'
import { recordKey, sortRecords, toRfc3339 } from './interchange'

export interface CookieStore {
  all(): Promise<CookieRecord[]>
  set(record: CookieRecord): Promise<void>
  remove(key: Pick<CookieRecord, 'name' | 'domain' | 'path'>): Promise<void>
  clear(scopeDomain?: string): Promise<void>
}

export class MemoryCookieStore implements CookieStore {
  private records = new Map<string, CookieRecord>()

  async all(): Promise<CookieRecord[]> {
    return sortRecords([...this.records.values()])
  }

  async set(record: CookieRecord): Promise<void> {
    this.records.set(recordKey(record), record)
  }

  async remove(key: Pick<CookieRecord, 'name' | 'domain' | 'path'>): Promise<void> {
    this.records.delete(recordKey(key))
  }

  async clear(scopeDomain?: string): Promise<void> {
    if (scopeDomain === undefined) {
      this.records.clear()
      return
    }
    for (const [key, record] of [...this.records]) {
      if (record.domain === scopeDomain || record.domain.endsWith(`.${scopeDomain}`)) {
        this.records.delete(key)
      }
    }
  }

  // test hook: expire cookies against a reference time
  purgeExpired(now: Date): void {
    for (const [key, record] of [...this.records]) {
      if (record.expiresAt !== null && Date.parse(record.expiresAt) <= now.getTime()) {
        this.records.delete(key)
      }
    }
  }
}

function fromChromeSameSite(value: string | undefined): SameSite {
  switch (value) {
    case 'strict':
      return 'Strict'
    case 'lax':
      return 'Lax'
    case 'no_restriction':
      return 'None'
    default:
      return null
  }
}

function toChromeSameSite(value: SameSite): 'strict' | 'lax' | 'no_restriction' | 'unspecified' {
  switch (value) {
    case 'Strict':
      return 'strict'
    case 'Lax':
      return 'lax'
    case 'None':
      return 'no_restriction'
    default:
      return 'unspecified'
  }
}

export class ChromeCookieStore implements CookieStore {
  // Scoped to one site: the URL decides which jar partition we read.
  constructor(private readonly siteUrl: string) {}

  private urlFor(record: Pick<CookieRecord, 'domain' | 'path' | 'secure'>): string {
    const scheme = 'secure' in record && record.secure ? 'https' : 'http'
    const host = record.domain.replace(/^\./, '')
    return `${scheme}://${host}${record.path}`
  }

  async all(): Promise<CookieRecord[]> {
    const cookies = await chrome.cookies.getAll({ url: this.siteUrl })
    const now = toRfc3339(new Date())
    return sortRecords(
      cookies.map(cookie => ({
        name: cookie.name,
        value: cookie.value,
        domain: cookie.domain.replace(/^\./, ''),
        path: cookie.path,
        secure: cookie.secure,
        httpOnly: cookie.httpOnly,
        sameSite: fromChromeSameSite(cookie.sameSite),
        expiresAt:
          cookie.session || cookie.expirationDate === undefined
            ? null
            : toRfc3339(new Date(cookie.expirationDate * 1000)),
        // the browser does not expose creation time; capture time stands in
        createdAt: now,
      })),
    )
  }

  async set(record: CookieRecord): Promise<void> {
    await chrome.cookies.set({
      url: this.urlFor(record),
      name: record.name,
      value: record.value,
      domain: record.domain,
      path: record.path,
      secure: record.secure,
      httpOnly: record.httpOnly,
      sameSite: toChromeSameSite(record.sameSite),
      expirationDate:
        record.expiresAt === null ? undefined : Date.parse(record.expiresAt) / 1000,
    })
  }

  async remove(key: Pick<CookieRecord, 'name' | 'domain' | 'path'>): Promise<void> {
    await chrome.cookies.remove({
      url: this.urlFor({ ...key, secure: false }),
      name: key.name,
    })
  }

  async clear(scopeDomain?: string): Promise<void> {
    const cookies = await chrome.cookies.getAll(
      scopeDomain ? { domain: scopeDomain } : { url: this.siteUrl },
    )
    await Promise.all(
      cookies.map(cookie =>
        chrome.cookies.remove({
          url: this.urlFor({
            domain: cookie.domain.replace(/^\./, ''),
            path: cookie.path,
            secure: cookie.secure,
          }),
          name: cookie.name,
        }),
      ),
    )
  }
}
