// Selectively disable/enable individual cookies. A disabled cookie is
// removed from the live jar and cached here with its full attributes, so
// re-enabling restores it exactly (expiry preserved).

import type { CookieStore } from './cookieStore'
import type { CookieRecord } from './interchange'
import { recordKey } from './interchange'

export class ToggleError extends Error {}

export class RestoreFailed extends ToggleError {}

export class CookieToggles {
  private disabled = new Map<string, CookieRecord>()

  constructor(private readonly store: CookieStore) {}

  disabledKeys(): string[] {
    return [...this.disabled.keys()].sort()
  }

  async disable(key: Pick<CookieRecord, 'name' | 'domain' | 'path'>): Promise<CookieRecord> {
    const id = recordKey(key)
    const records = await this.store.all()
    const record = records.find(candidate => recordKey(candidate) === id)
    if (record === undefined) {
      throw new ToggleError(`no such cookie to disable: ${key.name}`)
    }
    this.disabled.set(id, record)
    await this.store.remove(key)
    return record
  }

  async enable(key: Pick<CookieRecord, 'name' | 'domain' | 'path'>): Promise<CookieRecord> {
    const id = recordKey(key)
    const cached = this.disabled.get(id)
    if (cached === undefined) {
      throw new ToggleError(`cookie is not disabled: ${key.name}`)
    }
    if (cached.expiresAt !== null && Date.parse(cached.expiresAt) <= Date.now()) {
      throw new RestoreFailed(`cookie ${key.name} expired while disabled`)
    }
    await this.store.set(cached)
    const restored = (await this.store.all()).find(candidate => recordKey(candidate) === id)
    if (restored === undefined) {
      throw new RestoreFailed(`cookie ${key.name} could not be restored`)
    }
    this.disabled.delete(id)
    return restored
  }
}
