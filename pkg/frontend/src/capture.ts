// Traffic capture: only the two cookie-bearing headers are retained.

export type CaptureDirection = 'request' | 'response'

export interface CaptureRecord {
  direction: CaptureDirection
  url: string
  headerName: 'Cookie' | 'Set-Cookie'
  headerValue: string
  at: string
}

export class CaptureLog {
  private entries: CaptureRecord[] = []

  add(
    direction: CaptureDirection,
    url: string,
    headerName: string,
    headerValue: string,
    at: Date = new Date(),
  ): boolean {
    const normalized = headerName.toLowerCase()
    if (normalized !== 'cookie' && normalized !== 'set-cookie') return false
    this.entries.push({
      direction,
      url,
      headerName: normalized === 'cookie' ? 'Cookie' : 'Set-Cookie',
      headerValue,
      at: at.toISOString(),
    })
    return true
  }

  records(): CaptureRecord[] {
    return [...this.entries]
  }

  setCookieValues(): string[] {
    return this.entries
      .filter(entry => entry.headerName === 'Set-Cookie')
      .map(entry => entry.headerValue)
  }

  toJsonl(): string {
    return this.entries.map(entry => JSON.stringify(entry)).join('\n') + (this.entries.length ? '\n' : '')
  }

  clear(): void {
    this.entries = []
  }
}
