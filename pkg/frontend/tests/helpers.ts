// Test harness: a scripted "browser" (fetch + in-memory jar + capture log)
// driving the mock 2FA services, plus process management for the core
// toolkit's testbed and CLI.

import { createHmac, createHash } from 'node:crypto'
import { spawn, spawnSync, type ChildProcess } from 'node:child_process'
import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { dirname, join, resolve } from 'node:path'
import { fileURLToPath } from 'node:url'

import { CaptureLog } from '../src/capture'
import { MemoryCookieStore } from '../src/cookieStore'
import type { CookieRecord } from '../src/interchange'
import { toRfc3339 } from '../src/interchange'

const testsDir = dirname(fileURLToPath(import.meta.url))

export const REPO_ROOT = resolve(testsDir, '..', '..')
export const MATRIX_PATH = join(
  REPO_ROOT,
  'src',
  'se2fa',
  'fixtures',
  'testbed',
  'matrix24.json',
)

export interface Credentials {
  username: string
  password: string
  totpSeed: string
}

interface MatrixTarget {
  id: string
  trustCookies: Array<{ name: string }>
  accounts: Array<{ username: string; passwordHash: string; totpSeed: string }>
}

const matrix: { targets: MatrixTarget[] } = JSON.parse(readFileSync(MATRIX_PATH, 'utf-8'))

export function targetIndex(id: string): number {
  const index = matrix.targets.findIndex(target => target.id === id)
  if (index < 0) throw new Error(`no matrix target ${id}`)
  return index
}

export function trustCookieNames(id: string): string[] {
  return matrix.targets[targetIndex(id)].trustCookies.map(cookie => cookie.name)
}

export function credentialsFor(id: string, username: string): Credentials {
  const target = matrix.targets[targetIndex(id)]
  const account = target.accounts.find(candidate => candidate.username === username)
  if (account === undefined) throw new Error(`no account ${username} on ${id}`)
  const password = `${username}#pass#${id}`
  const digest = createHash('sha256').update(password).digest('hex')
  if (digest !== account.passwordHash) throw new Error('credential convention drifted')
  return { username, password, totpSeed: account.totpSeed }
}

// --- one-time passwords ------------------------------------------------------

export function totp(seed: string, atSeconds: number, digits = 6, step = 30): string {
  const counter = Buffer.alloc(8)
  counter.writeBigUInt64BE(BigInt(Math.floor(atSeconds / step)))
  const mac = createHmac('sha1', Buffer.from(seed, 'utf-8')).update(counter).digest()
  const offset = mac[mac.length - 1] & 0x0f
  const binary = mac.readUInt32BE(offset) & 0x7fffffff
  return String(binary % 10 ** digits).padStart(digits, '0')
}

// --- Set-Cookie handling -------------------------------------------------------

export function parseSetCookie(header: string, host: string, now: Date): CookieRecord | null {
  const [pair, ...attributes] = header.split(';')
  const eq = pair.indexOf('=')
  if (eq <= 0) return null
  const name = pair.slice(0, eq).trim()
  const value = pair.slice(eq + 1).trim()
  if (name.length === 0) return null

  let path = '/'
  let domain = host
  let secure = false
  let httpOnly = false
  let maxAge: number | null = null
  let expires: Date | null = null
  for (const chunk of attributes) {
    const [rawKey, ...rest] = chunk.split('=')
    const key = rawKey.trim().toLowerCase()
    const attrValue = rest.join('=').trim()
    if (key === 'secure') secure = true
    else if (key === 'httponly') httpOnly = true
    else if (key === 'path' && attrValue.startsWith('/')) path = attrValue
    else if (key === 'domain' && attrValue) domain = attrValue.replace(/^\./, '').toLowerCase()
    else if (key === 'max-age' && /^-?\d+$/.test(attrValue)) maxAge = Number(attrValue)
    else if (key === 'expires') {
      const parsed = Date.parse(attrValue)
      if (!Number.isNaN(parsed)) expires = new Date(parsed)
    }
  }
  let expiresAt: string | null = null
  if (maxAge !== null) expiresAt = toRfc3339(new Date(now.getTime() + maxAge * 1000))
  else if (expires !== null) expiresAt = toRfc3339(expires)
  return {
    name,
    value,
    domain,
    path,
    secure,
    httpOnly,
    sameSite: null,
    expiresAt,
    createdAt: toRfc3339(now),
  }
}

// --- the simulated browsing context ----------------------------------------------

export interface SessionOptions {
  fingerprint?: string
  ip?: string
}

export class BrowserSession {
  readonly store = new MemoryCookieStore()
  readonly capture = new CaptureLog()
  readonly fingerprint: string
  readonly ip: string

  constructor(
    readonly baseUrl: string,
    options: SessionOptions = {},
  ) {
    this.fingerprint = options.fingerprint ?? 'fp-extension-test'
    this.ip = options.ip ?? '203.0.113.99'
  }

  private get host(): string {
    return new URL(this.baseUrl).hostname
  }

  async request(method: string, path: string, body?: unknown): Promise<{ status: number; json: any }> {
    const now = new Date()
    this.store.purgeExpired(now)
    const records = await this.store.all()
    const cookieHeader = records.map(record => `${record.name}=${record.value}`).join('; ')
    const headers: Record<string, string> = {
      'Content-Type': 'application/json',
      'X-Device-Fingerprint': this.fingerprint,
      'X-Forwarded-For': this.ip,
    }
    const url = this.baseUrl + path
    if (cookieHeader) {
      headers['Cookie'] = cookieHeader
      this.capture.add('request', url, 'Cookie', cookieHeader, now)
    }
    const response = await fetch(url, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    })
    for (const header of response.headers.getSetCookie()) {
      this.capture.add('response', url, 'Set-Cookie', header, now)
      const record = parseSetCookie(header, this.host, now)
      if (record === null) continue
      if (record.expiresAt !== null && Date.parse(record.expiresAt) <= now.getTime()) {
        await this.store.remove(record)
      } else {
        await this.store.set(record)
      }
    }
    const text = await response.text()
    let parsed: any = null
    try {
      parsed = JSON.parse(text)
    } catch {
      parsed = null
    }
    return { status: response.status, json: parsed }
  }

  async login(credentials: Credentials): Promise<boolean> {
    const { status, json } = await this.request('POST', '/login', {
      username: credentials.username,
      password: credentials.password,
    })
    if (status !== 200 || typeof json?.requires2fa !== 'boolean') {
      throw new Error(`login failed: status ${status}`)
    }
    return json.requires2fa
  }

  async solve2fa(credentials: Credentials, rememberDevice: boolean): Promise<void> {
    const nowSeconds = Date.now() / 1000
    // the verifier accepts adjacent windows and consumes each code once
    for (const at of [nowSeconds, nowSeconds + 30, nowSeconds - 30]) {
      const { status, json } = await this.request('POST', '/2fa', {
        code: totp(credentials.totpSeed, at),
        rememberDevice,
      })
      if (status === 200) return
      if (json?.status !== 'replayed-code') break
    }
    throw new Error('challenge rejected')
  }

  async rememberFlow(credentials: Credentials): Promise<void> {
    const prompted = await this.login(credentials)
    if (!prompted) throw new Error('expected a challenge before solving')
    await this.solve2fa(credentials, true)
  }

  async reset(): Promise<void> {
    await this.request('POST', '/__reset')
  }
}

// --- core toolkit processes --------------------------------------------------------

export interface TestbedHandle {
  child: ChildProcess
  basePort: number
  urlFor(id: string): string
  stop(): void
}

export async function startTestbed(): Promise<TestbedHandle> {
  for (let attempt = 0; attempt < 5; attempt++) {
    const basePort = 24000 + Math.floor(Math.random() * 20000)
    const child = spawn(
      'se2fa',
      ['testbed', '--config', MATRIX_PATH, '--base-port', String(basePort)],
      { stdio: ['ignore', 'pipe', 'pipe'] },
    )
    const ready = await waitForPort(`http://127.0.0.1:${basePort}/account`, child)
    if (ready) {
      return {
        child,
        basePort,
        urlFor: (id: string) => `http://127.0.0.1:${basePort + targetIndex(id)}`,
        stop: () => child.kill('SIGTERM'),
      }
    }
    child.kill('SIGTERM')
  }
  throw new Error('could not start the testbed matrix')
}

async function waitForPort(url: string, child: ChildProcess): Promise<boolean> {
  for (let i = 0; i < 100; i++) {
    if (child.exitCode !== null) return false
    try {
      await fetch(url)
      return true
    } catch {
      await new Promise(resolveSleep => setTimeout(resolveSleep, 100))
    }
  }
  return false
}

export function runCoreCli(args: string[]): { status: number; stdout: string; stderr: string } {
  const result = spawnSync('se2fa', args, { encoding: 'utf-8' })
  return { status: result.status ?? -1, stdout: result.stdout, stderr: result.stderr }
}

export function scratchDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix))
}

export function writeCredsFile(dir: string, credentials: Credentials): string {
  const path = join(dir, `${credentials.username}.json`)
  writeFileSync(path, JSON.stringify(credentials))
  return path
}

export function writeFlowScript(dir: string, name: string, steps: unknown[]): string {
  const path = join(dir, name)
  writeFileSync(path, JSON.stringify({ steps }))
  return path
}
