// Devtools panel: snapshot list, diff view, per-cookie toggles, clear,
// and export. State stays local to the browser profile; exports are
// manual file downloads.

import { ChromeCookieStore } from './cookieStore'
import { clearAll } from './clearData'
import { diffSnapshots, diffToJson } from './diff'
import type { CookieRecord } from './interchange'
import { lifetimeDays } from './interchange'
import { exportSnapshot, takeSnapshot, type UiSnapshotEntry } from './snapshot'
import { CookieToggles, ToggleError } from './toggle'

const entries: UiSnapshotEntry[] = []
let siteUrl = 'http://127.0.0.1:8440'
let store = new ChromeCookieStore(siteUrl)
let toggles = new CookieToggles(store)

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (node === null) throw new Error(`missing element #${id}`)
  return node as T
}

function download(filename: string, payload: string): void {
  const blob = new Blob([payload], { type: 'application/json' })
  const url = URL.createObjectURL(blob)
  const link = document.createElement('a')
  link.href = url
  link.download = filename
  link.click()
  URL.revokeObjectURL(url)
}

function describe(record: CookieRecord): string {
  const days = lifetimeDays(record)
  const expiry = days === null ? 'Session' : `${days}d`
  const flags = [record.secure ? 'Secure' : '', record.httpOnly ? 'HttpOnly' : '']
    .filter(Boolean)
    .join(' ')
  return `${record.name} [${expiry}${flags ? ' ' + flags : ''}]`
}

function renderSnapshots(): void {
  const list = el<HTMLUListElement>('snapshots')
  list.replaceChildren(
    ...entries.map((entry, index) => {
      const item = document.createElement('li')
      item.textContent = `#${index} ${entry.snapshot.label} (${entry.snapshot.cookies.length} cookies)`
      const button = document.createElement('button')
      button.textContent = 'export'
      button.addEventListener('click', () =>
        download(`${entry.snapshot.label}.json`, exportSnapshot(entry)),
      )
      item.append(' ', button)
      return item
    }),
  )
}

function renderDiff(beforeIndex: number, afterIndex: number): void {
  const before = entries[beforeIndex]
  const after = entries[afterIndex]
  if (before === undefined || after === undefined) return
  const diff = diffSnapshots(before.snapshot, after.snapshot)
  const view = el<HTMLDivElement>('diff')
  // added first: new cookies are what trust isolation starts from
  const sections: Array<[string, string[]]> = [
    ['Added', diff.added.map(describe)],
    ['Removed', diff.removed.map(describe)],
    ['Changed', diff.changed.map(pair => `${describe(pair.before)} -> ${describe(pair.after)}`)],
  ]
  view.replaceChildren(
    ...sections.map(([title, lines]) => {
      const block = document.createElement('section')
      const heading = document.createElement('h3')
      heading.textContent = `${title} (${lines.length})`
      block.append(heading)
      const list = document.createElement('ul')
      list.replaceChildren(
        ...lines.map(line => {
          const item = document.createElement('li')
          item.textContent = line
          return item
        }),
      )
      block.append(list)
      return block
    }),
  )
  el<HTMLTextAreaElement>('diff-json').value = JSON.stringify(diffToJson(diff), null, 2)
}

async function renderCookies(): Promise<void> {
  const records = await store.all()
  const list = el<HTMLUListElement>('cookies')
  list.replaceChildren(
    ...records.map(record => {
      const item = document.createElement('li')
      const box = document.createElement('input')
      box.type = 'checkbox'
      box.checked = true
      box.addEventListener('change', async () => {
        try {
          if (box.checked) await toggles.enable(record)
          else await toggles.disable(record)
        } catch (error) {
          if (error instanceof ToggleError) el('status').textContent = error.message
          box.checked = !box.checked
        }
      })
      item.append(box, ` ${describe(record)}`)
      return item
    }),
  )
}

async function refresh(): Promise<void> {
  await renderCookies()
  renderSnapshots()
}

export function wirePanel(): void {
  el<HTMLInputElement>('site-url').addEventListener('change', event => {
    siteUrl = (event.target as HTMLInputElement).value
    store = new ChromeCookieStore(siteUrl)
    toggles = new CookieToggles(store)
    void refresh()
  })
  el('take-snapshot').addEventListener('click', async () => {
    const label = el<HTMLInputElement>('label').value || `snapshot-${entries.length}`
    entries.push(await takeSnapshot(store, label, siteUrl))
    await refresh()
  })
  el('show-diff').addEventListener('click', () => {
    renderDiff(
      Number(el<HTMLInputElement>('diff-before').value),
      Number(el<HTMLInputElement>('diff-after').value),
    )
  })
  el('clear-all').addEventListener('click', async () => {
    if (!window.confirm('Clear cookies and site data for this scope?')) return
    await clearAll(store, { domain: new URL(siteUrl).hostname })
    el('status').textContent = 'browsing state cleared; capture log preserved'
    await refresh()
  })
  el('export-capture').addEventListener('click', async () => {
    const stored = await chrome.storage.local.get('captureLog')
    const records = (stored.captureLog as unknown[]) ?? []
    download('capture.jsonl', records.map(record => JSON.stringify(record)).join('\n') + '\n')
  })
  void refresh()
}

if (typeof document !== 'undefined' && document.getElementById('take-snapshot') !== null) {
  wirePanel()
}
