// Service worker: observe Cookie / Set-Cookie headers on all traffic and
// append them to the capture log in extension storage. Only those two
// headers are retained; everything else is dropped at the listener.

import { CaptureLog } from './capture'

const log = new CaptureLog()

async function persist(): Promise<void> {
  await chrome.storage.local.set({ captureLog: log.records() })
}

chrome.webRequest.onBeforeSendHeaders.addListener(
  details => {
    for (const header of details.requestHeaders ?? []) {
      if (log.add('request', details.url, header.name, header.value ?? '')) void persist()
    }
  },
  { urls: ['<all_urls>'] },
  ['requestHeaders', 'extraHeaders'],
)

chrome.webRequest.onHeadersReceived.addListener(
  details => {
    for (const header of details.responseHeaders ?? []) {
      if (log.add('response', details.url, header.name, header.value ?? '')) void persist()
    }
  },
  { urls: ['<all_urls>'] },
  ['responseHeaders', 'extraHeaders'],
)

export {}
