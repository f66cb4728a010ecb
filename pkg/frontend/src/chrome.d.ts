// Minimal ambient declarations for the WebExtension APIs this extension
// touches; kept local so the build has no dependency on full typings.

declare namespace chrome {
  namespace cookies {
    interface Cookie {
      name: string
      value: string
      domain: string
      path: string
      secure: boolean
      httpOnly: boolean
      sameSite?: string
      session: boolean
      expirationDate?: number
    }
    interface GetAllDetails {
      url?: string
      domain?: string
    }
    interface SetDetails {
      url: string
      name: string
      value: string
      domain?: string
      path?: string
      secure?: boolean
      httpOnly?: boolean
      sameSite?: string
      expirationDate?: number
    }
    function getAll(details: GetAllDetails): Promise<Cookie[]>
    function set(details: SetDetails): Promise<Cookie | null>
    function remove(details: { url: string; name: string }): Promise<unknown>
  }

  namespace browsingData {
    function remove(
      options: { origins?: string[] },
      dataToRemove: Record<string, boolean>,
    ): Promise<void>
  }

  namespace storage {
    interface StorageArea {
      get(keys?: string | string[] | null): Promise<Record<string, unknown>>
      set(items: Record<string, unknown>): Promise<void>
    }
    const local: StorageArea
  }

  namespace webRequest {
    interface HttpHeader {
      name: string
      value?: string
    }
    interface HeaderDetails {
      url: string
      requestHeaders?: HttpHeader[]
      responseHeaders?: HttpHeader[]
    }
    interface WebRequestEvent<T> {
      addListener(
        callback: (details: T) => void,
        filter: { urls: string[] },
        extraInfoSpec?: string[],
      ): void
    }
    const onBeforeSendHeaders: WebRequestEvent<HeaderDetails>
    const onHeadersReceived: WebRequestEvent<HeaderDetails>
  }

  namespace devtools {
    namespace panels {
      function create(
        title: string,
        iconPath: string,
        pagePath: string,
        callback?: (panel: unknown) => void,
      ): void
    }
  }

  namespace runtime {
    function getManifest(): { name: string; version: string }
  }
}
