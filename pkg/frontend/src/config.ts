/** The workbench's only configuration: where the annotation service lives. */

export const DEFAULT_SERVICE_URL = "http://127.0.0.1:8100";

declare global {
  interface Window {
    RELANN_SERVICE_URL?: string;
  }
}

/**
 * Resolve the service base URL: an explicit `window.RELANN_SERVICE_URL`
 * wins, then a `?service=` query parameter, then the default local address.
 */
export function serviceBaseUrl(win: Pick<Window, "RELANN_SERVICE_URL" | "location"> = window): string {
  const explicit = win.RELANN_SERVICE_URL;
  if (explicit) return stripSlash(explicit);
  const fromQuery = new URLSearchParams(win.location.search).get("service");
  if (fromQuery) return stripSlash(fromQuery);
  return DEFAULT_SERVICE_URL;
}

function stripSlash(url: string): string {
  return url.endsWith("/") ? url.slice(0, -1) : url;
}
