/** Small DOM builders; every view renders through these, so no markup is
 * ever assembled from strings and user text cannot inject HTML. */

type Handler = (event: Event) => void;
export type Attrs = Record<string, string | number | boolean | Handler>;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: (Node | string | null)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, ""), value);
    } else if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
    } else {
      node.setAttribute(key, String(value));
    }
  }
  for (const child of children) {
    if (child === null) continue;
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function replaceContent(node: HTMLElement, ...children: (Node | string | null)[]): void {
  clear(node);
  for (const child of children) {
    if (child === null) continue;
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
}

export function formatScore(value: number | null): string {
  return value === null ? "-" : value.toFixed(2);
}

export function formatPct(value: number): string {
  return value.toFixed(2);
}
