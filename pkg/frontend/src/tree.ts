/** Inline-SVG helpers. The server renders the diagram; the UI only
 *  overlays current values and highlights, it never lays anything out. */

const SVG_NS = "http://www.w3.org/2000/svg";

export interface TreeNode {
  group: SVGGElement;
  rect: SVGRectElement;
}

export type TreeIndex = Map<string, TreeNode>;

/** Mount server SVG into the host and index indicator groups by id. */
export function mountSvg(host: HTMLElement, svgText: string): TreeIndex {
  host.innerHTML = svgText;
  const index: TreeIndex = new Map();
  for (const group of host.querySelectorAll<SVGGElement>(
    'g[class~="indicator"]',
  )) {
    const id = group.getAttribute("id");
    const rect = group.querySelector<SVGRectElement>("rect");
    if (id && rect) index.set(id, { group, rect });
  }
  if (index.size === 0) throw new Error("no indicator nodes in diagram");
  return index;
}

/** Write one value line per node, owned by the UI (class ui-value). */
export function overlayValues(
  index: TreeIndex,
  texts: Map<string, string>,
): void {
  for (const [id, node] of index) {
    let label = node.group.querySelector<SVGTextElement>("text.ui-value");
    const text = texts.get(id) ?? "";
    if (!label) {
      label = node.group.ownerDocument.createElementNS(
        SVG_NS,
        "text",
      ) as SVGTextElement;
      label.setAttribute("class", "ui-value");
      const x = Number(node.rect.getAttribute("x") ?? 0);
      const y = Number(node.rect.getAttribute("y") ?? 0);
      const w = Number(node.rect.getAttribute("width") ?? 0);
      const h = Number(node.rect.getAttribute("height") ?? 0);
      label.setAttribute("x", String(x + w / 2));
      label.setAttribute("y", String(y + h - 4));
      label.setAttribute("text-anchor", "middle");
      label.setAttribute("font-size", "11");
      const fill = node.rect.getAttribute("fill");
      label.setAttribute("fill", fill === "#000000" ? "#ffffff" : "#c02020");
      node.group.appendChild(label);
    }
    label.textContent = text;
  }
}

/** Outline the branch a gateway chose; returns the highlighted ids. */
export function highlightChoice(
  index: TreeIndex,
  gateway: string | null,
  chosen: string | undefined,
): string[] {
  const marked: string[] = [];
  for (const [id, node] of index) {
    const rect = node.rect;
    const active = gateway !== null && (id === gateway || id === chosen);
    if (active) {
      if (!rect.hasAttribute("data-highlight")) {
        rect.setAttribute(
          "data-orig-stroke-width",
          rect.getAttribute("stroke-width") ?? "",
        );
      }
      rect.setAttribute("data-highlight", id === chosen ? "chosen" : "gateway");
      rect.setAttribute("stroke-width", "3");
      marked.push(id);
    } else if (rect.hasAttribute("data-highlight")) {
      rect.removeAttribute("data-highlight");
      const orig = rect.getAttribute("data-orig-stroke-width") ?? "";
      rect.removeAttribute("data-orig-stroke-width");
      if (orig) rect.setAttribute("stroke-width", orig);
      else rect.removeAttribute("stroke-width");
    }
  }
  return marked;
}

/** Indicator id for a click anywhere inside a node group. */
export function indicatorAt(target: EventTarget | null): string | null {
  let el = target as Element | null;
  while (el) {
    if (
      el instanceof Element &&
      el.tagName.toLowerCase() === "g" &&
      (el.getAttribute("class") ?? "").split(/\s+/).includes("indicator")
    ) {
      return el.getAttribute("id");
    }
    el = el.parentElement;
  }
  return null;
}
