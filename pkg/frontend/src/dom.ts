/** Tiny DOM construction helpers; no framework, no templating. */

type Attrs = Record<string, string | number | boolean | EventListener | null | undefined>;
type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: (Child | Child[])[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (value === null || value === undefined || value === false) continue;
    if (key.startsWith("on") && typeof value === "function") {
      node.addEventListener(key.slice(2), value as EventListener);
    } else if (value === true) {
      node.setAttribute(key, "");
    } else {
      node.setAttribute(key, String(value));
    }
  }
  for (const child of children.flat()) {
    if (child === null || child === undefined) continue;
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

export function text(value: string): Text {
  return document.createTextNode(value);
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Horizontal bar chart. Every bar carries its exact count as a text label
 * and a data-count attribute; widths are proportional to the largest count. */
export function barChart(groups: { label: string; count: number }[]): HTMLElement {
  const max = groups.reduce((m, g) => Math.max(m, g.count), 0);
  const chart = el("div", { class: "bar-chart" });
  for (const group of groups) {
    const width = max > 0 ? (100 * group.count) / max : 0;
    chart.append(
      el(
        "div",
        { class: "bar-row" },
        el("span", { class: "bar-label", title: group.label }, group.label),
        el(
          "div",
          { class: "bar-track" },
          el("div", {
            class: "bar-fill",
            style: `width: ${width}%`,
            "data-count": group.count,
          }),
        ),
        el("span", { class: "bar-count" }, String(group.count)),
      ),
    );
  }
  return chart;
}

export function pager(
  page: number,
  pageCount: number,
  onPage: (page: number) => void,
): HTMLElement {
  return el(
    "div",
    { class: "pager" },
    el(
      "button",
      { class: "pager-prev", disabled: page <= 0, onclick: () => onPage(page - 1) },
      "Prev",
    ),
    el("span", { class: "pager-info" }, `page ${pageCount === 0 ? 0 : page + 1} of ${pageCount}`),
    el(
      "button",
      { class: "pager-next", disabled: page >= pageCount - 1, onclick: () => onPage(page + 1) },
      "Next",
    ),
  );
}
