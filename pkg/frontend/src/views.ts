/** DOM rendering for the review console. No conversion logic lives here:
 * everything shown comes from the session API, including highlight spans. */

import type { PreviewDoc, PreviewSite, ResidualGroup, ResidualSample } from "./api.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderBanner(container: HTMLElement, message: string, onRetry: () => void): void {
  container.querySelector(".banner")?.remove();
  const banner = el("div", "banner");
  banner.append(el("span", "banner-message", message));
  const retry = el("button", "banner-retry", "Retry");
  retry.addEventListener("click", onRetry);
  banner.append(retry);
  container.prepend(banner);
}

export function clearBanner(container: HTMLElement): void {
  container.querySelector(".banner")?.remove();
}

export function renderEmptyState(container: HTMLElement): void {
  container.replaceChildren();
  const empty = el("div", "empty-state");
  empty.append(el("p", undefined, "No residual errors. Every segment converted."));
  const link = el("a", "report-link", "View the migration report");
  link.setAttribute("href", "/report");
  empty.append(link);
  container.append(empty);
}

export function renderQueue(
  container: HTMLElement,
  groups: ResidualGroup[],
  onSelect: (code: string) => void,
): void {
  container.replaceChildren();
  if (groups.length === 0) {
    renderEmptyState(container);
    return;
  }
  const list = el("ul", "error-queue");
  for (const group of groups) {
    const item = el("li", "error-group");
    item.dataset.code = group.code;
    const button = el("button", "error-group-button");
    button.append(el("span", "error-code", group.code));
    button.append(el("span", "error-count", String(group.count)));
    button.append(el("span", "error-message", group.message));
    button.addEventListener("click", () => onSelect(group.code));
    item.append(button);
    list.append(item);
  }
  container.append(list);
}

/** Source text with the server-provided span wrapped in <mark>. */
function highlighted(sample: ResidualSample): HTMLElement {
  const pre = el("pre", "sql-text");
  const { byte_start, byte_end } = sample.span;
  pre.append(document.createTextNode(sample.text.slice(0, byte_start)));
  const mark = el("mark");
  mark.textContent = sample.text.slice(byte_start, byte_end);
  pre.append(mark);
  pre.append(document.createTextNode(sample.text.slice(byte_end)));
  return pre;
}

export interface DetailHandlers {
  onSubmit: (targetText: string) => void;
}

/** Three-pane layout: source with highlight, the conversion error, editable target. */
export function renderDetail(
  container: HTMLElement,
  group: ResidualGroup,
  handlers: DetailHandlers,
): void {
  container.replaceChildren();
  const sample = group.samples[0];
  if (!sample) return;

  const panes = el("div", "detail-panes");

  const sourcePane = el("section", "pane pane-source");
  sourcePane.append(el("h2", undefined, `Source ${sample.segment_id}`));
  sourcePane.append(highlighted(sample));
  panes.append(sourcePane);

  const errorPane = el("section", "pane pane-error");
  errorPane.append(el("h2", undefined, `Error ${group.code}`));
  errorPane.append(el("p", "error-text", sample.message));
  panes.append(errorPane);

  const targetPane = el("section", "pane pane-target");
  targetPane.append(el("h2", undefined, "Expert target"));
  const editor = el("textarea", "target-editor");
  editor.value = sample.text;
  editor.rows = 8;
  targetPane.append(editor);
  const submit = el("button", "submit-demo", "Submit demonstration");
  submit.addEventListener("click", () => {
    if (editor.value.trim()) handlers.onSubmit(editor.value);
  });
  targetPane.append(submit);
  targetPane.append(el("div", "submit-error"));
  panes.append(targetPane);

  container.append(panes);
}

export function renderSubmitError(container: HTMLElement, kind: string, message: string): void {
  const slot = container.querySelector(".submit-error");
  if (slot) slot.textContent = `${kind}: ${message}`;
}

function badge(label: string, ok: boolean): HTMLElement {
  const span = el("span", `badge ${ok ? "badge-ok" : "badge-bad"}`, label);
  span.dataset.ok = String(ok);
  return span;
}

function siteBadges(site: PreviewSite): HTMLElement {
  const wrap = el("div", "badges");
  const verification = site.verification;
  const grammatical = Boolean(verification?.grammatical);
  const equivalent = Boolean(verification?.equivalent_non_null);
  wrap.append(badge("grammatical", grammatical));
  wrap.append(badge("equivalent", equivalent));
  if (verification?.intentional_repair) {
    wrap.append(badge(`intentional repair ${verification.intentional_repair}`, true));
  }
  return wrap;
}

export interface PreviewHandlers {
  onAccept: (previewId: string) => void;
  onReject: (previewId: string) => void;
}

export function renderPreview(
  container: HTMLElement,
  preview: PreviewDoc,
  handlers: PreviewHandlers,
): void {
  container.replaceChildren();
  const panel = el("div", "preview-panel");
  panel.append(
    el(
      "h2",
      undefined,
      `Induced rule for ${preview.error_code}: ${preview.sites.length} site(s)`,
    ),
  );

  for (const site of preview.sites) {
    const card = el("div", "preview-site");
    card.dataset.segmentId = site.segment_id;
    card.append(el("h3", undefined, site.segment_id));
    const diff = el("div", "diff");
    const before = el("pre", "diff-before", site.before);
    const after = el("pre", "diff-after", site.after ?? "(not converted)");
    diff.append(before, after);
    card.append(diff);
    card.append(siteBadges(site));
    panel.append(card);
  }

  const controls = el("div", "preview-controls");
  const accept = el("button", "accept-rule", "Accept rule");
  const everyGrammatical =
    preview.sites.length > 0 &&
    preview.sites.every((site) => Boolean(site.verification?.grammatical));
  accept.disabled = !everyGrammatical;
  accept.addEventListener("click", () => handlers.onAccept(preview.preview_id));
  const reject = el("button", "reject-rule", "Reject");
  reject.addEventListener("click", () => handlers.onReject(preview.preview_id));
  controls.append(accept, reject);
  panel.append(controls);

  container.append(panel);
}
