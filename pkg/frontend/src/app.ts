/** Review console controller.
 *
 * No optimistic updates: every mutation re-fetches session state, so the
 * queue always reflects a fresh GET /residuals.  Connection failures show a
 * non-blocking banner with a retry control; server-side errors (induction
 * conflicts, target parse errors, stale previews) are rendered verbatim.
 */

import { ApiError, SessionApi } from "./api.js";
import type { PreviewDoc, ResidualGroup } from "./api.js";
import {
  clearBanner,
  renderBanner,
  renderDetail,
  renderPreview,
  renderQueue,
  renderSubmitError,
} from "./views.js";

export class ReviewConsole {
  private groups: ResidualGroup[] = [];
  private selectedCode: string | null = null;
  private preview: PreviewDoc | null = null;

  readonly queuePane: HTMLElement;
  readonly detailPane: HTMLElement;
  readonly previewPane: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: SessionApi,
  ) {
    this.queuePane = document.createElement("div");
    this.queuePane.className = "queue-pane";
    this.detailPane = document.createElement("div");
    this.detailPane.className = "detail-pane";
    this.previewPane = document.createElement("div");
    this.previewPane.className = "preview-pane";
    root.replaceChildren(this.queuePane, this.detailPane, this.previewPane);
  }

  async refresh(): Promise<void> {
    try {
      this.groups = await this.api.residuals();
      clearBanner(this.root);
    } catch (failure) {
      renderBanner(this.root, this.describe(failure), () => void this.refresh());
      return;
    }
    renderQueue(this.queuePane, this.groups, (code) => void this.select(code));
    if (this.selectedCode && this.groups.some((group) => group.code === this.selectedCode)) {
      await this.select(this.selectedCode);
    } else {
      this.selectedCode = null;
      this.detailPane.replaceChildren();
      this.previewPane.replaceChildren();
    }
  }

  async select(code: string): Promise<void> {
    this.selectedCode = code;
    const group = this.groups.find((candidate) => candidate.code === code);
    if (!group) return;
    renderDetail(this.detailPane, group, {
      onSubmit: (targetText) => void this.submit(code, targetText),
    });
  }

  async submit(code: string, targetText: string): Promise<void> {
    try {
      this.preview = await this.api.submitDemonstration(code, targetText.replace(/\n+$/, ""));
    } catch (failure) {
      if (failure instanceof ApiError) {
        renderSubmitError(this.detailPane, failure.kind, failure.message);
        return;
      }
      renderBanner(this.root, this.describe(failure), () => void this.refresh());
      return;
    }
    renderPreview(this.previewPane, this.preview, {
      onAccept: (previewId) => void this.accept(previewId),
      onReject: (previewId) => void this.reject(previewId),
    });
  }

  async accept(previewId: string): Promise<void> {
    try {
      await this.api.acceptRule(previewId);
    } catch (failure) {
      if (failure instanceof ApiError) {
        renderBanner(this.root, `${failure.kind}: ${failure.message}`, () => void this.refresh());
      }
    }
    this.preview = null;
    this.previewPane.replaceChildren();
    await this.refresh();
  }

  async reject(previewId: string): Promise<void> {
    try {
      await this.api.rejectRule(previewId);
    } catch (failure) {
      if (failure instanceof ApiError) {
        renderBanner(this.root, `${failure.kind}: ${failure.message}`, () => void this.refresh());
      }
    }
    this.preview = null;
    this.previewPane.replaceChildren();
    await this.refresh();
  }

  private describe(failure: unknown): string {
    if (failure instanceof ApiError) return `${failure.kind}: ${failure.message}`;
    if (failure instanceof Error) return `Connection failed: ${failure.message}`;
    return "Connection failed";
  }
}
