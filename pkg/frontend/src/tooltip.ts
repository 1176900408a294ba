import type { AtlasUse } from "./types";
import { escapeHtml } from "./card";

/** T1 hover tooltip: one-line summary, risk tag, matched terms marked. */
export class Tooltip {
  private element: HTMLElement;

  constructor(element: HTMLElement) {
    this.element = element;
    this.element.hidden = true;
  }

  show(use: AtlasUse, matchedTerms: string[] = []): void {
    let summary = escapeHtml(use.purpose);
    const unseen: string[] = [];
    for (const term of matchedTerms) {
      // emphasize matched search terms wherever they appear in the summary
      const escaped = term.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
      const pattern = new RegExp(`(${escaped})`, "gi");
      if (pattern.test(summary)) {
        summary = summary.replace(pattern, "<mark>$1</mark>");
      } else {
        // the term matched a field the summary line does not show
        unseen.push(term);
      }
    }
    let html = `${summary} <span class="risk-tag risk-${use.risk}">${use.risk} risk</span>`;
    if (unseen.length > 0) {
      const marks = unseen.map((term) => `<mark>${escapeHtml(term)}</mark>`).join(", ");
      html += `<span class="tooltip-matches">Matches: ${marks}</span>`;
    }
    this.element.innerHTML = html;
    this.element.hidden = false;
  }

  hide(): void {
    this.element.hidden = true;
  }
}
