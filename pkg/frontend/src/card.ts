import type { AtlasUse } from "./types";

function block(title: string, items: string[]): string {
  if (items.length === 0) return "";
  const lines = items.map((item) => `<li>${escapeHtml(item)}</li>`).join("");
  return `<h4>${title}</h4><ul>${lines}</ul>`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * The T2 detail card: all five components, the risk tier, SDG impacts
 * with their direction, and the documented incidents next to the
 * potential benefits.
 */
export class DetailCard {
  private container: HTMLElement;
  private onDismiss: (() => void) | null;

  constructor(container: HTMLElement, onDismiss: (() => void) | null = null) {
    this.container = container;
    this.onDismiss = onDismiss;
    this.container.hidden = true;
  }

  show(use: AtlasUse | undefined): void {
    if (!use) {
      this.container.innerHTML = `<p class="card-error" role="alert">This use could not be loaded.</p>`;
      this.container.hidden = false;
      return;
    }
    const sdgs = use.sdg_impacts
      .map((impact) => {
        const arrow = impact.direction === "supports" ? "↑ supports" : "↓ undermines";
        const examples = impact.examples.map((e) => `<li>${escapeHtml(e)}</li>`).join("");
        return `<li>SDG ${impact.sdg_id} <span class="direction-${impact.direction}">${arrow}</span><ul>${examples}</ul></li>`;
      })
      .join("");

    this.container.innerHTML = `
      <button class="card-close" aria-label="Close details">×</button>
      <h3>${escapeHtml(use.purpose)}</h3>
      <p class="risk-tag risk-${use.risk}">${use.risk} risk</p>
      <dl class="components">
        <dt>Domain</dt><dd>${escapeHtml(use.domain)}</dd>
        <dt>Purpose</dt><dd>${escapeHtml(use.purpose)}</dd>
        <dt>Capability</dt><dd>${escapeHtml(use.capability)}</dd>
        <dt>AI user</dt><dd>${escapeHtml(use.ai_user)}</dd>
        <dt>AI subject</dt><dd>${escapeHtml(use.ai_subject)}</dd>
      </dl>
      ${sdgs ? `<h4>SDG impacts</h4><ul class="sdg-impacts">${sdgs}</ul>` : ""}
      ${block("Real-world incidents", use.incident_examples)}
      ${block("Potential benefits", use.benefit_examples)}
    `;
    this.container.hidden = false;
    this.container
      .querySelector(".card-close")
      ?.addEventListener("click", () => this.dismiss());
  }

  dismiss(): void {
    this.container.hidden = true;
    this.container.innerHTML = "";
    this.onDismiss?.();
  }

  get visible(): boolean {
    return !this.container.hidden;
  }
}
