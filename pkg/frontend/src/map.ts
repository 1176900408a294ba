import type { AtlasUse, RiskTier } from "./types";
import { RISK_TIERS } from "./types";
import {
  dimmedIds,
  groupLabel,
  groupedPositions,
  riskGroupCenters,
  semanticPosition,
  tierCounts,
  type Point,
} from "./state";

const SVG_NS = "http://www.w3.org/2000/svg";

export const MAP_WIDTH = 1000;
export const MAP_HEIGHT = 640;
const MARGIN = 60;
const DOT_RADIUS = 12; // 24px hit target

export interface DotMapEvents {
  onSelect?: (useId: string) => void;
  onHoverChange?: (useId: string | null) => void;
}

/**
 * The dot map: one SVG circle per use. Position and fill are driven by
 * whichever story section is active; dimming and highlighting sit on top
 * as CSS classes so the two never fight over the same attribute.
 */
export class DotMap {
  private svg: SVGSVGElement;
  private palette: Record<RiskTier, string>;
  private uses: AtlasUse[] = [];
  private dots = new Map<string, SVGCircleElement>();
  private groupLabels: SVGGElement;
  private emptyState: HTMLElement | null;
  private events: DotMapEvents;

  constructor(
    svg: SVGSVGElement,
    palette: Record<RiskTier, string>,
    events: DotMapEvents = {},
    emptyState: HTMLElement | null = null,
  ) {
    this.svg = svg;
    this.palette = palette;
    this.events = events;
    this.emptyState = emptyState;
    this.svg.setAttribute("viewBox", `0 0 ${MAP_WIDTH} ${MAP_HEIGHT}`);
    this.groupLabels = document.createElementNS(SVG_NS, "g");
    this.groupLabels.setAttribute("class", "group-labels");
    this.groupLabels.setAttribute("hidden", "");
  }

  setUses(uses: AtlasUse[]): void {
    this.uses = uses;
    this.dots.clear();
    this.svg.textContent = "";
    this.svg.appendChild(this.groupLabels);

    if (this.emptyState) this.emptyState.hidden = uses.length > 0;

    for (const use of uses) {
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("class", `dot risk-${use.risk}`);
      dot.setAttribute("r", String(DOT_RADIUS));
      dot.setAttribute("data-use-id", use.use_id);
      dot.setAttribute("tabindex", "0");
      dot.setAttribute("role", "button");
      // color is never the only risk encoding: the label says the tier
      dot.setAttribute("aria-label", `${use.purpose} (${use.risk} risk)`);
      dot.addEventListener("click", () => this.events.onSelect?.(use.use_id));
      dot.addEventListener("keydown", (event) => {
        if (event.key === "Enter" || event.key === " ") {
          event.preventDefault();
          this.events.onSelect?.(use.use_id);
        }
      });
      dot.addEventListener("mouseenter", () => this.events.onHoverChange?.(use.use_id));
      dot.addEventListener("mouseleave", () => this.events.onHoverChange?.(null));
      this.dots.set(use.use_id, dot);
      this.svg.appendChild(dot);
    }
    this.semanticLayout();
    this.neutralFill();
  }

  dotCount(): number {
    return this.dots.size;
  }

  dotFor(useId: string): SVGCircleElement | undefined {
    return this.dots.get(useId);
  }

  semanticLayout(): void {
    for (const use of this.uses) {
      this.place(use.use_id, semanticPosition(use, MAP_WIDTH, MAP_HEIGHT, MARGIN));
    }
    this.groupLabels.setAttribute("hidden", "");
  }

  /** Regroup the dots into three labeled tier clusters, counts included. */
  riskGroupLayout(): void {
    const centers = riskGroupCenters(MAP_WIDTH, MAP_HEIGHT);
    const positions = groupedPositions(this.uses, centers);
    for (const [useId, point] of positions) this.place(useId, point);

    const counts = tierCounts(this.uses);
    this.groupLabels.textContent = "";
    for (const tier of RISK_TIERS) {
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("class", `group-label group-label-${tier}`);
      label.setAttribute("x", String(centers[tier].x));
      label.setAttribute("y", String(MAP_HEIGHT * 0.16));
      label.setAttribute("text-anchor", "middle");
      label.textContent = groupLabel(tier, counts);
      this.groupLabels.appendChild(label);
    }
    this.groupLabels.removeAttribute("hidden");
  }

  /** Section 1 shows the shape of the map before risk enters the story. */
  neutralFill(): void {
    for (const dot of this.dots.values()) dot.style.fill = "";
  }

  riskFill(): void {
    for (const use of this.uses) {
      const dot = this.dots.get(use.use_id);
      if (dot) dot.style.fill = this.palette[use.risk];
    }
  }

  /** Dim everything outside `visibleIds`; null clears all dimming. */
  dim(visibleIds: string[] | null): void {
    const dimmed = dimmedIds([...this.dots.keys()], visibleIds);
    for (const [useId, dot] of this.dots) {
      dot.classList.toggle("dimmed", dimmed.has(useId));
    }
  }

  highlight(ids: string[]): void {
    const hits = new Set(ids);
    for (const [useId, dot] of this.dots) {
      dot.classList.toggle("hit", hits.has(useId));
    }
  }

  visibleDotIds(): string[] {
    return [...this.dots.entries()]
      .filter(([, dot]) => !dot.classList.contains("dimmed"))
      .map(([useId]) => useId);
  }

  private place(useId: string, point: Point): void {
    const dot = this.dots.get(useId);
    if (!dot) return;
    // transform instead of cx/cy so CSS can animate section transitions;
    // a reversed scroll simply transitions toward the new target
    dot.style.transform = `translate(${point.x}px, ${point.y}px)`;
  }
}
