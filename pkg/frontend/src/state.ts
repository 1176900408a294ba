import type { AtlasUse, RiskTier } from "./types";
import { RISK_TIERS } from "./types";

export type SectionNumber = 1 | 2 | 3 | 4;

export interface ViewState {
  activeSection: SectionNumber;
  hoveredUse: string | null;
  selectedUse: string | null;
  filterSelections: Record<string, string[]>;
  searchQuery: string;
  highlightedIds: Set<string>;
}

export function initialState(): ViewState {
  return {
    activeSection: 1,
    hoveredUse: null,
    selectedUse: null,
    filterSelections: {},
    searchQuery: "",
    highlightedIds: new Set(),
  };
}

/**
 * Active section as a pure function of scroll position: the last section
 * whose top sits above an anchor line 40% down the viewport. Same offset
 * in, same section out, no hysteresis.
 */
export function sectionFromScroll(
  scrollTop: number,
  viewportHeight: number,
  sectionTops: number[],
): SectionNumber {
  const anchor = scrollTop + viewportHeight * 0.4;
  let active = 1;
  sectionTops.forEach((top, index) => {
    if (top <= anchor) active = index + 1;
  });
  return Math.min(active, 4) as SectionNumber;
}

/** Sections 1-3 tell the story; only section 4 hands over the controls. */
export function controlsEnabled(section: SectionNumber): boolean {
  return section === 4;
}

/**
 * Dot ids to dim for a filter result. null means "no filter active", so
 * nothing dims; an empty result dims everything.
 */
export function dimmedIds(allIds: string[], visibleIds: string[] | null): Set<string> {
  if (visibleIds === null) return new Set();
  const visible = new Set(visibleIds);
  return new Set(allIds.filter((id) => !visible.has(id)));
}

export function tierCounts(uses: AtlasUse[]): Record<RiskTier, number> {
  const counts: Record<RiskTier, number> = { unacceptable: 0, high: 0, low: 0 };
  for (const use of uses) counts[use.risk] += 1;
  return counts;
}

export interface Point {
  x: number;
  y: number;
}

/** Map unit-square layout coordinates into the drawing area, y pointing up. */
export function semanticPosition(
  use: AtlasUse,
  width: number,
  height: number,
  margin: number,
): Point {
  return {
    x: margin + use.x * (width - 2 * margin),
    y: margin + (1 - use.y) * (height - 2 * margin),
  };
}

export function riskGroupCenters(width: number, height: number): Record<RiskTier, Point> {
  const y = height * 0.52;
  return {
    unacceptable: { x: width * 0.2, y },
    high: { x: width * 0.5, y },
    low: { x: width * 0.8, y },
  };
}

/**
 * Pack each tier's dots in a sunflower spiral around its group center.
 * Deterministic: input order decides the spiral order.
 */
export function groupedPositions(
  uses: AtlasUse[],
  centers: Record<RiskTier, Point>,
): Map<string, Point> {
  const golden = Math.PI * (3 - Math.sqrt(5));
  const placed: Record<RiskTier, number> = { unacceptable: 0, high: 0, low: 0 };
  const out = new Map<string, Point>();
  for (const use of uses) {
    const i = placed[use.risk]++;
    const radius = 16 * Math.sqrt(i);
    const angle = i * golden;
    out.set(use.use_id, {
      x: centers[use.risk].x + radius * Math.cos(angle),
      y: centers[use.risk].y + radius * Math.sin(angle),
    });
  }
  return out;
}

export function groupLabel(tier: RiskTier, counts: Record<RiskTier, number>): string {
  return `${tier} (${counts[tier]})`;
}

export { RISK_TIERS };
