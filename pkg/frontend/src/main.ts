import { ApiError, AtlasClient } from "./api";
import { DetailCard } from "./card";
import { DotMap } from "./map";
import { ScrollSections } from "./sections";
import {
  controlsEnabled,
  initialState,
  type SectionNumber,
  type ViewState,
} from "./state";
import { Tooltip } from "./tooltip";
import type { AtlasDocument, AtlasUse } from "./types";

export interface App {
  state: ViewState;
  atlas: AtlasDocument;
  map: DotMap;
  card: DetailCard;
  sections: ScrollSections;
  applyFilters: () => Promise<void>;
  runSearch: (query: string) => Promise<void>;
}

const FILTER_FACETS = ["risk", "domain", "sdg"] as const;

function required<T extends Element>(root: ParentNode, selector: string): T {
  const el = root.querySelector<T>(selector);
  if (!el) throw new Error(`missing element: ${selector}`);
  return el;
}

function showToast(root: ParentNode, message: string): void {
  const toast = required<HTMLElement>(root, "#toast");
  toast.textContent = message;
  toast.hidden = false;
  setTimeout(() => {
    toast.hidden = true;
  }, 4000);
}

function fillNarrative(root: ParentNode, atlas: AtlasDocument): void {
  atlas.narrative.forEach((section, index) => {
    const el = root.querySelector(`#section-${index + 1}`);
    if (!el) return;
    required<HTMLElement>(el, ".section-title").textContent = section.title;
    required<HTMLElement>(el, ".section-body").textContent = section.body;
  });
}

function buildFilterPanel(
  root: ParentNode,
  atlas: AtlasDocument,
  onChange: () => void,
): void {
  const panel = required<HTMLElement>(root, "#filter-panel");
  panel.textContent = "";
  for (const facet of FILTER_FACETS) {
    const values = Object.keys(atlas.facets[facet] ?? {}).sort();
    if (values.length === 0) continue;
    const group = document.createElement("div");
    group.className = "filter-group";
    const heading = document.createElement("h4");
    heading.textContent = facet === "sdg" ? "SDG" : facet;
    group.appendChild(heading);
    for (const value of values) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.name = facet;
      box.value = value;
      box.addEventListener("change", onChange);
      label.appendChild(box);
      label.appendChild(
        document.createTextNode(` ${value} (${atlas.facets[facet]?.[value] ?? 0})`),
      );
      group.appendChild(label);
    }
    panel.appendChild(group);
  }
}

function readSelections(root: ParentNode): Record<string, string[]> {
  const selections: Record<string, string[]> = {};
  root
    .querySelectorAll<HTMLInputElement>("#filter-panel input:checked")
    .forEach((box) => {
      (selections[box.name] ??= []).push(box.value);
    });
  return selections;
}

export interface BootOptions {
  /** Override section-top measurement (layout engines without real geometry). */
  measureTops?: () => number[];
}

export async function boot(
  root: Document,
  client?: AtlasClient,
  options: BootOptions = {},
): Promise<App> {
  const api = client ?? new AtlasClient();
  const state = initialState();

  let atlas: AtlasDocument;
  try {
    atlas = await api.loadAtlas();
  } catch {
    required<HTMLElement>(root, "#error-panel").hidden = false;
    required<HTMLElement>(root, "#map-panel").hidden = true;
    throw new ApiError("atlas unavailable");
  }

  const usesById = new Map<string, AtlasUse>(atlas.uses.map((use) => [use.use_id, use]));
  const matchedTerms = new Map<string, string[]>();

  fillNarrative(root, atlas);

  const card = new DetailCard(required<HTMLElement>(root, "#detail-card"), () => {
    state.selectedUse = null;
  });
  const tooltip = new Tooltip(required<HTMLElement>(root, "#tooltip"));

  const map = new DotMap(
    required<SVGSVGElement>(root, "#dot-map"),
    atlas.palette,
    {
      onSelect: (useId) => {
        state.selectedUse = useId;
        card.show(usesById.get(useId));
      },
      onHoverChange: (useId) => {
        state.hoveredUse = useId;
        const use = useId === null ? undefined : usesById.get(useId);
        if (use) tooltip.show(use, matchedTerms.get(use.use_id) ?? []);
        else tooltip.hide();
      },
    },
    required<HTMLElement>(root, "#empty-state"),
  );
  map.setUses(atlas.uses);

  const controls = required<HTMLFieldSetElement>(root, "#controls");

  const applyFilters = async () => {
    state.filterSelections = readSelections(root);
    const anySelected = Object.keys(state.filterSelections).length > 0;
    try {
      if (!anySelected) {
        map.dim(null);
        return;
      }
      const result = await api.filter(state.filterSelections);
      if (result === null) return; // superseded by a newer change
      map.dim(result.use_ids);
    } catch {
      showToast(root, "Filtering failed; showing the previous selection.");
    }
  };

  const runSearch = async (query: string) => {
    state.searchQuery = query;
    matchedTerms.clear();
    if (query.trim() === "") {
      state.highlightedIds = new Set();
      map.highlight([]);
      return;
    }
    try {
      const result = await api.search(query);
      if (result === null) return;
      state.highlightedIds = new Set(result.hits.map((hit) => hit.use_id));
      for (const hit of result.hits) matchedTerms.set(hit.use_id, hit.matched_terms);
      map.highlight([...state.highlightedIds]);
    } catch {
      showToast(root, "Search failed; previous highlights kept.");
    }
  };

  const onSectionChange = (section: SectionNumber) => {
    state.activeSection = section;
    controls.disabled = !controlsEnabled(section);
    if (section === 1) {
      map.semanticLayout();
      map.neutralFill();
    } else if (section === 2) {
      map.riskFill();
      map.riskGroupLayout();
    } else {
      map.riskFill();
      map.semanticLayout();
    }
    if (section === 3) {
      const highlighted = atlas.narrative[2]?.highlighted_use_ids ?? [];
      map.highlight(highlighted);
    } else if (section !== 4) {
      map.highlight([]);
    }
  };

  const sectionEls = [1, 2, 3, 4].map((n) =>
    required<HTMLElement>(root, `#section-${n}`),
  );
  const sections = new ScrollSections(sectionEls, onSectionChange, options.measureTops);
  sections.bindSkipLink(required<HTMLElement>(root, "#skip-link"));
  controls.disabled = true;
  sections.start();

  buildFilterPanel(root, atlas, () => void applyFilters());
  const searchInput = required<HTMLInputElement>(root, "#search-input");
  searchInput.addEventListener("input", () => void runSearch(searchInput.value));

  root.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Escape" && card.visible) card.dismiss();
  });

  return { state, atlas, map, card, sections, applyFilters, runSearch };
}

// boot immediately in the browser; tests call boot() themselves
declare const process: { env?: Record<string, string | undefined> } | undefined;
if (typeof process === "undefined" || !process?.env?.VITEST) {
  window.addEventListener("DOMContentLoaded", () => {
    void boot(document).catch((err) => console.error(err));
  });
}
