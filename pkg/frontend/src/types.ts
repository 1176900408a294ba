// Mirrors the atlas document the API serves. Field names match the JSON.

export type RiskTier = "unacceptable" | "high" | "low";

export const RISK_TIERS: RiskTier[] = ["unacceptable", "high", "low"];

export interface SdgImpact {
  sdg_id: number;
  direction: "supports" | "undermines";
  examples: string[];
}

export interface AtlasUse {
  use_id: string;
  domain: string;
  purpose: string;
  capability: string;
  ai_user: string;
  ai_subject: string;
  risk: RiskTier;
  sdg_impacts: SdgImpact[];
  incident_examples: string[];
  benefit_examples: string[];
  incident_ids: number[];
  x: number;
  y: number;
}

export interface NarrativeSection {
  id: string;
  title: string;
  body: string;
  highlighted_use_ids: string[];
}

export interface AtlasDocument {
  version: string;
  generated_at: string;
  uses: AtlasUse[];
  facets: Record<string, Record<string, number>>;
  palette: Record<RiskTier, string>;
  narrative: NarrativeSection[];
}

export interface SearchHit {
  use_id: string;
  score: number;
  matched_terms: string[];
}

export interface SearchResponse {
  hits: SearchHit[];
}

export interface FilterResponse {
  use_ids: string[];
}
