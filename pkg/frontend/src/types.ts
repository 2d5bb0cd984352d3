// Payload shapes of the session API. The UI is a pure view of these
// responses; the only math re-implemented client-side is polygon
// rasterization from the provided axis values.

export interface ScreenPoint {
  x: number;
  y: number;
}

export interface AxisValue {
  feature: string;
  value: number;
  missing: boolean;
}

export interface GlyphView {
  product_id: string;
  provenance: "BothSources" | "MarkerOnly" | "ObjectOnly";
  visible: boolean;
  scale_factor: number;
  anchor_quad: { x: number; y: number; z: number }[];
  screen_quad: ScreenPoint[];
  screen_rect: { min_x: number; min_y: number; max_x: number; max_y: number };
  axis_values: AxisValue[];
}

export interface SpecValue {
  value: number;
  unit: string;
  direction: string;
}

export interface ProductRecord {
  product_id: string;
  name: string;
  brand: string;
  product_type: string;
  price: number;
  rating: number;
  review_count: number;
  specs: Record<string, SpecValue>;
}

export interface FeatureScale {
  product_type: string;
  feature: string;
  min_value: number;
  max_value: number;
  direction: string;
}

export interface OverlayResult {
  frame_id: string | null;
  image_ref: string;
  features: string[];
  glyphs: GlyphView[];
  products: ProductRecord[];
  filtered_out: ProductRecord[];
  scales: FeatureScale[];
  missing_ids: string[];
}

export interface ComparisonEntry {
  product_id: string;
  name: string;
  brand: string;
  product_type: string;
  values: AxisValue[];
  raw: Record<string, number | null>;
}

export interface ComparisonView {
  features: string[];
  entries: ComparisonEntry[];
  scales: FeatureScale[];
}

export interface Coupon {
  coupon_id: string;
  product_id: string;
  description: string;
  discount: number;
  valid_from: string;
  valid_until: string;
}

export interface CouponEvent {
  seq: number;
  frame_id: string;
  coupon: Coupon;
}

export interface SessionInfo {
  session_id: string;
  features: string[];
  glyphs_enabled: boolean;
  favorites: string[];
}

export interface RangeBound {
  min?: number;
  max?: number;
}

export type FilterRanges = Record<string, RangeBound>;
