// Application bootstrap: one session against the engine, fixture frames
// standing in for the camera feed.

import "./styles.css";

import { ApiClient, streamCoupons } from "./api";
import { renderOverlay } from "./overlay";
import {
  renderComparisonModal,
  renderFeatureSelector,
  renderFilterPanel,
  renderProductList,
  showCouponToast,
} from "./panels";
import type { FilterRanges, OverlayResult } from "./types";

const IMAGE_SIZE = { width: 1920, height: 1080 };
const ALL_FEATURES = [
  "price",
  "rating",
  "review_count",
  "protein_g",
  "calories",
  "fat_g",
  "calcium_mg",
  "sugar_g",
  "fiber_g",
  "size_ml",
  "weight_g",
  "whole_grain_pct",
];

interface AppState {
  sessionId: string;
  overlay: OverlayResult | null;
  favorites: string[];
  glyphsEnabled: boolean;
  features: string[];
  frames: string[];
  nextFrame: number;
}

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function boot() {
  const api = new ApiClient("");
  const session = await api.createSession();
  const state: AppState = {
    sessionId: session.session_id,
    overlay: null,
    favorites: [],
    glyphsEnabled: session.glyphs_enabled,
    features: session.features,
    frames: [],
    nextFrame: 0,
  };

  try {
    state.frames = (await api.listFixtureFrames()).frames;
  } catch {
    state.frames = []; // served without --fixtures; scanning disabled
  }

  const sceneRoot = el("scene");
  const productsRoot = el("products");
  const filterRoot = el("filter");
  const featuresRoot = el("features");
  const modalRoot = el("comparison-modal");
  const toastRoot = el("toasts");
  const drawerRoot = el("coupon-drawer");
  const statusRoot = el("status");

  const favorite = async (productId: string) => {
    const result = await api.toggleFavorite(state.sessionId, productId);
    state.favorites = result.favorites;
    render();
  };

  const render = () => {
    if (state.overlay) {
      renderOverlay(sceneRoot, state.overlay, {
        fixturesBase: "/fixtures",
        imageSize: IMAGE_SIZE,
        onGlyphClick: favorite,
      });
      renderProductList(productsRoot, state.overlay, state.favorites, favorite);
    }
    renderFilterPanel(filterRoot, state.features, applyFilter);
    renderFeatureSelector(featuresRoot, ALL_FEATURES, state.features, applyFeatures);
    (el("glyph-toggle") as HTMLButtonElement).textContent = state.glyphsEnabled
      ? "Hide glyphs"
      : "Show glyphs";
    statusRoot.textContent = state.overlay
      ? `frame ${state.overlay.frame_id ?? "—"} · ${state.favorites.length} favorite(s)`
      : "Scan the shelf to begin";
  };

  const applyFilter = async (ranges: FilterRanges) => {
    state.overlay = await api.setFilter(state.sessionId, ranges);
    render();
  };

  const applyFeatures = async (features: string[]) => {
    state.overlay = await api.selectFeatures(state.sessionId, features);
    state.features = features;
    render();
  };

  el("scan").addEventListener("click", async () => {
    if (!state.frames.length) {
      statusRoot.textContent = "No fixture frames served (start with --fixtures)";
      return;
    }
    const name = state.frames[state.nextFrame % state.frames.length];
    state.nextFrame += 1;
    const frame = await (await fetch(`/fixtures/${name}`)).json();
    try {
      state.overlay = await api.submitFrame(state.sessionId, frame);
    } catch (error) {
      statusRoot.textContent = String(error);
      return;
    }
    render();
  });

  el("glyph-toggle").addEventListener("click", async () => {
    state.glyphsEnabled = !state.glyphsEnabled;
    state.overlay = await api.toggleGlyphs(state.sessionId, state.glyphsEnabled);
    render();
  });

  el("compare").addEventListener("click", async () => {
    try {
      const view = await api.getComparison(state.sessionId);
      renderComparisonModal(modalRoot, view, () => {
        modalRoot.classList.remove("open");
        modalRoot.textContent = "";
      });
    } catch (error) {
      statusRoot.textContent = String(error);
    }
  });

  streamCoupons("", state.sessionId, {
    onEvent: (event) => showCouponToast(toastRoot, drawerRoot, event),
  });

  render();
}

boot().catch((error) => {
  const status = document.getElementById("status");
  if (status) status.textContent = `failed to start: ${error}`;
});
