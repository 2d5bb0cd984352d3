// Scene rendering: backdrop image plus one positioned glyph node per
// visible product. Canvas drawing is skipped gracefully where 2D contexts
// are unavailable (jsdom); the DOM structure is built either way.

import { colorFor, drawGlyphInQuad } from "./draw";
import type { GlyphView, OverlayResult } from "./types";

export interface RenderOptions {
  fixturesBase: string;
  imageSize: { width: number; height: number };
  onGlyphClick?: (productId: string) => void;
}

function glyphTooltip(glyph: GlyphView): string {
  const axes = glyph.axis_values
    .map((a) => `${a.feature}: ${a.missing ? "n/a" : (a.value * 100).toFixed(0) + "%"}`)
    .join("\n");
  return `${glyph.product_id} (${glyph.provenance})\n${axes}`;
}

/** Render one overlay into `root`; returns the number of glyphs drawn. */
export function renderOverlay(
  root: HTMLElement,
  overlay: OverlayResult,
  options: RenderOptions
): number {
  root.textContent = "";
  root.classList.add("scene");
  const { width, height } = options.imageSize;

  if (overlay.image_ref) {
    const img = document.createElement("img");
    img.className = "backdrop";
    img.src = `${options.fixturesBase}/${overlay.image_ref}`;
    img.alt = "shelf backdrop";
    img.onerror = () => root.classList.add("no-backdrop");
    root.appendChild(img);
  } else {
    root.classList.add("no-backdrop");
  }

  const canvas = document.createElement("canvas");
  canvas.className = "glyph-layer";
  canvas.width = width;
  canvas.height = height;
  root.appendChild(canvas);
  const ctx = canvas.getContext("2d");

  const visible = overlay.glyphs.filter((g) => g.visible);
  visible.forEach((glyph, index) => {
    const color = colorFor(index);
    if (ctx) drawGlyphInQuad(ctx, glyph.screen_quad, glyph.axis_values, color);

    const hit = document.createElement("div");
    hit.className = "glyph";
    hit.dataset.productId = glyph.product_id;
    hit.dataset.provenance = glyph.provenance;
    hit.title = glyphTooltip(glyph);
    const r = glyph.screen_rect;
    hit.style.left = `${(r.min_x / width) * 100}%`;
    hit.style.top = `${(r.min_y / height) * 100}%`;
    hit.style.width = `${((r.max_x - r.min_x) / width) * 100}%`;
    hit.style.height = `${((r.max_y - r.min_y) / height) * 100}%`;
    hit.style.borderColor = color;
    if (options.onGlyphClick) {
      hit.addEventListener("click", () => options.onGlyphClick?.(glyph.product_id));
    }
    root.appendChild(hit);
  });

  if (visible.length === 0) {
    const empty = document.createElement("div");
    empty.className = "empty-overlay";
    empty.textContent = overlay.products.length
      ? "Glyphs hidden"
      : "No products match the current filter";
    root.appendChild(empty);
  }
  return visible.length;
}
