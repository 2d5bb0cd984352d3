// Side panels and widgets: product list with favorite stars, filter panel,
// feature dropdown, comparison modal, coupon toasts.

import { colorFor, drawComparison } from "./draw";
import type {
  ComparisonView,
  CouponEvent,
  FilterRanges,
  OverlayResult,
  ProductRecord,
} from "./types";

function productRow(
  record: ProductRecord,
  favorites: string[],
  grayed: boolean,
  onFavorite: (productId: string) => void
): HTMLElement {
  const row = document.createElement("li");
  row.className = grayed ? "product filtered-out" : "product";
  row.dataset.productId = record.product_id;

  const star = document.createElement("button");
  star.className = "favorite";
  star.dataset.active = String(favorites.includes(record.product_id));
  star.textContent = favorites.includes(record.product_id) ? "★" : "☆";
  star.title = "Add to favorites for comparison";
  star.addEventListener("click", () => onFavorite(record.product_id));
  row.appendChild(star);

  const label = document.createElement("span");
  label.textContent = `${record.name} — $${record.price.toFixed(2)} · ${record.rating.toFixed(1)}☆`;
  row.appendChild(label);
  return row;
}

export function renderProductList(
  root: HTMLElement,
  overlay: OverlayResult,
  favorites: string[],
  onFavorite: (productId: string) => void
): void {
  root.textContent = "";
  const list = document.createElement("ul");
  list.className = "product-list";
  for (const record of overlay.products) {
    list.appendChild(productRow(record, favorites, false, onFavorite));
  }
  for (const record of overlay.filtered_out) {
    list.appendChild(productRow(record, favorites, true, onFavorite));
  }
  root.appendChild(list);
}

export function renderFilterPanel(
  root: HTMLElement,
  features: string[],
  onApply: (ranges: FilterRanges) => void
): void {
  root.textContent = "";
  const form = document.createElement("form");
  form.className = "filter-panel";
  const fields = ["price", ...features.filter((f) => f !== "price")];
  for (const feature of fields) {
    const row = document.createElement("label");
    row.className = "filter-row";
    row.textContent = feature;
    for (const bound of ["min", "max"] as const) {
      const input = document.createElement("input");
      input.type = "number";
      input.step = "any";
      input.name = `${feature}:${bound}`;
      input.placeholder = bound;
      row.appendChild(input);
    }
    form.appendChild(row);
  }
  const apply = document.createElement("button");
  apply.type = "submit";
  apply.textContent = "Apply filter";
  form.appendChild(apply);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const ranges: FilterRanges = {};
    for (const input of Array.from(form.querySelectorAll("input"))) {
      if (input.value === "") continue;
      const [feature, bound] = input.name.split(":");
      ranges[feature] = { ...ranges[feature], [bound]: Number(input.value) };
    }
    onApply(ranges);
  });
  root.appendChild(form);
}

export function renderFeatureSelector(
  root: HTMLElement,
  allFeatures: string[],
  selected: string[],
  onChange: (features: string[]) => void
): void {
  root.textContent = "";
  const details = document.createElement("details");
  details.className = "feature-selector";
  const summary = document.createElement("summary");
  summary.textContent = `Axes (${selected.length})`;
  details.appendChild(summary);

  const note = document.createElement("p");
  note.className = "hint";
  note.textContent = "Pick at least 3 features";
  details.appendChild(note);

  for (const feature of allFeatures) {
    const row = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.value = feature;
    box.checked = selected.includes(feature);
    box.addEventListener("change", () => {
      const picked = Array.from(
        details.querySelectorAll<HTMLInputElement>("input:checked")
      ).map((i) => i.value);
      if (picked.length >= 3) onChange(picked);
    });
    row.appendChild(box);
    row.append(` ${feature}`);
    details.appendChild(row);
  }
  root.appendChild(details);
}

export function renderComparisonModal(
  root: HTMLElement,
  view: ComparisonView,
  onClose: () => void
): void {
  root.textContent = "";
  root.classList.add("open");

  const dialog = document.createElement("div");
  dialog.className = "comparison-dialog";

  const close = document.createElement("button");
  close.className = "close";
  close.textContent = "×";
  close.addEventListener("click", onClose);
  dialog.appendChild(close);

  const title = document.createElement("h2");
  title.textContent = "Compare favorites";
  dialog.appendChild(title);

  const canvas = document.createElement("canvas");
  canvas.className = "comparison-canvas";
  canvas.width = 420;
  canvas.height = 420;
  dialog.appendChild(canvas);
  const ctx = canvas.getContext("2d");
  const series = view.entries.map((entry, i) => ({
    values: entry.values.map((a) => (a.missing ? 0 : a.value)),
    color: colorFor(i),
  }));
  if (ctx) drawComparison(ctx, 420, view.features.length, series);

  const legend = document.createElement("ul");
  legend.className = "legend";
  view.entries.forEach((entry, i) => {
    const item = document.createElement("li");
    item.className = "legend-entry";
    item.dataset.productId = entry.product_id;
    item.style.color = colorFor(i);
    item.textContent = entry.name;
    legend.appendChild(item);
  });
  dialog.appendChild(legend);

  // raw values for tooltips / fine reading
  const table = document.createElement("table");
  table.className = "raw-values";
  const head = table.insertRow();
  head.insertCell().textContent = "feature";
  for (const entry of view.entries) head.insertCell().textContent = entry.product_id;
  for (const feature of view.features) {
    const row = table.insertRow();
    row.insertCell().textContent = feature;
    for (const entry of view.entries) {
      const raw = entry.raw[feature];
      row.insertCell().textContent = raw === null || raw === undefined ? "n/a" : String(raw);
    }
  }
  dialog.appendChild(table);
  root.appendChild(dialog);
}

const TOAST_LIFETIME_MS = 6000;

export function showCouponToast(
  container: HTMLElement,
  drawer: HTMLElement,
  event: CouponEvent
): void {
  const toast = document.createElement("div");
  toast.className = "toast";
  toast.dataset.couponId = event.coupon.coupon_id;
  toast.textContent = `\u{1F4B8} ${event.coupon.description}`;
  const dismiss = document.createElement("button");
  dismiss.textContent = "×";
  dismiss.addEventListener("click", () => toast.remove());
  toast.appendChild(dismiss);
  container.appendChild(toast);
  setTimeout(() => toast.remove(), TOAST_LIFETIME_MS);

  const entry = document.createElement("li");
  entry.dataset.couponId = event.coupon.coupon_id;
  entry.textContent = `${event.coupon.description} (-$${event.coupon.discount.toFixed(2)})`;
  drawer.appendChild(entry);
}
