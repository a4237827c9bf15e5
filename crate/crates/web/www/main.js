import init, { Studio, bent_grid, bend_jumps } from "./pkg/phongfield_web.js";

const $ = (id) => document.getElementById(id);
const value = (id) => Number($(id).value);

function showValues() {
  for (const out of document.querySelectorAll("output")) {
    out.textContent = $(out.htmlFor.value).value;
  }
}

function blit(canvas, rgba, w, h) {
  const img = new ImageData(new Uint8ClampedArray(rgba), w, h);
  if (canvas.width === w && canvas.height === h) {
    canvas.getContext("2d").putImageData(img, 0, 0);
    return;
  }
  // Draw at native size, then scale up without smoothing.
  const tmp = new OffscreenCanvas(w, h);
  tmp.getContext("2d").putImageData(img, 0, 0);
  const ctx = canvas.getContext("2d");
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
}

function panel(label, w, h, scale) {
  const div = document.createElement("div");
  div.className = "panel";
  const canvas = document.createElement("canvas");
  canvas.width = w * scale;
  canvas.height = h * scale;
  div.append(canvas, label);
  $("maps").append(div);
  return canvas;
}

await init();
const studio = new Studio();
const shininess = Array.from(studio.shininess());

const envCanvas = panel("environment", studio.env_width(), studio.env_height(), 4);
const mapCanvases = ["diffuse", ...shininess.map((n) => `specular n=${n}`)].map((label) =>
  panel(label, studio.lightmap_width(), studio.lightmap_height(), 4),
);
for (const n of shininess) {
  $("shin").append(new Option(n, n));
}
$("shin").value = shininess[1] ?? shininess[0];

function drawSphere() {
  const size = $("sphere").width;
  blit($("sphere"), studio.render_sphere(value("kd"), value("ks"), value("shin"), size), size, size);
}

function drawMaps() {
  blit(envCanvas, studio.env_rgba(), studio.env_width(), studio.env_height());
  mapCanvases.forEach((c, i) => blit(c, studio.lightmap_rgba(i), studio.lightmap_width(), studio.lightmap_height()));
}

function relight() {
  const t0 = performance.now();
  studio.set_sun(value("elev"), value("azim"), value("sharp"));
  const t1 = performance.now();
  drawMaps();
  drawSphere();
  $("status").textContent = `bake ${(t1 - t0).toFixed(0)} ms, render ${(performance.now() - t1).toFixed(0)} ms`;
}

const ROWS = 7;
const COLUMNS = 21;
const SAMPLES = 120;

function drawGrid(canvas, useSf) {
  const pts = bent_grid(value("bend"), value("alpha"), useSf, ROWS, COLUMNS, SAMPLES);
  const ctx = canvas.getContext("2d");
  ctx.fillStyle = "#000";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  // World window x ∈ [−1.5, 5.5], y ∈ [−2, 5].
  const s = canvas.width / 7;
  const px = (x) => (x + 1.5) * s;
  const py = (y) => canvas.height - (y + 2) * s;
  for (let line = 0; line < ROWS + COLUMNS; line++) {
    ctx.strokeStyle = line < ROWS ? "#e8a33c" : "#4fa3d9";
    ctx.beginPath();
    for (let i = 0; i < SAMPLES; i++) {
      const k = 2 * (line * SAMPLES + i);
      if (i === 0) ctx.moveTo(px(pts[k]), py(pts[k + 1]));
      else ctx.lineTo(px(pts[k]), py(pts[k + 1]));
    }
    ctx.stroke();
  }
}

function deform() {
  drawGrid($("mls"), false);
  drawGrid($("sf"), true);
  const [mls, sf] = bend_jumps(value("bend"), value("alpha"));
  $("mls-jump").textContent = `max step ${mls.toFixed(3)}`;
  $("sf-jump").textContent = `max step ${sf.toFixed(3)}`;
}

for (const id of ["elev", "azim", "sharp"]) $(id).addEventListener("change", relight);
for (const id of ["kd", "ks", "shin"]) $(id).addEventListener("input", drawSphere);
for (const id of ["bend", "alpha"]) $(id).addEventListener("input", deform);
document.addEventListener("input", showValues);

showValues();
relight();
deform();
