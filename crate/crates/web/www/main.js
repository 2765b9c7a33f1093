import init, { classGroupInfo, suganoExpand, plancherelGrid } from "./pkg/bplab_web.js";

const $ = (id) => document.getElementById(id);
const num = (form, name) => Number(form.elements[name].value);

function show(el, fn) {
  el.classList.remove("error");
  try {
    el.textContent = fn();
  } catch (e) {
    el.classList.add("error");
    el.textContent = String(e.message ?? e);
  }
}

function pretty(json) {
  return JSON.stringify(JSON.parse(json).result, null, 2);
}

// viridis-like ramp, good enough for a quick look
function colour(t) {
  const r = Math.round(255 * Math.min(1, Math.max(0, 1.6 * t - 0.4)));
  const g = Math.round(255 * Math.sqrt(t) * 0.9);
  const b = Math.round(255 * (0.35 + 0.5 * Math.sin(Math.PI * t)) * (1 - t * 0.6));
  return [r, g, b];
}

function draw(form) {
  const n = num(form, "n");
  const grid = plancherelGrid(num(form, "d"), num(form, "chi"), num(form, "p"), n);
  const canvas = $("pl-canvas");
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, n);
  const max = grid.reduce((a, b) => Math.max(a, b), 0);
  const h = Math.PI / n;
  let mass = 0;
  grid.forEach((v, k) => {
    mass += v * h * h;
    const i = k % n;
    const row = n - 1 - Math.floor(k / n); // θ₂ increases upward
    const [r, g, b] = colour(max > 0 ? v / max : 0);
    const o = 4 * (row * n + i);
    img.data.set([r, g, b, 255], o);
  });
  const off = new OffscreenCanvas(n, n);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
  return `max density ${max.toFixed(4)}, mass on the square ${mass.toFixed(4)}`;
}

await init();
$("status").textContent = "Ready.";

$("cg").addEventListener("submit", (e) => {
  e.preventDefault();
  const f = e.target;
  show($("cg-out"), () => pretty(classGroupInfo(num(f, "d"), f.elements.p.value)));
});

$("su").addEventListener("submit", (e) => {
  e.preventDefault();
  const f = e.target;
  show($("su-out"), () =>
    pretty(suganoExpand(num(f, "d"), num(f, "chi"), num(f, "p"), num(f, "l"), num(f, "m"))),
  );
});

$("pl").addEventListener("submit", (e) => {
  e.preventDefault();
  show($("pl-out"), () => draw(e.target));
});
