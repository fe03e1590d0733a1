import init, { wignerHistogram, freeConvolutionDensity, variationalCurve } from "./pkg/detlab_web.js";

const $ = (id) => document.getElementById(id);

// Draws series of [x, y] pairs on a canvas with shared axes.
function plot(canvas, series, opts = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  ctx.clearRect(0, 0, w, h);
  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1])).filter(Number.isFinite);
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const y0 = opts.yMin ?? Math.min(0, ...ys), y1 = Math.max(...ys) * 1.05;
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, sy(Math.max(y0, 0)));
  ctx.lineTo(w - pad, sy(Math.max(y0, 0)));
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toFixed(1), pad, h - 10);
  ctx.fillText(x1.toFixed(1), w - pad - 20, h - 10);
  ctx.fillText(y1.toFixed(2), 2, pad);
  ctx.fillText(y0.toFixed(2), 2, h - pad);

  for (const s of series) {
    if (s.bars) {
      ctx.fillStyle = s.color;
      const bw = (w - 2 * pad) / s.points.length;
      for (const [x, y] of s.points) ctx.fillRect(sx(x) - bw / 2, sy(y), bw - 1, sy(y0) - sy(y));
      continue;
    }
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    let first = true;
    for (const [x, y] of s.points) {
      if (!Number.isFinite(y)) { first = true; continue; }
      first ? ctx.moveTo(sx(x), sy(y)) : ctx.lineTo(sx(x), sy(y));
      first = false;
    }
    ctx.stroke();
  }
  if (opts.marker) {
    const [mx, my] = opts.marker;
    ctx.fillStyle = "#c00";
    ctx.beginPath();
    ctx.arc(sx(mx), sy(my), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function pairs(arr, stride, col) {
  const out = [];
  for (let i = 0; i + stride <= arr.length; i += stride) out.push([arr[i], arr[i + col]]);
  return out;
}

function runWigner() {
  const n = Number($("w-n").value);
  const t = performance.now();
  try {
    const h = wignerHistogram(n, $("w-dist").value, BigInt($("w-seed").value), 60);
    plot($("w-plot"), [
      { points: pairs(h, 3, 1), color: "#8ab", bars: true },
      { points: pairs(h, 3, 2), color: "#c33" },
    ]);
    $("w-note").textContent = `N = ${n}, ${(performance.now() - t).toFixed(0)} ms`;
  } catch (e) {
    $("w-note").textContent = e.message ?? String(e);
  }
}

function runFree() {
  const sigma = Number($("f-sigma").value), a = Number($("f-a").value);
  $("f-values").textContent = `σ = ${sigma.toFixed(2)}, a = ${a.toFixed(2)}`;
  const d = freeConvolutionDensity(sigma, a, 801);
  plot($("f-plot"), [{ points: pairs(d, 2, 1), color: "#36a" }]);
}

function runVariational() {
  const alpha = Number($("v-alpha").value);
  const v = variationalCurve(alpha, 6, 241);
  const [u, s] = v.slice(-2);
  $("v-values").textContent = `α = ${alpha.toFixed(3)}, |u*| = ${u.toFixed(4)}, sup = ${s.toFixed(5)}`;
  plot($("v-plot"), [{ points: pairs(v.slice(0, -2), 2, 1), color: "#393" }], { yMin: Math.max(-3, Math.min(...pairs(v.slice(0, -2), 2, 1).map((p) => p[1]))), marker: [u, s] });
}

await init();
$("w-run").addEventListener("click", runWigner);
$("f-sigma").addEventListener("input", runFree);
$("f-a").addEventListener("input", runFree);
$("v-alpha").addEventListener("input", runVariational);
runWigner();
runFree();
runVariational();
