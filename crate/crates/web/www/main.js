import init, { convergence, smoothing, spectrum } from "./pkg/gtnet_web.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"];

function inputs() {
  return {
    graph: $("graph").value,
    depth: Number($("depth").value),
    seed: Number($("seed").value),
  };
}

// Plots each series as y over x; `log` switches the y axis to log10.
function plot(title, series, { log = false, points = false } = {}) {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const pad = 50;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  const ty = (y) => (log ? Math.log10(Math.max(y, 1e-16)) : y);
  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y.map(ty));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 - y0 < 1e-12) { y0 -= 1; y1 += 1; }
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * w;
  const py = (y) => pad + h - ((ty(y) - y0) / (y1 - y0)) * h;

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.fillText(`${x0}`, pad, pad + h + 16);
  ctx.fillText(`${x1}`, pad + w - 20, pad + h + 16);
  ctx.fillText(log ? `1e${y1.toFixed(1)}` : y1.toFixed(3), 2, pad + 4);
  ctx.fillText(log ? `1e${y0.toFixed(1)}` : y0.toFixed(3), 2, pad + h);

  series.forEach((s, i) => {
    ctx.strokeStyle = ctx.fillStyle = COLORS[i % COLORS.length];
    ctx.beginPath();
    s.x.forEach((x, j) => {
      if (points) {
        ctx.fillRect(px(x) - 2, py(s.y[j]) - 2, 4, 4);
      } else if (j === 0) {
        ctx.moveTo(px(x), py(s.y[j]));
      } else {
        ctx.lineTo(px(x), py(s.y[j]));
      }
    });
    if (!points) ctx.stroke();
  });
  $("title").textContent = title;
  $("legend").innerHTML = series
    .map((s, i) => `<span style="color:${COLORS[i % COLORS.length]}">■ ${s.name}</span>`)
    .join("");
}

function run(f) {
  $("status").textContent = "";
  try {
    f(inputs());
  } catch (e) {
    $("status").textContent = String(e);
  }
}

function showConvergence({ graph, depth, seed }) {
  const r = JSON.parse(convergence(graph, depth, seed));
  const rate = r.fitted_rate === null ? "n/a" : r.fitted_rate.toFixed(4);
  plot(
    `‖H(L) − H*‖∞ by depth. Fitted rate ${rate}, largest |eigenvalue| ${r.spectral_radius.toFixed(4)}`,
    [{ name: "distance to limit", x: r.depths, y: r.distances }],
    { log: true },
  );
}

function showSmoothing({ graph, depth, seed }) {
  const r = JSON.parse(smoothing(graph, depth, seed));
  plot("Pairwise row distances by depth", [
    { name: "GCN max", x: r.depths, y: r.gcn_max_distance },
    { name: "GCN min", x: r.depths, y: r.gcn_min_distance },
    { name: "GTCN max", x: r.depths, y: r.gtcn_max_distance },
    { name: "GTCN min", x: r.depths, y: r.gtcn_min_distance },
  ], { log: true });
}

function showSpectrum({ graph }) {
  const r = JSON.parse(spectrum(graph));
  const e = [...r.a1_eigenvalues].sort((a, b) => a - b);
  plot(
    `Sorted eigenvalues of A₁ (${r.num_nodes} nodes). All inside (−1, 1): ${r.bounds_hold}`,
    [{ name: "eigenvalue", x: e.map((_, i) => i), y: e }],
    { points: true },
  );
}

await init();
$("convergence").onclick = () => run(showConvergence);
$("smoothing").onclick = () => run(showSmoothing);
$("spectrum").onclick = () => run(showSpectrum);
run(showConvergence);
