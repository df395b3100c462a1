// Expects the wasm-bindgen output (--target web) in ./pkg/.
import init, { analyze_pa, spread_curves, fisher_ci } from "./pkg/exforce_wasm.js";

const $ = (id) => document.getElementById(id);
const errorBox = $("error");

let network = null;
let graphArgs = null;
let positions = [];

function showError(e) {
  errorBox.textContent = e ? String(e) : "";
}

function formValues(form) {
  return Object.fromEntries(new FormData(form).entries());
}

// Fruchterman-Reingold style layout, fixed iteration count.
function layout(n, edges, width, height) {
  let seed = 1;
  const rand = () => ((seed = (seed * 16807) % 2147483647) / 2147483647);
  const pos = Array.from({ length: n }, () => [rand() * width, rand() * height]);
  const k = Math.sqrt((width * height) / n);
  let temp = width / 10;
  const iterations = n > 1500 ? 60 : 150;
  for (let it = 0; it < iterations; it++) {
    const disp = Array.from({ length: n }, () => [0, 0]);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = pos[i][0] - pos[j][0];
        const dy = pos[i][1] - pos[j][1];
        const d2 = Math.max(dx * dx + dy * dy, 0.01);
        const f = (k * k) / d2;
        disp[i][0] += dx * f; disp[i][1] += dy * f;
        disp[j][0] -= dx * f; disp[j][1] -= dy * f;
      }
    }
    for (const [u, v] of edges) {
      const dx = pos[u][0] - pos[v][0];
      const dy = pos[u][1] - pos[v][1];
      const d = Math.max(Math.hypot(dx, dy), 0.01);
      const f = d / k;
      disp[u][0] -= dx * f; disp[u][1] -= dy * f;
      disp[v][0] += dx * f; disp[v][1] += dy * f;
    }
    for (let i = 0; i < n; i++) {
      const d = Math.max(Math.hypot(disp[i][0], disp[i][1]), 0.01);
      pos[i][0] = Math.min(width - 8, Math.max(8, pos[i][0] + (disp[i][0] / d) * Math.min(d, temp)));
      pos[i][1] = Math.min(height - 8, Math.max(8, pos[i][1] + (disp[i][1] / d) * Math.min(d, temp)));
    }
    temp *= 0.96;
  }
  return pos;
}

function drawGraph(colorBy, selected) {
  const canvas = $("graph-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "rgba(0,0,0,0.12)";
  ctx.beginPath();
  for (const [u, v] of network.edges) {
    ctx.moveTo(...positions[u]);
    ctx.lineTo(...positions[v]);
  }
  ctx.stroke();
  const values = network.metrics.map((m) => m[colorBy]);
  const max = Math.max(...values) || 1;
  for (const m of network.metrics) {
    const t = m[colorBy] / max;
    ctx.fillStyle = `hsl(${240 - 240 * t}, 80%, 45%)`;
    const [x, y] = positions[m.id];
    ctx.beginPath();
    ctx.arc(x, y, 2 + 2 * Math.sqrt(m.degree), 0, 2 * Math.PI);
    ctx.fill();
    if (m.id === selected) {
      ctx.strokeStyle = "#000";
      ctx.lineWidth = 2;
      ctx.stroke();
      ctx.lineWidth = 1;
    }
  }
}

function topTable(colorBy) {
  const rows = [...network.metrics].sort((a, b) => b[colorBy] - a[colorBy]).slice(0, 10);
  const fmt = (x) => (Number.isInteger(x) ? x : x.toFixed(3));
  $("top-nodes").innerHTML =
    "<tr><th>node</th><th>degree</th><th>ExF</th><th>ExF^M</th><th>k-shell</th><th>evc</th></tr>" +
    rows
      .map((m) => `<tr><td>${m.id}</td><td>${m.degree}</td><td>${fmt(m.exf)}</td><td>${fmt(m.exfm)}</td><td>${m.kshell}</td><td>${fmt(m.evc)}</td></tr>`)
      .join("");
}

function generate(event) {
  event?.preventDefault();
  showError();
  const v = formValues($("graph-form"));
  graphArgs = { n: +v.n, m: +v.m, leaf: +v.leaf, seed: +v.seed };
  try {
    network = JSON.parse(analyze_pa(graphArgs.n, graphArgs.m, graphArgs.leaf, graphArgs.seed, +v.alpha));
  } catch (e) {
    return showError(e);
  }
  $("graph-stats").textContent =
    `${network.nodes} nodes, ${network.edges_count} edges, diameter ${network.diameter}, ` +
    `lambda ${network.lambda.toFixed(3)}, edges/node ${network.density.toFixed(3)}`;
  const canvas = $("graph-canvas");
  positions = layout(network.nodes, network.edges, canvas.width, canvas.height);
  drawGraph(v.color, +$("spread-form").node.value);
  topTable(v.color);
}

function pickNode(event) {
  if (!network) return;
  const canvas = $("graph-canvas");
  const rect = canvas.getBoundingClientRect();
  const x = ((event.clientX - rect.left) * canvas.width) / rect.width;
  const y = ((event.clientY - rect.top) * canvas.height) / rect.height;
  let best = 0;
  let bestD = Infinity;
  positions.forEach(([px, py], i) => {
    const d = (px - x) ** 2 + (py - y) ** 2;
    if (d < bestD) [best, bestD] = [i, d];
  });
  $("spread-form").node.value = best;
  drawGraph($("graph-form").color.value, best);
}

function plotCurves(curves, process) {
  const canvas = $("spread-canvas");
  const ctx = canvas.getContext("2d");
  const pad = 30;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const steps = Math.max(...curves.infected.map((s) => s.length), 2);
  const maxY = Math.max(0.05, ...curves.infected.flat(), ...curves.recovered.flat());
  const sx = (t) => pad + ((canvas.width - 2 * pad) * t) / (steps - 1);
  const sy = (v) => canvas.height - pad - ((canvas.height - 2 * pad) * v) / maxY;
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, canvas.width - 2 * pad, canvas.height - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.fillText("0", pad - 12, canvas.height - pad + 4);
  ctx.fillText(maxY.toFixed(2), 2, pad + 4);
  ctx.fillText(`step ${steps - 1}`, canvas.width - pad - 40, canvas.height - 10);
  const series = (data, color) => {
    ctx.strokeStyle = color;
    for (const s of data) {
      ctx.beginPath();
      s.forEach((v, t) => (t ? ctx.lineTo(sx(t), sy(v)) : ctx.moveTo(sx(t), sy(v))));
      ctx.stroke();
    }
  };
  series(curves.infected, "rgba(200,30,30,0.45)");
  if (process === "sir") series(curves.recovered, "rgba(30,60,200,0.35)");
}

function simulate(event) {
  event?.preventDefault();
  showError();
  if (!graphArgs) return showError("generate a graph first");
  const v = formValues($("spread-form"));
  let curves;
  try {
    curves = JSON.parse(
      spread_curves(graphArgs.n, graphArgs.m, graphArgs.leaf, graphArgs.seed, v.process, +v.node,
        +v.factor, +v.gamma, +v.tmax, +v.runs, 7),
    );
  } catch (e) {
    return showError(e);
  }
  const runs = curves.infected.length;
  $("spread-summary").textContent =
    `beta = ${curves.beta.toFixed(4)}; ` +
    (v.process === "si"
      ? `mean time to half coverage ${curves.mean_half_coverage_time?.toFixed(2) ?? "not reached"}`
      : `${curves.epidemic_runs} of ${runs} runs classified epidemic`);
  plotCurves(curves, v.process);
}

function interval() {
  const v = formValues($("ci-form"));
  try {
    const ci = JSON.parse(fisher_ci(+v.r, +v.n, +v.level));
    $("ci-out").textContent = `${ci.display}   [${ci.lower.toFixed(4)}, ${ci.upper.toFixed(4)}]`;
    showError();
  } catch (e) {
    showError(e);
  }
}

await init();
$("graph-form").addEventListener("submit", generate);
$("graph-form").color.addEventListener("change", () => {
  if (!network) return;
  drawGraph($("graph-form").color.value, +$("spread-form").node.value);
  topTable($("graph-form").color.value);
});
$("graph-canvas").addEventListener("click", pickNode);
$("spread-form").addEventListener("submit", simulate);
$("ci-form").addEventListener("input", interval);
generate();
interval();
