import init, { cornerDistribution, llnPrediction, simulate } from "./pkg/padic_rmt_wasm.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function inputs() {
  return { signature: $("signature").value, p: Number($("prime").value) };
}

function guard(out, f) {
  try {
    f();
  } catch (e) {
    out.innerHTML = `<p class="error">${e}</p>`;
  }
}

function showCorner() {
  const out = $("corner-out");
  guard(out, () => {
    const { signature, p } = inputs();
    const rows = JSON.parse(cornerDistribution(signature, p, Number($("level").value)));
    const body = rows
      .map((r) => `<tr><td>(${r.signature.join(", ")})</td><td>${r.prob}</td><td>${r.approx.toFixed(6)}</td></tr>`)
      .join("");
    out.innerHTML = `<table><tr><th>signature</th><th>probability</th><th></th></tr>${body}</table>`;
  });
}

function showPrediction() {
  const out = $("lln-out");
  guard(out, () => {
    const { signature, p } = inputs();
    const pred = JSON.parse(llnPrediction(signature, p));
    const cells = pred.exact.map((x, i) => `<td>${x}</td><td>${pred.approx[i].toFixed(6)}</td>`);
    out.innerHTML = `<table>${cells.map((c, i) => `<tr><th>${i + 1}</th>${c}</tr>`).join("")}</table>`;
  });
}

function plot(view) {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const kMax = view.k[view.k.length - 1];
  const all = view.lambda.flat();
  const lo = Math.min(...all);
  const hi = Math.max(...all, lo + 1);
  const x = (k) => 40 + (k / kMax) * (canvas.width - 60);
  const y = (v) => canvas.height - 20 - ((v - lo) / (hi - lo)) * (canvas.height - 40);
  view.lambda.forEach((series, i) => {
    const color = COLORS[i % COLORS.length];
    ctx.strokeStyle = color;
    ctx.beginPath();
    series.forEach((v, k) => (k === 0 ? ctx.moveTo(x(k), y(v)) : ctx.lineTo(x(k), y(v))));
    ctx.stroke();
    // predicted drift as a dashed line from the origin
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(x(0), y(0));
    ctx.lineTo(x(kMax), y(view.prediction.approx[i] * kMax));
    ctx.stroke();
    ctx.setLineDash([]);
  });
}

function runSimulation() {
  const out = $("sim-out");
  guard(out, () => {
    const { signature, p } = inputs();
    const view = JSON.parse(simulate(signature, p, Number($("steps").value), Number($("seed").value)));
    const rows = view.lyapunov
      .map((l, i) => `<tr><th>${i + 1}</th><td>${l.toFixed(4)}</td><td>${view.prediction.approx[i].toFixed(4)}</td></tr>`)
      .join("");
    out.innerHTML = `<table><tr><th></th><th>λ(k)/k</th><th>limit</th></tr>${rows}</table>`;
    plot(view);
  });
}

await init();
$("corner-run").addEventListener("click", showCorner);
$("lln-run").addEventListener("click", showPrediction);
$("sim-run").addEventListener("click", runSimulation);
showCorner();
