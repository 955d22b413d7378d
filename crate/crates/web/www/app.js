import init, { solveScaled, mellinLine, mellinZeros } from "./pkg/gvlab_web.js";

const $ = (id) => document.getElementById(id);

function plot(canvas, xs, ys) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  let x0 = Math.min(...xs), x1 = Math.max(...xs);
  let y0 = Infinity, y1 = -Infinity;
  for (const y of ys) { if (y < y0) y0 = y; if (y > y1) y1 = y; }
  if (x0 === x1) { x0 -= 1; x1 += 1; }
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const px = (x) => pad + (x - x0) / (x1 - x0) * (w - 2 * pad);
  const py = (y) => h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad);
  ctx.strokeStyle = "#000";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#000";
  ctx.font = "11px sans-serif";
  ctx.fillText(y1.toPrecision(4), 2, pad + 4);
  ctx.fillText(y0.toPrecision(4), 2, h - pad);
  ctx.fillText(x0.toPrecision(4), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(4), w - pad - 30, h - pad + 14);
  if (y0 < 0 && y1 > 0) {
    ctx.strokeStyle = "#aaa";
    ctx.setLineDash([4, 4]);
    ctx.beginPath(); ctx.moveTo(pad, py(0)); ctx.lineTo(w - pad, py(0)); ctx.stroke();
    ctx.setLineDash([]);
  }
  ctx.strokeStyle = "steelblue";
  ctx.lineWidth = 0.8;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]))));
  ctx.stroke();
}

function timed(status, f) {
  const t = performance.now();
  try {
    const msg = f();
    status.textContent = `${msg} (${(performance.now() - t).toFixed(0)} ms)`;
  } catch (e) {
    status.textContent = `error: ${e.message ?? e}`;
  }
}

function runSolve() {
  timed($("solve-status"), () => {
    const n = Number($("solve-n").value);
    const ys = solveScaled($("solve-weight").value, $("solve-beta").value, n, Number($("solve-exp").value));
    const xs = Array.from(ys, (_, i) => i + 1);
    plot($("solve-plot"), xs, Array.from(ys));
    return `solved ${n} rows`;
  });
}

function runLine() {
  timed($("line-status"), () => {
    const steps = 1000, im = Number($("line-im").value);
    const ys = mellinLine($("line-weight").value, Number($("line-re").value), im, steps);
    const xs = Array.from(ys, (_, k) => im * k / (steps - 1));
    plot($("line-plot"), xs, Array.from(ys));
    return `${steps} evaluations`;
  });
}

function runZeros() {
  timed($("zeros-status"), () => {
    const b = $("zeros-box").value.split(",").map(Number);
    if (b.length !== 4 || b.some(Number.isNaN)) throw new Error("box must be re0,re1,im0,im1");
    const z = mellinZeros($("zeros-seq").value, b[0], b[1], b[2], b[3]);
    const table = $("zeros-table");
    table.innerHTML = "<tr><th>Re z</th><th>Im z</th><th>|Re z - 1/2|</th></tr>";
    for (let i = 0; i < z.length; i += 2) {
      const row = table.insertRow();
      row.insertCell().textContent = z[i].toFixed(10);
      row.insertCell().textContent = z[i + 1].toFixed(10);
      row.insertCell().textContent = Math.abs(z[i] - 0.5).toExponential(2);
    }
    return `${z.length / 2} zeros`;
  });
}

await init();
$("solve-run").onclick = runSolve;
$("line-run").onclick = runLine;
$("zeros-run").onclick = runZeros;
runSolve();
