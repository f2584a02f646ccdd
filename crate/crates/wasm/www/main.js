import init, { compare, exact_curve, spectrum } from "./pkg/vqnhite_wasm.js";

const $ = (id) => document.getElementById(id);
const COLORS = { vite: "#e07b00", vqnhite: "#1f5fbf", exact: "#2a8a2a" };

function randomFields() {
  const n = Math.max(1, Math.min(6, Number($("n").value) | 0));
  $("fields").value = Array.from({ length: n }, () => (2 * Math.random() - 1).toFixed(3)).join(", ");
}

function readFields() {
  const f = new Float64Array($("fields").value.split(",").map((s) => Number(s.trim())));
  if (f.some(Number.isNaN)) throw new Error("fields must be comma-separated numbers");
  return f;
}

// series: [{ name, xs, ys }]
function plot(series, xLabel, yLabel, yRange) {
  const c = $("plot");
  const g = c.getContext("2d");
  const [L, R, T, B] = [60, 15, 15, 40];
  const w = c.width - L - R;
  const h = c.height - T - B;
  const xs = series.flatMap((s) => s.xs);
  const ys = series.flatMap((s) => s.ys);
  const x0 = Math.min(...xs), x1 = Math.max(...xs) || 1;
  let [y0, y1] = yRange ?? [Math.min(...ys), Math.max(...ys)];
  if (y1 - y0 < 1e-9) { y0 -= 0.5; y1 += 0.5; }
  const px = (x) => L + ((x - x0) / (x1 - x0 || 1)) * w;
  const py = (y) => T + ((y1 - y) / (y1 - y0)) * h;

  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#000";
  g.strokeRect(L, T, w, h);
  g.fillStyle = "#000";
  g.font = "12px sans-serif";
  g.textAlign = "center";
  for (let k = 0; k <= 5; k++) {
    const x = x0 + ((x1 - x0) * k) / 5;
    g.fillText(x.toFixed(2), px(x), T + h + 15);
  }
  g.fillText(xLabel, L + w / 2, c.height - 5);
  g.textAlign = "right";
  for (let k = 0; k <= 4; k++) {
    const y = y0 + ((y1 - y0) * k) / 4;
    g.fillText(y.toFixed(3), L - 5, py(y) + 4);
  }
  g.save();
  g.translate(14, T + h / 2);
  g.rotate(-Math.PI / 2);
  g.textAlign = "center";
  g.fillText(yLabel, 0, 0);
  g.restore();

  for (const s of series) {
    g.strokeStyle = COLORS[s.name] ?? "#444";
    g.lineWidth = 1.5;
    g.beginPath();
    s.xs.forEach((x, i) => (i ? g.lineTo(px(x), py(s.ys[i])) : g.moveTo(px(x), py(s.ys[i]))));
    g.stroke();
  }
}

function run(label, f) {
  $("status").textContent = `${label}…`;
  // let the status paint before the (synchronous) computation starts
  setTimeout(() => {
    try {
      const t = performance.now();
      f();
      $("status").textContent = `${label}: ${((performance.now() - t) / 1000).toFixed(2)} s`;
    } catch (e) {
      $("status").textContent = `error: ${e.message ?? e}`;
    }
  }, 10);
}

function onCompare() {
  run("compare", () => {
    const c = compare(readFields(), Number($("j").value), $("layout").value,
      Number($("dbeta").value), Number($("bmax").value), Number($("seed").value) >>> 0);
    const xs = Array.from(c.beta());
    const vite = Array.from(c.vite());
    const vq = Array.from(c.vqnhite());
    const lo = Math.min(...vite, ...vq);
    plot([{ name: "vite", xs, ys: vite }, { name: "vqnhite", xs, ys: vq }], "β", "fidelity with exact ψ(β)", [Math.min(lo, 0.99), 1]);
    $("legend").innerHTML = `<span class="vite">VITE</span> F(β<sub>max</sub>) = ${vite.at(-1).toFixed(5)}, `
      + `<span class="vqnhite">VQNHITE</span> F(β<sub>max</sub>) = ${vq.at(-1).toFixed(5)}`;
  });
}

function onExact() {
  run("exact ITE", () => {
    const rows = exact_curve(readFields(), Number($("j").value), Number($("dbeta").value), Number($("bmax").value));
    const xs = [], fs = [];
    for (let k = 0; k < rows.length; k += 3) { xs.push(rows[k]); fs.push(rows[k + 1]); }
    plot([{ name: "exact", xs, ys: fs }], "β", "fidelity with ground state", [0, 1]);
    $("legend").innerHTML = `<span class="exact">exact</span> ground-state fidelity reaches ${fs.at(-1).toFixed(4)}; `
      + `⟨H⟩ = ${rows.at(-1).toFixed(4)}`;
  });
}

function onSpectrum() {
  run("spectrum", () => {
    const s = spectrum(readFields(), Number($("j").value));
    const e = Array.from(s.eigenvalues());
    plot([{ name: "exact", xs: e.map((_, k) => k), ys: e }], "level", "energy");
    $("legend").textContent = `E₀ = ${e[0].toFixed(4)}, gap = ${s.gap.toExponential(3)}, `
      + `|⟨E₀|+…+⟩|² = ${s.overlap.toFixed(4)}`;
  });
}

await init();
randomFields();
$("draw").onclick = randomFields;
$("n").onchange = randomFields;
$("compare").onclick = onCompare;
$("exact").onclick = onExact;
$("spectrum").onclick = onSpectrum;
