import init, { exactCurve, branchCurves, noisySweep } from "./pkg/qnd_wasm.js";

const $ = (id) => document.getElementById(id);
const canvas = $("plot");
const ctx = canvas.getContext("2d");
const PAD = 45;
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"];

function inputs() {
  const theta = $("theta").value === "" ? NaN : Number($("theta").value);
  return {
    observable: $("observable").value,
    theta,
    lambda: Number($("lambda").value),
    steps: Math.max(2, Number($("steps").value) | 0),
  };
}

function axes() {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.beginPath();
  ctx.moveTo(PAD, PAD / 2);
  ctx.lineTo(PAD, canvas.height - PAD);
  ctx.lineTo(canvas.width - PAD / 2, canvas.height - PAD);
  ctx.stroke();
  for (const y of [0, 0.5, 1]) ctx.fillText(y.toFixed(1), 12, py(y) + 4);
  for (const k of [0, 1, 2, 3, 4]) ctx.fillText(`${k / 2}π`, px(k * Math.PI / 2) - 8, canvas.height - PAD + 18);
  ctx.fillText("φ", canvas.width - PAD, canvas.height - 10);
}

const px = (phi) => PAD + (phi / (2 * Math.PI)) * (canvas.width - 1.5 * PAD);
const py = (v) => canvas.height - PAD - v * (canvas.height - 1.5 * PAD);

function line(points, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  points.forEach(([x, y], i) => (i ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y))));
  ctx.stroke();
  ctx.lineWidth = 1;
}

function dots(points, color) {
  ctx.fillStyle = color;
  for (const [x, y] of points) {
    ctx.beginPath();
    ctx.arc(px(x), py(y), 3, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function legend(entries) {
  $("legend").innerHTML = entries
    .map(([name, color]) => `<span style="color:${color}">■ ${name}</span>`)
    .join("");
}

function run(label, f) {
  $("status").textContent = `${label}…`;
  setTimeout(() => {
    const t0 = performance.now();
    try {
      const note = f();
      $("status").textContent = `${label}: ${(performance.now() - t0).toFixed(0)} ms${note ? "; " + note : ""}`;
    } catch (e) {
      $("status").textContent = `error: ${e.message ?? e}`;
    }
  }, 0);
}

$("exact").onclick = () =>
  run("exact curve", () => {
    const { observable, theta, lambda, steps } = inputs();
    const pts = JSON.parse(exactCurve(observable, theta, lambda, steps));
    axes();
    line(pts.map((p) => [p.phi, p.theory]), COLORS[0]);
    dots(pts.map((p) => [p.phi, p.qnd]), COLORS[1]);
    dots(pts.map((p) => [p.phi, p.tomo_out]), COLORS[2]);
    legend([["theory", COLORS[0]], ["QND estimate", COLORS[1]], ["output tomography", COLORS[2]]]);
  });

$("branches").onclick = () =>
  run("branch probabilities", () => {
    const { observable, theta, lambda, steps } = inputs();
    const pts = JSON.parse(branchCurves(observable, theta, lambda, steps));
    axes();
    const names = pts[0].branches.map((b) => b[0]);
    names.forEach((name, i) => line(pts.map((p) => [p.phi, p.branches[i][1]]), COLORS[i]));
    legend(names.map((n, i) => [`ancilla ${n}`, COLORS[i]]));
    return "branches at or above 0.25 count as reliable";
  });

$("noisy").onclick = () =>
  run("noisy sweep", () => {
    const { observable, theta, steps } = inputs();
    const out = JSON.parse(
      noisySweep(observable, theta, steps, Number($("shots").value), Number($("d1").value),
        Number($("d2").value), Number($("flip").value), Number($("seed").value)),
    );
    const rows = out.records;
    axes();
    line(rows.map((r) => [r.phi, r.theory]), COLORS[0]);
    dots(rows.map((r) => [r.phi, r.qnd_estimate]), COLORS[1]);
    dots(rows.map((r) => [r.phi, r.tomo_in]), COLORS[2]);
    const scale = out.fits.find((f) => f.kind === "scale");
    if (scale) line(rows.map((r) => [r.phi, scale.parameter * r.theory]), COLORS[3]);
    legend([["theory", COLORS[0]], ["QND estimate", COLORS[1]], ["input tomography", COLORS[2]], ["scaled fit", COLORS[3]]]);
    return out.fits.map((f) => `${f.kind} ${f.parameter.toFixed(4)} (rms ${f.residual_rms.toFixed(4)})`).join(", ");
  });

await init();
axes();
$("status").textContent = "ready";
