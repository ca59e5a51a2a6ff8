import init, { Simulation, certificate_json, sigma_sweep_json } from "./pkg/dampwave_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function params() {
  const p = { a: num("a"), c: num("c") };
  const v = $("variant").value;
  if (v !== "A") p.mu = num("mu");
  if (v === "C" || v === "D") Object.assign(p, { b: num("b"), k: num("k"), lambda: num("lambda") });
  if (v === "D") p.sigma = num("sigma");
  return JSON.stringify(p);
}

function report(e) {
  $("error").textContent = e ? String(e.message ?? e) : "";
}

let sim = null;
let frame = 0;

function draw() {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(0, height / 2);
  ctx.lineTo(width, height / 2);
  ctx.stroke();
  const series = [
    [sim.u(), "#1f5fbf"],
    [sim.w(), "#bf5f1f"],
    [sim.theta(), "#2f9f4f"],
  ];
  for (const [ys, colour] of series) {
    if (ys.length === 0) continue;
    ctx.strokeStyle = colour;
    ctx.beginPath();
    ys.forEach((y, i) => {
      const px = (i / (ys.length - 1)) * width;
      const py = height / 2 - y * height * 0.4;
      i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
}

function tick() {
  try {
    sim.advance(4);
    const e = sim.energy();
    $("status").textContent =
      `t = ${sim.time().toFixed(3)}   E/E0 = ${(e / sim.initial_energy()).toExponential(3)}   ` +
      `V = ${sim.lyapunov().toExponential(4)}   certified ω = ${sim.omega().toExponential(3)}` +
      "   (blue u, orange u_t, green θ)";
    draw();
    frame = requestAnimationFrame(tick);
  } catch (e) {
    report(e);
  }
}

function start() {
  cancelAnimationFrame(frame);
  report(null);
  try {
    sim?.free();
    sim = new Simulation($("variant").value, params(), num("n"), num("amp"), num("freq"));
    frame = requestAnimationFrame(tick);
  } catch (e) {
    report(e);
  }
}

function certify() {
  report(null);
  try {
    const json = JSON.parse(certificate_json($("variant").value, params(), num("r")));
    delete json.branches;
    $("certificate").textContent = JSON.stringify(json, null, 2);
  } catch (e) {
    report(e);
  }
}

function sweep() {
  report(null);
  try {
    const sigmas = Float64Array.from($("sigmas").value.split(",").map(Number));
    const p = JSON.parse(params());
    const base = JSON.stringify({ a: p.a, c: p.c, mu: num("mu"), b: num("b"), k: num("k"), lambda: num("lambda"), sigma: 1 });
    const result = JSON.parse(sigma_sweep_json(base, sigmas, num("r")));
    const rows = result.rows
      .map((r) => `<tr><td>${r.sigma}</td><td>${r.gamma.toExponential(3)}</td><td>${r.omega.toExponential(3)}</td><td>${r.C1.toExponential(3)}</td></tr>`)
      .join("");
    $("sweep-table").innerHTML = `<tr><th>&sigma;</th><th>&gamma;</th><th>&omega;</th><th>C1</th></tr>${rows}`;
  } catch (e) {
    report(e);
  }
}

await init();
$("start").addEventListener("click", start);
$("stop").addEventListener("click", () => cancelAnimationFrame(frame));
$("certify").addEventListener("click", certify);
$("sweep").addEventListener("click", sweep);
