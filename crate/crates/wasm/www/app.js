// Wiring between the page controls and the wasm exports. Build the
// module with `wasm-pack build crates/wasm --target web --out-dir www/pkg`
// and serve this directory.

import init, {
  moment_curves,
  run_trajectory,
  steady_distribution,
} from "./pkg/dlindblad_wasm.js";

const $ = (id) => document.getElementById(id);

// ---------------------------------------------------------------- plotting

const PAD = { left: 48, right: 12, top: 12, bottom: 32 };

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

function frame(ctx, canvas, xmax, ymax, xlabel, ylabel) {
  const w = canvas.width - PAD.left - PAD.right;
  const h = canvas.height - PAD.top - PAD.bottom;
  ctx.strokeStyle = "#c8cdd4";
  ctx.fillStyle = "#5c6470";
  ctx.lineWidth = 1;
  ctx.font = "11px system-ui";
  ctx.strokeRect(PAD.left, PAD.top, w, h);
  const xticks = 6;
  for (let i = 0; i <= xticks; i++) {
    const x = PAD.left + (w * i) / xticks;
    const v = (xmax * i) / xticks;
    ctx.fillText(v.toFixed(1), x - 8, canvas.height - 14);
  }
  const yticks = 5;
  ctx.textAlign = "right";
  for (let i = 0; i <= yticks; i++) {
    const y = PAD.top + h - (h * i) / yticks;
    const v = (ymax * i) / yticks;
    ctx.fillText(v.toPrecision(3), PAD.left - 4, y + 3);
  }
  ctx.textAlign = "center";
  ctx.fillText(xlabel, PAD.left + w / 2, canvas.height - 2);
  ctx.save();
  ctx.translate(10, PAD.top + h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();
  ctx.textAlign = "left";
  return { w, h };
}

function polyline(ctx, dims, xs, ys, xmax, ymax, color, dash) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.6;
  ctx.setLineDash(dash);
  ctx.beginPath();
  for (let i = 0; i < xs.length; i++) {
    const x = PAD.left + (dims.w * xs[i]) / xmax;
    const y = PAD.top + dims.h * (1 - Math.max(0, ys[i]) / ymax);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  }
  ctx.stroke();
  ctx.setLineDash([]);
}

function bars(ctx, dims, values, ymax, color) {
  const n = values.length;
  const step = dims.w / n;
  ctx.fillStyle = color;
  for (let i = 0; i < n; i++) {
    const h = (dims.h * Math.max(0, values[i])) / ymax;
    ctx.fillRect(PAD.left + i * step + step * 0.15, PAD.top + dims.h - h, step * 0.7, h);
  }
}

function dots(ctx, dims, values, ymax, color) {
  const n = values.length;
  const step = dims.w / n;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.4;
  for (let i = 0; i < n; i++) {
    const y = PAD.top + dims.h * (1 - Math.max(0, values[i]) / ymax);
    ctx.beginPath();
    ctx.arc(PAD.left + (i + 0.5) * step, y, 3, 0, 2 * Math.PI);
    ctx.stroke();
  }
}

const COLORS = { qreal: "#0b66c3", qphase: "#c3560b", plain: "#3a3f47" };
const DASH = { solid: [], dashed: [7, 4], dotted: [2, 3] };

// ----------------------------------------------------------- curve panel

function drawCurvePanel() {
  const tauSq = parseFloat($("c-tausq").value);
  const n0 = parseFloat($("c-n0").value);
  const n20 = Math.max(parseFloat($("c-n20").value), n0 * n0);
  const tmax = parseFloat($("c-tmax").value);
  $("c-tausq-v").textContent = tauSq.toFixed(2);
  $("c-tmax-v").textContent = tmax.toFixed(1);

  const fam = JSON.parse(moment_curves(tauSq, n0, n20, tmax, 301));
  const t = fam.lambda_t;

  const cn = $("c-plot-n");
  let ctx = clear(cn);
  let ymax = Math.max(n0, ...fam.qphase_n) * 1.05 || 1;
  let dims = frame(ctx, cn, tmax, ymax, "lambda t", "<N>");
  polyline(ctx, dims, t, fam.qreal_n, tmax, ymax, COLORS.qreal, DASH.solid);
  polyline(ctx, dims, t, fam.qphase_n, tmax, ymax, COLORS.qphase, DASH.dashed);
  polyline(ctx, dims, t, fam.undeformed_n, tmax, ymax, COLORS.plain, DASH.dotted);

  const cn2 = $("c-plot-n2");
  ctx = clear(cn2);
  ymax = Math.max(n20, ...fam.qphase_n2) * 1.05 || 1;
  dims = frame(ctx, cn2, tmax, ymax, "lambda t", "<N^2>");
  polyline(ctx, dims, t, fam.qreal_n2, tmax, ymax, COLORS.qreal, DASH.solid);
  polyline(ctx, dims, t, fam.qphase_n2, tmax, ymax, COLORS.qphase, DASH.dashed);
  polyline(ctx, dims, t, fam.undeformed_n2, tmax, ymax, COLORS.plain, DASH.dotted);
}

// ------------------------------------------------------- trajectory panel

function trajectoryConfig() {
  const lambda = parseFloat($("t-lambda").value);
  const coth = parseFloat($("t-coth").value);
  const kind = $("t-kind").value;
  const tau = parseFloat($("t-tau").value);
  const dim = parseInt($("t-dim").value, 10);
  const n = Math.min(parseInt($("t-n").value, 10), dim - 1);
  const tfinal = parseFloat($("t-tfinal").value) / lambda;
  const config = {
    environment: { omega: 1.0, lambda, temperature: coth <= 1.0 ? "zero" : { coth } },
    deformation: kind === "none" ? { kind: "none" } : { kind, tau },
    fock_dim: dim,
    initial_state: { fock: n },
    t_final: tfinal,
    sample_every: 25,
  };
  return config;
}

function drawTrajectoryPanel() {
  const lambda = parseFloat($("t-lambda").value);
  $("t-tau-v").textContent = parseFloat($("t-tau").value).toFixed(2);
  $("t-coth-v").textContent = parseFloat($("t-coth").value).toFixed(1);
  $("t-lambda-v").textContent = lambda.toFixed(2);
  $("t-dim-v").textContent = $("t-dim").value;
  $("t-n-v").textContent = Math.min(
    parseInt($("t-n").value, 10),
    parseInt($("t-dim").value, 10) - 1
  );
  $("t-tfinal-v").textContent = parseFloat($("t-tfinal").value).toFixed(1);

  const config = trajectoryConfig();
  $("t-config").textContent = JSON.stringify(config, null, 2);
  let doc;
  try {
    doc = JSON.parse(run_trajectory(JSON.stringify(config)));
  } catch (e) {
    $("t-readout").innerHTML = `<span class="warn">${e}</span>`;
    return;
  }
  const rec = doc.records;
  const t = rec.map((r) => r.t * lambda);
  const meanN = rec.map((r) => r.mean_N);
  const meanN2 = rec.map((r) => r.mean_N2);
  const tmax = t[t.length - 1];

  const canvas = $("t-plot");
  const ctx = clear(canvas);
  const ymax = Math.max(...meanN2, 1) * 1.05;
  const dims = frame(ctx, canvas, tmax, ymax, "lambda t", "moments");
  polyline(ctx, dims, t, meanN, tmax, ymax, COLORS.qreal, DASH.solid);
  polyline(ctx, dims, t, meanN2, tmax, ymax, COLORS.qphase, DASH.solid);
  ctx.fillStyle = COLORS.qreal;
  ctx.fillText("<N>", PAD.left + 8, PAD.top + 14);
  ctx.fillStyle = COLORS.qphase;
  ctx.fillText("<N^2>", PAD.left + 8, PAD.top + 28);

  const pops = $("t-pops");
  const pctx = clear(pops);
  const p = doc.final_populations;
  const pmax = Math.max(...p, 1e-12) * 1.1;
  const pdims = frame(pctx, pops, p.length, pmax, "level n", "final P(n)");
  bars(pctx, pdims, p, pmax, "#7aa7d4");

  const last = rec[rec.length - 1];
  const minEig = Math.min(...rec.map((r) => r.min_eig));
  const traceDrift = Math.max(...rec.map((r) => Math.abs(r.trace - 1)));
  $("t-readout").innerHTML =
    `final &lang;N&rang; = ${last.mean_N.toFixed(6)} &middot; ` +
    `purity ${last.purity.toFixed(4)} &middot; ` +
    `trace drift ${traceDrift.toExponential(1)} &middot; ` +
    `min eigenvalue ${minEig.toExponential(1)} &middot; ` +
    `dt = ${doc.dt.toExponential(2)}` +
    (doc.leakage_flagged
      ? ' &middot; <span class="warn">truncation leakage; raise D</span>'
      : "");
}

// ----------------------------------------------------------- steady panel

function drawSteadyPanel() {
  const coth = parseFloat($("s-coth").value);
  const kind = $("s-kind").value;
  const tau = parseFloat($("s-tau").value);
  const dim = parseInt($("s-dim").value, 10);
  $("s-tau-v").textContent = tau.toFixed(2);
  $("s-coth-v").textContent = coth.toFixed(2);
  $("s-dim-v").textContent = dim;

  let doc;
  try {
    doc = JSON.parse(steady_distribution(0.25, coth, dim, kind, tau));
  } catch (e) {
    $("s-readout").innerHTML = `<span class="warn">${e}</span>`;
    return;
  }

  const canvas = $("s-plot");
  const ctx = clear(canvas);
  const ymax = Math.max(...doc.populations, ...doc.boltzmann) * 1.1;
  const dims = frame(ctx, canvas, dim, ymax, "level n", "P(n)");
  bars(ctx, dims, doc.populations, ymax, "#7aa7d4");
  dots(ctx, dims, doc.boltzmann, ymax, "#b3261e");

  const rcanvas = $("s-rates");
  const rctx = clear(rcanvas);
  const rmax = Math.max(...doc.rates_up, ...doc.rates_down, 1e-12) * 1.1;
  const rdims = frame(rctx, rcanvas, dim, rmax, "level n", "rates");
  bars(rctx, rdims, doc.rates_down, rmax, "#c3560b");
  dots(rctx, rdims, doc.rates_up, rmax, "#0b66c3");
  rctx.fillStyle = "#c3560b";
  rctx.fillText("t-(n) bars", PAD.left + 8, PAD.top + 14);
  rctx.fillStyle = "#0b66c3";
  rctx.fillText("t+(n) circles", PAD.left + 8, PAD.top + 28);

  $("s-readout").innerHTML =
    `ratio r = ${doc.ratio.toFixed(8)} &middot; ` +
    `detailed-balance residual ${doc.detailed_balance_residual.toExponential(1)}`;
}

// ------------------------------------------------------------------ wiring

function hookup(ids, handler) {
  for (const id of ids) {
    $(id).addEventListener("input", handler);
  }
  handler();
}

async function main() {
  await init();
  $("loading").hidden = true;
  for (const id of ["panel-curves", "panel-traj", "panel-steady"]) {
    $(id).hidden = false;
  }
  hookup(["c-tausq", "c-n0", "c-n20", "c-tmax"], drawCurvePanel);
  let pending = null;
  hookup(
    ["t-kind", "t-tau", "t-coth", "t-lambda", "t-dim", "t-n", "t-tfinal"],
    () => {
      // debounce: integrating is heavier than redrawing
      clearTimeout(pending);
      pending = setTimeout(drawTrajectoryPanel, 60);
    }
  );
  hookup(["s-kind", "s-tau", "s-coth", "s-dim"], drawSteadyPanel);
}

main().catch((e) => {
  $("loading").textContent = `failed to load wasm module: ${e}`;
});
