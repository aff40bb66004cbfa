import init, { gamma_curve, gain_vs_n, squeezing_moments } from './pkg/ramsey_wasm_demo.js';

const COLORS = { white: '#555', gaussian: '#1f77b4', linear: '#2ca02c', ohmic: '#d62728' };
const KINDS = Object.keys(COLORS);

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function logspace(lo, hi, n) {
  const a = Math.log(lo), b = Math.log(hi);
  return Array.from({ length: n }, (_, i) => Math.exp(a + (b - a) * i / (n - 1)));
}

function evenLogGrid(lo, hi, n) {
  const out = [];
  for (const x of logspace(lo, hi, n)) {
    const k = Math.max(2, 2 * Math.round(x / 2));
    if (!out.includes(k)) out.push(k);
  }
  return out;
}

// Axes: { logX, logY, xLabel, yLabel }; series: [{ xs, ys, color }].
function plot(canvas, series, axes) {
  const ctx = canvas.getContext('2d');
  const W = canvas.width, H = canvas.height, L = 70, R = 20, T = 15, B = 45;
  ctx.clearRect(0, 0, W, H);
  const tx = (v) => (axes.logX ? Math.log10(v) : v);
  const ty = (v) => (axes.logY ? Math.log10(v) : v);
  const pts = series.flatMap((s) => s.xs.map((x, i) => [tx(x), ty(s.ys[i])])).filter(([x, y]) => isFinite(x) && isFinite(y));
  if (pts.length === 0) return;
  let [x0, x1] = [Math.min(...pts.map((p) => p[0])), Math.max(...pts.map((p) => p[0]))];
  let [y0, y1] = [Math.min(...pts.map((p) => p[1])), Math.max(...pts.map((p) => p[1]))];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) { y0 -= 0.5; y1 += 0.5; }
  const pad = 0.05 * (y1 - y0);
  y0 -= pad; y1 += pad;
  const px = (x) => L + (W - L - R) * (x - x0) / (x1 - x0);
  const py = (y) => H - B - (H - T - B) * (y - y0) / (y1 - y0);

  ctx.strokeStyle = '#999';
  ctx.strokeRect(L, T, W - L - R, H - T - B);
  ctx.fillStyle = '#333';
  ctx.font = '12px system-ui, sans-serif';
  ctx.textAlign = 'center';
  for (let i = 0; i <= 5; i++) {
    const x = x0 + (x1 - x0) * i / 5;
    ctx.fillText(fmt(axes.logX ? 10 ** x : x), px(x), H - B + 16);
  }
  ctx.fillText(axes.xLabel, (L + W - R) / 2, H - 8);
  ctx.textAlign = 'right';
  for (let i = 0; i <= 4; i++) {
    const y = y0 + (y1 - y0) * i / 4;
    ctx.fillText(fmt(axes.logY ? 10 ** y : y), L - 6, py(y) + 4);
  }
  ctx.save();
  ctx.translate(14, (T + H - B) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.textAlign = 'center';
  ctx.fillText(axes.yLabel, 0, 0);
  ctx.restore();

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    let started = false;
    s.xs.forEach((x, i) => {
      const X = tx(x), Y = ty(s.ys[i]);
      if (!isFinite(X) || !isFinite(Y)) { started = false; return; }
      if (started) ctx.lineTo(px(X), py(Y)); else ctx.moveTo(px(X), py(Y));
      started = true;
    });
    ctx.stroke();
  }
}

function fmt(v) {
  if (v === 0) return '0';
  const a = Math.abs(v);
  return a >= 1e4 || a < 1e-2 ? v.toExponential(1) : Number(v.toPrecision(3)).toString();
}

function guarded(statusId, f) {
  return () => {
    $(statusId).textContent = '';
    try { f(); } catch (e) { $(statusId).textContent = e.message ?? String(e); }
  };
}

function runGamma() {
  const a = num('g-a'), sigma = num('g-sigma');
  const taus = logspace(num('g-lo') / sigma, num('g-hi') / sigma, 120);
  const series = KINDS.map((k) => ({ xs: taus, ys: Array.from(gamma_curve(k, a, sigma, new Float64Array(taus))), color: COLORS[k] }));
  plot($('g-plot'), series, { logX: true, logY: true, xLabel: 'τ', yLabel: 'γ(τ)' });
  $('g-legend').innerHTML = KINDS.map((k) => `<span style="color:${COLORS[k]}">■ ${k}</span>`).join('');
}

function runGain() {
  const ns = evenLogGrid(2, Math.max(2, num('n-max')), 12);
  const kind = $('n-kind').value;
  const flat = gain_vs_n(kind, num('n-a'), num('n-sigma'), $('n-family').value, num('n-t'), new Uint32Array(ns));
  const rows = ns.map((n, i) => ({ n, r: flat[5 * i], tau: flat[5 * i + 1], s: flat[5 * i + 2], db: flat[5 * i + 3], sep: flat[5 * i + 4] }));
  plot($('n-plot'), [{ xs: ns, ys: rows.map((r) => r.r), color: COLORS[kind] }], { logX: true, logY: false, xLabel: 'N', yLabel: 'gain r' });
  $('n-table').innerHTML = '<tr><th>N</th><th>r</th><th>τ_opt</th><th>squeeze_opt</th><th>Δb</th><th>Δb separable</th></tr>'
    + rows.map((r) => `<tr><td>${r.n}</td><td>${r.r.toFixed(4)}</td><td>${fmt(r.tau)}</td><td>${fmt(r.s)}</td><td>${fmt(r.db)}</td><td>${fmt(r.sep)}</td></tr>`).join('');
}

function runMoments() {
  const params = logspace(num('m-lo'), num('m-hi'), 60);
  const flat = squeezing_moments($('m-family').value, num('m-n'), new Float64Array(params));
  const xi = params.map((_, i) => flat[4 * i + 3]);
  plot($('m-plot'), [{ xs: params, ys: xi, color: '#9467bd' }], { logX: true, logY: true, xLabel: 'squeezing parameter', yLabel: 'ξ = √N ΔJ_y / |⟨J_z⟩|' });
}

await init();
$('g-run').onclick = guarded('g-status', runGamma);
$('n-run').onclick = guarded('n-status', runGain);
$('m-run').onclick = guarded('m-status', runMoments);
guarded('g-status', runGamma)();
guarded('m-status', runMoments)();
