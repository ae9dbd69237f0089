//! The Pauli-twirled damped channel: conditional syndrome-extraction PTMs,
//! correction, syndrome averages and N-round decay.
//!
//! The conditional map at syndrome `mu` is
//!
//! ```text
//!   G_{a,a'}(mu) = 1/(pi n^2) sum_{b in S} s(a', b) Tr[sigma_a E_b^dag sigma_a' E_b]
//! ```
//!
//! with `E_b[j][k] = <j|N D(mu - h(b1 + i b2)) N|k>`, `h = sqrt(pi/2)`, `n` the
//! normalization of [`DampedKernel::norm_factor`] and `s` the sign table.
//! Averages integrate over a square window of SB bins with tensor
//! Gauss-Legendre panels aligned to the bin edges, so SB-type decoders are
//! constant on every panel.

use crate::decoders::{correction_score, BitVector, Decoder, Syndrome, TWIRL_SET};
use crate::exec::{pairwise_sum, Exec};
use crate::lattice_theta::{DampedKernel, DampingParams, DEFAULT_TOL};
use crate::qubit_channels::{avg_gate_fidelity, dagger2, mul2, Pauli, Ptm};
use crate::{Error, Result, C64, SHIFT};
use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::num::NonZeroUsize;

/// Signs `s(a', b)` multiplying the `b` term of the conditional PTM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignTable([[f64; 4]; 4]);

fn bit_index(b: BitVector) -> usize {
    2 * b.0 as usize + b.1 as usize
}

impl SignTable {
    /// `(-1)^(b1 a'_2 + b2 a'_1)`: the commutation sign of `sigma_a'` with the shift by `b`.
    pub fn commutation_rule() -> Self {
        let mut t = [[0.0; 4]; 4];
        for ap in Pauli::ALL {
            let (x, z) = ap.bits();
            for b in TWIRL_SET {
                let e = b.0 * z + b.1 * x;
                t[ap.index()][bit_index(b)] = if e % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
        Self(t)
    }

    pub fn sign(&self, ap: Pauli, b: BitVector) -> f64 {
        self.0[ap.index()][bit_index(b)]
    }

    /// Copy with one entry negated; used to exercise the validation failure path.
    pub fn with_flipped(mut self, ap: Pauli, b: BitVector) -> Self {
        self.0[ap.index()][bit_index(b)] *= -1.0;
        self
    }
}

impl Default for SignTable {
    fn default() -> Self {
        Self::commutation_rule()
    }
}

/// Closed-form conditional syndrome-extraction map at fixed beta.
#[derive(Debug, Clone)]
pub struct PtdKernel {
    kernel: DampedKernel,
    scale: f64,
    signs: SignTable,
}

impl PtdKernel {
    pub fn new(beta: f64) -> Result<Self> {
        Self::with_signs(beta, SignTable::default())
    }

    pub fn with_signs(beta: f64, signs: SignTable) -> Result<Self> {
        let kernel = DampedKernel::with_tol(DampingParams::new(beta)?, DEFAULT_TOL);
        let n = kernel.norm_factor();
        Ok(Self { kernel, scale: 1.0 / (PI * n * n), signs })
    }

    pub fn beta(&self) -> f64 {
        self.kernel.params().beta
    }

    pub fn damped(&self) -> &DampedKernel {
        &self.kernel
    }

    pub fn signs(&self) -> &SignTable {
        &self.signs
    }

    /// Conditional map before taking the real part.
    pub fn gamma_syn_complex(&self, s: &Syndrome) -> [[C64; 4]; 4] {
        let i = C64::new(0.0, 1.0);
        let mut g = [[C64::new(0.0, 0.0); 4]; 4];
        for b in TWIRL_SET {
            let gamma = s.mu() - C64::new(SHIFT * b.0 as f64, SHIFT * b.1 as f64);
            let e = self.kernel.block(gamma);
            let ed = dagger2(&e);
            for ap in Pauli::ALL {
                // sigma_a' E by row operations
                let se = match ap {
                    Pauli::I => e,
                    Pauli::X => [e[1], e[0]],
                    Pauli::Y => [e[1].map(|v| -i * v), e[0].map(|v| i * v)],
                    Pauli::Z => [e[0], e[1].map(|v| -v)],
                };
                let m = mul2(&ed, &se);
                let tr = [m[0][0] + m[1][1], m[0][1] + m[1][0], i * (m[0][1] - m[1][0]), m[0][0] - m[1][1]];
                let sgn = self.signs.sign(ap, b);
                for (a, t) in tr.iter().enumerate() {
                    g[a][ap.index()] += t * sgn;
                }
            }
        }
        for row in g.iter_mut() {
            for v in row.iter_mut() {
                *v *= self.scale;
            }
        }
        g
    }

    /// Conditional map and the largest discarded imaginary part.
    pub fn gamma_syn_with_imag(&self, s: &Syndrome) -> (Ptm, f64) {
        let g = self.gamma_syn_complex(s);
        let mut out = [[0.0; 4]; 4];
        let mut im: f64 = 0.0;
        for a in 0..4 {
            for ap in 0..4 {
                out[a][ap] = g[a][ap].re;
                im = im.max(g[a][ap].im.abs());
            }
        }
        (Ptm(out), im)
    }

    pub fn gamma_syn(&self, s: &Syndrome) -> Ptm {
        self.gamma_syn_with_imag(s).0
    }
}

pub fn gamma_syn_conditional(beta: f64, s: &Syndrome) -> Result<Ptm> {
    Ok(PtdKernel::new(beta)?.gamma_syn(s))
}

/// `Gamma_P * G` for the diagonal correction PTM of `P`.
pub fn apply_correction(p: Pauli, g: &Ptm) -> Ptm {
    let d = Ptm::pauli(p).diagonal();
    let mut out = g.0;
    for (a, row) in out.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v *= d[a];
        }
    }
    Ptm(out)
}

/// Corrected conditional map and the decoder's choice.
pub fn gamma_conditional(k: &PtdKernel, decoder: &Decoder, s: &Syndrome) -> (Ptm, Pauli) {
    let g = k.gamma_syn(s);
    let p = decoder.decide(s, &g);
    (apply_correction(p, &g), p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    GaussLegendre,
}

/// Tensor-product panel quadrature over a square window of SB bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Minimum number of bins on each side of the central one.
    pub radius_cells: usize,
    pub nodes_per_cell: usize,
    pub rule: Rule,
    /// Bound on the envelope mass left outside the window; grows the radius if needed.
    pub mass_tol: f64,
    /// Allowed max-entry change when the node count is doubled.
    pub conv_tol: f64,
    /// Bisection depth across lines whose sequence of decisions differs.
    pub max_depth: u32,
    pub certify: bool,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radius_cells: 3,
            nodes_per_cell: 16,
            rule: Rule::GaussLegendre,
            mass_tol: 1e-10,
            conv_tol: 1e-6,
            max_depth: 10,
            certify: true,
            exec: Exec::default(),
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radius_cells < 1 || self.nodes_per_cell < 1 {
            return Err(Error::Argument(format!(
                "quadrature needs radius_cells >= 1 and nodes_per_cell >= 1 (got {}, {})",
                self.radius_cells, self.nodes_per_cell
            )));
        }
        if !(self.mass_tol > 0.0 && self.mass_tol < 1.0 && self.conv_tol > 0.0) {
            return Err(Error::Argument("quadrature tolerances must be positive (mass_tol < 1)".into()));
        }
        Ok(())
    }

    /// Radius actually used at `beta`: the conditional maps decay like
    /// `exp(-tanh(beta) |mu|^2)`, whose mass outside a disc of radius `r` is
    /// `exp(-tanh(beta) r^2)`.
    pub fn radius_for(&self, beta: f64) -> usize {
        let r = ((1.0 / self.mass_tol).ln() / beta.tanh()).sqrt();
        let cells = (r / SHIFT - 0.5).ceil().max(0.0) as usize;
        cells.max(self.radius_cells)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtdQuery {
    pub beta: f64,
    pub decoder: Decoder,
    pub quadrature: QuadratureSpec,
}

impl PtdQuery {
    pub fn new(beta: f64, decoder: Decoder) -> Self {
        Self { beta, decoder, quadrature: QuadratureSpec::default() }
    }
}

/// An averaged channel with quadrature diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Averaged {
    pub ptm: Ptm,
    /// Max entry change between the base and doubled node counts (0 when not certified).
    pub refinement_delta: f64,
    pub radius_cells: usize,
    pub nodes_per_cell: usize,
    pub evaluations: usize,
    pub refined_panels: usize,
    pub max_imag: f64,
}

type Acc = [[f64; 4]; 4];

fn add_scaled(acc: &mut Acc, g: &Ptm, w: f64) {
    for (row, grow) in acc.iter_mut().zip(&g.0) {
        for (v, x) in row.iter_mut().zip(grow) {
            *v += w * x;
        }
    }
}

#[derive(Default, Clone, Copy)]
struct PanelStats {
    evals: usize,
    refined: usize,
    max_imag: f64,
}

impl PanelStats {
    fn merge(&mut self, o: &PanelStats) {
        self.evals += o.evals;
        self.refined += o.refined;
        self.max_imag = self.max_imag.max(o.max_imag);
    }
}

struct Sample {
    t: f64,
    weight: f64,
    g: Ptm,
    p: Pauli,
}

/// Panel integrator. Decoders that are constant on SB bins get a plain tensor
/// rule. Otherwise each panel is integrated line by line at fixed `m_q`: every
/// line is cut at the points where the decision switches, and the `m_q`
/// direction is bisected wherever the sequence of decisions along the line
/// changes.
struct Panels<'a> {
    k: &'a PtdKernel,
    decoder: &'a Decoder,
    rule: Vec<(f64, f64)>,
    /// Rule used on bisected strips.
    strip_rule: Vec<(f64, f64)>,
    /// Gauss-Legendre rules of every order up to the panel rule, for short pieces.
    piece_rules: Vec<Vec<(f64, f64)>>,
    refine_mass: f64,
    max_depth: u32,
}

const PROBE: f64 = 1e-9;

impl Panels<'_> {
    fn piece_rule(&self, n: usize) -> &[(f64, f64)] {
        &self.piece_rules[n - 1]
    }

    fn eval(&self, q: f64, p: f64, st: &mut PanelStats) -> (Ptm, Pauli) {
        let s = Syndrome::new(q, p);
        let (g, im) = self.k.gamma_syn_with_imag(&s);
        st.evals += 1;
        st.max_imag = st.max_imag.max(im);
        let d = self.decoder.decide(&s, &g);
        (g, d)
    }

    fn panel(&self, x0: f64, y0: f64, w: f64) -> (Acc, PanelStats) {
        let mut st = PanelStats::default();
        let acc = if self.decoder.constant_on_bins() { self.tensor(x0, y0, w, &mut st) } else { self.strip(x0, w, y0, w, 0, &mut st) };
        (acc, st)
    }

    fn tensor(&self, x0: f64, y0: f64, w: f64, st: &mut PanelStats) -> Acc {
        let mut parts = Vec::with_capacity(self.rule.len());
        for &(xq, wq) in &self.rule {
            let mut acc = [[0.0; 4]; 4];
            for &(xp, wp) in &self.rule {
                let (g, d) = self.eval(x0 + 0.5 * w * (xq + 1.0), y0 + 0.5 * w * (xp + 1.0), st);
                add_scaled(&mut acc, &apply_correction(d, &g), 0.25 * w * w * wq * wp);
            }
            parts.push(acc);
        }
        pairwise_sum(&parts)
    }

    /// Integral over `[x0, x0 + wx] x [y0, y0 + wy]` by lines of constant `m_q`.
    fn strip(&self, x0: f64, wx: f64, y0: f64, wy: f64, depth: u32, st: &mut PanelStats) -> Acc {
        let rule = if depth == 0 { &self.rule } else { &self.strip_rule };
        let mut parts = Vec::with_capacity(rule.len());
        let mut patterns = Vec::with_capacity(rule.len() + 2);
        let mut mass = 0.0;
        for &(xq, wq) in rule {
            let (mut acc, pat) = self.line(x0 + 0.5 * wx * (xq + 1.0), y0, wy, st);
            let wt = 0.5 * wx * wq;
            for row in acc.iter_mut() {
                for v in row.iter_mut() {
                    *v *= wt;
                }
            }
            mass += acc[0][0].abs();
            parts.push(acc);
            patterns.push(pat);
        }
        if depth < self.max_depth && mass > self.refine_mass {
            patterns.push(pattern(&self.samples(x0 + PROBE * wx, y0, wy, st)));
            patterns.push(pattern(&self.samples(x0 + (1.0 - PROBE) * wx, y0, wy, st)));
            if patterns.windows(2).any(|w| w[0] != w[1]) {
                st.refined += 1;
                let h = 0.5 * wx;
                let a = self.strip(x0, h, y0, wy, depth + 1, st);
                let b = self.strip(x0 + h, h, y0, wy, depth + 1, st);
                return pairwise_sum(&[a, b]);
            }
        }
        pairwise_sum(&parts)
    }

    /// Rule nodes on the line plus two probes just inside its ends, in order.
    fn samples(&self, q: f64, y0: f64, wy: f64, st: &mut PanelStats) -> Vec<Sample> {
        let mut out = Vec::with_capacity(self.rule.len() + 2);
        let mut push = |t: f64, weight: f64, st: &mut PanelStats| {
            let (g, p) = self.eval(q, t, st);
            out.push(Sample { t, weight, g, p });
        };
        push(y0 + PROBE * wy, 0.0, st);
        for &(x, w) in &self.rule {
            push(y0 + 0.5 * wy * (x + 1.0), 0.5 * wy * w, st);
        }
        push(y0 + (1.0 - PROBE) * wy, 0.0, st);
        out
    }

    fn line(&self, q: f64, y0: f64, wy: f64, st: &mut PanelStats) -> (Acc, Vec<Pauli>) {
        let smp = self.samples(q, y0, wy, st);
        let pat = pattern(&smp);
        let mut acc = [[0.0; 4]; 4];
        if pat.len() == 1 {
            for s in &smp {
                add_scaled(&mut acc, &apply_correction(s.p, &s.g), s.weight);
            }
            return (acc, pat);
        }
        let mut cuts = vec![(y0, smp[0].p)];
        for w in smp.windows(2) {
            if w[0].p != w[1].p {
                self.switches(q, w[0].t, w[0].p, w[1].t, w[1].p, 0, st, &mut cuts);
            }
        }
        let end = y0 + wy;
        let pieces: Vec<(f64, f64, Pauli)> =
            cuts.iter().enumerate().map(|(i, &(a, d))| (a, cuts.get(i + 1).map_or(end, |c| c.0), d)).filter(|(a, b, _)| b > a).collect();
        // whole line under the dominant decision, reusing the samples, plus
        // the difference on the other pieces
        let mut len = [0.0; 4];
        for &(a, b, d) in &pieces {
            len[d.index()] += b - a;
        }
        let main = Pauli::from_index((0..4).max_by(|&i, &j| len[i].total_cmp(&len[j])).unwrap_or(0));
        for s in &smp {
            add_scaled(&mut acc, &apply_correction(main, &s.g), s.weight);
        }
        let dmain = Ptm::pauli(main).diagonal();
        for &(a, b, d) in &pieces {
            if d == main {
                continue;
            }
            let dd = Ptm::pauli(d).diagonal();
            let nodes = ((self.rule.len() as f64 * (b - a) / wy).ceil() as usize).max(4).min(self.rule.len());
            for &(x, w) in self.piece_rule(nodes) {
                let (g, _) = self.eval(q, a + 0.5 * (b - a) * (x + 1.0), st);
                let wt = 0.5 * (b - a) * w;
                for (r, row) in acc.iter_mut().enumerate() {
                    let f = wt * (dd[r] - dmain[r]);
                    if f != 0.0 {
                        for (v, x) in row.iter_mut().zip(&g.0[r]) {
                            *v += f * x;
                        }
                    }
                }
            }
        }
        (acc, pat)
    }

    /// Appends the switch points in `(a, b)` where the decision goes from `da`
    /// towards `db`, each with the decision that follows it.
    #[allow(clippy::too_many_arguments)]
    fn switches(&self, q: f64, a: f64, da: Pauli, b: f64, db: Pauli, depth: u32, st: &mut PanelStats, cuts: &mut Vec<(f64, Pauli)>) {
        let width = b - a;
        if let Decoder::Optimal = self.decoder {
            let r = self.score_root(q, a, da, b, db, st);
            let d = PROBE * width.max(1e-3);
            let (lo, hi) = ((r - d).max(a), (r + d).min(b));
            if self.eval(q, lo, st).1 == da && self.eval(q, hi, st).1 == db {
                cuts.push((r, db));
                return;
            }
        }
        // first switch away from da, by bisection on the decision itself
        let (mut lo, mut hi) = (a, b);
        let mut dh = db;
        for _ in 0..50 {
            let m = 0.5 * (lo + hi);
            let dm = self.eval(q, m, st).1;
            if dm == da {
                lo = m;
            } else {
                hi = m;
                dh = dm;
            }
            if hi - lo <= 1e-14 * width.max(1.0) {
                break;
            }
        }
        cuts.push((hi, dh));
        if dh != db && depth < 4 {
            self.switches(q, hi, dh, b, db, depth + 1, st, cuts);
        }
    }

    /// Root of `score(da) - score(db)` in `[a, b]` by the Illinois variant of regula falsi.
    fn score_root(&self, q: f64, a: f64, da: Pauli, b: f64, db: Pauli, st: &mut PanelStats) -> f64 {
        let f = |t: f64, st: &mut PanelStats| {
            let (g, _) = self.eval(q, t, st);
            correction_score(da, &g) - correction_score(db, &g)
        };
        let (mut a, mut b) = (a, b);
        let (mut fa, mut fb) = (f(a, st), f(b, st));
        if fa == 0.0 {
            return a;
        }
        if fb == 0.0 || fa.signum() == fb.signum() {
            return 0.5 * (a + b);
        }
        let mut side = 0;
        for _ in 0..60 {
            let mut c = (a * fb - b * fa) / (fb - fa);
            if !(c > a && c < b) {
                c = 0.5 * (a + b);
            }
            let fc = f(c, st);
            if fc == 0.0 {
                return c;
            }
            if fc.signum() == fa.signum() {
                a = c;
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
            if b - a <= 1e-13 * (1.0 + a.abs()) {
                break;
            }
        }
        0.5 * (a + b)
    }
}

fn pattern(smp: &[Sample]) -> Vec<Pauli> {
    let mut out: Vec<Pauli> = Vec::new();
    for s in smp {
        if out.last() != Some(&s.p) {
            out.push(s.p);
        }
    }
    out
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(n).expect("node count >= 1")).as_node_weight_pairs().to_vec()
}

fn average_with(k: &PtdKernel, decoder: &Decoder, spec: &QuadratureSpec, nodes: usize) -> Result<Averaged> {
    let radius = spec.radius_for(k.beta());
    let rule = match spec.rule {
        Rule::GaussLegendre => gauss_legendre(nodes),
    };
    let strip_rule = gauss_legendre(nodes.div_ceil(2).max(4).min(nodes));
    let piece_rules = if decoder.constant_on_bins() { Vec::new() } else { (1..=nodes).map(gauss_legendre).collect() };
    let panels = Panels { k, decoder, rule, strip_rule, piece_rules, refine_mass: 0.1 * spec.conv_tol, max_depth: spec.max_depth };
    let side = 2 * radius + 1;
    let out = spec.exec.map(side * side, |idx| {
        let i = (idx / side) as f64 - radius as f64;
        let j = (idx % side) as f64 - radius as f64;
        panels.panel((i - 0.5) * SHIFT, (j - 0.5) * SHIFT, SHIFT)
    });
    let parts: Vec<_> = out.iter().map(|(v, _)| *v).collect();
    let mut stats = PanelStats::default();
    for (_, s) in &out {
        stats.merge(s);
    }
    Ok(Averaged {
        ptm: Ptm(pairwise_sum(&parts)),
        refinement_delta: 0.0,
        radius_cells: radius,
        nodes_per_cell: nodes,
        evaluations: stats.evals,
        refined_panels: stats.refined,
        max_imag: stats.max_imag,
    })
}

/// Syndrome-averaged channel using a prepared kernel. With certification on,
/// the rule is rerun with twice the nodes per panel and the finer result is
/// returned.
pub fn average(k: &PtdKernel, decoder: &Decoder, spec: &QuadratureSpec) -> Result<Averaged> {
    spec.validate()?;
    let base = average_with(k, decoder, spec, spec.nodes_per_cell)?;
    if !spec.certify {
        return Ok(base);
    }
    let fine = average_with(k, decoder, spec, 2 * spec.nodes_per_cell)?;
    let delta = fine.ptm.max_abs_diff(&base.ptm);
    if !(delta <= spec.conv_tol) {
        return Err(Error::Convergence(format!(
            "beta {}: doubling the nodes per cell ({} -> {}) changes the PTM by {delta:e} > {:e}; \
             raise nodes_per_cell or radius_cells",
            k.beta(),
            spec.nodes_per_cell,
            fine.nodes_per_cell,
            spec.conv_tol
        )));
    }
    Ok(Averaged { refinement_delta: delta, evaluations: fine.evaluations + base.evaluations, ..fine })
}

pub fn gamma_avg(q: &PtdQuery) -> Result<Averaged> {
    average(&PtdKernel::new(q.beta)?, &q.decoder, &q.quadrature)
}

/// Closed-form syndrome average without correction: only the first column
/// survives, `(1, c, 0, c)` with `c = (2/n) Tr[N X N]`.
pub fn gamma_syn_avg_analytic(beta: f64) -> Result<Ptm> {
    let k = DampedKernel::new(DampingParams::new(beta)?);
    let n = k.norm_factor();
    let mut g = [[0.0; 4]; 4];
    for a in Pauli::ALL {
        g[a.index()][0] = 2.0 * k.pauli_trace(a) / n;
    }
    Ok(Ptm(g))
}

/// `F(N) = 1/2 + a exp(b N)`, fitted on `log(F - 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub a: f64,
    pub b: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
}

impl DecayFit {
    pub fn eval(&self, n: f64) -> f64 {
        0.5 + self.a * (self.b * n).exp()
    }
}

pub fn fit_decay(points: &[(u32, f64)]) -> Result<DecayFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 rounds to fit a decay, got {}", points.len())));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(n, f) in points {
        if !(f - 0.5 > 0.0) {
            return Err(Error::Fit(format!("F({n}) = {f} is not above 1/2; the channel is over-truncated")));
        }
        xs.push(n as f64);
        ys.push((f - 0.5).ln());
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let ln_a = my - b * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - ln_a - b * x).powi(2)).sum();
    Ok(DecayFit { a: ln_a.exp(), b, residual: (ss / m).sqrt() })
}

/// `F_avg(G^N)` for `N = 1..=n_max`.
pub fn n_round_curve(g: &Ptm, n_max: u32) -> Vec<(u32, f64)> {
    let mut out = Vec::with_capacity(n_max as usize);
    let mut acc = Ptm::identity();
    for n in 1..=n_max {
        acc = crate::qubit_channels::compose(g, &acc);
        out.push((n, avg_gate_fidelity(&acc)));
    }
    out
}

pub fn n_round_fidelity_of(g: &Ptm, n_max: u32) -> Result<(Vec<(u32, f64)>, DecayFit)> {
    if n_max < 2 {
        return Err(Error::Fit(format!("n_max must be >= 2 to fit a decay (got {n_max})")));
    }
    let pts = n_round_curve(g, n_max);
    let fit = fit_decay(&pts)?;
    Ok((pts, fit))
}

pub fn n_round_fidelity(q: &PtdQuery, n_max: u32) -> Result<(Vec<(u32, f64)>, DecayFit)> {
    if n_max < 2 {
        return Err(Error::Fit(format!("n_max must be >= 2 to fit a decay (got {n_max})")));
    }
    n_round_fidelity_of(&gamma_avg(q)?.ptm, n_max)
}
