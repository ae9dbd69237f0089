//! Truncated Fock-space construction of damped codewords and displacements.
//!
//! Everything here is brute force and independent of the theta-function path
//! in [`crate::lattice_theta`]; the two are compared through ratios so the
//! delta-comb normalization of the ideal codewords drops out.

use crate::decoders::{BitVector, TWIRL_SET};
use crate::exec::Exec;
use crate::lattice_theta::{mixture_probabilities, DampedKernel, DampingParams};
use crate::ptd_channel::SignTable;
use crate::qubit_channels::Pauli;
use crate::{Error, Result, C64, SHIFT, SQRT_PI};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Extra Fock levels computed beyond `n_max` to measure the truncated tail.
const TAIL_PROBE: usize = 200;
pub const TAIL_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-8;
pub const RATIO_TOL: f64 = 1e-6;
/// Extra rows kept when displacing a codeword by a twirl shift (`|alpha| <= sqrt(pi)`).
const SHIFT_ROWS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q_range: (f64, f64),
    pub p_range: (f64, f64),
    pub resolution: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { q_range: (-6.0, 6.0), p_range: (-6.0, 6.0), resolution: 121 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.1 > r.0;
        if !ok(self.q_range) || !ok(self.p_range) || self.resolution < 2 {
            return Err(Error::Argument(format!("bad raster grid {self:?}")));
        }
        Ok(())
    }

    pub fn q(&self, i: usize) -> f64 {
        lerp(self.q_range, i, self.resolution)
    }

    pub fn p(&self, i: usize) -> f64 {
        lerp(self.p_range, i, self.resolution)
    }
}

fn lerp(r: (f64, f64), i: usize, n: usize) -> f64 {
    r.0 + (r.1 - r.0) * i as f64 / (n - 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockConfig {
    pub n_max: usize,
    /// Position peaks `(2n + j) sqrt(pi)` are kept for `|n| <= peak_range` (one more on the negative side for `j = 1`).
    pub peak_range: usize,
    pub grid: GridSpec,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self { n_max: 260, peak_range: 8, grid: GridSpec::default() }
    }
}

/// Harmonic-oscillator eigenfunctions `psi_0(x) .. psi_n(x)` by the three-term recurrence.
pub fn hermite_functions(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n >= 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for k in 1..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * x * out[k] - (k as f64 / (k + 1) as f64).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

fn peaks(j: u8, range: usize) -> impl Iterator<Item = f64> {
    let r = range as i64;
    let lo = if j == 0 { -r } else { -r - 1 };
    (lo..=r).map(move |n| (2 * n + j as i64) as f64 * SQRT_PI)
}

fn raw_codeword(beta: f64, j: u8, peak_range: usize, dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    for s in peaks(j, peak_range) {
        for (c, h) in v.iter_mut().zip(hermite_functions(s, dim - 1)) {
            *c += h;
        }
    }
    for (n, c) in v.iter_mut().enumerate() {
        *c *= (-beta * n as f64).exp();
    }
    v
}

/// Fraction of the population of `v` above `n_max`.
fn tail_fraction(v: &[f64], n_max: usize) -> f64 {
    let total: f64 = v.iter().map(|x| x * x).sum();
    let tail: f64 = v[n_max + 1..].iter().map(|x| x * x).sum();
    tail / total
}

/// Unnormalized damped codeword `e^{-beta n} |j>` on levels `0..=n_max`.
pub fn build_damped_codeword(beta: f64, j: u8, cfg: &FockConfig) -> Result<Vec<f64>> {
    DampingParams::new(beta)?;
    if j > 1 {
        return Err(Error::Argument(format!("codeword label must be 0 or 1 (got {j})")));
    }
    let long = raw_codeword(beta, j, cfg.peak_range, cfg.n_max + 1 + TAIL_PROBE);
    // amplitudes, not populations, enter matrix elements linearly
    let tail = tail_fraction(&long, cfg.n_max).sqrt();
    if !(tail <= TAIL_TOL) {
        return Err(Error::Cutoff(format!(
            "damped codeword at beta {beta} has relative amplitude {tail:e} above n_max {}; raise --nmax-fock",
            cfg.n_max
        )));
    }
    let mut v = long;
    v.truncate(cfg.n_max + 1);
    Ok(v)
}

/// Normalized Laguerre functions `f_n = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^(k)(x)` for `n < len`.
fn laguerre_diagonal(x: f64, k: usize, len: usize) -> Vec<f64> {
    let mut f = Vec::with_capacity(len);
    if len == 0 {
        return f;
    }
    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    let f0 = if k == 0 {
        (-0.5 * x).exp()
    } else if x == 0.0 {
        0.0
    } else {
        (0.5 * k as f64 * x.ln() - 0.5 * x - 0.5 * ln_fact).exp()
    };
    f.push(f0);
    if len > 1 {
        f.push((1.0 + k as f64 - x) * f0 / ((k + 1) as f64).sqrt());
    }
    for n in 1..len.saturating_sub(1) {
        let (nf, kf) = (n as f64, k as f64);
        let next = ((2.0 * nf + 1.0 + kf - x) * f[n] - (nf * (nf + kf)).sqrt() * f[n - 1]) / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
        f.push(next);
    }
    f
}

/// Rows `0..rows` by columns `0..cols` of `D(alpha)`, row-major, from
/// `<m|D|n> = sqrt(n!/m!) alpha^(m-n) e^{-|alpha|^2/2} L_n^(m-n)(|alpha|^2)` for `m >= n`
/// and its adjoint counterpart above the diagonal.
pub fn displacement_block(alpha: C64, rows: usize, cols: usize) -> Vec<Vec<C64>> {
    let x = alpha.norm_sqr();
    let u = if x > 0.0 { alpha / alpha.norm() } else { C64::new(1.0, 0.0) };
    let mut d = vec![vec![C64::new(0.0, 0.0); cols]; rows];
    for k in 0..rows {
        let ph = u.powu(k as u32);
        for (n, f) in laguerre_diagonal(x, k, cols.min(rows - k)).into_iter().enumerate() {
            d[n + k][n] = ph * f;
        }
    }
    let w = -u.conj();
    for k in 1..cols {
        let ph = w.powu(k as u32);
        for (m, f) in laguerre_diagonal(x, k, rows.min(cols - k)).into_iter().enumerate() {
            d[m][m + k] = ph * f;
        }
    }
    d
}

/// `exp(alpha a^dag - alpha^* a)` on levels `0..=n_max`.
///
/// Each entry is the exact infinite-dimensional matrix element; truncation
/// only drops rows, which shows up as a unitarity defect on the low columns.
pub fn displacement_matrix(alpha: C64, n_max: usize) -> Result<Vec<Vec<C64>>> {
    let dim = n_max + 1;
    let d = displacement_block(alpha, dim, dim);
    let defect = unitarity_defect(&d, dim / 2);
    if !(defect <= UNITARITY_TOL) {
        return Err(Error::Cutoff(format!(
            "displacement {alpha} at n_max {n_max}: unitarity defect {defect:e} on the low block; raise --nmax-fock"
        )));
    }
    Ok(d)
}

fn unitarity_defect(d: &[Vec<C64>], low: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..low {
        for b in 0..=a {
            let g: C64 = d.iter().map(|row| row[a].conj() * row[b]).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - want).norm());
        }
    }
    worst
}

/// `D(alpha) v` keeping `rows` output levels.
pub fn displace_vector(alpha: C64, v: &[C64], rows: usize) -> Vec<C64> {
    displacement_block(alpha, rows, v.len()).iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn real_to_complex(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn inner(u: &[C64], w: &[C64]) -> C64 {
    u.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Damped codewords built once per `(beta, cfg)`.
#[derive(Debug, Clone)]
pub struct FockCode {
    pub beta: f64,
    pub cfg: FockConfig,
    words: [Vec<C64>; 2],
}

impl FockCode {
    pub fn new(beta: f64, cfg: &FockConfig) -> Result<Self> {
        let w0 = real_to_complex(&build_damped_codeword(beta, 0, cfg)?);
        let w1 = real_to_complex(&build_damped_codeword(beta, 1, cfg)?);
        Ok(Self { beta, cfg: *cfg, words: [w0, w1] })
    }

    pub fn word(&self, j: u8) -> &[C64] {
        &self.words[j as usize]
    }

    /// `v_j^dag D(gamma) v_k`.
    pub fn element(&self, gamma: C64, j: u8, k: u8) -> Result<C64> {
        let d = displacement_matrix(gamma, self.cfg.n_max)?;
        let vk = self.word(k);
        let dv: Vec<C64> = d.iter().map(|row| row.iter().zip(vk).map(|(a, b)| a * b).sum()).collect();
        Ok(inner(self.word(j), &dv))
    }

    /// Gram matrix `v_j^dag v_k`, i.e. `<j|e^{-2 beta n}|k>` for the ideal codewords.
    pub fn gram(&self) -> [[f64; 2]; 2] {
        let g = |j, k| inner(self.word(j), self.word(k)).re;
        [[g(0, 0), g(0, 1)], [g(1, 0), g(1, 1)]]
    }

    /// `Tr[sigma_a G]` over the codeword Gram matrix.
    pub fn pauli_trace(&self, a: Pauli) -> f64 {
        let g = self.gram();
        match a {
            Pauli::I => g[0][0] + g[1][1],
            Pauli::X => g[0][1] + g[1][0],
            Pauli::Y => 0.0,
            Pauli::Z => g[0][0] - g[1][1],
        }
    }
}

pub fn oracle_damped_element(beta: f64, gamma: C64, j: u8, k: u8, cfg: &FockConfig) -> Result<C64> {
    FockCode::new(beta, cfg)?.element(gamma, j, k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub beta: f64,
    pub n_max: usize,
    /// Displacements compared, as `[re, im]`.
    pub grid: Vec<[f64; 2]>,
    pub max_rel_dev: f64,
    pub passed: bool,
}

/// Below this magnitude (relative to the reference element) deviations are taken absolutely.
const RATIO_FLOOR: f64 = 1e-6;

/// Points of an `n x n` grid on `[-2 sqrt(pi), 2 sqrt(pi)]^2` with `|gamma| <= 2 sqrt(pi)`.
pub fn gamma_grid(n: usize) -> Vec<C64> {
    let reach = 2.0 * SQRT_PI;
    let r = (-reach, reach);
    let mut g = Vec::new();
    for i in 0..n {
        for k in 0..n {
            let z = C64::new(lerp(r, i, n), lerp(r, k, n));
            if z.norm() <= reach * (1.0 + 1e-12) {
                g.push(z);
            }
        }
    }
    g
}

/// Compares `element(gamma, j, k) / element(0, 0, 0)` between the Fock oracle and the theta path.
pub fn ratio_check(beta: f64, gammas: &[C64], cfg: &FockConfig, exec: Exec) -> Result<OracleReport> {
    let code = FockCode::new(beta, cfg)?;
    let theta = DampedKernel::new(DampingParams::new(beta)?);
    let zero = C64::new(0.0, 0.0);
    let o_ref = code.element(zero, 0, 0)?;
    let t_ref = theta.element(zero, 0, 0);
    let devs = exec.map(gammas.len(), |i| -> Result<f64> {
        let g = gammas[i];
        // entries are exact, so only the codeword tails limit <v_j|D|v_k>
        let mut worst: f64 = 0.0;
        for k in 0..2u8 {
            let dv = displace_vector(g, code.word(k), cfg.n_max + 1);
            for j in 0..2u8 {
                let ro = inner(code.word(j), &dv) / o_ref;
                let rt = theta.element(g, j, k) / t_ref;
                worst = worst.max((ro - rt).norm() / rt.norm().max(RATIO_FLOOR));
            }
        }
        Ok(worst)
    });
    let mut max_rel_dev: f64 = 0.0;
    for d in devs {
        max_rel_dev = max_rel_dev.max(d?);
    }
    Ok(OracleReport {
        beta,
        n_max: cfg.n_max,
        grid: gammas.iter().map(|g| [g.re, g.im]).collect(),
        max_rel_dev,
        passed: max_rel_dev <= RATIO_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCase {
    pub pauli: char,
    pub shift: (u8, u8),
    pub measured: f64,
    pub expected: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub beta: f64,
    pub cases: Vec<SignCase>,
    pub passed: bool,
}

fn shift_of(b: BitVector) -> C64 {
    C64::new(SHIFT * b.0 as f64, SHIFT * b.1 as f64)
}

/// Conjugates each logical Pauli displacement by each twirl shift in Fock
/// space and reads off the sign on the codewords; mismatches against `table`
/// are reported and make the call fail.
pub fn validate_sign_rule(beta: f64, cfg: &FockConfig, table: &SignTable) -> Result<SignReport> {
    let code = FockCode::new(beta, cfg)?;
    let rows = cfg.n_max + 1;
    let mut cases = Vec::new();
    for ap in Pauli::ALL {
        let (x, z) = ap.bits();
        let a = shift_of(BitVector(x, z));
        // codeword pair carrying the largest matrix element of sigma_a'
        let (j, k) = if x == 1 { (1u8, 0u8) } else { (0, 0) };
        let plain = inner(code.word(j), &displace_vector(a, code.word(k), rows));
        for b in TWIRL_SET {
            let s = shift_of(b);
            let w = displace_vector(s, code.word(k), rows);
            let w = displace_vector(a, &w, rows);
            let w = displace_vector(-s, &w, rows);
            let r = inner(code.word(j), &w) / plain;
            let expected = table.sign(ap, b);
            let ok = (r - expected).norm() <= RATIO_TOL;
            cases.push(SignCase { pauli: ap.label(), shift: (b.0, b.1), measured: r.re, expected, ok });
        }
    }
    let passed = cases.iter().all(|c| c.ok);
    let report = SignReport { beta, cases, passed };
    if !passed {
        let bad: Vec<String> = report
            .cases
            .iter()
            .filter(|c| !c.ok)
            .map(|c| format!("{} by {:?}: measured {:+.6}, table {:+}", c.pauli, c.shift, c.measured, c.expected))
            .collect();
        return Err(Error::Oracle(format!("sign rule mismatch: {}", bad.join("; "))));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub spec: GridSpec,
    /// `values[iq][ip]`, normalized so the integral over phase space is one.
    pub values: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl WignerGrid {
    pub fn total(&self) -> f64 {
        let (dq, dp) = self.steps();
        self.values.iter().flatten().sum::<f64>() * dq * dp
    }

    pub fn steps(&self) -> (f64, f64) {
        let n = (self.spec.resolution - 1) as f64;
        ((self.spec.q_range.1 - self.spec.q_range.0) / n, (self.spec.p_range.1 - self.spec.p_range.0) / n)
    }

    /// Position marginal by the trapezoid rule over `p`.
    pub fn q_marginal(&self) -> Vec<f64> {
        let (_, dp) = self.steps();
        self.values
            .iter()
            .map(|row| {
                let n = row.len();
                dp * (row.iter().sum::<f64>() - 0.5 * (row[0] + row[n - 1]))
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("q,p,w\n");
        for (i, row) in self.values.iter().enumerate() {
            for (k, w) in row.iter().enumerate() {
                s.push_str(&format!("{:.10e},{:.10e},{:.10e}\n", self.spec.q(i), self.spec.p(k), w));
            }
        }
        s
    }
}

/// Mixed state as `(weight, unnormalized Fock vector)` pairs.
pub type Mixture = Vec<(f64, Vec<C64>)>;

/// Step of the trapezoid rule over the Wigner correlation offset.
const WIGNER_DY: f64 = 0.02;

fn wavefunction(v: &[C64], x: f64) -> C64 {
    v.iter().zip(hermite_functions(x, v.len() - 1)).map(|(c, h)| c * h).sum()
}

/// `W(q, p) = (1/pi) int psi^*(q + y) psi(q - y) e^{2 i p y} dy`, per normalized component.
///
/// The position-space form is used rather than displaced parity because the
/// Fock-space displacement recurrence loses precision for `|alpha| > 4`.
pub fn wigner_raster(state: &Mixture, grid: &GridSpec, exec: Exec) -> Result<WignerGrid> {
    grid.validate()?;
    let comps: Vec<(f64, &[C64])> = state
        .iter()
        .map(|(w, v)| {
            let n: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            (*w / n, v.as_slice())
        })
        .collect();
    let dim = comps.iter().map(|(_, v)| v.len()).max().unwrap_or(1);
    // beyond the outermost turning point every basis function has decayed
    let reach = (2.0 * dim as f64 + 1.0).sqrt() + 8.0;
    let ny = (reach / WIGNER_DY).ceil() as usize;
    let res = grid.resolution;
    let rows = exec.map(res, |iq| {
        let q = grid.q(iq);
        let corr: Vec<(f64, C64)> = (0..=ny)
            .map(|k| {
                let y = k as f64 * WIGNER_DY;
                let f: C64 = comps.iter().map(|(w, v)| wavefunction(v, q + y).conj() * wavefunction(v, q - y) * *w).sum();
                (y, f)
            })
            .collect();
        (0..res)
            .map(|ip| {
                let p = grid.p(ip);
                let tail: f64 = corr[1..].iter().map(|(y, f)| (f * C64::from_polar(1.0, 2.0 * p * y)).re).sum();
                (corr[0].1.re + 2.0 * tail) * WIGNER_DY / PI
            })
            .collect::<Vec<f64>>()
    });
    let values = rows;
    let peak = values.iter().flatten().fold(0.0f64, |m, w| m.max(w.abs()));
    let edge =
        (0..res).flat_map(|i| [values[0][i], values[res - 1][i], values[i][0], values[i][res - 1]]).fold(0.0f64, |m, w| m.max(w.abs()));
    let mut warnings = Vec::new();
    if edge > 1e-6 * peak {
        warnings.push(format!("grid edge carries {:.1e} of the peak value; widen the grid", edge / peak));
    }
    Ok(WignerGrid { spec: *grid, values, warnings })
}

/// Envelope-shifted mixture for logical `|j>`: component `b` is the damped
/// codeword `|j + b1>` displaced by `sqrt(pi/2) (b1 + i b2)`, weighted as in
/// [`mixture_probabilities`].
pub fn mixed_envelope_state(beta: f64, j: u8, cfg: &FockConfig) -> Result<(Mixture, [f64; 4])> {
    let code = FockCode::new(beta, cfg)?;
    let weights = mixture_probabilities(&DampingParams::new(beta)?, j);
    let rows = cfg.n_max + 1 + SHIFT_ROWS;
    let mix = TWIRL_SET.iter().zip(weights).map(|(&b, w)| (w, displace_vector(shift_of(b), code.word(j ^ b.0), rows))).collect();
    Ok((mix, weights))
}

/// `|psi(q)|^2` of a normalized copy of `v`.
pub fn position_density(v: &[C64], q: f64) -> f64 {
    let n: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let h = hermite_functions(q, v.len() - 1);
    let amp: C64 = v.iter().zip(&h).map(|(c, x)| c * x).sum();
    amp.norm_sqr() / n
}
