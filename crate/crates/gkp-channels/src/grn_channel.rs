//! Gaussian random noise (GRN) on the square code: variance conventions, the
//! SB-decoded conditional PTM, its cell average, the stabilizer-twirled
//! damping kernel and the variance-additivity check.
//!
//! A GRN channel displaces by `(x_q, x_p)` with independent normal components
//! of variance `sigma2`. Outcomes inside the SB cell
//! `[-h/2, h/2)^2` (`h = sqrt(pi/2)`) need no correction, and
//!
//! ```text
//!   G_aa(mu) = 1/(2 pi sigma2) sum_l exp(-|mu - h l|^2 / (2 sigma2)) (-1)^(a1 l2 + a2 l1)
//! ```
//!
//! which is a genus-2 theta function with diagonal period matrix.

use crate::decoders::Syndrome;
use crate::exec::{pairwise_sum, pairwise_sum_f64, Exec};
use crate::lattice_theta::{PreparedTau, Series, DEFAULT_TOL};
use crate::qubit_channels::{Pauli, Ptm, ShiftVector};
use crate::{Error, Result, C64, SHIFT};
use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::num::NonZeroUsize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `tanh(beta / 2)`, the variance of the stabilizer-twirled damping kernel.
    Twirl,
    /// `tanh(beta) / 2`, matching the Wigner-function blur of the damped comb.
    HalfTanh,
    Explicit,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Twirl => "twirl",
            Convention::HalfTanh => "half_tanh",
            Convention::Explicit => "explicit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrnVariance {
    pub sigma2: f64,
    pub convention: Convention,
}

impl GrnVariance {
    pub fn explicit(sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::Argument(format!("GRN variance must be finite and > 0 (got {sigma2})")));
        }
        Ok(Self { sigma2, convention: Convention::Explicit })
    }
}

pub fn sigma_from_beta(beta: f64, convention: Convention) -> Result<GrnVariance> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Argument(format!("damping beta must be finite and > 0 (got {beta})")));
    }
    let sigma2 = match convention {
        Convention::Twirl => (0.5 * beta).tanh(),
        Convention::HalfTanh => 0.5 * beta.tanh(),
        Convention::Explicit => {
            return Err(Error::Argument("an explicit variance is not derived from beta".into()));
        }
    };
    Ok(GrnVariance { sigma2, convention })
}

/// Conditional GRN maps at one variance.
#[derive(Debug, Clone)]
pub struct GrnKernel {
    v: GrnVariance,
    prepared: PreparedTau,
}

impl GrnKernel {
    pub fn new(v: GrnVariance) -> Result<Self> {
        GrnVariance::explicit(v.sigma2)?;
        let t = C64::new(0.0, 0.25 / v.sigma2);
        let zero = C64::new(0.0, 0.0);
        let tau = [[t, zero], [zero, t]];
        // Im(tau) >= 1 up to sigma2 = 1/4; beyond that the transformed series is shorter
        let series = if t.im >= 1.0 { Series::Direct } else { Series::Transformed };
        Ok(Self { v, prepared: PreparedTau::new(tau, series, DEFAULT_TOL)? })
    }

    pub fn variance(&self) -> GrnVariance {
        self.v
    }

    pub fn entry(&self, a: Pauli, s: &Syndrome) -> f64 {
        let s2 = self.v.sigma2;
        let (a1, a2) = a.bits();
        let c = SHIFT / (2.0 * PI * s2);
        let z = [C64::new(0.5 * a2 as f64, -c * s.mq), C64::new(0.5 * a1 as f64, -c * s.mp)];
        let th = self.prepared.eval(z);
        let lg = th.log_scale - s.mu().norm_sqr() / (2.0 * s2);
        th.mantissa.re * lg.exp() / (2.0 * PI * s2)
    }

    pub fn conditional(&self, s: &Syndrome) -> Ptm {
        Ptm::diag(Pauli::ALL.map(|a| self.entry(a, s)))
    }
}

/// Diagonal conditional PTM; off-diagonal entries are exact zeros.
pub fn gamma_grn_conditional(v: GrnVariance, s: &Syndrome) -> Result<Ptm> {
    Ok(GrnKernel::new(v)?.conditional(s))
}

/// Per-axis panel edges on `[-h/2, h/2]`, graded geometrically towards the
/// origin so the central Gaussian is resolved at any variance.
fn graded_edges(sigma: f64) -> Vec<f64> {
    let half = 0.5 * SHIFT;
    let mut pos = vec![];
    let mut x = sigma;
    while x < half {
        pos.push(x);
        x *= 2.0;
    }
    let mut e: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
    e.insert(0, -half);
    e.push(0.0);
    e.extend(pos);
    e.push(half);
    e
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrnAveraged {
    pub ptm: Ptm,
    pub variance: GrnVariance,
    /// Max entry change when the nodes per panel are doubled.
    pub refinement_delta: f64,
    pub evaluations: usize,
}

pub const GRN_NODES: usize = 16;
pub const GRN_CONV_TOL: f64 = 1e-10;

fn cell_average(k: &GrnKernel, nodes: usize, exec: Exec) -> (Ptm, usize) {
    let rule = GaussLegendre::new(NonZeroUsize::new(nodes).expect("nodes >= 1"));
    let pts: Vec<(f64, f64)> = {
        let edges = graded_edges(k.v.sigma2.sqrt());
        let mut v = Vec::new();
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            for &(x, wt) in rule.as_node_weight_pairs() {
                v.push((a + 0.5 * (b - a) * (x + 1.0), 0.5 * (b - a) * wt));
            }
        }
        v
    };
    let n = pts.len();
    let rows = exec.map(n, |i| {
        let (q, wq) = pts[i];
        let mut acc = [[0.0; 4]; 4];
        for &(p, wp) in &pts {
            let g = k.conditional(&Syndrome::new(q, p));
            for a in 0..4 {
                acc[a][a] += wq * wp * g.0[a][a];
            }
        }
        acc
    });
    (Ptm(pairwise_sum(&rows)), n * n)
}

/// Average over the SB cell, certified by doubling the nodes per panel.
pub fn gamma_grn_avg(v: GrnVariance) -> Result<GrnAveraged> {
    gamma_grn_avg_with(v, GRN_NODES, GRN_CONV_TOL, Exec::default())
}

pub fn gamma_grn_avg_with(v: GrnVariance, nodes: usize, conv_tol: f64, exec: Exec) -> Result<GrnAveraged> {
    if nodes == 0 {
        return Err(Error::Argument("GRN quadrature needs at least one node per panel".into()));
    }
    let k = GrnKernel::new(v)?;
    let (base, n1) = cell_average(&k, nodes, exec);
    let (fine, n2) = cell_average(&k, 2 * nodes, exec);
    let delta = fine.max_abs_diff(&base);
    if !(delta <= conv_tol) {
        return Err(Error::Convergence(format!(
            "GRN cell average at sigma2 {}: doubling nodes changes the PTM by {delta:e} > {conv_tol:e}",
            v.sigma2
        )));
    }
    Ok(GrnAveraged { ptm: fine, variance: v, refinement_delta: delta, evaluations: n1 + n2 })
}

/// Stabilizer-twirled damping kernel `chi(alpha) chi(alpha - h k) e^{i h (Im(alpha) k1 - Re(alpha) k2)}`
/// with `chi(alpha) = exp(-|alpha|^2 / (2 tanh(beta/2))) / (pi (1 - e^{-beta}))`, the
/// characteristic function of `exp(-beta n)`.
pub fn twirled_damping_kernel(beta: f64, alpha: C64, k: ShiftVector) -> Result<C64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Argument(format!("damping beta must be finite and > 0 (got {beta})")));
    }
    let t = (0.5 * beta).tanh();
    let chi = |a: C64| (-a.norm_sqr() / (2.0 * t)).exp() / (PI * (1.0 - (-beta).exp()));
    let shift = C64::new(SHIFT * k.0 as f64, SHIFT * k.1 as f64);
    let phase = SHIFT * (alpha.im * k.0 as f64 - alpha.re * k.1 as f64);
    Ok(C64::from_polar(chi(alpha) * chi(alpha - shift), phase))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityReport {
    pub s1: f64,
    pub s2: f64,
    /// Logical PTM of the numerically convolved displacement kernels.
    pub composed: Ptm,
    /// `gamma_grn_avg` at `s1 + s2`.
    pub direct: Ptm,
    pub max_deviation: f64,
}

fn gauss_pdf(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Gauss-Legendre nodes covering `[-lim, lim]` in `panels` equal panels.
fn panel_nodes(lim: f64, panels: usize, rule: &GaussLegendre) -> Vec<(f64, f64)> {
    let w = 2.0 * lim / panels as f64;
    let mut out = Vec::new();
    for i in 0..panels {
        let a = -lim + i as f64 * w;
        for &(x, wt) in rule.as_node_weight_pairs() {
            out.push((a + 0.5 * w * (x + 1.0), 0.5 * w * wt));
        }
    }
    out
}

/// `E[(-1)^(SB bin of x)]` for `x` distributed as the convolution of two
/// centred normal densities, with the convolution done by quadrature.
fn convolved_parity(s1: f64, s2: f64) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(24).expect("nonzero"));
    let inner = panel_nodes(10.0 * s2.sqrt(), 8, &rule);
    let conv = |x: f64| pairwise_sum_f64(&inner.iter().map(|&(u, w)| w * gauss_pdf(u, s2) * gauss_pdf(x - u, s1)).collect::<Vec<_>>());
    let reach = 10.0 * (s1 + s2).sqrt() + SHIFT;
    let bins = (reach / SHIFT).ceil() as i64;
    let sub = ((SHIFT / (s1 + s2).sqrt()).ceil() as usize).max(1);
    let mut parts = Vec::new();
    for n in -bins..=bins {
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let (a, b) = ((n as f64 - 0.5) * SHIFT, (n as f64 + 0.5) * SHIFT);
        let w = (b - a) / sub as f64;
        for i in 0..sub {
            let lo = a + i as f64 * w;
            for &(x, wt) in rule.as_node_weight_pairs() {
                parts.push(sign * 0.5 * w * wt * conv(lo + 0.5 * w * (x + 1.0)));
            }
        }
    }
    pairwise_sum_f64(&parts)
}

/// Compares the logical channel of two composed displacement kernels (composed
/// at the kernel level, before any SB projection) with the single channel at
/// the summed variance.
pub fn grn_variance_additivity_check(s1: f64, s2: f64) -> Result<AdditivityReport> {
    GrnVariance::explicit(s1)?;
    GrnVariance::explicit(s2)?;
    let direct = gamma_grn_avg(GrnVariance::explicit(s1 + s2)?)?.ptm;
    // per-quadrature parities; the q shift flips Z and Y, the p shift flips X and Y
    let e = convolved_parity(s1, s2);
    let composed = Ptm::diag([1.0, e, e * e, e]);
    let max_deviation = composed.max_abs_diff(&direct);
    Ok(AdditivityReport { s1, s2, composed, direct, max_deviation })
}
