//! Siegel theta functions on the genus-2 Siegel upper half plane, and the
//! closed-form damped-displacement matrix elements of the square GKP code.
//!
//! Lattice sums are returned as `mantissa * exp(log_scale)`. The window is
//! centred on the maximum of the Gaussian weight and grown shell by shell
//! (Chebyshev shells around the centre) until the analytic tail bound
//!
//! ```text
//!   sum_{s > r} 8 s exp(-pi * lambda_min * (s - 1/2)^2)
//! ```
//!
//! relative to the largest term drops below `tol`. The tolerance is therefore
//! absolute in units of the dominant term.

use crate::qubit_channels::Pauli;
use crate::{Error, Result, C64, SQRT_PI};
use std::f64::consts::PI;

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_SHELLS: usize = 4000;

/// Damping strength of `exp(-beta n)` with its hyperbolic functions cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingParams {
    pub beta: f64,
    pub tanh: f64,
    pub coth: f64,
    pub csch: f64,
    pub sech: f64,
    pub tanh_half: f64,
}

impl DampingParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Argument(format!("damping beta must be finite and > 0 (got {beta}); ideal states are not normalizable")));
        }
        let t = beta.tanh();
        Ok(Self { beta, tanh: t, coth: 1.0 / t, csch: 1.0 / beta.sinh(), sech: 1.0 / beta.cosh(), tanh_half: (0.5 * beta).tanh() })
    }
}

pub type Mat2 = [[C64; 2]; 2];

/// Arguments of a genus-2 theta function.
#[derive(Debug, Clone, Copy)]
pub struct ThetaQuery {
    pub z: [C64; 2],
    pub tau: Mat2,
    pub tol: f64,
}

impl ThetaQuery {
    pub fn new(z: [C64; 2], tau: Mat2, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Argument(format!("theta tolerance must be > 0 (got {tol})")));
        }
        let off = (tau[0][1] - tau[1][0]).norm();
        let scale = tau[0][1].norm().max(tau[1][0].norm()).max(1.0);
        if off > 1e-14 * scale {
            return Err(Error::Domain(format!("tau is not symmetric (|t01 - t10| = {off:e})")));
        }
        let y = im_part(&tau);
        if !(y[0][0] > 0.0 && det2(&y) > 0.0) {
            return Err(Error::Domain("Im(tau) is not positive definite (outside the Siegel upper half plane)".into()));
        }
        Ok(Self { z, tau, tol })
    }
}

/// Which lattice series is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    Direct,
    Transformed,
}

/// Series selection: direct when the smallest eigenvalue of Im(tau) is at least 1.
pub fn select_series(tau: &Mat2) -> Series {
    if min_eig(&im_part(tau)) >= 1.0 {
        Series::Direct
    } else {
        Series::Transformed
    }
}

/// A theta value as `mantissa * exp(log_scale)`, plus the number of shells summed.
#[derive(Debug, Clone, Copy)]
pub struct ScaledTheta {
    pub mantissa: C64,
    pub log_scale: f64,
    pub shells: usize,
}

impl ScaledTheta {
    pub fn value(&self) -> C64 {
        self.mantissa * self.log_scale.exp()
    }
}

fn im_part(t: &Mat2) -> [[f64; 2]; 2] {
    [[t[0][0].im, t[0][1].im], [t[1][0].im, t[1][1].im]]
}

fn det2(y: &[[f64; 2]; 2]) -> f64 {
    y[0][0] * y[1][1] - y[0][1] * y[1][0]
}

fn min_eig(y: &[[f64; 2]; 2]) -> f64 {
    let tr = y[0][0] + y[1][1];
    let d = ((y[0][0] - y[1][1]).powi(2) + 4.0 * y[0][1] * y[1][0]).sqrt();
    0.5 * (tr - d)
}

fn cdet(t: &Mat2) -> C64 {
    t[0][0] * t[1][1] - t[0][1] * t[1][0]
}

fn cinv(t: &Mat2) -> Result<Mat2> {
    let d = cdet(t);
    if d.norm() < 1e-300 {
        return Err(Error::Domain("tau is singular".into()));
    }
    Ok([[t[1][1] / d, -t[0][1] / d], [-t[1][0] / d, t[0][0] / d]])
}

/// Shell count needed for the tail bound to fall below `tol` at eigenvalue `lam`.
fn shells_needed(lam: f64, tol: f64) -> usize {
    let term = |s: usize| 8.0 * s as f64 * (-PI * lam * (s as f64 - 0.5).powi(2)).exp();
    // terms decrease once s exceeds this
    let mono = (1.0 / (2.0 * PI * lam)).sqrt() + 1.0;
    for r in 0..MAX_SHELLS {
        let mut tail = 0.0;
        let mut s = r + 1;
        loop {
            let t = term(s);
            tail += t;
            if s as f64 > mono && t <= 1e-20 * tol.max(tail) {
                break;
            }
            s += 1;
        }
        if tail < tol {
            return r;
        }
    }
    MAX_SHELLS
}

/// Precomputed data for summing over a fixed `tau`.
#[derive(Debug, Clone)]
pub struct PreparedTau {
    tau: Mat2,
    series: Series,
    /// Matrix whose lattice is summed directly (`tau` or `-tau^{-1}`).
    lat: Mat2,
    y_inv: [[f64; 2]; 2],
    shells: usize,
    /// `exp(i pi m^T lat m)` for `|m|_inf <= shells`, row-major over (m1, m2).
    quad: Vec<C64>,
    inv: Mat2,
    pref: C64,
}

impl PreparedTau {
    pub fn new(tau: Mat2, series: Series, tol: f64) -> Result<Self> {
        ThetaQuery::new([C64::new(0.0, 0.0); 2], tau, tol)?;
        let (inv, pref, lat) = match series {
            Series::Direct => ([[C64::new(0.0, 0.0); 2]; 2], C64::new(1.0, 0.0), tau),
            Series::Transformed => {
                let inv = cinv(&tau)?;
                let neg = [[-inv[0][0], -inv[0][1]], [-inv[1][0], -inv[1][1]]];
                // det(-i tau) = -det(tau); the principal root is the continuous branch for 2x2
                let pref = C64::new(1.0, 0.0) / (-cdet(&tau)).sqrt();
                (inv, pref, neg)
            }
        };
        let y = im_part(&lat);
        let d = det2(&y);
        let y_inv = [[y[1][1] / d, -y[0][1] / d], [-y[1][0] / d, y[0][0] / d]];
        let shells = shells_needed(min_eig(&y), tol);
        let r = shells as i64;
        let mut quad = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
        for a in -r..=r {
            for b in -r..=r {
                let (a, b) = (a as f64, b as f64);
                let q = lat[0][0] * (a * a) + lat[0][1] * (2.0 * a * b) + lat[1][1] * (b * b);
                quad.push((C64::new(0.0, PI) * q).exp());
            }
        }
        Ok(Self { tau, series, lat, y_inv, shells, quad, inv, pref })
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn tau(&self) -> Mat2 {
        self.tau
    }

    /// Chebyshev radius of the summation window.
    pub fn shells(&self) -> usize {
        self.shells
    }

    pub fn eval(&self, z: [C64; 2]) -> ScaledTheta {
        match self.series {
            Series::Direct => self.lattice_sum(z),
            Series::Transformed => {
                let w = [self.inv[0][0] * z[0] + self.inv[0][1] * z[1], self.inv[1][0] * z[0] + self.inv[1][1] * z[1]];
                let inner = self.lattice_sum(w);
                // exp(-i pi z^T tau^{-1} z)
                let e = C64::new(0.0, -PI) * (z[0] * w[0] + z[1] * w[1]);
                ScaledTheta {
                    mantissa: inner.mantissa * self.pref * C64::from_polar(1.0, e.im),
                    log_scale: inner.log_scale + e.re,
                    shells: inner.shells,
                }
            }
        }
    }

    /// Sum over `n = n0 + m`, with `n0` the lattice point nearest the maximum
    /// of the Gaussian weight, written as
    /// `exp(i pi n0^T t n0 + 2 pi i n0^T z) * sum_m exp(i pi m^T t m) v1^m1 v2^m2`.
    fn lattice_sum(&self, z: [C64; 2]) -> ScaledTheta {
        let t = &self.lat;
        let yi = &self.y_inv;
        let yz = [z[0].im, z[1].im];
        let n0 = [(-(yi[0][0] * yz[0] + yi[0][1] * yz[1])).round(), (-(yi[1][0] * yz[0] + yi[1][1] * yz[1])).round()];
        let q0 = t[0][0] * (n0[0] * n0[0]) + t[0][1] * (2.0 * n0[0] * n0[1]) + t[1][1] * (n0[1] * n0[1]);
        let l0 = z[0] * n0[0] + z[1] * n0[1];
        let e0 = C64::new(0.0, PI) * (q0 + l0 * 2.0);
        let zs = [z[0] + t[0][0] * n0[0] + t[0][1] * n0[1], z[1] + t[1][0] * n0[0] + t[1][1] * n0[1]];
        let r = self.shells;
        let w = 2 * r + 1;
        let powers = |v: C64| -> Vec<C64> {
            let mut p = vec![C64::new(0.0, 0.0); w];
            p[r] = C64::new(1.0, 0.0);
            let vi = v.inv();
            for k in 1..=r {
                p[r + k] = p[r + k - 1] * v;
                p[r - k] = p[r - k + 1] * vi;
            }
            p
        };
        let two_pi_i = C64::new(0.0, 2.0 * PI);
        let p1 = powers((two_pi_i * zs[0]).exp());
        let p2 = powers((two_pi_i * zs[1]).exp());
        let mut sum = C64::new(0.0, 0.0);
        for (a, pa) in p1.iter().enumerate() {
            let row = &self.quad[a * w..(a + 1) * w];
            let mut inner = C64::new(0.0, 0.0);
            for (q, pb) in row.iter().zip(&p2) {
                inner += q * pb;
            }
            sum += pa * inner;
        }
        ScaledTheta { mantissa: sum * C64::from_polar(1.0, e0.im), log_scale: e0.re, shells: r }
    }
}

/// Direct series of the theta function.
pub fn siegel_theta(q: &ThetaQuery) -> Result<C64> {
    Ok(PreparedTau::new(q.tau, Series::Direct, q.tol)?.eval(q.z).value())
}

/// Theta function through the Jacobi-transformed series.
pub fn siegel_theta_transformed(q: &ThetaQuery) -> Result<C64> {
    Ok(PreparedTau::new(q.tau, Series::Transformed, q.tol)?.eval(q.z).value())
}

/// Theta function through whichever series the selection rule picks.
pub fn siegel_theta_auto(q: &ThetaQuery) -> Result<C64> {
    Ok(PreparedTau::new(q.tau, select_series(&q.tau), q.tol)?.eval(q.z).value())
}

/// Shells the given series needs at this query's tolerance.
pub fn series_shells(q: &ThetaQuery, series: Series) -> Result<usize> {
    Ok(PreparedTau::new(q.tau, series, q.tol)?.shells())
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct JacobiReport {
    pub queries: usize,
    pub seed: u64,
    /// Largest `|direct - transformed| / |direct|`.
    pub max_rel_dev: f64,
}

/// Evaluates random queries through both series. `Im(tau)` is built from
/// log-uniform eigenvalues in [0.05, 20] and a random rotation.
pub fn jacobi_sweep(queries: usize, seed: u64) -> Result<JacobiReport> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..queries {
        let (lo, hi) = (0.05f64.ln(), 20f64.ln());
        let l1 = rng.random_range(lo..hi).exp();
        let l2 = rng.random_range(lo..hi).exp();
        let (sn, cs) = rng.random_range(0.0..PI).sin_cos();
        let y = [[cs * cs * l1 + sn * sn * l2, cs * sn * (l1 - l2)], [cs * sn * (l1 - l2), sn * sn * l1 + cs * cs * l2]];
        let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let tau = [[C64::new(x[0], y[0][0]), C64::new(x[1], y[0][1])], [C64::new(x[1], y[1][0]), C64::new(x[2], y[1][1])]];
        let z = [
            C64::new(rng.random_range(0.0..1.0), rng.random_range(-0.5..0.5)),
            C64::new(rng.random_range(0.0..1.0), rng.random_range(-0.5..0.5)),
        ];
        let q = ThetaQuery::new(z, tau, 1e-15)?;
        let d = siegel_theta(&q)?;
        let t = siegel_theta_transformed(&q)?;
        worst = worst.max((d - t).norm() / d.norm());
    }
    Ok(JacobiReport { queries, seed, max_rel_dev: worst })
}

/// Damped matrix elements `<j| N D(gamma) N |k>` with `N = exp(-beta n)` for
/// fixed beta, in the delta-comb normalization of ideal code words.
#[derive(Debug, Clone)]
pub struct DampedKernel {
    p: DampingParams,
    prepared: PreparedTau,
    log_pref: f64,
}

impl DampedKernel {
    pub fn new(p: DampingParams) -> Self {
        Self::with_tol(p, DEFAULT_TOL)
    }

    pub fn with_tol(p: DampingParams, tol: f64) -> Self {
        let tau = damped_tau(&p);
        let prepared = PreparedTau::new(tau, select_series(&tau), tol).expect("tau(beta) lies in the Siegel upper half plane for beta > 0");
        let pref = p.tanh_half / (2.0 * SQRT_PI * (1.0 - (-p.beta).exp()).powi(2));
        Self { p, prepared, log_pref: pref.ln() }
    }

    pub fn params(&self) -> &DampingParams {
        &self.p
    }

    pub fn series(&self) -> Series {
        self.prepared.series()
    }

    pub fn element(&self, gamma: C64, j: u8, k: u8) -> C64 {
        let p = &self.p;
        let d = j as f64 - k as f64;
        let z = [
            C64::new(0.0, 0.5 * d * p.coth - gamma.re * p.csch / (2.0 * PI).sqrt()),
            C64::new(0.25 * (j + k) as f64, -gamma.im * p.csch / (8.0 * PI).sqrt()),
        ];
        let th = self.prepared.eval(z);
        let lg = self.log_pref - 0.5 * p.coth * gamma.norm_sqr() - 0.25 * PI * d * d * p.coth
            + d * (0.5 * PI).sqrt() * gamma.re * p.csch
            + th.log_scale;
        th.mantissa * lg.exp()
    }

    /// The 2x2 block `[[<0|.|0>, <0|.|1>], [<1|.|0>, <1|.|1>]]`.
    pub fn block(&self, gamma: C64) -> Mat2 {
        [[self.element(gamma, 0, 0), self.element(gamma, 0, 1)], [self.element(gamma, 1, 0), self.element(gamma, 1, 1)]]
    }

    /// `(A, B, C)` = `<0|N^2|0>`, `<1|N^2|1>`, `<0|N^2|1>`.
    pub fn gram(&self) -> (f64, f64, f64) {
        let z = C64::new(0.0, 0.0);
        (self.element(z, 0, 0).re, self.element(z, 1, 1).re, self.element(z, 0, 1).re)
    }

    /// `Tr[N sigma N]` over the ideal code space.
    pub fn pauli_trace(&self, a: Pauli) -> f64 {
        let (aa, bb, cc) = self.gram();
        match a {
            Pauli::I => aa + bb,
            // X and Z traces coincide on the square lattice; both use the off-diagonal term
            Pauli::X | Pauli::Z => 2.0 * cc,
            Pauli::Y => 0.0,
        }
    }

    /// Normalization `2 Tr[N Pi N]`.
    pub fn norm_factor(&self) -> f64 {
        2.0 * self.pauli_trace(Pauli::I)
    }
}

/// Period matrix of the damped element.
pub fn damped_tau(p: &DampingParams) -> Mat2 {
    [[C64::new(0.0, p.coth), C64::new(0.5, 0.0)], [C64::new(0.5, 0.0), C64::new(0.0, 0.25 * p.coth)]]
}

pub fn damped_disp_element(p: &DampingParams, gamma: C64, j: u8, k: u8) -> C64 {
    DampedKernel::new(*p).element(gamma, j, k)
}

/// Result of classifying an ideal-code displacement matrix element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Zero,
    Weighted(C64),
}

/// Support of `<j|D(alpha)|k>` for ideal code words.
pub fn ideal_disp_support(alpha: C64, j: u8, k: u8) -> Support {
    const TOL: f64 = 1e-12;
    let s2 = std::f64::consts::SQRT_2;
    let mi = s2 * alpha.im / SQRT_PI;
    let m = mi.round();
    if (s2 * alpha.im - SQRT_PI * m).abs() > TOL {
        return Support::Zero;
    }
    let r = s2 * alpha.re / SQRT_PI - (j as f64 - k as f64);
    let two_n = 2.0 * (0.5 * r).round();
    if (s2 * alpha.re - SQRT_PI * (two_n + j as f64 - k as f64)).abs() > TOL {
        return Support::Zero;
    }
    let n = two_n / 2.0;
    let ph = 0.5 * PI * m * (2.0 * n + (j + k) as f64);
    Support::Weighted(C64::from_polar(1.0, ph))
}

pub fn damped_pauli_trace(p: &DampingParams, a: Pauli) -> f64 {
    DampedKernel::new(*p).pauli_trace(a)
}

pub fn norm_factor(p: &DampingParams) -> f64 {
    DampedKernel::new(*p).norm_factor()
}

/// Envelope-mixture probabilities for the logical basis state `|logical>`,
/// listed over the twirl bits in the order (0,0), (0,1), (1,0), (1,1).
pub fn mixture_probabilities(p: &DampingParams, logical: u8) -> [f64; 4] {
    let (a, b, _) = DampedKernel::new(*p).gram();
    let (same, flip) = if logical == 0 { (a, b) } else { (b, a) };
    let n = 2.0 * (a + b);
    [same / n, same / n, flip / n, flip / n]
}
