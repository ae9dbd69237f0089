//! Standard binning (SB), minimal shifts, the twirl-aware recovery rule and
//! score-maximizing lookup decoders.
//!
//! Syndromes are raw homodyne outcomes `mu = m_q + i m_p`. SB bins are
//! half-open intervals `[(n - 1/2) sqrt(pi), (n + 1/2) sqrt(pi))` of the
//! scaled outcome `sqrt(2) mu`, i.e. width `sqrt(pi/2)` in raw units.

use crate::exec::Exec;
use crate::qubit_channels::{Pauli, Ptm, ShiftVector};
use crate::{Error, Result, C64, SHIFT, SQRT_PI};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Syndrome {
    pub mq: f64,
    pub mp: f64,
}

impl Syndrome {
    pub fn new(mq: f64, mp: f64) -> Self {
        Self { mq, mp }
    }

    pub fn from_mu(mu: C64) -> Self {
        Self { mq: mu.re, mp: mu.im }
    }

    pub fn mu(&self) -> C64 {
        C64::new(self.mq, self.mp)
    }

    pub fn scaled(&self) -> C64 {
        self.mu() * std::f64::consts::SQRT_2
    }

    /// Syndrome displaced by the Pauli shift `l` (raw step `sqrt(pi/2)`).
    pub fn shifted(&self, l: ShiftVector) -> Self {
        Self { mq: self.mq + SHIFT * l.0 as f64, mp: self.mp + SHIFT * l.1 as f64 }
    }
}

/// Twirl bits `b`, always an element of the fixed set [`TWIRL_SET`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitVector(pub u8, pub u8);

pub const TWIRL_SET: [BitVector; 4] = [BitVector(0, 0), BitVector(0, 1), BitVector(1, 0), BitVector(1, 1)];

impl BitVector {
    pub fn new(b1: u8, b2: u8) -> Result<Self> {
        if b1 > 1 || b2 > 1 {
            return Err(Error::Argument(format!("twirl bits must be 0/1, got ({b1},{b2})")));
        }
        Ok(Self(b1, b2))
    }

    pub fn from_sum(l: ShiftVector) -> Option<Self> {
        match (l.0, l.1) {
            (0 | 1, 0 | 1) => Some(Self(l.0 as u8, l.1 as u8)),
            _ => None,
        }
    }
}

/// `(n, frac)` with `n = floor(x / sqrt(pi) + 1/2)` and `frac = x - n sqrt(pi)`.
pub fn sb_round(x: f64) -> (i64, f64) {
    let n = (x / SQRT_PI + 0.5).floor();
    (n as i64, x - n * SQRT_PI)
}

pub fn sb_pauli(s: &Syndrome) -> Pauli {
    let sc = s.scaled();
    Pauli::from_bits(sb_round(sc.re).0, sb_round(sc.im).0)
}

/// Minimal-energy shift with the given sign per axis.
pub fn sb_min_shift(s: &Syndrome, signs: (i8, i8)) -> ShiftVector {
    let (a1, a2) = sb_pauli(s).bits();
    ShiftVector(signs.0.signum() as i64 * a1 as i64, signs.1.signum() as i64 * a2 as i64)
}

/// Shift implementing `desired` while keeping `b + c` inside the twirl set.
pub fn twirl_aware_shift(desired: Pauli, b: BitVector) -> ShiftVector {
    let s1 = if b.0 == 0 { 1 } else { -1 };
    let s2 = if b.1 == 0 { 1 } else { -1 };
    match desired {
        Pauli::I => ShiftVector(0, 0),
        Pauli::X => ShiftVector(s1, 0),
        Pauli::Y => ShiftVector(s1, s2),
        Pauli::Z => ShiftVector(0, s2),
    }
}

/// Logical readout bit of a single SB-binned homodyne value.
pub fn sb_measurement_bin(m: f64) -> u8 {
    sb_round(m).0.rem_euclid(2) as u8
}

/// `Tr[Gamma_P Gamma_syn]`, the score of correction `P`.
pub fn correction_score(p: Pauli, gsyn: &Ptm) -> f64 {
    let d = Ptm::pauli(p).diagonal();
    (0..4).map(|a| d[a] * gsyn.0[a][a]).sum()
}

/// Highest-scoring correction; ties go to the SB choice.
pub fn optimal_choice(s: &Syndrome, gsyn: &Ptm) -> Pauli {
    let mut best = sb_pauli(s);
    let mut best_score = correction_score(best, gsyn);
    for p in Pauli::ALL {
        let sc = correction_score(p, gsyn);
        if sc > best_score {
            best = p;
            best_score = sc;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    StandardBinning,
    Optimized { beta: f64 },
}

/// Pauli labels on a midpoint-registered square grid of raw syndromes.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderTable {
    pub resolution: usize,
    pub half_width: f64,
    pub entries: Vec<Pauli>,
    pub provenance: Provenance,
}

pub const DEFAULT_RESOLUTION: usize = 101;
/// Default window: one logical cell, `[-sqrt(pi/2), sqrt(pi/2))` per raw axis.
pub const DEFAULT_HALF_WIDTH: f64 = SHIFT;

impl DecoderTable {
    pub fn coord(&self, i: usize) -> f64 {
        grid_coord(self.resolution, self.half_width, i)
    }

    pub fn point(&self, iq: usize, ip: usize) -> Syndrome {
        Syndrome::new(self.coord(iq), self.coord(ip))
    }

    pub fn get(&self, iq: usize, ip: usize) -> Pauli {
        self.entries[iq * self.resolution + ip]
    }

    fn index_of(&self, x: f64) -> Option<usize> {
        let step = 2.0 * self.half_width / self.resolution as f64;
        let t = (x + self.half_width) / step;
        if !(0.0..self.resolution as f64).contains(&t) {
            return None;
        }
        Some((t.floor() as usize).min(self.resolution - 1))
    }

    /// Nearest-grid-point lookup; outside the window the SB rule is used.
    pub fn lookup(&self, s: &Syndrome) -> Pauli {
        match (self.index_of(s.mq), self.index_of(s.mp)) {
            (Some(i), Some(j)) => self.get(i, j),
            _ => sb_pauli(s),
        }
    }

    pub fn standard_binning(resolution: usize, half_width: f64) -> Result<Self> {
        check_geometry(resolution, half_width)?;
        let mut entries = Vec::with_capacity(resolution * resolution);
        for i in 0..resolution {
            for j in 0..resolution {
                let x = grid_coord(resolution, half_width, i);
                let y = grid_coord(resolution, half_width, j);
                entries.push(sb_pauli(&Syndrome::new(x, y)));
            }
        }
        Ok(Self { resolution, half_width, entries, provenance: Provenance::StandardBinning })
    }

    /// Width of the contiguous run of I labels through the grid point nearest
    /// the origin, along the row nearest `m_p = 0`, in grid steps times the step.
    pub fn i_region_width(&self) -> f64 {
        let step = 2.0 * self.half_width / self.resolution as f64;
        let (Some(c), Some(row)) = (self.index_of(0.0), self.index_of(0.0)) else { return 0.0 };
        if self.get(c, row) != Pauli::I {
            return 0.0;
        }
        let left = (0..c).rev().take_while(|&i| self.get(i, row) == Pauli::I).count();
        let right = (c + 1..self.resolution).take_while(|&i| self.get(i, row) == Pauli::I).count();
        (left + right + 1) as f64 * step
    }

    /// Number of grid points labelled `p`.
    pub fn count(&self, p: Pauli) -> usize {
        self.entries.iter().filter(|&&e| e == p).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("mu_q,mu_p,pauli\n");
        for i in 0..self.resolution {
            for j in 0..self.resolution {
                let _ = writeln!(s, "{:.17e},{:.17e},{}", self.coord(i), self.coord(j), self.get(i, j));
            }
        }
        s
    }

    pub fn from_csv(text: &str, provenance: Provenance) -> Result<Self> {
        let mut rows: Vec<(f64, f64, Pauli)> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if ln == 0 {
                if line.trim() != "mu_q,mu_p,pauli" {
                    return Err(Error::Argument(format!("unexpected decoder map header {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(Error::Argument(format!("line {}: expected 3 fields", ln + 1)));
            }
            let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::Argument(format!("line {}: {e}", ln + 1)));
            let p = f[2]
                .trim()
                .chars()
                .next()
                .and_then(Pauli::from_label)
                .ok_or_else(|| Error::Argument(format!("line {}: bad Pauli label", ln + 1)))?;
            rows.push((parse(f[0])?, parse(f[1])?, p));
        }
        let res = (rows.len() as f64).sqrt().round() as usize;
        if res * res != rows.len() || res < 2 {
            return Err(Error::Argument("decoder map is not a square grid of at least 2x2 points".into()));
        }
        let step = rows[res].0 - rows[0].0;
        let half_width = 0.5 * step * res as f64;
        Ok(Self { resolution: res, half_width, entries: rows.into_iter().map(|r| r.2).collect(), provenance })
    }

    /// Heatmap of the labels with the SB bin edges overlaid.
    pub fn to_svg(&self, size: usize) -> String {
        let n = self.resolution;
        let px = size as f64 / n as f64;
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
        for i in 0..n {
            for j in 0..n {
                let color = match self.get(i, j) {
                    Pauli::I => "#f2f2f2",
                    Pauli::X => "#4c72b0",
                    Pauli::Y => "#55a868",
                    Pauli::Z => "#c44e52",
                };
                // p increases upward
                let y = (n - 1 - j) as f64 * px;
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{color}"/>"#,
                    i as f64 * px,
                    y,
                    px + 0.05,
                    px + 0.05
                );
            }
        }
        let w = self.half_width;
        let to_px = |v: f64| (v + w) / (2.0 * w) * size as f64;
        let kmax = (w / SHIFT).ceil() as i64 + 1;
        for k in -kmax..=kmax {
            let edge = (k as f64 + 0.5) * SHIFT;
            if edge.abs() < w {
                let x = to_px(edge);
                let y = size as f64 - to_px(edge);
                let _ = writeln!(
                    s,
                    r#"<line x1="{x:.3}" y1="0" x2="{x:.3}" y2="{size}" stroke="black" stroke-width="1" stroke-dasharray="4 3"/>"#
                );
                let _ = writeln!(
                    s,
                    r#"<line x1="0" y1="{y:.3}" x2="{size}" y2="{y:.3}" stroke="black" stroke-width="1" stroke-dasharray="4 3"/>"#
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn grid_coord(res: usize, w: f64, i: usize) -> f64 {
    -w + (i as f64 + 0.5) * 2.0 * w / res as f64
}

fn check_geometry(resolution: usize, half_width: f64) -> Result<()> {
    if resolution == 0 || !(half_width > 0.0) {
        return Err(Error::Argument(format!("decoder grid needs resolution >= 1 and half-width > 0 (got {resolution}, {half_width})")));
    }
    Ok(())
}

/// Picks the highest-scoring correction at every grid point.
pub fn optimize_decoder<K>(beta: f64, resolution: usize, half_width: f64, kernel: K, exec: Exec) -> Result<DecoderTable>
where
    K: Fn(&Syndrome) -> Result<Ptm> + Sync + Send,
{
    check_geometry(resolution, half_width)?;
    let cells = exec.map(resolution * resolution, |idx| {
        let s = Syndrome::new(grid_coord(resolution, half_width, idx / resolution), grid_coord(resolution, half_width, idx % resolution));
        kernel(&s).map(|g| optimal_choice(&s, &g))
    });
    let entries = cells.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(DecoderTable { resolution, half_width, entries, provenance: Provenance::Optimized { beta } })
}

/// Position on the positive q axis where the I and X scores cross, searched
/// by bisection in `[lo, hi]`. Returns `None` when the scores do not change
/// order on the interval.
pub fn decision_boundary_q<K>(kernel: K, lo: f64, hi: f64) -> Result<Option<f64>>
where
    K: Fn(&Syndrome) -> Result<Ptm>,
{
    let diff = |x: f64| -> Result<f64> {
        let g = kernel(&Syndrome::new(x, 0.0))?;
        Ok(correction_score(Pauli::I, &g) - correction_score(Pauli::X, &g))
    };
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (diff(a)?, diff(b)?);
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        let fm = diff(m)?;
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// Correction rule applied inside channel averages.
#[derive(Debug, Clone)]
pub enum Decoder {
    NoCorrection,
    StandardBinning,
    /// Exact pointwise maximizer of the correction score.
    Optimal,
    /// Nearest-grid lookup in a precomputed table.
    Table(Arc<DecoderTable>),
}

impl PartialEq for Decoder {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (Decoder::Table(a), Decoder::Table(b)) => a == b,
            _ => std::mem::discriminant(self) == std::mem::discriminant(o),
        }
    }
}

impl Decoder {
    pub fn decide(&self, s: &Syndrome, gsyn: &Ptm) -> Pauli {
        match self {
            Decoder::NoCorrection => Pauli::I,
            Decoder::StandardBinning => sb_pauli(s),
            Decoder::Optimal => optimal_choice(s, gsyn),
            Decoder::Table(t) => t.lookup(s),
        }
    }

    /// True when the decision is constant on every SB bin.
    pub fn constant_on_bins(&self) -> bool {
        matches!(self, Decoder::NoCorrection | Decoder::StandardBinning)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Decoder::NoCorrection => "none",
            Decoder::StandardBinning => "sb",
            Decoder::Optimal => "opt",
            Decoder::Table(_) => "table",
        }
    }
}
