//! Single-qubit maps in the Pauli-Liouville picture.
//!
//! Rows and columns are ordered I, X, Y, Z. A Pauli is identified with its bit
//! pair `(x, z)`: I = (0,0), X = (1,0), Y = (1,1), Z = (0,1).

use crate::{Error, Result, C64};
use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Self::ALL[i & 3]
    }

    pub fn bits(self) -> (u8, u8) {
        match self {
            Pauli::I => (0, 0),
            Pauli::X => (1, 0),
            Pauli::Y => (1, 1),
            Pauli::Z => (0, 1),
        }
    }

    /// Pauli of a bit pair, reduced mod 2.
    pub fn from_bits(x: i64, z: i64) -> Pauli {
        match (x.rem_euclid(2), z.rem_euclid(2)) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn label(self) -> char {
        ['I', 'X', 'Y', 'Z'][self.index()]
    }

    pub fn from_label(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Product as a class (phases dropped).
    pub fn mul_class(self, o: Pauli) -> Pauli {
        let (a, b) = self.bits();
        let (c, d) = o.bits();
        Pauli::from_bits((a ^ c) as i64, (b ^ d) as i64)
    }

    /// +1 if the two Paulis commute, -1 otherwise.
    pub fn commutation_sign(self, o: Pauli) -> f64 {
        let (a, b) = self.bits();
        let (c, d) = o.bits();
        if (a * d + b * c) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Matrix elements `<j|sigma|k>`.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Integer displacement label of a Pauli shift; its logical class is `l mod 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShiftVector(pub i64, pub i64);

impl ShiftVector {
    pub fn class(self) -> Pauli {
        Pauli::from_bits(self.0, self.1)
    }

    /// Label of the inverse shift.
    pub fn inverse(self) -> ShiftVector {
        ShiftVector(-self.0, -self.1)
    }
}

pub type Mat2c = [[C64; 2]; 2];

pub(crate) fn mul2(a: &Mat2c, b: &Mat2c) -> Mat2c {
    let mut o = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

pub(crate) fn dagger2(a: &Mat2c) -> Mat2c {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub(crate) fn trace2(a: &Mat2c) -> C64 {
    a[0][0] + a[1][1]
}

/// Pauli transfer matrix, rows/columns ordered I, X, Y, Z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ptm(pub [[f64; 4]; 4]);

impl Ptm {
    pub fn identity() -> Ptm {
        Ptm::diag([1.0; 4])
    }

    pub fn zero() -> Ptm {
        Ptm([[0.0; 4]; 4])
    }

    pub fn diag(d: [f64; 4]) -> Ptm {
        let mut g = [[0.0; 4]; 4];
        for i in 0..4 {
            g[i][i] = d[i];
        }
        Ptm(g)
    }

    /// PTM of conjugation by a Pauli.
    pub fn pauli(p: Pauli) -> Ptm {
        Ptm::diag(Pauli::ALL.map(|a| a.commutation_sign(p)))
    }

    pub fn get(&self, a: Pauli, b: Pauli) -> f64 {
        self.0[a.index()][b.index()]
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [self.0[0][0], self.0[1][1], self.0[2][2], self.0[3][3]]
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn transpose(&self) -> Ptm {
        let mut g = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = self.0[j][i];
            }
        }
        Ptm(g)
    }

    pub fn scale(&self, s: f64) -> Ptm {
        Ptm(self.0.map(|r| r.map(|v| v * s)))
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    m = m.max(self.0[i][j].abs());
                }
            }
        }
        m
    }

    pub fn max_abs_diff(&self, o: &Ptm) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.0[i][j] - o.0[i][j]).abs());
            }
        }
        m
    }

    /// Matrix power by repeated squaring.
    pub fn pow(&self, n: u32) -> Ptm {
        let mut acc = Ptm::identity();
        let mut base = *self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = compose(&acc, &base);
            }
            base = compose(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let flat: Vec<f64> = self.0.iter().flatten().copied().collect();
        serde_json::json!({ "order": "IXYZ", "gamma": flat })
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Ptm> {
        if v.get("order").and_then(|o| o.as_str()) != Some("IXYZ") {
            return Err(Error::Argument("PTM JSON must carry \"order\":\"IXYZ\"".into()));
        }
        let flat = v.get("gamma").and_then(|g| g.as_array()).ok_or_else(|| Error::Argument("PTM JSON lacks a gamma array".into()))?;
        if flat.len() != 16 {
            return Err(Error::Argument(format!("gamma must hold 16 entries, got {}", flat.len())));
        }
        let mut g = [[0.0; 4]; 4];
        for (i, x) in flat.iter().enumerate() {
            g[i / 4][i % 4] = x.as_f64().ok_or_else(|| Error::Argument("gamma entries must be numbers".into()))?;
        }
        Ok(Ptm(g))
    }

    /// Four comma-separated rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in &self.0 {
            let row: Vec<String> = r.iter().map(|v| format!("{v:.15e}")).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Applies `b` first, then `a`.
pub fn compose(a: &Ptm, b: &Ptm) -> Ptm {
    let mut g = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g[i][j] = (0..4).map(|k| a.0[i][k] * b.0[k][j]).sum();
        }
    }
    Ptm(g)
}

fn pauli_expand(c: &[C64; 4]) -> Mat2c {
    let mut k = [[C64::new(0.0, 0.0); 2]; 2];
    for (p, coef) in Pauli::ALL.iter().zip(c) {
        let m = p.matrix();
        for i in 0..2 {
            for j in 0..2 {
                k[i][j] += coef * m[i][j];
            }
        }
    }
    k
}

/// PTM of the map `rho -> sum_n K_n rho K_n^dagger` with each `K_n` given by its
/// Pauli-basis coefficients (I, X, Y, Z).
pub fn ptm_from_kraus_coeffs(kraus: &[[C64; 4]]) -> Result<Ptm> {
    if kraus.is_empty() {
        return Err(Error::Argument("empty Kraus list".into()));
    }
    let ops: Vec<Mat2c> = kraus.iter().map(pauli_expand).collect();
    let mut g = [[0.0; 4]; 4];
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let mut acc = C64::new(0.0, 0.0);
            for k in &ops {
                let m = mul2(&mul2(k, &b.matrix()), &dagger2(k));
                acc += trace2(&mul2(&a.matrix(), &m));
            }
            g[a.index()][b.index()] = 0.5 * acc.re;
        }
    }
    Ok(Ptm(g))
}

/// Process matrix in the Pauli basis: `E(rho) = sum chi_mn sigma_m rho sigma_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix(pub Matrix4<C64>);

impl ChiMatrix {
    pub fn pauli_channel(p: [f64; 4]) -> ChiMatrix {
        ChiMatrix(Matrix4::from_diagonal(&nalgebra::Vector4::from(p.map(|x| C64::new(x, 0.0)))))
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        let e = h.symmetric_eigen().eigenvalues;
        [e[0], e[1], e[2], e[3]]
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// 16x16 map from vec(chi) to vec(PTM), and its inverse.
fn basis_change() -> &'static (DMatrix<C64>, DMatrix<C64>) {
    static M: OnceLock<(DMatrix<C64>, DMatrix<C64>)> = OnceLock::new();
    M.get_or_init(|| {
        let mut t = DMatrix::<C64>::zeros(16, 16);
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                for m in Pauli::ALL {
                    for n in Pauli::ALL {
                        let prod = mul2(&mul2(&mul2(&a.matrix(), &m.matrix()), &b.matrix()), &n.matrix());
                        t[(a.index() * 4 + b.index(), m.index() * 4 + n.index())] = 0.5 * trace2(&prod);
                    }
                }
            }
        }
        let inv = t.clone().try_inverse().expect("Pauli basis change is invertible");
        (t, inv)
    })
}

pub fn chi_to_ptm(chi: &ChiMatrix) -> Ptm {
    let (t, _) = basis_change();
    let v = DMatrix::from_iterator(16, 1, (0..16).map(|i| chi.0[(i / 4, i % 4)]));
    let g = t * v;
    let mut out = [[0.0; 4]; 4];
    for i in 0..16 {
        out[i / 4][i % 4] = g[(i, 0)].re;
    }
    Ptm(out)
}

pub fn ptm_to_chi(g: &Ptm) -> ChiMatrix {
    let (_, inv) = basis_change();
    let v = DMatrix::from_iterator(16, 1, (0..16).map(|i| C64::new(g.0[i / 4][i % 4], 0.0)));
    let c = inv * v;
    let mut out = Matrix4::<C64>::zeros();
    for i in 0..16 {
        out[(i / 4, i % 4)] = c[(i, 0)];
    }
    ChiMatrix(out)
}

/// Pauli error probabilities (the chi diagonal) from the PTM diagonal.
pub fn pauli_probabilities(g: &Ptm) -> [f64; 4] {
    let d = g.diagonal();
    Pauli::ALL.map(|m| 0.25 * Pauli::ALL.iter().map(|a| a.commutation_sign(m) * d[a.index()]).sum::<f64>())
}

/// Diagonal PTM of a Pauli channel with probabilities `(p_I, p_X, p_Y, p_Z)`.
pub fn ptm_from_pauli_probabilities(p: [f64; 4]) -> Ptm {
    Ptm::diag(Pauli::ALL.map(|a| Pauli::ALL.iter().map(|m| a.commutation_sign(*m) * p[m.index()]).sum()))
}

/// Block form of a PTM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Blocks {
    pub survival: f64,
    pub nonunital: [f64; 3],
    pub leakage: [f64; 3],
    pub unital_block: [[f64; 3]; 3],
}

pub fn blocks(g: &Ptm) -> Blocks {
    let mut u = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            u[i][j] = g.0[i + 1][j + 1];
        }
    }
    Blocks {
        survival: g.0[0][0],
        nonunital: [g.0[1][0], g.0[2][0], g.0[3][0]],
        leakage: [g.0[0][1], g.0[0][2], g.0[0][3]],
        unital_block: u,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    /// First row differs from (1,0,0,0) by this much.
    TracePreservation(f64),
    /// Most negative chi eigenvalue.
    CompletePositivity(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CptpReport {
    pub ok: bool,
    pub tp_defect: f64,
    pub min_chi_eigenvalue: f64,
    pub violations: Vec<Violation>,
}

pub const DEFAULT_CPTP_TOL: f64 = 1e-7;

pub fn is_cptp(g: &Ptm, tol: f64) -> CptpReport {
    let tp_defect = [1.0, 0.0, 0.0, 0.0].iter().zip(g.0[0].iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ev = ptm_to_chi(g).eigenvalues();
    let min_ev = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let mut violations = Vec::new();
    if tp_defect > tol {
        violations.push(Violation::TracePreservation(tp_defect));
    }
    if min_ev < -tol {
        violations.push(Violation::CompletePositivity(min_ev));
    }
    CptpReport { ok: violations.is_empty(), tp_defect, min_chi_eigenvalue: min_ev, violations }
}

/// Average gate fidelity `(Tr Gamma + 2) / 6` of a trace-preserving qubit map.
pub fn avg_gate_fidelity(g: &Ptm) -> f64 {
    (g.trace() + 2.0) / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn identity_and_x_kraus() {
        let z = c(0.0);
        let g = ptm_from_kraus_coeffs(&[[c(1.0), z, z, z]]).unwrap();
        assert_eq!(g, Ptm::identity());
        let g = ptm_from_kraus_coeffs(&[[z, c(1.0), z, z]]).unwrap();
        assert_eq!(g, Ptm::diag([1.0, 1.0, -1.0, -1.0]));
        assert_eq!(g, Ptm::pauli(Pauli::X));
        assert!(ptm_from_kraus_coeffs(&[]).is_err());
    }

    #[test]
    fn dephasing_example() {
        let z = c(0.0);
        let p: f64 = 0.75;
        let g = ptm_from_kraus_coeffs(&[[c(p.sqrt()), z, z, z], [z, z, z, c((1.0 - p).sqrt())]]).unwrap();
        let want = Ptm::diag([1.0, 0.5, 0.5, 1.0]);
        assert!(g.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn correction_matrices() {
        assert_eq!(Ptm::pauli(Pauli::I).diagonal(), [1.0, 1.0, 1.0, 1.0]);
        assert_eq!(Ptm::pauli(Pauli::X).diagonal(), [1.0, 1.0, -1.0, -1.0]);
        assert_eq!(Ptm::pauli(Pauli::Y).diagonal(), [1.0, -1.0, 1.0, -1.0]);
        assert_eq!(Ptm::pauli(Pauli::Z).diagonal(), [1.0, -1.0, -1.0, 1.0]);
        assert_eq!(compose(&Ptm::pauli(Pauli::X), &Ptm::pauli(Pauli::X)), Ptm::identity());
    }

    #[test]
    fn grn_probabilities_from_ptm() {
        let p = pauli_probabilities(&Ptm::diag([1.0, 0.9900, 0.9801, 0.9900]));
        assert_relative_eq!(p[0], 0.990025, epsilon = 1e-12);
        assert!((p[0] - 0.9900).abs() < 5e-5);
        assert!((p[1] - 0.0050).abs() < 5e-5);
        assert!((p[2] - 0.0000).abs() < 5e-5);
        assert!((p[3] - 0.0050).abs() < 5e-5);
        assert_relative_eq!(avg_gate_fidelity(&Ptm::diag([1.0, 0.9900, 0.9801, 0.9900])), 0.99335, epsilon = 1e-12);
    }

    #[test]
    fn chi_identity() {
        let g = chi_to_ptm(&ChiMatrix::pauli_channel([1.0, 0.0, 0.0, 0.0]));
        assert!(g.max_abs_diff(&Ptm::identity()) < 1e-14);
    }

    #[test]
    fn chi_round_trip_general() {
        let g = Ptm([[1.0, 0.0, 0.0, 0.0], [0.1, 0.8, 0.05, 0.0], [0.0, -0.02, 0.7, 0.01], [0.05, 0.0, 0.0, 0.85]]);
        let back = chi_to_ptm(&ptm_to_chi(&g));
        assert!(back.max_abs_diff(&g) < 1e-12);
    }

    #[test]
    fn cptp_verdicts() {
        let r = is_cptp(&Ptm::identity(), DEFAULT_CPTP_TOL);
        assert!(r.ok);
        let r = is_cptp(&Ptm::diag([1.0, 1.0, 1.0, -1.0]), DEFAULT_CPTP_TOL);
        assert!(!r.ok);
        assert!(matches!(r.violations[0], Violation::CompletePositivity(_)));
        let r = is_cptp(&Ptm::diag([0.9, 0.0, 0.0, 0.0]), DEFAULT_CPTP_TOL);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::TracePreservation(_))));
        // a non-unital, TP, CP map (amplitude damping, gamma = 0.3)
        let gam: f64 = 0.3;
        let mut ad = Ptm::diag([1.0, (1.0 - gam).sqrt(), (1.0 - gam).sqrt(), 1.0 - gam]);
        ad.0[3][0] = gam;
        assert!(is_cptp(&ad, DEFAULT_CPTP_TOL).ok);
    }

    #[test]
    fn fidelity_of_trace_one() {
        let mut g = Ptm::zero();
        g.0[0][0] = 1.0;
        g.0[1][0] = 0.2;
        g.0[3][0] = 0.2;
        assert_relative_eq!(avg_gate_fidelity(&g), 0.5, epsilon = 1e-15);
        assert_relative_eq!(avg_gate_fidelity(&Ptm::identity()), 1.0);
    }

    #[test]
    fn json_and_csv_shapes() {
        let g = Ptm::diag([1.0, 0.99, 0.98, 0.99]);
        let v = g.to_json_value();
        assert_eq!(v["order"], "IXYZ");
        assert_eq!(v["gamma"].as_array().unwrap().len(), 16);
        assert_eq!(Ptm::from_json_value(&v).unwrap(), g);
        assert_eq!(g.to_csv().lines().count(), 4);
    }

    #[test]
    fn blocks_of_identity() {
        let b = blocks(&Ptm::identity());
        assert_eq!(b.survival, 1.0);
        assert_eq!(b.nonunital, [0.0; 3]);
        assert_eq!(b.leakage, [0.0; 3]);
    }

    #[test]
    fn shift_vector_classes() {
        assert_eq!(ShiftVector(1, -1).class(), Pauli::Y);
        assert_eq!(ShiftVector(-2, 3).class(), Pauli::Z);
        assert_eq!(ShiftVector(1, -1).inverse(), ShiftVector(-1, 1));
        assert_eq!(ShiftVector(3, 0).inverse().class(), ShiftVector(3, 0).class());
    }

    #[test]
    fn power_matches_repeated_composition() {
        let g = Ptm::diag([1.0, 0.9, 0.8, 0.9]);
        let mut r = Ptm::identity();
        for _ in 0..7 {
            r = compose(&r, &g);
        }
        assert!(g.pow(7).max_abs_diff(&r) < 1e-15);
    }
}
