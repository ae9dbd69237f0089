use gkp_channels::decoders::{correction_score, optimal_choice, sb_pauli, Syndrome};
use gkp_channels::exec::{pairwise_sum, Exec};
use gkp_channels::grn_channel::{gamma_grn_conditional, GrnVariance};
use gkp_channels::lattice_theta::{DampedKernel, DampingParams};
use gkp_channels::ptd_channel::{n_round_curve, PtdKernel};
use gkp_channels::qubit_channels::{
    compose, is_cptp, pauli_probabilities, ptm_from_kraus_coeffs, ptm_from_pauli_probabilities, Pauli, ShiftVector,
};
use gkp_channels::C64;
use proptest::prelude::*;

fn probability4() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.0f64..1.0).prop_filter("non-zero mass", |w| w.iter().sum::<f64>() > 1e-3).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.map(|x| x / s)
    })
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn damped_elements_are_hermitian(beta in 0.1f64..1.0, re in -3.0f64..3.0, im in -3.0f64..3.0, j in 0u8..2, k in 0u8..2) {
        let kern = DampedKernel::new(DampingParams::new(beta).unwrap());
        let g = C64::new(re, im);
        let a = kern.element(g, j, k);
        let b = kern.element(-g, k, j).conj();
        let scale = kern.element(C64::new(0.0, 0.0), 0, 0).norm();
        prop_assert!((a - b).norm() <= 1e-12 * scale.max(a.norm()), "{a} vs {b}");
    }

    #[test]
    fn sb_decisions_are_shift_covariant(mq in -30.0f64..30.0, mp in -30.0f64..30.0, l1 in -12i64..12, l2 in -12i64..12) {
        let s = Syndrome::new(mq, mp);
        let l = ShiftVector(l1, l2);
        prop_assert_eq!(sb_pauli(&s.shifted(l)), sb_pauli(&s).mul_class(l.class()));
    }

    #[test]
    fn optimal_choice_never_scores_below_sb(beta in 0.1f64..0.6, mq in -2.0f64..2.0, mp in -2.0f64..2.0) {
        let k = PtdKernel::new(beta).unwrap();
        let s = Syndrome::new(mq, mp);
        let g = k.gamma_syn(&s);
        prop_assert!(correction_score(optimal_choice(&s, &g), &g) >= correction_score(sb_pauli(&s), &g));
    }

    #[test]
    fn conditional_maps_are_real(beta in 0.1f64..0.6, mq in -3.0f64..3.0, mp in -3.0f64..3.0) {
        let k = PtdKernel::new(beta).unwrap();
        let (g, im) = k.gamma_syn_with_imag(&Syndrome::new(mq, mp));
        let scale = g.0.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(im <= 1e-10 * scale.max(1e-300), "imag {im:e} against {scale:e}");
    }

    #[test]
    fn grn_conditional_is_bounded_by_its_trace_entry(s2 in 0.01f64..0.3, mq in -2.0f64..2.0, mp in -2.0f64..2.0) {
        let g = gamma_grn_conditional(GrnVariance::explicit(s2).unwrap(), &Syndrome::new(mq, mp)).unwrap();
        prop_assert!(g.0[0][0] > 0.0);
        for a in 1..4 {
            prop_assert!(g.0[a][a].abs() <= g.0[0][0] * (1.0 + 1e-12));
        }
        prop_assert!(g.max_off_diagonal() == 0.0);
    }

    #[test]
    fn pauli_channel_round_trip(p in probability4()) {
        let back = pauli_probabilities(&ptm_from_pauli_probabilities(p));
        for (a, b) in p.iter().zip(back) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn adjoint_is_transpose(k in prop::collection::vec(prop::array::uniform4(complex()), 1..4)) {
        let g = ptm_from_kraus_coeffs(&k).unwrap();
        let adj: Vec<[C64; 4]> = k.iter().map(|c| c.map(|z| z.conj())).collect();
        let ga = ptm_from_kraus_coeffs(&adj).unwrap();
        prop_assert!(ga.max_abs_diff(&g.transpose()) <= 1e-12);
    }

    #[test]
    fn composed_pauli_channels_stay_cptp(p in probability4(), q in probability4()) {
        let a = ptm_from_pauli_probabilities(p);
        let b = ptm_from_pauli_probabilities(q);
        let c = compose(&a, &b);
        prop_assert!(is_cptp(&c, 1e-12).ok);
        for i in 0..4 {
            prop_assert!((c.0[i][i] - a.0[i][i] * b.0[i][i]).abs() <= 1e-15);
        }
    }

    #[test]
    fn fidelity_decays_monotonically(pi in 0.5f64..1.0, w in probability4(), n in 2u32..20) {
        // p_I > 1/2 keeps every PTM diagonal entry positive
        let p = [pi, (1.0 - pi) * w[1], (1.0 - pi) * w[2], (1.0 - pi) * (w[0] + w[3])];
        let curve = n_round_curve(&ptm_from_pauli_probabilities(p), n);
        prop_assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-15));
        prop_assert!(curve.iter().all(|&(_, f)| f >= 0.5 - 1e-12));
    }

    #[test]
    fn convention_gap_is_third_order(beta in 0.0f64..0.5) {
        prop_assert!(((beta / 2.0).tanh() - 0.5 * beta.tanh()).abs() <= beta.powi(3) / 8.0 + 1e-16);
    }

    #[test]
    fn parallel_and_sequential_sums_agree(vals in prop::collection::vec(-1e3f64..1e3, 1..200)) {
        let parts = |e: Exec| e.map(vals.len(), |i| {
            let mut m = [[0.0; 4]; 4];
            m[i % 4][(i / 4) % 4] = vals[i];
            m[3 - i % 4][0] = vals[i].sin();
            m
        });
        let a = pairwise_sum(&parts(Exec::Parallel));
        let b = pairwise_sum(&parts(Exec::Sequential));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn sb_only_depends_on_the_scaled_bin() {
    // the midpoint of every scaled bin decodes to its parity pair
    let h = gkp_channels::SHIFT;
    for n1 in -3i64..=3 {
        for n2 in -3i64..=3 {
            let s = Syndrome::new(h * n1 as f64, h * n2 as f64);
            assert_eq!(sb_pauli(&s), Pauli::from_bits(n1, n2));
        }
    }
}
