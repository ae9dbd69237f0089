use crate::args::{Cli, Command, ConventionArg, DecoderArg, QuadArgs, SweepModel, WignerState};
use crate::output::{channel_json, fmt_diag, probabilities_csv, ptm_csv, Artifacts};
use gkp_channels::decoders::{decision_boundary_q, optimize_decoder, BitVector, Decoder, DecoderTable, DEFAULT_HALF_WIDTH, TWIRL_SET};
use gkp_channels::export::{heatmap, line_chart, Curve};
use gkp_channels::fock_oracle::{
    gamma_grid, mixed_envelope_state, position_density, ratio_check, validate_sign_rule, wigner_raster, FockCode, FockConfig, GridSpec,
    Mixture, RATIO_TOL,
};
use gkp_channels::grn_channel::{gamma_grn_avg_with, sigma_from_beta, GrnVariance, GRN_CONV_TOL, GRN_NODES};
use gkp_channels::lattice_theta::{damped_pauli_trace, jacobi_sweep, DampingParams};
use gkp_channels::ptd_channel::{average, gamma_syn_avg_analytic, n_round_fidelity_of, Averaged, PtdKernel, SignTable};
use gkp_channels::qubit_channels::{avg_gate_fidelity, pauli_probabilities, Pauli, Ptm};
use gkp_channels::{Error, Exec, Result, SHIFT, SQRT_PI};
use serde_json::{json, Value};

/// Damping strength at which the conjugation signs are checked before any PTd average.
const SIGN_CHECK_BETA: f64 = 0.2;
/// Agreement required between the two theta series in the Jacobi sweep.
const JACOBI_TOL: f64 = 1e-10;
const JACOBI_QUERIES: usize = 200;
const JACOBI_SEED: u64 = 7;

/// Runs the parsed command, writing artifacts and the manifest into `--out`.
pub fn run(cli: &Cli) -> Result<()> {
    let exec = cli.common.exec();
    let mut out = Artifacts::new(&cli.common.out, &cli.common.format)?;
    let resolved = match &cli.command {
        Command::Ptm { beta, decoder, quad } => ptm(&mut out, *beta, *decoder, quad, exec),
        Command::Grn { sigma2, beta, convention } => grn(&mut out, *sigma2, *beta, *convention, exec),
        Command::Sweep { betas, decoders, convention, quad } => sweep(&mut out, betas, decoders, *convention, quad, exec),
        Command::Nrounds { betas, decoder, n_max, quad } => nrounds(&mut out, betas, *decoder, *n_max, quad, exec),
        Command::DecoderMap { beta, resolution, half_width } => {
            decoder_map(&mut out, *beta, *resolution, half_width.unwrap_or(DEFAULT_HALF_WIDTH), exec)
        }
        Command::OracleCheck { betas, nmax_fock, grid, corrupt_sign } => {
            oracle_check(&mut out, betas, *nmax_fock, *grid, *corrupt_sign, exec)
        }
        Command::Wigner { beta, state, logical, resolution, range, nmax_fock } => {
            wigner(&mut out, *beta, *state, *logical, *resolution, *range, *nmax_fock, exec)
        }
    };
    // a failing check still leaves its report and a manifest behind
    let (resolved, err) = match resolved {
        Ok(v) => (v, None),
        Err(Failed { resolved, error }) => (resolved, Some(error)),
    };
    out.manifest(cli, resolved)?;
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// An error together with whatever was resolved before it happened.
struct Failed {
    resolved: Value,
    error: Error,
}

impl From<Error> for Failed {
    fn from(error: Error) -> Self {
        Failed { resolved: Value::Null, error }
    }
}

type Outcome = std::result::Result<Value, Failed>;

fn decoder_of(d: DecoderArg) -> Decoder {
    match d {
        DecoderArg::Sb => Decoder::StandardBinning,
        DecoderArg::Opt => Decoder::Optimal,
        DecoderArg::None => Decoder::NoCorrection,
    }
}

fn check_signs() -> Result<()> {
    validate_sign_rule(SIGN_CHECK_BETA, &FockConfig::default(), &SignTable::default()).map(|_| ())
}

fn ptd_average(beta: f64, decoder: &Decoder, quad: &QuadArgs, exec: Exec) -> Result<Averaged> {
    let spec = quad.spec(exec);
    spec.validate()?;
    average(&PtdKernel::new(beta)?, decoder, &spec)
}

fn averaged_meta(a: &Averaged) -> Value {
    json!({
        "refinement_delta": a.refinement_delta,
        "radius_cells": a.radius_cells,
        "nodes_per_cell": a.nodes_per_cell,
        "evaluations": a.evaluations,
        "refined_panels": a.refined_panels,
        "max_imag": a.max_imag,
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(x), Value::Object(y)) = (&mut a, b) {
        x.extend(y);
    }
    a
}

fn ptm(out: &mut Artifacts, beta: f64, decoder: DecoderArg, quad: &QuadArgs, exec: Exec) -> Outcome {
    check_signs()?;
    let d = decoder_of(decoder);
    let avg = ptd_average(beta, &d, quad, exec)?;
    let mut meta = merge(json!({"beta": beta, "decoder": d.name()}), averaged_meta(&avg));
    if matches!(d, Decoder::NoCorrection) {
        let analytic = gamma_syn_avg_analytic(beta)?;
        let dev = (0..4).map(|a| (analytic.0[a][0] - avg.ptm.0[a][0]).abs()).fold(0.0, f64::max);
        meta =
            merge(meta, json!({"analytic_first_column": (0..4).map(|a| analytic.0[a][0]).collect::<Vec<_>>(), "analytic_deviation": dev}));
    }
    out.json("ptm.json", &channel_json(&avg.ptm, meta))?;
    out.csv("ptm.csv", &ptm_csv(&avg.ptm))?;
    out.csv("probabilities.csv", &probabilities_csv(&avg.ptm))?;
    println!(
        "ptm beta={beta} decoder={}: {}  F_avg={:.8}  refinement_delta={:.2e}",
        d.name(),
        fmt_diag(&avg.ptm),
        avg_gate_fidelity(&avg.ptm),
        avg.refinement_delta
    );
    Ok(json!({"beta": beta, "decoder": d.name(), "quadrature": quad.spec(exec), "radius_cells_used": avg.radius_cells}))
}

fn grn_variance(sigma2: Option<f64>, beta: Option<f64>, convention: ConventionArg) -> Result<GrnVariance> {
    match (sigma2, beta) {
        (Some(s), None) => GrnVariance::explicit(s),
        (None, Some(b)) => sigma_from_beta(b, convention.into()),
        _ => Err(Error::Argument("give exactly one of --sigma2 and --beta".into())),
    }
}

fn grn(out: &mut Artifacts, sigma2: Option<f64>, beta: Option<f64>, convention: ConventionArg, exec: Exec) -> Outcome {
    let v = grn_variance(sigma2, beta, convention)?;
    let avg = gamma_grn_avg_with(v, GRN_NODES, GRN_CONV_TOL, exec)?;
    let meta = json!({
        "sigma2": v.sigma2,
        "convention": v.convention.name(),
        "beta": beta,
        "refinement_delta": avg.refinement_delta,
        "evaluations": avg.evaluations,
    });
    out.json("grn.json", &channel_json(&avg.ptm, meta))?;
    out.csv("grn.csv", &ptm_csv(&avg.ptm))?;
    out.csv("probabilities.csv", &probabilities_csv(&avg.ptm))?;
    println!("grn sigma2={:.6} ({}): {}  F_avg={:.8}", v.sigma2, v.convention.name(), fmt_diag(&avg.ptm), avg_gate_fidelity(&avg.ptm));
    Ok(json!({"sigma2": v.sigma2, "convention": v.convention.name(), "beta": beta}))
}

fn model_name(m: SweepModel) -> &'static str {
    match m {
        SweepModel::Sb => "sb",
        SweepModel::Opt => "opt",
        SweepModel::Grn => "grn",
    }
}

fn sweep(out: &mut Artifacts, betas: &[f64], models: &[SweepModel], convention: ConventionArg, quad: &QuadArgs, exec: Exec) -> Outcome {
    if betas.is_empty() || models.is_empty() {
        return Err(Error::Argument("sweep needs at least one beta and one model".into()).into());
    }
    if models.iter().any(|m| *m != SweepModel::Grn) {
        check_signs()?;
    }
    let mut csv = String::from("beta,decoder,sigma2,p_I,p_X,p_Y,p_Z,infidelity\n");
    let mut fid: Vec<(SweepModel, Vec<(f64, f64)>)> = models.iter().map(|m| (*m, Vec::new())).collect();
    let mut rows = Vec::new();
    for &beta in betas {
        for (m, pts) in fid.iter_mut() {
            let (g, sigma2): (Ptm, Option<f64>) = match m {
                SweepModel::Sb => (ptd_average(beta, &Decoder::StandardBinning, quad, exec)?.ptm, None),
                SweepModel::Opt => (ptd_average(beta, &Decoder::Optimal, quad, exec)?.ptm, None),
                SweepModel::Grn => {
                    let v = sigma_from_beta(beta, convention.into())?;
                    (gamma_grn_avg_with(v, GRN_NODES, GRN_CONV_TOL, exec)?.ptm, Some(v.sigma2))
                }
            };
            let p = pauli_probabilities(&g);
            let f = avg_gate_fidelity(&g);
            let s2 = sigma2.map_or(String::new(), |s| format!("{s:.10e}"));
            csv.push_str(&format!(
                "{beta},{},{s2},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                model_name(*m),
                p[0],
                p[1],
                p[2],
                p[3],
                1.0 - f
            ));
            rows.push(json!({"beta": beta, "decoder": model_name(*m), "sigma2": sigma2, "pauli_probabilities": p, "f_avg": f}));
            pts.push((beta, f));
            println!("sweep beta={beta} {}: infidelity {:.6e}", model_name(*m), 1.0 - f);
        }
    }
    out.csv("sweep.csv", &csv)?;
    out.json("sweep.json", &json!({ "rows": rows }))?;
    let curves: Vec<Curve> =
        fid.iter().map(|(m, pts)| Curve::line(model_name(*m), pts.iter().map(|&(b, f)| (b, 1.0 - f)).collect())).collect();
    out.svg("sweep_infidelity.svg", &line_chart("Average infidelity", "beta", "1 - F_avg", &curves))?;
    // differences against the SB channel, when it is part of the sweep
    if let Some((_, base)) = fid.iter().find(|(m, _)| *m == SweepModel::Sb) {
        let diffs: Vec<Curve> = fid
            .iter()
            .filter(|(m, _)| *m != SweepModel::Sb)
            .map(|(m, pts)| {
                let label = format!("{} - sb", model_name(*m));
                Curve::line(label, pts.iter().zip(base).map(|(&(b, f), &(_, f0))| (b, f - f0)).collect())
            })
            .collect();
        if !diffs.is_empty() {
            out.svg("sweep_fidelity_difference.svg", &line_chart("Fidelity difference", "beta", "F_avg - F_avg(sb)", &diffs))?;
        }
    }
    Ok(json!({
        "betas": betas,
        "decoders": models.iter().map(|m| model_name(*m)).collect::<Vec<_>>(),
        "grn_convention": gkp_channels::grn_channel::Convention::from(convention).name(),
        "quadrature": quad.spec(exec),
    }))
}

fn nrounds(out: &mut Artifacts, betas: &[f64], decoder: DecoderArg, n_max: u32, quad: &QuadArgs, exec: Exec) -> Outcome {
    if n_max < 2 {
        return Err(Error::Fit(format!("n_max must be >= 2 to fit a decay (got {n_max})")).into());
    }
    check_signs()?;
    let d = decoder_of(decoder);
    let mut fits = Vec::new();
    let mut curves = Vec::new();
    for &beta in betas {
        let g = ptd_average(beta, &d, quad, exec)?.ptm;
        let (pts, fit) = n_round_fidelity_of(&g, n_max)?;
        let mut csv = String::from("n,f_avg,fit\n");
        for &(n, f) in &pts {
            csv.push_str(&format!("{n},{f:.12e},{:.12e}\n", fit.eval(n as f64)));
        }
        out.csv(&format!("nrounds_beta{beta}.csv"), &csv)?;
        println!("nrounds beta={beta} {}: a={:.6} b={:.6e} residual={:.2e}", d.name(), fit.a, fit.b, fit.residual);
        fits.push(json!({"beta": beta, "a": fit.a, "b": fit.b, "residual": fit.residual, "f_avg_1": pts[0].1}));
        curves.push(Curve::scatter(format!("beta {beta}"), pts.iter().map(|&(n, f)| (n as f64, f)).collect()));
        let fine: Vec<(f64, f64)> = (0..=10 * (n_max - 1)).map(|i| 1.0 + i as f64 / 10.0).map(|n| (n, fit.eval(n))).collect();
        curves.push(Curve::line(format!("fit {beta}"), fine));
    }
    out.json("fits.json", &json!({"decoder": d.name(), "n_range": [1, n_max], "fits": fits}))?;
    out.svg("nrounds.svg", &line_chart("Fidelity after N rounds", "N", "F_avg", &curves))?;
    Ok(json!({"betas": betas, "decoder": d.name(), "n_max": n_max, "quadrature": quad.spec(exec)}))
}

fn decoder_map(out: &mut Artifacts, beta: f64, resolution: usize, half_width: f64, exec: Exec) -> Outcome {
    let k = PtdKernel::new(beta)?;
    let kernel = |s: &_| Ok(k.gamma_syn(s));
    let opt = optimize_decoder(beta, resolution, half_width, kernel, exec)?;
    let sb = DecoderTable::standard_binning(resolution, half_width)?;
    out.csv("decoder_opt.csv", &opt.to_csv())?;
    out.csv("decoder_sb.csv", &sb.to_csv())?;
    out.svg("decoder_opt.svg", &opt.to_svg(512))?;
    out.svg("decoder_sb.svg", &sb.to_svg(512))?;
    let lower = decision_boundary_q(kernel, -SHIFT, 0.0)?;
    let upper = decision_boundary_q(kernel, 0.0, SHIFT)?;
    let counts =
        |t: &DecoderTable| Pauli::ALL.iter().map(|p| (p.label().to_string(), json!(t.count(*p)))).collect::<serde_json::Map<_, _>>();
    let summary = json!({
        "beta": beta,
        "boundary_q": {"lower": lower, "upper": upper},
        "sb_boundary_q": {"lower": -0.5 * SHIFT, "upper": 0.5 * SHIFT},
        "boundary_shift": {
            "lower": lower.map(|x| x + 0.5 * SHIFT),
            "upper": upper.map(|x| x - 0.5 * SHIFT),
        },
        "i_region_width": {"opt": opt.i_region_width(), "sb": sb.i_region_width()},
        "counts": {"opt": counts(&opt), "sb": counts(&sb)},
        "differing_points": opt.entries.iter().zip(&sb.entries).filter(|(a, b)| a != b).count(),
    });
    out.json("decoder_map.json", &summary)?;
    let show = |x: Option<f64>| x.map_or("none".to_string(), |v| format!("{:.6}", v / SHIFT));
    println!(
        "decoder-map beta={beta}: I/X boundaries at q/h = {} and {} (SB: -0.5, 0.5); I-region width opt {:.4} sb {:.4}",
        show(lower),
        show(upper),
        opt.i_region_width(),
        sb.i_region_width()
    );
    Ok(json!({"beta": beta, "resolution": resolution, "half_width": half_width}))
}

fn fock_config(nmax: Option<usize>) -> FockConfig {
    let d = FockConfig::default();
    FockConfig { n_max: nmax.unwrap_or(d.n_max), ..d }
}

fn oracle_check(out: &mut Artifacts, betas: &[f64], nmax: Option<usize>, grid: usize, corrupt: bool, exec: Exec) -> Outcome {
    if grid < 2 {
        return Err(Error::Argument(format!("displacement grid needs at least 2 points per axis (got {grid})")).into());
    }
    let cfg = fock_config(nmax);
    let table = if corrupt { SignTable::default().with_flipped(Pauli::X, BitVector(0, 1)) } else { SignTable::default() };
    let resolved = json!({"betas": betas, "n_max": cfg.n_max, "grid": grid, "corrupt_sign": corrupt});
    let gammas = gamma_grid(grid);
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    let mut signs = Vec::new();
    let mut traces = Vec::new();
    for &beta in betas {
        let r = ratio_check(beta, &gammas, &cfg, exec).map_err(|e| Failed { resolved: resolved.clone(), error: e })?;
        println!("oracle beta={beta}: max relative ratio deviation {:.2e} ({})", r.max_rel_dev, verdict(r.passed));
        if !r.passed {
            failures.push(format!("ratio check at beta {beta}: {:.2e} > {RATIO_TOL:e}", r.max_rel_dev));
        }
        ratios.push(r);
        match validate_sign_rule(beta, &cfg, &table) {
            Ok(rep) => signs.push(json!({"beta": beta, "passed": true, "cases": rep.cases})),
            Err(Error::Oracle(msg)) => {
                println!("oracle beta={beta}: {msg}");
                failures.push(format!("beta {beta}: {msg}"));
                signs.push(json!({"beta": beta, "passed": false, "error": msg}));
            }
            Err(e) => return Err(Failed { resolved, error: e }),
        }
        let code = FockCode::new(beta, &cfg).map_err(|e| Failed { resolved: resolved.clone(), error: e })?;
        let p = DampingParams::new(beta)?;
        let (fi, ti) = (code.pauli_trace(Pauli::I), damped_pauli_trace(&p, Pauli::I));
        let dev =
            [Pauli::X, Pauli::Z].iter().map(|&a| (code.pauli_trace(a) / fi - damped_pauli_trace(&p, a) / ti).abs()).fold(0.0, f64::max);
        if dev > RATIO_TOL {
            failures.push(format!("damped Pauli traces at beta {beta} differ by {dev:.2e}"));
        }
        traces.push(json!({"beta": beta, "max_ratio_deviation": dev}));
    }
    let jac = jacobi_sweep(JACOBI_QUERIES, JACOBI_SEED).map_err(|e| Failed { resolved: resolved.clone(), error: e })?;
    println!("jacobi sweep: {} queries, max relative deviation {:.2e}", jac.queries, jac.max_rel_dev);
    if jac.max_rel_dev > JACOBI_TOL {
        failures.push(format!("Jacobi sweep deviation {:.2e} > {JACOBI_TOL:e}", jac.max_rel_dev));
    }
    let report = json!({
        "passed": failures.is_empty(),
        "failures": failures,
        "ratio_checks": ratios,
        "sign_rule": signs,
        "pauli_traces": traces,
        "jacobi": jac,
    });
    out.json("oracle.json", &report).map_err(|e| Failed { resolved: resolved.clone(), error: e })?;
    if failures.is_empty() {
        Ok(resolved)
    } else {
        Err(Failed { resolved, error: Error::Oracle(failures.join("; ")) })
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Window half-width holding the envelope down to a millionth of its peak,
/// plus one lattice spacing for the shifted components.
fn auto_range(beta: f64) -> f64 {
    (1e6f64.ln() / beta.tanh()).sqrt() + SQRT_PI
}

#[allow(clippy::too_many_arguments)]
fn wigner(
    out: &mut Artifacts,
    beta: f64,
    state: WignerState,
    logical: u8,
    resolution: usize,
    range: Option<f64>,
    nmax: Option<usize>,
    exec: Exec,
) -> Outcome {
    if logical > 1 {
        return Err(Error::Argument(format!("logical must be 0 or 1 (got {logical})")).into());
    }
    DampingParams::new(beta)?;
    let half = range.unwrap_or_else(|| auto_range(beta));
    let grid = GridSpec { q_range: (-half, half), p_range: (-half, half), resolution };
    let cfg = FockConfig { grid, ..fock_config(nmax) };
    let (mix, weights): (Mixture, Option<[f64; 4]>) = match state {
        WignerState::Mixed => {
            let (m, w) = mixed_envelope_state(beta, logical, &cfg)?;
            (m, Some(w))
        }
        WignerState::Damped => {
            let code = FockCode::new(beta, &cfg)?;
            (vec![(1.0, code.word(logical).to_vec())], None)
        }
    };
    let w = wigner_raster(&mix, &grid, exec)?;
    for msg in &w.warnings {
        eprintln!("warning: {msg}");
    }
    out.csv("wigner.csv", &w.to_csv())?;
    // a displacement by alpha moves phase space by sqrt(2) alpha
    let centres: Vec<(f64, f64)> = TWIRL_SET.iter().map(|b| (SQRT_PI * b.0 as f64, SQRT_PI * b.1 as f64)).collect();
    let marks = if weights.is_some() { centres.clone() } else { vec![(0.0, 0.0)] };
    out.svg("wigner.svg", &heatmap(&w.values, grid.q_range, grid.p_range, 600, &marks))?;

    let (dq, _) = w.steps();
    let qm = w.q_marginal();
    let pm: Vec<f64> = (0..resolution)
        .map(|ip| {
            let col: Vec<f64> = w.values.iter().map(|row| row[ip]).collect();
            dq * (col.iter().sum::<f64>() - 0.5 * (col[0] + col[resolution - 1]))
        })
        .collect();
    let norm: f64 = mix.iter().map(|(wt, _)| wt).sum();
    let mut csv = String::from("x,q_marginal,p_marginal,position_density\n");
    for i in 0..resolution {
        let q = grid.q(i);
        let dens: f64 = mix.iter().map(|(wt, v)| wt * position_density(v, q)).sum::<f64>() / norm;
        csv.push_str(&format!("{q:.10e},{:.10e},{:.10e},{dens:.10e}\n", qm[i], pm[i]));
    }
    out.csv("wigner_marginals.csv", &csv)?;
    let marg_dev = (0..resolution)
        .map(|i| {
            let q = grid.q(i);
            let dens: f64 = mix.iter().map(|(wt, v)| wt * position_density(v, q)).sum::<f64>() / norm;
            (qm[i] - dens).abs()
        })
        .fold(0.0, f64::max);
    let qs: Vec<(f64, f64)> = (0..resolution).map(|i| (grid.q(i), qm[i])).collect();
    let ps: Vec<(f64, f64)> = (0..resolution).map(|i| (grid.p(i), pm[i])).collect();
    out.svg("wigner_marginals.svg", &line_chart("Wigner marginals", "x", "density", &[Curve::line("q", qs), Curve::line("p", ps)]))?;

    if let Some(wts) = weights {
        let mut t = String::from("b1,b2,weight,centre_q,centre_p\n");
        for ((b, wt), c) in TWIRL_SET.iter().zip(wts).zip(&centres) {
            t.push_str(&format!("{},{},{wt:.12e},{:.10},{:.10}\n", b.0, b.1, c.0, c.1));
        }
        out.csv("mixture.csv", &t)?;
    }
    let summary = json!({
        "beta": beta,
        "state": match state { WignerState::Mixed => "mixed", WignerState::Damped => "damped" },
        "logical": logical,
        "grid": grid,
        "n_max": cfg.n_max,
        "integral": w.total(),
        "min_value": w.values.iter().flatten().fold(f64::INFINITY, |m, &v| m.min(v)),
        "q_marginal_max_deviation": marg_dev,
        "mixture_weights": weights,
        "warnings": w.warnings,
    });
    out.json("wigner.json", &summary)?;
    println!("wigner beta={beta}: integral {:.6}, marginal deviation {:.2e}, {} warning(s)", w.total(), marg_dev, w.warnings.len());
    Ok(json!({"beta": beta, "range": half, "resolution": resolution, "n_max": cfg.n_max, "logical": logical}))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_range_covers_envelope() {
        for beta in [0.1, 0.2, 0.4] {
            let r = auto_range(beta) - SQRT_PI;
            assert!((-beta.tanh() * r * r).exp() <= 1.0001e-6);
        }
    }

    #[test]
    fn grn_variance_needs_exactly_one_source() {
        assert!(grn_variance(None, None, ConventionArg::HalfTanh).is_err());
        assert!(grn_variance(Some(0.05), Some(0.1), ConventionArg::HalfTanh).is_err());
        let v = grn_variance(None, Some(0.1), ConventionArg::HalfTanh).unwrap();
        assert!((v.sigma2 - 0.5 * 0.1f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn merge_overrides_and_extends() {
        let m = merge(json!({"a": 1, "b": 2}), json!({"b": 3, "c": 4}));
        assert_eq!(m, json!({"a": 1, "b": 3, "c": 4}));
    }

    #[test]
    fn shift_maps_to_lattice_spacing() {
        let a = gkp_channels::C64::new(SHIFT, 0.0);
        assert!((2f64.sqrt() * a.re - SQRT_PI).abs() < 1e-15);
    }
}
