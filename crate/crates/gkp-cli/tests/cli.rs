use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn out_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("gkp-cli-{}", std::process::id())).join(name);
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn gkp(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkp")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn read_json(p: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn grn_variance_source_is_exclusive() {
    let d = out_dir("grn-usage");
    assert_eq!(gkp(&d, &["grn", "--sigma2", "0.05", "--beta", "0.1"]).status.code(), Some(2));
    assert_eq!(gkp(&d, &["grn"]).status.code(), Some(2));
}

#[test]
fn grn_records_resolved_variance() {
    let d = out_dir("grn-beta");
    let o = gkp(&d, &["grn", "--beta", "0.1", "--convention", "half_tanh"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = read_json(d.join("manifest.json"));
    let s2 = m["resolved"]["sigma2"].as_f64().unwrap();
    assert!((s2 - 0.5 * 0.1f64.tanh()).abs() < 1e-15);
    assert_eq!(m["resolved"]["convention"], "half_tanh");
    assert!(m["versions"]["gkp-channels"].is_string());
    let files: Vec<&str> = m["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    for f in &files {
        assert!(d.join(f).exists(), "{f}");
    }
    let g = read_json(d.join("grn.json"));
    assert_eq!(g["order"], "IXYZ");
    assert_eq!(g["convention"], "half_tanh");
    assert!(g["cptp"]["ok"].as_bool().unwrap());
}

#[test]
fn grn_noiseless_limit() {
    let d = out_dir("grn-tiny");
    let o = gkp(&d, &["grn", "--sigma2", "0.000001"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = read_json(d.join("grn.json"));
    assert!(g["f_avg"].as_f64().unwrap() >= 1.0 - 1e-4);
}

#[test]
fn ptm_csv_has_header_and_labels() {
    let d = out_dir("grn-csv");
    assert!(gkp(&d, &["--format", "csv", "grn", "--sigma2", "0.05"]).status.success());
    let csv = std::fs::read_to_string(d.join("grn.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "row,I,X,Y,Z");
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("X,"));
    // only the manifest accompanies CSV output
    assert!(!d.join("grn.json").exists());
    let m = read_json(d.join("manifest.json"));
    assert!(m["files"].as_array().unwrap().iter().all(|f| f.as_str().unwrap().ends_with(".csv")));
}

#[test]
fn no_correction_matches_analytic_first_column() {
    let d = out_dir("ptm-none");
    let o = gkp(&d, &["ptm", "--beta", "0.2", "--decoder", "none"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = read_json(d.join("ptm.json"));
    assert!(g["analytic_deviation"].as_f64().unwrap() <= 1e-5);
    let col = g["analytic_first_column"].as_array().unwrap();
    assert!((col[1].as_f64().unwrap() - 0.0374).abs() <= 5e-4);
    // syndrome extraction alone always has F_avg = 1/2
    assert!((g["f_avg"].as_f64().unwrap() - 0.5).abs() <= 1e-9);
}

#[test]
fn nrounds_rejects_single_round() {
    let d = out_dir("nrounds-1");
    let o = gkp(&d, &["nrounds", "--betas", "0.2", "--decoder", "sb", "--n-max", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fit"), "{}", stderr(&o));
}

#[test]
fn nrounds_first_round_matches_ptm() {
    let d = out_dir("nrounds");
    let o = gkp(&d, &["nrounds", "--betas", "0.2", "--decoder", "sb", "--n-max", "6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f1 = read_json(d.join("fits.json"))["fits"][0]["f_avg_1"].as_f64().unwrap();
    let e = out_dir("nrounds-ptm");
    assert!(gkp(&e, &["ptm", "--beta", "0.2", "--decoder", "sb"]).status.success());
    let f = read_json(e.join("ptm.json"))["f_avg"].as_f64().unwrap();
    assert!((f1 - f).abs() < 1e-12);
    let csv = std::fs::read_to_string(d.join("nrounds_beta0.2.csv")).unwrap();
    let fs: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(fs.len(), 6);
    assert!(fs.windows(2).all(|w| w[1] <= w[0]) && fs.iter().all(|&x| x > 0.5));
}

#[test]
fn corrupted_sign_table_fails_with_report() {
    let d = out_dir("oracle-corrupt");
    let o = gkp(&d, &["oracle-check", "--betas", "0.2", "--corrupt-sign"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let r = read_json(d.join("oracle.json"));
    assert_eq!(r["passed"], false);
    assert!(d.join("manifest.json").exists());
}

#[test]
fn small_fock_cutoff_names_the_remedy() {
    let d = out_dir("oracle-cutoff");
    let o = gkp(&d, &["oracle-check", "--betas", "0.1", "--nmax-fock", "130"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("--nmax-fock"), "{}", stderr(&o));
}

#[test]
fn oracle_check_passes_by_default() {
    let d = out_dir("oracle");
    let o = gkp(&d, &["oracle-check", "--grid", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(d.join("oracle.json"));
    assert_eq!(r["passed"], true);
    assert_eq!(r["ratio_checks"].as_array().unwrap().len(), 3);
    assert!(r["jacobi"]["max_rel_dev"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn decoder_map_boundaries() {
    let step = 2.0 * gkp_channels::SHIFT / 101.0;
    let d = out_dir("map-04");
    assert!(gkp(&d, &["decoder-map", "--beta", "0.4"]).status.success());
    let m = read_json(d.join("decoder_map.json"));
    assert!(m["i_region_width"]["opt"].as_f64().unwrap() > m["i_region_width"]["sb"].as_f64().unwrap());
    let csv = std::fs::read_to_string(d.join("decoder_sb.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("mu_q,mu_p,pauli"));
    assert_eq!(csv.lines().count(), 101 * 101 + 1);

    let d = out_dir("map-01");
    assert!(gkp(&d, &["decoder-map", "--beta", "0.1"]).status.success());
    let m = read_json(d.join("decoder_map.json"));
    for side in ["lower", "upper"] {
        let off = m["boundary_shift"][side].as_f64().unwrap().abs();
        assert!(off < step, "{side}: {off}");
    }
}

#[test]
fn wigner_mixture_table() {
    let d = out_dir("wigner");
    let o = gkp(&d, &["wigner", "--beta", "0.4", "--resolution", "41"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(d.join("mixture.csv")).unwrap();
    let w: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    for (x, want) in w.iter().zip([0.31, 0.31, 0.19, 0.19]) {
        assert!((x - want).abs() < 5e-3, "{x}");
    }
    let s = read_json(d.join("wigner.json"));
    assert!((s["integral"].as_f64().unwrap() - 1.0).abs() < 0.02);
}

#[test]
fn sweep_reports_equal_x_and_z() {
    let d = out_dir("sweep");
    let o = gkp(&d, &["sweep", "--betas", "0.2,0.3", "--decoders", "sb,grn"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(d.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("beta,decoder,sigma2,p_I,p_X,p_Y,p_Z,infidelity"));
    let mut n = 0;
    for l in lines {
        let c: Vec<&str> = l.split(',').collect();
        let (px, pz): (f64, f64) = (c[4].parse().unwrap(), c[6].parse().unwrap());
        assert!((px - pz).abs() < 1e-8, "{l}");
        n += 1;
    }
    assert_eq!(n, 4);
    assert!(d.join("sweep_fidelity_difference.svg").exists());
}

/// Outputs other than the manifest must not depend on scheduling.
#[test]
fn sequential_and_parallel_runs_are_byte_identical() {
    for args in [vec!["grn", "--sigma2", "0.07"], vec!["decoder-map", "--beta", "0.3", "--resolution", "31"]] {
        let a = out_dir(&format!("det-par-{}", args[0]));
        let b = out_dir(&format!("det-seq-{}", args[0]));
        assert!(gkp(&a, &args).status.success());
        let mut seq = vec!["--sequential"];
        seq.extend(&args);
        assert!(gkp(&b, &seq).status.success());
        let files = read_json(a.join("manifest.json"))["files"].clone();
        for f in files.as_array().unwrap() {
            let f = f.as_str().unwrap();
            assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
        }
    }
}
