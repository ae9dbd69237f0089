use crate::args::{Cli, Format};
use gkp_channels::qubit_channels::{avg_gate_fidelity, is_cptp, pauli_probabilities, Ptm};
use gkp_channels::Result;
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

/// CPTP tolerance applied to every emitted channel.
pub const CPTP_TOL: f64 = 1e-6;

/// Writes artifacts into one directory, honoring the requested formats, and
/// remembers what was written for the manifest.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    formats: Vec<Format>,
    files: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: &Path, formats: &[Format]) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), formats: formats.to_vec(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn put(&mut self, fmt: Format, name: &str, content: &str) -> Result<()> {
        if self.formats.contains(&fmt) {
            std::fs::write(self.dir.join(name), content)?;
            self.files.push(name.to_string());
        }
        Ok(())
    }

    pub fn csv(&mut self, name: &str, content: &str) -> Result<()> {
        self.put(Format::Csv, name, content)
    }

    pub fn json(&mut self, name: &str, v: &Value) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.put(Format::Json, name, &s)
    }

    pub fn svg(&mut self, name: &str, content: &str) -> Result<()> {
        self.put(Format::Svg, name, content)
    }

    /// Echoes the parsed command line, the resolved parameters and the files
    /// written. The only wall-clock content of a run lives here.
    pub fn manifest(&self, cli: &Cli, resolved: Value) -> Result<()> {
        let created = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let m = json!({
            "command": cli.command.name(),
            "args": cli,
            "resolved": resolved,
            "versions": {
                "gkp-cli": env!("CARGO_PKG_VERSION"),
                "gkp-channels": gkp_channels::VERSION,
            },
            "threaded": cli.common.exec().is_threaded(),
            "files": self.files,
            "created_unix": created,
        });
        let mut s = serde_json::to_string_pretty(&m)?;
        s.push('\n');
        std::fs::write(self.dir.join("manifest.json"), s)?;
        Ok(())
    }
}

pub const LABELS: [&str; 4] = ["I", "X", "Y", "Z"];

/// PTM with a header row and row labels.
pub fn ptm_csv(g: &Ptm) -> String {
    let mut s = String::from("row,I,X,Y,Z\n");
    for (label, row) in LABELS.iter().zip(&g.0) {
        let vals: Vec<String> = row.iter().map(|v| format!("{v:.15e}")).collect();
        s.push_str(&format!("{label},{}\n", vals.join(",")));
    }
    s
}

pub fn probabilities_csv(g: &Ptm) -> String {
    let mut s = String::from("pauli,probability\n");
    for (label, p) in LABELS.iter().zip(pauli_probabilities(g)) {
        s.push_str(&format!("{label},{p:.15e}\n"));
    }
    s
}

/// PTM JSON with Pauli probabilities, fidelity and CPTP verdict, merged with `meta`.
pub fn channel_json(g: &Ptm, meta: Value) -> Value {
    let mut v = g.to_json_value();
    let p = pauli_probabilities(g);
    let obj = v.as_object_mut().expect("PTM JSON is an object");
    obj.insert("pauli_probabilities".into(), json!({"I": p[0], "X": p[1], "Y": p[2], "Z": p[3]}));
    obj.insert("f_avg".into(), json!(avg_gate_fidelity(g)));
    obj.insert("cptp".into(), serde_json::to_value(is_cptp(g, CPTP_TOL)).expect("report serializes"));
    if let Value::Object(m) = meta {
        let extra: Map<String, Value> = m;
        obj.extend(extra);
    }
    v
}

pub fn fmt_diag(g: &Ptm) -> String {
    let d = g.diagonal();
    format!("diag({:.6}, {:.6}, {:.6}, {:.6})", d[0], d[1], d[2], d[3])
}
