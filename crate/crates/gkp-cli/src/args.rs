use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use gkp_channels::grn_channel::Convention;
use gkp_channels::ptd_channel::QuadratureSpec;
use gkp_channels::Exec;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "gkp", version, about = "Logical qubit channels of finite-energy GKP teleportation")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Artifact formats to write; the manifest is always written.
    #[arg(long, global = true, value_delimiter = ',', default_value = "csv,json,svg")]
    pub format: Vec<Format>,
    /// Run every loop on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

impl Common {
    pub fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderArg {
    /// Standard binning.
    Sb,
    /// Pointwise optimal correction.
    Opt,
    /// No correction (syndrome extraction only).
    None,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionArg {
    /// sigma2 = tanh(beta/2)
    Twirl,
    /// sigma2 = tanh(beta)/2
    #[value(name = "half_tanh")]
    HalfTanh,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Twirl => Convention::Twirl,
            ConventionArg::HalfTanh => Convention::HalfTanh,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepModel {
    Sb,
    Opt,
    Grn,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WignerState {
    /// Equal-bit mixture over the four shifted envelopes.
    Mixed,
    /// A single damped codeword.
    Damped,
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct QuadArgs {
    /// Minimum half-width of the syndrome window in SB bins.
    #[arg(long)]
    pub radius_cells: Option<usize>,
    /// Gauss-Legendre nodes per bin and axis.
    #[arg(long)]
    pub nodes_per_cell: Option<usize>,
    /// Allowed PTM change when the nodes are doubled.
    #[arg(long)]
    pub conv_tol: Option<f64>,
    /// Bisection depth at decision boundaries.
    #[arg(long)]
    pub max_depth: Option<u32>,
    /// Skip the doubled-node certification run.
    #[arg(long)]
    pub no_certify: bool,
}

impl QuadArgs {
    pub fn spec(&self, exec: Exec) -> QuadratureSpec {
        let d = QuadratureSpec::default();
        QuadratureSpec {
            radius_cells: self.radius_cells.unwrap_or(d.radius_cells),
            nodes_per_cell: self.nodes_per_cell.unwrap_or(d.nodes_per_cell),
            conv_tol: self.conv_tol.unwrap_or(d.conv_tol),
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            certify: !self.no_certify,
            exec,
            ..d
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Syndrome-averaged PTM of the twirled damped channel.
    Ptm {
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value = "sb")]
        decoder: DecoderArg,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// PTM of the Gaussian random noise channel.
    #[command(group(ArgGroup::new("variance").required(true).args(["sigma2", "beta"])))]
    Grn {
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_enum, default_value = "half_tanh")]
        convention: ConventionArg,
    },
    /// Pauli probabilities and infidelities over a list of damping strengths.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.15,0.2,0.25,0.3,0.35,0.4")]
        betas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "sb,opt,grn")]
        decoders: Vec<SweepModel>,
        /// Variance convention of the GRN comparison channel.
        #[arg(long, value_enum, default_value = "half_tanh")]
        convention: ConventionArg,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Fidelity after N rounds with an exponential fit.
    Nrounds {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.15,0.2,0.4")]
        betas: Vec<f64>,
        #[arg(long, value_enum, default_value = "opt")]
        decoder: DecoderArg,
        /// Rounds N = 1..=n_max entering the fit.
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Optimized decoder map with the SB reference.
    DecoderMap {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = gkp_channels::decoders::DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Half-width of the raw syndrome window.
        #[arg(long)]
        half_width: Option<f64>,
    },
    /// Fock-space ratio checks, sign-rule validation and the theta Jacobi sweep.
    OracleCheck {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.4")]
        betas: Vec<f64>,
        #[arg(long)]
        nmax_fock: Option<usize>,
        /// Points per axis of the displacement grid.
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, hide = true)]
        corrupt_sign: bool,
    },
    /// Wigner raster, marginals and mixture table.
    Wigner {
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value = "mixed")]
        state: WignerState,
        #[arg(long, default_value_t = 0)]
        logical: u8,
        #[arg(long, default_value_t = 121)]
        resolution: usize,
        /// Half-width of the square phase-space window; sized from the envelope when omitted.
        #[arg(long)]
        range: Option<f64>,
        #[arg(long)]
        nmax_fock: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ptm { .. } => "ptm",
            Command::Grn { .. } => "grn",
            Command::Sweep { .. } => "sweep",
            Command::Nrounds { .. } => "nrounds",
            Command::DecoderMap { .. } => "decoder-map",
            Command::OracleCheck { .. } => "oracle-check",
            Command::Wigner { .. } => "wigner",
        }
    }
}
