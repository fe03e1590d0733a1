use clap::Args;
use serde::{Deserialize, Serialize};

/// Ensemble selection shared by the sampling subcommands. Ignored when the
/// config file has a `[spec]` table.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelArgs {
    /// wigner | erdos-renyi | d-regular | band | covariance
    #[arg(long)]
    pub model: Option<String>,
    /// Matrix dimension (columns for covariance).
    #[arg(long)]
    pub n: Option<usize>,
    /// Entry law: gaussian, rademacher, uniform, bernoulli:P, pareto:A, student_t:NU
    #[arg(long)]
    pub dist: Option<String>,
    /// Edge probability for erdos-renyi [default: N^-0.5]
    #[arg(long)]
    pub edge_p: Option<f64>,
    /// Degree for d-regular [default: ceil(N^0.5)]
    #[arg(long)]
    pub degree: Option<usize>,
    /// Band half-width [default: ceil(N^0.6)]
    #[arg(long)]
    pub bandwidth: Option<usize>,
    /// Rows p of the covariance model [default: N/2]
    #[arg(long)]
    pub rows: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DetgrowthArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Monte Carlo samples [default: 200]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Energy E in det(H - E) [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Pass tolerance on |estimate - oracle| [default: 0.03]
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Also write per-sample log-determinants to samples.csv
    #[arg(long)]
    pub per_sample: bool,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct DemboArgs {
    /// Columns N [default: 8]
    #[arg(long)]
    pub n: Option<usize>,
    /// Rows p <= N [default: 4]
    #[arg(long)]
    pub p: Option<usize>,
    /// [default: 100000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// [default: gaussian]
    #[arg(long)]
    pub dist: Option<String>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct WegnerArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Half-width of the interval [default: N^-2]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Interval centre [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// [default: 500]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Pass tolerance on |hit fraction - 2δNρ(E)| [default: 0.05]
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct MdeArgs {
    /// Solve A = 0, s_ij = 1/N instead of the config spec
    #[arg(long)]
    pub flat_goe: bool,
    /// Dimension for --flat-goe [default: 100]
    #[arg(long)]
    pub n: Option<usize>,
    /// Re z [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub z_re: Option<f64>,
    /// Im z > 0 [default: 1]
    #[arg(long)]
    pub z_imag: Option<f64>,
    /// Also extract the density on a grid and write density.csv
    #[arg(long)]
    pub density: bool,
    /// Density grid points [default: 4001]
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct FreeconvArgs {
    /// First measure: sc:SIGMA, mp:GAMMA or atoms:x1,x2,... [default: sc:1]
    #[arg(long)]
    pub a: Option<String>,
    /// Second measure [default: sc:1]
    #[arg(long)]
    pub b: Option<String>,
    /// Re z [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub z_re: Option<f64>,
    /// Im z > 0 [default: 1]
    #[arg(long)]
    pub z_imag: Option<f64>,
    /// Also write density.csv
    #[arg(long)]
    pub density: bool,
    /// [default: 4001]
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct VariationalArgs {
    /// [default: 0.5]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Lower end of a one-dimensional domain
    #[arg(long, allow_negative_numbers = true)]
    pub lower: Option<f64>,
    /// Upper end of a one-dimensional domain
    #[arg(long, allow_negative_numbers = true)]
    pub upper: Option<f64>,
    /// Restrict the supremum to the good set
    #[arg(long)]
    pub restricted: bool,
    /// ε used for the membership column of the trace [default: 0.01]
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct LaplaceArgs {
    /// [default: 0.5]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// [default: 200]
    #[arg(long)]
    pub n: Option<usize>,
    /// [default: 200]
    #[arg(long)]
    pub samples: Option<usize>,
    /// [default: gaussian]
    #[arg(long)]
    pub dist: Option<String>,
    /// [default: -4]
    #[arg(long, allow_negative_numbers = true)]
    pub u_min: Option<f64>,
    /// [default: 4]
    #[arg(long, allow_negative_numbers = true)]
    pub u_max: Option<f64>,
    /// [default: 1601]
    #[arg(long)]
    pub u_points: Option<usize>,
    /// [default: 0.05]
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Tolerance of the restricted variant [default: 0.1]
    #[arg(long)]
    pub restricted_tolerance: Option<f64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct ProductsArgs {
    /// Correlation in [0, 1] [default: 0]
    #[arg(long)]
    pub rho: Option<f64>,
    /// Number of factors [default: 2]
    #[arg(long)]
    pub ell: Option<usize>,
    /// [default: 300]
    #[arg(long)]
    pub n: Option<usize>,
    /// [default: 200]
    #[arg(long)]
    pub samples: Option<usize>,
    /// [default: 0.08]
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct MomentsArgs {
    /// Moment exponent p >= 1 [default: 1]
    #[arg(long)]
    pub p_exp: Option<f64>,
    /// [default: gaussian]
    #[arg(long)]
    pub dist: Option<String>,
    /// [default: 20]
    #[arg(long)]
    pub n: Option<usize>,
    /// [default: 10000]
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct DecompArgs {
    /// Energies to test, comma separated [default: -1,0,0.5,1,2]
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',')]
    pub energies: Option<Vec<f64>>,
    /// [default: 0.05]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Cap K [default: 20]
    #[arg(long)]
    pub k: Option<f64>,
    /// Grid points on [-4, 4] [default: 20001]
    #[arg(long)]
    pub points: Option<usize>,
    /// Random trials for the Schur, Hadamard, concavity and truncation checks [default: 100]
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleArgs {
    /// outlier | kernel [default: outlier]
    #[arg(long)]
    pub which: Option<String>,
    /// [default: 256 for outlier, 100 for kernel]
    #[arg(long)]
    pub n: Option<usize>,
    /// [default: 200 for outlier, 10000 for kernel]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Outlier exponent θ [default: 0.125]
    #[arg(long)]
    pub theta: Option<f64>,
    /// [default: gaussian]
    #[arg(long)]
    pub dist: Option<String>,
    /// Tolerance for the kernel no-hit estimate [default: 0.05]
    #[arg(long)]
    pub tolerance: Option<f64>,
}
