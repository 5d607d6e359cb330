//! Command-line grammar and dispatch.
//!
//! Every experiment flag is optional on the command line. Missing values
//! come from the `--config` file, then from built-in defaults, and the
//! effective values are written to the manifest.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use percolab_core::ising::Boundary;
use percolab_core::{Model, SamplerSpec};

use crate::commands;
use crate::exec::{resolve_threads, Pool};
use crate::output::RunDir;
use crate::params::Params;

/// Exit status for a theorem check that failed.
pub const EXIT_CHECK_FAILED: i32 = 2;
/// Exit status for usage, configuration and domain errors.
pub const EXIT_USAGE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "percolab", version, about = "Percolation laboratory: exact oracles and seeded Monte Carlo checks")]
#[command(args_override_self = true, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Master seed; all randomness derives from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core). Falls back to PERCOLAB_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Run directory. Defaults to runs/<command>-seed<seed>.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// File of key=value defaults, overridden by flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact enumeration: Russo's identity, event polynomials, influence ratios.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Monte Carlo estimators on lattices.
    #[command(subcommand)]
    Mc(McCmd),
    /// Crossing inequality for squares and 3:1 rectangles.
    Rsw(RswArgs),
    /// Sharp-threshold windows, the Monte Carlo Russo shadow and influence ratios.
    #[command(subcommand)]
    Threshold(ThresholdCmd),
    /// Critical-point estimates from crossing curves.
    Pc(PcArgs),
    /// Plaquette surfaces in three dimensions.
    #[command(subcommand)]
    Plaquette(PlaquetteCmd),
    /// Densities of vertices touching several large clusters.
    Uniqueness(UniquenessArgs),
    /// Spin-cluster spanning in the two-dimensional Ising model.
    Ising(IsingArgs),
    /// Summarise a run directory and write plot data.
    Report(DirArgs),
    /// Re-run a manifest and compare the results byte for byte.
    Replay(DirArgs),
}

#[derive(Debug, Args)]
pub struct EventArgs {
    /// dictator, majority3, threshold, lr or random.
    #[arg(long)]
    pub event: Option<String>,
    /// Ground-set size for dictator, threshold and random events.
    #[arg(long)]
    pub size: Option<usize>,
    /// Threshold level (at least k open).
    #[arg(long)]
    pub k: Option<usize>,
    /// Box half-widths for lr events.
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Generators of a random up-closure.
    #[arg(long)]
    pub generators: Option<usize>,
    /// Number of random events.
    #[arg(long)]
    pub count: Option<u64>,
    /// Enumeration cap on the ground-set size.
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// Check d/dp P_p(A) = Σ_e P_p(e pivotal) exactly.
    VerifyRusso(EventArgs),
    /// Counts N_k of accepting configurations and P_p(A).
    Polynomial {
        #[command(flatten)]
        event: EventArgs,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Exact influence ratio.
    Talagrand {
        #[command(flatten)]
        event: EventArgs,
        #[arg(long)]
        p: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub model: Option<Model>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub reps: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum McCmd {
    /// Origin-to-boundary connection frequency on [-L, L]^d.
    Theta {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        radius: Option<u32>,
    },
    /// Mean origin cluster size on [-L, L]^d.
    Chi {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        radius: Option<u32>,
    },
    /// Left-right crossing of [0, 2m] x [0, 2n].
    Crossing {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Open circuits in annuli [-3n, 3n]^2 minus [-n, n]^2 (bond-z2).
    Annulus {
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<u32>>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        reps: Option<u64>,
    },
    /// Write a lattice graph as JSON.
    DumpGraph {
        #[arg(long)]
        model: Option<Model>,
        /// box, centered, cube or annulus.
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
    },
}

#[derive(Debug, Args)]
pub struct RswArgs {
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long)]
    pub reps: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum ThresholdCmd {
    /// Windows [p_ε, p_{1-ε}] with sweep tables.
    Windows {
        /// lr or dictator.
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<u32>>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        reps: Option<u64>,
        /// Replicas for the maximal influence at p0 (0 skips it).
        #[arg(long)]
        eta_reps: Option<u64>,
    },
    /// Total influence against the coupled finite difference on LR(n, n).
    Shadow {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        reps: Option<u64>,
    },
    /// Monte Carlo influence ratio of LR(n, n).
    Talagrand {
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<u32>>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        reps: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct PcArgs {
    /// One or more planar models, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub model: Option<Vec<Model>>,
    #[arg(long)]
    pub nmin: Option<u32>,
    #[arg(long)]
    pub nmax: Option<u32>,
    #[arg(long)]
    pub reps: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum PlaquetteCmd {
    /// -ln P(W_γ) against loop area and perimeter.
    Probe {
        /// Loops as MxN, comma separated.
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        #[arg(long)]
        margin: Option<u32>,
        #[arg(long)]
        reps: Option<u64>,
    },
    /// Boundary linearity, closed surfaces and spanning against enumeration.
    Algebra {
        #[arg(long)]
        side: Option<u32>,
        #[arg(long)]
        chains: Option<usize>,
        #[arg(long)]
        max_plaquettes: Option<usize>,
        /// Compare every stride-th occupied set.
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Simultaneous open and closed spanning on the site-Z3 cube.
    Coexistence {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        side: Option<u32>,
        #[arg(long)]
        reps: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct UniquenessArgs {
    #[command(flatten)]
    pub sample: SampleArgs,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<u32>>,
}

#[derive(Debug, Args)]
pub struct IsingArgs {
    #[arg(long)]
    pub side: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub temps: Option<Vec<f64>>,
    #[arg(long)]
    pub field: Option<f64>,
    /// plus, minus or free.
    #[arg(long)]
    pub boundary: Option<Boundary>,
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long)]
    pub thin: Option<u64>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub reps: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DirArgs {
    /// Run directory containing a manifest.
    #[arg(long)]
    pub dir: PathBuf,
}

/// State shared by an experiment while it runs.
pub struct Session {
    pub run: RunDir,
    pub exec: Pool,
    pub seed: u64,
}

impl Session {
    pub fn spec(&self, replicas: u64) -> SamplerSpec {
        SamplerSpec::new(self.seed, replicas)
    }
}

/// Work left to do once parameters are resolved.
pub type Job = Box<dyn FnOnce(&mut Session) -> anyhow::Result<()>>;
type Plan = fn(&Command, &mut Params) -> anyhow::Result<Job>;

/// Parses arguments (the first is the program name), runs the command and
/// returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    let global = cli.global;
    let (path, plan): (Vec<&str>, Plan) = match &cli.command {
        Command::Report(d) => return commands::report::report(&d.dir),
        Command::Replay(d) => return commands::report::replay(&d.dir, global.threads, global.out.as_deref()),
        Command::Oracle(c) => (vec!["oracle", c.name()], commands::oracle::plan),
        Command::Mc(c) => (vec!["mc", c.name()], commands::mc::plan),
        Command::Rsw(_) => (vec!["rsw"], commands::rsw::plan),
        Command::Threshold(c) => (vec!["threshold", c.name()], commands::threshold::plan),
        Command::Pc(_) => (vec!["pc"], commands::pc::plan),
        Command::Plaquette(c) => (vec!["plaquette", c.name()], commands::plaquette::plan),
        Command::Uniqueness(_) => (vec!["uniqueness"], commands::uniqueness::plan),
        Command::Ising(_) => (vec!["ising"], commands::ising::plan),
    };
    let mut params = Params::from_file(global.config.as_deref())?;
    let seed = params.get("seed", global.seed, 1u64)?;
    let job = plan(&cli.command, &mut params)?;
    params.finish()?;

    let threads = resolve_threads(global.threads)?;
    let exec = Pool::new(threads)?;
    let out = global.out.unwrap_or_else(|| PathBuf::from("runs").join(format!("{}-seed{seed}", path.join("-"))));
    let mut session = Session { run: RunDir::create(&out, seed)?, exec, seed };
    let started = Instant::now();
    job(&mut session)?;
    let wall = started.elapsed().as_secs_f64();

    let mut args: Vec<String> = path.iter().map(|s| s.to_string()).collect();
    args.extend(params.flags().iter().cloned());
    let threads = session.exec.threads();
    let pass = session.run.all_pass();
    for c in session.run.checks() {
        let margin = c.margin.map_or(String::from("n/a"), |m| format!("{m:.6}"));
        println!("{} {} margin={margin} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let manifest = session.run.finish(&path.join(" "), args, params.values().clone(), threads, wall)?;
    println!("wrote {} files to {}", manifest.outputs.len() + 1, out.display());
    Ok(if pass { 0 } else { EXIT_CHECK_FAILED })
}

impl OracleCmd {
    fn name(&self) -> &'static str {
        match self {
            OracleCmd::VerifyRusso(_) => "verify-russo",
            OracleCmd::Polynomial { .. } => "polynomial",
            OracleCmd::Talagrand { .. } => "talagrand",
        }
    }
}

impl McCmd {
    fn name(&self) -> &'static str {
        match self {
            McCmd::Theta { .. } => "theta",
            McCmd::Chi { .. } => "chi",
            McCmd::Crossing { .. } => "crossing",
            McCmd::Annulus { .. } => "annulus",
            McCmd::DumpGraph { .. } => "dump-graph",
        }
    }
}

impl ThresholdCmd {
    fn name(&self) -> &'static str {
        match self {
            ThresholdCmd::Windows { .. } => "windows",
            ThresholdCmd::Shadow { .. } => "shadow",
            ThresholdCmd::Talagrand { .. } => "talagrand",
        }
    }
}

impl PlaquetteCmd {
    fn name(&self) -> &'static str {
        match self {
            PlaquetteCmd::Probe { .. } => "probe",
            PlaquetteCmd::Algebra { .. } => "algebra",
            PlaquetteCmd::Coexistence { .. } => "coexistence",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn grammar_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn lists_and_overrides_parse() {
        let cli = Cli::try_parse_from(["percolab", "rsw", "--n", "4,8", "--n", "16", "--seed", "3", "--seed", "5"]).unwrap();
        match cli.command {
            // Repeated list flags accumulate.
            Command::Rsw(a) => assert_eq!(a.n, Some(vec![4, 8, 16])),
            _ => panic!("wrong command"),
        }
        assert_eq!(cli.global.seed, Some(5));
        assert!(Cli::try_parse_from(["percolab", "rsw", "--nn", "4"]).is_err());
        assert!(Cli::try_parse_from(["percolab", "mc", "theta", "--model", "bond-z4"]).is_err());
    }
}
