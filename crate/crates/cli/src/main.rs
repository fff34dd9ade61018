//! `hlat`: sweeps, spectra, block entropies, witness scans and the invariant
//! check suite for the charged-oscillator lattice.
//!
//! Exit status: 0 success, 1 check failure, 2 configuration error,
//! 3 numerical error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use harmonic_lattice::check::{check_suite, checks_for_spectrum, CheckOutcome, CheckPlan, CheckReport};
use harmonic_lattice::covariance::{Correlator, SoftModePolicy};
use harmonic_lattice::lattice::{critical_potential, Model};
use harmonic_lattice::spectrum::build_spectrum;
use harmonic_lattice::sweep::{
    emit_csv, emit_json, run_sweep, spectrum_table, witness_table, ConfigFile, Grid, Measure, SweepSpec, Tabular, Units,
};
use harmonic_lattice::{Error, ModeEntry};

#[derive(Parser, Debug)]
#[command(name = "hlat", version, about = "Entanglement in a lattice of charged harmonic oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Negativity, entropies and witness over a ν_t × T grid.
    Sweep(Common),
    /// Normal-mode frequencies at each ν_t.
    Spectrum(Common),
    /// Entropy of contiguous blocks of 1 to 3 sites.
    BlockEntropy {
        #[command(flatten)]
        common: Common,
        /// Block sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
    },
    /// Energy witness and its crossing temperature.
    Witness(Common),
    /// Run the invariant battery.
    Check {
        #[command(flatten)]
        common: Common,
        /// Corrupt one zig-zag transform before checking (negative control).
        #[arg(long, hide = true)]
        corrupt_transform: bool,
    },
    /// Site covariance matrix at a single (ν_t, T).
    Covariance {
        #[command(flatten)]
        common: Common,
        /// Print the full matrix with 17 significant digits.
        #[arg(long)]
        dump: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Nn,
    Lr,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum UnitsArg {
    Scaled,
    Raw,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Transverse trap values, comma separated.
    #[arg(long = "nu-t", value_delimiter = ',', allow_negative_numbers = true)]
    nu_t: Option<Vec<f64>>,
    /// Transverse trap values as multiples of the softening point.
    #[arg(long = "nu-t-ratio", value_delimiter = ',', conflicts_with = "nu_t")]
    nu_t_ratio: Option<Vec<f64>>,
    /// Temperatures, comma separated.
    #[arg(long, value_delimiter = ',')]
    temp: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long = "tau-max")]
    tau_max: Option<usize>,
    /// Number of sites.
    #[arg(long)]
    n: Option<usize>,
    /// Infinite-chain limit.
    #[arg(long = "td-limit")]
    td_limit: bool,
    #[arg(long, value_enum)]
    units: Option<UnitsArg>,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

enum Failure {
    Check,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParams(_) | Error::OddZigZag { .. } | Error::SizeLimitExceeded { .. } => 2,
        _ => 3,
    }
}

impl Common {
    fn config_file(&self) -> Result<ConfigFile, Error> {
        let mut cfg = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        if let Some(m) = self.model {
            cfg.lattice.model = Some(match m {
                ModelArg::Nn => Model::NearestNeighbour,
                ModelArg::Lr => Model::LongRange,
            });
        }
        if let Some(n) = self.n {
            cfg.lattice.sites = Some(n);
        }
        if let Some(t) = self.tau_max {
            cfg.lattice.tau_max = Some(t);
        }
        if let Some(v) = &self.nu_t {
            cfg.sweep.nu_t = Some(Grid::Values(v.clone()));
            cfg.sweep.nu_t_ratio = None;
        }
        if let Some(v) = &self.nu_t_ratio {
            cfg.sweep.nu_t_ratio = Some(Grid::Values(v.clone()));
            cfg.sweep.nu_t = None;
        }
        if let Some(v) = &self.temp {
            cfg.sweep.temperatures = Some(Grid::Values(v.clone()));
        }
        if self.td_limit {
            cfg.sweep.td_limit = Some(true);
        }
        if let Some(u) = self.units {
            cfg.sweep.units = Some(match u {
                UnitsArg::Scaled => Units::Scaled,
                UnitsArg::Raw => Units::Raw,
            });
        }
        Ok(cfg)
    }

    fn spec(&self) -> Result<SweepSpec, Error> {
        self.config_file()?.sweep_spec()
    }

    fn emit<R: Tabular>(&self, rows: &[R]) -> Result<(), Error> {
        let text = match self.format {
            Format::Csv => emit_csv(rows),
            Format::Json => emit_json(rows)? + "\n",
        };
        self.write(&text)
    }

    fn write(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(Error::from),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn print_report(report: &CheckReport) {
    for c in &report.checks {
        println!("{c}");
    }
    let failed = report.failures().count();
    let total = report.checks.iter().filter(|c| !c.informational).count();
    println!("{} of {total} checks passed", total - failed);
}

fn check(common: &Common, corrupt: bool) -> Result<(), Failure> {
    let explicit = common.config.is_some() || common.n.is_some() || common.model.is_some() || common.tau_max.is_some();
    let mut plan = if explicit {
        CheckPlan::for_params(&common.config_file()?.lattice_params()?)
    } else {
        CheckPlan::default()
    };
    if let Some(t) = &common.temp {
        plan.temperatures = t.clone();
    }
    let mut report = check_suite(&plan)?;
    if corrupt {
        let p = plan.models[0].with_sites(8);
        let mut s = build_spectrum(&p, 0.85 * critical_potential(&p))?;
        if let Some(ModeEntry::ZigZag { mode, .. }) = s.modes.get_mut(2) {
            mode.transform[(0, 0)] *= 1.01;
        }
        let corrupted: Vec<CheckOutcome> = checks_for_spectrum(&s, &[0.0])
            .into_iter()
            .map(|mut c| {
                c.name = format!("{} [corrupted]", c.name);
                c
            })
            .collect();
        report.checks.extend(corrupted);
    }
    print_report(&report);
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn covariance(common: &Common, dump: bool) -> Result<(), Error> {
    let spec = common.spec()?;
    let (nu_t, t) = match (spec.nu_t_grid.as_slice(), spec.temperatures.as_slice()) {
        ([nu], [t]) => (*nu, *t),
        _ => return Err(Error::Config("covariance takes exactly one nu_t and one temperature".into())),
    };
    let corr = Correlator::new(build_spectrum(&spec.params, nu_t)?, t, SoftModePolicy::Divergent)?;
    let cov = corr.full_covariance()?;
    let mut out = String::new();
    let labels: Vec<String> = cov
        .modes
        .iter()
        .flat_map(|(s, d)| [format!("q{}{s}", d.label()), format!("p{}{s}", d.label())])
        .collect();
    let _ = writeln!(out, "{}", labels.join(","));
    if dump {
        for i in 0..cov.entries.nrows() {
            let row: Vec<String> = cov.entries.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
    } else {
        let _ = writeln!(out, "{} x {} matrix, use --dump to print it", cov.entries.nrows(), cov.entries.ncols());
    }
    common.write(&out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sweep(c) => {
            let rows = run_sweep(&c.spec()?);
            c.emit(&rows)?;
        }
        Command::Spectrum(c) => {
            let rows = spectrum_table(&c.spec()?)?;
            c.emit(&rows)?;
        }
        Command::BlockEntropy { common, sizes } => {
            let mut cfg = common.config_file()?;
            cfg.sweep.measures = Some(vec![Measure::BlockEntropy]);
            if sizes.is_some() {
                cfg.sweep.block_sizes = sizes;
            }
            let rows = run_sweep(&cfg.sweep_spec()?);
            common.emit(&rows)?;
        }
        Command::Witness(c) => {
            let rows = witness_table(&c.spec()?);
            c.emit(&rows)?;
        }
        Command::Check { common, corrupt_transform } => check(&common, corrupt_transform)?,
        Command::Covariance { common, dump } => covariance(&common, dump)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("hlat: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
