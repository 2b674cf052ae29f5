//! `npa-bell`: batch experiments on the NPA hierarchy for two parties with
//! two settings and two outcomes each.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use npa_core::bell::criterion_report;
use npa_core::experiments::output::format_sig15;
use npa_core::experiments::{
    deviation_onset, emit_svg_scatter, max_lambda, max_value, maximize_functional, qb_functional,
    quantum_value, run_scatter, run_table, scatter_csv, table_csv, ExperimentError, Family,
    SampleMode, SampleStream, ScatterConfig, DEFAULT_RESTARTS,
};
use npa_core::{CorrelationPoint, Level, MomentStructure, Realization};

#[derive(Debug, Parser)]
#[command(name = "npa-bell", version, about)]
struct Cli {
    /// Cap on worker threads for sampling runs (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Relaxation values of a QB family over an x grid, as CSV
    Table(TableArgs),
    /// λ scatter over sampled points, as CSV (optionally SVG)
    Scatter(ScatterArgs),
    /// Extremality criterion report for one realization
    Check(CheckArgs),
    /// Maximum λ with Γ − λI ⪰ 0 for one correlation point
    Lambda(LambdaArgs),
    /// Maximum of one QB functional: relaxation, realization search, closed form
    Maximize(MaximizeArgs),
    /// Smallest x where the 1+AB relaxation departs from the quantum value
    Threshold(ThresholdArgs),
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Functional family: qb2 or qb3
    #[arg(long)]
    family: Family,
    /// Grid as start:stop:step (inclusive), or a single value
    #[arg(long, default_value = "0:2:0.2")]
    xs: String,
    /// Comma-separated levels among 1, 1+AB, 2, 3, 4
    #[arg(long, value_delimiter = ',', default_value = "1+AB,2")]
    levels: Vec<Level>,
    /// Write the CSV here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    /// Sampling mode: random, real, crit1 or crit12
    #[arg(long, default_value = "random")]
    mode: SampleMode,
    /// Number of samples
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Comma-separated levels; the first two are compared
    #[arg(long, value_delimiter = ',', default_value = "1+AB,2")]
    levels: Vec<Level>,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative threshold for flagging a record as deviated
    #[arg(long, default_value_t = npa_core::experiments::scatter::DEFAULT_DEVIATION_TOL)]
    tol: f64,
    /// Also draw the scatter of the first two levels as SVG
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Write the CSV here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Five comma-separated angles tA0,tA1,tB0,tB1,chi
    #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
    realization: Vec<f64>,
    /// Absolute tolerance for the satisfied flags
    #[arg(long, default_value_t = npa_core::bell::DEFAULT_CRITERION_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct LambdaArgs {
    /// Eight comma-separated moments <A0>,<A1>,<B0>,<B1>,<A0B0>,<A0B1>,<A1B0>,<A1B1>
    #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
    point: Vec<f64>,
    /// Hierarchy level
    #[arg(long, default_value = "2")]
    level: Level,
}

#[derive(Debug, Args)]
struct MaximizeArgs {
    /// Functional family: qb2 or qb3
    #[arg(long)]
    family: Family,
    /// Family parameter
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    /// Hierarchy level for the relaxation
    #[arg(long, default_value = "1+AB")]
    level: Level,
    /// Seed for the realization search
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Functional family: qb2 or qb3
    #[arg(long, default_value = "qb3")]
    family: Family,
    /// Excess over the quantum value counted as a deviation
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Solver(String),
    Exhausted(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Exhausted(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Solver(m) | Failure::Exhausted(m) => m,
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Solver(_) | ExperimentError::NotFound { .. } => Failure::Solver(e.to_string()),
            ExperimentError::SamplerExhausted { .. } => Failure::Exhausted(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Table(a) => table(a),
        Command::Scatter(a) => scatter(a, cli.threads),
        Command::Check(a) => check(a),
        Command::Lambda(a) => lambda(a),
        Command::Maximize(a) => maximize(a),
        Command::Threshold(a) => threshold(a),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("invalid grid '{spec}' (expected start:stop:step)"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match parts[..] {
        [x] if x.is_finite() => Ok(vec![x]),
        [start, stop, step] if step > 0.0 && stop >= start && (stop - start) / step < 1e6 => {
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // snap to 12 decimals so 3 × 0.4 comes out as 1.2
            Ok((0..count)
                .map(|i| {
                    let x = start + i as f64 * step;
                    (x * 1e12).round() / 1e12
                })
                .collect())
        }
        _ => Err(bad()),
    }
}

fn write_output(path: Option<&PathBuf>, contents: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, contents).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn table(a: TableArgs) -> Result<(), Failure> {
    let xs = parse_grid(&a.xs)?;
    let rows = run_table(a.family, &xs, &a.levels);
    write_output(a.out.as_ref(), &table_csv(&rows, &a.levels)?)?;
    match rows.iter().find_map(|r| r.error.as_ref().map(|e| (r.x, e))) {
        Some((x, e)) => Err(Failure::Solver(format!("x = {x}: {e}"))),
        None => Ok(()),
    }
}

fn scatter(a: ScatterArgs, threads: Option<usize>) -> Result<(), Failure> {
    if a.levels.len() < 2 {
        return Err(Failure::Usage("scatter needs at least two levels to compare".into()));
    }
    let mut config = ScatterConfig::new(a.mode, a.n, a.levels.clone(), a.seed);
    config.deviation_tol = a.tol;
    config.threads = threads;
    let records = run_scatter(&config)?;
    write_output(a.out.as_ref(), &scatter_csv(&records)?)?;
    if let Some(path) = &a.svg {
        let mut levels = a.levels.clone();
        levels.sort();
        levels.dedup();
        emit_svg_scatter(&records, (levels[0], levels[1]), path)?;
    }
    let failed: Vec<_> = records.iter().filter_map(|r| r.error.as_ref().map(|e| (r.sample_id, e))).collect();
    if let Some((id, e)) = failed.iter().find(|(_, e)| e.is_sampler()) {
        return Err(Failure::Exhausted(format!("sample {id}: {e}")));
    }
    match failed.first() {
        Some((id, e)) => Err(Failure::Solver(format!("{} records failed; first, sample {id}: {e}", failed.len()))),
        None => Ok(()),
    }
}

fn check(a: CheckArgs) -> Result<(), Failure> {
    let params: [f64; 5] = a.realization.as_slice().try_into().map_err(|_| {
        Failure::Usage(format!("--realization takes 5 values, got {}", a.realization.len()))
    })?;
    let r = Realization::from_params(params).map_err(|e| Failure::Usage(e.to_string()))?;
    let rep = criterion_report(&r, a.tol).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut out = String::new();
    for x in 0..2 {
        for y in 0..2 {
            out += &format!("s_plus_{x}{y} = {}\n", format_sig15(rep.s_plus[x][y]));
        }
    }
    out += &format!("eq11_residual = {}\n", format_sig15(rep.eq11_residual));
    out += &format!("eq8_product = {}\n", format_sig15(rep.eq8_product));
    out += &format!("tlm_b_residual = {}\n", format_sig15(rep.tlm_scaled_residual_b));
    out += &format!("tlm_a_residual = {}\n", format_sig15(rep.tlm_scaled_residual_a));
    out += &format!("satisfied = {}\n", rep.satisfied.all());
    write_output(None, &out)
}

fn lambda(a: LambdaArgs) -> Result<(), Failure> {
    let v: [f64; 8] = a.point.as_slice().try_into().map_err(|_| {
        Failure::Usage(format!("--point takes 8 values, got {}", a.point.len()))
    })?;
    let p = CorrelationPoint::from_array(v).map_err(|e| Failure::Usage(e.to_string()))?;
    let lambda = max_lambda(&MomentStructure::build(a.level), &p).map_err(|e| Failure::Solver(e.to_string()))?;
    write_output(None, &format!("{lambda:.9}\n"))
}

fn maximize(a: MaximizeArgs) -> Result<(), Failure> {
    if !a.x.is_finite() {
        return Err(Failure::Usage("--x must be finite".into()));
    }
    let f = qb_functional(a.family, a.x);
    let relaxation = max_value(&MomentStructure::build(a.level), &f).map_err(|e| Failure::Solver(e.to_string()))?;
    let found = maximize_functional(&f, &mut SampleStream::new(a.seed, 0), DEFAULT_RESTARTS);
    let mut out = format!(
        "level = {}\nrelaxation = {}\nrealization = {}\n",
        a.level,
        format_sig15(relaxation),
        format_sig15(found.value)
    );
    let params = found.realization.params().map(format_sig15).join(",");
    out += &format!("realization_params = {params}\n");
    if let Ok(q) = quantum_value(a.family, a.x) {
        out += &format!("quantum = {}\n", format_sig15(q));
    }
    write_output(None, &out)
}

fn threshold(a: ThresholdArgs) -> Result<(), Failure> {
    let x = deviation_onset(a.family, a.tol)?;
    write_output(None, &format!("{}\n", format_sig15(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_inclusive() {
        assert_eq!(parse_grid("0:2:0.4").unwrap(), [0.0, 0.4, 0.8, 1.2, 1.6, 2.0]);
        assert_eq!(parse_grid("0.7").unwrap(), [0.7]);
        for bad in ["", "1:0:0.1", "0:1:0", "0:1", "a:b:c"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exit_codes_follow_the_error_kind() {
        assert_eq!(Failure::from(ExperimentError::SamplerExhausted { attempts: 1 }).code(), 3);
        assert_eq!(Failure::from(ExperimentError::NotFound { lo: 0.6, hi: 0.8 }).code(), 2);
        assert_eq!(Failure::from(ExperimentError::Domain(3.0)).code(), 1);
    }
}
