mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bcn_core::decomposition::{
    decompose_at_order, max_decomposition_with_cap, max_feasible_order, CcPevpSearch,
    DecompositionError, DecompositionResult, QuotientTarget, ALTERNATIVES_CAP,
};
use bcn_core::observability::{obs_partition, obs_rows_limited, undecomposable_by_parity};
use bcn_core::{regularity_test, verify_decomposition, Bcn, RegularityVerdict};
use clap::{Parser, Subcommand};
use thiserror::Error;

use report::{
    blocks, fraction, ConvertReport, DecomposeReport, Equations, FailureEntry, ModelEcho,
    ObsmatReport, RationalOut, RegularityReport, Render, RowEntry, SimulateReport,
    OBSERVABILITY_NOTE, SCHEMA_VERSION,
};

/// Largest `n + m` for which decompiled equations are printed.
const MAX_EQUATION_VARS: usize = 16;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<DecompositionError> for CliError {
    fn from(e: DecompositionError) -> Self {
        match e {
            DecompositionError::InvariantViolation(msg) => CliError::Internal(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bcn",
    version,
    about = "Output decomposition of Boolean control networks"
)]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Print a one-line summary instead of the full text report.
    #[arg(long, global = true)]
    quiet: bool,
    /// Refuse models with more state variables than this.
    #[arg(long, global = true, default_value_t = 20)]
    max_n: usize,
    /// Append the elapsed analysis time to text output.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a model to L and H in delta notation.
    Convert { model: PathBuf },
    /// Observability rows, the partition C and the quick negative tests.
    Obsmat {
        model: PathBuf,
        /// Give up listing rows beyond this many.
        #[arg(long, default_value_t = 100_000)]
        max_rows: usize,
    },
    /// Maximum (or fixed-order) decomposition with respect to outputs.
    Decompose {
        model: PathBuf,
        /// Look for a decomposition of exactly this order.
        #[arg(long)]
        order: Option<usize>,
        /// List every CC-PEVP of the resulting order.
        #[arg(long)]
        all: bool,
    },
    /// Check whether a coordinate change T decomposes the model with s kept states.
    Verify {
        model: PathBuf,
        /// Permutation as a 1-based delta list, e.g. 3,6,1,8,7,2,5,4.
        #[arg(long = "t", value_name = "DELTA")]
        t: String,
        #[arg(long)]
        s: usize,
    },
    /// Step the network from an initial state.
    Simulate {
        model: PathBuf,
        /// 1-based initial state index.
        #[arg(long)]
        x0: usize,
        /// Comma-separated 1-based input indices.
        #[arg(long, conflicts_with = "steps")]
        inputs: Option<String>,
        /// Number of steps for networks without inputs.
        #[arg(long)]
        steps: Option<usize>,
        /// Also render states and outputs as bit strings.
        #[arg(long)]
        bits: bool,
    },
    /// Compare two decomposing coordinate changes of the same order.
    Regularity {
        model: PathBuf,
        #[arg(long = "t1", value_name = "DELTA")]
        t1: String,
        #[arg(long = "t2", value_name = "DELTA")]
        t2: String,
        #[arg(long)]
        s: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let start = Instant::now();
    let out = match &cli.command {
        Command::Convert { model } => emit(cli, &ConvertReport::new(&load(cli, model)?)),
        Command::Obsmat { model, max_rows } => emit(cli, &obsmat(&load(cli, model)?, *max_rows)),
        Command::Decompose { model, order, all } => {
            emit(cli, &decompose(&load(cli, model)?, *order, *all)?)
        }
        Command::Verify { model, t, s } => emit(cli, &verify(&load(cli, model)?, t, *s)?),
        Command::Simulate {
            model,
            x0,
            inputs,
            steps,
            bits,
        } => emit(
            cli,
            &simulate(&load(cli, model)?, *x0, inputs.as_deref(), *steps, *bits)?,
        ),
        Command::Regularity { model, t1, t2, s } => {
            emit(cli, &regularity(&load(cli, model)?, t1, t2, *s)?)
        }
    }?;
    if cli.timing && !cli.json {
        return Ok(format!(
            "{out}elapsed: {:.3} ms\n",
            start.elapsed().as_secs_f64() * 1e3
        ));
    }
    Ok(out)
}

fn load(cli: &Cli, path: &std::path::Path) -> Result<Bcn, CliError> {
    input::load_model(path, cli.max_n)
}

fn emit<R: Render>(cli: &Cli, r: &R) -> Result<String, CliError> {
    if cli.json {
        let mut s =
            serde_json::to_string_pretty(r).map_err(|e| CliError::Internal(e.to_string()))?;
        s.push('\n');
        Ok(s)
    } else if cli.quiet {
        Ok(r.summary() + "\n")
    } else {
        Ok(r.human())
    }
}

fn obsmat(b: &Bcn, max_rows: usize) -> ObsmatReport {
    let c = obs_partition(b);
    let rows = obs_rows_limited(b, max_rows);
    ObsmatReport {
        schema_version: SCHEMA_VERSION,
        command: "obsmat",
        model: ModelEcho::new(b),
        r_star: rows.as_ref().map(|o| o.r_star()),
        rows: rows.map(|o| {
            o.rows()
                .iter()
                .map(|r| RowEntry {
                    word: r.word.clone(),
                    row: r.row.delta(),
                })
                .collect()
        }),
        row_limit: max_rows,
        observable_columns: c.len() == b.state_count(),
        observability_note: OBSERVABILITY_NOTE,
        undecomposable_by_parity: undecomposable_by_parity(&c),
        max_feasible_order: max_feasible_order(&c),
        observability_partition: blocks(&c),
    }
}

fn decompose(b: &Bcn, order: Option<usize>, all: bool) -> Result<DecomposeReport, CliError> {
    let c = obs_partition(b);
    let result = match order {
        Some(d) => decompose_at_order(b, d, ALTERNATIVES_CAP)?,
        None => Some(max_decomposition_with_cap(b, ALTERNATIVES_CAP)?),
    };
    let mut report = DecomposeReport {
        schema_version: SCHEMA_VERSION,
        command: "decompose",
        model: ModelEcho::new(b),
        observability_partition: blocks(&c),
        max_feasible_order: max_feasible_order(&c),
        requested_order: order,
        order: None,
        s: None,
        verdict: String::new(),
        partition: None,
        q: None,
        t: None,
        g1: None,
        g2: None,
        m: None,
        equations: None,
        alternatives: None,
        alternatives_complete: None,
        all_partitions: None,
        all_partitions_complete: None,
    };
    let Some(r) = result else {
        report.verdict = format!(
            "no decomposition of order {} with respect to outputs",
            order.unwrap_or_default()
        );
        return Ok(report);
    };
    fill_result(b, &r, &mut report);
    if all && r.order > 0 {
        let mut found: Vec<Vec<Vec<usize>>> = CcPevpSearch::new(b, &c, r.order)
            .take(ALTERNATIVES_CAP + 1)
            .map(|p| blocks(&p))
            .collect();
        let complete = found.len() <= ALTERNATIVES_CAP;
        found.truncate(ALTERNATIVES_CAP);
        report.all_partitions = Some(found);
        report.all_partitions_complete = Some(complete);
    }
    Ok(report)
}

fn fill_result(b: &Bcn, r: &DecompositionResult, report: &mut DecomposeReport) {
    report.order = Some(r.order);
    report.s = Some(r.s);
    report.verdict = if r.order == 0 {
        "undecomposable with respect to outputs".into()
    } else {
        format!("decomposable with respect to outputs, order {}", r.order)
    };
    report.partition = r.partition.as_ref().map(blocks);
    report.q = Some(r.q.delta());
    report.t = Some(r.t.delta());
    report.g1 = Some(r.decomposed.g1_blocks.iter().map(|g| g.delta()).collect());
    report.g2 = Some(r.decomposed.g2.delta());
    report.m = Some(r.decomposed.m.delta());
    if b.n() + b.m() <= MAX_EQUATION_VARS {
        report.equations = Some(Equations::new(&r.transformed(b).to_equations()));
    }
    if r.order > 0 {
        report.alternatives = Some(r.alternatives);
        report.alternatives_complete = Some(r.alternatives_complete);
    }
}

fn quotient_name(t: QuotientTarget) -> String {
    match t {
        QuotientTarget::Block(i) => format!("Q L_{i} Q^T / 2^(n-s)"),
        QuotientTarget::Output => "H Q^T / 2^(n-s)".into(),
    }
}

fn verify(b: &Bcn, t: &str, s: usize) -> Result<report::VerifyReport, CliError> {
    let t = input::parse_delta_list(t, "--t")?;
    let v = verify_decomposition(b, &t, s)?;
    Ok(report::VerifyReport {
        schema_version: SCHEMA_VERSION,
        command: "verify",
        model: ModelEcho::new(b),
        t: t.delta(),
        s,
        q: v.q.delta(),
        passed: v.passed(),
        failures: v
            .failures
            .iter()
            .map(|f| FailureEntry {
                quotient: quotient_name(f.target),
                column: f.column,
                entries: f
                    .entries
                    .iter()
                    .map(|&(row, num)| (row, fraction(num, f.denominator)))
                    .collect(),
            })
            .collect(),
        g1: v
            .g1_blocks
            .filter(|_| v.failures.is_empty())
            .map(|gs| gs.iter().map(|g| g.delta()).collect()),
        m: v.m.filter(|_| v.failures.is_empty()).map(|m| m.delta()),
    })
}

fn simulate(
    b: &Bcn,
    x0: usize,
    inputs: Option<&str>,
    steps: Option<usize>,
    bits: bool,
) -> Result<SimulateReport, CliError> {
    let inputs = match (inputs, steps) {
        (Some(list), _) => input::parse_index_list(list, "--inputs")?,
        (None, Some(0)) => Vec::new(),
        (None, Some(k)) if b.m() == 0 => vec![1; k],
        (None, Some(_)) => {
            return Err(CliError::Input(
                "--steps only applies to networks without inputs; give --inputs".into(),
            ))
        }
        (None, None) => Vec::new(),
    };
    let tr = b
        .simulate(x0, &inputs)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let render = |k: usize, width: usize| {
        (0..width)
            .map(|i| {
                if ((k - 1) >> (width - 1 - i)) & 1 == 0 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect::<String>()
    };
    Ok(SimulateReport {
        schema_version: SCHEMA_VERSION,
        command: "simulate",
        model: ModelEcho::new(b),
        x0,
        state_bits: bits.then(|| tr.states.iter().map(|&k| render(k, b.n())).collect()),
        output_bits: bits.then(|| tr.outputs.iter().map(|&k| render(k, b.p())).collect()),
        inputs,
        states: tr.states,
        outputs: tr.outputs,
    })
}

fn regularity(b: &Bcn, t1: &str, t2: &str, s: usize) -> Result<RegularityReport, CliError> {
    let t1 = input::parse_delta_list(t1, "--t1")?;
    let t2 = input::parse_delta_list(t2, "--t2")?;
    for (name, t) in [("T1", &t1), ("T2", &t2)] {
        let v = verify_decomposition(b, t, s)?;
        if !v.passed() {
            return Err(CliError::Input(format!(
                "{name} does not decompose the model with s = {s} ({} non-logical quotient column(s))",
                v.failures.len()
            )));
        }
    }
    let r = regularity_test(&t1, &t2, s)?;
    Ok(RegularityReport {
        schema_version: SCHEMA_VERSION,
        command: "regularity",
        model: ModelEcho::new(b),
        t1: t1.delta(),
        t2: t2.delta(),
        s,
        r: RationalOut::new(&r.r),
        r_is_logical: r.r_is_logical,
        verdict: r.verdict.to_string(),
        meaning: match r.verdict {
            RegularityVerdict::NotRegular => "the largest unobservable subspace is not regular",
            RegularityVerdict::Inconclusive => "R is logical, so the test says nothing",
        },
    })
}
