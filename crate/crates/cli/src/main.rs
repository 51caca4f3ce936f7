//! Command-line front end for the braidshelf library.
//!
//! Exit status: 0 when the check passes, 1 when it fails (the report is still
//! written), 2 on unreadable input, bad formats or unsupported sizes.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use braidshelf::algebra::{OperationTable, ShelfSide};
use braidshelf::enumerate::{
    classify_up_to_iso, enumerate_racks, enumerate_shelves, enumerate_solutions, search_systems, SearchMode, SearchSpec,
};
use braidshelf::matched::{
    build_matched_product, check_simplified_with, check_system_general_with, Case, CheckReport, MatchedProductSystem,
    WitnessMode,
};
use braidshelf::solution::{Solution, SolutionFile, SolutionProps, YbeMode};
use braidshelf::theorem::{verify_theorem, TheoremId, TheoremReport, DEFAULT_SAMPLES};
use braidshelf::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

const WORKERS_VAR: &str = "BRAIDSHELF_WORKERS";

#[derive(Parser)]
#[command(
    name = "braidshelf",
    version,
    about = "Shelves, braided sets and their matched products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report every violation witness instead of the first per condition.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether an operation table is a shelf (and a rack) on one side.
    VerifyShelf {
        table: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
    },
    /// Check the braid relation and report the properties of a solution.
    VerifySolution { solution: PathBuf },
    /// Structure shelf of a left non-degenerate solution.
    StructureShelf { solution: PathBuf },
    /// Derived solution of a left non-degenerate solution.
    Derive { solution: PathBuf },
    /// Check a matched product system.
    MpCheck {
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = CaseArg::General)]
        case: CaseArg,
    },
    /// Build the matched product solution of a valid system.
    MpBuild { system: PathBuf },
    /// Enumerate shelves, racks or solutions for every size up to --max-n.
    Enum {
        #[arg(value_enum)]
        kind: EnumKind,
        #[arg(long, default_value_t = 2)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        /// Keep one table per isomorphism class (shelves and racks only).
        #[arg(long)]
        up_to_iso: bool,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Search all action pairs turning two solutions into a system.
    Search {
        r_s: PathBuf,
        r_t: PathBuf,
        #[arg(long, value_enum, default_value_t = CaseArg::General)]
        case: CaseArg,
        /// Keep one system per orbit under the factors' automorphisms.
        #[arg(long)]
        up_to_iso: bool,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Verify the structural claims on bounded instances.
    CheckTheorems {
        #[arg(long, default_value_t = 2)]
        max_n: usize,
        /// Only this claim (label such as T3.1 or S2-correspondence).
        #[arg(long)]
        theorem: Option<String>,
        #[command(flatten)]
        sampling: Sampling,
    },
}

#[derive(Args, Clone, Copy)]
struct Sampling {
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of draws in sampled mode.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

impl Sampling {
    fn mode(self) -> SearchMode {
        match self.mode {
            ModeArg::Exhaustive => SearchMode::Exhaustive,
            ModeArg::Sampled => SearchMode::Sampled {
                count: self.samples,
                seed: self.seed,
            },
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for ShelfSide {
    fn from(side: SideArg) -> Self {
        match side {
            SideArg::Left => ShelfSide::Left,
            SideArg::Right => ShelfSide::Right,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum CaseArg {
    General,
    Ll,
    Rr,
    Lr,
}

impl From<CaseArg> for Case {
    fn from(case: CaseArg) -> Self {
        match case {
            CaseArg::General => Case::General,
            CaseArg::Ll => Case::LeftLeft,
            CaseArg::Rr => Case::RightRight,
            CaseArg::Lr => Case::LeftRight,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum EnumKind {
    Shelves,
    Racks,
    Solutions,
}

/// Input problems and unsupported requests; all map to status 2.
struct Fatal(String);

impl<E: Display> From<E> for Fatal {
    fn from(err: E) -> Self {
        Fatal(err.to_string())
    }
}

/// What a command produced: the JSON document, a one-line summary and
/// whether the check passed.
struct Outcome {
    json: String,
    summary: String,
    pass: bool,
}

impl Outcome {
    fn new(value: &impl Serialize, summary: impl Into<String>, pass: bool) -> Result<Self, Fatal> {
        Ok(Outcome {
            json: render(&serde_json::to_value(value)?),
            summary: summary.into(),
            pass,
        })
    }
}

/// Pretty JSON with arrays of scalars kept on one line, so tables read as
/// grids. Object keys keep their declaration order.
fn render(value: &Value) -> String {
    fn scalar(v: &Value) -> bool {
        !matches!(v, Value::Array(_) | Value::Object(_))
    }
    fn go(v: &Value, indent: usize, out: &mut String) {
        let pad = |n: usize| "  ".repeat(n);
        match v {
            Value::Array(items) if items.is_empty() => out.push_str("[]"),
            Value::Array(items) if items.iter().all(scalar) => {
                out.push_str(&serde_json::to_string(v).expect("scalars serialize"));
            }
            Value::Array(items) => {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    go(item, indent + 1, out);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
            Value::Object(map) if map.is_empty() => out.push_str("{}"),
            Value::Object(map) => {
                out.push_str("{\n");
                for (i, (key, item)) in map.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    out.push_str(&serde_json::to_string(key).expect("keys serialize"));
                    out.push_str(": ");
                    go(item, indent + 1, out);
                    out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push('}');
            }
            scalar => out.push_str(&scalar.to_string()),
        }
    }
    let mut out = String::new();
    go(value, 0, &mut out);
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(Fatal(msg)) = configure_workers() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = match run(&cli.command, cli.verbose) {
        Ok(outcome) => outcome,
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(err) = emit(&outcome, cli.out.as_deref()) {
        eprintln!("error: {err}");
        return ExitCode::from(2);
    }
    ExitCode::from(if outcome.pass { 0 } else { 1 })
}

fn configure_workers() -> Result<(), Fatal> {
    let Ok(raw) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let workers: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Fatal(format!("{WORKERS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(workers).build_global()?;
    Ok(())
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, format!("{}\n", outcome.json))?;
            println!("{}", outcome.summary);
        }
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{}", outcome.json)?;
            eprintln!("{}", outcome.summary);
        }
    }
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Fatal> {
    let text = fs::read_to_string(path).map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

/// Reads a solution file without requiring the braid relation.
fn read_candidate(path: &Path) -> Result<Solution, Fatal> {
    let file: SolutionFile = read_json(path)?;
    file.into_unchecked()
        .map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct ShelfReport {
    side: ShelfSide,
    self_distributive: bool,
    rack: bool,
    witness: Option<[usize; 3]>,
}

#[derive(Serialize)]
struct SolutionReport {
    ybe: bool,
    witness: Option<[usize; 3]>,
    properties: SolutionProps,
}

#[derive(Serialize)]
struct ErrorReport {
    error: String,
}

#[derive(Serialize)]
struct SizeBlock<T> {
    size: usize,
    count: usize,
    items: Vec<T>,
}

fn run(command: &Command, verbose: bool) -> Result<Outcome, Fatal> {
    let witness_mode = if verbose { WitnessMode::All } else { WitnessMode::First };
    match command {
        Command::VerifyShelf { table, side } => {
            let op: OperationTable = read_json(table)?;
            let side = ShelfSide::from(*side);
            let witness = op.distributivity_violation(side);
            let report = ShelfReport {
                side,
                self_distributive: witness.is_none(),
                rack: op.is_rack(side),
                witness,
            };
            let summary = match witness {
                None if report.rack => format!("{side} rack on {} elements", op.size()),
                None => format!("{side} shelf on {} elements", op.size()),
                Some(w) => format!("not a {side} shelf: distributivity fails at {w:?}"),
            };
            Outcome::new(&report, summary, witness.is_none())
        }
        Command::VerifySolution { solution } => {
            let sol = read_candidate(solution)?;
            let witness = sol.ybe_violation(YbeMode::Direct);
            let report = SolutionReport {
                ybe: witness.is_none(),
                witness,
                properties: sol.properties(),
            };
            let summary = match witness {
                None => format!("solution on {} elements", sol.size()),
                Some(w) => format!("braid relation fails at {w:?}"),
            };
            Outcome::new(&report, summary, witness.is_none())
        }
        Command::StructureShelf { solution } => {
            let sol: Solution = read_json(solution)?;
            match sol.structure_shelf() {
                Ok(op) => Outcome::new(&op, format!("structure shelf on {} elements", op.size()), true),
                Err(err @ Error::NotLeftNonDegenerate { .. }) => degenerate(err),
                Err(err) => Err(err.into()),
            }
        }
        Command::Derive { solution } => {
            let sol: Solution = read_json(solution)?;
            match sol.derived_solution() {
                Ok(derived) => Outcome::new(
                    &derived,
                    format!("derived solution on {} elements", derived.size()),
                    true,
                ),
                Err(err @ Error::NotLeftNonDegenerate { .. }) => degenerate(err),
                Err(err) => Err(err.into()),
            }
        }
        Command::MpCheck { system, case } => {
            let sys: MatchedProductSystem = read_json(system)?;
            let case = Case::from(*case);
            let report: CheckReport = match case {
                Case::General => check_system_general_with(&sys, witness_mode),
                case => check_simplified_with(&sys, case, witness_mode)?,
            };
            let summary = format!("{case}: {}", report.summary());
            Outcome::new(&report, summary, report.valid)
        }
        Command::MpBuild { system } => {
            let sys: MatchedProductSystem = read_json(system)?;
            match build_matched_product(&sys) {
                Ok(product) => {
                    let mut file = SolutionFile::from(product);
                    file.pair_encoding = Some(sys.encoding());
                    let summary = format!("matched product on {} elements", file.size);
                    Outcome::new(&file, summary, true)
                }
                Err(Error::InvalidSystem(report)) => {
                    let summary = format!("invalid system: {}", report.summary());
                    Outcome::new(&*report, summary, false)
                }
                Err(err) => Err(err.into()),
            }
        }
        Command::Enum {
            kind,
            max_n,
            side,
            up_to_iso,
            sampling,
        } => enumerate(*kind, *max_n, ShelfSide::from(*side), *up_to_iso, sampling.mode()),
        Command::Search {
            r_s,
            r_t,
            case,
            up_to_iso,
            sampling,
        } => {
            let r_s: Solution = read_json(r_s)?;
            let r_t: Solution = read_json(r_t)?;
            let spec = SearchSpec {
                sizes: (r_s.size(), r_t.size()),
                case: Case::from(*case),
                mode: sampling.mode(),
                dedupe: *up_to_iso,
            };
            let found = search_systems(&r_s, &r_t, &spec)?;
            let summary = format!("{} systems ({})", found.len(), spec.case);
            Outcome::new(&found, summary, true)
        }
        Command::CheckTheorems {
            max_n,
            theorem,
            sampling,
        } => {
            let ids: Vec<TheoremId> = match theorem {
                None => TheoremId::ALL.to_vec(),
                Some(label) => {
                    vec![TheoremId::from_label(label).ok_or_else(|| Fatal(format!("unknown theorem {label:?}")))?]
                }
            };
            let reports = ids
                .into_iter()
                .map(|id| verify_theorem(id, (*max_n, *max_n), sampling.mode()))
                .collect::<Result<Vec<TheoremReport>, Error>>()?;
            let lines: Vec<String> = reports
                .iter()
                .map(|r| match &r.counterexample {
                    None => format!("PASS {:<17} {} instances", r.theorem.label(), r.instances),
                    Some(cx) => format!("FAIL {:<17} {}", r.theorem.label(), cx.reason),
                })
                .collect();
            let pass = reports.iter().all(TheoremReport::holds);
            Outcome::new(&reports, lines.join("\n"), pass)
        }
    }
}

fn degenerate(err: Error) -> Result<Outcome, Fatal> {
    let summary = err.to_string();
    Outcome::new(&ErrorReport { error: summary.clone() }, summary, false)
}

fn enumerate(
    kind: EnumKind,
    max_n: usize,
    side: ShelfSide,
    up_to_iso: bool,
    mode: SearchMode,
) -> Result<Outcome, Fatal> {
    if max_n == 0 {
        return Err(Fatal("--max-n must be at least 1".into()));
    }
    if kind == EnumKind::Solutions {
        if up_to_iso {
            return Err(Fatal("--up-to-iso applies to shelves and racks only".into()));
        }
        let blocks = (1..=max_n)
            .map(|n| {
                let items = enumerate_solutions(n, mode)?;
                Ok(SizeBlock {
                    size: n,
                    count: items.len(),
                    items,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let summary = summarize("solutions", &blocks);
        return Outcome::new(&blocks, summary, true);
    }
    if mode != SearchMode::Exhaustive {
        return Err(Fatal("shelf enumeration is exhaustive only".into()));
    }
    let blocks = (1..=max_n)
        .map(|n| {
            let mut items = match kind {
                EnumKind::Racks => enumerate_racks(n, side)?,
                _ => enumerate_shelves(n, side)?,
            };
            if up_to_iso {
                items = classify_up_to_iso(&items)?;
            }
            Ok(SizeBlock {
                size: n,
                count: items.len(),
                items,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let what = match kind {
        EnumKind::Racks => format!("{side} racks"),
        _ => format!("{side} shelves"),
    };
    let what = if up_to_iso {
        format!("{what} up to isomorphism")
    } else {
        what
    };
    let summary = summarize(&what, &blocks);
    Outcome::new(&blocks, summary, true)
}

fn summarize<T>(what: &str, blocks: &[SizeBlock<T>]) -> String {
    let counts: Vec<String> = blocks.iter().map(|b| format!("n={}: {}", b.size, b.count)).collect();
    format!("{what}: {}", counts.join(", "))
}
