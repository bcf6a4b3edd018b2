use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcop::bench::{export_lp_file, run_bound_experiment, run_solver_experiment, ExperimentConfig};
use qcop::bounds::{natural_lower_bound, NlbVariant};
use qcop::model::{QMatrix, QscpInstance, Representation};
use qcop::qscp::{
    analyze, assemble_instance, format_number, generate_q, load_instance, load_orlib,
    write_instance, GeneratorConfig, QClass, QRanges,
};
use qcop::solver::{branch_and_bound, brute_force_solve, BoundKind, SolveReport, DEFAULT_NODE_CAP};
use qcop::stats::wilcoxon_signed_rank;
use qcop::transforms::{
    concavify, convexify, diagonal_annihilate, linear_annihilate, sym_convexify, symmetrize,
    transpose_repr, triangularize, ShiftPolicy, EXPERIMENT_SHIFT,
};
use qcop::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qcop",
    version,
    about = "Quadratic set covering: representations, bounds and solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Rewrite an instance in another equivalent representation.
    Transform(TransformArgs),
    /// Compute a natural lower bound.
    Bound(BoundArgs),
    /// Solve an instance exactly.
    Solve(SolveArgs),
    /// Run a batch experiment from a configuration file.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Statistical tests.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Write an instance in CPLEX LP format.
    ExportLp(InOut),
    /// Print row and column statistics of an instance.
    Analyze(InArg),
    /// Convert an OR-Library scp file to the native format.
    LoadOrlib(LoadOrlibArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Defaults to 2n + 3m + 11.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
    qclass: u8,
    /// Primary integer range of the class, as LO,HI.
    #[arg(long, value_parser = parse_range)]
    range: Option<(i64, i64)>,
    /// Range of the b vectors of classes 7 and 8, as LO,HI.
    #[arg(long, value_parser = parse_range)]
    secondary_range: Option<(i64, i64)>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReprArg {
    Sym,
    Ut,
    Cnx,
    Cnv,
    Symi,
    Dannil,
    Lannil,
    Transpose,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Fixed,
    Gershgorin,
    Eigen,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    repr: ReprArg,
    /// Diagonal shift for cnx, cnv and symi.
    #[arg(long = "M", default_value_t = EXPERIMENT_SHIFT)]
    shift: f64,
    /// How cnx and symi choose the shift.
    #[arg(long, value_enum, default_value = "fixed")]
    policy: PolicyArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Nlb,
    Nlbr,
    Nlbr1,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "nlb")]
    variant: VariantArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Bb,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKindArg {
    Nlb,
    Lp,
    None,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "bb")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "nlb")]
    bound: BoundKindArg,
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Bound-frequency experiment.
    Bounds(BenchArgs),
    /// Cross-representation solver experiment.
    Solve(BenchArgs),
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the `csv` key of the configuration.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Wilcoxon signed-rank test on a two-column CSV file.
    Wilcoxon {
        #[arg(long)]
        pairs: PathBuf,
    },
}

#[derive(Args)]
struct InOut {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InArg {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct LoadOrlibArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Attach a generated cost matrix of this class instead of Q = 0.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
    qclass: Option<u8>,
    /// Seed for the generated cost matrix; defaults to 2n + 3m + 11.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_range(s: &str) -> std::result::Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("invalid bound '{lo}'"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("invalid bound '{hi}'"))?;
    if lo > hi {
        return Err(format!("empty range [{lo}, {hi}]"));
    }
    Ok((lo, hi))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_solve(r: &SolveReport) {
    println!("value {}", format_number(r.optimal_value));
    println!("x {}", r.x);
    println!("nodes {}", r.nodes);
    println!("method {}", r.method);
    println!("proven {}", r.proven);
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => {
            let class = QClass::new(a.qclass)?;
            let mut cfg = GeneratorConfig::new(a.m, a.n, class);
            if let Some(seed) = a.seed {
                cfg = cfg.with_seed(seed);
            }
            let defaults = class.default_ranges();
            cfg = cfg.with_ranges(QRanges {
                primary: a.range.unwrap_or(defaults.primary),
                secondary: a.secondary_range.unwrap_or(defaults.secondary),
            });
            emit(a.out.as_deref(), &write_instance(&assemble_instance(&cfg)?))
        }
        Command::Transform(a) => {
            let inst = load_instance(&a.input)?;
            let policy = match a.policy {
                PolicyArg::Fixed => ShiftPolicy::Fixed(a.shift),
                PolicyArg::Gershgorin => ShiftPolicy::Gershgorin,
                PolicyArg::Eigen => ShiftPolicy::SmallestEigenvalue,
            };
            let rep = &inst.rep;
            let out = match a.repr {
                ReprArg::Sym => symmetrize(rep),
                ReprArg::Ut => triangularize(rep),
                ReprArg::Cnx => convexify(rep, policy)?,
                ReprArg::Cnv => concavify(rep, a.shift)?,
                ReprArg::Symi => sym_convexify(rep, policy)?,
                ReprArg::Dannil => diagonal_annihilate(rep),
                ReprArg::Lannil => linear_annihilate(rep),
                ReprArg::Transpose => transpose_repr(rep),
            };
            emit(a.out.as_deref(), &write_instance(&inst.with_rep(out)))
        }
        Command::Bound(a) => {
            let inst = load_instance(&a.input)?;
            let variant = match a.variant {
                VariantArg::Nlb => NlbVariant::Nlb,
                VariantArg::Nlbr => NlbVariant::NlbR,
                VariantArg::Nlbr1 => NlbVariant::NlbR1,
            };
            let r = natural_lower_bound(&inst, variant)?;
            println!("variant {}", r.variant);
            println!("alpha {}", format_number(r.alpha));
            println!("beta {}", format_number(r.beta));
            println!("bound {}", format_number(r.bound));
            println!("inner_subproblems {}", r.inner_subproblems);
            println!("outer_subproblems {}", r.outer_subproblems);
            println!("ceiling_applied {}", r.ceiling_applied);
            println!("exact {}", r.exact);
            Ok(())
        }
        Command::Solve(a) => {
            let inst = load_instance(&a.input)?;
            let report = match a.method {
                MethodArg::Brute => brute_force_solve(&inst)?,
                MethodArg::Bb => {
                    let kind = match a.bound {
                        BoundKindArg::Nlb => BoundKind::NlbBound,
                        BoundKindArg::Lp => BoundKind::LpLinearized,
                        BoundKindArg::None => BoundKind::None,
                    };
                    branch_and_bound(&inst, kind, a.node_cap)?
                }
            };
            print_solve(&report);
            Ok(())
        }
        Command::Bench(BenchCommand::Bounds(a)) => {
            let mut cfg = ExperimentConfig::from_file(&a.config)?;
            if a.csv.is_some() {
                cfg.csv = a.csv;
            }
            let e = run_bound_experiment(&cfg)?;
            if let Some(p) = &cfg.csv {
                std::fs::write(p, e.csv())?;
            }
            println!("{}", e.table);
            print!("{}", e.timing_csv());
            let failed = e.rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} bound computations failed; see the status column");
            }
            Ok(())
        }
        Command::Bench(BenchCommand::Solve(a)) => {
            let mut cfg = ExperimentConfig::from_file(&a.config)?;
            if a.csv.is_some() {
                cfg.csv = a.csv;
            }
            let e = run_solver_experiment(&cfg)?;
            match &cfg.csv {
                Some(p) => std::fs::write(p, e.csv())?,
                None => print!("{}", e.csv()),
            }
            Ok(())
        }
        Command::Stats(StatsCommand::Wilcoxon { pairs }) => {
            let pairs = read_pairs(&std::fs::read_to_string(&pairs)?)?;
            let r = wilcoxon_signed_rank(&pairs)?;
            println!("n_effective {}", r.n_effective);
            println!("w_plus {}", format_number(r.w_plus));
            println!("w_minus {}", format_number(r.w_minus));
            println!("p_value {}", r.p_value);
            println!("method {}", r.method);
            if r.degenerate {
                println!("degenerate true");
            }
            Ok(())
        }
        Command::ExportLp(a) => {
            let inst = load_instance(&a.input)?;
            match &a.out {
                Some(p) => export_lp_file(&inst, &mut std::fs::File::create(p)?),
                None => export_lp_file(&inst, &mut std::io::stdout().lock()),
            }
        }
        Command::Analyze(a) => {
            let inst = load_instance(&a.input)?;
            println!("{}", analyze(&inst.system));
            Ok(())
        }
        Command::LoadOrlib(a) => {
            let (system, c) = load_orlib(&std::fs::read_to_string(&a.input)?)?;
            let (m, n) = (system.m(), system.n());
            let q = match a.qclass {
                Some(class) => {
                    let mut cfg = GeneratorConfig::new(m, n, QClass::new(class)?);
                    if let Some(seed) = a.seed {
                        cfg = cfg.with_seed(seed);
                    }
                    generate_q(&cfg)?
                }
                None => QMatrix::zeros(n),
            };
            let inst = QscpInstance::new(system, Representation::original(q, c)?)?;
            emit(a.out.as_deref(), &write_instance(&inst))
        }
    }
}

/// Two numeric columns per line, comma or whitespace separated. A first line
/// that does not parse is taken as a header; `#` starts a comment.
fn read_pairs(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut pairs = Vec::new();
    let mut first = true;
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Option<(f64, f64)> = match fields.as_slice() {
            [a, b] => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        };
        match parsed {
            Some(p) => pairs.push(p),
            None if first => {}
            None => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected two numbers, found '{body}'"),
                })
            }
        }
        first = false;
    }
    Ok(pairs)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
