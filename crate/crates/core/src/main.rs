use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use descent_core::beta::{beta_single, build_residue_table, residue_histogram, weighted_histogram};
use descent_core::cache::{table_path, TableStore};
use descent_core::cd::{verify_prop71, verify_theorem_7_2, verify_theorem_8_2, verify_theorem_9_1};
use descent_core::combinat::DescentSet;
use descent_core::config::{default_workers, resolve_cache_dir, Mode, OutputFormat, RunConfig};
use descent_core::cyclotomic::{scan_factors, scan_factors_residue_mode, FactorReport};
use descent_core::data::unexplained_factors;
use descent_core::delta::verify_parity_theorem;
use descent_core::report::VerifyReport;
use descent_core::tables::{table1, table2, table3, table4, table5, table6, TableOutput};
use descent_core::verify::{verify_eq8, verify_lemma65, verify_lemma83, verify_prop66};
use descent_core::witness::cross_check_witnesses;
use descent_core::{beta, Error, Result};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "descent",
    version,
    about = "Descent set statistics and cyclotomic factors of the descent set polynomial"
)]
struct Cli {
    /// Directory for cached tables [default: $DESCENT_CACHE_DIR, else the platform data directory]
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads [default: available cores]
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Residue,
}

#[derive(Subcommand)]
enum Command {
    /// Print β_n(S), optionally reduced mod p
    Beta {
        #[arg(long)]
        n: u32,
        /// Comma-separated elements of S, e.g. "1,9"; empty for S = ∅
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// List the cyclotomic factors Φ_m of Q_n(t) with m <= m_max
    Factors {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        scan: ScanArgs,
        /// List each factor with its multiplicity
        #[arg(long)]
        mult: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
    },
    /// Run a verifier; exits 1 on any failed check
    Verify {
        #[arg(value_enum)]
        target: Target,
        #[command(flatten)]
        params: VerifyParams,
    },
    /// Regenerate a table and compare it with the embedded expected data
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
        which: u8,
        #[command(flatten)]
        params: VerifyParams,
    },
    /// Counts a_{m,j} (or weighted sums b_{m,j}) of subsets by β_n(S) mod m
    Histogram {
        #[arg(long)]
        n: u32,
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long)]
        weighted: bool,
    },
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Args, Clone)]
struct ScanArgs {
    #[arg(long, default_value_t = 1000)]
    m_max: u64,
    /// Scan only m = 1 and even m (the default)
    #[arg(long, conflicts_with = "all_m")]
    even_only: bool,
    /// Scan odd m as well
    #[arg(long)]
    all_m: bool,
}

#[derive(Args, Clone, Default)]
struct VerifyParams {
    /// One or more n, comma-separated
    #[arg(long, value_delimiter = ',')]
    n: Vec<u32>,
    /// One or more odd prime powers q, comma-separated
    #[arg(long, value_delimiter = ',')]
    q: Vec<u64>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long)]
    m_max: Option<u64>,
    /// Include the long-running cases
    #[arg(long)]
    long: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Macmahon,
    Parity,
    Table1,
    Table2,
    Table3,
    Table4,
    Table5,
    Table6,
    Prop71,
    Thm72,
    Thm82,
    Thm91,
    Prop66,
    Lemma65,
    Lemma83,
    Eq8,
    /// Theorem-predicted factors against the scanner
    Witnesses,
}

#[derive(Subcommand)]
enum CacheCommand {
    /// Build and store exact tables for n = 1..=n_max
    Build {
        #[arg(long)]
        n_max: u32,
    },
    /// Print the cache directory
    Path,
    /// List cached tables
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                e if e.is_resource_limit() => EXIT_RESOURCE,
                Error::Io(_) | Error::Format(_) => EXIT_FAIL,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let (m_max, even_only, mode) = match &cli.command {
        Command::Factors { scan, mode, .. } => (
            scan.m_max,
            !scan.all_m,
            match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Residue => Mode::Residue,
            },
        ),
        _ => (1000, true, Mode::Exact),
    };
    let format = match cli.format {
        Format::Text => OutputFormat::Text,
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    let config = RunConfig::new(
        resolve_cache_dir(cli.cache_dir),
        format,
        cli.workers.unwrap_or_else(default_workers),
        m_max,
        even_only,
        mode,
    )?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build_global()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let store = TableStore::with_dir(&config.cache_dir);

    match cli.command {
        Command::Beta { n, set, modulus } => cmd_beta(&config, n, &set, modulus),
        Command::Factors { n, mult, .. } => cmd_factors(&config, &store, n, mult),
        Command::Verify { target, params } => {
            let report = cmd_verify(&store, target, &params)?;
            emit_report(&config, &report);
            Ok(if report.passed() { 0 } else { EXIT_FAIL })
        }
        Command::Table { which, params } => {
            let out = cmd_table(&store, which, &params)?;
            print!(
                "{}",
                match config.format {
                    OutputFormat::Text => out.to_text(),
                    OutputFormat::Json => out.to_json() + "\n",
                    OutputFormat::Csv => out.to_csv(),
                }
            );
            Ok(if out.report.passed() { 0 } else { EXIT_FAIL })
        }
        Command::Histogram { n, modulus, weighted } => cmd_histogram(&config, &store, n, modulus, weighted),
        Command::Cache(c) => cmd_cache(&config, &store, c),
    }
}

fn cmd_beta(config: &RunConfig, n: u32, set: &str, modulus: Option<u64>) -> Result<u8> {
    let s = DescentSet::parse(n, set)?;
    if modulus == Some(0) {
        return Err(Error::invalid("--mod must be positive"));
    }
    let value = beta_single(&s);
    let residue = modulus.map(|p| (&value % p).to_string());
    match config.format {
        OutputFormat::Json => {
            println!(
                "{}",
                json!({ "n": n, "set": s.to_string(), "beta": value.to_string(), "mod": modulus, "residue": residue })
            )
        }
        OutputFormat::Csv => {
            println!("n,set,beta,mod,residue");
            println!(
                "{n},\"{s}\",{value},{},{}",
                modulus.map(|p| p.to_string()).unwrap_or_default(),
                residue.clone().unwrap_or_default()
            );
        }
        OutputFormat::Text => match (modulus, residue) {
            (Some(p), Some(r)) => println!("{r}\n(β_{n}({s}) = {value}, mod {p})"),
            _ => println!("{value}"),
        },
    }
    Ok(0)
}

fn cmd_factors(config: &RunConfig, store: &TableStore, n: u32, mult: bool) -> Result<u8> {
    let report: FactorReport = match config.mode {
        Mode::Exact => scan_factors(&*store.get(n)?, config.m_max, !config.even_only)?,
        Mode::Residue => scan_factors_residue_mode(n, config.m_max, !config.even_only)?,
    };
    let unexplained: Vec<u64> = unexplained_factors(n).iter().copied().filter(|&m| report.get(m).is_some()).collect();
    match config.format {
        OutputFormat::Json => {
            let mut v = serde_json::to_value(&report).expect("report serialization cannot fail");
            v["unexplained"] = json!(unexplained);
            println!("{v}");
        }
        OutputFormat::Csv => {
            println!("n,m,multiplicity,unexplained");
            for f in &report.factors {
                println!("{},{},{},{}", n, f.m, f.multiplicity, unexplained.contains(&f.m));
            }
        }
        OutputFormat::Text => {
            let scope = if config.even_only { "m = 1 and even m" } else { "all m" };
            println!("Q_{n}(t), {scope} <= {}: {}", config.m_max, report.product_string());
            if mult {
                for f in &report.factors {
                    let flag = if unexplained.contains(&f.m) { "  unexplained" } else { "" };
                    println!("  Φ_{:<6} multiplicity {}{flag}", f.m, f.multiplicity);
                }
            }
            if !unexplained.is_empty() {
                let list: Vec<String> = unexplained.iter().map(|m| format!("Φ_{m}")).collect();
                println!("unexplained by any known theorem: {}", list.join(", "));
            }
        }
    }
    Ok(0)
}

fn list_or(values: &[u32], default: &[u32]) -> Vec<u32> {
    if values.is_empty() {
        default.to_vec()
    } else {
        values.to_vec()
    }
}

fn q_list_or(values: &[u64], default: &[u64]) -> Vec<u64> {
    if values.is_empty() {
        default.to_vec()
    } else {
        values.to_vec()
    }
}

fn to_n(q: u64) -> Result<u32> {
    u32::try_from(q).map_err(|_| Error::invalid(format!("q = {q} is out of range")))
}

fn cmd_verify(store: &TableStore, target: Target, p: &VerifyParams) -> Result<VerifyReport> {
    let name = target.to_possible_value().expect("no skipped variants").get_name().to_string();
    let mut report = VerifyReport::new(name);
    match target {
        Target::Macmahon => {
            let n_max = p.n_max.unwrap_or(12);
            for n in list_or(&p.n, &(1..=n_max).collect::<Vec<_>>()) {
                report.extend(beta::verify_macmahon(n)?);
            }
        }
        Target::Parity => {
            let default = match p.n_max {
                Some(n_max) => (1..=n_max).collect(),
                None => vec![6, 11, 12, 16],
            };
            for n in list_or(&p.n, &default) {
                report.extend(verify_parity_theorem(n)?);
            }
        }
        Target::Table1 | Target::Table2 | Target::Table3 | Target::Table4 | Target::Table5 | Target::Table6 => {
            let which = match target {
                Target::Table1 => 1,
                Target::Table2 => 2,
                Target::Table3 => 3,
                Target::Table4 => 4,
                Target::Table5 => 5,
                _ => 6,
            };
            report.extend(cmd_table(store, which, p)?.report);
        }
        Target::Prop71 => {
            for n in list_or(&p.n, &(2..=p.n_max.unwrap_or(6)).collect::<Vec<_>>()) {
                report.extend(verify_prop71(&*store.get(2 * n)?)?);
            }
        }
        Target::Thm72 => {
            for n in list_or(&p.n, &[6, 10, 12, 14, 18, 20, 22]) {
                report.extend(verify_theorem_7_2(&*store.get(n)?)?);
            }
        }
        Target::Thm82 => {
            for q in q_list_or(&p.q, &[3, 5, 7, 9, 11]) {
                report.extend(verify_theorem_8_2(q, &*store.get(to_n(2 * q)?)?)?);
            }
        }
        Target::Thm91 => {
            for q in q_list_or(&p.q, &[11, 13, 17, 19]) {
                report.extend(verify_theorem_9_1(q, &*store.get(to_n(q + 1)?)?)?);
            }
        }
        Target::Prop66 => report.extend(verify_prop66(&*store.get(11)?)?),
        Target::Lemma65 => report.extend(verify_lemma65(&*store.get(11)?)?),
        Target::Lemma83 => {
            for q in q_list_or(&p.q, &[9]) {
                report.extend(verify_lemma83(q, &*store.get(to_n(2 * q)?)?)?);
            }
        }
        Target::Eq8 => {
            for q in q_list_or(&p.q, &[9]) {
                report.extend(verify_eq8(q, &*store.get(to_n(q + 1)?)?)?);
            }
        }
        Target::Witnesses => {
            let m_max = p.m_max.unwrap_or(3000);
            for n in list_or(&p.n, &(3..=p.n_max.unwrap_or(16)).collect::<Vec<_>>()) {
                report.extend(cross_check_witnesses(&*store.get(n)?, m_max)?);
            }
        }
    }
    Ok(report)
}

fn cmd_table(store: &TableStore, which: u8, p: &VerifyParams) -> Result<TableOutput> {
    match which {
        1 => table1(p.n_max.unwrap_or(if p.long { 31 } else { 15 })),
        2 => table2(),
        3 => table3(),
        4 => table4(),
        5 => table5(),
        _ => {
            let n_max = p.n_max.unwrap_or(if p.long { 20 } else { 16 });
            let m_max = p.m_max.unwrap_or(if p.long { 10_000 } else { 3000 });
            table6(3, n_max, m_max, &|n| store.get(n))
        }
    }
}

fn emit_report(config: &RunConfig, report: &VerifyReport) {
    match config.format {
        OutputFormat::Text => println!("{report}"),
        OutputFormat::Json => println!("{}", report.to_json()),
        OutputFormat::Csv => {
            println!("check,status,detail");
            for c in &report.checks {
                println!("{},{},{}", csv_field(&c.name), c.status, csv_field(&c.detail));
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_histogram(config: &RunConfig, store: &TableStore, n: u32, m: u64, weighted: bool) -> Result<u8> {
    let values: Vec<String> = if weighted {
        weighted_histogram(&*store.get(n)?, m)?.sums.iter().map(|b| b.to_string()).collect()
    } else if n <= 24 {
        residue_histogram(&*store.get(n)?, m)?.counts.iter().map(|c| c.to_string()).collect()
    } else {
        build_residue_table(n, m)?.histogram().counts.iter().map(|c| c.to_string()).collect()
    };
    let label = if weighted { "b" } else { "a" };
    match config.format {
        OutputFormat::Json => println!("{}", json!({ "n": n, "m": m, "weighted": weighted, "values": values })),
        OutputFormat::Csv => {
            println!("j,{label}");
            for (j, v) in values.iter().enumerate() {
                println!("{j},{v}");
            }
        }
        OutputFormat::Text => {
            for (j, v) in values.iter().enumerate() {
                println!("{label}_{{{m},{j}}} = {v}");
            }
        }
    }
    Ok(0)
}

fn cmd_cache(config: &RunConfig, store: &TableStore, c: CacheCommand) -> Result<u8> {
    let dir = &config.cache_dir;
    match c {
        CacheCommand::Build { n_max } => {
            for n in 1..=n_max {
                let t = store.get(n)?;
                println!("n = {n}: {} entries, {}", t.len(), table_path(dir, n).display());
            }
        }
        CacheCommand::Path => println!("{}", dir.display()),
        CacheCommand::List => {
            for n in 1..=24 {
                let path = table_path(dir, n);
                if let Ok(meta) = std::fs::metadata(&path) {
                    println!("n = {n}: {} bytes, {}", meta.len(), path.display());
                }
            }
        }
    }
    Ok(0)
}
