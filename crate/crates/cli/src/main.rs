use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use zkframe_core::classify::{
    conjecture_monitor, table2_column, table2_tsv, table3_tsv, trivially_empty, verify_result,
};
use zkframe_core::db::{read_db, render_json, render_results, to_results, write_atomically};
use zkframe_core::reference::known_count;
use zkframe_core::{
    brute_force_classify, canonical_form, classify, classify_length, BruteForceBudget,
    ClassificationResult, ClassifyOptions, CodeType, LatticeClass, Tier, ZkError,
};

/// Classify self-dual codes over Z_k through k-frames of unimodular lattices.
#[derive(Parser)]
#[command(name = "zkframe", version)]
struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Wall-clock limit for each (k, n, lattice) job.
    #[arg(long, global = true)]
    budget_seconds: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify codes of one length, for one lattice class or all of them.
    Classify {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        lattice: Option<LatticeArg>,
        #[arg(long, value_enum, default_value_t = TierArg::Standard)]
        tier: TierArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Class counts per modulus and lattice as TSV, checked against the published table.
    Table2 {
        #[arg(long, default_value_t = 24)]
        max_k: u32,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = TierArg::Standard)]
        tier: TierArg,
    },
    /// N_4(k) for a range of moduli as TSV, checked against the published table.
    Table3 {
        #[arg(long, default_value_t = 25)]
        from: u32,
        #[arg(long, default_value_t = 200)]
        to: u32,
    },
    /// Compare the frame pipeline with exhaustive search on a tiny case.
    Oracle {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
    },
    /// Verify a database file.
    Check { dbfile: PathBuf },
    /// Classify a range of cells and write them as a database.
    Export {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ExportFormat::Zkdb)]
        format: ExportFormat,
        /// Moduli, e.g. `9`, `2-10` or `4,9,16`.
        #[arg(long, default_value = "2-24", value_parser = parse_list)]
        k: List,
        /// Lengths, in the same syntax.
        #[arg(long, default_value = "1-4", value_parser = parse_list)]
        n: List,
        #[arg(long, value_enum, default_value_t = TierArg::Standard)]
        tier: TierArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeArg {
    Zn,
    E8,
    E8z,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TierArg {
    Standard,
    Extended,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Zkdb,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Zkdb,
    Json,
}

impl From<TierArg> for Tier {
    fn from(t: TierArg) -> Tier {
        match t {
            TierArg::Standard => Tier::Standard,
            TierArg::Extended => Tier::Extended,
        }
    }
}

#[derive(Clone)]
struct List(Vec<u32>);

fn parse_list(s: &str) -> Result<List, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let bad = || format!("cannot parse {part:?}");
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(List(out))
}

enum Failure {
    Mismatch(String),
    Budget(String),
    Input(String),
}

impl From<ZkError> for Failure {
    fn from(e: ZkError) -> Failure {
        match e {
            ZkError::TimeExhausted(_) => Failure::Budget(e.to_string()),
            ZkError::LengthUnsupported(n, 7) => Failure::Input(format!("length {n} needs --tier extended")),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Mismatch(m) => write!(f, "verification failed: {m}"),
            Failure::Budget(m) => write!(f, "{m}"),
            Failure::Input(m) => write!(f, "{m}"),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Budget(_) => 2,
            Failure::Input(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(3);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .expect("global thread pool is configured once");
    }
    let budget = match cli.budget_seconds {
        Some(s) if !(s > 0.0 && s.is_finite()) => {
            eprintln!("error: --budget-seconds must be positive");
            return ExitCode::from(3);
        }
        s => s.map(Duration::from_secs_f64),
    };
    let opts = |tier: TierArg| ClassifyOptions {
        tier: tier.into(),
        budget,
    };
    let outcome = match cli.command {
        Command::Classify { k, n, lattice, tier, format } => run_classify(k, n, lattice, &opts(tier), format),
        Command::Table2 { max_k, max_n, tier } => run_table2(max_k, max_n, &opts(tier)),
        Command::Table3 { from, to } => run_table3(from, to, &opts(TierArg::Standard)),
        Command::Oracle { k, n } => run_oracle(k, n, &opts(TierArg::Standard)),
        Command::Check { dbfile } => run_check(&dbfile),
        Command::Export { out, format, k, n, tier } => run_export(&out, format, &k.0, &n.0, &opts(tier)),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn lattice_for(arg: LatticeArg, n: usize) -> LatticeClass {
    match arg {
        LatticeArg::Zn => LatticeClass::Zn(n),
        LatticeArg::E8 => LatticeClass::E8,
        LatticeArg::E8z => LatticeClass::E8PlusZ,
    }
}

fn summary(r: &ClassificationResult) -> String {
    format!(
        "k={} n={} {}: {} classes (Type I {}, Type II {}) in {:.2}s",
        r.k, r.n, r.lattice, r.count, r.type_counts.0, r.type_counts.1, r.timing_secs
    )
}

fn run_classify(k: u32, n: usize, lattice: Option<LatticeArg>, opts: &ClassifyOptions, format: Format) -> Outcome {
    let results = match lattice {
        Some(l) => vec![classify(k, n, lattice_for(l, n), opts)?],
        None => classify_length(k, n, opts)?,
    };
    match format {
        Format::Text => {
            for r in &results {
                println!("{}", summary(r));
                for c in &r.representatives {
                    let ty = if c.code_type() == CodeType::TypeII { "II" } else { "I" };
                    println!("  type {ty}, |C| = {}", c.size());
                    for row in c.generator().to_string().lines() {
                        println!("    {row}");
                    }
                }
            }
        }
        Format::Zkdb => print!("{}", render_results(&results)),
        Format::Json => print!("{}", render_json(&results)),
    }
    for r in &results {
        if let Some(want) = known_count(k, r.lattice) {
            if r.count as u32 != want {
                return Err(Failure::Mismatch(format!("{} gave {} classes, published {want}", r.lattice, r.count)));
            }
        }
    }
    Ok(())
}

/// Runs every job, keeping finished results even when some exhaust the budget.
fn run_jobs(jobs: &[(u32, usize, LatticeClass)], opts: &ClassifyOptions) -> (Vec<ClassificationResult>, Vec<Failure>) {
    let outcomes: Vec<Result<ClassificationResult, ZkError>> =
        jobs.par_iter().map(|&(k, n, l)| classify(k, n, l, opts)).collect();
    let mut done = Vec::new();
    let mut failures = Vec::new();
    for (&(k, n, l), o) in jobs.iter().zip(outcomes) {
        match o {
            Ok(r) => done.push(r),
            Err(e) => {
                eprintln!("k={k} n={n} {l}: {e}");
                failures.push(e.into());
            }
        }
    }
    (done, failures)
}

/// The most severe failure: input errors, then budget exhaustion, then mismatches.
fn worst(failures: Vec<Failure>) -> Outcome {
    let mut best: Option<Failure> = None;
    for f in failures {
        let rank = |f: &Failure| match f {
            Failure::Input(_) => 3,
            Failure::Budget(_) => 2,
            Failure::Mismatch(_) => 1,
        };
        if best.as_ref().is_none_or(|b| rank(&f) > rank(b)) {
            best = Some(f);
        }
    }
    best.map_or(Ok(()), Err)
}

fn mismatches(results: &[ClassificationResult]) -> Vec<Failure> {
    results
        .iter()
        .filter_map(|r| {
            let want = known_count(r.k, r.lattice)?;
            (r.count as u32 != want).then(|| {
                let msg = format!("k={} {}: {} classes, published {want}", r.k, r.lattice, r.count);
                eprintln!("{msg}");
                Failure::Mismatch(msg)
            })
        })
        .collect()
}

fn run_table2(max_k: u32, max_n: usize, opts: &ClassifyOptions) -> Outcome {
    if !(2..=1000).contains(&max_k) || !(1..=9).contains(&max_n) {
        return Err(Failure::Input("need 2 <= max-k <= 1000 and 1 <= max-n <= 9".into()));
    }
    let mut jobs = Vec::new();
    for k in 2..=max_k {
        for n in 1..=max_n {
            for l in LatticeClass::all_of_dim(n) {
                if !opts.tier.admits(n) && !trivially_empty(k, n, l) {
                    return Err(Failure::Input(format!("length {n} needs --tier extended")));
                }
                jobs.push((k, n, l));
            }
        }
    }
    let (results, mut failures) = run_jobs(&jobs, opts);
    let mut rows: BTreeMap<u32, [Option<usize>; 11]> = (2..=max_k).map(|k| (k, [None; 11])).collect();
    for r in &results {
        rows.get_mut(&r.k).expect("row exists")[table2_column(r.lattice)] = Some(r.count);
    }
    print!("{}", table2_tsv(&rows));
    for c in conjecture_monitor(&results) {
        if !c.holds {
            eprintln!(
                "NOTE: k={} length 8 has {} Type I and {} Type II classes, against the expected relation",
                c.k, c.type_i, c.type_ii
            );
        }
    }
    failures.extend(mismatches(&results));
    worst(failures)
}

fn run_table3(from: u32, to: u32, opts: &ClassifyOptions) -> Outcome {
    if from < 2 || to > 1000 || from > to {
        return Err(Failure::Input("need 2 <= from <= to <= 1000".into()));
    }
    let jobs: Vec<_> = (from..=to).map(|k| (k, 4, LatticeClass::Zn(4))).collect();
    let (results, mut failures) = run_jobs(&jobs, opts);
    let values: BTreeMap<u32, usize> = results.iter().map(|r| (r.k, r.count)).collect();
    print!("{}", table3_tsv(&values));
    failures.extend(mismatches(&results));
    worst(failures)
}

fn run_oracle(k: u32, n: usize, opts: &ClassifyOptions) -> Outcome {
    let brute = brute_force_classify(k, n, BruteForceBudget::default())?;
    let results = classify_length(k, n, opts)?;
    let framed: usize = results.iter().map(|r| r.count).sum();
    println!("brute force: {}", brute.len());
    for r in &results {
        println!("{}", summary(r));
    }
    println!("frames total: {framed}");
    if brute.len() != framed {
        return Err(Failure::Mismatch(format!("brute force {} vs frames {framed}", brute.len())));
    }
    Ok(())
}

fn run_check(path: &std::path::Path) -> Outcome {
    let records = read_db(path)?;
    let mut problems = Vec::new();
    let mut expected_index: BTreeMap<(u32, usize, LatticeClass), usize> = BTreeMap::new();
    for r in &records {
        let next = expected_index.entry((r.k, r.n, r.lattice)).or_insert(1);
        let tag = format!("k={} n={} {} index={}", r.k, r.n, r.lattice, r.index);
        if r.index != *next {
            problems.push(format!("{tag}: expected index {next}"));
        }
        *next = r.index + 1;
        if !r.code.is_self_dual() {
            problems.push(format!("{tag}: not self-dual"));
            continue;
        }
        if r.code.code_type() != r.code_type {
            problems.push(format!("{tag}: recorded type {:?}, actual {:?}", r.code_type, r.code.code_type()));
        }
        if canonical_form(&r.code)? != r.code {
            problems.push(format!("{tag}: not in canonical form"));
        }
    }
    let results = to_results(&records);
    for res in &results {
        if let Err(e) = verify_result(res) {
            problems.push(format!("k={} n={} {}: {e}", res.k, res.n, res.lattice));
        }
        let mut sorted = res.representatives.clone();
        sorted.dedup();
        if sorted.len() != res.representatives.len() {
            problems.push(format!("k={} n={} {}: duplicate classes", res.k, res.n, res.lattice));
        }
    }
    if render_results(&results) != std::fs::read_to_string(path).map_err(|e| Failure::Input(e.to_string()))? {
        problems.push("records are not in canonical file order".into());
    }
    for p in &problems {
        eprintln!("{p}");
    }
    let mismatched = mismatches(&results);
    println!(
        "{} records in {} cells, {} problems, {} count mismatches",
        records.len(),
        results.len(),
        problems.len(),
        mismatched.len()
    );
    if problems.is_empty() && mismatched.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{} problems", problems.len() + mismatched.len())))
    }
}

fn run_export(out: &std::path::Path, format: ExportFormat, ks: &[u32], ns: &[u32], opts: &ClassifyOptions) -> Outcome {
    let mut jobs = Vec::new();
    for &k in ks {
        for &n in ns {
            let n = n as usize;
            if !(1..=9).contains(&n) {
                return Err(Failure::Input(format!("length {n} outside 1..=9")));
            }
            jobs.extend(LatticeClass::all_of_dim(n).into_iter().map(|l| (k, n, l)));
        }
    }
    let (results, failures) = run_jobs(&jobs, opts);
    worst(failures)?;
    let text = match format {
        ExportFormat::Json => render_json(&results),
        ExportFormat::Zkdb => render_results(&results),
    };
    write_atomically(out, text.as_bytes())?;
    eprintln!(
        "wrote {} classes in {} cells to {}",
        results.iter().map(|r| r.count).sum::<usize>(),
        results.len(),
        out.display()
    );
    worst(mismatches(&results))
}
