//! `lucanomial`: verify Lucanomial congruences over parameter grids and prime ranges.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lucanomial::rank::find_maximal_rank_primes_with;
use lucanomial::report::{write_ranks, write_reports, write_sums};
use lucanomial::sums::MAX_Q_SUM;
use lucanomial::{
    compute_sums, crosscheck_exact, lemma_sweep, rank_of_appearance, sweep_with, Claim,
    CongruenceReport, Error, Execution, Format, LucasParams, RankRecord, SumRecord, Summary, SweepSpec,
};

/// Upper bound on left sides re-evaluated when `--seed` is given.
const CROSSCHECK_SAMPLES: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "lucanomial", version, about = "Wolstenholme-type congruences for Lucanomial coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, default_value = "text")]
    format: Format,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (1 runs sequentially; 0 picks automatically)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check theorems over a parameter grid and prime range
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        range: PrimeRange,
        /// Comma-separated theorem ids (W, W+, Viggo, N, LjWe, P5_1..P5_4, P6, KW) or "all"
        #[arg(long, value_delimiter = ',', default_value = "all")]
        theorem: Vec<String>,
        /// Largest k
        #[arg(long, default_value_t = 3)]
        kmax: u64,
        /// Largest l (defaults to kmax)
        #[arg(long)]
        lmax: Option<u64>,
        /// Re-evaluate a seeded sample of left sides through the exact path
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check the supporting lemma family
    Lemmas {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        range: PrimeRange,
    },
    /// List primes of maximal rank with their ranks
    Search {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        range: PrimeRange,
    },
    /// Print the power-sum table for one sequence and prime
    Table {
        #[arg(long = "P", allow_hyphen_values = true)]
        p: i64,
        #[arg(long = "Q", allow_hyphen_values = true)]
        q: i64,
        /// The prime
        #[arg(long)]
        prime: u64,
        /// Residues are taken modulo prime^precision
        #[arg(long, default_value_t = 3)]
        precision: u32,
    },
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Lucas parameter P
    #[arg(long = "P", allow_hyphen_values = true)]
    p: Option<i64>,
    /// Lucas parameter Q (nonzero)
    #[arg(long = "Q", allow_hyphen_values = true)]
    q: Option<i64>,
    /// Sweep every P with |P| <= N
    #[arg(long, conflicts_with = "p")]
    grid_p: Option<i64>,
    /// Sweep every nonzero Q with |Q| <= N
    #[arg(long, conflicts_with = "q")]
    grid_q: Option<i64>,
}

#[derive(Args, Debug)]
struct PrimeRange {
    /// Smallest prime considered
    #[arg(long, default_value_t = 5)]
    pmin: u64,
    /// Largest prime considered
    #[arg(long, default_value_t = 100)]
    pmax: u64,
}

impl PrimeRange {
    fn range(&self) -> Result<RangeInclusive<u64>, String> {
        if self.pmin > self.pmax {
            return Err(format!("--pmin {} exceeds --pmax {}", self.pmin, self.pmax));
        }
        Ok(self.pmin..=self.pmax)
    }
}

impl ParamArgs {
    fn resolve(&self) -> Result<Vec<LucasParams>, String> {
        let axis = |fixed: Option<i64>, grid: Option<i64>, name: &str| match (fixed, grid) {
            (Some(v), _) => Ok(vec![v]),
            (None, Some(n)) if n >= 0 => Ok((-n..=n).collect::<Vec<_>>()),
            (None, Some(n)) => Err(format!("--grid-{} must be nonnegative, got {n}", name.to_lowercase())),
            (None, None) => Err(format!("give --{name} or --grid-{}", name.to_lowercase())),
        };
        let ps = axis(self.p, self.grid_p, "P")?;
        let qs = axis(self.q, self.grid_q, "Q")?;
        let explicit_q = self.q.is_some();
        let mut out = Vec::new();
        for &p in &ps {
            for &q in &qs {
                if q == 0 && !explicit_q {
                    continue;
                }
                out.push(LucasParams::new(p, q).map_err(|e| e.to_string())?);
            }
        }
        Ok(out)
    }
}

fn parse_theorems(ids: &[String]) -> Result<Vec<Claim>, String> {
    let mut out: Vec<Claim> = Vec::new();
    for id in ids.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let claims = if id.eq_ignore_ascii_case("all") {
            Claim::THEOREMS.to_vec()
        } else {
            vec![id.parse::<Claim>().map_err(|e| format!("unknown theorem {id:?}: {e}"))?]
        };
        for c in claims {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    if out.is_empty() {
        return Err("no theorems selected".into());
    }
    Ok(out)
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidRange(_)
            | Error::Precondition(_)
            | Error::ZeroQ
            | Error::NotPrime(_)
            | Error::NotOddPrime(_)
            | Error::NoRank(_)
            | Error::PrecisionOverflow { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn execution(jobs: usize) -> Result<Execution, Failure> {
    if jobs == 1 {
        return Ok(Execution::Sequential);
    }
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(Execution::default())
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Re-evaluates a seeded sample of left sides; returns the number that disagree.
fn crosscheck(reports: &[CongruenceReport], seed: u64) -> usize {
    let eligible: Vec<&CongruenceReport> = reports.iter().filter(|r| r.lhs.is_some() && r.rank.is_some()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = sample(&mut rng, eligible.len(), CROSSCHECK_SAMPLES.min(eligible.len()));
    let mut checked = 0;
    let mut bad = 0;
    for i in picked {
        let r = eligible[i];
        match crosscheck_exact(r) {
            Some(true) => checked += 1,
            Some(false) => {
                checked += 1;
                bad += 1;
                eprintln!("cross-check mismatch: {} {} p={} k={:?} l={:?}", r.claim, r.params, r.prime, r.k, r.l);
            }
            None => {}
        }
    }
    eprintln!("cross-checked {checked} left sides (seed {seed}), {bad} mismatches");
    bad
}

fn emit_reports(cli: &Cli, reports: &[CongruenceReport]) -> Result<bool, Failure> {
    write_reports(sink(&cli.out)?, cli.format, reports)?;
    let summary = Summary::of(reports);
    if cli.format != Format::Text || cli.out.is_some() {
        eprintln!(
            "{} checks, {} counterexamples, {} errors",
            summary.checked, summary.counterexamples, summary.failures
        );
    }
    Ok(summary.all_passed())
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let exec = execution(cli.jobs)?;
    match &cli.command {
        Command::Verify { params, range, theorem, kmax, lmax, seed } => {
            let spec = SweepSpec {
                params: params.resolve().map_err(Failure::Usage)?,
                primes: range.range().map_err(Failure::Usage)?,
                theorems: parse_theorems(theorem).map_err(Failure::Usage)?,
                k_range: 0..=*kmax,
                l_range: 0..=lmax.unwrap_or(*kmax),
            };
            let reports = sweep_with(&spec, exec);
            let mut ok = emit_reports(cli, &reports)?;
            if let Some(seed) = seed {
                ok &= crosscheck(&reports, *seed) == 0;
            }
            Ok(ok)
        }
        Command::Lemmas { params, range } => {
            let grid = params.resolve().map_err(Failure::Usage)?;
            let reports = lemma_sweep(&grid, range.range().map_err(Failure::Usage)?, exec);
            emit_reports(cli, &reports)
        }
        Command::Search { params, range } => {
            let grid = params.resolve().map_err(Failure::Usage)?;
            range.range().map_err(Failure::Usage)?;
            let mut rows = Vec::new();
            for lp in &grid {
                for rank in find_maximal_rank_primes_with(lp, range.pmin, range.pmax, exec)? {
                    rows.push(RankRecord::new(lp, &rank));
                }
            }
            write_ranks(sink(&cli.out)?, cli.format, &rows)?;
            Ok(true)
        }
        Command::Table { p, q, prime, precision } => {
            let lp = LucasParams::new(*p, *q)?;
            let rank = rank_of_appearance(&lp, *prime)?;
            let table = compute_sums(&lp, &rank, *precision)?;
            let row = |label: String, value: u64| SumRecord {
                label,
                p: *prime,
                rho: rank.rho,
                precision: *precision,
                value: value.to_string(),
            };
            let mut rows: Vec<SumRecord> = table.labels().map(|(l, v)| row(l.to_string(), v)).collect();
            rows.extend((0..=MAX_Q_SUM).map(|nu| row(format!("S_Q({nu})"), table.q_sum(nu))));
            rows.push(row("U_rho".into(), table.u_rho()));
            rows.push(row("V_rho".into(), table.v_rho()));
            write_sums(sink(&cli.out)?, cli.format, &rows)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => Cli::command().error(ErrorKind::ValueValidation, msg).exit(),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
