//! `gl2lab` command-line front end.
//!
//! Exit codes: 0 when the run completed without a failing check, 1 when an
//! asserted scan found a violation or a verification failed, 2 on usage,
//! budget or I/O errors.

mod render;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gl2lab::budget::Budget;
use gl2lab::cache::{Cache, CacheFamily};
use gl2lab::classify::Classifier;
use gl2lab::inertia::LemmaCase;
use gl2lab::mat2::parse_mat2;
use gl2lab::scan::{family_for, scan_classes, ScanMode, ScanParams};
use gl2lab::standard::{named, Family};
use gl2lab::verify;
use gl2lab::Subgroup;

use render::{Format, Output};

#[derive(Parser, Debug)]
#[command(
    name = "gl2lab",
    version,
    about = "Subgroups of GL2(Z/pZ): classification, lemma checks and image scans"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Report format. JSON is the stable one.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Enumeration cache directory.
    #[arg(long, env = "GL2LAB_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Report elapsed_ms as 0 so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Largest ambient group for a full lattice [default: 1000000]
    #[arg(long, global = true, value_name = "N")]
    max_ambient_order: Option<u64>,
    /// Largest p for the lattice of GL2(p) [default: 7]
    #[arg(long, global = true, value_name = "P")]
    max_full_lattice_p: Option<u64>,
    /// Largest p for lattices of B0, Ns, Nns, Cs [default: 17]
    #[arg(long, global = true, value_name = "P")]
    max_family_lattice_p: Option<u64>,
    /// Largest p for cyclic enumeration [default: 47]
    #[arg(long, global = true, value_name = "P")]
    max_cyclic_p: Option<u64>,
    /// Largest p for abelian enumeration [default: 19]
    #[arg(long, global = true, value_name = "P")]
    max_abelian_p: Option<u64>,
    /// Largest p for brute-force conjugator sweeps [default: 17]
    #[arg(long, global = true, value_name = "P")]
    max_exhaustive_p: Option<u64>,
}

impl BudgetArgs {
    fn resolve(&self) -> Budget {
        let mut b = Budget::default();
        let set = |slot: &mut u64, v: Option<u64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut b.max_ambient_order, self.max_ambient_order);
        set(&mut b.max_full_lattice_p, self.max_full_lattice_p);
        set(&mut b.max_family_lattice_p, self.max_family_lattice_p);
        set(&mut b.max_cyclic_p, self.max_cyclic_p);
        set(&mut b.max_abelian_p, self.max_abelian_p);
        set(&mut b.max_exhaustive_p, self.max_exhaustive_p);
        b
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shape labels of the subgroup generated by --gens (or a standard group).
    Classify {
        #[arg(long)]
        p: u64,
        /// Generators as "a,b,c,d;a,b,c,d;...".
        #[arg(long, required_unless_present = "family", conflicts_with = "family")]
        gens: Option<String>,
        /// A standard group instead of generators: Cs, Ns, Cns, Nns, B0, D, Z, GammaZ, SL2 or GL2.
        #[arg(long)]
        family: Option<Family>,
    },
    /// Exhaustive checks of the group-theoretic lemmas.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Scan every admissible image shape at (p, d).
    Scan {
        #[arg(value_enum)]
        mode: ModeArg,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        degree: u64,
        #[arg(long, conflicts_with = "ramified")]
        unramified: bool,
        #[arg(long)]
        ramified: bool,
    },
    /// Manage the enumeration cache.
    #[command(subcommand)]
    Cache(CacheCmd),
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Conjugate containment of D^k / Cns^k against the divisibility relations.
    Containment {
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = parse_part)]
        part: LemmaCase,
    },
    /// Index-two subgroup lemma over every subgroup of a Cartan normalizer.
    Index2 {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum)]
        cartan: CartanArg,
    },
    /// Abelian subgroup shapes in GL2, B0, Ns and Nns.
    AbelianShapes {
        #[arg(long)]
        p: u64,
    },
    /// G ∩ SL2 trivial implies det-injective (exhaustive or sampled).
    TrivialSl2 {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Every subgroup of GL2(p) gets a shape label.
    Dickson {
        #[arg(long)]
        p: u64,
    },
}

#[derive(Subcommand, Debug)]
enum CacheCmd {
    /// Precompute and store class lists.
    Warm {
        #[arg(long, value_parser = parse_family)]
        family: CacheFamily,
        /// Comma-separated primes.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
    },
    /// Delete every cache file.
    Clear,
    /// List cache entries and sizes.
    Stat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Cyclotomic,
    Abelian,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CartanArg {
    Split,
    Nonsplit,
}

fn parse_part(s: &str) -> Result<LemmaCase, String> {
    LemmaCase::parse(s).map_err(|e| e.to_string())
}

fn parse_family(s: &str) -> Result<CacheFamily, String> {
    CacheFamily::parse(s).map_err(|e| e.to_string())
}

fn parse_gens(p: u64, s: &str) -> gl2lab::Result<Vec<gl2lab::Mat2>> {
    s.split(';')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| parse_mat2(p, x))
        .collect()
}

fn require_odd_prime(p: u64) -> gl2lab::Result<()> {
    if p == 2 || !gl2lab::arith::is_prime(p) {
        return Err(gl2lab::Error::NotOddPrime(p));
    }
    Ok(())
}

struct Runner {
    global: Global,
    budget: Budget,
    cache: Cache,
    pool: rayon::ThreadPool,
}

impl Runner {
    fn compute<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        self.pool.install(f)
    }

    fn run(&self, command: &Command) -> gl2lab::Result<Output> {
        match command {
            Command::Classify { p, gens, family } => {
                require_odd_prime(*p)?;
                let g = match (gens, family) {
                    (Some(gens), _) => Subgroup::closure(*p, &parse_gens(*p, gens)?)?,
                    (None, Some(f)) => named(*f, *p)?,
                    (None, None) => unreachable!("clap requires one of --gens/--family"),
                };
                let result = self.compute(|| Classifier::new(*p)?.classify(&g))?;
                Ok(Output::Classify(result))
            }
            Command::Verify(v) => {
                let b = &self.budget;
                let report = self.compute(|| match v {
                    VerifyCmd::Containment { p, part } => {
                        verify::verify_conjugate_containment(*p, *part, b)
                    }
                    VerifyCmd::Index2 { p, cartan } => {
                        require_odd_prime(*p)?;
                        let (n, c) = match cartan {
                            CartanArg::Split => (Family::Ns, Family::Cs),
                            CartanArg::Nonsplit => (Family::Nns, Family::Cns),
                        };
                        verify::verify_index2_lemma(&named(n, *p)?, &named(c, *p)?, b)
                    }
                    VerifyCmd::AbelianShapes { p } => verify::verify_abelian_shapes(*p, b),
                    VerifyCmd::TrivialSl2 { n, seed } => {
                        verify::verify_trivial_sl2_part(*n, *seed, b)
                    }
                    VerifyCmd::Dickson { p } => verify::verify_dickson(*p, b),
                })?;
                Ok(Output::Verify(report))
            }
            Command::Scan {
                mode,
                p,
                degree,
                unramified: _,
                ramified,
            } => {
                let started = Instant::now();
                let mode = match mode {
                    ModeArg::Cyclotomic => ScanMode::Cyclotomic,
                    ModeArg::Abelian => ScanMode::Abelian,
                };
                let mut params = ScanParams::new(mode, *p, *degree, *ramified);
                params.budget = self.budget;
                params.validate()?;
                let family = family_for(mode);
                // Cache I/O stays on this thread; enumeration and the scan run in the pool.
                let classes = match self.cache.load(family, *p, &self.budget) {
                    Some(c) => c,
                    None => {
                        let c = self.compute(|| Cache::derive(family, *p, &self.budget))?;
                        self.cache.store(family, *p, &self.budget, &c)?;
                        c
                    }
                };
                let mut report = self.compute(|| scan_classes(&params, classes))?;
                report.elapsed_ms = if self.global.no_timing {
                    0
                } else {
                    started.elapsed().as_millis() as u64
                };
                Ok(Output::Scan(report))
            }
            Command::Cache(c) => {
                if self.cache.dir().is_none() {
                    return Err(gl2lab::Error::InvalidKind(
                        "cache commands need --cache-dir or GL2LAB_CACHE_DIR".into(),
                    ));
                }
                match c {
                    CacheCmd::Warm { family, p } => {
                        for &q in p {
                            require_odd_prime(q)?;
                            if self.cache.load(*family, q, &self.budget).is_none() {
                                let classes =
                                    self.compute(|| Cache::derive(*family, q, &self.budget))?;
                                self.cache.store(*family, q, &self.budget, &classes)?;
                            }
                        }
                        Ok(Output::CacheStat(self.cache.stat()?))
                    }
                    CacheCmd::Clear => Ok(Output::CacheCleared {
                        dir: self
                            .cache
                            .dir()
                            .map(|d| d.display().to_string())
                            .unwrap_or_default(),
                        removed: self.cache.clear()?,
                    }),
                    CacheCmd::Stat => Ok(Output::CacheStat(self.cache.stat()?)),
                }
            }
        }
    }
}

fn emit(global: &Global, output: &Output) -> io::Result<()> {
    let text = render::render(output, global.format)?;
    match &global.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.workers.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("gl2lab: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let budget = cli.global.budget.resolve();
    let cache = cli
        .global
        .cache_dir
        .clone()
        .map(Cache::at)
        .unwrap_or_default();
    let runner = Runner {
        global: cli.global,
        budget,
        cache,
        pool,
    };
    let result = runner.run(&cli.command);
    for event in runner.cache.events() {
        eprintln!(
            "gl2lab: cache entry {} re-derived: {}",
            event.file, event.reason
        );
    }
    let output = match result {
        Ok(output) => output,
        Err(e) => {
            eprintln!("gl2lab: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&runner.global, &output) {
        eprintln!("gl2lab: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if output.failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
