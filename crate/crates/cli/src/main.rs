//! `corrpoly`: batch front end over the text formats.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use corrpoly::bell::{
    build_multipartite, complete_polytope_hrep, derive_tree_with, enumerate_vertices,
    mobius_forward, mobius_inverse, partition_families, read_atoms, read_measure, read_scenario,
    write_atoms, write_measure, Scenario, Subset, DEFAULT_GUARD,
};
use corrpoly::fm::{eliminate_many, FmOptions, OrderStrategy, RedundancyMode, TrackedSystem};
use corrpoly::hull::{facets_bruteforce_with_limit, hull_dd, vertices_from_hrep, BRUTEFORCE_LIMIT};
use corrpoly::polyhedron::{
    classify_all, read_hrep, read_vrep, render_with_labels, write_hrep, write_vrep,
};
use corrpoly::{Classification, Error as CoreError, InequalitySystem};

#[derive(Parser, Debug)]
#[command(
    name = "corrpoly",
    version,
    about = "Exact facet computations for correlation polytopes"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Override the size guard of the command (observables for `cpn` and
    /// `mobius`, vertex subsets for `hull --method brute`).
    #[arg(long, global = true)]
    guard: Option<u64>,
    /// More logging; repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the vertices of a scenario's correlation polytope.
    Vertices {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Facets of the convex hull of a V-file.
    Hull {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = HullMethod::Dd)]
        method: HullMethod,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Derive a scenario's facets by gluing blocks and eliminating variables.
    Derive {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 0)]
        pivot_party: usize,
        #[arg(long, value_enum, default_value_t = Order::MinProduct)]
        order: Order,
        /// Also list one canonical representative per family.
        #[arg(long)]
        families: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check an H-file against a V-file.
    Check {
        #[arg(long)]
        vrep: PathBuf,
        #[arg(long)]
        hrep: PathBuf,
        /// Also require the H-file's vertices to be exactly the V-file.
        #[arg(long)]
        complete: bool,
    },
    /// Closed-form facets of the complete polytope over `n` observables.
    Cpn {
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convert between subset probabilities and atom weights.
    Mobius {
        input: PathBuf,
        #[arg(long, conflicts_with = "inverse", required_unless_present = "inverse")]
        forward: bool,
        #[arg(long)]
        inverse: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Project an H-file by Fourier-Motzkin elimination.
    Eliminate {
        input: PathBuf,
        /// Coordinates to remove: subset labels such as `12,123` when the file
        /// names its coordinates, 1-based positions otherwise.
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
        #[arg(long, value_enum, default_value_t = Order::MinProduct)]
        order: Order,
        #[arg(long, value_enum, default_value_t = Redundancy::Lp)]
        redundancy: Redundancy,
        #[arg(long)]
        no_chernikov: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ScenarioArgs {
    /// Settings per party, e.g. `2,2`.
    #[arg(long, value_delimiter = ',')]
    settings: Option<Vec<usize>>,
    /// Scenario file.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HullMethod {
    Brute,
    Dd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    MinProduct,
    Given,
}

impl From<Order> for OrderStrategy {
    fn from(o: Order) -> Self {
        match o {
            Order::MinProduct => OrderStrategy::MinProduct,
            Order::Given => OrderStrategy::Given,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Redundancy {
    Lp,
    Off,
}

/// Bad flags or input that does not parse.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A check that ran and failed.
#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

const EXIT_DOMAIN: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_GUARD: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return EXIT_USAGE;
        }
        if cause.is::<Failed>() {
            return EXIT_DOMAIN;
        }
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::GuardExceeded { .. } => EXIT_GUARD,
                CoreError::Parse { .. }
                | CoreError::Io(_)
                | CoreError::DimensionMismatch { .. } => EXIT_USAGE,
                _ => EXIT_DOMAIN,
            };
        }
        if cause.is::<io::Error>() {
            return EXIT_USAGE;
        }
    }
    EXIT_DOMAIN
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let f = File::open(path).map_err(|e| Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(BufReader::new(f))
}

fn with_output(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> corrpoly::Result<()>,
) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| Usage(format!("cannot create {}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn load_scenario(args: &ScenarioArgs) -> anyhow::Result<Scenario> {
    match (&args.settings, &args.scenario) {
        (Some(s), None) => build_multipartite(s).map_err(|e| Usage(e.to_string()).into()),
        (None, Some(p)) => {
            read_scenario(open(p)?).with_context(|| format!("reading {}", p.display()))
        }
        _ => Err(Usage("give exactly one of --settings and --scenario".into()).into()),
    }
}

fn guard_usize(guard: Option<u64>, default: usize) -> usize {
    guard.map_or(default, |g| g as usize)
}

/// Column indices for `--vars`.
fn resolve_vars(sys: &InequalitySystem, vars: &[String]) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::with_capacity(vars.len());
    for tok in vars {
        let tok = tok.trim();
        let idx = match sys.labels() {
            Some(labels) => {
                let wanted = Subset::parse_label(tok)
                    .ok_or_else(|| Usage(format!("`{tok}` is not a subset label")))?;
                labels
                    .iter()
                    .position(|l| Subset::parse_label(l) == Some(wanted))
                    .ok_or_else(|| Usage(format!("no coordinate labelled `{tok}`")))?
            }
            None => match tok.parse::<usize>() {
                Ok(i) if (1..=sys.dim()).contains(&i) => i - 1,
                _ => {
                    return Err(Usage(format!(
                        "`{tok}` is not a coordinate position in 1..={}",
                        sys.dim()
                    ))
                    .into())
                }
            },
        };
        out.push(idx);
    }
    Ok(out)
}

fn check(vrep: &Path, hrep: &Path, complete: bool) -> anyhow::Result<()> {
    let v = read_vrep(open(vrep)?).with_context(|| format!("reading {}", vrep.display()))?;
    let h = read_hrep(open(hrep)?).with_context(|| format!("reading {}", hrep.display()))?;
    if v.dim() != h.dim() {
        bail!(Usage(format!(
            "V-file has dimension {}, H-file {}",
            v.dim(),
            h.dim()
        )));
    }
    let cls = classify_all(&h, &v)?;
    let labels: Vec<String> = h
        .labels()
        .map(<[String]>::to_vec)
        .unwrap_or_else(|| (1..=h.dim()).map(|i| format!("x{i}")).collect());
    let mut counts = [0usize; 3];
    let mut ok = true;
    for (i, (row, c)) in h.rows().iter().zip(&cls).enumerate() {
        let tag = match c {
            Classification::Facet => {
                counts[0] += 1;
                "facet"
            }
            Classification::ValidNonFacet => {
                counts[1] += 1;
                "valid"
            }
            Classification::Invalid => {
                counts[2] += 1;
                ok = false;
                "INVALID"
            }
        };
        println!("row {}: {tag}: {}", i + 1, render_with_labels(row, &labels));
    }
    println!(
        "{} rows: {} facets, {} valid non-facets, {} invalid",
        h.len(),
        counts[0],
        counts[1],
        counts[2]
    );
    if complete {
        match vertices_from_hrep(&h) {
            Ok(hv) if hv.same_set(&v) => {
                println!("complete: vertex sets agree ({} vertices)", v.len())
            }
            Ok(hv) => {
                ok = false;
                println!(
                    "incomplete: H-file has {} vertices, V-file {}",
                    hv.len(),
                    v.len()
                );
            }
            Err(e @ (CoreError::NonBinaryVertex(_) | CoreError::Unbounded)) => {
                ok = false;
                println!("incomplete: {e}");
            }
            Err(e) => return Err(e.into()),
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failed("check failed".into()).into())
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Vertices { scenario, output } => {
            let sc = load_scenario(&scenario)?;
            let v = enumerate_vertices(&sc)?;
            with_output(output.as_deref(), |w| write_vrep(w, &v))
        }
        Command::Hull {
            input,
            method,
            output,
        } => {
            let v =
                read_vrep(open(&input)?).with_context(|| format!("reading {}", input.display()))?;
            let h = match method {
                HullMethod::Brute => facets_bruteforce_with_limit(
                    &v,
                    cli.guard.map_or(BRUTEFORCE_LIMIT, u128::from),
                )?,
                HullMethod::Dd => hull_dd(&v)?,
            };
            with_output(output.as_deref(), |w| write_hrep(w, &h))
        }
        Command::Derive {
            scenario,
            pivot_party,
            order,
            families,
            output,
        } => {
            let sc = load_scenario(&scenario)?;
            let opts = FmOptions {
                order: order.into(),
                ..FmOptions::default()
            };
            let (facets, report) = derive_tree_with(&sc, pivot_party, &opts)?;
            log::info!("{report:?}");
            with_output(output.as_deref(), |w| write_hrep(&mut *w, &facets))?;
            if families {
                let labels = sc.labels();
                let classes = partition_families(&facets, &sc)?;
                for (k, c) in classes.iter().enumerate() {
                    println!(
                        "# family {}: orbit {}, {} rows: {}",
                        k + 1,
                        c.orbit_size,
                        c.members.len(),
                        render_with_labels(&c.representative, &labels)
                    );
                }
            }
            Ok(())
        }
        Command::Check {
            vrep,
            hrep,
            complete,
        } => check(&vrep, &hrep, complete),
        Command::Cpn { n, output } => {
            let h = complete_polytope_hrep(n, guard_usize(cli.guard, DEFAULT_GUARD))?;
            with_output(output.as_deref(), |w| write_hrep(w, &h))
        }
        Command::Mobius {
            input,
            forward,
            output,
            ..
        } => {
            let guard = guard_usize(cli.guard, DEFAULT_GUARD);
            if forward {
                let f = read_measure(open(&input)?)
                    .with_context(|| format!("reading {}", input.display()))?;
                if f.n() > guard {
                    return Err(CoreError::GuardExceeded {
                        what: "observables",
                        needed: f.n() as u128,
                        limit: guard as u128,
                    }
                    .into());
                }
                let atoms = mobius_forward(&f);
                with_output(output.as_deref(), |w| write_atoms(w, &atoms))?;
                if let Some((atom, v)) = atoms.first_negative() {
                    return Err(Failed(format!(
                        "no extension to a measure: negative atom {atom} = {}",
                        corrpoly::linalg::format_rational(&v)
                    ))
                    .into());
                }
                Ok(())
            } else {
                let a = read_atoms(open(&input)?)
                    .with_context(|| format!("reading {}", input.display()))?;
                if a.n() > guard {
                    return Err(CoreError::GuardExceeded {
                        what: "observables",
                        needed: a.n() as u128,
                        limit: guard as u128,
                    }
                    .into());
                }
                let f = mobius_inverse(&a)?;
                with_output(output.as_deref(), |w| write_measure(w, &f))
            }
        }
        Command::Eliminate {
            input,
            vars,
            order,
            redundancy,
            no_chernikov,
            output,
        } => {
            let sys =
                read_hrep(open(&input)?).with_context(|| format!("reading {}", input.display()))?;
            let cols = resolve_vars(&sys, &vars)?;
            let opts = FmOptions {
                chernikov: !no_chernikov,
                order: order.into(),
                redundancy: match redundancy {
                    Redundancy::Lp => RedundancyMode::Lp,
                    Redundancy::Off => RedundancyMode::Off,
                },
            };
            let out = eliminate_many(TrackedSystem::new(sys), &cols, &opts)?;
            let result = out.into_system();
            with_output(output.as_deref(), |w| write_hrep(w, &result))?;
            if result.rows().iter().any(|r| r.is_contradiction()) {
                return Err(Failed("the system is infeasible".into()).into());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
        {
            eprintln!("error: {}", anyhow!(e));
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
