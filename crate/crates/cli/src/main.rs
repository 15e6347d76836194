//! Command-line front end for the link-polynomial and loss-resistance
//! toolkit. Subcommands pipe JSON on stdin/stdout so builds, cuts,
//! classifications, and renders compose in shell one-liners.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error (from the
//! argument parser), 3 for an undetermined or inconclusive outcome.

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use resist_core::braid::{compose_blocks, render_svg};
use resist_core::builders;
use resist_core::linkpoly::{enumerate_classes, LinkPolynomial};
use resist_core::orthoarray::{OrthogonalArray, StrengthCheck};
use resist_core::resistance::{
    resistance_profile, state_to_link_polynomial, Classification, StateSource,
};
use resist_core::septest::ToleranceConfig;
use resist_core::qstate::SparseKet;

const EXIT_DOMAIN: u8 = 1;
const EXIT_UNDETERMINED: u8 = 3;

#[derive(Parser)]
#[command(name = "resist", version, about = "link polynomials and loss-resistant states")]
struct Cli {
    /// Worker threads for enumeration (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for all randomized search (separability restarts)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Link polynomial operations
    #[command(subcommand)]
    Links(LinksCmd),
    /// Quantum state construction and classification
    #[command(subcommand)]
    State(StateCmd),
    /// Orthogonal arrays
    #[command(subcommand)]
    Oa(OaCmd),
    /// Diagram rendering
    #[command(subcommand)]
    Link(LinkCmd),
}

#[derive(Subcommand)]
enum LinksCmd {
    /// Count and list link classes up to ring relabeling
    Enumerate {
        #[arg(long)]
        rings: usize,
        /// Write the representatives as a JSON array to this file
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the canonical m-resistant polynomial (all (N-m)-subsets)
    Resist {
        #[arg(long)]
        rings: usize,
        #[arg(long)]
        m: usize,
    },
    /// Cut rings out of a polynomial (JSON in, JSON out)
    Cut {
        /// Input polynomial JSON file; stdin when omitted
        #[arg(long = "in")]
        input: Option<String>,
        /// Comma-separated ring names, e.g. "a,b"
        #[arg(long)]
        rings: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Ghz,
    W,
    Mixed,
    PureAnsatz,
    Majorana,
    Psi,
    Oa,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Number of system sites (ghz, mixed, pure-ansatz, majorana, psi)
    #[arg(long)]
    n: Option<usize>,
    /// Resistance parameter (mixed, pure-ansatz, majorana, psi)
    #[arg(long)]
    m: Option<usize>,
    /// Alphabet size (oa)
    #[arg(long)]
    d: Option<u32>,
    /// Strength (oa)
    #[arg(long)]
    k: Option<usize>,
    /// Constellation JSON file overriding --n/--m (majorana)
    #[arg(long)]
    stars: Option<String>,
    /// Orthogonal array text file instead of the --d/--k construction (oa)
    #[arg(long = "in")]
    input: Option<String>,
}

#[derive(Subcommand)]
enum StateCmd {
    /// Build a named state family and print it as JSON
    Build(BuildArgs),
    /// Report resistance of a state (JSON in, report JSON out)
    Classify {
        #[arg(long = "in")]
        input: Option<String>,
        /// Check one marginal per loss level (exact for symmetric states)
        #[arg(long)]
        symmetric: bool,
    },
    /// Derive the link polynomial of a state's entangled marginals
    ToLink {
        #[arg(long = "in")]
        input: Option<String>,
    },
}

#[derive(Subcommand)]
enum OaCmd {
    /// Construct the polynomial-evaluation OA(d^k, d+1, d, k)
    Bush {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: usize,
    },
    /// Check the strength of an array from its text form
    Validate {
        #[arg(long = "in")]
        input: Option<String>,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum LinkCmd {
    /// Render a polynomial's braid diagram as SVG
    Render {
        #[arg(long = "in")]
        input: Option<String>,
        #[arg(long)]
        out: String,
    },
}

fn read_input(path: &Option<String>) -> Result<String, String> {
    match path {
        Some(p) if p != "-" => fs::read_to_string(p).map_err(|e| format!("{p}: {e}")),
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("stdin: {e}"))?;
            Ok(buf)
        }
    }
}

fn read_json(path: &Option<String>) -> Result<serde_json::Value, String> {
    serde_json::from_str(&read_input(path)?).map_err(|e| format!("bad JSON: {e}"))
}

/// Pure kets are plain ket JSON; mixtures carry "system_sites" and a
/// "terms" array of kets with one trailing environment site each.
fn read_state(path: &Option<String>) -> Result<StateSource, String> {
    let v = read_json(path)?;
    if let Some(system_sites) = v.get("system_sites").and_then(|s| s.as_u64()) {
        let terms = v
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or("mixture JSON needs a terms array")?;
        let terms: Result<Vec<SparseKet>, _> = terms.iter().map(SparseKet::from_json).collect();
        Ok(StateSource::Mixture {
            terms: terms.map_err(|e| e.to_string())?,
            system_sites: system_sites as usize,
        })
    } else {
        Ok(StateSource::Pure(
            SparseKet::from_json(&v).map_err(|e| e.to_string())?,
        ))
    }
}

fn state_json(source: &StateSource) -> serde_json::Value {
    match source {
        StateSource::Pure(k) => k.to_json(),
        StateSource::Mixture { terms, system_sites } => serde_json::json!({
            "system_sites": system_sites,
            "terms": terms.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
        }),
    }
}

fn need<T: Copy>(flag: &str, v: Option<T>) -> Result<T, String> {
    v.ok_or_else(|| format!("--{flag} is required for this family"))
}

fn build_state(args: &BuildArgs) -> Result<StateSource, String> {
    let err = |e: resist_core::builders::BuildError| e.to_string();
    match args.family {
        Family::Ghz => Ok(StateSource::Pure(
            builders::ghz(need("n", args.n)?).map_err(err)?,
        )),
        Family::W => Ok(StateSource::Pure(builders::w3())),
        Family::Mixed => {
            let n = need("n", args.n)?;
            let terms = builders::mixed_from_polynomial(n, need("m", args.m)?).map_err(err)?;
            Ok(StateSource::Mixture {
                terms,
                system_sites: n,
            })
        }
        Family::PureAnsatz => Ok(StateSource::Pure(
            builders::pure_ansatz(need("n", args.n)?, need("m", args.m)?).map_err(err)?,
        )),
        Family::Psi => Ok(StateSource::Pure(
            builders::psi_family(need("n", args.n)?, need("m", args.m)?).map_err(err)?,
        )),
        Family::Majorana => {
            let c = match &args.stars {
                Some(path) => {
                    builders::Constellation::from_json(&read_json(&Some(path.clone()))?)
                        .map_err(err)?
                }
                None => builders::pole_equator_constellation(
                    need("n", args.n)?,
                    need("m", args.m)?,
                )
                .map_err(err)?,
            };
            Ok(StateSource::Pure(builders::majorana_state(&c).map_err(err)?))
        }
        Family::Oa => {
            let oa = match &args.input {
                Some(_) => OrthogonalArray::from_text(&read_input(&args.input)?)
                    .map_err(|e| e.to_string())?,
                None => OrthogonalArray::construct_bush(
                    need("d", args.d)?,
                    need("k", args.k)?,
                )
                .map_err(|e| e.to_string())?,
            };
            Ok(StateSource::Pure(oa.to_state()))
        }
    }
}

fn parse_ring_list(s: &str, poly: &LinkPolynomial) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let mut chars = t.chars();
            match (chars.next(), chars.next()) {
                (Some(c @ 'a'..='z'), None) => {
                    let i = c as usize - 'a' as usize;
                    if i < poly.ring_count() {
                        Ok(i)
                    } else {
                        Err(format!("ring {t} out of range"))
                    }
                }
                _ => t.parse::<usize>().map_err(|_| format!("bad ring {t:?}")),
            }
        })
        .collect()
}

fn run(cli: Cli) -> Result<u8, String> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let cfg = ToleranceConfig::default();
    match cli.command {
        Command::Links(LinksCmd::Enumerate { rings, out }) => {
            let census = enumerate_classes(rings);
            println!("{}", census.class_count);
            if let Some(path) = out {
                let list: Vec<serde_json::Value> =
                    census.representatives.iter().map(|p| p.to_json()).collect();
                fs::write(&path, serde_json::to_string_pretty(&list).unwrap())
                    .map_err(|e| format!("{path}: {e}"))?;
            }
            Ok(0)
        }
        Command::Links(LinksCmd::Resist { rings, m }) => {
            let p = LinkPolynomial::generate_m_resistant(rings, m).map_err(|e| e.to_string())?;
            println!("{}", p.to_json());
            Ok(0)
        }
        Command::Links(LinksCmd::Cut { input, rings }) => {
            let p = LinkPolynomial::from_json(&read_json(&input)?).map_err(|e| e.to_string())?;
            let cut = parse_ring_list(&rings, &p)?;
            let q = p.cut(&cut).map_err(|e| e.to_string())?;
            println!("{}", q.to_json());
            Ok(0)
        }
        Command::State(StateCmd::Build(args)) => {
            let source = build_state(&args)?;
            println!("{}", state_json(&source));
            Ok(0)
        }
        Command::State(StateCmd::Classify { input, symmetric }) => {
            let source = read_state(&input)?;
            let profile = resistance_profile(&source, &cfg, cli.seed, symmetric)
                .map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&profile.to_json()).unwrap());
            match profile.classification {
                Classification::Resistant(_) => Ok(0),
                Classification::Undetermined(_) => Ok(EXIT_UNDETERMINED),
            }
        }
        Command::State(StateCmd::ToLink { input }) => {
            let source = read_state(&input)?;
            match state_to_link_polynomial(&source, &cfg, cli.seed) {
                Ok(p) => {
                    println!("{}", p.to_json());
                    Ok(0)
                }
                Err(resist_core::resistance::ResistError::UndecidedMarginal(sites)) => {
                    eprintln!("marginal on sites {sites:?} could not be decided");
                    Ok(EXIT_UNDETERMINED)
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Oa(OaCmd::Bush { d, k }) => {
            let oa = OrthogonalArray::construct_bush(d, k).map_err(|e| e.to_string())?;
            print!("{}", oa.to_text());
            Ok(0)
        }
        Command::Oa(OaCmd::Validate { input, k }) => {
            let oa = OrthogonalArray::from_text(&read_input(&input)?);
            // from_text re-validates at the declared strength; accept a
            // header strength differing from --k by rechecking directly
            match oa {
                Ok(oa) => match oa.validate_strength(k) {
                    StrengthCheck::Valid { lambda } => {
                        println!("valid strength {k} with index {lambda}");
                        Ok(0)
                    }
                    StrengthCheck::Invalid { columns, tuple } => {
                        println!("invalid: columns {columns:?} miss tuple {tuple:?}");
                        Ok(EXIT_DOMAIN)
                    }
                },
                Err(e) => {
                    println!("invalid: {e}");
                    Ok(EXIT_DOMAIN)
                }
            }
        }
        Command::Link(LinkCmd::Render { input, out }) => {
            let p = LinkPolynomial::from_json(&read_json(&input)?).map_err(|e| e.to_string())?;
            let subsets: Vec<Vec<usize>> = p
                .monomials()
                .map(|mask| (0..p.ring_count()).filter(|&i| mask & (1 << i) != 0).collect())
                .collect();
            let braid = compose_blocks(p.ring_count(), &subsets).map_err(|e| e.to_string())?;
            fs::write(&out, render_svg(&braid)).map_err(|e| format!("{out}: {e}"))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
