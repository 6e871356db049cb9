//! `tpa`: derivation spaces, structure checks, sampling, transport and the
//! full check suite from the command line.
//!
//! Exit codes: 0 success, 1 not transposed Poisson (or a failed criterion),
//! 2 usage, 3 parse or dimension error, 4 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use tpa_core::automorphism::{self, Automorphism, AutomorphismKind};
use tpa_core::classify::{self, DEFAULT_SEED};
use tpa_core::json as tj;
use tpa_core::reproduce::{self, ReproduceConfig};
use tpa_core::{
    rational, BilinearProduct, CatalogEntry, DerivationSpace, DerivationWeight, Error, LieAlgebra, TpChecker,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "tpa",
    version,
    about = "Exact ½-derivations and transposed Poisson structures on matrix Lie algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a basis of the δ-derivation space of given weight.
    Derivations {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value = "1/2")]
        weight: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether a product is a transposed Poisson structure.
    Verify {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        product: ProductArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample structures on T_n or M_n and check their predicted shape.
    Search {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transport a product along an automorphism.
    Transport {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        product: ProductArgs,
        /// Automorphism as linear map JSON.
        #[arg(long, conflicts_with = "random")]
        map: Option<PathBuf>,
        /// Use a seeded random automorphism (T_n and M_n only).
        #[arg(long)]
        random: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every acceptance check and write one report per criterion.
    Reproduce {
        #[arg(long, default_value_t = reproduce::DEFAULT_N_MAX)]
        n_max: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "reports")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgebraFamily {
    Tn,
    Mn,
    Sln,
    File,
}

#[derive(Args)]
struct AlgebraArgs {
    #[arg(long, value_enum)]
    algebra: Option<AlgebraFamily>,
    #[arg(long)]
    n: Option<usize>,
    /// Algebra JSON, with `--algebra file`.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct ProductArgs {
    /// Product JSON.
    #[arg(long, conflicts_with = "catalog")]
    product: Option<PathBuf>,
    /// `t2:<name>`, `tn_form2` or `mn_trace`.
    #[arg(long)]
    catalog: Option<String>,
    /// Parameter for catalog entries that take one.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self { code: 4, message: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_)
            | Error::UnknownCatalog(_)
            | Error::UnsupportedAlgebra(_)
            | Error::InvalidDimension(_) => 2,
            Error::Parse(_)
            | Error::DimensionMismatch { .. }
            | Error::NotAntisymmetric(..)
            | Error::NotCommutative(..)
            | Error::NotAutomorphism(..)
            | Error::Singular
            | Error::IndexOutOfRange { .. } => 3,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

/// An algebra with a short description recorded in outputs.
struct Resolved {
    algebra: LieAlgebra,
    spec: String,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

/// Writes to a sibling temporary file, then renames it into place.
fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| Failure::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Failure::io(path, e)
    })
}

fn emit(out: Option<&Path>, value: &Value) -> CliResult<()> {
    let text = tj::to_pretty(value);
    match out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn seed_or_env(seed: Option<u64>) -> CliResult<u64> {
    match seed {
        Some(s) => Ok(s),
        None => Ok(reproduce::seed_from_env(DEFAULT_SEED)?),
    }
}

/// Run metadata followed by the fields of `body`.
fn envelope(command: &str, algebra: Option<&str>, seed: Option<u64>, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("tool".into(), json!("tpa"));
    out.insert("version".into(), json!(VERSION));
    out.insert("command".into(), json!(command));
    if let Some(a) = algebra {
        out.insert("algebra_spec".into(), json!(a));
    }
    if let Some(s) = seed {
        out.insert("seed".into(), json!(s));
    }
    match body {
        Value::Object(fields) => out.extend(fields),
        other => {
            out.insert("result".into(), other);
        }
    }
    Value::Object(out)
}

impl AlgebraArgs {
    fn resolve(&self) -> CliResult<Option<Resolved>> {
        let Some(family) = self.algebra else {
            if self.file.is_some() {
                return Err(Failure::usage("--file needs --algebra file"));
            }
            return Ok(None);
        };
        if family == AlgebraFamily::File {
            let path = self.file.as_ref().ok_or_else(|| Failure::usage("--algebra file needs --file"))?;
            let algebra = tj::parse_algebra(&read(path)?)?;
            return Ok(Some(Resolved { algebra, spec: format!("file:{}", path.display()) }));
        }
        let n = self.n.ok_or_else(|| Failure::usage("--n is required for matrix algebras"))?;
        let (algebra, name) = match family {
            AlgebraFamily::Tn => (LieAlgebra::upper_triangular(n)?, "tn"),
            AlgebraFamily::Mn => (LieAlgebra::full_matrix(n)?, "mn"),
            AlgebraFamily::Sln => (LieAlgebra::special_linear(n)?, "sln"),
            AlgebraFamily::File => unreachable!("handled above"),
        };
        Ok(Some(Resolved { algebra, spec: format!("{name}:{n}") }))
    }

    fn require(&self) -> CliResult<Resolved> {
        self.resolve()?.ok_or_else(|| Failure::usage("--algebra is required"))
    }
}

/// Resolves the algebra and product together; a catalog entry supplies its
/// own algebra, which must agree with `--algebra` when both are given.
fn resolve_structure(alg: &AlgebraArgs, prod: &ProductArgs) -> CliResult<(Resolved, BilinearProduct, String)> {
    let given = alg.resolve()?;
    match (&prod.product, &prod.catalog) {
        (Some(path), None) => {
            let r = given.ok_or_else(|| Failure::usage("--product needs --algebra"))?;
            let p = tj::parse_product(&read(path)?)?;
            if p.dim() != r.algebra.dim() {
                return Err(Error::DimensionMismatch { expected: r.algebra.dim(), found: p.dim() }.into());
            }
            Ok((r, p, format!("file:{}", path.display())))
        }
        (None, Some(name)) => {
            let c = prod.c.as_deref().map(rational::parse).transpose()?;
            let entry = CatalogEntry::parse(name, alg.n, c)?;
            let algebra = entry.algebra()?;
            let spec = match given {
                Some(r) if r.algebra.dim() != algebra.dim() || r.algebra.kind() != algebra.kind() => {
                    return Err(Failure {
                        code: 3,
                        message: format!("catalog entry {name} does not live on {}", r.spec),
                    })
                }
                Some(r) => r.spec,
                None => algebra.kind().to_string(),
            };
            Ok((Resolved { algebra, spec }, entry.build()?, format!("catalog:{name}")))
        }
        _ => Err(Failure::usage("give exactly one of --product and --catalog")),
    }
}

fn cmd_derivations(alg: &AlgebraArgs, weight: &str, out: Option<&Path>) -> CliResult<u8> {
    let r = alg.require()?;
    let w = DerivationWeight(rational::parse(weight)?);
    let space = DerivationSpace::compute(&r.algebra, &w);
    let basis: Vec<Value> = space.basis().iter().map(|m| json!(tj::linear_map_to_json(m))).collect();
    let body = json!({
        "labels": r.algebra.labels().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "weight": rational::format(w.value()),
        "dimension": space.dim(),
        "basis": basis,
    });
    emit(out, &envelope("derivations", Some(&r.spec), None, body))?;
    Ok(0)
}

fn cmd_verify(alg: &AlgebraArgs, prod: &ProductArgs, out: Option<&Path>) -> CliResult<u8> {
    let (r, p, source) = resolve_structure(alg, prod)?;
    let report = TpChecker::new(&r.algebra).report(&p)?;
    let mut body = json!(report);
    body["product_source"] = json!(source);
    emit(out, &envelope("verify", Some(&r.spec), None, body))?;
    Ok(if report.is_tp { 0 } else { 1 })
}

fn cmd_search(alg: &AlgebraArgs, seed: Option<u64>, count: usize, out: Option<&Path>) -> CliResult<u8> {
    let r = alg.require()?;
    let seed = seed_or_env(seed)?;
    let report = classify::classify(&r.algebra, seed, count)?;
    let ok = report.pattern_violations.is_empty();
    emit(out, &envelope("search", Some(&r.spec), Some(seed), json!(report)))?;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_transport(
    alg: &AlgebraArgs,
    prod: &ProductArgs,
    map: Option<&Path>,
    random: bool,
    seed: Option<u64>,
    out: Option<&Path>,
) -> CliResult<u8> {
    use rand::SeedableRng;

    let (r, p, _) = resolve_structure(alg, prod)?;
    let (g, seed) = match (map, random) {
        (Some(path), false) => {
            let m = tj::parse_linear_map(&read(path)?)?;
            (Automorphism::new(&r.algebra, m, AutomorphismKind::Composite)?, None)
        }
        (None, true) => {
            let seed = seed_or_env(seed)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (automorphism::random_automorphism(&r.algebra, &mut rng)?, Some(seed))
        }
        _ => return Err(Failure::usage("give exactly one of --map and --random")),
    };
    let q = automorphism::transport(&r.algebra, &p, &g)?;
    let body = json!({
        "automorphism": tj::linear_map_to_json(g.map()),
        "product": tj::product_to_json(&q),
    });
    emit(out, &envelope("transport", Some(&r.spec), seed, body))?;
    Ok(0)
}

fn cmd_reproduce(n_max: usize, seed: Option<u64>, out_dir: &Path) -> CliResult<u8> {
    let seed = seed_or_env(seed)?;
    let cfg = ReproduceConfig::new(n_max, seed)?;
    // Everything is computed before the first write.
    let reports = reproduce::run_all(&cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| Failure::io(out_dir, e))?;
    let mut summary = Vec::new();
    for r in &reports {
        println!("criterion {:>2} {}: {}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.title);
        let body = envelope("reproduce", None, Some(seed), json!({ "n_max": n_max, "criterion": r }));
        write_atomic(&out_dir.join(format!("criterion_{:02}.json", r.id)), &tj::to_pretty(&body))?;
        summary.push(json!({ "id": r.id, "title": r.title, "passed": r.passed }));
    }
    let all = reports.iter().all(|r| r.passed);
    let body =
        envelope("reproduce", None, Some(seed), json!({ "n_max": n_max, "all_passed": all, "criteria": summary }));
    write_atomic(&out_dir.join("summary.json"), &tj::to_pretty(&body))?;
    Ok(if all { 0 } else { 1 })
}

fn run(cli: Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Derivations { algebra, weight, out } => cmd_derivations(algebra, weight, out.as_deref()),
        Command::Verify { algebra, product, out } => cmd_verify(algebra, product, out.as_deref()),
        Command::Search { algebra, seed, count, out } => cmd_search(algebra, *seed, *count, out.as_deref()),
        Command::Transport { algebra, product, map, random, seed, out } => {
            cmd_transport(algebra, product, map.as_deref(), *random, *seed, out.as_deref())
        }
        Command::Reproduce { n_max, seed, out_dir } => cmd_reproduce(*n_max, *seed, out_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("tpa: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
