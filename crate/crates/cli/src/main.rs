use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use syscow_core::bivector::{self, Bivector, Variance};
use syscow_core::bounds_pipeline::{bounds_for, GammaConfig, ManifoldSpec};
use syscow_core::charclass;
use syscow_core::exact::{format_rational, parse_rational, Q};
use syscow_core::flat_model::{self, FlatTorusMetric, ModelFile, ProductModel, SystoleResult};
use syscow_core::nonzero_combination::{
    brute_force_min_cost, find_combination_traced, v_n, IntegerBasis, DEFAULT_BRUTE_FORCE_CAP,
};
use syscow_core::normed_lattice::{gamma_lower_bound_search, successive_minima, LatticeConfig};
use syscow_core::{Error, ErrorKind};

macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "syscow", version, about = "Stable 2-systole bounds and their ingredients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Systole and volume bounds from a scalar curvature lower bound
    Bound {
        /// s2xs2 | s2pow N | s2tor M N | cp3 | cpodd N | generic B2 DIM
        #[arg(long, num_args = 1..=3, required = true)]
        manifold: Vec<String>,
        /// Lower bound on scalar curvature, an exact rational
        #[arg(long, allow_hyphen_values = true)]
        scal: String,
        /// Exact value to use for the transference constant
        #[arg(long)]
        gamma: Option<String>,
        /// Constant C in the C·b·ln b envelope for unknown transference constants
        #[arg(long, default_value_t = 1.0)]
        banaszczyk_c: f64,
        #[arg(long)]
        json: bool,
    },
    /// Successive minima of a lattice under a norm
    LatticeMinima {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Mass, comass and canonical form of a bivector
    Bivector {
        #[arg(value_parser = ["mass", "comass", "canonical"])]
        op: String,
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Integer combination with all coordinates nonzero
    PropA1 {
        #[arg(long)]
        matrix: PathBuf,
        /// Also run the exhaustive minimum-cost search
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Characteristic class arithmetic
    Charclass {
        #[command(subcommand)]
        op: CharclassOp,
    },
    /// Stable 2-systoles of flat and product models
    Flat {
        #[command(subcommand)]
        op: FlatOp,
    },
    /// Random search for large transference products
    GammaSearch {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum CharclassOp {
    /// Â-class of CP^N
    Ahat {
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Twisted index of O(K) on CP^N
    Index {
        n: usize,
        #[arg(allow_negative_numbers = true)]
        k: i64,
        #[arg(long)]
        json: bool,
    },
    /// Smallest positive twist with nonzero index on CP^N
    MinTwist {
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Admissibility of the line bundle with c1 = Σ b_j η_j on a product of 2-spheres
    SphereProduct {
        #[arg(required = true, allow_negative_numbers = true)]
        b: Vec<i64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum FlatOp {
    /// Stable 2-systole of a flat torus
    Torus {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Stable 2-systole of a sphere/torus product
    Product {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Stable spherical 2-systole of a sphere/torus product
    Spherical {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Core(Error),
    Io(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e.kind() {
                ErrorKind::Validation => ExitCode::from(2),
                ErrorKind::Resource => ExitCode::from(3),
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Bound {
            manifold,
            scal,
            gamma,
            banaszczyk_c,
            json,
        } => cmd_bound(&manifold, &scal, gamma.as_deref(), banaszczyk_c, json),
        Command::LatticeMinima { config, k, json } => cmd_lattice_minima(&config, k, json),
        Command::Bivector { op, coeffs, json } => cmd_bivector(&op, &coeffs, json),
        Command::PropA1 { matrix, oracle, json } => cmd_prop_a1(&matrix, oracle, json),
        Command::Charclass { op } => cmd_charclass(op),
        Command::Flat { op } => cmd_flat(op),
        Command::GammaSearch {
            dim,
            trials,
            seed,
            json,
        } => cmd_gamma_search(dim, trials, seed, json),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).unwrap_or_default());
}

fn parse_count(s: &str, what: &str) -> Result<usize, Failure> {
    s.parse()
        .map_err(|_| Failure::Input(format!("{what} must be a nonnegative integer, got {s:?}")))
}

fn parse_manifold(args: &[String]) -> Result<ManifoldSpec, Failure> {
    let name = args[0].as_str();
    let rest = &args[1..];
    let arity = |n: usize| -> Result<(), Failure> {
        if rest.len() == n {
            Ok(())
        } else {
            Err(Failure::Input(format!(
                "manifold {name} takes {n} argument(s), got {}",
                rest.len()
            )))
        }
    };
    Ok(match name {
        "s2xs2" => {
            arity(0)?;
            ManifoldSpec::S2xS2
        }
        "s2pow" => {
            arity(1)?;
            ManifoldSpec::S2Power(parse_count(&rest[0], "N")?)
        }
        "s2tor" => {
            arity(2)?;
            ManifoldSpec::S2PowTorus(parse_count(&rest[0], "M")?, parse_count(&rest[1], "N")?)
        }
        "cp3" => {
            arity(0)?;
            ManifoldSpec::Cp3
        }
        "cpodd" => {
            arity(1)?;
            ManifoldSpec::CpOdd(parse_count(&rest[0], "N")?)
        }
        "generic" => {
            arity(2)?;
            ManifoldSpec::Generic {
                b2: parse_count(&rest[0], "B2")?,
                dim: parse_count(&rest[1], "DIM")?,
            }
        }
        other => {
            return Err(Failure::Input(format!(
                "unknown manifold {other:?} (expected s2xs2, s2pow, s2tor, cp3, cpodd or generic)"
            )))
        }
    })
}

/// `b` for which `--gamma` supplies `Γ_b`.
fn gamma_index(spec: &ManifoldSpec) -> Option<usize> {
    match spec {
        ManifoldSpec::S2xS2 => Some(2),
        ManifoldSpec::S2Power(n) => Some(*n),
        ManifoldSpec::S2PowTorus(m, n) => {
            let k = n.div_ceil(2);
            Some(m + k * (2 * k).saturating_sub(1))
        }
        ManifoldSpec::Generic { b2, .. } => Some(*b2),
        ManifoldSpec::CpOdd(_) => Some(1),
        ManifoldSpec::Cp3 => None,
    }
}

fn cmd_bound(manifold: &[String], scal: &str, gamma: Option<&str>, c: f64, json: bool) -> CmdResult {
    let spec = parse_manifold(manifold)?;
    let scal: Q = parse_rational(scal)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Failure::Input("--banaszczyk-c must be positive".into()));
    }
    let mut config = GammaConfig {
        banaszczyk_c: c,
        ..GammaConfig::default()
    };
    if let Some(g) = gamma {
        let b = gamma_index(&spec)
            .ok_or_else(|| Failure::Input(format!("--gamma does not apply to {spec}")))?;
        config = config.with_override(b, parse_rational(g)?)?;
    }
    let reports = bounds_for(&spec, &scal, &config)?;
    if json {
        print_json(&json!({
            "manifold": spec.to_string(),
            "dimension": spec.dimension(),
            "scal": format_rational(&scal),
            "bounds": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        }));
        return Ok(());
    }
    out!("{spec}, scal >= {}", format_rational(&scal));
    for r in &reports {
        let approx = match (r.float_value, r.envelope) {
            (Some(v), _) => format!("  (≈ {v:.6})"),
            (None, Some(v)) => format!("  (≈ {v:.6} with C = {c})"),
            _ => String::new(),
        };
        out!("{} <= {}{}", r.quantity, r.bound, approx);
        for s in &r.trace.steps {
            out!("    [{}] {}", s.rule, s.formula);
        }
    }
    Ok(())
}

fn cmd_lattice_minima(config: &Path, k: Option<usize>, json: bool) -> CmdResult {
    let cfg: LatticeConfig = read_json(config)?;
    let (lattice, norm) = cfg.build()?;
    let k = k.unwrap_or(lattice.dim());
    let m = successive_minima(&lattice, &norm, k)?;
    if json {
        print_json(&json!({
            "dim": lattice.dim(),
            "norm": norm.kind_name(),
            "values": m.values,
            "witnesses": m.witnesses,
            "vectors": m.vectors,
            "radius": m.radius,
            "visited": m.visited,
        }));
        return Ok(());
    }
    out!("lattice of dimension {} with {} norm", lattice.dim(), norm.kind_name());
    for (i, (v, w)) in m.values.iter().zip(&m.witnesses).enumerate() {
        out!("lambda_{} = {v:.12}  witness {w:?}", i + 1);
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BivectorFile {
    Matrix(Vec<Vec<f64>>),
    Coords { n: usize, coords: Vec<f64> },
    Wrapped { matrix: Vec<Vec<f64>> },
}

fn cmd_bivector(op: &str, coeffs: &Path, json: bool) -> CmdResult {
    let variance = if op == "comass" { Variance::Form } else { Variance::Vector };
    let b = match read_json::<BivectorFile>(coeffs)? {
        BivectorFile::Matrix(rows) | BivectorFile::Wrapped { matrix: rows } => {
            Bivector::from_rows(&rows, variance)?
        }
        BivectorFile::Coords { n, coords } => Bivector::from_coords(n, &coords, variance)?,
    };
    let out = match op {
        "mass" => {
            let v = bivector::mass(&b)?;
            json!({"op": "mass", "dim": b.dim(), "value": v})
        }
        "comass" => {
            let v = bivector::comass(&b)?;
            json!({"op": "comass", "dim": b.dim(), "value": v})
        }
        _ => {
            let c = bivector::canonical_form(&b)?;
            let planes: Vec<Value> = c
                .planes
                .iter()
                .map(|(u, v)| json!({"u": u.as_slice(), "v": v.as_slice()}))
                .collect();
            json!({"op": "canonical", "dim": b.dim(), "lambdas": c.lambdas, "planes": planes})
        }
    };
    if json {
        print_json(&out);
        return Ok(());
    }
    match op {
        "canonical" => {
            out!("canonical form in dimension {}", b.dim());
            for (k, p) in out["planes"].as_array().into_iter().flatten().enumerate() {
                out!("  lambda_{} = {:.12}", k + 1, out["lambdas"][k]);
                out!("    u = {}", p["u"]);
                out!("    v = {}", p["v"]);
            }
        }
        _ => out!("{op} = {:.12}", out["value"].as_f64().unwrap_or(f64::NAN)),
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Rows(Vec<Vec<i64>>),
    Wrapped { matrix: Vec<Vec<i64>> },
}

fn cmd_prop_a1(matrix: &Path, oracle: bool, json: bool) -> CmdResult {
    let rows = match read_json::<MatrixFile>(matrix)? {
        MatrixFile::Rows(r) | MatrixFile::Wrapped { matrix: r } => r,
    };
    let basis = IntegerBasis::from_i64_rows(&rows)?;
    let report = find_combination_traced(&basis);
    let oracle_result = if oracle {
        let budget = v_n(basis.dim())?;
        Some(brute_force_min_cost(&basis, budget, DEFAULT_BRUTE_FORCE_CAP)?)
    } else {
        None
    };
    if json {
        let mut out = serde_json::to_value(&report).unwrap_or_default();
        if let Some(o) = &oracle_result {
            out["oracle"] = serde_json::to_value(o).unwrap_or_default();
        }
        print_json(&out);
        return Ok(());
    }
    let c = &report.combination;
    out!("coefficients {:?}", c.coeffs);
    out!(
        "result       [{}]",
        c.result.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
    );
    out!("cost         {} (bound V_{} = {})", c.cost, basis.dim(), report.bound);
    for s in &report.trace {
        let repair = match (s.l, s.c) {
            (Some(l), Some(c)) => format!(", added {c} x column {l}"),
            _ => String::new(),
        };
        out!("  depth {} dim {}: kept {:?}{}", s.depth, s.dim, s.kept, repair);
    }
    match oracle_result {
        Some(Some(o)) => out!("oracle minimum cost {} via {:?}", o.cost, o.coeffs),
        Some(None) => out!("oracle found no combination within V_n"),
        None => {}
    }
    Ok(())
}

fn cmd_charclass(op: CharclassOp) -> CmdResult {
    match op {
        CharclassOp::Ahat { n, json } => {
            let s = charclass::ahat_cp(n)?;
            if json {
                print_json(&json!({"n": n, "series": s}));
            } else {
                out!("Â(CP^{n}) = {s}");
            }
        }
        CharclassOp::Index { n, k, json } => {
            let v = charclass::line_index_cp(n, k)?;
            if json {
                print_json(&json!({"n": n, "k": k, "index": format_rational(&v)}));
            } else {
                out!("index of O({k}) on CP^{n} = {}", format_rational(&v));
            }
        }
        CharclassOp::MinTwist { n, json } => {
            let k = charclass::minimal_admissible_twist(n)?;
            let v = charclass::line_index_cp(n, k)?;
            if json {
                print_json(&json!({"n": n, "twist": k, "index": format_rational(&v)}));
            } else {
                out!("minimal twist on CP^{n}: {k} (index {})", format_rational(&v));
            }
        }
        CharclassOp::SphereProduct { b, json } => {
            let r = charclass::sphere_product_admissible(&b)?;
            if json {
                print_json(&json!({
                    "b": b,
                    "admissible": r.admissible,
                    "top_coefficient": format_rational(&r.top_coefficient),
                }));
            } else {
                out!(
                    "top coefficient {}: {}",
                    format_rational(&r.top_coefficient),
                    if r.admissible { "admissible" } else { "not admissible" }
                );
            }
        }
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GramFile {
    Rows(Vec<Vec<f64>>),
    Wrapped { gram: Vec<Vec<f64>> },
}

fn print_systole(label: &str, r: &SystoleResult, json: bool) {
    if json {
        print_json(&json!({
            "quantity": label,
            "value": r.value,
            "over_pi": r.over_pi,
            "witness": r.witness,
        }));
        return;
    }
    match r.over_pi {
        Some(q) => out!("{label} = {:.12} = {q}·π", r.value),
        None => out!("{label} = {:.12}", r.value),
    }
    if !r.witness.sphere_part.is_empty() {
        out!("  sphere part {:?}", r.witness.sphere_part);
    }
    if !r.witness.torus_part.is_empty() {
        out!("  torus part (pairs i<j) {:?}", r.witness.torus_pairs());
    }
}

fn cmd_flat(op: FlatOp) -> CmdResult {
    match op {
        FlatOp::Torus { gram, json } => {
            let rows = match read_json::<GramFile>(&gram)? {
                GramFile::Rows(r) | GramFile::Wrapped { gram: r } => r,
            };
            let g = FlatTorusMetric::from_rows(&rows)?;
            print_systole("stsys2", &flat_model::torus_stable_2_systole(&g)?, json);
        }
        FlatOp::Product { model, json } => {
            let m = ProductModel::from_file(&read_json::<ModelFile>(&model)?)?;
            print_systole("stsys2", &flat_model::product_model_stsys(&m)?, json);
        }
        FlatOp::Spherical { model, json } => {
            let m = ProductModel::from_file(&read_json::<ModelFile>(&model)?)?;
            print_systole("stsys2_spherical", &flat_model::spherical_restricted_systole(&m)?, json);
        }
    }
    Ok(())
}

fn cmd_gamma_search(dim: usize, trials: usize, seed: u64, json: bool) -> CmdResult {
    let r = gamma_lower_bound_search(dim, trials, seed)?;
    if json {
        print_json(&serde_json::to_value(&r).unwrap_or_default());
        return Ok(());
    }
    out!("best product over {trials} trials (dim {dim}, seed {seed}): {:.12}", r.best);
    out!("lattice basis rows {:?}", r.lattice_basis);
    out!("norm vertices {:?}", r.norm_vertices);
    Ok(())
}
