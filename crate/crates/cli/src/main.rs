mod run_config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use henon_lab::boettcher::{self, DeriveOptions, Strategy};
use henon_lab::config::MapSpec;
use henon_lab::covering::{deck_eval, DeckRational, LiftAlgebra, PushDirection};
use henon_lab::dyadic::{unit_decompose, RingElem};
use henon_lab::exact::parse_complex;
use henon_lab::henon::estimate_filtration_radius;
use henon_lab::potential::{self, GreenOptions, DEFAULT_BUDGET};
use henon_lab::selftest::{self, DEFAULT_SEED};
use henon_lab::short_c2::{export_grid, sample_slice, ExportFormat};
use henon_lab::symmetry::{classify_aut1, detect_linear_symmetries, Aut1Case};
use henon_lab::{Error, HenonMap, Point, Result};
use num_complex::Complex64;
use serde::Serialize;

use run_config::RunConfig;

const EXIT_ARGS: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_PRECISION: u8 = 4;
const EXIT_SELFTEST: u8 = 5;

/// Green's functions, Böttcher coordinates, lift polynomials and symmetry
/// groups of complex Hénon maps.
#[derive(Parser)]
#[command(name = "henon-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MapArg {
    /// Map as a JSON file or inline JSON, e.g. '{"d":2,"p":[0],"a":3}'.
    #[arg(long)]
    map: String,
}

#[derive(Args)]
struct PointArg {
    /// Point "x,y"; each coordinate may be complex, e.g. "1-2i,0.5".
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Formal,
    Fit,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirArg {
    Plus,
    Minus,
}

#[derive(Subcommand)]
enum Command {
    /// Forward escape classification.
    Classify {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        point: PointArg,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
    },
    /// G⁺ (or G⁻ with --minus).
    Green {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        point: PointArg,
        #[arg(long)]
        minus: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
    },
    /// Böttcher coordinate at a point of V_R⁺.
    Boettcher {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        point: PointArg,
        #[arg(long, default_value_t = 20)]
        trunc: u32,
    },
    /// The lift polynomial Q.
    DeriveQ {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::Formal)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = boettcher::DEFAULT_FIT_DIGITS)]
        digits: u32,
        /// Series truncation for the formal strategy (default d + 3).
        #[arg(long)]
        trunc: Option<u32>,
    },
    /// Linear symmetry group and the Aut₁ classification.
    Symmetries {
        #[command(flatten)]
        map: MapArg,
    },
    /// Fiber-affine lifts and deck transformations.
    Lift {
        #[command(subcommand)]
        op: LiftOp,
    },
    /// Unit decomposition in ℤ[1/d].
    Units {
        #[arg(long)]
        d: u64,
        /// Element "m", "m/d^k" or "m/D".
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
    },
    /// Samples Ω_c on a slice and exports the grid.
    Slice {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        c: f64,
        /// Output path; falls back to the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Runs the invariant suite; exit code 5 on any failure.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u32>,
    },
}

#[derive(Subcommand)]
enum LiftOp {
    /// One push of (α = ζ^e, γ).
    Push {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        lift: LiftParams,
    },
    /// n pushes of (α = ζ^e, γ).
    Iterate {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        lift: LiftParams,
        #[arg(long)]
        n: u32,
    },
    /// Image of (z, ζ) under the deck transformation γ_{k/dⁿ}.
    Deck {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long)]
        n: u32,
        /// "z,zeta" with |zeta| > 1.
        #[command(flatten)]
        point: PointArg,
    },
}

#[derive(Args)]
struct LiftParams {
    /// Exponent of α = exp(2πi·e/(d²−1)).
    #[arg(long, allow_hyphen_values = true)]
    e: i64,
    /// Exact translation, e.g. "1/2-i".
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    gamma: String,
    #[arg(long, value_enum, default_value_t = DirArg::Plus)]
    dir: DirArg,
}

fn load_map(arg: &MapArg) -> Result<HenonMap> {
    let text = if Path::new(&arg.map).is_file() {
        std::fs::read_to_string(&arg.map).map_err(|source| Error::Io {
            path: PathBuf::from(&arg.map),
            source,
        })?
    } else {
        arg.map.clone()
    };
    Ok(MapSpec::from_json(&text)?.to_map()?.0)
}

fn parse_point(s: &str) -> Result<Point> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Error::Domain(format!("point {s:?} is not of the form x,y")))?;
    Ok((parse_complex(x.trim())?.to_c64(), parse_complex(y.trim())?.to_c64()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string(value).map_err(|e| Error::Inconsistent(e.to_string()))?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SymmetryReport {
    exponents: Vec<u64>,
    modulus: u64,
    k: usize,
    k_prime: usize,
    case: Aut1Case,
    k_divides_k_prime: bool,
}

#[derive(Serialize)]
struct UnitReport {
    unit: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponents: Option<Vec<i64>>,
}

#[derive(Serialize)]
struct LiftedPoint {
    z: Complex64,
    zeta: Complex64,
}

#[derive(Serialize)]
struct SliceReport {
    out: PathBuf,
    format: String,
    width: usize,
    height: usize,
    counts: std::collections::BTreeMap<&'static str, usize>,
}

fn formal_q(map: &HenonMap) -> Result<boettcher::LiftPolynomial> {
    boettcher::derive_lift_polynomial(map, Strategy::FormalSeries, &DeriveOptions::for_degree(map.d()))
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Classify { map, point, budget } => {
            let h = load_map(&map)?;
            let fr = estimate_filtration_radius(&h);
            print_json(&potential::classify_point(&h, parse_point(&point.point)?, budget, &fr)?)?;
        }
        Command::Green {
            map,
            point,
            minus,
            budget,
        } => {
            let h = load_map(&map)?;
            let fr = estimate_filtration_radius(&h);
            let z = parse_point(&point.point)?;
            let opts = GreenOptions {
                budget,
                ..GreenOptions::default()
            };
            let v = if minus {
                potential::green_minus(&h, &fr, z, &opts)?
            } else {
                potential::green_plus(&h, &fr, z, &opts)?
            };
            print_json(&v)?;
        }
        Command::Boettcher { map, point, trunc } => {
            let h = load_map(&map)?;
            let fr = estimate_filtration_radius(&h);
            print_json(&boettcher::phi(&h, &fr, parse_point(&point.point)?, trunc)?)?;
        }
        Command::DeriveQ {
            map,
            strategy,
            digits,
            trunc,
        } => {
            let h = load_map(&map)?;
            let mut opts = DeriveOptions::for_degree(h.d());
            opts.digits = digits;
            if let Some(t) = trunc {
                opts.truncation = t;
            }
            let s = match strategy {
                StrategyArg::Formal => Strategy::FormalSeries,
                StrategyArg::Fit => Strategy::BigfloatFit,
            };
            print_json(&boettcher::derive_lift_polynomial(&h, s, &opts)?)?;
        }
        Command::Symmetries { map } => {
            let h = load_map(&map)?;
            let group = detect_linear_symmetries(&h)?;
            let cls = classify_aut1(&h, &formal_q(&h)?, 1e-9)?;
            print_json(&SymmetryReport {
                exponents: group.exponents,
                modulus: group.modulus,
                k: cls.k,
                k_prime: cls.k_prime,
                case: cls.case,
                k_divides_k_prime: cls.k_divides_k_prime,
            })?;
        }
        Command::Lift { op } => run_lift(op)?,
        Command::Units { d, elem } => {
            let x = RingElem::parse_with(&elem, d)?;
            let dec = unit_decompose(&x);
            print_json(&UnitReport {
                unit: dec.is_some(),
                sign: dec.as_ref().map(|u| u.sign),
                exponents: dec.map(|u| u.exponents),
            })?;
        }
        Command::Slice { config, c, out, format } => {
            let cfg = RunConfig::load(&config)?;
            let fmt: ExportFormat = format.parse()?;
            let out = out
                .or(cfg.out.clone())
                .ok_or_else(|| Error::InvalidSlice("no output path (--out or config \"out\")".into()))?;
            let slice = cfg
                .slice
                .clone()
                .ok_or_else(|| Error::InvalidSlice("config has no \"slice\"".into()))?;
            let h = cfg.map.to_map()?.0;
            let grid = sample_slice(&h, &slice, c, cfg.budget)?;
            export_grid(&grid, fmt, &out)?;
            let mut counts = std::collections::BTreeMap::new();
            for p in &grid.pixels {
                *counts.entry(p.status.as_str()).or_insert(0) += 1;
            }
            print_json(&SliceReport {
                out,
                format: format.to_ascii_lowercase(),
                width: grid.width(),
                height: grid.height(),
                counts,
            })?;
        }
        Command::Selftest { seed, only } => {
            let results = match only {
                Some(id) => vec![selftest::run_criterion(id, seed)],
                None => selftest::run_all(seed),
            };
            for r in &results {
                print_json(r)?;
            }
            if results.iter().any(|r| !r.passed) {
                return Ok(EXIT_SELFTEST);
            }
        }
    }
    Ok(0)
}

fn run_lift(op: LiftOp) -> Result<()> {
    match op {
        LiftOp::Push { map, lift } => push(&map, &lift, None),
        LiftOp::Iterate { map, lift, n } => push(&map, &lift, Some(n)),
        LiftOp::Deck { map, k, n, point } => {
            let h = load_map(&map)?;
            let r = DeckRational::new(k as i128, n, h.d())?;
            let (z, zeta) = deck_eval(&r, parse_point(&point.point)?, &formal_q(&h)?, h.a_c64())?;
            print_json(&LiftedPoint { z, zeta })
        }
    }
}

fn push(map: &MapArg, lift: &LiftParams, n: Option<u32>) -> Result<()> {
    let h = load_map(map)?;
    let q = formal_q(&h)?;
    let alg = LiftAlgebra::new(h.d(), h.a().clone())?;
    let f = alg.map(lift.e, &parse_complex(&lift.gamma)?);
    let dir = match lift.dir {
        DirArg::Plus => PushDirection::Plus,
        DirArg::Minus => PushDirection::Minus,
    };
    let g = match n {
        None => alg.push(&f, dir, &q)?,
        Some(n) => alg.push_iterated(&f, dir, n, &q)?,
    };
    print_json(&alg.view(&g))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Precision { .. } => EXIT_PRECISION,
        Error::InvalidMap(_) | Error::Parse(_) | Error::UnknownFormat(_) | Error::InvalidSlice(_) | Error::Io { .. } => {
            EXIT_ARGS
        }
        _ => EXIT_DOMAIN,
    }
}

fn diagnostic(e: &Error) -> serde_json::Value {
    let mut v = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
    match e {
        Error::Precision { required_digits } => v["requiredDigits"] = (*required_digits).into(),
        Error::UnderDetermined { missing_orders } => v["missingOrders"] = missing_orders.clone().into(),
        _ => {}
    }
    v
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var("HENON_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("HENON_LAB_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("{}", serde_json::json!({ "error": "bad-arguments", "message": msg }));
        return ExitCode::from(EXIT_ARGS);
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", diagnostic(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
