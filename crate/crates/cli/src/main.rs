use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use northcott::bounds::{delta_lower_bound_prop45, northcott_report_thm13, LimitSide};
use northcott::checks::run_suite;
use northcott::construct::{
    construct_thm12, construct_thm14, construct_thm16, verify_json, Certificate, ConstructOptions, HeightTarget,
    Variant,
};
use northcott::discrepancy::{discrepancy, eta0, eta_radical_step};
use northcott::error::Error;
use northcott::exactcore::{
    dedekind_index_coprime, find_prime_in_ap, parse_integer, parse_rational, PolyZ,
};
use northcott::heights::{
    element_degree_over_q, house, parse_element, weighted_height, weil_height_integral, OrderingMode, RadicalTower,
    TowerElement,
};
use northcott::numerics::{PointTuple, Precision, RealInterval};
use northcott::oracle::{empirical_min_house, EnumerationSpec, DEFAULT_CAP};

#[derive(Parser)]
#[command(name = "northcott", version, about = "Radical towers with prescribed Northcott numbers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Target width of numerical enclosures.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Largest bracket precision in bits for exact comparisons.
    #[arg(long, global = true)]
    precision_ceiling: Option<u32>,
    /// Degree ordering convention: weak or strict.
    #[arg(long, global = true, default_value = "weak")]
    ordering: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format: json or csv.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Write the payload to FILE instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a radical tower and emit its certificate.
    Construct {
        /// a, b, c, weil or weighted.
        #[arg(long)]
        variant: String,
        /// Limit t (rational for a/b/c; rational or c*ln(n) for weil).
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        d_seed: String,
    },
    /// Re-verify a certificate file.
    Verify { file: PathBuf },
    /// House of a tower element.
    House {
        /// Tower as "p:d,p:d,...".
        #[arg(long)]
        tower: String,
        #[arg(long)]
        element: String,
    },
    /// Weil height, or weighted height when --gamma is given.
    Height {
        #[arg(long)]
        tower: String,
        #[arg(long)]
        element: String,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Discrepancy of a point tuple read from CSV.
    Discrepancy {
        #[arg(long)]
        points: PathBuf,
    },
    /// η of a point tuple, or of a step of a radical tower.
    Eta {
        #[arg(long, conflicts_with = "tower")]
        points: Option<PathBuf>,
        #[arg(long, requires = "step")]
        tower: Option<String>,
        #[arg(long)]
        step: Option<usize>,
    },
    /// Whether q is coprime to the index of Z[θ] for θ a root of the monic polynomial.
    Dedekind {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        q: String,
    },
    /// Least prime lo < p < hi with p ≡ a (mod m).
    FindPrime {
        #[arg(long)]
        lo: String,
        #[arg(long)]
        hi: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        m: String,
        /// Comma-separated primes to skip.
        #[arg(long, default_value = "")]
        exclude: String,
    },
    /// Per-step η and house for a tower or a certificate.
    BoundsReport {
        #[arg(long, conflicts_with = "cert")]
        tower: Option<String>,
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Claimed limit t of the houses.
        #[arg(long)]
        claimed: Option<String>,
        /// above or below.
        #[arg(long, default_value = "above")]
        side: String,
    },
    /// Brute-force minimum house over new elements of a tower step.
    EnumerateMinHouse {
        #[arg(long)]
        tower: String,
        /// 1-based step; defaults to the last.
        #[arg(long)]
        step: Option<usize>,
        #[arg(long, default_value_t = 1)]
        coeff_bound: u32,
        #[arg(long)]
        no_constants: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Allowed exponent vectors, e.g. "0,0;1,0;0,1".
        #[arg(long)]
        mask: Option<String>,
    },
    /// Run a seeded property suite.
    LemmaCheck {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        instances: Option<usize>,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::MalformedCertificate(_) => 1,
            Error::SearchExhausted { .. } | Error::NotFound { .. } | Error::EmptyStream => 3,
            Error::PrecisionFailure(_) | Error::NonConvergence { .. } | Error::Indeterminate(_) => 4,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// Payload plus the exit code it should be reported with.
struct Output {
    json: Value,
    csv: Option<String>,
    code: u8,
}

impl Output {
    fn ok(json: Value) -> Self {
        Output { json, csv: None, code: 0 }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn digits(tol: f64) -> u32 {
    (-tol.log10()).ceil().clamp(0.0, 17.0) as u32
}

/// Interval on the decimal grid of the tolerance, rounded outward.
fn interval(v: &RealInterval, tol: f64) -> Value {
    let (lo, hi) = v.outward_decimal(digits(tol));
    json!({ "lo": lo, "hi": hi })
}

fn tower(src: &str, mode: OrderingMode) -> Result<RadicalTower, Failure> {
    let t = RadicalTower::parse_inline(src, mode)?;
    if mode == OrderingMode::Strict {
        if let Some(v) = t.ordering_violations().first() {
            return Err(usage(format!("strict ordering: {v}")));
        }
    }
    Ok(t)
}

fn element_in(t: &RadicalTower, src: &str) -> Result<TowerElement, Failure> {
    Ok(parse_element(src, t)?)
}

fn parse_mask(src: &str) -> Result<Vec<Vec<u32>>, Failure> {
    src.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|_| usage(format!("bad mask entry {x:?}"))))
                .collect()
        })
        .collect()
}

fn construct(g: &Global, mode: OrderingMode, cmd: &Command) -> Result<Output, Failure> {
    let Command::Construct { variant, t, gamma, epsilon, steps, d_seed } = cmd else { unreachable!() };
    let variant = Variant::parse(variant)?;
    let d_seed = parse_integer(d_seed)?;
    let opts = ConstructOptions {
        ordering: mode,
        tol: g.tol,
        precision: g.precision_ceiling.map(Precision::with_ceiling).unwrap_or_default(),
    };
    let need = |v: &Option<String>, name: &str| v.clone().ok_or_else(|| usage(format!("--{name} is required")));
    let cert = match variant {
        Variant::Weil => construct_thm14(&HeightTarget::parse(&need(t, "t")?)?, *steps, &d_seed, &opts)?,
        Variant::Weighted => construct_thm16(
            &parse_rational(&need(gamma, "gamma")?)?,
            &parse_rational(&need(epsilon, "epsilon")?)?,
            *steps,
            &d_seed,
            &opts,
        )?,
        _ => construct_thm12(variant, &parse_rational(&need(t, "t")?)?, *steps, &d_seed, &opts)?,
    };
    let json: Value = serde_json::from_str(&cert.to_json()).expect("certificate serializes");
    Ok(Output { json, csv: Some(certificate_csv(&cert)), code: 0 })
}

fn certificate_csv(c: &Certificate) -> String {
    let mut s = String::from("step,p,d,interval_member,congruence,monogenic,prime_fresh,eisenstein,waived\n");
    for (i, (st, ch)) in c.tower.steps.iter().zip(&c.per_step).enumerate() {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            i + 1,
            st.p,
            st.d,
            ch.interval_member,
            ch.congruence,
            ch.monogenic,
            ch.prime_fresh,
            ch.eisenstein,
            ch.waived.join(";")
        ));
    }
    s
}

fn run(g: &Global, cmd: &Command) -> Result<Output, Failure> {
    if !(g.tol > 0.0 && g.tol < 1.0) {
        return Err(usage("--tol must lie in (0, 1)"));
    }
    if !matches!(g.format.as_str(), "json" | "csv") {
        return Err(usage(format!("unknown format {:?}", g.format)));
    }
    let mode = OrderingMode::parse(&g.ordering)?;
    let tol = g.tol;
    match cmd {
        Command::Construct { .. } => construct(g, mode, cmd),
        Command::Verify { file } => {
            let report = verify_json(&read(file)?)?;
            let code = if report.passed { 0 } else { 1 };
            for m in &report.mismatches {
                eprintln!("mismatch: {m}");
            }
            Ok(Output { json: serde_json::to_value(&report).expect("serializable"), csv: None, code })
        }
        Command::House { tower: ts, element } => {
            let t = tower(ts, mode)?;
            let v = house(&t, &element_in(&t, element)?, tol)?;
            Ok(Output::ok(json!({ "kind": "house", "value": interval(&v.value, tol) })))
        }
        Command::Height { tower: ts, element, gamma } => {
            let t = tower(ts, mode)?;
            let e = element_in(&t, element)?;
            let h = weil_height_integral(&t, &e, tol)?.value;
            match gamma {
                None => Ok(Output::ok(json!({ "kind": "weil", "value": interval(&h, tol) }))),
                Some(gm) => {
                    let deg = element_degree_over_q(&t, &e, tol)?;
                    let w = weighted_height(*gm, &deg.into(), &h)?;
                    Ok(Output::ok(json!({
                        "kind": "weighted",
                        "gamma": gm,
                        "degree": deg.to_string(),
                        "weil": interval(&h, tol),
                        "value": interval(&w, tol),
                    })))
                }
            }
        }
        Command::Discrepancy { points } => {
            let pts = PointTuple::parse_csv(&read(points)?)?;
            let r = discrepancy(&pts, tol)?;
            Ok(Output::ok(json!({ "value": interval(&r.value, tol) })))
        }
        Command::Eta { points, tower: ts, step } => {
            let v = match (points, ts, step) {
                (Some(p), _, _) => eta0(&PointTuple::parse_csv(&read(p)?)?, tol)?,
                (None, Some(ts), Some(i)) => eta_radical_step(&tower(ts, mode)?, *i, tol)?,
                _ => return Err(usage("give --points, or --tower with --step")),
            };
            Ok(Output::ok(json!({ "value": interval(&v, tol), "vacuous": v.hi <= 0.0 })))
        }
        Command::Dedekind { poly, q } => {
            let f = PolyZ::parse(poly)?;
            let ok = dedekind_index_coprime(&f, &parse_integer(q)?)?;
            Ok(Output::ok(json!({ "index_coprime": ok })))
        }
        Command::FindPrime { lo, hi, a, m, exclude } => {
            let ex: BTreeSet<_> = exclude
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(parse_integer)
                .collect::<Result<_, _>>()?;
            let p = find_prime_in_ap(&parse_rational(lo)?, &parse_rational(hi)?, &parse_integer(a)?, &parse_integer(m)?, &ex)?;
            Ok(Output::ok(json!({ "prime": p.to_string() })))
        }
        Command::BoundsReport { tower: ts, cert, claimed, side } => {
            let t = match (ts, cert) {
                (Some(ts), None) => tower(ts, mode)?,
                (None, Some(path)) => Certificate::from_json(&read(path)?)?.tower.to_tower()?,
                _ => return Err(usage("give exactly one of --tower or --cert")),
            };
            let side = match side.as_str() {
                "above" => LimitSide::Above,
                "below" => LimitSide::Below,
                s => return Err(usage(format!("unknown side {s:?}"))),
            };
            let claimed = claimed.as_deref().map(parse_rational).transpose()?;
            let r = northcott_report_thm13(&t, tol, claimed.as_ref().map(|c| (c, side)))?;
            Ok(Output { json: serde_json::to_value(&r).expect("serializable"), csv: Some(r.to_csv()), code: 0 })
        }
        Command::EnumerateMinHouse { tower: ts, step, coeff_bound, no_constants, cap, mask } => {
            let t = tower(ts, mode)?;
            let i = step.unwrap_or(t.len());
            let mut spec = EnumerationSpec::new(t.clone(), i, *coeff_bound).with_cap(*cap);
            if *no_constants {
                spec = spec.without_constants();
            }
            if let Some(m) = mask {
                spec = spec.with_mask(parse_mask(m)?);
            }
            let count = spec.count()?;
            let (min, witness) = empirical_min_house(&spec, tol)?;
            let prefix = t.prefix(i);
            let eta = delta_lower_bound_prop45(&prefix, i, tol)?;
            let gen = house(&prefix, &TowerElement::generator(i, i), tol)?.value;
            Ok(Output::ok(json!({
                "count": count.to_string(),
                "min_house": interval(&min, tol),
                "witness": witness.to_string(),
                "eta": interval(&eta, tol),
                "above_eta": min.hi >= eta.lo - 3.0 * tol,
                "generator_house": interval(&gen, tol),
                "at_generator": (min.mid() - gen.mid()).abs() <= 1e-6,
            })))
        }
        Command::LemmaCheck { suite, instances } => {
            let r = run_suite(suite, g.seed, *instances, tol)?;
            let code = if r.passed() { 0 } else { 1 };
            Ok(Output { json: serde_json::to_value(&r).expect("serializable"), csv: None, code })
        }
    }
}

fn csv_cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}_{k}") };
                flatten(&key, x, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

/// Header row plus a single row of the flattened payload.
fn generic_csv(v: &Value) -> String {
    let mut flat = Map::new();
    flatten("", v, &mut flat);
    let header: Vec<&str> = flat.keys().map(String::as_str).collect();
    let row: Vec<String> = flat.values().map(csv_cell).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let first = e.to_string();
            eprintln!("{}", first.lines().next().unwrap_or("usage error"));
            return ExitCode::from(2);
        }
        Err(e) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("--threads must be positive");
            return ExitCode::from(2);
        }
    }
    let out = match run(g, &cli.command) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let text = match g.format.as_str() {
        "json" => {
            let mut s = if matches!(cli.command, Command::Construct { .. }) {
                serde_json::to_string_pretty(&out.json)
            } else {
                serde_json::to_string(&out.json)
            }
            .expect("serializable");
            s.push('\n');
            s
        }
        _ => out.csv.clone().unwrap_or_else(|| generic_csv(&out.json)),
    };
    match &g.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(out.code)
}
