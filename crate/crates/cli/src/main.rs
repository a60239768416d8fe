//! Command-line front end for `superproj`.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use superproj::cech::{cech_cohomology, default_window, CechWindow, TransitionSheaf};
use superproj::characteristic::{characteristic_report, twist_report};
use superproj::expr::{parse_on, parse_superpoly};
use superproj::golden::{run_golden_in, fixtures_dir, RunOptions, SUITES};
use superproj::picard::{even_picard, pi_picard, pi_picard_cech, verify_picard_dim_cech};
use superproj::properties::{run_suite, Suite};
use superproj::sheaf::cohomology_dims;
use superproj::superlie::{check_families, check_srs_pair, flat_pair, integrability_conditions, odd_ansatz, printed_integrability_conditions, same_poly_span, verify_osp22};
use superproj::tangent::{default_degree_bound, euler_tangent_dims, global_tangent_fields_n};
use superproj::{Error, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "superproj", version, about = "Exact computations on projective superspaces P^{n|m}")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "SUPERPROJ_FORMAT", default_value = "text")]
    format: Format,
    /// Seed for randomized property sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parity-resolved cohomology of O(ℓ) on P^{n|m}.
    Cohomology {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        ell: i64,
        /// Recompute with the two-chart Čech engine and compare (n = 1 only).
        #[arg(long)]
        oracle: bool,
    },
    /// Čech cohomology of the invertible sheaf with a given transition function on P^{1|m}.
    Cech {
        #[arg(long)]
        m: usize,
        /// Transition function in the V chart, e.g. "1 + (p1*p2)*w^-1".
        #[arg(long, allow_hyphen_values = true)]
        transition: String,
        /// Truncation window D.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Even Picard and Π-Picard data.
    Picard {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Recompute the dimensions through the Čech engine (n = 1, 2 ≤ m ≤ 6).
        #[arg(long)]
        verify: bool,
    },
    /// Cohomology of the tangent sheaf.
    Tangent {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Solve for an explicit basis of global vector fields.
        #[arg(long)]
        basis: bool,
        /// Degree bound of the field ansatz.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Structure equations of osp(2|2) and the N = 2 structure on P^{1|2}.
    #[command(name = "osp22-verify")]
    Osp22Verify {
        /// Sample points for the frame condition, e.g. "0,1,-1/2,i".
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Option<Vec<String>>,
    },
    /// Berezinian, super first Chern class, de Rham dimensions.
    Characteristic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Runs the golden suites and the property suites.
    Selftest {
        /// Suite to run: acceptance, claims, properties or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Restrict the acceptance suite to these criteria.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u32>>,
        /// Cases per property suite.
        #[arg(long)]
        cases: Option<usize>,
    },
}

#[derive(Default)]
struct Report {
    data: Map<String, Value>,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
    ok: bool,
}

impl Report {
    fn new(headers: &[&str]) -> Self {
        Report { headers: headers.iter().map(|s| s.to_string()).collect(), ok: true, ..Default::default() }
    }

    fn set(&mut self, k: &str, v: Value) {
        self.data.insert(k.into(), v);
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }
}

enum Failure {
    Usage(String),
    Instability(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Instability { .. } => Failure::Instability(e.to_string()),
            Error::Consistency(_) => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Res = std::result::Result<Report, Failure>;

fn cohomology(n: usize, m: usize, ell: i64, oracle: bool) -> Res {
    if n == 0 {
        return Err(Failure::Usage("need n ≥ 1".into()));
    }
    if oracle && n != 1 {
        return Err(Failure::Usage("--oracle runs the two-chart engine, which covers n = 1 only".into()));
    }
    let mut r = Report::new(&["degree", "h_even", "h_odd", "total"]);
    let dims = cohomology_dims(n, m, ell);
    for (i, d) in &dims {
        r.row(vec![i.to_string(), d.even.to_string(), d.odd.to_string(), d.total().to_string()]);
    }
    r.set("n", json!(n));
    r.set("m", json!(m));
    r.set("ell", json!(ell));
    r.set("dims", json!(dims.iter().map(|(i, d)| (i.to_string(), json!({"even": d.even, "odd": d.odd, "total": d.total()}))).collect::<Map<_, _>>()));
    if oracle {
        let s = TransitionSheaf::twist(m, ell);
        let c = cech_cohomology(&s, default_window(&s))?;
        let pass = c.h0 == dims[&0] && c.h1 == dims[&1];
        r.set("oracle", json!({"h0": c.h0.to_string(), "h1": c.h1.to_string(), "window": c.window_used.d, "pass": pass}));
        r.notes.push(format!("oracle (Čech, D = {}): h0 {} h1 {} {}", c.window_used.d, c.h0, c.h1, if pass { "pass" } else { "FAIL" }));
        r.ok = pass;
    }
    Ok(r)
}

fn cech(m: usize, transition: &str, window: Option<usize>) -> Res {
    let w = parse_on(transition, 1, m)?;
    if w.ctx().even != ["w"] {
        return Err(Failure::Usage("write the transition function in the V chart variables w, p1, p2, ...".into()));
    }
    let s = TransitionSheaf::new(w)?;
    let win = window.map_or_else(|| default_window(&s), |d| CechWindow { d });
    let c = cech_cohomology(&s, win)?;
    let mut r = Report::new(&["group", "generator"]);
    for g in &c.generators_h0 {
        r.row(vec!["H0".into(), g.render()]);
    }
    for g in &c.generators_h1 {
        r.row(vec!["H1".into(), g.render()]);
    }
    r.set("m", json!(m));
    r.set("transition", json!(s.transition().render()));
    r.set("h0", json!(c.h0.to_string()));
    r.set("h1", json!(c.h1.to_string()));
    r.set("window", json!(c.window_used.d));
    r.set("stabilized", json!(c.stabilized));
    r.set("generators_h0", json!(c.generators_h0.iter().map(|g| g.render()).collect::<Vec<_>>()));
    r.set("generators_h1", json!(c.generators_h1.iter().map(|g| g.render()).collect::<Vec<_>>()));
    r.notes.push(format!("h0 {}  h1 {}  (window D = {})", c.h0, c.h1, c.window_used.d));
    Ok(r)
}

fn picard(n: usize, m: usize, verify: bool) -> Res {
    if n == 0 {
        return Err(Failure::Usage("need n ≥ 1".into()));
    }
    let p = even_picard(n, m);
    let pi = pi_picard(n, m);
    let mut r = Report::new(&["generator"]);
    for g in &p.generators {
        r.row(vec![g.clone()]);
    }
    r.set("even", serde_json::to_value(&p).unwrap());
    r.set("pi", serde_json::to_value(&pi).unwrap());
    r.notes.push(format!("Pic0: Z^{} x C^{}", p.discrete_rank, p.continuous_dim));
    r.notes.push(format!("Pi-Picard: split only {}, non-split parameters {}", pi.split_only, pi.nonsplit_parameter_dim));
    if verify {
        if n != 1 || !(2..=6).contains(&m) {
            return Err(Failure::Usage("--verify covers n = 1 and 2 ≤ m ≤ 6".into()));
        }
        let c = verify_picard_dim_cech(m)?;
        let odd = pi_picard_cech(m)?;
        let pass = c.agrees() && odd == pi.odd_h1_sum;
        r.set("verify", json!({"cech": c, "cech_odd_h1": odd, "pass": pass}));
        r.notes.push(format!(
            "Čech: even h1 {}, generator log rank {}, odd h1 {} {}",
            c.cech_even_h1,
            c.generator_log_rank,
            odd,
            if pass { "pass" } else { "FAIL" }
        ));
        r.ok = pass;
    }
    Ok(r)
}

fn tangent(n: usize, m: usize, basis: bool, bound: Option<usize>) -> Res {
    if n == 0 {
        return Err(Failure::Usage("need n ≥ 1".into()));
    }
    let t = euler_tangent_dims(n, m);
    let mut r = Report::new(&["parity", "field"]);
    r.set("report", serde_json::to_value(&t).unwrap());
    r.notes.push(format!("h0(T) {}  h1(T) {}  sl dim {}{}", t.h0, t.h1, t.sl_dim, if t.exceptional { "  (exceptional)" } else { "" }));
    if basis {
        let b = global_tangent_fields_n(n, m, bound.unwrap_or_else(|| default_degree_bound(m)))?;
        for f in &b.even_fields {
            r.row(vec!["even".into(), f.render()]);
        }
        for f in &b.odd_fields {
            r.row(vec!["odd".into(), f.render()]);
        }
        r.set("fields", json!(b.fields().map(|f| f.render()).collect::<Vec<_>>()));
        r.set("field_count", json!(b.fields().count()));
        r.notes.push(format!("{} global fields ({})", b.fields().count(), b.dims()));
        r.ok = b.dims() == t.h0;
    }
    Ok(r)
}

fn scalar_point(s: &str) -> std::result::Result<Scalar, Failure> {
    let p = parse_superpoly(s)?;
    if p.terms().keys().any(|k| !k.is_constant()) {
        return Err(Failure::Usage(format!("sample point {s} is not a constant")));
    }
    Ok(p.constant_term())
}

fn osp22(points: Option<Vec<String>>) -> Res {
    let o = verify_osp22()?;
    let f = check_families()?;
    let d = odd_ansatz();
    let raw = integrability_conditions(&d)?;
    let printed = printed_integrability_conditions(d.ctx());
    let pts = match points {
        Some(p) => p.iter().map(|s| scalar_point(s)).collect::<std::result::Result<Vec<_>, _>>()?,
        None => [-2, -1, 0, 1, 2].iter().map(|&k| Scalar::from_int(k)).collect(),
    };
    let (d1, d2) = flat_pair();
    let srs = check_srs_pair(&d1, &d2, &pts, &pts)?;
    let mut r = Report::new(&["check", "computed", "stated", "pass"]);
    for e in o.table.iter().chain(&o.equations) {
        r.row(vec![e.equation.clone(), e.computed.clone(), e.expected.clone(), e.pass.to_string()]);
    }
    for c in &f.coefficients {
        r.row(vec![format!("{{D1, D2}} along {}", c.field), c.computed.clone(), c.printed.clone(), c.pass.to_string()]);
    }
    let equivalent = same_poly_span(&raw, &printed);
    r.row(vec!["integrability conditions".into(), format!("{} quadratics", raw.len()), format!("{} quadratics", printed.len()), equivalent.to_string()]);
    for (eq, v) in &o.ambiguous {
        r.notes.push(format!("ambiguous line: {eq} = {v}"));
    }
    r.notes.push(format!("{{Q1, Q1}} with 1/2 normalization: {}", o.half_normalization_q1q1));
    for s in srs.failures() {
        r.notes.push(format!("frame degenerates on chart {} at {}", s.chart, s.point.render()));
    }
    r.set("osp22", serde_json::to_value(&o).unwrap());
    r.set("families", serde_json::to_value(&f).unwrap());
    r.set("integrability", json!({"computed": raw.iter().map(|p| p.render()).collect::<Vec<_>>(), "stated": printed.iter().map(|p| p.render()).collect::<Vec<_>>(), "equivalent": equivalent}));
    r.set("srs_flat_pair", serde_json::to_value(&srs).unwrap());
    r.ok = o.all_pass() && f.matches_printed() && f.d1_squared_zero && f.d2_squared_zero && equivalent;
    Ok(r)
}

fn characteristic(n: usize, m: usize) -> Res {
    let c = characteristic_report(n, m)?;
    let t = twist_report()?;
    let mut r = Report::new(&["i", "j", "dim"]);
    for (&(i, j), d) in &c.de_rham {
        r.row(vec![i.to_string(), j.to_string(), d.to_string()]);
    }
    r.notes.push(format!(
        "Ber = O({}) (Euler route O({}))  c1s = {}  Calabi-Yau {}",
        c.berezinian_twist, c.berezinian_twist_euler, c.super_c1, c.calabi_yau
    ));
    r.notes.push(format!("twists: + -> {:?}, - -> {:?}, isomorphic {}", t.plus, t.minus, t.isomorphic));
    r.ok = c.routes_agree() && t.isomorphic;
    r.set("report", serde_json::to_value(&c).unwrap());
    r.set("twists", serde_json::to_value(&t).unwrap());
    Ok(r)
}

fn selftest(suite: &str, criteria: Option<Vec<u32>>, cases: Option<usize>, seed: Option<u64>) -> Res {
    let suites: Vec<&str> = match suite {
        "all" => vec!["acceptance", "claims", "properties"],
        s if SUITES.contains(&s) || s == "properties" => vec![s],
        s => return Err(Failure::Usage(format!("unknown suite {s}"))),
    };
    let mut r = Report::new(&["suite", "id", "result", "detail"]);
    let opts = RunOptions { only: criteria, seed };
    let mut out = Map::new();
    for s in suites {
        if s == "properties" {
            let seed = seed.unwrap_or(2026);
            let mut reps = Vec::new();
            for p in Suite::ALL {
                let rep = run_suite(p, cases.unwrap_or(p.default_cases()), seed)?;
                r.ok &= rep.passed();
                let detail = rep.failures.first().map_or(format!("{} cases", rep.cases), |f| format!("case {}: {}", f.0, f.1));
                r.row(vec![s.into(), rep.suite.into(), if rep.passed() { "PASS" } else { "FAIL" }.into(), detail]);
                reps.push(rep);
            }
            out.insert(s.into(), serde_json::to_value(&reps).unwrap());
            continue;
        }
        let g = run_golden_in(&fixtures_dir(), s, &opts)?;
        for o in &g.outcomes {
            r.ok &= o.pass;
            r.row(vec![s.into(), o.id.clone(), if o.pass { "PASS" } else { "FAIL" }.into(), o.diff.join("; ")]);
        }
        out.insert(s.into(), serde_json::to_value(&g).unwrap());
    }
    r.set("suites", Value::Object(out));
    Ok(r)
}

fn emit(r: &Report, command: &str, format: Format) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    match format {
        Format::Json => {
            let mut obj = r.data.clone();
            obj.insert("schema".into(), json!(1));
            obj.insert("command".into(), json!(command));
            obj.insert("status".into(), json!(if r.ok { "ok" } else { "verification-failure" }));
            serde_json::to_writer_pretty(&mut w, &Value::Object(obj))?;
            writeln!(w)
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(&r.headers)?;
            for row in &r.rows {
                c.write_record(row)?;
            }
            c.flush()
        }
        Format::Text => {
            let widths: Vec<usize> = (0..r.headers.len())
                .map(|k| r.rows.iter().map(|row| row[k].chars().count()).chain([r.headers[k].chars().count()]).max().unwrap_or(0))
                .collect();
            if !r.rows.is_empty() {
                let line = |cells: &[String]| -> String {
                    cells.iter().zip(&widths).map(|(c, &wd)| format!("{c:<wd$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
                };
                writeln!(w, "{}", line(&r.headers))?;
                for row in &r.rows {
                    writeln!(w, "{}", line(row))?;
                }
            }
            for n in &r.notes {
                writeln!(w, "{n}")?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, result) = match cli.command {
        Command::Cohomology { n, m, ell, oracle } => ("cohomology", cohomology(n, m, ell, oracle)),
        Command::Cech { m, transition, window } => ("cech", cech(m, &transition, window)),
        Command::Picard { n, m, verify } => ("picard", picard(n, m, verify)),
        Command::Tangent { n, m, basis, bound } => ("tangent", tangent(n, m, basis, bound)),
        Command::Osp22Verify { points } => ("osp22-verify", osp22(points)),
        Command::Characteristic { n, m } => ("characteristic", characteristic(n, m)),
        Command::Selftest { suite, criteria, cases } => ("selftest", selftest(&suite, criteria, cases, cli.seed)),
    };
    match result {
        Ok(r) => {
            if let Err(e) = emit(&r, name, cli.format) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if r.ok { 0 } else { 1 })
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failure: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Instability(m)) => {
            eprintln!("unstable: {m}");
            ExitCode::from(3)
        }
    }
}
