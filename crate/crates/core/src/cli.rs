//! Batch command-line front end.
//!
//! Every subcommand produces a table of rows `{inputs, derived, verdicts}`
//! written as JSON (an array of objects) or CSV (one column per dotted key).
//! Floats are rounded to 12 significant digits so that output is
//! byte-for-byte reproducible. Exit codes: 0 when every required verdict
//! holds, 1 when one fails, 2 on usage or numeric errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::Rational64;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::elliptic::{Backend, EllipticError, Lattice, DEFAULT_PRECISION};
use crate::invariants::{
    self, CaseLabel, CoverInvariants, Family, FamilySpec, InvariantsError, Projection, Report,
    TypeVector, Verdict,
};
use crate::kdv::{self, Grid, TimeDerivative, TravelingWave};
use crate::picard::{self, DivisorClass, PicardError, TauInvariantClass};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Invariants(#[from] InvariantsError),
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("output: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "osculate",
    version,
    about = "Invariants of hyperelliptic covers of elliptic curves and elliptic KdV waves"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Target accuracy of elliptic function evaluation (values below 1e-12
    /// are raised to 1e-12).
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    pub precision: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Rows,
    QSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Kdv,
    Nls,
    Sg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlacementArg {
    Same,
    DistinctGeneric,
    DistinctHalfPeriods,
}

impl From<PlacementArg> for Projection {
    fn from(p: PlacementArg) -> Self {
        match p {
            PlacementArg::Same => Projection::Same,
            PlacementArg::DistinctGeneric => Projection::DistinctGeneric,
            PlacementArg::DistinctHalfPeriods => Projection::DistinctHalfPeriods,
        }
    }
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// First half-period, e.g. `0.5` or `0.5+0.1i`.
    #[arg(long, allow_hyphen_values = true)]
    pub omega1: Complex64,
    /// Second half-period, e.g. `0.5i`.
    #[arg(long, allow_hyphen_values = true)]
    pub omega2: Complex64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quasi-periods and the defect of Legendre's relation.
    Legendre {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, value_enum, default_value_t = BackendArg::Rows)]
        backend: BackendArg,
        /// Largest accepted defect.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// All unramified birational KdV types of degree n and order d.
    EnumerateTypes {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        d: i64,
    },
    /// Check claimed invariants of a cover against every constraint.
    CheckCover {
        #[arg(long, value_enum, default_value_t = CaseArg::Kdv)]
        case: CaseArg,
        /// Projection of the two marked points (NLS/Toda and sine-Gordon).
        #[arg(long, value_enum, default_value_t = PlacementArg::DistinctGeneric)]
        placement: PlacementArg,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 1)]
        d: i64,
        #[arg(long)]
        g: i64,
        #[arg(long, default_value_t = 1)]
        rho: i64,
        #[arg(long, default_value_t = 1)]
        m: i64,
        /// Type vector `a,b,c,d`.
        #[arg(long)]
        gamma: TypeVector,
    },
    /// Types built as `(2d−1)μ + 2ε` from the offset patterns.
    #[command(name = "construct-68")]
    Construct {
        #[arg(long)]
        d: i64,
        /// Distinguished index in 0..=3.
        #[arg(long)]
        k: usize,
        /// `μ` as `a,b,c,d`.
        #[arg(long)]
        mu: TypeVector,
    },
    /// Genus and degree of a constructive NLS/Toda or sine-Gordon family.
    Family {
        /// Family: nls-odd, nls-even, sg-even-distinct, sg-odd-distinct,
        /// sg-even-same, sg-odd-same, or the labels 6.13 to 6.18.
        #[arg(long = "theorem", alias = "family")]
        family: Family,
        #[arg(long)]
        alpha: TypeVector,
        /// The marked point lies over a half-period (NLS/Toda families).
        #[arg(long)]
        at_half_period: bool,
        /// Index of the entry with the other parity (even sine-Gordon, same projection).
        #[arg(long)]
        j0: Option<usize>,
    },
    /// Intersection numbers and genera of a divisor class.
    PicardGenus {
        /// Ten integers: section, fiber, s0..s3, r0..r3.
        #[arg(long, num_args = 1..=10, value_delimiter = ',', allow_negative_numbers = true)]
        class: Vec<i64>,
    },
    /// Residual, periodicity and monodromy checks for an elliptic KdV wave.
    VerifyKdv {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Level λ of `u = −2℘(x + 3λt/2 + x₀) + λ`.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        lambda: Complex64,
        /// Shift x₀.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        shift: Complex64,
        /// Sample counts `NXxNT`.
        #[arg(long, default_value = "200x20")]
        grid: String,
        /// Accuracy order of the difference stencils.
        #[arg(long, default_value_t = kdv::DEFAULT_ORDER)]
        order: usize,
        /// Stencil spacing; defaults to 1% of the shortest period.
        #[arg(long)]
        h: Option<f64>,
        /// Largest accepted residual.
        #[arg(long, default_value_t = 1e-6)]
        residual_tolerance: f64,
        /// Largest accepted monodromy defect.
        #[arg(long, default_value_t = 1e-8)]
        monodromy_tolerance: f64,
    },
}

/// Rounds to 12 significant digits; non-finite values become `null`.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    json!(rounded)
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": float(z.re), "im": float(z.im) })
}

fn rational(r: Rational64) -> Value {
    Value::String(r.to_string())
}

fn vector(v: &[i64]) -> Value {
    json!(v)
}

fn verdict(v: &Verdict) -> Value {
    json!({
        "clause": v.clause,
        "ok": v.ok,
        "lhs": v.lhs,
        "relation": v.relation.symbol(),
        "rhs": v.rhs,
        "informational": v.informational,
    })
}

fn float_verdict(clause: &str, lhs: f64, rhs: f64) -> Value {
    json!({
        "clause": clause,
        "ok": lhs <= rhs,
        "lhs": float(lhs),
        "relation": "<=",
        "rhs": float(rhs),
        "informational": false,
    })
}

/// One output row.
#[derive(Debug, Default)]
pub struct Row {
    pub inputs: Map<String, Value>,
    pub derived: Map<String, Value>,
    pub verdicts: Vec<Value>,
}

impl Row {
    fn input(mut self, k: &str, v: Value) -> Self {
        self.inputs.insert(k.to_string(), v);
        self
    }

    fn derive(mut self, k: &str, v: Value) -> Self {
        self.derived.insert(k.to_string(), v);
        self
    }

    fn report(mut self, r: &Report) -> Self {
        self.verdicts.extend(r.verdicts.iter().map(verdict));
        self
    }

    /// Whether a required verdict failed.
    pub fn failed(&self) -> bool {
        self.verdicts
            .iter()
            .any(|v| v["ok"] == Value::Bool(false) && v["informational"] != Value::Bool(true))
    }

    pub fn to_value(&self) -> Value {
        json!({
            "inputs": Value::Object(self.inputs.clone()),
            "derived": Value::Object(self.derived.clone()),
            "verdicts": Value::Array(self.verdicts.clone()),
        })
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Renders rows as a JSON array.
pub fn render_json(rows: &[Row]) -> String {
    let arr = Value::Array(rows.iter().map(Row::to_value).collect());
    let mut s = serde_json::to_string_pretty(&arr).expect("rows serialize");
    s.push('\n');
    s
}

/// Renders rows as CSV with the union of dotted keys as header, in order of
/// first appearance.
pub fn render_csv(rows: &[Row]) -> Result<String, CliError> {
    let flat: Vec<Vec<(String, String)>> = rows
        .iter()
        .map(|r| {
            let mut cells = Vec::new();
            flatten("", &r.to_value(), &mut cells);
            cells
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for cells in &flat {
        for (k, _) in cells {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for cells in &flat {
        let record: Vec<&str> = header
            .iter()
            .map(|h| {
                cells
                    .iter()
                    .find(|(k, _)| k == h)
                    .map(|(_, v)| v.as_str())
                    .unwrap_or("")
            })
            .collect();
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn build_lattice(args: &LatticeArgs, precision: f64) -> Result<Lattice, CliError> {
    Ok(Lattice::new(args.omega1, args.omega2)?.with_precision(precision)?)
}

fn lattice_inputs(row: Row, args: &LatticeArgs, precision: f64) -> Row {
    row.input("omega1", complex(args.omega1))
        .input("omega2", complex(args.omega2))
        .input("precision", float(precision))
}

fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Argument(format!("grid must look like 200x20, got {s:?}"));
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    let nx: usize = a.trim().parse().map_err(|_| bad())?;
    let nt: usize = b.trim().parse().map_err(|_| bad())?;
    if nx == 0 || nt == 0 {
        return Err(bad());
    }
    Ok((nx, nt))
}

/// Deterministic sample points inside the fundamental cell.
fn monodromy_samples(lattice: &Lattice, count: usize) -> Vec<Complex64> {
    let (p1, p2) = (2.0 * lattice.omega1(), 2.0 * lattice.omega2());
    let golden = 0.618_033_988_749_894_9;
    (0..count)
        .map(|i| {
            let a = 0.1 + 0.8 * ((i as f64 + 0.5) / count as f64);
            let b = 0.1 + 0.8 * ((i as f64 * golden).fract());
            a * p1 + b * p2
        })
        .collect()
}

fn legendre(
    lattice: &LatticeArgs,
    backend: BackendArg,
    tolerance: f64,
    precision: f64,
) -> Result<Vec<Row>, CliError> {
    let backend = match backend {
        BackendArg::Rows => Backend::LatticeRows,
        BackendArg::QSeries => Backend::QSeries,
    };
    let l = build_lattice(lattice, precision)?.with_backend(backend)?;
    let q = l.quasi_periods()?;
    let defect = q.legendre_defect(&l);
    let mut row = lattice_inputs(Row::default(), lattice, precision)
        .input(
            "backend",
            json!(if backend == Backend::QSeries {
                "q-series"
            } else {
                "rows"
            }),
        )
        .derive("eta1", complex(q.eta1))
        .derive("eta2", complex(q.eta2))
        .derive("defect", float(defect));
    row.verdicts
        .push(float_verdict("legendre-relation", defect, tolerance));
    Ok(vec![row])
}

fn enumerate(n: i64, d: i64) -> Result<Vec<Row>, CliError> {
    let types = invariants::enumerate_types(n, d)?;
    Ok(types
        .iter()
        .map(|t| {
            Row::default()
                .input("n", json!(n))
                .input("d", json!(d))
                .derive("gamma", vector(&t.gamma.components()))
                .derive("gamma_sum", json!(t.gamma.sum()))
                .derive("gamma_square_sum", json!(t.gamma.sum_of_squares()))
                .derive("g", json!(t.g))
                .derive("admissible", json!(t.report.admissible()))
                .report(&t.report)
        })
        .collect())
}

fn construct(d: i64, k: usize, mu: TypeVector) -> Result<Vec<Row>, CliError> {
    let out = invariants::construct_types(d, k, mu.components())?;
    Ok(out
        .iter()
        .map(|t| {
            Row::default()
                .input("d", json!(d))
                .input("k", json!(k))
                .input("mu", vector(&mu.components()))
                .derive("two_epsilon", vector(&t.two_epsilon))
                .derive("gamma", vector(&t.cover.gamma.components()))
                .derive("n", json!(t.cover.n))
                .derive("g", json!(t.cover.g))
                .report(&t.cover.report)
        })
        .collect())
}

fn picard_genus(coeffs: &[i64]) -> Result<Vec<Row>, CliError> {
    if coeffs.len() != 10 {
        return Err(PicardError::InvalidInvariants(format!(
            "a class needs 10 integers, got {}",
            coeffs.len()
        ))
        .into());
    }
    let mut c = [0; 10];
    c.copy_from_slice(coeffs);
    let d = DivisorClass::from_coefficients(c);
    let pairing = d.intersect(&picard::pulled_back_quotient_canonical());
    let mut row = Row::default()
        .input("class", vector(&c))
        .derive("self_intersection", json!(d.self_intersection()))
        .derive("dot_canonical", json!(d.dot_canonical()))
        .derive("adjunction_genus", rational(d.adjunction_genus()));
    row = match TauInvariantClass::new(d) {
        Ok(t) => row
            .derive("tilde_genus", rational(t.tilde_genus()))
            .derive("lambda_square", json!(t.lambda_square()))
            .derive("lambda_dot_canonical", json!(t.lambda_dot_canonical())),
        Err(_) => row
            .derive("tilde_genus", Value::Null)
            .derive("lambda_square", Value::Null)
            .derive("lambda_dot_canonical", Value::Null),
    };
    let odd = d.self_intersection().rem_euclid(2) + pairing.rem_euclid(2);
    let v =
        Verdict::new("picard.pullback-parity", odd, invariants::Relation::Eq, 0).informational();
    row.verdicts.push(verdict(&v));
    Ok(vec![row])
}

#[allow(clippy::too_many_arguments)]
fn verify_kdv(
    lattice: &LatticeArgs,
    lambda: Complex64,
    shift: Complex64,
    grid: &str,
    order: usize,
    h: Option<f64>,
    residual_tol: f64,
    monodromy_tol: f64,
    precision: f64,
) -> Result<Vec<Row>, CliError> {
    let l = build_lattice(lattice, precision)?;
    let (nx, nt) = parse_grid(grid)?;
    if order < 2 {
        return Err(CliError::Argument(format!(
            "stencil order must be at least 2, got {order}"
        )));
    }
    let w = TravelingWave::new(l.clone(), lambda).with_shift(shift);
    let mut g = Grid::for_wave(&w, nx, nt).with_order(order);
    if let Some(h) = h {
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::Argument(format!(
                "stencil spacing must be positive, got {h}"
            )));
        }
        g = g.with_spacing(h);
    }
    let fd = kdv::kdv_residual(&w, &g, TimeDerivative::FiniteDifference)?;
    let chain = kdv::kdv_residual(&w, &g, TimeDerivative::ChainRule)?;
    let periodicity = kdv::periodicity_check(&w)?;
    let mut scale: f64 = 1.0;
    for (x, t) in g.points() {
        scale = scale.max(w.u(x, t)?.norm());
    }
    let mut monodromy: f64 = 0.0;
    for z in monodromy_samples(&l, 20) {
        for j in 1..=2 {
            for k in 1..=2 {
                monodromy = monodromy.max(kdv::monodromy_defect(&l, j, k, z)?);
            }
        }
    }
    let mut row = lattice_inputs(Row::default(), lattice, l.precision())
        .input("lambda", complex(lambda))
        .input("shift", complex(shift))
        .input("nx", json!(nx))
        .input("nt", json!(nt))
        .input("order", json!(order))
        .input("h", float(g.h))
        .derive("speed", complex(w.speed))
        .derive("residual", float(fd))
        .derive("residual_chain_rule", float(chain))
        .derive("periodicity_defect", float(periodicity))
        .derive("monodromy_defect", float(monodromy));
    row.verdicts
        .push(float_verdict("kdv.residual", fd, residual_tol));
    row.verdicts.push(float_verdict(
        "kdv.residual-chain-rule",
        chain,
        residual_tol,
    ));
    row.verdicts.push(float_verdict(
        "kdv.periodicity",
        periodicity,
        10.0 * l.precision() * scale,
    ));
    row.verdicts
        .push(float_verdict("kdv.monodromy", monodromy, monodromy_tol));
    Ok(vec![row])
}

fn execute(cli: &Cli) -> Result<Vec<Row>, CliError> {
    let precision = cli.precision;
    match &cli.command {
        Command::Legendre {
            lattice,
            backend,
            tolerance,
        } => legendre(lattice, *backend, *tolerance, precision),
        Command::EnumerateTypes { n, d } => enumerate(*n, *d),
        Command::CheckCover {
            case,
            placement,
            n,
            d,
            g,
            rho,
            m,
            gamma,
        } => {
            let label = match case {
                CaseArg::Kdv => CaseLabel::KdV { d: *d },
                CaseArg::Nls => CaseLabel::NlsToda((*placement).into()),
                CaseArg::Sg => CaseLabel::SineGordon((*placement).into()),
            };
            let inv = CoverInvariants {
                n: *n,
                d: *d,
                g: *g,
                rho: *rho,
                m: *m,
                gamma: *gamma,
            };
            let report = invariants::check_cover(label, &inv);
            let mut row = Row::default().input("case", json!(format!("{case:?}").to_lowercase()));
            row = match case {
                CaseArg::Kdv => row
                    .input("n", json!(n))
                    .input("d", json!(d))
                    .input("g", json!(g))
                    .input("rho", json!(rho))
                    .input("m", json!(m)),
                _ => row
                    .input("placement", json!(Projection::from(*placement).to_string()))
                    .input("n", json!(n))
                    .input("g", json!(g)),
            };
            row = row
                .input("gamma", vector(&gamma.components()))
                .derive("gamma_sum", json!(gamma.sum()))
                .derive("gamma_square_sum", json!(gamma.sum_of_squares()))
                .derive("admissible", json!(report.admissible()))
                .report(&report);
            Ok(vec![row])
        }
        Command::Construct { d, k, mu } => construct(*d, *k, *mu),
        Command::Family {
            family,
            alpha,
            at_half_period,
            j0,
        } => {
            let spec = FamilySpec {
                family: *family,
                alpha: alpha.components(),
                at_half_period: *at_half_period,
                j0: *j0,
            };
            let out = invariants::family_params(&spec)?;
            let row = Row::default()
                .input("family", json!(family.name()))
                .input("alpha", vector(&alpha.components()))
                .input("at_half_period", json!(at_half_period))
                .input("j0", json!(j0))
                .derive("g", json!(out.g))
                .derive("n", json!(out.n))
                .derive("projection", json!(out.projection.to_string()))
                .report(&out.report);
            Ok(vec![row])
        }
        Command::PicardGenus { class } => picard_genus(class),
        Command::VerifyKdv {
            lattice,
            lambda,
            shift,
            grid,
            order,
            h,
            residual_tolerance,
            monodromy_tolerance,
        } => verify_kdv(
            lattice,
            *lambda,
            *shift,
            grid,
            *order,
            *h,
            *residual_tolerance,
            *monodromy_tolerance,
            precision,
        ),
    }
}

/// Parses `args` (including the program name), runs the command, and
/// returns the exit code. Data goes to `out` (or `--output`), diagnostics
/// to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run_cli(&cli, out) {
        Ok(failed) => i32::from(failed),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn run_cli(cli: &Cli, out: &mut dyn Write) -> Result<bool, CliError> {
    let rows = execute(cli)?;
    let text = match cli.format {
        Format::Json => render_json(&rows),
        Format::Csv => render_csv(&rows)?,
    };
    match &cli.output {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(rows.iter().any(Row::failed))
}
