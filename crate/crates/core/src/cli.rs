//! Command-line front end of the `afm` binary.
//!
//! Exit status: 0 success, 2 invalid input, 3 solver failure, 4 a check
//! (duality residual or table comparison) failed.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::afm::{solve_afm, universal_nr, universal_ur, Flavor, SystemSpec};
use crate::duality::{verify_relation, FreeParams, Regime, RelationId, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::exact::predict::{effective_mass, predict_spectrum, MassKind, PredictMode};
use crate::exact::salpeter::{solve_salpeter_2b, DEFAULT_BASIS_SIZE};
use crate::exact::three_body::{solve_3b, Symmetry, ThreeBodyBasisConfig};
use crate::exact::{solve_radial_2b, universal_f_fn, MeshConfig};
use crate::potentials::Potential;
use crate::quantum_numbers::{q_custom, PrescriptionChoice, Preset, StateLabels};
use crate::sweep::{run_sweep, SweepConfig};
use crate::tables::{check_table1, check_table2, table1, table2, TableCheck, TABLE1_MASS, TABLE2_MASS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "afm", version, about = "Auxiliary-field-method spectra, duality relations and reference solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kinematics {
    Nr,
    Ur,
    Sr,
    Sigma,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// AFM eigenvalue of one system.
    Solve(SolveArgs),
    /// Duality relations between AFM eigenvalues.
    Duality {
        #[command(subcommand)]
        action: DualityAction,
    },
    #[command(name = "duality-verify", hide = true)]
    DualityVerify(VerifyArgs),
    #[command(name = "duality-sweep", hide = true)]
    DualitySweep(SweepArgs),
    /// Two-body level of p²/m + V(r) on a Lagrange mesh.
    #[command(name = "exact-2b")]
    Exact2b(Exact2bArgs),
    /// Three-body levels of identical particles in an oscillator basis.
    #[command(name = "exact-3b")]
    Exact3b(Exact3bArgs),
    /// Two-body level of σ√(p² + m²) + V(r).
    #[command(name = "salpeter-2b")]
    Salpeter2b(SalpeterArgs),
    /// Level predicted from ground-state energies at an effective mass.
    Predict(PredictArgs),
    /// Reproduce a reference table for the linear potential.
    Table(TableArgs),
    /// Universal function f(m): two-body ground-state energy of p²/m + V(r).
    #[command(name = "universal-f")]
    UniversalSmallF(MassGridArgs),
    /// Universal massless function F(x) = x/C(x) + V(C(x)).
    #[command(name = "universal-F")]
    UniversalF(GridArgs),
    /// Universal nonrelativistic function G(x) = x/(2D(x)²) + V(D(x)).
    #[command(name = "universal-G")]
    UniversalG(GridArgs),
}

#[derive(Subcommand, Debug)]
enum DualityAction {
    /// Check one relation on one system.
    Verify(VerifyArgs),
    /// Check the catalog on random systems.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    kinematics: Kinematics,
    /// Number of particles.
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    /// Kinetic coefficient of the sigma system.
    #[arg(long)]
    sigma: Option<f64>,
    /// Particle mass (ignored for ur).
    #[arg(long)]
    m: Option<f64>,
    /// Principal quantum number; alternatively give --labels.
    #[arg(long = "Q")]
    q: Option<f64>,
    /// Quantum numbers `n1,l1,n2,l2,...` used with --q-prescription.
    #[arg(long)]
    labels: Option<String>,
    #[arg(long = "q-prescription", default_value = "ho")]
    q_prescription: String,
    #[arg(long = "one-body")]
    one_body: Option<String>,
    #[arg(long = "two-body")]
    two_body: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    relation: String,
    #[arg(long = "N", default_value_t = 3)]
    n: usize,
    /// Particle mass (massless relations ignore it).
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long = "Q")]
    q: f64,
    #[arg(long = "one-body")]
    one_body: Option<String>,
    #[arg(long = "two-body")]
    two_body: Option<String>,
    /// Particle number of the dual system.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instances per relation and potential kind.
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Restrict to these relations (repeatable).
    #[arg(long)]
    relation: Vec<String>,
    /// Emit every record, not only the summary and failures.
    #[arg(long)]
    records: bool,
}

#[derive(Args, Debug)]
struct Exact2bArgs {
    #[arg(long)]
    m: f64,
    #[arg(long = "two-body")]
    two_body: String,
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long, default_value_t = 0)]
    l: u32,
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Mesh scale h (default: derived from the AFM radius).
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct Exact3bArgs {
    #[arg(long)]
    m: f64,
    #[arg(long = "two-body")]
    two_body: String,
    #[arg(long = "L", default_value_t = 0)]
    l_total: u32,
    #[arg(long, default_value_t = 1)]
    parity: i32,
    /// symmetric, antisymmetric or mixed.
    #[arg(long, default_value = "symmetric")]
    symmetry: String,
    #[arg(long, default_value_t = 20)]
    bmax: u32,
    /// Oscillator length (default: scanned).
    #[arg(long)]
    b: Option<f64>,
    /// Number of lowest levels to report.
    #[arg(long, default_value_t = 10)]
    levels: usize,
}

#[derive(Args, Debug)]
struct SalpeterArgs {
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    m: f64,
    #[arg(long = "two-body")]
    two_body: String,
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long, default_value_t = 0)]
    l: u32,
    #[arg(long, default_value_t = DEFAULT_BASIS_SIZE)]
    basis: usize,
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// two_body_f, n_body_gs, n_body_via_f or gs_link.
    #[arg(long)]
    mode: String,
    #[arg(long)]
    m: f64,
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    /// Quantum numbers `n1,l1,...` (default: ground state).
    #[arg(long)]
    labels: Option<String>,
    #[arg(long = "q-prescription", default_value = "ho")]
    q_prescription: String,
    #[arg(long = "two-body")]
    two_body: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableName {
    Table1,
    Table2,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(value_enum)]
    which: TableName,
    /// Only report the prediction of this prescription (table1: ho or improved2b).
    #[arg(long)]
    prescription: Option<String>,
    /// Maximum band of the three-body basis (table2).
    #[arg(long, default_value_t = 20)]
    bmax: u32,
}

#[derive(Args, Debug)]
struct MassGridArgs {
    #[arg(long = "two-body")]
    two_body: String,
    /// Explicit masses (repeatable); otherwise a log grid.
    #[arg(long)]
    m: Vec<f64>,
    #[arg(long = "m-min", default_value_t = 0.25)]
    m_min: f64,
    #[arg(long = "m-max", default_value_t = 16.0)]
    m_max: f64,
    #[arg(long, default_value_t = 9)]
    points: usize,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long)]
    potential: String,
    /// Explicit arguments (repeatable); otherwise a log grid.
    #[arg(long)]
    x: Vec<f64>,
    #[arg(long = "x-min", default_value_t = 0.1)]
    x_min: f64,
    #[arg(long = "x-max", default_value_t = 10.0)]
    x_max: f64,
    #[arg(long, default_value_t = 9)]
    points: usize,
}

/// Result of one command: a JSON document, a CSV table, and a status.
struct Report {
    json: Value,
    header: Vec<String>,
    rows: Vec<Vec<Value>>,
    status: i32,
    notes: Vec<String>,
}

impl Report {
    fn single(fields: Vec<(&str, Value)>) -> Self {
        let header = fields.iter().map(|(k, _)| k.to_string()).collect();
        let row: Vec<Value> = fields.iter().map(|(_, v)| v.clone()).collect();
        let json = Value::Object(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>());
        Report { json, header, rows: vec![row], status: EXIT_OK, notes: Vec::new() }
    }
}

/// Six significant digits, as used for CSV cells.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.to_string(),
            (None, Some(f)) => format_sig6(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

fn opt_str(s: &Option<String>) -> Value {
    s.as_ref().map_or(Value::Null, |s| Value::String(s.clone()))
}

fn parse_pot(s: &str) -> Result<Potential> {
    s.parse()
}

fn parse_opt_pot(s: &Option<String>) -> Result<Option<Potential>> {
    s.as_deref().map(parse_pot).transpose()
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) || points == 0 {
        return Err(Error::invalid(format!("grid needs 0 < min <= max and points >= 1, got [{lo}, {hi}] with {points}")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    Ok((0..points).map(|i| lo * (ratio * i as f64).exp()).collect())
}

fn solve(a: &SolveArgs) -> Result<Report> {
    let (u, v) = (parse_opt_pot(&a.one_body)?, parse_opt_pot(&a.two_body)?);
    let need_m = || a.m.ok_or_else(|| Error::MissingParameter("--m".into()));
    let spec = match a.kinematics {
        Kinematics::Nr => SystemSpec::nonrelativistic(a.n, need_m()?, u, v)?,
        Kinematics::Ur => SystemSpec::ultrarelativistic(a.n, u, v)?,
        Kinematics::Sr => SystemSpec::semirelativistic(a.n, need_m()?, u, v)?,
        Kinematics::Sigma => {
            if u.is_some() {
                return Err(Error::invalid("the sigma system takes only --two-body"));
            }
            let sigma = a.sigma.ok_or_else(|| Error::MissingParameter("--sigma".into()))?;
            let v = v.ok_or_else(|| Error::MissingParameter("--two-body".into()))?;
            SystemSpec::sigma(sigma, a.m.unwrap_or(0.0), v)?
        }
    };
    let q = match (a.q, &a.labels) {
        (Some(q), None) => q,
        (None, Some(labels)) => {
            let labels: StateLabels = labels.parse()?;
            let presc: PrescriptionChoice = a.q_prescription.parse()?;
            q_custom(&presc.resolve(labels.len())?, &labels)?
        }
        (Some(_), Some(_)) => return Err(Error::invalid("give either --Q or --labels, not both")),
        (None, None) => return Err(Error::MissingParameter("--Q or --labels".into())),
    };
    let sol = solve_afm(&spec, q)?;
    let value_key = if spec.flavor == Flavor::Nonrelativistic { "energy" } else { "mass" };
    let kin = flavor_kinematics(spec.flavor);
    Ok(Report::single(vec![
        ("kinematics", json!(kin)),
        ("N", json!(spec.n)),
        ("m", json!(spec.m)),
        ("sigma", to_value(&spec.sigma)),
        ("Q", json!(q)),
        ("one_body", opt_str(&spec.one_body.as_ref().map(|p| p.to_string()))),
        ("two_body", opt_str(&spec.two_body.as_ref().map(|p| p.to_string()))),
        (value_key, json!(sol.value)),
        ("X0", json!(sol.x0)),
        ("r0_one_body", to_value(&sol.r0_one_body)),
        ("r0_two_body", to_value(&sol.r0_two_body)),
        ("iterations", json!(sol.iterations)),
        ("residual", json!(sol.residual)),
    ]))
}

fn flavor_kinematics(f: Flavor) -> &'static str {
    match f {
        Flavor::Nonrelativistic => "nr",
        Flavor::Ultrarelativistic => "ur",
        Flavor::GeneralSr => "sr",
        Flavor::SigmaSr => "sigma",
    }
}

fn verify(a: &VerifyArgs) -> Result<Report> {
    let rel: RelationId = a.relation.parse()?;
    let (u, v) = (parse_opt_pot(&a.one_body)?, parse_opt_pot(&a.two_body)?);
    let spec = match rel.regime() {
        Regime::General => SystemSpec::semirelativistic(a.n, a.m, u, v)?,
        Regime::Ultrarelativistic => SystemSpec::ultrarelativistic(a.n, u, v)?,
        Regime::Nonrelativistic | Regime::Bridge => SystemSpec::nonrelativistic(a.n, a.m, u, v)?,
    };
    let free = FreeParams { p: a.p, sigma: a.sigma, beta: a.beta, c: a.c };
    let rep = verify_relation(rel, &spec, a.q, &free, a.tol)?;
    let mut r = Report::single(vec![
        ("relation", json!(rel.name())),
        ("kinematics", json!(flavor_kinematics(spec.flavor))),
        ("N", json!(spec.n)),
        ("m", json!(spec.m)),
        ("Q", json!(a.q)),
        ("one_body", opt_str(&spec.one_body.as_ref().map(|p| p.to_string()))),
        ("two_body", opt_str(&spec.two_body.as_ref().map(|p| p.to_string()))),
        ("free", to_value(&free)),
        ("tol", json!(a.tol)),
        ("lhs_value", json!(rep.lhs_value)),
        ("rhs_value", json!(rep.rhs_value)),
        ("abs_residual", json!(rep.abs_residual)),
        ("rel_residual", json!(rep.rel_residual)),
        ("passed", json!(rep.passed)),
        ("mapped_params", to_value(&rep.mapped_params)),
    ]);
    if !rep.passed {
        r.status = EXIT_CHECK;
        r.notes.push(format!("{rel}: relative residual {:e} exceeds {:e}", rep.rel_residual, a.tol));
    }
    Ok(r)
}

fn sweep(a: &SweepArgs, jobs: Option<usize>) -> Result<Report> {
    let mut cfg = SweepConfig::new(a.seed, a.count, a.tol);
    cfg.jobs = jobs;
    if !a.relation.is_empty() {
        cfg.relations = a.relation.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    }
    let (records, summary) = run_sweep(&cfg)?;
    let header: Vec<String> = [
        "relation", "kinematics", "N", "m", "Q", "one_body", "two_body", "passed", "lhs_value", "rhs_value", "rel_residual", "error",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows = records
        .iter()
        .map(|r| {
            let spec = &r.instance.spec;
            vec![
                json!(r.instance.relation.name()),
                json!(flavor_kinematics(spec.flavor)),
                json!(spec.n),
                json!(spec.m),
                json!(r.instance.q),
                opt_str(&spec.one_body.as_ref().map(|p| p.to_string())),
                opt_str(&spec.two_body.as_ref().map(|p| p.to_string())),
                json!(r.passed),
                to_value(&r.report.as_ref().map(|x| x.lhs_value)),
                to_value(&r.report.as_ref().map(|x| x.rhs_value)),
                to_value(&r.report.as_ref().map(|x| x.rel_residual)),
                opt_str(&r.error),
            ]
        })
        .collect();
    let failures: Vec<Value> = records.iter().filter(|r| !r.passed).map(to_value).collect();
    let mut json = json!({
        "seed": a.seed,
        "count": a.count,
        "tol": a.tol,
        "summary": to_value(&summary),
        "failures": failures,
    });
    if a.records {
        json["records"] = to_value(&records);
    }
    let mut notes = Vec::new();
    if summary.failed > 0 {
        notes.push(format!("{} of {} duality checks failed", summary.failed, summary.total));
    }
    Ok(Report { json, header, rows, status: if summary.failed > 0 { EXIT_CHECK } else { EXIT_OK }, notes })
}

fn exact_2b(a: &Exact2bArgs) -> Result<Report> {
    let v = parse_pot(&a.two_body)?;
    let sol = solve_radial_2b(a.m, &v, a.n, a.l, &MeshConfig { points: a.points, scale: a.scale })?;
    Ok(Report::single(vec![
        ("m", json!(a.m)),
        ("two_body", json!(v.to_string())),
        ("n", json!(a.n)),
        ("l", json!(a.l)),
        ("energy", json!(sol.energy)),
        ("coarse_energy", json!(sol.coarse_energy)),
        ("scale", json!(sol.scale)),
        ("points", json!(sol.points)),
    ]))
}

fn exact_3b(a: &Exact3bArgs) -> Result<Report> {
    let v = parse_pot(&a.two_body)?;
    let symmetry: Symmetry = a.symmetry.parse()?;
    let cfg = ThreeBodyBasisConfig { b: a.b, bmax: a.bmax, l_total: a.l_total, parity: a.parity, symmetry };
    let sp = solve_3b(a.m, &v, &cfg)?;
    let levels: Vec<_> = sp.entries.iter().take(a.levels).collect();
    let header = ["L", "parity", "symmetry", "index", "B", "labels", "energy", "main_amplitude"].iter().map(|s| s.to_string()).collect();
    let rows = levels
        .iter()
        .enumerate()
        .map(|(i, e)| {
            vec![
                json!(sp.l_total),
                json!(sp.parity),
                json!(symmetry.name()),
                json!(i),
                json!(e.band),
                json!(e.display_label()),
                json!(e.energy),
                json!(e.main_amplitude),
            ]
        })
        .collect();
    let json = json!({
        "m": a.m,
        "two_body": v.to_string(),
        "L": sp.l_total,
        "parity": sp.parity,
        "symmetry": symmetry.name(),
        "Bmax": sp.bmax,
        "b": sp.b,
        "dimension": sp.dimension,
        "levels": levels.iter().map(|e| json!({
            "labels": e.display_label(),
            "B": e.band,
            "energy": e.energy,
            "main_amplitude": e.main_amplitude,
        })).collect::<Vec<_>>(),
    });
    Ok(Report { json, header, rows, status: EXIT_OK, notes: Vec::new() })
}

fn salpeter(a: &SalpeterArgs) -> Result<Report> {
    let v = parse_pot(&a.two_body)?;
    let sol = solve_salpeter_2b(a.sigma, a.m, &v, a.n, a.l, a.basis)?;
    Ok(Report::single(vec![
        ("sigma", json!(a.sigma)),
        ("m", json!(a.m)),
        ("two_body", json!(v.to_string())),
        ("n", json!(a.n)),
        ("l", json!(a.l)),
        ("mass", json!(sol.mass)),
        ("coarse_mass", json!(sol.coarse_mass)),
        ("b", json!(sol.b)),
        ("basis_size", json!(sol.basis_size)),
    ]))
}

fn predict(a: &PredictArgs) -> Result<Report> {
    let v = parse_pot(&a.two_body)?;
    let mode: PredictMode = a.mode.parse()?;
    let n = if mode == PredictMode::TwoBodyF { 2 } else { a.n };
    let labels = match &a.labels {
        Some(s) => s.parse()?,
        None => StateLabels::ground(n)?,
    };
    let presc = a.q_prescription.parse::<PrescriptionChoice>()?.resolve(labels.len())?;
    let mass = match mode {
        PredictMode::TwoBodyF => effective_mass(MassKind::TwoBody, a.m, &labels, &presc, 2)?,
        PredictMode::NBodyGs => effective_mass(MassKind::NBody, a.m, &labels, &presc, n)?,
        PredictMode::NBodyViaF => effective_mass(MassKind::BigM, a.m, &labels, &presc, n)?,
        PredictMode::GsLink => n as f64 * a.m / 2.0,
    };
    let energy = predict_spectrum(mode, a.m, &labels, &presc, n, &v)?;
    Ok(Report::single(vec![
        ("mode", json!(mode.name())),
        ("m", json!(a.m)),
        ("N", json!(n)),
        ("labels", json!(labels.to_string())),
        ("q_prescription", json!(a.q_prescription)),
        ("two_body", json!(v.to_string())),
        ("effective_mass", json!(mass)),
        ("energy", json!(energy)),
    ]))
}

fn rows_from<T: Serialize>(items: &[T], keys: &[&str]) -> Vec<Vec<Value>> {
    items
        .iter()
        .map(|it| {
            let v = to_value(it);
            keys.iter().map(|k| v.get(*k).cloned().unwrap_or(Value::Null)).collect()
        })
        .collect()
}

fn table(a: &TableArgs) -> Result<Report> {
    let v = Potential::linear(1.0)?;
    let (json_rows, header, rows, mut check): (Value, Vec<&str>, Vec<Vec<Value>>, TableCheck) = match a.which {
        TableName::Table1 => {
            let t = table1(TABLE1_MASS, &v)?;
            let mut check = check_table1(&t);
            let (header, keys): (Vec<&str>, Vec<&str>) = match a.prescription.as_deref() {
                None => {
                    let k = vec!["n", "l", "exact", "pred_ho", "dev_ho_pct", "pred_improved", "dev_improved_pct"];
                    (k.clone(), k)
                }
                Some(p) => {
                    let (pred, dev) = match p.parse::<Preset>()? {
                        Preset::Ho => ("pred_ho", "dev_ho_pct"),
                        Preset::Improved2b => ("pred_improved", "dev_improved_pct"),
                        other => return Err(Error::invalid(format!("table1 compares ho and improved2b, not {other}"))),
                    };
                    // Only judge the columns being reported.
                    let judged = ["exact", pred, dev].map(|c| format!(") {c}:"));
                    check.failures.retain(|f| judged.iter().any(|c| f.contains(c.as_str())));
                    (vec!["n", "l", "exact", "pred", "dev_pct"], vec!["n", "l", "exact", pred, dev])
                }
            };
            (to_value(&t), header, rows_from(&t, &keys), check)
        }
        TableName::Table2 => {
            if a.prescription.is_some() {
                return Err(Error::invalid("--prescription applies to table1 only"));
            }
            let t = table2(TABLE2_MASS, &v, a.bmax)?;
            let check = check_table2(&t);
            let keys = ["B", "labels", "exact", "pred_Qho", "dev_Qho_pct", "pred_Qwkb", "dev_Qwkb_pct"];
            let header = vec!["B", "labels", "exact", "pred_Qho", "dev_pct", "pred_Qwkb", "dev_pct"];
            (to_value(&t), header, rows_from(&t, &keys), check)
        }
    };
    check.failures.sort();
    let status = if check.passed() { EXIT_OK } else { EXIT_CHECK };
    let json = json!({
        "table": match a.which { TableName::Table1 => "table1", TableName::Table2 => "table2" },
        "rows": json_rows,
        "check": { "passed": check.passed(), "failures": check.failures },
    });
    let notes = check.failures.iter().map(|f| format!("reference mismatch {f}")).collect();
    Ok(Report { json, header: header.into_iter().map(String::from).collect(), rows, status, notes })
}

fn universal_small_f(a: &MassGridArgs) -> Result<Report> {
    let v = parse_pot(&a.two_body)?;
    let masses = if a.m.is_empty() { log_grid(a.m_min, a.m_max, a.points)? } else { a.m.clone() };
    let values = masses.iter().map(|&m| universal_f_fn(&v, m)).collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<Value>> = masses.iter().zip(&values).map(|(m, f)| vec![json!(m), json!(f)]).collect();
    let json = json!({
        "two_body": v.to_string(),
        "points": masses.iter().zip(&values).map(|(m, f)| json!({"m": m, "f": f})).collect::<Vec<_>>(),
    });
    Ok(Report { json, header: vec!["m".into(), "f".into()], rows, status: EXIT_OK, notes: Vec::new() })
}

fn universal_grid(a: &GridArgs, name: &str, f: fn(&Potential, f64) -> Result<f64>) -> Result<Report> {
    let p = parse_pot(&a.potential)?;
    let xs = if a.x.is_empty() { log_grid(a.x_min, a.x_max, a.points)? } else { a.x.clone() };
    let values = xs.iter().map(|&x| f(&p, x)).collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<Value>> = xs.iter().zip(&values).map(|(x, y)| vec![json!(x), json!(y)]).collect();
    let json = json!({
        "potential": p.to_string(),
        "points": xs.iter().zip(&values).map(|(x, y)| json!({"x": x, name: y})).collect::<Vec<_>>(),
    });
    Ok(Report { json, header: vec!["x".into(), name.into()], rows, status: EXIT_OK, notes: Vec::new() })
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Duality { action: DualityAction::Verify(a) } | Command::DualityVerify(a) => verify(a),
        Command::Duality { action: DualityAction::Sweep(a) } | Command::DualitySweep(a) => sweep(a, cli.jobs),
        Command::Exact2b(a) => exact_2b(a),
        Command::Exact3b(a) => exact_3b(a),
        Command::Salpeter2b(a) => salpeter(a),
        Command::Predict(a) => predict(a),
        Command::Table(a) => table(a),
        Command::UniversalSmallF(a) => universal_small_f(a),
        Command::UniversalF(a) => universal_grid(a, "F", universal_ur),
        Command::UniversalG(a) => universal_grid(a, "G", universal_nr),
    }
}

fn render(report: &Report, format: OutputFormat) -> std::result::Result<Vec<u8>, String> {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).map_err(|e| e.to_string())?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.header).map_err(|e| e.to_string())?;
            for row in &report.rows {
                w.write_record(row.iter().map(csv_cell)).map_err(|e| e.to_string())?;
            }
            w.into_inner().map_err(|e| e.to_string())
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_INVALID
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::invalid(format!("cannot start worker pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return if e.is_solver_failure() { EXIT_SOLVER } else { EXIT_INVALID };
        }
    };
    for note in &report.notes {
        let _ = writeln!(stderr, "{note}");
    }
    let bytes = match render(&report, cli.output) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot format output: {e}");
            return EXIT_INVALID;
        }
    };
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(&bytes)),
        None => stdout.write_all(&bytes),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_INVALID;
    }
    report.status
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("afm").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(1.4729153716771097), "1.47292");
        assert_eq!(format_sig6(6.0), "6.00000");
        assert_eq!(format_sig6(-0.25), "-0.250000");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(1234567.0), "1.23457e6");
        assert_eq!(format_sig6(0.0), "0");
    }

    #[test]
    fn ur_linear_mass() {
        let (code, out, _) = run_args(&["solve", "--kinematics", "ur", "--N", "3", "--one-body", "linear:a=1", "--Q", "3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["mass"].as_f64().unwrap() - 6.0).abs() < 1e-10);
    }

    #[test]
    fn invalid_input_exits_2() {
        let (code, _, err) = run_args(&["solve", "--kinematics", "nr", "--Q", "1.5", "--two-body", "linear:a=1"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("--m"), "{err}");
        let (code, _, _) = run_args(&["solve", "--kinematics", "warp", "--Q", "1"]);
        assert_eq!(code, EXIT_INVALID);
        let (code, _, err) = run_args(&["exact-2b", "--m", "1", "--two-body", "linear:b=1"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(!err.is_empty());
    }

    #[test]
    fn solver_failure_exits_3() {
        // A massless particle in a Coulomb well has no bound state.
        let (code, _, _) = run_args(&["solve", "--kinematics", "ur", "--N", "2", "--one-body", "coulomb:a=1", "--Q", "1"]);
        assert_eq!(code, EXIT_SOLVER);
    }
}
