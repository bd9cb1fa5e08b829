//! The nine command pipelines.

use std::collections::BTreeMap;

use blaschke_core::conditions::{
    blaschke_functional, check_implication, check_l_bound, check_o_condition, domain_grid, evaluate_inequality_c,
    green_identity_residual, make_test_function, validate_test_function, ConditionError, InequalityInput,
    MajorantReport, SeriesVerdict, SumTrace, TestFunction, Verdict, MIN_GAP_NODES, MIN_TAIL_TERMS, TOL_L,
    TOL_MAJORANT,
};
use blaschke_core::conditions::{verify_majorant, TestKind};
use blaschke_core::domain::BoundaryCurve;
use blaschke_core::expr::{LogModulus, RealField, ScalarField};
use blaschke_core::potential::{recover_value, GreenField, MeasureEstimate};
use blaschke_core::zeros::{locate_zeros, zero_counting_measure, LocateOptions, SearchRegion, ZeroEntry, ZeroSequence};
use blaschke_core::{Complex, DomainSpec, FunctionSpec};
use serde_json::{json, Map, Value};

use crate::format::{self, num, opt, ConditionReport};
use crate::parse;
use crate::sampling::{grid_charge_par, sample_field_par};
use crate::LabError;

/// Identity residuals below this count as `HOLDS`.
pub const TOL_IDENTITY: f64 = 1e-3;

const DEFAULT_D0: &str = "0.5";
const DEFAULT_GRID_H: f64 = 1.0 / 128.0;
const DEFAULT_FIELD_H: f64 = 1.0 / 64.0;
const DEFAULT_IDENTITY_H: f64 = 1.0 / 256.0;
const DEFAULT_EPSILONS: [f64; 3] = [1.0, 0.1, 0.01];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Zeros,
    Green,
    Riesz,
    Blaschke,
    Implication,
    InequalityC,
    Identity,
    LBound,
    ValidateV,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Zeros => "zeros",
            Command::Green => "green",
            Command::Riesz => "riesz",
            Command::Blaschke => "blaschke",
            Command::Implication => "implication",
            Command::InequalityC => "inequality-c",
            Command::Identity => "identity",
            Command::LBound => "l-bound",
            Command::ValidateV => "validate-v",
        }
    }

    /// Field and measure commands default to CSV, the rest to JSON.
    pub fn default_format(self) -> Format {
        match self {
            Command::Green | Command::Riesz => Format::Csv,
            _ => Format::Json,
        }
    }

    fn supports_csv(self) -> bool {
        matches!(self, Command::Zeros | Command::Green | Command::Riesz | Command::Blaschke)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Flag values by name (`f`, `M`, `v`, ...), after applying `--config`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inputs(pub BTreeMap<String, String>);

impl Inputs {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, LabError> {
        self.get(key).ok_or_else(|| LabError::Usage(format!("missing --{key}")))
    }

    fn real_or(&self, key: &str, default: f64) -> Result<f64, LabError> {
        self.get(key).map_or(Ok(default), parse::real)
    }

    fn step(&self, default: f64) -> Result<f64, LabError> {
        let h = self.real_or("h", default)?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(LabError::Input("--h must be positive".into()));
        }
        Ok(h)
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: String,
    /// Metadata written next to a CSV body.
    pub sidecar: Option<String>,
    /// `None` for commands that only compute data.
    pub verdict: Option<Verdict>,
}

impl Output {
    /// 0 on success or `HOLDS`, 1 on `FAILS`, 2 on `INCONCLUSIVE`.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            None | Some(Verdict::Holds) => 0,
            Some(Verdict::Fails) => 1,
            Some(Verdict::Inconclusive) => 2,
        }
    }
}

pub fn run_command(cmd: Command, inputs: &Inputs, fmt: Format) -> Result<Output, LabError> {
    if fmt == Format::Csv && !cmd.supports_csv() {
        return Err(LabError::Usage(format!("`{}` has no CSV output", cmd.name())));
    }
    let echo = &inputs.0;
    match cmd {
        Command::Zeros => zeros(inputs, fmt),
        Command::Green => green(inputs, fmt),
        Command::Riesz => riesz(inputs, fmt),
        Command::Blaschke => blaschke(inputs, fmt),
        Command::Implication => report(implication(inputs)?, echo),
        Command::InequalityC => report(inequality(inputs)?, echo),
        Command::Identity => report(identity(inputs)?, echo),
        Command::LBound => report(l_bound(inputs)?, echo),
        Command::ValidateV => report(validate(inputs)?, echo),
    }
}

fn report(mut r: ConditionReport, echo: &BTreeMap<String, String>) -> Result<Output, LabError> {
    r.input = echo.clone();
    Ok(Output { body: format::to_text(&r.to_json()), sidecar: None, verdict: Some(r.verdict) })
}

fn outer(inputs: &Inputs) -> Result<DomainSpec, LabError> {
    parse::domain(inputs.get("domain").unwrap_or("unitdisk"))
}

fn shell(inputs: &Inputs) -> Result<DomainSpec, LabError> {
    shell_or(inputs, DEFAULT_D0)
}

fn shell_or(inputs: &Inputs, d0: &str) -> Result<DomainSpec, LabError> {
    parse::with_inner(outer(inputs)?, inputs.get("d0").unwrap_or(d0))
}

fn centre(d: &DomainSpec) -> Complex {
    d.parametrisation().and_then(|t| t.apply_finite(Complex::new(0.0, 0.0)).finite()).unwrap_or_default()
}

fn test_function(inputs: &Inputs, shell: DomainSpec, default: &str) -> Result<TestFunction, LabError> {
    let kind = parse::test_kind(inputs.get("v").unwrap_or(default))?;
    let mut v = make_test_function(kind, shell)?;
    if let Some(b) = inputs.get("b") {
        let b = parse::real(b)?;
        if !(b >= v.b && b.is_finite()) {
            return Err(LabError::Input(format!("--b {b} is below the supremum {} of v on the boundary of D0", v.b)));
        }
        v.b_bound = b;
    }
    Ok(v)
}

fn disk_region(d: &DomainSpec) -> Result<SearchRegion, LabError> {
    match d.boundary() {
        Some(BoundaryCurve::Circle { center, radius, interior: true }) => Ok(SearchRegion::Disk { center, radius }),
        _ => Err(LabError::Input("zeros can only be searched for in a bounded disk".into())),
    }
}

/// Zeros of `f` in `d`: exact when `f` has closed-form zeros, else located.
fn zeros_in(f: &FunctionSpec, d: &DomainSpec) -> Result<(ZeroSequence, &'static str), LabError> {
    let region = d.without_inner();
    if let Some(known) = f.known_zeros() {
        let exact: Option<Vec<ZeroEntry>> = known
            .iter()
            .filter(|(z, _)| region.contains(*z))
            .map(|&(z, order)| {
                (order >= 1.0 && order.fract() == 0.0).then_some(ZeroEntry {
                    location: z,
                    multiplicity: order as u32,
                    refinement_error: 0.0,
                })
            })
            .collect();
        if let Some(entries) = exact {
            return Ok((ZeroSequence::new(entries, region)?, "closed form"));
        }
    }
    let located = locate_zeros(f, disk_region(&region)?, &LocateOptions::default())?;
    let entries = located.entries.into_iter().filter(|e| region.contains(e.location)).collect();
    Ok((ZeroSequence::new(entries, region)?, "located"))
}

/// `--zeros file` if given, else the zeros of `--f`.
fn zero_data(inputs: &Inputs, d: &DomainSpec) -> Result<(ZeroSequence, &'static str), LabError> {
    match inputs.get("zeros") {
        Some(path) => Ok((format::zeros_from_json(&parse::read_file(path)?, d.without_inner())?, "file")),
        None => zeros_in(&parse::function(inputs.require("f")?)?, d),
    }
}

fn zeros(inputs: &Inputs, fmt: Format) -> Result<Output, LabError> {
    let f = parse::function(inputs.require("f")?)?;
    let region = match inputs.get("region") {
        Some(r) => parse::region(r)?,
        None => disk_region(&outer(inputs)?)?,
    };
    let mut opts = LocateOptions::default();
    if let Some(h) = inputs.get("h") {
        opts.h_min = parse::real(h)?;
    }
    let z = locate_zeros(&f, region, &opts)?;
    let body = match fmt {
        Format::Json => format::to_text(&format::zeros_json(&z)),
        Format::Csv => {
            let mut buf = Vec::new();
            format::write_zeros_csv(&z, &mut buf)?;
            String::from_utf8(buf).expect("CSV output is UTF-8")
        }
    };
    Ok(Output { body, sidecar: None, verdict: None })
}

fn green(inputs: &Inputs, fmt: Format) -> Result<Output, LabError> {
    let d = outer(inputs)?;
    let pole = inputs.get("z0").map(parse::complex).transpose()?.unwrap_or_else(|| centre(&d));
    let h = inputs.step(DEFAULT_FIELD_H)?;
    let g = GreenField::new(d.clone(), pole)?;
    let field = sample_field_par(&g, domain_grid(&d, h)?).restrict(|z| d.contains_closure(z));
    let mut meta = format::field_meta(&field);
    meta["pole"] = format::complex(pole);
    meta["input"] = json!(inputs.0);
    match fmt {
        Format::Json => {
            let mut nodes = Vec::new();
            for j in 0..field.ny {
                for i in 0..field.nx {
                    if let Some(v) = field.get(i, j) {
                        let z = field.node(i, j);
                        nodes.push(json!([num(z.re), num(z.im), format::ext(v)]));
                    }
                }
            }
            meta["nodes"] = Value::Array(nodes);
            Ok(Output { body: format::to_text(&meta), sidecar: None, verdict: None })
        }
        Format::Csv => {
            let mut buf = Vec::new();
            format::write_field_csv(&field, &mut buf)?;
            let body = String::from_utf8(buf).expect("CSV output is UTF-8");
            Ok(Output { body, sidecar: Some(format::to_text(&meta)), verdict: None })
        }
    }
}

fn riesz(inputs: &Inputs, fmt: Format) -> Result<Output, LabError> {
    let d = outer(inputs)?;
    let h = inputs.step(DEFAULT_GRID_H)?;
    let nu = match inputs.get("M") {
        Some(m) => grid_charge_par(&RealField(&parse::function(m)?), &d, h)?,
        None => grid_charge_par(&LogModulus(&parse::function(inputs.require("f")?)?), &d, h)?,
    };
    let meta = json!({"input": inputs.0, "h": num(h), "total_mass": num(nu.total_mass())});
    match fmt {
        Format::Json => {
            let doc = json!({"input": inputs.0, "h": num(h), "measure": format::measure_json(&nu)});
            Ok(Output { body: format::to_text(&doc), sidecar: None, verdict: None })
        }
        Format::Csv => {
            let mut buf = Vec::new();
            format::write_measure_csv(&nu, &mut buf)?;
            let body = String::from_utf8(buf).expect("CSV output is UTF-8");
            Ok(Output { body, sidecar: Some(format::to_text(&meta)), verdict: None })
        }
    }
}

fn series_verdict(v: SeriesVerdict) -> Verdict {
    match v {
        SeriesVerdict::Convergent => Verdict::Holds,
        SeriesVerdict::Divergent => Verdict::Fails,
        SeriesVerdict::Inconclusive => Verdict::Inconclusive,
    }
}

fn trace_details(t: &SumTrace, details: &mut Map<String, Value>) {
    details.insert("terms".into(), json!(t.entries.len()));
    details.insert("skipped".into(), json!(t.skipped));
    details.insert("tail_slope".into(), opt(t.tail.map(|f| f.slope)));
    details.insert("tail_terms".into(), json!(t.tail.map_or(0, |f| f.terms_used)));
}

/// The (Bz) sum with its trace; the verdict comes from the tail model.
pub fn blaschke_report(inputs: &Inputs) -> Result<(ConditionReport, SumTrace), LabError> {
    let s = shell(inputs)?;
    let v = test_function(inputs, s.clone(), "loginv")?;
    let (z, source) = zero_data(inputs, &s)?;
    let t = blaschke_functional(&v, &z)?;
    let mut r = ConditionReport::new("blaschke", series_verdict(t.verdict));
    r.lhs = num(t.total());
    r.constants.insert("b".into(), num(v.b_bound));
    r.trace = format::trace_json(&t);
    r.tolerances.insert("min_tail_terms".into(), json!(MIN_TAIL_TERMS));
    trace_details(&t, &mut r.details);
    r.details.insert("zeros_source".into(), json!(source));
    r.details.insert("domain".into(), format::domain_json(&s));
    r.input = inputs.0.clone();
    Ok((r, t))
}

fn blaschke(inputs: &Inputs, fmt: Format) -> Result<Output, LabError> {
    let (r, t) = blaschke_report(inputs)?;
    let text = format::to_text(&r.to_json());
    match fmt {
        Format::Json => Ok(Output { body: text, sidecar: None, verdict: Some(r.verdict) }),
        Format::Csv => {
            let mut buf = Vec::new();
            format::write_trace_csv(&t, &mut buf)?;
            let body = String::from_utf8(buf).expect("CSV output is UTF-8");
            Ok(Output { body, sidecar: Some(text), verdict: Some(r.verdict) })
        }
    }
}

fn cell_count(nu: &MeasureEstimate) -> usize {
    nu.cells.as_ref().map_or(0, |c| c.nx * c.ny)
}

fn majorant_details(m: &MajorantReport, checked: bool, details: &mut Map<String, Value>) {
    details.insert("majorant_checked".into(), json!(checked));
    details.insert("majorant_worst_violation".into(), num(m.worst_violation));
    details.insert("majorant_nodes".into(), json!(m.nodes));
}

fn implication(inputs: &Inputs) -> Result<ConditionReport, LabError> {
    let s = shell(inputs)?;
    let v = test_function(inputs, s.clone(), "loginv")?;
    let h = inputs.step(DEFAULT_GRID_H)?;
    let m = parse::function(inputs.get("M").unwrap_or("0"))?;
    let (z, source) = zero_data(inputs, &s)?;
    let nu_m = grid_charge_par(&RealField(&m), &s, h)?;
    let (majorant, checked) = match inputs.get("f") {
        Some(f) => (verify_majorant(&LogModulus(&parse::function(f)?), &RealField(&m), &s, h)?, true),
        // zeros supplied without f: log|f| ≤ M is taken as given
        None => (
            MajorantReport { holds: true, worst_violation: f64::NAN, worst_at: None, nodes: 0, h, tol: TOL_MAJORANT },
            false,
        ),
    };
    let rep = check_implication(&z, &nu_m, &v, majorant)?;
    let mut r = ConditionReport::new("implication", rep.verdict);
    r.lhs = num(rep.trace.total());
    r.rhs = num(rep.integral);
    r.constants.insert("c_prime".into(), num(rep.c_prime));
    r.trace = format::trace_json(&rep.trace);
    r.grid = Some((h, cell_count(&nu_m)));
    r.tolerances.insert("majorant".into(), num(TOL_MAJORANT));
    r.tolerances.insert("min_tail_terms".into(), json!(MIN_TAIL_TERMS));
    trace_details(&rep.trace, &mut r.details);
    majorant_details(&rep.majorant, checked, &mut r.details);
    r.details.insert("uniqueness_flag".into(), json!(rep.uniqueness_flag));
    r.details.insert("zeros_source".into(), json!(source));
    Ok(r)
}

fn inequality(inputs: &Inputs) -> Result<ConditionReport, LabError> {
    let s = shell(inputs)?;
    let v = test_function(inputs, s.clone(), "loginv")?;
    let d0 = s.inner().expect("shell has an inner domain").clone();
    let h = inputs.step(DEFAULT_GRID_H)?;
    let z0 = match inputs.get("z0") {
        Some(z) => parse::complex(z)?,
        None => v.pole().unwrap_or_else(|| centre(&d0)),
    };
    if !d0.contains(z0) {
        return Err(ConditionError::PoleOutsideInner.into());
    }
    let m = parse::function(inputs.get("M").unwrap_or("0"))?;
    let mf = RealField(&m);
    let nu_m = grid_charge_par(&mf, &s, h)?;
    let (nu_u, u_z0, majorant) = match (inputs.get("u"), inputs.get("f")) {
        (Some(u), _) => {
            let u = parse::function(u)?;
            let uf = RealField(&u);
            (grid_charge_par(&uf, &s, h)?, uf.value(z0)?.to_f64(), verify_majorant(&uf, &mf, &s, h)?)
        }
        (None, Some(f)) => {
            let f = parse::function(f)?;
            let (z, _) = zero_data(inputs, &s)?;
            let uf = LogModulus(&f);
            (zero_counting_measure(&z), uf.value(z0)?.to_f64(), verify_majorant(&uf, &mf, &s, h)?)
        }
        (None, None) => return Err(LabError::Usage("missing --f or --u".into())),
    };
    let m_z0 = recover_value(&mf, Some(&nu_m), z0, 0.25 * d0.dist_to_boundary(z0))?;
    let dtilde = inputs.get("dtilde").map(parse::domain).transpose()?;
    let rep = evaluate_inequality_c(InequalityInput {
        nu_u: &nu_u,
        nu_m: &nu_m,
        u_z0,
        m_z0,
        z0,
        v: &v,
        dtilde: dtilde.as_ref(),
        majorant: Some(&majorant),
    })?;
    let c = rep.c_min.unwrap_or(0.0);
    let mut r = ConditionReport::new("inequality-c", rep.verdict);
    r.lhs = num(c * rep.u_z0 + rep.t_u);
    r.rhs = num(rep.t_m + rep.t_m_minus + c * (rep.g_m + rep.g_m_minus + rep.m_z0));
    r.constants.insert("C".into(), opt(rep.c_min));
    r.constants.insert("C_bar".into(), opt(rep.c_bar));
    r.constants.insert("b".into(), num(rep.b));
    r.grid = Some((h, cell_count(&nu_m)));
    r.tolerances.insert("majorant".into(), num(TOL_MAJORANT));
    for (k, x) in [
        ("t_u", rep.t_u),
        ("t_m", rep.t_m),
        ("t_m_minus", rep.t_m_minus),
        ("g_m", rep.g_m),
        ("g_m_minus", rep.g_m_minus),
        ("u_z0", rep.u_z0),
        ("m_z0", rep.m_z0),
    ] {
        r.details.insert(k.into(), num(x));
    }
    r.details.insert("z0".into(), format::complex(z0));
    r.details.insert("dtilde".into(), format::domain_json(&rep.dtilde));
    r.details.insert("dtilde_compact".into(), json!(rep.dtilde_compact));
    majorant_details(&majorant, true, &mut r.details);
    Ok(r)
}

fn identity(inputs: &Inputs) -> Result<ConditionReport, LabError> {
    // (1 − |z|²)² is subharmonic for |z| > 1/√2, so D₀ defaults to D(0, 3/4)
    let s = shell_or(inputs, "0.75")?;
    let v = test_function(inputs, s, "power:2")?;
    let m = parse::function(inputs.require("M")?)?;
    let h = inputs.step(DEFAULT_IDENTITY_H)?;
    let rep = green_identity_residual(&RealField(&m), &v, h)?;
    let verdict = if rep.residual < TOL_IDENTITY { Verdict::Holds } else { Verdict::Fails };
    let mut r = ConditionReport::new("identity", verdict);
    r.lhs = num(rep.v_dnu_m);
    r.rhs = num(rep.m_dnu_v + rep.boundary_term);
    r.constants.insert("residual".into(), num(rep.residual));
    r.grid = Some((h, rep.nodes));
    r.tolerances.insert("residual".into(), num(TOL_IDENTITY));
    r.details.insert("boundary_term".into(), num(rep.boundary_term));
    r.details.insert("m_dnu_v".into(), num(rep.m_dnu_v));
    Ok(r)
}

fn l_bound(inputs: &Inputs) -> Result<ConditionReport, LabError> {
    let d = outer(inputs)?;
    let u0 = parse::function(inputs.get("u0").unwrap_or("0"))?;
    let f = parse::function(inputs.get("f").unwrap_or("1"))?;
    let m = parse::function(inputs.get("M").unwrap_or("0"))?;
    let z = parse::complex(inputs.require("z")?)?;
    let r = parse::real(inputs.require("r")?)?;
    let eps = inputs.real_or("eps", 0.5)?;
    let rep = check_l_bound(&RealField(&u0), &f, &RealField(&m), &d, z, r, eps)?;
    let mut out = ConditionReport::new("l-bound", if rep.holds { Verdict::Holds } else { Verdict::Fails });
    out.lhs = format::ext(rep.lhs);
    out.rhs = num(rep.rhs);
    out.constants.insert("eps".into(), num(eps));
    out.tolerances.insert("l".into(), num(rep.tol));
    out.details.insert("mean".into(), num(rep.mean));
    out.details.insert("log_term".into(), num(rep.log_term));
    out.details.insert("log_term_form".into(), json!("(1 + eps) * log((1 + |z|) / r)"));
    out.details.insert("z".into(), format::complex(z));
    out.details.insert("r".into(), num(r));
    debug_assert_eq!(rep.tol, TOL_L);
    Ok(out)
}

fn validate(inputs: &Inputs) -> Result<ConditionReport, LabError> {
    let s = shell(inputs)?;
    let kind = parse::test_kind(inputs.get("v").unwrap_or("loginv"))?;
    let v = TestFunction::new(kind, s.clone())?;
    let gap = s.shell_gap()?;
    let h = inputs.step(gap / (2 * MIN_GAP_NODES) as f64)?;
    let eps = inputs.get("eps").map_or(Ok(DEFAULT_EPSILONS.to_vec()), parse::reals)?;
    let val = validate_test_function(&v, h);
    let flagged = TestFunction { flags: val.flags(), ..v.clone() };
    let o = check_o_condition(&flagged, &eps)?;
    let verdict = if val.passed() && o.verdict == Verdict::Holds { Verdict::Holds } else { Verdict::Fails };
    let mut r = ConditionReport::new("validate-v", verdict);
    r.constants.insert("b".into(), num(v.b));
    r.constants.insert("b_bound".into(), num(v.b_bound));
    r.grid = Some((h, val.nodes));
    r.tolerances.insert("tol_sh".into(), num(val.tol_sh));
    r.tolerances.insert("min_gap_nodes".into(), json!(MIN_GAP_NODES));
    let d = &mut r.details;
    d.insert("kind".into(), json!(kind_name(&v.kind)));
    d.insert("passed".into(), json!(val.passed()));
    d.insert("failure".into(), json!(val.failure()));
    d.insert("nodes_across_gap".into(), num(val.nodes_across_gap));
    d.insert("min_value".into(), num(val.min_value));
    d.insert("max_value".into(), num(val.max_value));
    d.insert("worst_laplacian".into(), num(val.worst_laplacian));
    d.insert("subharmonic".into(), json!(val.subharmonic));
    d.insert("vanishes_on_boundary".into(), json!(val.vanishes_on_boundary));
    d.insert("normal_derivative".into(), num(val.normal_derivative));
    d.insert("normal_derivative_vanishes".into(), json!(val.normal_derivative_vanishes));
    d.insert(
        "boundary_collars".into(),
        Value::Array(val.collars.iter().map(|&(delta, max)| json!({"delta": num(delta), "max_v": num(max)})).collect()),
    );
    d.insert("o_verdict".into(), format::verdict(o.verdict));
    d.insert(
        "o_collars".into(),
        Value::Array(
            o.collars
                .iter()
                .map(|c| json!({"eps": num(c.eps), "margin": opt(c.margin), "level_radius": opt(c.level_radius)}))
                .collect(),
        ),
    );
    Ok(r)
}

fn kind_name(k: &TestKind) -> &'static str {
    match k {
        TestKind::GreenPole(_) => "greenpole",
        TestKind::BoundaryPower(_) => "power",
        TestKind::LogInverse => "loginv",
        TestKind::Custom(_) => "custom",
    }
}
