//! Verification reports, witness files, and the checks behind the CLI.
//!
//! Reports and witnesses are JSON. Report values are strings so that
//! integers and rationals round-trip without loss. A witness file holds the
//! parameters needed to rebuild a construction together with the output of
//! a search; [`check_witness`] re-validates it with linear algebra only.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cochain::{
    coboundary_matrix, homology, integer_primitive, min_norm_primitive, verify_norm_certificate, Cochain, CochainError,
    Method, MinNormOptions, Ring,
};
use crate::complex::{annulus_triangulation, circle, circuit_chain, product_interval, CellComplex, ComplexError, Label};
use crate::constructions::{
    build_Mk, build_Y_stage, build_beta_with, build_tower, carrier_containment, refinement_witnesses, witnesses_valid,
    BetaOutcome, ConstructionError, MkBundle, MkParams, NMode,
};
use crate::degree::{bezout, check_degree_relation, checked_pow, enumerate_m, min_m_bound, DegreeError, DegreeReport};
use crate::linalg::{solve_integer, LinalgError, NormCertificate, SolveOutcome, SparseMatrix};
use crate::metric::lipschitz_constant_scaled;

pub const TOOL: &str = "coarse-kit";
pub const WITNESS_FORMAT: &str = "coarse-kit-witness";
pub const WITNESS_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("malformed witness: {0}")]
    Witness(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl ReportError {
    /// Whether the error is a usage problem rather than a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            ReportError::InvalidParams(_) | ReportError::Construction(ConstructionError::InvalidParams(_))
        )
    }
}

/// Ordered so that the worst status of a report is its maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub values: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, status: Status) -> CheckRecord {
        CheckRecord { name: name.into(), status, values: BTreeMap::new(), witness: None, note: None }
    }

    pub fn value(mut self, key: &str, v: impl Display) -> CheckRecord {
        self.values.insert(key.into(), v.to_string());
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> CheckRecord {
        self.note = Some(n.into());
        self
    }

    pub fn witness(mut self, w: Option<String>) -> CheckRecord {
        self.witness = w;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    pub node_count: String,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<BTreeMap<String, String>>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// An integral primitive of the obstruction cocycle, vanishing on the boundary.
    Primitive { params: MkParams, gamma: Vec<i64> },
    /// Optimal primitive and its lower-bound proof.
    MinNorm { params: MkParams, certificate: NormCertificate },
    Bezout { p: i64, q: i64, k: u32, n: i64, m: i64 },
    /// Cocycles dual to the two holes, and `(d_p, d_q, d)` samples built from them.
    HoleCocycles { params: MkParams, omega_p: Vec<i64>, omega_q: Vec<i64>, samples: Vec<[i64; 3]> },
    Beta { params: MkParams, n: usize, beta: Vec<i64> },
    /// Refinement witnesses for every stage of the tower.
    Tower { params: MkParams, stages: u32, witnesses: Vec<Vec<usize>> },
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::Primitive { .. } => "primitive",
            Witness::MinNorm { .. } => "min-norm",
            Witness::Bezout { .. } => "bezout",
            Witness::HoleCocycles { .. } => "hole-cocycles",
            Witness::Beta { .. } => "beta",
            Witness::Tower { .. } => "tower",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub format: String,
    pub version: u32,
    pub witness: Witness,
}

impl WitnessFile {
    pub fn new(witness: Witness) -> WitnessFile {
        WitnessFile { format: WITNESS_FORMAT.into(), version: WITNESS_VERSION, witness }
    }

    pub fn parse(s: &str) -> Result<WitnessFile, ReportError> {
        let f: WitnessFile = serde_json::from_str(s).map_err(|e| ReportError::Witness(e.to_string()))?;
        if f.format != WITNESS_FORMAT || f.version != WITNESS_VERSION {
            return Err(ReportError::Witness(format!("unsupported format {} v{}", f.format, f.version)));
        }
        Ok(f)
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), ReportError> {
    let io = |e: std::io::Error| ReportError::Io { path: path.to_path_buf(), message: e.to_string() };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Settings shared by the verification commands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    /// Directory receiving `report.json` and the witness files.
    pub out: Option<PathBuf>,
    pub node_limit: u64,
    pub method: Method,
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        let d = MinNormOptions::default();
        RunOptions { out: None, node_limit: d.node_limit, method: d.method, timing: false }
    }
}

/// Accumulates records, witnesses and timings for one report.
pub struct Session {
    opts: RunOptions,
    command: String,
    params: BTreeMap<String, String>,
    checks: Vec<CheckRecord>,
    warnings: Vec<String>,
    timings: BTreeMap<String, String>,
    nodes: u64,
}

impl Session {
    pub fn new(command: &str, opts: &RunOptions) -> Session {
        Session {
            opts: opts.clone(),
            command: command.into(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            timings: BTreeMap::new(),
            nodes: 0,
        }
    }

    pub fn param(&mut self, key: &str, v: impl Display) {
        self.params.insert(key.into(), v.to_string());
    }

    fn echo(&mut self, p: &MkParams) {
        self.param("p", p.p);
        self.param("q", p.q);
        self.param("k", p.k);
        self.param("edge_scale", p.edge_scale);
        self.param("reduce", p.reduce);
        self.param("budget", p.budget);
        self.param("node_limit", self.opts.node_limit);
        self.param("method", format!("{:?}", self.opts.method).to_lowercase());
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.checks.push(r);
    }

    pub fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        if self.opts.timing {
            self.timings.insert(label.into(), t.elapsed().as_millis().to_string());
        }
        out
    }

    /// Writes `name.witness.json` into the output directory and returns its
    /// file name, or `None` without an output directory.
    pub fn witness(&mut self, name: &str, w: Witness) -> Result<Option<String>, ReportError> {
        let Some(dir) = &self.opts.out else { return Ok(None) };
        let file = format!("{name}.witness.json");
        let body = serde_json::to_string(&WitnessFile::new(w)).expect("serializable") + "\n";
        write_atomic(&dir.join(&file), &body)?;
        Ok(Some(file))
    }

    pub fn finish(mut self) -> Result<VerificationReport, ReportError> {
        if self.opts.out.is_none() && !self.checks.is_empty() {
            self.warnings.push("no output directory; witnesses were not written".into());
        }
        let status = self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass);
        let report = VerificationReport {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command,
            params: self.params,
            status,
            checks: self.checks,
            node_count: self.nodes.to_string(),
            warnings: self.warnings,
            timing_ms: self.opts.timing.then_some(self.timings),
        };
        if let Some(dir) = &self.opts.out {
            write_atomic(&dir.join("report.json"), &report.to_json())?;
        }
        Ok(report)
    }
}

/// Outcome of the minimal-norm search on the obstruction cocycle.
pub enum NormSearch {
    Exact(NormCertificate),
    /// The node budget ran out; `incumbent` is a primitive of norm `upper`.
    Interval { lower: i64, upper: i64, incumbent: Vec<i64>, nodes: u64 },
}

impl NormSearch {
    pub fn primitive(&self) -> &[i64] {
        match self {
            NormSearch::Exact(c) => &c.witness,
            NormSearch::Interval { incumbent, .. } => incumbent,
        }
    }

    pub fn nodes(&self) -> u64 {
        match self {
            NormSearch::Exact(c) => c.node_count,
            NormSearch::Interval { nodes, .. } => *nodes,
        }
    }
}

/// `m_k`: the minimal sup-norm of a primitive of the obstruction cocycle
/// vanishing on the boundary circle.
pub fn search_m(bundle: &MkBundle, opts: &MinNormOptions) -> Result<NormSearch, ReportError> {
    let c = bundle.obstruction_cocycle()?;
    match min_norm_primitive(&c, Some(&bundle.boundary_circle), opts) {
        Ok(cert) => Ok(NormSearch::Exact(cert)),
        Err(CochainError::Linalg(LinalgError::NodeLimitExceeded(cp))) => Ok(NormSearch::Interval {
            lower: cp.lower,
            upper: cp.upper,
            incumbent: cp.incumbent.clone(),
            nodes: cp.nodes,
        }),
        Err(e) => Err(e.into()),
    }
}

fn circuit_of(cx: &CellComplex, l: &Label, name: &str) -> Result<Vec<i64>, ReportError> {
    let c = l.circuit.as_ref().ok_or_else(|| ReportError::InvalidParams(format!("{name} has no circuit")))?;
    Ok(circuit_chain(cx, c)?)
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_i64s(v: &[BigInt]) -> Result<Vec<i64>, ReportError> {
    v.iter().map(|x| x.to_i64().ok_or_else(|| ReportError::Witness("value exceeds i64".into()))).collect()
}

/// Integral 1-cocycles `ω_p, ω_q` with `ω_p(p-hole) = 1`, `ω_p(q-hole) = 0`
/// and symmetrically for `ω_q`.
pub fn hole_cocycles(bundle: &MkBundle) -> Result<(Vec<i64>, Vec<i64>), ReportError> {
    let cx = &bundle.complex;
    let d = coboundary_matrix(cx, 1)?;
    let hp = circuit_of(cx, &bundle.p_hole, "p-hole")?;
    let hq = circuit_of(cx, &bundle.q_hole, "q-hole")?;
    let rows = cx.count(2);
    let mut t = d.triples();
    t.extend(hp.iter().enumerate().filter(|(_, &v)| v != 0).map(|(e, &v)| (rows, e, v)));
    t.extend(hq.iter().enumerate().filter(|(_, &v)| v != 0).map(|(e, &v)| (rows + 1, e, v)));
    let m = SparseMatrix::from_triples(rows + 2, cx.count(1), t);
    let solve = |a: i64, b: i64| -> Result<Vec<i64>, ReportError> {
        let mut rhs = vec![BigInt::zero(); rows + 2];
        rhs[rows] = a.into();
        rhs[rows + 1] = b.into();
        match solve_integer(&m, &rhs).map_err(CochainError::from)? {
            SolveOutcome::Solution { x, .. } => to_i64s(&x),
            SolveOutcome::NoSolution(o) => Err(CochainError::NotACoboundary(o).into()),
        }
    };
    Ok((solve(1, 0)?, solve(0, 1)?))
}

/// Checks the hole cocycles and recomputes `d` for each `(d_p, d_q)` sample.
/// Returns the recomputed triples, or `None` if the cocycles are wrong.
pub fn evaluate_hole_samples(
    bundle: &MkBundle,
    omega_p: &[i64],
    omega_q: &[i64],
    pairs: &[(i64, i64)],
) -> Result<Option<Vec<[i64; 3]>>, ReportError> {
    let cx = &bundle.complex;
    if omega_p.len() != cx.count(1) || omega_q.len() != cx.count(1) {
        return Ok(None);
    }
    let d = coboundary_matrix(cx, 1)?;
    if d.mul_vec_i64(omega_p).iter().chain(d.mul_vec_i64(omega_q).iter()).any(|&v| v != 0) {
        return Ok(None);
    }
    let hp = circuit_of(cx, &bundle.p_hole, "p-hole")?;
    let hq = circuit_of(cx, &bundle.q_hole, "q-hole")?;
    let bd = circuit_of(cx, &bundle.boundary_circle, "boundary")?;
    if [dot(omega_p, &hp), dot(omega_p, &hq), dot(omega_q, &hp), dot(omega_q, &hq)] != [1, 0, 0, 1] {
        return Ok(None);
    }
    let (bp, bq) = (dot(omega_p, &bd), dot(omega_q, &bd));
    Ok(Some(pairs.iter().map(|&(a, b)| [a, b, a * bp + b * bq]).collect()))
}

fn degree_pairs(p: i64, q: i64, k: u32) -> Vec<(i64, i64)> {
    let mut v: Vec<(i64, i64)> = (-2..=2).flat_map(|a| (-2..=2).map(move |b| (a, b))).collect();
    if let Ok((n, m)) = bezout(p, q, k) {
        v.push((n, m));
    }
    v
}

fn relation_record(p: i64, q: i64, k: u32, samples: &[[i64; 3]]) -> Result<CheckRecord, ReportError> {
    let mut ok = true;
    let mut retraction = None;
    for s in samples {
        let c = check_degree_relation(&DegreeReport::new(p, q, k)?.with_degrees(s[2], s[0], s[1]));
        ok &= c.passed();
        if s[2] == 1 {
            retraction = Some((s[1], c.bound_holds));
        }
    }
    let mut r = CheckRecord::new("degree-relation", Status::from_bool(ok)).value("samples", samples.len());
    if let Some((dq, bound)) = retraction {
        r = r.value("retraction_d_q", dq).value("retraction_bound_holds", bound.map_or("n/a".into(), |b| b.to_string()));
    }
    Ok(r)
}

fn bezout_record(p: i64, q: i64, k: u32) -> Result<(CheckRecord, Witness), ReportError> {
    let (n, m) = bezout(p, q, k)?;
    let bound = min_m_bound(p, q, k)?.bound;
    let exhaustive = enumerate_m(p, q, k, m.abs())?.iter().map(|x| x.1.abs()).min();
    let ok = BigRational::from_integer(m.abs().into()) >= bound && exhaustive == Some(m.abs());
    let r = CheckRecord::new("bezout", Status::from_bool(ok))
        .value("n", n)
        .value("m", m)
        .value("abs_m", m.abs())
        .value("bound", &bound)
        .value("exhaustive_min_abs_m", exhaustive.map_or("none".into(), |v| v.to_string()));
    Ok((r, Witness::Bezout { p, q, k, n, m }))
}

fn norm_record(
    s: &mut Session,
    name: &str,
    witness_name: &str,
    bundle: &MkBundle,
) -> Result<(CheckRecord, NormSearch), ReportError> {
    let params = bundle.params.clone();
    let opts = MinNormOptions { node_limit: s.opts.node_limit, method: s.opts.method };
    let search = s.timed(name, || search_m(bundle, &opts))?;
    s.nodes += search.nodes();
    let target = checked_pow(params.q as i64, params.k)? - 1;
    let r = match &search {
        NormSearch::Exact(cert) => {
            let w = s.witness(witness_name, Witness::MinNorm { params, certificate: cert.clone() })?;
            CheckRecord::new(name, Status::from_bool(cert.optimum >= target))
                .value("m", cert.optimum)
                .value("bound", target)
                .value("nodes", cert.node_count)
                .witness(w)
        }
        NormSearch::Interval { lower, upper, nodes, .. } => CheckRecord::new(name, Status::Inconclusive)
            .value("m_lower", lower)
            .value("m_upper", upper)
            .value("bound", target)
            .value("nodes", nodes)
            .note("node limit reached; m lies in [m_lower, m_upper]"),
    };
    Ok((r, search))
}

/// The four checks on `M_k`: solvability of the obstruction, the Bezout
/// bound, the degree relation on sampled degree data, and `m_k ≥ q^k − 1`.
pub fn verify_prop51(params: &MkParams, opts: &RunOptions) -> Result<VerificationReport, ReportError> {
    let mut s = Session::new("verify-prop51", opts);
    s.echo(params);
    if !params.hypothesis_holds() {
        s.warn(format!("p = {} ≤ q² = {}; the lower bounds are not expected to hold", params.p, params.q * params.q));
    }
    let bundle = s.timed("build", || build_Mk(params))?;
    let (p, q, k) = (params.p as i64, params.q as i64, params.k);

    let c = bundle.obstruction_cocycle()?;
    let r = match s.timed("primitive", || integer_primitive(&c, Some(&bundle.boundary_circle))) {
        Ok(g) => {
            let gamma = g.integer_values().expect("integral");
            let w = s.witness("primitive", Witness::Primitive { params: params.clone(), gamma })?;
            CheckRecord::new("obstruction-solvable", Status::Pass).value("norm", g.norm()).witness(w)
        }
        Err(CochainError::NotACoboundary(o)) => {
            CheckRecord::new("obstruction-solvable", Status::Fail).note(format!("obstruction: {o:?}"))
        }
        Err(e) => return Err(e.into()),
    };
    s.push(r);

    let (r, w) = bezout_record(p, q, k)?;
    let file = s.witness("bezout", w)?;
    s.push(r.witness(file));

    let (op, oq) = s.timed("hole-cocycles", || hole_cocycles(&bundle))?;
    let pairs = degree_pairs(p, q, k);
    let samples = evaluate_hole_samples(&bundle, &op, &oq, &pairs)?
        .ok_or_else(|| ReportError::Witness("hole cocycles failed their own check".into()))?;
    let r = relation_record(p, q, k, &samples)?;
    let w = s.witness(
        "hole-cocycles",
        Witness::HoleCocycles { params: params.clone(), omega_p: op, omega_q: oq, samples: samples.clone() },
    )?;
    s.push(r.witness(w));

    let (r, _) = norm_record(&mut s, "norm-bound", "min-norm", &bundle)?;
    s.push(r);
    if !bundle.valence.ok() {
        s.warn(format!(
            "vertex valence {} exceeds the nominal limit {}",
            bundle.valence.max_valence, bundle.valence.limit
        ));
    }
    s.finish()
}

fn beta_checks(out: &BetaOutcome, target: &Cochain) -> Result<[(String, bool, String); 3], ReportError> {
    let d = out.beta.coboundary()?;
    let n = out.layout.n;
    let norm = out.beta.norm();
    let mut rel = true;
    for name in [format!("boundary×I"), "slice-0".to_string(), format!("slice-{n}")] {
        rel &= out.beta.vanishes_on(out.product.label(&name)?);
    }
    Ok([
        ("coboundary".into(), d.values() == target.values(), target.support().len().to_string()),
        ("norm".into(), norm <= BigRational::from_integer(4.into()), norm.to_string()),
        ("relative".into(), rel, String::new()),
    ])
}

/// Builds `β` on `M_k × [0, n]` from a minimal primitive and checks it.
pub fn verify_prop52(params: &MkParams, mode: NMode, opts: &RunOptions) -> Result<VerificationReport, ReportError> {
    let mut s = Session::new("verify-prop52", opts);
    s.echo(params);
    s.param("n_mode", serde_json::to_value(mode).expect("serializable").as_str().expect("string"));
    let bundle = s.timed("build", || build_Mk(params))?;
    let (r, search) = norm_record(&mut s, "m", "min-norm", &bundle)?;
    s.push(r);
    let gamma = Cochain::from_integers(bundle.complex.clone(), 1, Ring::Z, search.primitive())?;
    let cells = bundle.complex.total_cells().max(1);
    let n_limit = (params.budget / cells).saturating_sub(1) / 2;
    let Some(n) = mode.n_for(&gamma, n_limit) else {
        let mut r = CheckRecord::new("interval-length", Status::Inconclusive)
            .value("n_limit", n_limit)
            .value("gamma_norm", gamma.norm());
        r = r.note(match mode {
            NMode::Factorial => "size guard: n = ‖γ‖! exceeds the budget; try --n-mode lcm",
            NMode::Lcm => "size guard: n = lcm|γ(e)| exceeds the budget; raise --budget",
        });
        s.push(r);
        return s.finish();
    };
    s.push(CheckRecord::new("interval-length", Status::Pass).value("n", n).value("n_limit", n_limit));
    let out = match s.timed("beta", || build_beta_with(&gamma, n, params.budget)) {
        Ok(o) => o,
        Err(ConstructionError::SizeGuardExceeded { needed, budget }) => {
            s.push(
                CheckRecord::new("beta", Status::Inconclusive)
                    .value("needed", needed)
                    .value("budget", budget)
                    .note("size guard exceeded"),
            );
            return s.finish();
        }
        Err(e) => return Err(e.into()),
    };
    let target = out.target_cocycle(&bundle.q_map())?;
    let beta = out.beta.integer_values().expect("integral");
    let w = s.witness("beta", Witness::Beta { params: params.clone(), n, beta })?;
    for (name, ok, v) in beta_checks(&out, &target)? {
        let mut r = CheckRecord::new(format!("beta-{name}"), Status::from_bool(ok)).witness(w.clone());
        if !v.is_empty() {
            r = r.value(if name == "norm" { "norm" } else { "target_support" }, v);
        }
        s.push(r);
    }
    s.finish()
}

/// Per-stage Lipschitz, refinement and carrier checks along the tower, and
/// the table of `m_j` for `j ≤ k`.
pub fn verify_tower(params: &MkParams, stages: u32, opts: &RunOptions) -> Result<VerificationReport, ReportError> {
    let mut s = Session::new("verify-tower", opts);
    s.echo(params);
    s.param("stages", stages);
    if stages == 0 || stages > params.k {
        return Err(ReportError::InvalidParams(format!("stages must lie in 1..={}", params.k)));
    }
    let tower = s.timed("tower", || build_tower(params, stages - 1))?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut all_w = Vec::new();
    let mut records = Vec::new();
    let mut composite = BigRational::one();
    for (i, st) in tower.iter().enumerate() {
        let lip = lipschitz_constant_scaled(&st.projection, &half).map_err(|e| ReportError::Witness(e.to_string()))?;
        composite *= &lip;
        let w = refinement_witnesses(&st.projection, &st.subdivision);
        let found = w.iter().filter(|x| x.is_some()).count();
        let contained = carrier_containment(&st.projection, &st.approximation, &st.subdivision);
        let bound = half.pow(i as i32 + 1);
        let ok = lip <= half && found == w.len() && contained && composite <= bound;
        records.push(
            CheckRecord::new(format!("stage-{i}"), Status::from_bool(ok))
                .value("level", st.level)
                .value("cells", st.complex.total_cells())
                .value("lipschitz", &lip)
                .value("composite_lipschitz", &composite)
                .value("composite_bound", &bound)
                .value("witnesses_found", found)
                .value("vertices", w.len())
                .value("carrier_containment", contained),
        );
        all_w.push(w.into_iter().map(|x| x.unwrap_or(usize::MAX)).collect::<Vec<_>>());
    }
    let file = s.witness("tower", Witness::Tower { params: params.clone(), stages, witnesses: all_w })?;
    for r in records {
        s.push(r.witness(file.clone()));
    }
    let mut prev = None;
    let mut growth = true;
    let mut open = false;
    let mut files = Vec::new();
    for j in 1..=params.k {
        let bundle = s.timed(&format!("build-level-{j}"), || build_Mk(&params.at_level(j)))?;
        let (r, search) = norm_record(&mut s, &format!("m-level-{j}"), &format!("min-norm-level-{j}"), &bundle)?;
        files.extend(r.witness.clone());
        match search {
            NormSearch::Exact(c) => {
                growth &= prev.is_none_or(|p| c.optimum > p);
                prev = Some(c.optimum);
            }
            NormSearch::Interval { .. } => {
                open = true;
                prev = None;
            }
        }
        s.push(r);
    }
    let status = match (growth, open) {
        (false, _) => Status::Fail,
        (true, true) => Status::Inconclusive,
        (true, false) => Status::Pass,
    };
    let mut r = CheckRecord::new("m-growth", status).value("levels", params.k);
    if !files.is_empty() {
        r = r.witness(Some(files.join(",")));
    }
    s.push(r);
    s.finish()
}

/// Re-validates a witness without searching: rebuilds the construction
/// from the stored parameters and checks the stored data against it.
pub fn check_witness(w: &Witness) -> Result<CheckRecord, ReportError> {
    let r = CheckRecord::new(w.kind(), Status::Fail);
    let ok = match w {
        Witness::Primitive { params, gamma } => {
            let b = build_Mk(params)?;
            let c = b.obstruction_cocycle()?;
            let g = Cochain::from_integers(b.complex.clone(), 1, Ring::Z, gamma)?;
            g.coboundary()?.values() == c.values() && g.vanishes_on(&b.boundary_circle)
        }
        Witness::MinNorm { params, certificate } => {
            let b = build_Mk(params)?;
            let c = b.obstruction_cocycle()?;
            let target = checked_pow(params.q as i64, params.k)? - 1;
            verify_norm_certificate(&c, Some(&b.boundary_circle), certificate) && certificate.optimum >= target
        }
        Witness::Bezout { p, q, k, n, m } => {
            let (pk, qk) = (checked_pow(*p, *k)? as i128, checked_pow(*q, *k)? as i128);
            let bound = min_m_bound(*p, *q, *k)?.bound;
            *n as i128 * pk + *m as i128 * qk == 1
                && 2 * (*m as i128).abs() <= pk
                && BigRational::from_integer(m.abs().into()) >= bound
        }
        Witness::HoleCocycles { params, omega_p, omega_q, samples } => {
            let b = build_Mk(params)?;
            let pairs: Vec<(i64, i64)> = samples.iter().map(|s| (s[0], s[1])).collect();
            match evaluate_hole_samples(&b, omega_p, omega_q, &pairs)? {
                Some(re) => {
                    re == *samples
                        && relation_record(params.p as i64, params.q as i64, params.k, samples)?.status == Status::Pass
                }
                None => false,
            }
        }
        Witness::Beta { params, n, beta } => {
            let b = build_Mk(params)?;
            let pc = product_interval(&b.complex, *n)?;
            let product = Arc::new(pc.complex);
            let beta = Cochain::from_integers(product.clone(), 2, Ring::Z, beta)?;
            let out = BetaOutcome { product, layout: pc.layout, beta };
            let target = out.target_cocycle(&b.q_map())?;
            beta_checks(&out, &target)?.iter().all(|c| c.1)
        }
        Witness::Tower { params, stages, witnesses } => {
            if *stages == 0 || witnesses.len() != *stages as usize {
                return Ok(r.note("stage count mismatch"));
            }
            let tower = build_tower(params, stages - 1)?;
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            tower.iter().zip(witnesses).all(|(st, w)| {
                lipschitz_constant_scaled(&st.projection, &half).is_ok_and(|l| l <= half)
                    && witnesses_valid(&st.projection, &st.subdivision, w)
                    && carrier_containment(&st.projection, &st.approximation, &st.subdivision)
            })
        }
    };
    Ok(CheckRecord { status: Status::from_bool(ok), ..r })
}

/// Reads a witness file and reports on it.
pub fn check_witness_file(path: &Path, opts: &RunOptions) -> Result<VerificationReport, ReportError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ReportError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    let file = WitnessFile::parse(&text)?;
    let mut s = Session::new("check-witness", &RunOptions { out: None, ..opts.clone() });
    s.param("file", path.display());
    let r = s.timed("check", || check_witness(&file.witness))?;
    s.push(r);
    let mut report = s.finish()?;
    report.warnings.clear();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuildKind {
    Circle,
    Annulus,
    Mk,
    Tower,
    YStage,
    Product,
}

/// What a build command needs beyond the `M_k` parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildSpec {
    pub kind: BuildKind,
    pub params: MkParams,
    /// Circle size, or the interval length of a product.
    pub n: usize,
    /// Inner and outer sizes of an annulus.
    pub a: usize,
    pub b: usize,
    pub stages: u32,
}

pub fn build(spec: &BuildSpec) -> Result<Arc<CellComplex>, ReportError> {
    let p = &spec.params;
    Ok(match spec.kind {
        BuildKind::Circle => Arc::new(circle(spec.n)?),
        BuildKind::Annulus => annulus_triangulation(spec.a, spec.b)?.0,
        BuildKind::Mk => build_Mk(p)?.complex,
        BuildKind::Tower => {
            if spec.stages == 0 || spec.stages > p.k {
                return Err(ReportError::InvalidParams(format!("stages must lie in 1..={}", p.k)));
            }
            build_tower(p, spec.stages - 1)?.pop().expect("nonempty").complex
        }
        BuildKind::YStage => {
            build_Y_stage(p, spec.stages)?.pop().ok_or_else(|| ReportError::InvalidParams("no stages".into()))?.complex
        }
        BuildKind::Product => {
            let m = build_Mk(p)?.complex;
            let needed = (2 * spec.n + 1).saturating_mul(m.total_cells());
            if needed > p.budget {
                return Err(ConstructionError::SizeGuardExceeded { needed, budget: p.budget }.into());
            }
            Arc::new(product_interval(&m, spec.n)?.complex)
        }
    })
}

/// `cells: a/b/c` and the Euler characteristic.
pub fn summary(cx: &CellComplex) -> String {
    let counts: Vec<String> = cx.counts().iter().map(|c| c.to_string()).collect();
    format!("cells: {}\neuler characteristic: {}\n", counts.join("/"), cx.euler_characteristic())
}

/// One line per degree: `H_k = Z^r ⊕ Z/t…`.
pub fn homology_lines(cx: &CellComplex) -> Result<String, ReportError> {
    let mut out = String::new();
    for k in 0..=cx.dim() {
        let h = homology(cx, k)?;
        let mut parts = Vec::new();
        if h.free_rank > 0 {
            parts.push(if h.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", h.free_rank) });
        }
        parts.extend(h.torsion.iter().filter(|t| !t.abs().is_one()).map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            parts.push("0".into());
        }
        out.push_str(&format!("H_{k} = {}\n", parts.join(" ⊕ ")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_order_and_codes() {
        assert!(Status::Fail > Status::Inconclusive && Status::Inconclusive > Status::Pass);
        assert_eq!([Status::Pass, Status::Fail, Status::Inconclusive].map(Status::exit_code), [0, 1, 2]);
    }

    #[test]
    fn report_round_trips_without_timing() {
        let mut s = Session::new("x", &RunOptions::default());
        s.push(CheckRecord::new("a", Status::Pass).value("v", BigRational::new(7.into(), 3.into())));
        let r = s.finish().unwrap();
        let j = r.to_json();
        assert!(!j.contains("timing_ms"));
        assert_eq!(serde_json::from_str::<VerificationReport>(&j).unwrap(), r);
        assert_eq!(r.checks[0].values["v"], "7/3");
    }

    #[test]
    fn homology_of_a_circle() {
        assert_eq!(homology_lines(&circle(4).unwrap()).unwrap(), "H_0 = Z\nH_1 = Z\n");
    }

    #[test]
    fn bezout_witness_checks() {
        let (r, w) = bezout_record(5, 2, 2).unwrap();
        assert_eq!(r.values["abs_m"], "6");
        assert_eq!(check_witness(&w).unwrap().status, Status::Pass);
        let bad = Witness::Bezout { p: 5, q: 2, k: 2, n: -3, m: 19 };
        assert_eq!(check_witness(&bad).unwrap().status, Status::Fail);
    }
}
