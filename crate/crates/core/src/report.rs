//! Deterministic text reports for the command-line subcommands.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{
    branch_seifert_pair, classify_components, solve_multiplicities, DivisorDecomposition, DualGraph, GraphError,
};
use crate::ode::{FlowError, OdeOptions};
use crate::presentation::{
    abelianize, assemble_global, exponent_check, is_trefoil, presentation_aggregated, presentation_dead_branch,
    tietze_simplify, PresentationError, TietzeStep,
};
use crate::rabotage::{verify_bounds_sweep_with, RabotageError, SWEEP_SIZES};
use crate::resolution::{parse_curve, pullback_multiplicities, resolve_with, ResolutionError, ResolveOptions};
use crate::saddle::{
    col_passage_with, dulac_asymptotics_with, dulac_map_with, flow, holonomy_with, winding_bound, ExponentConvention, FieldKind,
    ModelKind, SaddleError, SaddleModel, DECADES,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Resolve { poly: String },
    /// A graph file path or an inline polynomial.
    Pi1 { input: String },
    Decompose { graph_file: PathBuf },
    SaddleVerify { model: String },
    RabotageSweep { model: String },
}

impl Command {
    fn echo(&self) -> String {
        match self {
            Command::Resolve { poly } => format!("resolve {poly}"),
            Command::Pi1 { input } => format!("pi1 {input}"),
            Command::Decompose { graph_file } => format!("decompose {}", graph_file.display()),
            Command::SaddleVerify { model } => format!("saddle verify {model}"),
            Command::RabotageSweep { model } => format!("rabotage sweep {model}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub max_blowups: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            tol_rel: 1e-10,
            tol_abs: 1e-13,
            max_blowups: crate::resolution::DEFAULT_MAX_BLOWUPS,
            samples: crate::star::DEFAULT_SAMPLES,
            seed: 0,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.tol_rel) || !pos(self.tol_abs) {
            return Err(Failure::Parse("tolerances must be positive".into()));
        }
        if self.samples < 16 {
            return Err(Failure::Parse("--samples must be at least 16".into()));
        }
        if self.max_blowups == 0 {
            return Err(Failure::Parse("--max-blowups must be positive".into()));
        }
        Ok(())
    }

    fn ode(&self) -> OdeOptions {
        OdeOptions { rtol: self.tol_rel, atol: self.tol_abs, ..OdeOptions::default() }
    }
}

/// A failure that stops the run, classified by exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    Assertion(String),
    Parse(String),
    Hypothesis(String),
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Hypothesis(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Assertion(m) | Failure::Parse(m) | Failure::Hypothesis(m) | Failure::Numeric(m) => m,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Assertion(_) => "internal",
            Failure::Parse(_) => "parse",
            Failure::Hypothesis(_) => "hypothesis",
            Failure::Numeric(_) => "numeric",
        }
    }
}

impl From<ResolutionError> for Failure {
    fn from(e: ResolutionError) -> Self {
        let m = e.to_string();
        match e {
            ResolutionError::Parse(_)
            | ResolutionError::Zero
            | ResolutionError::NotThroughOrigin(_)
            | ResolutionError::NotReduced(_) => Failure::Parse(m),
            ResolutionError::Irrational(_) | ResolutionError::IterationCap(_) => Failure::Hypothesis(m),
            ResolutionError::CenterNotOnDivisor { .. } | ResolutionError::ReplayMismatch(_) => Failure::Assertion(m),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Syntax { .. } => Failure::Parse(e.to_string()),
            _ => Failure::Hypothesis(e.to_string()),
        }
    }
}

impl From<PresentationError> for Failure {
    fn from(e: PresentationError) -> Self {
        match e {
            PresentationError::Syntax { .. } => Failure::Parse(e.to_string()),
            PresentationError::NonPositiveNu(_) => Failure::Hypothesis(e.to_string()),
            _ => Failure::Assertion(e.to_string()),
        }
    }
}

impl From<SaddleError> for Failure {
    fn from(e: SaddleError) -> Self {
        let m = e.to_string();
        match e {
            SaddleError::Spec(_) => Failure::Parse(m),
            SaddleError::Flow(FlowError::LeftDomain { .. }) => Failure::Hypothesis(m),
            SaddleError::InvalidModel(_)
            | SaddleError::OutOfRange(_)
            | SaddleError::OutOfSector { .. }
            | SaddleError::AxisProximity(_)
            | SaddleError::NotNormalForm => Failure::Hypothesis(m),
            SaddleError::Flow(_)
            | SaddleError::BranchMismatch(_)
            | SaddleError::NoHit
            | SaddleError::NonConvergentFit(_) => Failure::Numeric(m),
        }
    }
}

impl From<RabotageError> for Failure {
    fn from(e: RabotageError) -> Self {
        match e {
            RabotageError::Saddle(s) => s.into(),
            e if e.is_hypothesis() => Failure::Hypothesis(e.to_string()),
            e => Failure::Numeric(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub code: i32,
    pub report: String,
    pub checks: Vec<Check>,
    /// Companion files `(name, contents)`.
    pub files: Vec<(String, String)>,
    pub failure: Option<Failure>,
}

impl RunOutcome {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    /// Writes `report.txt` and the companion files into `dir`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.txt"), &self.report)?;
        for (name, body) in &self.files {
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Report {
    body: String,
    checks: Vec<Check>,
    files: Vec<(String, String)>,
}

impl Report {
    fn line(&mut self, s: impl AsRef<str>) {
        self.body.push_str(s.as_ref());
        self.body.push('\n');
    }

    fn block(&mut self, title: &str, text: &str) {
        self.line(format!("[{title}]"));
        self.body.push_str(text);
        if !text.ends_with('\n') {
            self.body.push('\n');
        }
    }

    fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.push(Check { name: name.into(), pass });
    }

    fn file(&mut self, name: &str, body: String) {
        self.files.push((name.into(), body));
    }
}

/// Runs one subcommand. The report text depends only on the config.
pub fn run(config: &RunConfig) -> RunOutcome {
    let mut rep = Report::default();
    let result = config.validate().and_then(|_| match &config.command {
        Command::Resolve { poly } => resolve_report(config, poly, &mut rep),
        Command::Pi1 { input } => pi1_report(config, input, &mut rep),
        Command::Decompose { graph_file } => decompose_report(graph_file, &mut rep),
        Command::SaddleVerify { model } => saddle_report(config, model, &mut rep),
        Command::RabotageSweep { model } => sweep_report(config, model, &mut rep),
    });
    let mut text = format!("folpi {VERSION}\n");
    text += &format!("command: {}\n", config.command.echo());
    text += &format!(
        "config: tol_rel={:e} tol_abs={:e} max_blowups={} samples={} seed={}\n",
        config.tol_rel, config.tol_abs, config.max_blowups, config.samples, config.seed
    );
    if !rep.body.is_empty() {
        text += "\n";
        text += &rep.body;
    }
    if !rep.checks.is_empty() {
        text += "\n";
    }
    for c in &rep.checks {
        text += &format!("{} {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name);
    }
    let failure = match result {
        Err(f) => Some(f),
        Ok(()) => rep
            .checks
            .iter()
            .find(|c| !c.pass)
            .map(|c| Failure::Assertion(format!("check failed: {}", c.name))),
    };
    let code = failure.as_ref().map_or(0, Failure::code);
    match &failure {
        Some(f) => text += &format!("\nerror ({}): {}\nexit {code}\n", f.kind(), f.message()),
        None => text += &format!("\nexit {code}\n"),
    }
    RunOutcome { code, report: text, checks: rep.checks, files: rep.files, failure }
}

fn map_line(m: &BTreeMap<usize, u64>) -> String {
    m.iter().map(|(k, v)| format!("E{k}={v}")).collect::<Vec<_>>().join(" ")
}

fn resolve_report(config: &RunConfig, poly: &str, rep: &mut Report) -> Result<(), Failure> {
    let germ = parse_curve(poly)?;
    let trace = resolve_with(&germ, ResolveOptions { max_blowups: config.max_blowups })?;
    let graph = graph_with_mult(&trace.graph, &trace.mult)?;
    rep.line(format!("blowups: {}", trace.events.len()));
    rep.line(format!("branches: {}", trace.branch_count()));
    rep.line(format!("multiplicities: {}", map_line(&trace.mult)));
    rep.block("events", &trace.event_log());
    rep.block("graph", &graph.to_text());
    rep.file("graph.txt", graph.to_text());
    rep.file("events.log", trace.event_log());
    let nc = trace.normal_crossings_certificate();
    if let Err(e) = &nc {
        rep.line(format!("normal crossings: {e}"));
    }
    rep.check("normal crossings at every terminal point", nc.is_ok());
    rep.check("intersection form negative definite", trace.graph.is_negative_definite());
    let replay = pullback_multiplicities(&trace)?;
    rep.check("replayed multiplicities equal traced multiplicities", replay == trace.mult);
    let solved = solve_multiplicities(&trace.graph)?;
    rep.check("intersection-matrix multiplicities equal traced multiplicities", solved == trace.mult);
    Ok(())
}

fn graph_with_mult(g: &DualGraph, mult: &BTreeMap<usize, u64>) -> Result<DualGraph, Failure> {
    if g.mult().is_some() || mult.is_empty() {
        return Ok(g.clone());
    }
    Ok(g.clone().with_mult(mult.clone())?)
}

/// Graph and multiplicities from a graph file or a polynomial.
fn load_graph(config: &RunConfig, input: &str, rep: &mut Report) -> Result<(DualGraph, BTreeMap<usize, u64>), Failure> {
    let path = Path::new(input);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{input}: {e}")))?;
        let g = DualGraph::from_text(&text)?;
        let solved = solve_multiplicities(&g)?;
        let mult = match g.mult() {
            Some(m) => {
                rep.check("file multiplicities equal intersection-matrix multiplicities", *m == solved);
                m.clone()
            }
            None => solved,
        };
        rep.line(format!("source: graph file {input}"));
        return Ok((g, mult));
    }
    let germ = parse_curve(input)?;
    let trace = resolve_with(&germ, ResolveOptions { max_blowups: config.max_blowups })?;
    rep.line(format!("source: polynomial, {} blow-ups", trace.events.len()));
    let replay = pullback_multiplicities(&trace)?;
    let solved = solve_multiplicities(&trace.graph)?;
    rep.check("replayed multiplicities equal intersection-matrix multiplicities", replay == solved);
    let g = graph_with_mult(&trace.graph, &trace.mult)?;
    Ok((g, trace.mult))
}

fn decomposition_lines(g: &DualGraph, dec: &DivisorDecomposition, rep: &mut Report) -> Result<(), Failure> {
    rep.block("decomposition", &dec.to_text());
    for d in &dec.dead_branches {
        let pair = branch_seifert_pair(g, d)?;
        let group = presentation_dead_branch(pair);
        let ab = abelianize(&group.presentation);
        let chain = d.chain.iter().map(|v| format!("E{v}")).collect::<Vec<_>>().join(" ");
        rep.line(format!(
            "dead branch [{chain}]: p={} q={} m={} n={} group {}",
            pair.p, pair.q, pair.m, pair.n, ab
        ));
        let law = pair.m as i128 * pair.p as i128 - pair.n as i128 * pair.q as i128 == 1;
        rep.check(format!("mp - nq = 1 on [{chain}]"), law);
        rep.check(format!("dead-branch group of [{chain}] is Z"), ab.rank == 1 && ab.torsion.is_empty());
    }
    Ok(())
}

fn pi1_report(config: &RunConfig, input: &str, rep: &mut Report) -> Result<(), Failure> {
    let (g, mult) = load_graph(config, input, rep)?;
    let branches = g.arrow_ids().len();
    rep.line(format!("branches: {branches}"));
    rep.line(format!("multiplicities: {}", map_line(&mult)));
    rep.block("graph", &g.to_text());
    let dec = classify_components(&g)?;
    decomposition_lines(&g, &dec, rep)?;
    for b in &dec.aggregated_blocks {
        let Some(nu) = g.self_intersection(b.center).map(|s| -s) else { continue };
        let mut plain = Vec::new();
        let mut dead = Vec::new();
        for v in g.neighbors(b.center) {
            match b.dead_branches.iter().find(|d| d.chain.last() == Some(&v)) {
                Some(d) => dead.push(branch_seifert_pair(&g, d)?),
                None => plain.push(v),
            }
        }
        let n = plain.len() + dead.len() - 1;
        let pairs: Vec<_> = dead.iter().enumerate().map(|(i, &p)| (plain.len() + i, p)).collect();
        if nu <= 0 {
            rep.line(format!("block E{}: nu = {nu}, no block presentation", b.center));
            continue;
        }
        let pb = presentation_aggregated(n, nu, &pairs)?;
        rep.line(format!("block E{}: n={n} nu={nu} group {}", b.center, abelianize(&pb)));
    }
    let global = assemble_global(&g, &dec, &mult)?;
    let p = &global.presentation;
    rep.block("presentation", &p.to_text());
    rep.file("presentation.txt", p.to_text());
    rep.file("relators.csv", p.matrix_csv());
    let ab = abelianize(p);
    rep.line(format!("generators: {}", p.generators.len()));
    rep.line(format!("relators: {}", p.relators.len()));
    rep.line(format!("abelianization: {ab}"));
    rep.check(format!("abelianization rank equals branch count {branches}"), ab.rank == branches);
    rep.check("abelianization torsion-free", ab.torsion.is_empty());
    let verdict = exponent_check(p, &global.weights);
    for (i, s) in &verdict.violations {
        rep.line(format!("exponent violation: relator {} sum {s}", i + 1));
    }
    rep.check("weighted exponent sums vanish", verdict.passes());
    let (simple, steps) = tietze_simplify(p);
    let mut log = String::new();
    for s in &steps {
        match s {
            TietzeStep::Eliminate { generator, definition } => writeln!(log, "eliminate {generator} = {definition}"),
            TietzeStep::Rewrite { from, to } => writeln!(log, "rewrite {from} -> {to}"),
            TietzeStep::DropTrivial(i) => writeln!(log, "drop relator {}", i + 1),
        }
        .expect("string write");
    }
    rep.block("tietze", &log);
    rep.block("simplified", &simple.to_text());
    rep.line(format!("trefoil: {}", is_trefoil(&simple)));
    rep.check("simplified abelianization unchanged", abelianize(&simple) == ab);
    Ok(())
}

fn decompose_report(path: &Path, rep: &mut Report) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let g = DualGraph::from_text(&text)?;
    let dec = classify_components(&g)?;
    rep.line(format!("components: {}", g.exceptional_ids().len()));
    rep.line(format!("arrows: {}", g.arrow_ids().len()));
    decomposition_lines(&g, &dec, rep)?;
    rep.file("decomposition.txt", dec.to_text());
    rep.check("intersection form negative definite", g.is_negative_definite());
    Ok(())
}

/// Radii of the col-passage sweep, decreasing.
pub const COL_RADII: [f64; 6] = [5e-2, 1e-2, 5e-3, 1e-3, 5e-4, 1e-4];

fn saddle_report(config: &RunConfig, spec: &str, rep: &mut Report) -> Result<(), Failure> {
    let model = SaddleModel::parse(spec)?;
    let opts = config.ode();
    let lam = model.lambda();
    rep.line(format!("model: {}", model.to_spec()));
    rep.line(format!("lambda: {lam:.12}"));
    rep.line(format!("eps3: {} eps4: {}", model.eps3, model.eps4));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut starts: Vec<C> = [1e-3, 1e-2, model.eps3 * 0.9]
        .iter()
        .flat_map(|&r| (0..4).map(move |j| C::from_polar(r, j as f64 * PI / 2.0 + 0.25)))
        .collect();
    for _ in 0..8 {
        let r = model.eps3 * rng.gen_range(0.01..0.9_f64);
        starts.push(C::from_polar(r, rng.gen_range(0.0..2.0 * PI)));
    }
    let rot = C::from_polar(1.0, -2.0 * PI * lam);
    let mut dev: f64 = 0.0;
    let mut holo = String::from("re_y0,im_y0,re_h,im_h,dev_linear\n");
    for &y0 in &starts {
        let h = holonomy_with(&model, y0, &opts)?;
        let d = (h - y0 * rot).norm();
        dev = dev.max(d);
        writeln!(holo, "{:.15e},{:.15e},{:.15e},{:.15e},{:.3e}", y0.re, y0.im, h.re, h.im, d).expect("string write");
    }
    rep.file("holonomy.csv", holo);
    rep.line(format!("holonomy: {} starts, max |h(y) - e^(-2pi i lambda) y| = {dev:.3e}", starts.len()));
    if model.kind() == &ModelKind::Linear {
        rep.check("linear holonomy matches the rotation within 1e-9", dev < 1e-9);
    }

    let w = winding_bound(&model, &[1e-3, 1e-2, model.eps3 * 0.9])?;
    rep.line(format!("winding: vartheta = {:.6} bound = {:.6}", w.vartheta, w.bound));
    rep.check("boundary image winding within 2pi(lambda+1)", w.ok);

    let mut col = String::from("abs_x,tau,arg_drift,dist_to_circle\n");
    let mut drift: f64 = 0.0;
    let mut dists = Vec::new();
    for &r in &COL_RADII {
        if r > model.eps4 {
            continue;
        }
        let cp = col_passage_with(&model, C::new(r, 0.0), 0.3, &opts)?;
        drift = drift.max(cp.arg_drift);
        dists.push(cp.y.norm());
        writeln!(col, "{r:e},{:.12},{:.3e},{:.15e}", cp.tau, cp.arg_drift, cp.y.norm()).expect("string write");
    }
    rep.file("col_passage.csv", col);
    rep.line(format!("col passage: {} radii, max arg drift {drift:.3e}", dists.len()));
    if model.kind() == &ModelKind::Linear {
        rep.check("col passage preserves arg y within 1e-9", drift < 1e-9);
    }
    rep.check(
        "col passage exit approaches the circle monotonically",
        dists.len() >= 2 && dists.windows(2).all(|w| w[1] < w[0]),
    );

    let theta = 0.5;
    let mut agreement: Option<f64> = None;
    for &r in &DECADES {
        if let Some(a) = dulac_map_with(&model, r, theta, 0.0, &opts)?.agreement {
            agreement = Some(agreement.map_or(a, |b| b.max(a)));
        }
    }
    if let Some(a) = agreement {
        rep.line(format!("dulac: method agreement {a:.3e}"));
        rep.check("Dulac flow and first-integral methods agree within 1e-7", a < 1e-7);
    }
    match dulac_asymptotics_with(&model, theta, 0.0, &DECADES, &opts) {
        Ok(da) => {
            rep.file("dulac.csv", da.to_csv());
            rep.line(format!("dulac: kappa = {:.9} residual = {:.3e}", da.kappa, da.residual));
            rep.line(format!("dulac: limit y D'/D = {:.9}{:+.9}i", da.limit.re, da.limit.im));
            rep.line(format!("dulac: exponent convention {}", da.convention));
            rep.check("Dulac exponent matches lambda or 1/lambda", da.convention != ExponentConvention::Neither);
        }
        Err(SaddleError::NonConvergentFit(res)) if model.kind() != &ModelKind::Linear => {
            rep.line(format!("dulac: no pure power law over the sweep (fit residual {res:.3e})"));
        }
        Err(e) => return Err(e.into()),
    }

    if model.has_first_integral() {
        let y0 = C::from_polar(model.eps3 * 0.5, 0.25);
        let path = [C::new(0.0, 0.0), C::new(0.0, 2.0 * PI)];
        let tr = flow(&model, (C::new(1.0, 0.0), y0), FieldKind::X, &path, &opts)?;
        let d = tr.first_integral_drift.unwrap_or(f64::INFINITY);
        rep.file("trajectory.csv", tr.to_csv(&model));
        rep.line(format!("first integral drift along the holonomy loop: {d:.3e}"));
        rep.check("first integral conserved within 1e-8", d < 1e-8);
    }
    Ok(())
}

fn sweep_report(config: &RunConfig, spec: &str, rep: &mut Report) -> Result<(), Failure> {
    let model = SaddleModel::parse(spec)?;
    rep.line(format!("model: {}", model.to_spec()));
    let report = verify_bounds_sweep_with(&model, &SWEEP_SIZES, config.samples);
    rep.file("sweep.csv", report.to_csv());
    rep.line(format!("lambda: {:.12}", report.lambda));
    rep.line("size,e_delta,q,nondegenerate,size_prime,e_prime,loss,closure");
    for r in &report.rows {
        rep.line(format!(
            "{:.6e},{:.9},{},{},{:.9e},{:.9},{:.3e},{:.3e}",
            r.size, r.e_delta, r.q, r.nondegenerate, r.size_prime, r.e_prime, r.loss, r.closure
        ));
    }
    if let Some(a) = &report.aborted {
        rep.line(format!("aborted at size {:e}: {}", a.size, a.message));
        let m = format!("sweep aborted at size {:e}: {}", a.size, a.message);
        return Err(if a.hypothesis { Failure::Hypothesis(m) } else { Failure::Numeric(m) });
    }
    if let (Some(s), Some(r)) = (report.slope, report.fit_residual) {
        rep.line(format!("slope: {s:.9} residual {r:.3e}"));
    }
    let convention = report.convention.map_or("none".to_string(), |c| c.to_string());
    rep.line(format!("exponent convention: {convention}"));
    rep.check("rugosity loss non-increasing as the size shrinks", report.loss_decreasing);
    rep.check("size exponent matches lambda or 1/lambda", matches!(report.convention, Some(c) if c != ExponentConvention::Neither));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_report() {
        let out = run(&RunConfig::new(Command::Pi1 { input: "y^2-x^3".into() }));
        assert_eq!(out.code, 0, "{}", out.report);
        assert!(out.report.contains("abelianization: Z\n"));
        assert!(out.report.contains("generators: 4\n"));
        assert!(out.report.contains("trefoil: true"));
        assert!(out.file("relators.csv").is_some());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&RunConfig::new(Command::Pi1 { input: "y^2".into() })).code, 2);
        assert_eq!(run(&RunConfig::new(Command::Resolve { poly: "y^2 +".into() })).code, 2);
        assert_eq!(run(&RunConfig::new(Command::SaddleVerify { model: "bogus".into() })).code, 2);
        let mut c = RunConfig::new(Command::Resolve { poly: "y^2-x^3".into() });
        c.max_blowups = 1;
        assert_eq!(run(&c).code, 3);
        c.tol_rel = -1.0;
        assert_eq!(run(&c).code, 2);
    }

    #[test]
    fn resolve_xy_is_one_vertex() {
        let out = run(&RunConfig::new(Command::Resolve { poly: "x*y".into() }));
        assert_eq!(out.code, 0, "{}", out.report);
        let g = DualGraph::from_text(out.file("graph.txt").unwrap()).unwrap();
        assert_eq!(g.exceptional_ids().len(), 1);
        assert_eq!(g.mult().unwrap()[&1], 2);
    }

    #[test]
    fn reports_are_reproducible() {
        let c = RunConfig::new(Command::SaddleVerify { model: "linear:1".into() });
        let a = run(&c);
        assert_eq!(a.code, 0, "{}", a.report);
        assert_eq!(a, run(&c));
    }
}
