//! Resonant saddle models, their flows, holonomy, col passage and Dulac maps.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::ode::{integrate, Field, FlowError, OdeOptions, Sample, State, Stats};
use crate::parse::{parse_poly, parse_rational, parse_real};
use crate::poly::q_to_f64;

pub const DEFAULT_EPS3: f64 = 0.1;
pub const DEFAULT_EPS4: f64 = 0.05;
const DOMAIN_SLACK: f64 = 1e-6;
const SINGULAR_G: f64 = 1e-6;
const AXIS_PROXIMITY: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SaddleError {
    #[error("flow: {0}")]
    Flow(#[from] FlowError),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model spec: {0}")]
    Spec(String),
    #[error("input out of range: {0}")]
    OutOfRange(String),
    #[error("lifted argument {theta} outside [{lo}, {hi}]")]
    OutOfSector { theta: f64, lo: f64, hi: f64 },
    #[error("point too close to the axes (|u| = {0:.3e})")]
    AxisProximity(f64),
    #[error("operation needs a normal-form model")]
    NotNormalForm,
    #[error("Dulac methods disagree (relative difference {0:.3e})")]
    BranchMismatch(f64),
    #[error("no hit of |x| = 1 before the time horizon")]
    NoHit,
    #[error("exponent fit residual {0:.3e} above threshold")]
    NonConvergentFit(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Linear,
    /// `A(x, y)` as (exponents, coefficient) terms.
    DulacForm { a: Vec<((u32, u32), C)> },
    NormalForm { k: u32, alpha: C },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleModel {
    p0: u64,
    q0: u64,
    kind: ModelKind,
    pub eps3: f64,
    pub eps4: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    X,
    Y,
}

impl SaddleModel {
    fn build(p0: u64, q0: u64, kind: ModelKind) -> Result<Self, SaddleError> {
        if p0 == 0 || q0 == 0 {
            return Err(SaddleError::InvalidModel("lambda must be positive".into()));
        }
        if p0.gcd(&q0) != 1 {
            return Err(SaddleError::InvalidModel(format!("{p0}/{q0} is not reduced")));
        }
        Ok(SaddleModel { p0, q0, kind, eps3: DEFAULT_EPS3, eps4: DEFAULT_EPS4 })
    }

    pub fn linear(p0: u64, q0: u64) -> Result<Self, SaddleError> {
        Self::build(p0, q0, ModelKind::Linear)
    }

    pub fn dulac_form(p0: u64, q0: u64, a: Vec<((u32, u32), C)>) -> Result<Self, SaddleError> {
        let a: Vec<_> = a.into_iter().filter(|(_, c)| *c != C::new(0.0, 0.0)).collect();
        Self::build(p0, q0, ModelKind::DulacForm { a })
    }

    pub fn normal_form(p0: u64, q0: u64, k: u32, alpha: C) -> Result<Self, SaddleError> {
        if k == 0 {
            return Err(SaddleError::InvalidModel("k must be positive".into()));
        }
        Self::build(p0, q0, ModelKind::NormalForm { k, alpha })
    }

    pub fn with_eps(mut self, eps3: f64, eps4: f64) -> Self {
        self.eps3 = eps3;
        self.eps4 = eps4;
        self
    }

    /// Parses `linear:p/q`, `dulac:p/q:<A>` or `normal:p/q:k=<k>:alpha=<re>[,<im>]`.
    pub fn parse(spec: &str) -> Result<Self, SaddleError> {
        let bad = |m: &str| SaddleError::Spec(format!("{m} in '{spec}'"));
        let mut parts = spec.trim().splitn(3, ':');
        let kind = parts.next().unwrap_or("");
        let lam = parts.next().ok_or_else(|| bad("missing lambda"))?;
        let rest = parts.next();
        let lam = parse_rational(lam).map_err(|e| bad(&e.to_string()))?;
        if !lam.is_positive() {
            return Err(bad("lambda must be positive"));
        }
        let p0 = lam.numer().to_u64().ok_or_else(|| bad("lambda too large"))?;
        let q0 = lam.denom().to_u64().ok_or_else(|| bad("lambda too large"))?;
        match kind {
            "linear" => {
                if rest.is_some() {
                    return Err(bad("unexpected suffix"));
                }
                Self::linear(p0, q0)
            }
            "dulac" => {
                let a = parse_poly(rest.ok_or_else(|| bad("missing A"))?).map_err(|e| bad(&e.to_string()))?;
                let terms = a.terms().map(|(&e, c)| (e, C::new(q_to_f64(c), 0.0))).collect();
                Self::dulac_form(p0, q0, terms)
            }
            "normal" => {
                let rest = rest.ok_or_else(|| bad("missing k and alpha"))?;
                let (kp, ap) = rest.split_once(':').ok_or_else(|| bad("expected k=<k>:alpha=<a>"))?;
                let k: u32 = kp
                    .strip_prefix("k=")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("bad k"))?;
                let a = ap.strip_prefix("alpha=").ok_or_else(|| bad("bad alpha"))?;
                let (re, im) = match a.split_once(',') {
                    Some((r, i)) => (r, Some(i)),
                    None => (a, None),
                };
                let re = parse_real(re).map_err(|e| bad(&e.to_string()))?;
                let im = match im {
                    Some(i) => parse_real(i).map_err(|e| bad(&e.to_string()))?,
                    None => 0.0,
                };
                Self::normal_form(p0, q0, k, C::new(re, im))
            }
            _ => Err(bad("unknown model kind")),
        }
    }

    pub fn p0(&self) -> u64 {
        self.p0
    }

    pub fn q0(&self) -> u64 {
        self.q0
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.p0 as f64 / self.q0 as f64
    }

    fn u(&self, x: C, y: C) -> C {
        x.powu(self.p0 as u32) * y.powu(self.q0 as u32)
    }

    /// `g` with `X = x∂x − y g ∂y`.
    pub fn g(&self, x: C, y: C) -> C {
        let lam = C::new(self.lambda(), 0.0);
        match &self.kind {
            ModelKind::Linear => lam,
            ModelKind::DulacForm { a } => {
                let av: C = a.iter().map(|&((i, j), c)| c * x.powu(i) * y.powu(j)).sum();
                lam + x * y * av
            }
            ModelKind::NormalForm { k, alpha } => {
                let uk = self.u(x, y).powu(*k);
                lam * (1.0 + (alpha - 1.0) * uk) / (1.0 + alpha * uk)
            }
        }
    }

    /// Bezout exponents `(m, n)` with `m·p0 − n·q0 = 1`, `0 ≤ n < p0`.
    pub fn bezout(&self) -> (u64, u64) {
        let (p, q) = (self.p0 as i128, self.q0 as i128);
        let ext = q.extended_gcd(&p);
        let n = (-ext.x).rem_euclid(p);
        let m = (1 + n * q) / p;
        (m as u64, n as u64)
    }

    pub fn has_first_integral(&self) -> bool {
        !matches!(self.kind, ModelKind::DulacForm { .. })
    }

    /// `log H` at lifted logarithms `(lx, ly)`; `None` for Dulac-form models.
    pub fn log_first_integral(&self, lx: C, ly: C) -> Option<C> {
        let (p, q) = (self.p0 as f64, self.q0 as f64);
        match &self.kind {
            ModelKind::Linear => Some(p * lx + q * ly),
            ModelKind::DulacForm { .. } => None,
            ModelKind::NormalForm { k, alpha } => {
                let (m, n) = self.bezout();
                let l = p * lx + q * ly;
                let beta = (alpha - m as f64 * p) / (p * q);
                let kf = *k as f64;
                Some(n as f64 * lx + m as f64 * ly + beta * l - (-kf * l).exp() / (kf * p * q))
            }
        }
    }

    /// Partial derivatives of `log H` in `lx` and `ly`.
    fn log_first_integral_grad(&self, lx: C, ly: C) -> Option<(C, C)> {
        let (p, q) = (self.p0 as f64, self.q0 as f64);
        match &self.kind {
            ModelKind::Linear => Some((C::new(p, 0.0), C::new(q, 0.0))),
            ModelKind::DulacForm { .. } => None,
            ModelKind::NormalForm { k, alpha } => {
                let (m, n) = self.bezout();
                let l = p * lx + q * ly;
                let beta = (alpha - m as f64 * p) / (p * q);
                let e = (-(*k as f64) * l).exp();
                Some((n as f64 + beta * p + e / q, m as f64 + beta * q + e / p))
            }
        }
    }

    /// Model back in spec syntax.
    pub fn to_spec(&self) -> String {
        let lam = format!("{}/{}", self.p0, self.q0);
        match &self.kind {
            ModelKind::Linear => format!("linear:{lam}"),
            ModelKind::DulacForm { a } => {
                let terms: Vec<String> = a
                    .iter()
                    .map(|&((i, j), c)| {
                        let mut s = format!("({})", c.re);
                        if i > 0 {
                            s += &format!("*x^{i}");
                        }
                        if j > 0 {
                            s += &format!("*y^{j}");
                        }
                        s
                    })
                    .collect();
                let a = if terms.is_empty() { "0".to_string() } else { terms.join("+") };
                format!("dulac:{lam}:{a}")
            }
            ModelKind::NormalForm { k, alpha } => {
                if alpha.im == 0.0 {
                    format!("normal:{lam}:k={k}:alpha={}", alpha.re)
                } else {
                    format!("normal:{lam}:k={k}:alpha={},{}", alpha.re, alpha.im)
                }
            }
        }
    }
}

impl fmt::Display for SaddleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_spec())
    }
}

struct ModelField<'a> {
    model: &'a SaddleModel,
    kind: FieldKind,
    radius: f64,
}

impl Field for ModelField<'_> {
    fn eval(&self, z: &State) -> Result<State, FlowError> {
        let [x, y] = *z;
        let g = self.model.g(x, y);
        match self.kind {
            FieldKind::X => Ok([x, -y * g]),
            FieldKind::Y => {
                if g.norm() < SINGULAR_G {
                    return Err(FlowError::SingularField { t: C::new(f64::NAN, f64::NAN), g: g.norm() });
                }
                Ok([x / g, -y])
            }
        }
    }

    fn guard(&self, t: C, z: &State) -> Result<(), FlowError> {
        let (ax, ay) = (z[0].norm(), z[1].norm());
        if ax > self.radius || ay > self.radius {
            return Err(FlowError::LeftDomain { t, ax, ay });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub t: C,
    pub x: C,
    pub y: C,
    /// Logarithms continued along the trajectory from principal values at the start.
    pub lx: C,
    pub ly: C,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectoryPoint>,
    pub stats: Stats,
    /// Largest `|H(t)/H(0) − 1|` when the model has a first integral.
    pub first_integral_drift: Option<f64>,
}

impl Trajectory {
    pub fn end(&self) -> &TrajectoryPoint {
        self.samples.last().expect("trajectory has a start sample")
    }

    /// CSV with columns `t,re_x,im_x,re_y,im_y,abs_h`; `t` is arclength along the time path.
    pub fn to_csv(&self, model: &SaddleModel) -> String {
        let mut out = String::from("t,re_x,im_x,re_y,im_y,abs_h\n");
        let mut s = 0.0;
        let mut prev = self.samples.first().map(|p| p.t);
        for p in &self.samples {
            if let Some(t0) = prev {
                s += (p.t - t0).norm();
            }
            prev = Some(p.t);
            let h = model
                .log_first_integral(p.lx, p.ly)
                .map(|l| format!("{:.12e}", l.re.exp()))
                .unwrap_or_default();
            out += &format!(
                "{:.12e},{:.15e},{:.15e},{:.15e},{:.15e},{}\n",
                s, p.x.re, p.x.im, p.y.re, p.y.im, h
            );
        }
        out
    }
}

fn unwrap_step(prev_log: C, prev: C, next: C) -> C {
    prev_log + (next / prev).ln()
}

fn lift(samples: &[Sample]) -> Vec<TrajectoryPoint> {
    let mut out: Vec<TrajectoryPoint> = Vec::with_capacity(samples.len());
    for s in samples {
        let [x, y] = s.z;
        let (lx, ly) = match out.last() {
            None => (x.ln(), y.ln()),
            Some(p) => (unwrap_step(p.lx, p.x, x), unwrap_step(p.ly, p.y, y)),
        };
        out.push(TrajectoryPoint { t: s.t, x, y, lx, ly });
    }
    out
}

fn flow_opts(opts: &OdeOptions) -> OdeOptions {
    OdeOptions { record: true, ..*opts }
}

/// Integrates `X` or `Y` from `start` along the complex-time polyline `path`.
pub fn flow(
    model: &SaddleModel,
    start: (C, C),
    field: FieldKind,
    path: &[C],
    opts: &OdeOptions,
) -> Result<Trajectory, SaddleError> {
    flow_with_event(model, start, field, path, opts, None).map(|(t, _)| t)
}

fn flow_with_event(
    model: &SaddleModel,
    start: (C, C),
    field: FieldKind,
    path: &[C],
    opts: &OdeOptions,
    event: Option<&dyn Fn(&State) -> f64>,
) -> Result<(Trajectory, bool), SaddleError> {
    let radius = 1.0 + DOMAIN_SLACK;
    if start.0.norm() > radius || start.1.norm() > radius {
        return Err(SaddleError::OutOfRange("start outside the unit bidisc".into()));
    }
    if path.is_empty() {
        return Err(SaddleError::OutOfRange("empty time path".into()));
    }
    let f = ModelField { model, kind: field, radius };
    let out = integrate(&f, [start.0, start.1], path, &flow_opts(opts), event)?;
    let samples = lift(&out.samples);
    let first_integral_drift = if model.has_first_integral() && start.0 != C::new(0.0, 0.0) && start.1 != C::new(0.0, 0.0)
    {
        let l0 = model.log_first_integral(samples[0].lx, samples[0].ly).expect("integral exists");
        Some(
            samples
                .iter()
                .map(|p| (model.log_first_integral(p.lx, p.ly).expect("integral exists") - l0).exp() - 1.0)
                .map(|d| d.norm())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };
    Ok((Trajectory { samples, stats: out.stats, first_integral_drift }, out.event_hit))
}

/// Holonomy `h(y0)`: `y` after flowing `X` from `(1, y0)` over `i·[0, 2π]`.
pub fn holonomy(model: &SaddleModel, y0: C) -> Result<C, SaddleError> {
    holonomy_with(model, y0, &OdeOptions::default())
}

pub fn holonomy_with(model: &SaddleModel, y0: C, opts: &OdeOptions) -> Result<C, SaddleError> {
    if y0.norm() > model.eps3 {
        return Err(SaddleError::OutOfRange(format!("|y0| = {} exceeds eps3 = {}", y0.norm(), model.eps3)));
    }
    let f = ModelField { model, kind: FieldKind::X, radius: 1.0 + DOMAIN_SLACK };
    let path = [C::new(0.0, 0.0), C::new(0.0, 2.0 * PI)];
    let out = integrate(&f, [C::new(1.0, 0.0), y0], &path, opts, None)?;
    Ok(out.end.z[1])
}

/// Total variation of `arg y` along the holonomy loop from `(1, y0)`.
pub fn holonomy_winding(model: &SaddleModel, y0: C) -> Result<f64, SaddleError> {
    let path = [C::new(0.0, 0.0), C::new(0.0, 2.0 * PI)];
    let tr = flow(model, (C::new(1.0, 0.0), y0), FieldKind::X, &path, &OdeOptions::default())?;
    Ok(tr.samples.windows(2).map(|w| (w[1].ly.im - w[0].ly.im).abs()).sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindingReport {
    pub lambda: f64,
    /// Largest angular length `2π·⌈winding/2π⌉` over the sweep.
    pub vartheta: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Checks that boundary images wrap at most `2π(λ+1)` (plus 0.1) over a sweep of `|y0|`.
pub fn winding_bound(model: &SaddleModel, moduli: &[f64]) -> Result<WindingReport, SaddleError> {
    let mut vartheta: f64 = 0.0;
    for &r in moduli {
        for j in 0..8 {
            let y0 = C::from_polar(r, j as f64 * PI / 4.0);
            let w = holonomy_winding(model, y0)?;
            vartheta = vartheta.max(2.0 * PI * (w / (2.0 * PI) - 1e-9).ceil());
        }
    }
    let bound = 2.0 * PI * (model.lambda() + 1.0) + 0.1;
    Ok(WindingReport { lambda: model.lambda(), vartheta, bound, ok: vartheta <= bound })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColPassage {
    pub x: C,
    pub y: C,
    pub tau: f64,
    /// `|arg y_out − arg y_in|`.
    pub arg_drift: f64,
}

/// Col passage `Ψ(x, e^{iθ})`: flow `Y` in real time until `|x| = 1`.
pub fn col_passage(model: &SaddleModel, x: C, theta: f64) -> Result<ColPassage, SaddleError> {
    col_passage_with(model, x, theta, &OdeOptions::default())
}

pub fn col_passage_with(model: &SaddleModel, x: C, theta: f64, opts: &OdeOptions) -> Result<ColPassage, SaddleError> {
    let ax = x.norm();
    let y = C::from_polar(1.0, theta);
    if ax == 1.0 {
        return Ok(ColPassage { x, y, tau: 0.0, arg_drift: 0.0 });
    }
    if ax == 0.0 || ax > model.eps4 {
        return Err(SaddleError::OutOfRange(format!("|x| = {ax} not in (0, eps4 = {}]", model.eps4)));
    }
    let horizon = 4.0 * model.lambda().max(1.0) * (-ax.ln()) + 10.0;
    let path = [C::new(0.0, 0.0), C::new(horizon, 0.0)];
    let ev = |z: &State| z[0].norm().ln();
    let folds = (ax.ln().abs() * model.lambda().max(1.0)).max(1.0);
    let opts = OdeOptions { rtol: opts.rtol / folds, atol: opts.atol / folds, ..*opts };
    let (tr, hit) = flow_with_event(model, (x, y), FieldKind::Y, &path, &opts, Some(&ev))?;
    if !hit {
        return Err(SaddleError::NoHit);
    }
    let e = tr.end();
    Ok(ColPassage { x: e.x, y: e.y, tau: e.t.re, arg_drift: (e.ly.im - theta).abs() })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DulacValue {
    /// Image by the composite flow.
    pub x: C,
    /// Logarithm of `x` continued along the flow.
    pub log_x: C,
    /// Image by the first-integral equation, when the model has one.
    pub x_integral: Option<C>,
    /// Relative difference between both methods.
    pub agreement: Option<f64>,
}

/// Dulac map from `(1, r·e^{iθ})` (lifted `θ`) to the slice `{y = e^{iθ_j}}`.
///
/// The flow method runs `Y` in real time to `|y| = 1`, then in imaginary time
/// along the circle down to `arg y = θ_j`; the integral method solves
/// `H(1, y) = H(x, e^{iθ_j})` by Newton iteration from the leaf of the linear part.
pub fn dulac_map(model: &SaddleModel, r: f64, theta: f64, theta_j: f64) -> Result<DulacValue, SaddleError> {
    dulac_map_with(model, r, theta, theta_j, &OdeOptions::default())
}

pub fn dulac_map_with(
    model: &SaddleModel,
    r: f64,
    theta: f64,
    theta_j: f64,
    opts: &OdeOptions,
) -> Result<DulacValue, SaddleError> {
    if !(r > 0.0 && r <= model.eps4) && r != 1.0 {
        return Err(SaddleError::OutOfRange(format!("|y| = {r} not in (0, eps4 = {}]", model.eps4)));
    }
    let hi = theta_j + 2.0 * PI * (model.lambda() + 1.0);
    if theta < theta_j || theta > hi {
        return Err(SaddleError::OutOfSector { theta, lo: theta_j, hi });
    }
    let delta = theta - theta_j;
    let t1 = C::new(r.ln(), 0.0);
    let path = [C::new(0.0, 0.0), t1, t1 + C::new(0.0, delta)];
    let y0 = C::from_polar(r, theta);
    // Global error grows with the number of e-folds crossed by the passage.
    let folds = (r.ln().abs() / model.lambda().min(1.0)).max(1.0);
    let opts = OdeOptions { rtol: opts.rtol / folds, atol: opts.atol / folds, ..*opts };
    let tr = flow(model, (C::new(1.0, 0.0), y0), FieldKind::Y, &path, &opts)?;
    let end = tr.end();
    let log_x = end.lx;
    let x = end.x;
    let ly_start = C::new(r.ln(), theta);
    let x_integral = solve_integral(model, ly_start, theta_j)?.map(|lx| lx.exp());
    let agreement = x_integral.map(|xi| (xi - x).norm() / xi.norm().max(1e-300));
    if let Some(a) = agreement {
        if a > 1e-7 {
            return Err(SaddleError::BranchMismatch(a));
        }
    }
    Ok(DulacValue { x, log_x, x_integral, agreement })
}

/// Newton on `log H(lx, iθ_j) = log H(0, ly_start)`, started on the linear leaf.
fn solve_integral(model: &SaddleModel, ly_start: C, theta_j: f64) -> Result<Option<C>, SaddleError> {
    let Some(target) = model.log_first_integral(C::new(0.0, 0.0), ly_start) else {
        return Ok(None);
    };
    let ly_end = C::new(0.0, theta_j);
    let (p, q) = (model.p0 as f64, model.q0 as f64);
    let mut lx = (ly_start - ly_end) * (q / p);
    for _ in 0..200 {
        let f = model.log_first_integral(lx, ly_end).expect("integral exists") - target;
        let (d, _) = model.log_first_integral_grad(lx, ly_end).expect("integral exists");
        let step = f / d;
        lx -= step;
        if !lx.re.is_finite() || !lx.im.is_finite() {
            return Err(SaddleError::BranchMismatch(f64::INFINITY));
        }
        if step.norm() <= 1e-15 * (1.0 + lx.norm()) {
            break;
        }
    }
    Ok(Some(lx))
}

/// `y·D′(y)/D(y)` from the first integral, when there is one.
pub fn dulac_log_derivative_exact(model: &SaddleModel, ly_start: C, log_x: C, theta_j: f64) -> Option<C> {
    let (_, gs) = model.log_first_integral_grad(C::new(0.0, 0.0), ly_start)?;
    let (ge, _) = model.log_first_integral_grad(log_x, C::new(0.0, theta_j))?;
    Some(gs / ge)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentConvention {
    Lambda,
    InverseLambda,
    Both,
    Neither,
}

impl ExponentConvention {
    /// Which of `λ`, `1/λ` the exponent matches within `tol`.
    pub fn classify(exponent: f64, lambda: f64, tol: f64) -> Self {
        let near_l = (exponent - lambda).abs() < tol;
        let near_inv = (exponent - 1.0 / lambda).abs() < tol;
        match (near_l, near_inv) {
            (true, true) => ExponentConvention::Both,
            (true, false) => ExponentConvention::Lambda,
            (false, true) => ExponentConvention::InverseLambda,
            (false, false) => ExponentConvention::Neither,
        }
    }
}

impl fmt::Display for ExponentConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExponentConvention::Lambda => "lambda",
            ExponentConvention::InverseLambda => "1/lambda",
            ExponentConvention::Both => "lambda=1/lambda",
            ExponentConvention::Neither => "neither",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DulacSweepRow {
    pub r: f64,
    pub x: C,
    /// Finite-difference `y·D′/D`.
    pub log_derivative: C,
    /// Local slope of `log|D|` between this radius and the previous one.
    pub kappa_local: f64,
    /// Residual of this point against the fitted line.
    pub residual: f64,
    /// `|e^{iθ_j}·D(y) / y^κ|`.
    pub ratio_modulus: f64,
    pub agreement: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DulacAsymptotics {
    pub lambda: f64,
    pub kappa: f64,
    pub residual: f64,
    pub rows: Vec<DulacSweepRow>,
    /// `y·D′/D` at the smallest radius.
    pub limit: C,
    pub convention: ExponentConvention,
}

impl DulacAsymptotics {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,kappa,residual,re_log_derivative,im_log_derivative,ratio_modulus\n");
        for row in &self.rows {
            out += &format!(
                "{:e},{:.12},{:.3e},{:.12},{:.12},{:.12}\n",
                row.r, row.kappa_local, row.residual, row.log_derivative.re, row.log_derivative.im, row.ratio_modulus
            );
        }
        out
    }
}

pub const DECADES: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Fits `log|D| ≈ κ·log r + c` along the ray `arg y = θ` and estimates the limit of `y·D′/D`.
pub fn dulac_asymptotics(
    model: &SaddleModel,
    theta: f64,
    theta_j: f64,
    radii: &[f64],
) -> Result<DulacAsymptotics, SaddleError> {
    dulac_asymptotics_with(model, theta, theta_j, radii, &OdeOptions::default())
}

pub fn dulac_asymptotics_with(
    model: &SaddleModel,
    theta: f64,
    theta_j: f64,
    radii: &[f64],
    opts: &OdeOptions,
) -> Result<DulacAsymptotics, SaddleError> {
    if radii.len() < 2 {
        return Err(SaddleError::OutOfRange("need at least two radii".into()));
    }
    let h = 1e-4_f64;
    let mut pts = Vec::new();
    for &r in radii {
        let d = dulac_map_with(model, r, theta, theta_j, opts)?;
        let dn = dulac_map_with(model, r * (-h).exp(), theta, theta_j, opts)?;
        let ld = if r * h.exp() <= model.eps4 {
            let up = dulac_map_with(model, r * h.exp(), theta, theta_j, opts)?;
            (up.log_x - dn.log_x) / (2.0 * h)
        } else {
            (d.log_x - dn.log_x) / h
        };
        pts.push((r, d, ld));
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|(r, _, _)| r.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, d, _)| d.log_x.re).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
    let kappa = sxy / sxx;
    let c = my - kappa * mx;
    let res: Vec<f64> = xs.iter().zip(&ys).map(|(a, b)| b - (kappa * a + c)).collect();
    let residual = (res.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    if residual > 1e-2 {
        return Err(SaddleError::NonConvergentFit(residual));
    }
    let mut rows = Vec::new();
    for (i, (r, d, ld)) in pts.iter().enumerate() {
        let kappa_local = if i == 0 { kappa } else { (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]) };
        let yk = (kappa * C::new(r.ln(), theta)).exp();
        let ratio = C::from_polar(1.0, theta_j) * d.x / yk;
        rows.push(DulacSweepRow {
            r: *r,
            x: d.x,
            log_derivative: *ld,
            kappa_local,
            residual: res[i],
            ratio_modulus: ratio.norm(),
            agreement: d.agreement,
        });
    }
    let limit = rows.last().map(|r| r.log_derivative).unwrap_or_default();
    let lam = model.lambda();
    let convention = ExponentConvention::classify(kappa, lam, 1e-2);
    Ok(DulacAsymptotics { lambda: lam, kappa, residual, rows, limit, convention })
}

/// `H(x, y)` with principal logarithms; `branch` shifts `log u` by `2πi·branch`
/// in the multivalued power.
pub fn first_integral(model: &SaddleModel, x: C, y: C, branch: i64) -> Result<C, SaddleError> {
    let ModelKind::NormalForm { alpha, .. } = model.kind else {
        return Err(SaddleError::NotNormalForm);
    };
    let u = model.u(x, y);
    if u.norm() < AXIS_PROXIMITY {
        return Err(SaddleError::AxisProximity(u.norm()));
    }
    // Only the power of u sees the shift; the exponential is single-valued.
    let (m, _) = model.bezout();
    let (p, q) = (model.p0 as f64, model.q0 as f64);
    let beta = (alpha - m as f64 * p) / (p * q);
    let shift = C::new(0.0, 2.0 * PI * branch as f64);
    let l = model.log_first_integral(x.ln(), y.ln()).expect("normal form") + beta * shift;
    Ok(l.exp())
}
