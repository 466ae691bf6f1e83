//! Foliated collars over the circle `|y| = 1`, their rabotage and the
//! iterated reduction to a single suspended domain `Δ′`.

use std::f64::consts::TAU;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use thiserror::Error;

use crate::lunule::{lunule_decomposition, LunuleDecomposition, LunuleError, Tag};
use crate::ode::OdeOptions;
use crate::saddle::{col_passage, dulac_map, flow, holonomy, ExponentConvention, FieldKind, ModelKind, SaddleError, SaddleModel};
use crate::star::{RadialFn, StarDomain, StarError};

/// Relative tolerance for slicewise containment.
pub const CONTAINMENT_TOL: f64 = 1e-7;
pub const ORACLE_RAYS: usize = 720;
pub const SWEEP_SIZES: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Error)]
pub enum RabotageError {
    #[error(transparent)]
    Saddle(#[from] SaddleError),
    #[error(transparent)]
    Star(#[from] StarError),
    #[error(transparent)]
    Lunule(#[from] LunuleError),
    #[error("no slabs")]
    NoSlabs,
    #[error("slabs do not cover one turn cyclically at slab {0}")]
    NotACover(usize),
    #[error("transported slice exceeds the target slice by {excess:e}")]
    NotContained { excess: f64 },
    #[error("empty common slice at merge {step}")]
    EmptyCommonSlice { step: usize },
    #[error("slice boundary at {theta} does not close a turn")]
    SliceNotClosed { theta: f64 },
    #[error("oracle ray {0} never leaves the collar")]
    Unbounded(usize),
}

/// Holonomic transport of `x`-slices between angles `arg y = from` and `arg y = to`.
pub trait Transport: Sync {
    fn point(&self, x: C, from: f64, to: f64) -> Result<C, RabotageError>;
    fn domain(&self, d: &StarDomain, from: f64, to: f64) -> Result<StarDomain, RabotageError>;
}

/// Closed-form transport of the linear saddle: rotation by `(from − to)/λ`.
#[derive(Clone, Copy, Debug)]
pub struct LinearTransport {
    pub lambda: f64,
}

impl Transport for LinearTransport {
    fn point(&self, x: C, from: f64, to: f64) -> Result<C, RabotageError> {
        Ok(x * C::from_polar(1.0, (from - to) / self.lambda))
    }

    fn domain(&self, d: &StarDomain, from: f64, to: f64) -> Result<StarDomain, RabotageError> {
        Ok(d.rotate((from - to) / self.lambda))
    }
}

/// Transport by the flow of `Y` in imaginary time.
#[derive(Clone, Debug)]
pub struct FlowTransport<'a> {
    pub model: &'a SaddleModel,
    pub opts: OdeOptions,
}

impl<'a> FlowTransport<'a> {
    pub fn new(model: &'a SaddleModel) -> Self {
        FlowTransport { model, opts: OdeOptions::default() }
    }
}

impl Transport for FlowTransport<'_> {
    fn point(&self, x: C, from: f64, to: f64) -> Result<C, RabotageError> {
        if from == to {
            return Ok(x);
        }
        let path = [C::new(0.0, 0.0), C::new(0.0, from - to)];
        let tr = flow(self.model, (x, C::from_polar(1.0, from)), FieldKind::Y, &path, &self.opts)?;
        Ok(tr.end().x)
    }

    /// Maps polar nodes when present, so corners survive; the map being a
    /// bijection, it is applied termwise to intersections and unions.
    fn domain(&self, d: &StarDomain, from: f64, to: f64) -> Result<StarDomain, RabotageError> {
        let n = d.samples();
        let parts = |fs: &[RadialFn]| -> Result<Vec<RadialFn>, RabotageError> {
            fs.iter()
                .map(|f| Ok(self.domain(&StarDomain::new(f.clone(), n)?, from, to)?.rho().clone()))
                .collect()
        };
        match d.rho() {
            RadialFn::Min(fs) => return Ok(StarDomain::new(RadialFn::Min(parts(fs)?), n)?),
            RadialFn::Max(fs) => return Ok(StarDomain::new(RadialFn::Max(parts(fs)?), n)?),
            _ => {}
        }
        let pts = d
            .nodes()
            .unwrap_or_else(|| d.boundary_points())
            .into_par_iter()
            .map(|z| self.point(z, from, to))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StarDomain::from_boundary(&pts, d.samples())?)
    }
}

pub fn transport_for(model: &SaddleModel) -> Box<dyn Transport + '_> {
    match model.kind() {
        ModelKind::Linear => Box::new(LinearTransport { lambda: model.lambda() }),
        _ => Box::new(FlowTransport::new(model)),
    }
}

/// Piece of the collar over `[lo, hi]` with its two boundary slices.
#[derive(Clone, Debug)]
pub struct CollarSlab {
    pub lo: f64,
    pub hi: f64,
    pub entry: StarDomain,
    pub exit: StarDomain,
    /// Orientation of the lunule over this interval, if nondegenerate.
    pub tag: Option<Tag>,
}

impl CollarSlab {
    /// Suspension carried by a planed slab.
    pub fn suspension(&self) -> Suspension {
        let (reference, slice) = match self.tag {
            Some(Tag::A) => (self.hi, self.exit.clone()),
            _ => (self.lo, self.entry.clone()),
        };
        Suspension { lo: self.lo, hi: self.hi, reference, slice }
    }
}

/// Saturation of `slice` (placed at `arg y = reference`) over `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct Suspension {
    pub lo: f64,
    pub hi: f64,
    pub reference: f64,
    pub slice: StarDomain,
}

impl Suspension {
    pub fn slice_at(&self, phi: f64, t: &dyn Transport) -> Result<StarDomain, RabotageError> {
        if phi == self.reference {
            return Ok(self.slice.clone());
        }
        t.domain(&self.slice, self.reference, phi)
    }
}

fn excess(inner: &StarDomain, outer: &StarDomain) -> f64 {
    let n = inner.samples().max(outer.samples());
    (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            inner.radius(t) - outer.radius(t)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest suspension inside the slab: the slice on the saturated side carried across.
pub fn rabotage_slab(slab: &CollarSlab, t: &dyn Transport, tol: f64) -> Result<CollarSlab, RabotageError> {
    let Some(tag) = slab.tag else {
        return Ok(slab.clone());
    };
    let scale = slab.entry.max_radius().max(slab.exit.max_radius());
    let (moved, target) = match tag {
        Tag::B => (t.domain(&slab.entry, slab.lo, slab.hi)?, &slab.exit),
        Tag::A => (t.domain(&slab.exit, slab.hi, slab.lo)?, &slab.entry),
    };
    let e = excess(&moved, target);
    if e > tol * scale {
        return Err(RabotageError::NotContained { excess: e });
    }
    let mut out = slab.clone();
    match tag {
        Tag::B => out.exit = moved,
        Tag::A => out.entry = moved,
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct RabotageOutcome {
    pub delta_prime: StarDomain,
    /// Length of the multi-suspension after each merge, starting with `q`.
    pub lengths: Vec<usize>,
    pub planed: Vec<CollarSlab>,
    pub theta0: f64,
    /// Lifts of the basepoint whose transports are intersected.
    pub lifts: Vec<f64>,
    pub suspension: Suspension,
}

/// Planes every slab, merges the last two until one suspension over
/// `[θ_0, θ_0 + 2π]` remains, and returns its slice at `basepoint`.
pub fn iterate_rabotage(
    slabs: &[CollarSlab],
    t: &dyn Transport,
    basepoint: f64,
    tol: f64,
) -> Result<RabotageOutcome, RabotageError> {
    let q = slabs.len();
    if q == 0 {
        return Err(RabotageError::NoSlabs);
    }
    for (k, s) in slabs.iter().enumerate() {
        if !(s.hi > s.lo) || (k + 1 < q && (s.hi - slabs[k + 1].lo).abs() > 1e-9) {
            return Err(RabotageError::NotACover(k));
        }
    }
    let theta0 = slabs[0].lo;
    if (slabs[q - 1].hi - theta0 - TAU).abs() > 1e-9 {
        return Err(RabotageError::NotACover(q - 1));
    }
    let planed = slabs.iter().map(|s| rabotage_slab(s, t, tol)).collect::<Result<Vec<_>, _>>()?;
    let mut w: Vec<Suspension> = planed.iter().map(CollarSlab::suspension).collect();
    let mut lengths = vec![w.len()];
    let mut step = 0;
    while w.len() > 1 {
        step += 1;
        let b = w.pop().expect("length > 1");
        let a = w.pop().expect("length > 1");
        let m = a.hi;
        let s = a.slice_at(m, t)?.intersection(&b.slice_at(m, t)?);
        if !(s.min_radius() > 0.0) {
            return Err(RabotageError::EmptyCommonSlice { step });
        }
        w.push(Suspension { lo: a.lo, hi: b.hi, reference: m, slice: s });
        lengths.push(w.len());
        assert_eq!(w.len(), q - step);
    }
    let suspension = w.pop().expect("one suspension");
    let beta = theta0 + (basepoint - theta0).rem_euclid(TAU);
    let (delta_prime, lifts) = if beta - theta0 < 1e-12 || theta0 + TAU - beta < 1e-12 {
        (suspension.slice_at(theta0, t)?, vec![theta0])
    } else {
        let lifts = vec![beta - TAU, beta];
        (suspension.slice_at(lifts[0], t)?.intersection(&suspension.slice_at(lifts[1], t)?), lifts)
    };
    Ok(RabotageOutcome { delta_prime, lengths, planed, theta0, lifts, suspension })
}

/// Membership of `x` in the collar slice `V_Δ(φ)` of the linear saddle.
pub fn linear_collar_contains(delta: &StarDomain, lambda: f64, x: C, phi: f64) -> bool {
    let r = x.norm();
    r == 0.0 || r.powf(lambda) <= delta.radius(phi + lambda * x.arg().rem_euclid(TAU))
}

/// Membership of `x` in `V_Δ(φ)`: col passage to `|x| = 1`, then `X` back to `x = 1`.
pub fn collar_contains(model: &SaddleModel, delta: &StarDomain, x: C, phi: f64) -> Result<bool, RabotageError> {
    if x.norm() == 0.0 {
        return Ok(true);
    }
    let p = col_passage(model, x, phi)?;
    let a = p.x.arg().rem_euclid(TAU);
    let path = [C::new(0.0, 0.0), C::new(0.0, -a)];
    let tr = flow(model, (p.x, p.y), FieldKind::X, &path, &OdeOptions::default())?;
    Ok(delta.contains(tr.end().y))
}

/// Radial function of `Δ′` recomputed leaf by leaf: a point at the basepoint
/// belongs when its transports to every grid angle of `[θ_0, θ_0 + 2π]`, from
/// every lift, stay in the collar. Returns `(ψ, ρ(ψ))` for `rays` directions.
pub fn saturation_oracle(
    member: &(dyn Fn(C, f64) -> Result<bool, RabotageError> + Sync),
    t: &dyn Transport,
    outcome: &RabotageOutcome,
    crossings: &[f64],
    rays: usize,
) -> Result<Vec<(f64, f64)>, RabotageError> {
    let theta0 = outcome.theta0;
    let mut grid: Vec<f64> = (0..=ORACLE_RAYS).map(|i| theta0 + TAU * i as f64 / ORACLE_RAYS as f64).collect();
    grid.extend(crossings.iter().map(|c| theta0 + (c - theta0).rem_euclid(TAU)));
    let inside = |x: C| -> Result<bool, RabotageError> {
        for &l in &outcome.lifts {
            for &phi in &grid {
                if !member(t.point(x, l, phi)?, phi)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    let start = outcome.delta_prime.min_radius();
    (0..rays)
        .into_par_iter()
        .map(|i| {
            let psi = TAU * i as f64 / rays as f64;
            let dir = C::from_polar(1.0, psi);
            let mut hi = start;
            let mut lo = 0.0;
            while inside(dir * hi)? {
                lo = hi;
                hi *= 2.0;
                if hi > 1e6 * start {
                    return Err(RabotageError::Unbounded(i));
                }
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if inside(dir * mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok((psi, 0.5 * (lo + hi)))
        })
        .collect()
}

/// Collar of `Δ` built from a saddle model: holonomy image, lunules and slabs.
#[derive(Clone, Debug)]
pub struct Collar {
    pub delta: StarDomain,
    pub image: StarDomain,
    pub lunules: LunuleDecomposition,
    /// `θ_0 < … < θ_q`.
    pub angles: Vec<f64>,
    pub slabs: Vec<CollarSlab>,
    /// Largest relative gap between the ends of a slice boundary before closing it.
    pub closure: f64,
}

pub fn holonomy_image(model: &SaddleModel, delta: &StarDomain) -> Result<StarDomain, RabotageError> {
    if matches!(model.kind(), ModelKind::Linear) {
        return Ok(delta.rotate(-TAU * model.lambda()));
    }
    let pts = delta
        .boundary_points()
        .into_par_iter()
        .map(|y| holonomy(model, y))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StarDomain::from_boundary(&pts, delta.samples())?)
}

/// Slice `V_Δ(θ_j)` bounded by the Dulac image of `∂Δ` over one turn of `arg x`.
pub fn collar_slice(model: &SaddleModel, delta: &StarDomain, theta_j: f64) -> Result<(StarDomain, f64), RabotageError> {
    let lam = model.lambda();
    if matches!(model.kind(), ModelKind::Linear) {
        return Ok((delta.affine(theta_j, lam, 1.0 / lam, 1.0)?, 0.0));
    }
    let image = |theta: f64| dulac_map(model, delta.radius(theta), theta, theta_j).map(|d| d.log_x);
    let psi0 = image(theta_j)?.im;
    let target = psi0 + TAU;
    let mut hi = theta_j + TAU * (lam + 1.0);
    if image(hi)?.im < target {
        return Err(RabotageError::SliceNotClosed { theta: theta_j });
    }
    let mut lo = theta_j;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if image(mid)?.im < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let end = 0.5 * (lo + hi);
    let n = delta.samples();
    let logs = (0..=n)
        .into_par_iter()
        .map(|i| image(theta_j + (end - theta_j) * i as f64 / n as f64))
        .collect::<Result<Vec<_>, _>>()?;
    let mut psi: Vec<f64> = logs.iter().map(|l| l.im).collect();
    let mut rho: Vec<f64> = logs.iter().map(|l| l.re.exp()).collect();
    if let Some(i) = psi.windows(2).position(|w| w[1] <= w[0]) {
        return Err(StarError::NotStarShaped(i + 1).into());
    }
    let closure = (rho[n] - rho[0]).abs() / rho[0];
    psi[n] = target;
    rho[n] = rho[0];
    Ok((StarDomain::from_polar(&psi, &rho, n)?, closure))
}

pub fn build_collar(model: &SaddleModel, delta: &StarDomain) -> Result<Collar, RabotageError> {
    let image = holonomy_image(model, delta)?;
    let lunules = lunule_decomposition(delta, &image)?;
    let (angles, tags) = if lunules.is_empty() {
        (vec![0.0, TAU], vec![None])
    } else {
        (lunules.angles.clone(), lunules.lunules.iter().map(|l| l.tag).collect())
    };
    let q = tags.len();
    let mut slices = Vec::with_capacity(q);
    let mut closure: f64 = 0.0;
    for &theta in &angles[..q] {
        let (v, c) = collar_slice(model, delta, theta)?;
        closure = closure.max(c);
        slices.push(v);
    }
    let slabs = (0..q)
        .map(|k| CollarSlab {
            lo: angles[k],
            hi: angles[k + 1],
            entry: slices[k].clone(),
            exit: slices[(k + 1) % q].clone(),
            tag: tags[k],
        })
        .collect();
    Ok(Collar { delta: delta.clone(), image, lunules, angles, slabs, closure })
}

impl RabotageError {
    /// The failure comes from the input violating a standing assumption, not from numerics.
    pub fn is_hypothesis(&self) -> bool {
        match self {
            RabotageError::Lunule(_) => true,
            RabotageError::Saddle(e) => matches!(
                e,
                SaddleError::InvalidModel(_)
                    | SaddleError::OutOfRange(_)
                    | SaddleError::OutOfSector { .. }
                    | SaddleError::AxisProximity(_)
            ),
            _ => false,
        }
    }
}

/// `ρ(θ) = r(1 + 0.1 cos θ)` scaled so that `‖Δ‖ = size`.
pub fn sweep_domain(size: f64, samples: usize) -> Result<StarDomain, StarError> {
    StarDomain::perturbed_circle(size / 1.1, &[(1, 0.1, 0.0)])?.with_samples(samples)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsRow {
    pub size: f64,
    pub e_delta: f64,
    pub q: usize,
    pub nondegenerate: usize,
    pub size_prime: f64,
    pub e_prime: f64,
    /// `max(0, e(Δ′) − e(Δ))`.
    pub loss: f64,
    pub closure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub model: String,
    pub lambda: f64,
    pub rows: Vec<BoundsRow>,
    /// Least-squares slope of `log‖Δ′‖` against `log‖Δ‖`.
    pub slope: Option<f64>,
    pub fit_residual: Option<f64>,
    pub convention: Option<ExponentConvention>,
    /// Loss does not increase as the size decreases.
    pub loss_decreasing: bool,
    pub aborted: Option<SweepAbort>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepAbort {
    pub size: f64,
    pub message: String,
    pub hypothesis: bool,
}

impl BoundsReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,e_delta,q,nondegenerate,size_prime,e_prime,loss,closure\n");
        for r in &self.rows {
            out += &format!(
                "{:e},{:.12},{},{},{:.12e},{:.12},{:.3e},{:.3e}\n",
                r.size, r.e_delta, r.q, r.nondegenerate, r.size_prime, r.e_prime, r.loss, r.closure
            );
        }
        if let (Some(s), Some(res)) = (self.slope, self.fit_residual) {
            let conv = self.convention.map(|c| c.to_string()).unwrap_or_default();
            out += &format!("# slope,{s:.9},residual,{res:.3e},convention,{conv}\n");
        }
        if let Some(a) = &self.aborted {
            out += &format!("# aborted,{:e},{}\n", a.size, a.message);
        }
        out
    }
}

fn sweep_row(model: &SaddleModel, size: f64, samples: usize) -> Result<BoundsRow, RabotageError> {
    let delta = sweep_domain(size, samples)?;
    let collar = build_collar(model, &delta)?;
    let t = transport_for(model);
    let out = iterate_rabotage(&collar.slabs, t.as_ref(), 0.0, CONTAINMENT_TOL)?;
    let e_delta = delta.rugosity();
    let e_prime = out.delta_prime.rugosity();
    Ok(BoundsRow {
        size: delta.max_radius(),
        e_delta,
        q: collar.slabs.len(),
        nondegenerate: collar.lunules.k_set().len(),
        size_prime: out.delta_prime.max_radius(),
        e_prime,
        loss: (e_prime - e_delta).max(0.0),
        closure: collar.closure,
    })
}

pub fn verify_bounds_sweep(model: &SaddleModel, sizes: &[f64]) -> BoundsReport {
    verify_bounds_sweep_with(model, sizes, crate::star::DEFAULT_SAMPLES)
}

/// Runs the collar reduction over domains of decreasing size and fits the size exponent.
pub fn verify_bounds_sweep_with(model: &SaddleModel, sizes: &[f64], samples: usize) -> BoundsReport {
    let mut sizes = sizes.to_vec();
    sizes.sort_by(|a, b| b.total_cmp(a));
    let mut rows = Vec::new();
    let mut aborted = None;
    for &s in &sizes {
        match sweep_row(model, s, samples) {
            Ok(r) => rows.push(r),
            Err(e) => {
                aborted = Some(SweepAbort { size: s, message: e.to_string(), hypothesis: e.is_hypothesis() });
                break;
            }
        }
    }
    let lambda = model.lambda();
    let (mut slope, mut fit_residual, mut convention) = (None, None, None);
    if rows.len() >= 2 {
        let xs: Vec<f64> = rows.iter().map(|r| r.size.ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.size_prime.ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
        let k = sxy / sxx;
        let res = xs.iter().zip(&ys).map(|(a, b)| (b - my - k * (a - mx)).abs()).fold(0.0, f64::max);
        slope = Some(k);
        fit_residual = Some(res);
        convention = Some(ExponentConvention::classify(k, lambda, 0.05));
    }
    let loss_decreasing = rows.windows(2).all(|w| w[1].loss <= w[0].loss + 1e-12);
    BoundsReport { model: model.to_spec(), lambda, rows, slope, fit_residual, convention, loss_decreasing, aborted }
}
