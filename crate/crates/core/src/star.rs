//! Star-shaped compact domains around 0 described by radial functions.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C;
use thiserror::Error;

pub const DEFAULT_SAMPLES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StarError {
    #[error("radial function is not positive at theta = {theta} (rho = {rho})")]
    NonPositive { theta: f64, rho: f64 },
    #[error("boundary is not star-shaped: argument not increasing at sample {0}")]
    NotStarShaped(usize),
    #[error("boundary winds {0:.6} times around 0 instead of once")]
    BadWinding(f64),
    #[error("need at least 8 boundary samples, got {0}")]
    TooFewSamples(usize),
}

/// One-sided evaluation at corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

pub type RadialClosure = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Periodic radial function `θ ↦ ρ(θ)` with its derivative.
#[derive(Clone)]
pub enum RadialFn {
    Const(f64),
    /// `c0 + Σ a_k cos kθ + b_k sin kθ`.
    Fourier { c0: f64, terms: Vec<(u32, f64, f64)> },
    /// Uniform periodic samples with derivatives, cubic Hermite in between.
    Sampled { values: Arc<Vec<f64>>, derivs: Arc<Vec<f64>> },
    /// Cubic Hermite through nodes `ψ_0 < … < ψ_m = ψ_0 + 2π`, one-sided at the seam `ψ_0`.
    Polar { psi: Arc<Vec<f64>>, rho: Arc<Vec<f64>>, slopes: Arc<Vec<f64>> },
    /// `scale · base(offset + slope·ψ)^power` with `ψ` reduced to one turn.
    Affine { base: Arc<RadialFn>, offset: f64, slope: f64, power: f64, scale: f64 },
    Min(Vec<RadialFn>),
    Max(Vec<RadialFn>),
    /// Closed form given as `θ ↦ (ρ, ρ′)`, assumed periodic and smooth.
    Func(RadialClosure),
}

impl fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialFn::Const(r) => write!(f, "Const({r})"),
            RadialFn::Fourier { c0, terms } => write!(f, "Fourier({c0}, {terms:?})"),
            RadialFn::Sampled { values, .. } => write!(f, "Sampled({})", values.len()),
            RadialFn::Polar { psi, .. } => write!(f, "Polar({})", psi.len()),
            RadialFn::Affine { base, offset, slope, power, scale } => {
                write!(f, "Affine({base:?}, {offset}, {slope}, {power}, {scale})")
            }
            RadialFn::Min(v) => write!(f, "Min({v:?})"),
            RadialFn::Max(v) => write!(f, "Max({v:?})"),
            RadialFn::Func(_) => write!(f, "Func"),
        }
    }
}

fn reduce(psi: f64, side: Side) -> f64 {
    let r = psi.rem_euclid(TAU);
    if side == Side::Left && r == 0.0 {
        TAU
    } else {
        r
    }
}

fn hermite(v0: f64, d0: f64, v1: f64, d1: f64, h: f64, t: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let val = (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * h * d0 + (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * h * d1;
    let der = ((6.0 * t2 - 6.0 * t) * v0 + (3.0 * t2 - 4.0 * t + 1.0) * h * d0 + (-6.0 * t2 + 6.0 * t) * v1 + (3.0 * t2 - 2.0 * t) * h * d1) / h;
    (val, der)
}

impl RadialFn {
    /// Value and one-sided derivative.
    pub fn eval(&self, theta: f64, side: Side) -> (f64, f64) {
        match self {
            RadialFn::Const(r) => (*r, 0.0),
            RadialFn::Fourier { c0, terms } => {
                let mut v = *c0;
                let mut d = 0.0;
                for &(k, a, b) in terms {
                    let kf = k as f64;
                    let (s, c) = (kf * theta).sin_cos();
                    v += a * c + b * s;
                    d += kf * (b * c - a * s);
                }
                (v, d)
            }
            RadialFn::Sampled { values, derivs } => {
                let n = values.len();
                let h = TAU / n as f64;
                let u = theta.rem_euclid(TAU) / h;
                let mut i = u.floor() as usize;
                let mut t = u - i as f64;
                if side == Side::Left && t == 0.0 {
                    i = (i + n - 1) % n;
                    t = 1.0;
                }
                let i = i % n;
                let j = (i + 1) % n;
                hermite(values[i], derivs[i], values[j], derivs[j], h, t)
            }
            RadialFn::Polar { psi, rho, slopes } => {
                let m = psi.len() - 1;
                let mut t = psi[0] + (theta - psi[0]).rem_euclid(TAU);
                if side == Side::Left && t == psi[0] {
                    t = psi[m];
                }
                // Interval k with psi[k] <= t < psi[k+1], or psi[k] < t <= psi[k+1] from the left.
                let k = match side {
                    Side::Right => psi.partition_point(|&p| p <= t).clamp(1, m) - 1,
                    Side::Left => psi.partition_point(|&p| p < t).clamp(1, m) - 1,
                };
                let h = psi[k + 1] - psi[k];
                hermite(rho[k], slopes[k], rho[k + 1], slopes[k + 1], h, (t - psi[k]) / h)
            }
            RadialFn::Affine { base, offset, slope, power, scale } => {
                let psi = reduce(theta, side);
                let inner_side = if *slope >= 0.0 { side } else { side.flip() };
                let (v, d) = base.eval(offset + slope * psi, inner_side);
                let val = scale * v.powf(*power);
                let der = scale * power * v.powf(power - 1.0) * d * slope;
                (val, der)
            }
            RadialFn::Min(fs) => pick(fs, theta, side, true),
            RadialFn::Max(fs) => pick(fs, theta, side, false),
            RadialFn::Func(f) => f(theta),
        }
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.eval(theta, Side::Right).0
    }
}

fn pick(fs: &[RadialFn], theta: f64, side: Side, min: bool) -> (f64, f64) {
    let mut best: Option<(f64, f64)> = None;
    for f in fs {
        let (v, d) = f.eval(theta, side);
        best = Some(match best {
            None => (v, d),
            Some((bv, bd)) => {
                let tie = (v - bv).abs() <= 1e-15 * bv.abs().max(v.abs());
                if tie {
                    // Which branch is active just to the chosen side of a crossing.
                    let take = match (side, min) {
                        (Side::Right, true) => d < bd,
                        (Side::Left, true) => d > bd,
                        (Side::Right, false) => d > bd,
                        (Side::Left, false) => d < bd,
                    };
                    if take {
                        (v, d)
                    } else {
                        (bv, bd)
                    }
                } else if (v < bv) == min {
                    (v, d)
                } else {
                    (bv, bd)
                }
            }
        });
    }
    best.expect("min/max over at least one function")
}

/// Compact star-shaped domain `{ r e^{iθ} : r ≤ ρ(θ) }`.
#[derive(Clone, Debug)]
pub struct StarDomain {
    rho: Arc<RadialFn>,
    samples: usize,
}

impl StarDomain {
    pub fn new(rho: RadialFn, samples: usize) -> Result<Self, StarError> {
        if samples < 8 {
            return Err(StarError::TooFewSamples(samples));
        }
        let d = StarDomain { rho: Arc::new(rho), samples };
        for (theta, rho) in d.thetas().into_iter().zip(d.values()) {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(StarError::NonPositive { theta, rho });
            }
        }
        Ok(d)
    }

    pub fn disc(r: f64) -> Result<Self, StarError> {
        Self::new(RadialFn::Const(r), DEFAULT_SAMPLES)
    }

    /// `ρ(θ) = r·(1 + Σ a_k cos kθ + b_k sin kθ)`.
    pub fn perturbed_circle(r: f64, terms: &[(u32, f64, f64)]) -> Result<Self, StarError> {
        let terms = terms.iter().map(|&(k, a, b)| (k, r * a, r * b)).collect();
        Self::new(RadialFn::Fourier { c0: r, terms }, DEFAULT_SAMPLES)
    }

    pub fn from_fn(f: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Result<Self, StarError> {
        Self::new(RadialFn::Func(Arc::new(f)), DEFAULT_SAMPLES)
    }

    pub fn with_samples(&self, samples: usize) -> Result<Self, StarError> {
        Self::new((*self.rho).clone(), samples)
    }

    /// Star domain bounded by a closed curve sampled in order, counterclockwise.
    /// The argument must increase strictly and wind exactly once.
    pub fn from_boundary(points: &[C], samples: usize) -> Result<Self, StarError> {
        let m = points.len();
        if m < 8 {
            return Err(StarError::TooFewSamples(m));
        }
        let mut psi = Vec::with_capacity(m + 1);
        let mut rho = Vec::with_capacity(m + 1);
        let mut acc = points[0].arg();
        psi.push(acc);
        rho.push(points[0].norm());
        for i in 1..=m {
            let z = points[i % m];
            let step = (z / points[i - 1]).arg();
            if step <= 0.0 {
                return Err(StarError::NotStarShaped(i));
            }
            acc += step;
            psi.push(acc);
            rho.push(z.norm());
        }
        let winding = (acc - psi[0]) / TAU;
        if (winding - 1.0).abs() > 1e-9 {
            return Err(StarError::BadWinding(winding));
        }
        Self::from_polar(&psi, &rho, samples)
    }

    /// Star domain through polar nodes `(ψ_i, ρ_i)` covering one turn
    /// (`ψ_last = ψ_0 + 2π`, same radius). Slopes are one-sided at `ψ_0`, so a
    /// corner there is kept.
    pub fn from_polar(psi: &[f64], rho: &[f64], samples: usize) -> Result<Self, StarError> {
        let m = psi.len() - 1;
        if m < 8 {
            return Err(StarError::TooFewSamples(m));
        }
        if let Some(i) = psi.windows(2).position(|w| w[1] <= w[0]) {
            return Err(StarError::NotStarShaped(i + 1));
        }
        let end = |i: usize, dir: f64| -> f64 {
            // Second-order one-sided difference over nodes i, i±1, i±2.
            let (j, k) = if dir > 0.0 { (i + 1, i + 2) } else { (i - 1, i - 2) };
            let (h1, h2) = (psi[j] - psi[i], psi[k] - psi[j]);
            let (r0, r1, r2) = (rho[i], rho[j], rho[k]);
            -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * r0 + (h1 + h2) / (h1 * h2) * r1 - h1 / (h2 * (h1 + h2)) * r2
        };
        let mut slopes = Vec::with_capacity(m + 1);
        slopes.push(end(0, 1.0));
        for i in 1..m {
            let (hm, hp) = (psi[i] - psi[i - 1], psi[i + 1] - psi[i]);
            let dm = (rho[i] - rho[i - 1]) / hm;
            let dp = (rho[i + 1] - rho[i]) / hp;
            slopes.push((hp * dm + hm * dp) / (hm + hp));
        }
        slopes.push(end(m, -1.0));
        Self::new(
            RadialFn::Polar { psi: Arc::new(psi.to_vec()), rho: Arc::new(rho.to_vec()), slopes: Arc::new(slopes) },
            samples,
        )
    }

    /// Boundary nodes of a polar descriptor, without the closing duplicate.
    pub fn nodes(&self) -> Option<Vec<C>> {
        match &*self.rho {
            RadialFn::Polar { psi, rho, .. } => {
                Some(psi.iter().zip(rho.iter()).take(psi.len() - 1).map(|(&t, &r)| C::from_polar(r, t)).collect())
            }
            _ => None,
        }
    }

    pub fn rho(&self) -> &RadialFn {
        &self.rho
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.rho.value(theta)
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.samples).map(|i| TAU * i as f64 / self.samples as f64).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.thetas().into_iter().map(|t| self.rho.value(t)).collect()
    }

    pub fn boundary_points(&self) -> Vec<C> {
        self.thetas().into_iter().map(|t| C::from_polar(self.rho.value(t), t)).collect()
    }

    pub fn contains(&self, z: C) -> bool {
        z.norm() <= self.rho.value(z.arg())
    }

    pub fn max_radius(&self) -> f64 {
        self.values().into_iter().fold(0.0, f64::max)
    }

    pub fn min_radius(&self) -> f64 {
        self.values().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `max |ξ(z)|` over the boundary samples.
    pub fn size(&self, xi: impl Fn(C) -> C) -> f64 {
        self.boundary_points().into_iter().map(|z| xi(z).norm()).fold(0.0, f64::max)
    }

    /// Rugosity of the counterclockwise boundary: `max atan(|ρ′|/ρ)` over one-sided limits.
    pub fn rugosity(&self) -> f64 {
        let mut e: f64 = 0.0;
        for t in self.thetas() {
            for side in [Side::Left, Side::Right] {
                let (v, d) = self.rho.eval(t, side);
                e = e.max((d.abs() / v).atan());
            }
        }
        e
    }

    pub fn union(&self, other: &StarDomain) -> StarDomain {
        self.combine(other, false)
    }

    pub fn intersection(&self, other: &StarDomain) -> StarDomain {
        self.combine(other, true)
    }

    fn combine(&self, other: &StarDomain, min: bool) -> StarDomain {
        let fs = vec![(*self.rho).clone(), (*other.rho).clone()];
        StarDomain {
            rho: Arc::new(if min { RadialFn::Min(fs) } else { RadialFn::Max(fs) }),
            samples: self.samples.max(other.samples),
        }
    }

    pub fn intersection_all(domains: &[StarDomain]) -> Option<StarDomain> {
        let samples = domains.iter().map(|d| d.samples).max()?;
        let fs = domains.iter().map(|d| (*d.rho).clone()).collect();
        Some(StarDomain { rho: Arc::new(RadialFn::Min(fs)), samples })
    }

    /// `ρ′(ψ) = scale · ρ(offset + slope·ψ)^power` over one turn of `ψ`.
    pub fn affine(&self, offset: f64, slope: f64, power: f64, scale: f64) -> Result<StarDomain, StarError> {
        Self::new(RadialFn::Affine { base: self.rho.clone(), offset, slope, power, scale }, self.samples)
    }

    /// Image under `z ↦ e^{iφ} z`.
    pub fn rotate(&self, phi: f64) -> StarDomain {
        StarDomain {
            rho: Arc::new(RadialFn::Affine { base: self.rho.clone(), offset: -phi, slope: 1.0, power: 1.0, scale: 1.0 }),
            samples: self.samples,
        }
    }

    /// Replaces the descriptor by its uniform samples.
    pub fn resampled(&self) -> StarDomain {
        let ts = self.thetas();
        let values: Vec<f64> = ts.iter().map(|&t| self.rho.value(t)).collect();
        let derivs: Vec<f64> = ts.iter().map(|&t| self.rho.eval(t, Side::Right).1).collect();
        StarDomain {
            rho: Arc::new(RadialFn::Sampled { values: Arc::new(values), derivs: Arc::new(derivs) }),
            samples: self.samples,
        }
    }

    /// `true` when `self ⊆ other` up to `tol` on the radial functions.
    pub fn is_subset_of(&self, other: &StarDomain, tol: f64) -> bool {
        let n = self.samples.max(other.samples);
        (0..n).all(|i| {
            let t = TAU * i as f64 / n as f64;
            self.rho.value(t) <= other.rho.value(t) + tol
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,rho\n");
        for (t, r) in self.thetas().into_iter().zip(self.values()) {
            out += &format!("{t:.12},{r:.15e}\n");
        }
        out
    }
}

/// `max |ρ_a − ρ_b|` over `n` uniform angles.
pub fn radial_distance(a: &StarDomain, b: &StarDomain, n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            (a.radius(t) - b.radius(t)).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnionIntersectionVerdict {
    pub e_first: f64,
    pub e_second: f64,
    pub e_union: f64,
    pub e_intersection: f64,
    pub holds: bool,
}

/// Checks `e(∂(Δ∪Δ′)), e(∂(Δ∩Δ′)) ≤ max(e(∂Δ), e(∂Δ′))`.
pub fn union_intersection_rugosity_check(a: &StarDomain, b: &StarDomain) -> UnionIntersectionVerdict {
    let e_first = a.rugosity();
    let e_second = b.rugosity();
    let e_union = a.union(b).rugosity();
    let e_intersection = a.intersection(b).rugosity();
    let m = e_first.max(e_second);
    UnionIntersectionVerdict { e_first, e_second, e_union, e_intersection, holds: e_union <= m && e_intersection <= m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disc_and_perturbed_circle() {
        let d = StarDomain::disc(0.3).unwrap();
        assert_eq!(d.rugosity(), 0.0);
        assert!((d.size(|z| z) - 0.3).abs() < 1e-15);
        assert!((d.size(|z| z * z) - 0.09).abs() < 1e-15);
        let p = StarDomain::perturbed_circle(1.0, &[(1, 0.1, 0.0)]).unwrap();
        // max |ρ′/ρ| = 0.1 sinθ / (1 + 0.1 cosθ) peaks at cosθ = −0.1.
        let want = (0.1 / (1.0f64 - 0.01).sqrt()).atan();
        assert!((p.rugosity() - want).abs() < 1e-6);
        assert!(StarDomain::perturbed_circle(1.0, &[(1, 1.5, 0.0)]).is_err());
    }

    #[test]
    fn min_max_corners_use_one_sided_slopes() {
        let a = StarDomain::perturbed_circle(1.0, &[(1, 0.2, 0.0)]).unwrap();
        let b = StarDomain::disc(1.0).unwrap();
        let m = a.intersection(&b);
        let (_, dl) = m.rho().eval(PI / 2.0, Side::Left);
        let (_, dr) = m.rho().eval(PI / 2.0, Side::Right);
        assert!(dl.abs() < 1e-12);
        assert!((dr + 0.2).abs() < 1e-12);
        let v = union_intersection_rugosity_check(&a, &b);
        assert!(v.holds, "{v:?}");
        assert!((v.e_union - 0.2f64.atan()).abs() < 1e-9);
    }

    #[test]
    fn identical_domains_give_equality() {
        let a = StarDomain::perturbed_circle(2.0, &[(3, 0.05, 0.02)]).unwrap();
        let v = union_intersection_rugosity_check(&a, &a);
        assert!(v.holds);
        assert_eq!(v.e_union, v.e_first);
        assert_eq!(v.e_intersection, v.e_first);
    }

    #[test]
    fn boundary_round_trip() {
        let a = StarDomain::perturbed_circle(0.5, &[(2, 0.1, -0.05)]).unwrap();
        let pts: Vec<C> = (0..3000)
            .map(|i| {
                let t = 0.3 + TAU * i as f64 / 3000.0;
                C::from_polar(a.radius(t), t)
            })
            .collect();
        let b = StarDomain::from_boundary(&pts, 4096).unwrap();
        assert!(radial_distance(&a, &b, 720) < 1e-10);
        let rev: Vec<C> = pts.iter().rev().copied().collect();
        assert!(matches!(StarDomain::from_boundary(&rev, 4096), Err(StarError::NotStarShaped(_))));
    }

    #[test]
    fn rotation_and_affine() {
        let a = StarDomain::perturbed_circle(1.0, &[(1, 0.1, 0.0)]).unwrap();
        let r = a.rotate(0.7);
        assert!((r.radius(0.7) - 1.1).abs() < 1e-14);
        let sq = a.affine(0.0, 1.0, 2.0, 1.0).unwrap();
        assert!((sq.radius(0.0) - 1.21).abs() < 1e-14);
        let res = a.resampled();
        assert!(radial_distance(&a, &res, 720) < 1e-12);
    }
}
