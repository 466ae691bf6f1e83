//! Rugosity of piecewise-analytic smooth paths in C*.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C;
use thiserror::Error;

use crate::star::{Side, StarDomain};

pub const PIECE_SAMPLES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RugosityError {
    #[error("curve passes through 0 in piece {piece}")]
    ThroughOrigin { piece: usize },
    #[error("derivative samples missing or mismatched in piece {0}")]
    MissingDerivative(usize),
    #[error("vanishing derivative in piece {piece} (not smooth)")]
    NotSmooth { piece: usize },
    #[error("pieces {0} and {1} do not share an endpoint")]
    Discontinuous(usize, usize),
    #[error("empty curve")]
    Empty,
    #[error("map vanishes on the curve")]
    MapVanishes,
    #[error("curve leaves the sector of definition (|z| = {size} > {radius})")]
    SectorViolation { size: f64, radius: f64 },
}

/// `[[z]]`: `|arg z|` when `arg z ∈ (−π/2, π/2)`, `+∞` otherwise.
pub fn bracket(z: C) -> f64 {
    let a = z.arg();
    if a.abs() < FRAC_PI_2 {
        a.abs()
    } else {
        f64::INFINITY
    }
}

/// `{{θ}}`: `|θ|` on `(−π/2, π/2)`, `+∞` otherwise.
pub fn brace(theta: f64) -> f64 {
    if theta.abs() < FRAC_PI_2 {
        theta.abs()
    } else {
        f64::INFINITY
    }
}

pub type PathFn = Arc<dyn Fn(f64) -> (C, C) + Send + Sync>;

#[derive(Clone)]
pub enum Piece {
    /// `t ↦ (μ(t), μ′(t))` on `[t0, t1]`.
    Analytic { f: PathFn, t0: f64, t1: f64 },
    /// Points with derivative samples, in order.
    Sampled { z: Vec<C>, dz: Vec<C> },
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Analytic { t0, t1, .. } => write!(f, "Analytic[{t0}, {t1}]"),
            Piece::Sampled { z, .. } => write!(f, "Sampled({})", z.len()),
        }
    }
}

impl Piece {
    fn samples(&self, n: usize) -> (Vec<C>, Vec<C>) {
        match self {
            Piece::Analytic { f, t0, t1 } => (0..=n)
                .map(|i| f(t0 + (t1 - t0) * i as f64 / n as f64))
                .unzip(),
            Piece::Sampled { z, dz } => (z.clone(), dz.clone()),
        }
    }

    fn endpoints(&self) -> Option<(C, C)> {
        match self {
            Piece::Analytic { f, t0, t1 } => Some((f(*t0).0, f(*t1).0)),
            Piece::Sampled { z, .. } => Some((*z.first()?, *z.last()?)),
        }
    }

    fn reversed(&self) -> Piece {
        match self {
            Piece::Analytic { f, t0, t1 } => {
                let (f, a, b) = (f.clone(), *t0, *t1);
                Piece::Analytic {
                    f: Arc::new(move |t| {
                        let (z, dz) = f(a + b - t);
                        (z, -dz)
                    }),
                    t0: a,
                    t1: b,
                }
            }
            Piece::Sampled { z, dz } => Piece::Sampled {
                z: z.iter().rev().copied().collect(),
                dz: dz.iter().rev().map(|d| -d).collect(),
            },
        }
    }
}

/// Piecewise-analytic smooth path, a concatenation of pieces.
#[derive(Clone, Debug)]
pub struct PACurve {
    pieces: Vec<Piece>,
}

impl PACurve {
    pub fn new(pieces: Vec<Piece>) -> Result<Self, RugosityError> {
        if pieces.is_empty() {
            return Err(RugosityError::Empty);
        }
        for (i, p) in pieces.iter().enumerate() {
            if let Piece::Sampled { z, dz } = p {
                if z.is_empty() || z.len() != dz.len() {
                    return Err(RugosityError::MissingDerivative(i));
                }
            }
        }
        for i in 1..pieces.len() {
            let (_, end) = pieces[i - 1].endpoints().ok_or(RugosityError::Empty)?;
            let (start, _) = pieces[i].endpoints().ok_or(RugosityError::Empty)?;
            if (end - start).norm() > 1e-9 * end.norm().max(1e-300) {
                return Err(RugosityError::Discontinuous(i - 1, i));
            }
        }
        Ok(PACurve { pieces })
    }

    pub fn single(piece: Piece) -> Result<Self, RugosityError> {
        Self::new(vec![piece])
    }

    pub fn analytic(f: impl Fn(f64) -> (C, C) + Send + Sync + 'static, t0: f64, t1: f64) -> Result<Self, RugosityError> {
        Self::single(Piece::Analytic { f: Arc::new(f), t0, t1 })
    }

    /// Arc of the circle `|z| = r` from angle `a` to `b`.
    pub fn circle_arc(r: f64, a: f64, b: f64) -> Result<Self, RugosityError> {
        Self::analytic(
            move |t| {
                let z = C::from_polar(r, t);
                (z, C::new(0.0, 1.0) * z)
            },
            a,
            b,
        )
    }

    /// Radial segment at angle `theta` from radius `r0` to `r1`.
    pub fn radial_segment(theta: f64, r0: f64, r1: f64) -> Result<Self, RugosityError> {
        let u = C::from_polar(1.0, theta);
        Self::analytic(move |t| (u * t, u), r0, r1)
    }

    /// Logarithmic spiral `ρ = s·e^{kθ}` for `θ ∈ [a, b]`.
    pub fn log_spiral(s: f64, k: f64, a: f64, b: f64) -> Result<Self, RugosityError> {
        Self::analytic(
            move |t| {
                let z = C::from_polar(s * (k * t).exp(), t);
                (z, C::new(k, 1.0) * z)
            },
            a,
            b,
        )
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn reversed(&self) -> PACurve {
        PACurve { pieces: self.pieces.iter().rev().map(Piece::reversed).collect() }
    }

    pub fn concat(&self, other: &PACurve) -> Result<PACurve, RugosityError> {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        PACurve::new(pieces)
    }

    /// Sample points and derivatives of every piece.
    pub fn samples(&self) -> Vec<(Vec<C>, Vec<C>)> {
        self.pieces.iter().map(|p| p.samples(PIECE_SAMPLES)).collect()
    }

    /// The image curve `g ∘ μ` as sampled pieces.
    pub fn map(&self, g: &dyn HoloMap) -> Result<PACurve, RugosityError> {
        let mut pieces = Vec::new();
        for (z, dz) in self.samples() {
            let mut w = Vec::with_capacity(z.len());
            let mut dw = Vec::with_capacity(z.len());
            for (zi, di) in z.iter().zip(&dz) {
                let (gz, dg) = g.eval(*zi);
                w.push(gz);
                dw.push(dg * di);
            }
            pieces.push(Piece::Sampled { z: w, dz: dw });
        }
        PACurve::new(pieces)
    }
}

/// Counterclockwise boundary of a star domain, sampled with one-sided slopes.
pub fn star_boundary(d: &StarDomain) -> PACurve {
    let mut z = Vec::new();
    let mut dz = Vec::new();
    for t in d.thetas() {
        for side in [Side::Left, Side::Right] {
            let (r, dr) = d.rho().eval(t, side);
            let u = C::from_polar(1.0, t);
            z.push(u * r);
            dz.push(u * C::new(dr, r));
        }
    }
    PACurve { pieces: vec![Piece::Sampled { z, dz }] }
}

/// Rugosity `e(μ)`: the maximum of `[[μ′/(iμ)]]`, one-sided at corners.
pub fn rugosity(curve: &PACurve) -> Result<f64, RugosityError> {
    let mut e: f64 = 0.0;
    for (i, (z, dz)) in curve.samples().into_iter().enumerate() {
        for (zi, di) in z.iter().zip(&dz) {
            if zi.norm() == 0.0 {
                return Err(RugosityError::ThroughOrigin { piece: i });
            }
            if di.norm() == 0.0 {
                return Err(RugosityError::NotSmooth { piece: i });
            }
            e = e.max(bracket(di / (C::new(0.0, 1.0) * zi)));
        }
    }
    Ok(e)
}

/// `‖μ‖_ξ = max |ξ∘μ|`.
pub fn size(curve: &PACurve, xi: impl Fn(C) -> C) -> f64 {
    curve
        .samples()
        .into_iter()
        .flat_map(|(z, _)| z.into_iter())
        .map(|z| xi(z).norm())
        .fold(0.0, f64::max)
}

/// Holomorphic germ with an expansion `Σ_{j≥ν} c_j z^{j/p}` near 0.
pub trait HoloMap {
    /// `(g(z), g′(z))`.
    fn eval(&self, z: C) -> (C, C);
    /// Leading exponent `ν/p`.
    fn leading_exponent(&self) -> f64;
    /// Radius of the disc (or sector) of definition.
    fn radius(&self) -> f64;
}

/// Polynomial `Σ c_j z^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    pub coeffs: Vec<C>,
    pub radius: f64,
}

impl PolyMap {
    pub fn new(coeffs: Vec<C>, radius: f64) -> Self {
        PolyMap { coeffs, radius }
    }

    pub fn real(coeffs: &[f64], radius: f64) -> Self {
        PolyMap { coeffs: coeffs.iter().map(|&c| C::new(c, 0.0)).collect(), radius }
    }
}

impl HoloMap for PolyMap {
    fn eval(&self, z: C) -> (C, C) {
        let mut v = C::new(0.0, 0.0);
        let mut d = C::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    }

    fn leading_exponent(&self) -> f64 {
        self.coeffs.iter().position(|c| c.norm() != 0.0).unwrap_or(0) as f64
    }

    fn radius(&self) -> f64 {
        self.radius
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct XiRugosity {
    /// `e(g∘μ)` computed on the image curve.
    pub direct: f64,
    /// `e_z(μ)`.
    pub base: f64,
    /// Fitted constant: `max |arg(ψ(z)/(ν/p))| / |z|` over the sampled region.
    pub c_g: f64,
    /// `‖μ‖_z`.
    pub size: f64,
    /// `{{e_z(μ) + C_g‖μ‖_z}}`.
    pub bound: f64,
    pub holds: bool,
}

/// Rugosity of `g∘μ` together with the bound `{{e_z(μ) + C_g‖μ‖_z}}`.
///
/// `C_g` is estimated from `ψ = z g′/g` sampled on a polar grid of the disc of
/// definition and on the curve itself.
pub fn xi_rugosity(curve: &PACurve, g: &dyn HoloMap) -> Result<XiRugosity, RugosityError> {
    let sz = size(curve, |z| z);
    if sz > g.radius() {
        return Err(RugosityError::SectorViolation { size: sz, radius: g.radius() });
    }
    let nu = g.leading_exponent();
    let psi_arg = |z: C| -> Result<f64, RugosityError> {
        let (v, d) = g.eval(z);
        if v.norm() == 0.0 {
            return Err(RugosityError::MapVanishes);
        }
        Ok(((z * d / v) / nu).arg().abs())
    };
    let mut c_g: f64 = 0.0;
    for i in 0..40 {
        let r = g.radius() * 0.7f64.powi(i);
        for j in 0..256 {
            let z = C::from_polar(r, std::f64::consts::TAU * j as f64 / 256.0);
            c_g = c_g.max(psi_arg(z)? / r);
        }
    }
    for (z, _) in curve.samples() {
        for zi in z {
            c_g = c_g.max(psi_arg(zi)? / zi.norm());
        }
    }
    let image = curve.map(g)?;
    let direct = rugosity(&image)?;
    let base = rugosity(curve)?;
    let bound = brace(base + c_g * sz);
    // Rounding slack for the sum of arguments.
    let holds = direct <= bound + 1e-12;
    Ok(XiRugosity { direct, base, c_g, size: sz, bound, holds })
}
