//! Lunules of the symmetric difference of a star domain and its holonomy image.

use std::f64::consts::TAU;
use std::fmt;

use thiserror::Error;

use crate::star::StarDomain;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LunuleError {
    #[error("the domain is contained in its image")]
    DomainInsideImage,
    #[error("the image is contained in the domain")]
    ImageInsideDomain,
    #[error("lunule {0} carries both orientations")]
    MixedOrientation(usize),
}

/// Which of the two non-saturation behaviours holds on a lunule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    /// The domain is the outer boundary: forward flow enters, backward leaves.
    A,
    /// The image is the outer boundary: backward flow enters, forward leaves.
    B,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::A => "a",
            Tag::B => "b",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lunule {
    /// 1-based index `j` of the interval `I_j`.
    pub index: usize,
    pub start: f64,
    pub end: f64,
    /// Interior nonempty above the resolution.
    pub nondegenerate: bool,
    pub tag: Option<Tag>,
    /// Largest gap between the two radial functions on the interval.
    pub width: f64,
}

#[derive(Clone, Debug)]
pub struct LunuleDecomposition {
    /// `θ_0 < … < θ_q = θ_0 + 2π`; empty when both domains coincide.
    pub angles: Vec<f64>,
    pub lunules: Vec<Lunule>,
    pub resolution: f64,
    delta: StarDomain,
    image: StarDomain,
}

impl LunuleDecomposition {
    pub fn is_empty(&self) -> bool {
        self.lunules.is_empty()
    }

    pub fn q(&self) -> usize {
        self.lunules.len()
    }

    /// Indices of nondegenerate lunules.
    pub fn k_set(&self) -> Vec<usize> {
        self.lunules.iter().filter(|l| l.nondegenerate).map(|l| l.index).collect()
    }

    /// `ρ_j(θ) = min` of the two radial functions.
    pub fn inner(&self, theta: f64) -> f64 {
        self.delta.radius(theta).min(self.image.radius(theta))
    }

    /// `ρ̃_j(θ) = max` of the two radial functions.
    pub fn outer(&self, theta: f64) -> f64 {
        self.delta.radius(theta).max(self.image.radius(theta))
    }

    /// Rows `j,theta_start,theta_end,rho_inner,rho_outer,tag` with radii at the midpoint.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,theta_start,theta_end,rho_inner,rho_outer,tag\n");
        for l in &self.lunules {
            let mid = 0.5 * (l.start + l.end);
            let tag = l.tag.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
            out += &format!(
                "{},{:.12},{:.12},{:.15e},{:.15e},{}\n",
                l.index,
                l.start,
                l.end,
                self.inner(mid),
                self.outer(mid),
                tag
            );
        }
        out
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= 1e-14 {
            break;
        }
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Splits `Δ △ hΔ` into lunules over the crossing angles of the radial functions.
pub fn lunule_decomposition(delta: &StarDomain, image: &StarDomain) -> Result<LunuleDecomposition, LunuleError> {
    let n = delta.samples().max(image.samples());
    let thetas: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    let gap = |t: f64| image.radius(t) - delta.radius(t);
    let scale = thetas.iter().map(|&t| delta.radius(t).max(image.radius(t))).fold(0.0, f64::max);
    let res = 1e-9 * scale;
    let f: Vec<f64> = thetas.iter().map(|&t| gap(t)).collect();
    let class: Vec<i8> = f
        .iter()
        .map(|&v| if v > res { 1 } else if v < -res { -1 } else { 0 })
        .collect();
    let empty = LunuleDecomposition {
        angles: Vec::new(),
        lunules: Vec::new(),
        resolution: res,
        delta: delta.clone(),
        image: image.clone(),
    };
    if class.iter().all(|&c| c == 0) {
        return Ok(empty);
    }
    if !class.contains(&-1) {
        return Err(LunuleError::DomainInsideImage);
    }
    if !class.contains(&1) {
        return Err(LunuleError::ImageInsideDomain);
    }
    // Runs of equal class, cyclically, starting where a nonzero run begins.
    let start = (0..n)
        .find(|&i| class[i] != 0 && class[(i + n - 1) % n] != class[i])
        .expect("both signs occur");
    let mut runs: Vec<(i8, usize, usize)> = Vec::new();
    for s in 0..n {
        let i = (start + s) % n;
        match runs.last_mut() {
            Some((c, _, len)) if *c == class[i] => *len += 1,
            _ => runs.push((class[i], start + s, 1)),
        }
    }
    let angle = |k: usize| TAU * k as f64 / n as f64;
    let mut cuts = Vec::new();
    let m = runs.len();
    let mut r = 0;
    while r < m {
        let (c, first, len) = runs[r];
        debug_assert!(c != 0);
        let last = first + len - 1;
        let next = (r + 1) % m;
        let (nc, nfirst, nlen) = runs[next];
        let nfirst = if next == 0 { nfirst + n } else { nfirst };
        if nc != 0 {
            debug_assert!(nc != c);
            cuts.push(bisect(gap, angle(last), angle(nfirst)));
            r += 1;
            continue;
        }
        let after = (r + 2) % m;
        let (ac, afirst, _) = runs[after];
        let afirst = if r + 2 >= m { afirst + n } else { afirst };
        if nlen == 1 {
            if ac != c {
                cuts.push(bisect(gap, angle(last), angle(afirst)));
            }
        } else {
            let band = |t: f64| gap(t).abs() - res;
            cuts.push(bisect(band, angle(last), angle(nfirst)));
            cuts.push(bisect(band, angle(nfirst + nlen - 1), angle(afirst)));
        }
        r += 2;
    }
    let mut angles: Vec<f64> = cuts.into_iter().map(|t| t.rem_euclid(TAU)).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    if angles.len() < 2 {
        return Ok(empty);
    }
    let theta0 = angles[0];
    angles.push(theta0 + TAU);
    let mut lunules = Vec::new();
    for j in 1..angles.len() {
        let (a, b) = (angles[j - 1], angles[j]);
        let mut width: f64 = 0.0;
        let mut signs = (false, false);
        let probe = |t: f64, width: &mut f64, signs: &mut (bool, bool)| {
            let g = gap(t);
            if g.abs() > res {
                *width = width.max(g.abs());
                if g > 0.0 {
                    signs.0 = true;
                } else {
                    signs.1 = true;
                }
            }
        };
        let k0 = (a / TAU * n as f64).ceil() as usize;
        let mut k = k0;
        while angle(k) < b {
            if angle(k) > a {
                probe(angle(k), &mut width, &mut signs);
            }
            k += 1;
        }
        probe(0.5 * (a + b), &mut width, &mut signs);
        if signs.0 && signs.1 {
            return Err(LunuleError::MixedOrientation(j));
        }
        let nondegenerate = signs.0 || signs.1;
        let tag = if signs.0 {
            Some(Tag::B)
        } else if signs.1 {
            Some(Tag::A)
        } else {
            None
        };
        lunules.push(Lunule { index: j, start: a, end: b, nondegenerate, tag, width });
    }
    Ok(LunuleDecomposition { angles, lunules, resolution: res, delta: delta.clone(), image: image.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cosine_perturbation() {
        let d = StarDomain::disc(1.0).unwrap();
        let h = StarDomain::perturbed_circle(1.0, &[(1, 0.1, 0.0)]).unwrap();
        let l = lunule_decomposition(&d, &h).unwrap();
        assert_eq!(l.q(), 2);
        assert!((l.angles[0] - PI / 2.0).abs() < 1e-10);
        assert!((l.angles[1] - 3.0 * PI / 2.0).abs() < 1e-10);
        assert_eq!(l.k_set(), vec![1, 2]);
        assert_eq!(l.lunules[0].tag, Some(Tag::A));
        assert_eq!(l.lunules[1].tag, Some(Tag::B));
        assert!(l.to_csv().lines().count() == 3);
    }

    #[test]
    fn equal_and_contained() {
        let d = StarDomain::perturbed_circle(1.0, &[(2, 0.1, 0.0)]).unwrap();
        assert!(lunule_decomposition(&d, &d).unwrap().is_empty());
        let small = StarDomain::perturbed_circle(0.9, &[(2, 0.1, 0.0)]).unwrap();
        assert_eq!(lunule_decomposition(&d, &small).unwrap_err(), LunuleError::ImageInsideDomain);
        assert_eq!(lunule_decomposition(&small, &d).unwrap_err(), LunuleError::DomainInsideImage);
    }

    #[test]
    fn degenerate_stretch_becomes_its_own_interval() {
        let d = StarDomain::disc(1.0).unwrap();
        // Outward on (0, π), equal on [π, 3π/2], inward on (3π/2, 2π).
        let h = StarDomain::from_fn(|t: f64| {
            let t = t.rem_euclid(TAU);
            if t < PI {
                (1.0 + 0.1 * t.sin(), 0.1 * t.cos())
            } else if t < 1.5 * PI {
                (1.0, 0.0)
            } else {
                let u = 2.0 * (t - 1.5 * PI);
                (1.0 - 0.1 * u.sin(), -0.2 * u.cos())
            }
        })
        .unwrap();
        let l = lunule_decomposition(&d, &h).unwrap();
        let degenerate: Vec<_> = l.lunules.iter().filter(|x| !x.nondegenerate).collect();
        assert_eq!(degenerate.len(), 1);
        assert!(l.k_set().len() >= 2);
        let tags: Vec<_> = l.lunules.iter().filter_map(|x| x.tag).collect();
        assert!(tags.contains(&Tag::A) && tags.contains(&Tag::B));
    }
}
