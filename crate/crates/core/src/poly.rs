//! Exact bivariate and univariate polynomials over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial in `x`, `y`: map from `(deg_x, deg_y)` to a nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q) -> Self {
        Poly::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn x() -> Self {
        Poly::monomial(1, 0, Q::one())
    }

    pub fn y() -> Self {
        Poly::monomial(0, 1, Q::one())
    }

    pub fn monomial(i: u32, j: u32, c: Q) -> Self {
        let mut p = Poly::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Q)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for ((i, j), c) in it {
            p.add_term(i, j, c);
        }
        p
    }

    fn add_term(&mut self, i: u32, j: u32, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Q {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(0, 0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i == 0 && j == 0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// Order of vanishing at the origin (lowest total degree); `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    /// Largest `k` with `x^k` dividing the polynomial.
    pub fn x_valuation(&self) -> u32 {
        self.terms.keys().map(|k| k.0).min().unwrap_or(0)
    }

    pub fn y_valuation(&self) -> u32 {
        self.terms.keys().map(|k| k.1).min().unwrap_or(0)
    }

    /// Divide by `x^a y^b`; the caller guarantees divisibility.
    pub fn div_monomial(&self, a: u32, b: u32) -> Self {
        Poly::from_terms(self.terms.iter().map(|(&(i, j), c)| {
            assert!(i >= a && j >= b, "monomial does not divide");
            ((i - a, j - b), c.clone())
        }))
    }

    pub fn mul_monomial(&self, a: u32, b: u32) -> Self {
        Poly::from_terms(self.terms.iter().map(|(&(i, j), c)| ((i + a, j + b), c.clone())))
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(&(i, j), _)| i + j == d)
                .map(|(&k, c)| (k, c.clone())),
        )
    }

    pub fn scale(&self, c: &Q) -> Self {
        Poly::from_terms(self.terms.iter().map(|(&k, v)| (k, v * c)))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn dx(&self) -> Self {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(&(i, _), _)| i > 0)
                .map(|(&(i, j), c)| ((i - 1, j), c * q(i as i64))),
        )
    }

    pub fn dy(&self) -> Self {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(&(_, j), _)| j > 0)
                .map(|(&(i, j), c)| ((i, j - 1), c * q(j as i64))),
        )
    }

    pub fn eval(&self, x: &Q, y: &Q) -> Q {
        let mut s = Q::zero();
        for (&(i, j), c) in &self.terms {
            s += c * pow_q(x, i) * pow_q(y, j);
        }
        s
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| q_to_f64(c) * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    /// Substitute `x -> x + a`, `y -> y + b`.
    pub fn translate(&self, a: &Q, b: &Q) -> Self {
        let xa = &Poly::x() + &Poly::constant(a.clone());
        let yb = &Poly::y() + &Poly::constant(b.clone());
        self.compose(&xa, &yb)
    }

    /// Substitute `x -> px`, `y -> py`.
    pub fn compose(&self, px: &Poly, py: &Poly) -> Self {
        let mut xp: Vec<Poly> = vec![Poly::one()];
        let mut yp: Vec<Poly> = vec![Poly::one()];
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            while xp.len() <= i as usize {
                let n = &xp[xp.len() - 1] * px;
                xp.push(n);
            }
            while yp.len() <= j as usize {
                let n = &yp[yp.len() - 1] * py;
                yp.push(n);
            }
            out = &out + &(&xp[i as usize] * &yp[j as usize]).scale(c);
        }
        out
    }

    /// Chart map `(x, y) -> (x, x y)`.
    pub fn chart1(&self) -> Self {
        Poly::from_terms(self.terms.iter().map(|(&(i, j), c)| ((i + j, j), c.clone())))
    }

    /// Chart map `(x, y) -> (x y, y)`.
    pub fn chart2(&self) -> Self {
        Poly::from_terms(self.terms.iter().map(|(&(i, j), c)| ((i, i + j), c.clone())))
    }

    /// Restriction to `x = 0` as a univariate polynomial in `y`.
    pub fn on_x_axis_zero(&self) -> UPoly {
        let mut c = vec![Q::zero(); self.degree_y() as usize + 1];
        for (&(i, j), v) in &self.terms {
            if i == 0 {
                c[j as usize] = v.clone();
            }
        }
        UPoly::new(c)
    }

    /// Restriction to `y = 0` as a univariate polynomial in `x`.
    pub fn on_y_axis_zero(&self) -> UPoly {
        let mut c = vec![Q::zero(); self.degree_x() as usize + 1];
        for (&(i, j), v) in &self.terms {
            if j == 0 {
                c[i as usize] = v.clone();
            }
        }
        UPoly::new(c)
    }

    /// Dehomogenize a form of degree `d` at `x = 1`: `P(1, t)`.
    pub fn dehomogenize(&self) -> UPoly {
        let mut c = vec![Q::zero(); self.degree_y() as usize + 1];
        for (&(_, j), v) in &self.terms {
            c[j as usize] += v;
        }
        UPoly::new(c)
    }

    /// View as a polynomial in `y` with coefficients in `Q[x]`.
    fn to_yx(&self) -> Vec<UPoly> {
        let mut rows = vec![UPoly::zero(); self.degree_y() as usize + 1];
        for (&(i, j), c) in &self.terms {
            let r = &mut rows[j as usize];
            r.set(i as usize, c.clone());
        }
        rows
    }

    fn from_yx(rows: &[UPoly]) -> Self {
        let mut p = Poly::zero();
        for (j, r) in rows.iter().enumerate() {
            for (i, c) in r.coeffs().iter().enumerate() {
                p.add_term(i as u32, j as u32, c.clone());
            }
        }
        p
    }

    /// Greatest common divisor, normalized to have leading coefficient 1.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.normalized();
        }
        if other.is_zero() {
            return self.normalized();
        }
        let a = self.to_yx();
        let b = other.to_yx();
        Poly::from_yx(&gcd_yx(a, b)).normalized()
    }

    /// Scale so that the leading term (largest key) has coefficient 1.
    pub fn normalized(&self) -> Poly {
        match self.terms.iter().next_back() {
            None => Poly::zero(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Square-free over Q iff `gcd(f, f_x, f_y)` is a constant.
    pub fn is_square_free(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let g = self.gcd(&self.dx()).gcd(&self.dy());
        g.is_constant()
    }
}

pub fn pow_q(x: &Q, n: u32) -> Q {
    let mut r = Q::one();
    for _ in 0..n {
        r *= x;
    }
    r
}

pub fn q_to_f64(c: &Q) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

fn gcd_yx(a: Vec<UPoly>, b: Vec<UPoly>) -> Vec<UPoly> {
    let (ca, pa) = content_primitive(a);
    let (cb, pb) = content_primitive(b);
    let c = ca.gcd(&cb);
    let (mut f, mut g) = if pa.len() >= pb.len() { (pa, pb) } else { (pb, pa) };
    while !(g.len() == 1 && g[0].is_zero()) && !g.is_empty() {
        if g.len() == 1 {
            // g is a nonzero element of Q[x] and primitive, hence a unit.
            f = vec![UPoly::one()];
            break;
        }
        let r = prem_yx(&f, &g);
        f = g;
        g = if r.is_empty() { vec![UPoly::zero()] } else { content_primitive(r).1 };
    }
    let (_, pf) = content_primitive(f);
    pf.into_iter().map(|r| &r * &c).collect()
}

fn trim_yx(mut v: Vec<UPoly>) -> Vec<UPoly> {
    while v.len() > 1 && v.last().is_some_and(|p| p.is_zero()) {
        v.pop();
    }
    v
}

fn content_primitive(v: Vec<UPoly>) -> (UPoly, Vec<UPoly>) {
    let v = trim_yx(v);
    let mut c = UPoly::zero();
    for r in &v {
        c = c.gcd(r);
    }
    if c.is_zero() {
        return (UPoly::one(), v);
    }
    let p = v.iter().map(|r| r.div_exact(&c)).collect();
    (c, p)
}

/// Pseudo-remainder of `f` by `g` as polynomials in `y` over `Q[x]`.
fn prem_yx(f: &[UPoly], g: &[UPoly]) -> Vec<UPoly> {
    let mut r: Vec<UPoly> = trim_yx(f.to_vec());
    let g = trim_yx(g.to_vec());
    let dg = g.len() - 1;
    let lg = g[dg].clone();
    while r.len() > dg && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - dg;
        let mut nr: Vec<UPoly> = r.iter().map(|c| c * &lg).collect();
        for (k, gc) in g.iter().enumerate() {
            nr[k + shift] = &nr[k + shift] - &(gc * &lr);
        }
        nr.pop();
        r = trim_yx(nr);
        if r.iter().all(|c| c.is_zero()) {
            return Vec::new();
        }
    }
    r
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.terms.iter().collect();
        keys.sort_by(|a, b| {
            let (ia, ja) = *a.0;
            let (ib, jb) = *b.0;
            (ib + jb).cmp(&(ia + ja)).then(ib.cmp(&ia))
        });
        for (n, (&(i, j), c)) in keys.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = monomial_str(i, j);
            if mono.is_empty() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", a, mono)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

fn monomial_str(i: u32, j: u32) -> String {
    let part = |v: &str, e: u32| match e {
        0 => String::new(),
        1 => v.to_string(),
        e => format!("{}^{}", v, e),
    };
    let (a, b) = (part("x", i), part("y", j));
    match (a.is_empty(), b.is_empty()) {
        (true, _) => b,
        (_, true) => a,
        _ => format!("{}*{}", a, b),
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (&(i, j), c) in &o.terms {
            p.add_term(i, j, c.clone());
        }
        p
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (&(i, j), c) in &o.terms {
            p.add_term(i, j, -c.clone());
        }
        p
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut p = Poly::zero();
        for (&(i, j), c) in &self.terms {
            for (&(k, l), d) in &o.terms {
                p.add_term(i + k, j + l, c * d);
            }
        }
        p
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(&k, c)| (k, -c.clone())))
    }
}

/// Dense univariate polynomial, coefficients in ascending degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UPoly {
    c: Vec<Q>,
}

impl UPoly {
    pub fn new(c: Vec<Q>) -> Self {
        let mut p = UPoly { c };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        UPoly { c: vec![Q::one()] }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UPoly::new(c.iter().map(|&v| q(v)).collect())
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(|v| v.is_zero()) {
            self.c.pop();
        }
    }

    fn set(&mut self, i: usize, v: Q) {
        if self.c.len() <= i {
            self.c.resize(i + 1, Q::zero());
        }
        self.c[i] = v;
        self.trim();
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, t: &Q) -> Q {
        let mut acc = Q::zero();
        for v in self.c.iter().rev() {
            acc = acc * t + v;
        }
        acc
    }

    /// Lowest index with nonzero coefficient.
    pub fn valuation(&self) -> usize {
        self.c.iter().position(|v| !v.is_zero()).unwrap_or(0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().recip();
        UPoly::new(self.c.iter().map(|v| v * &l).collect())
    }

    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.c.clone();
        let dd = d.degree();
        let ld = d.lead();
        if self.c.len() < d.c.len() {
            return (UPoly::zero(), self.clone());
        }
        let mut qv = vec![Q::zero(); self.c.len() - dd];
        for k in (0..qv.len()).rev() {
            let coef = &r[k + dd] / &ld;
            if !coef.is_zero() {
                for (i, dc) in d.c.iter().enumerate() {
                    r[k + i] -= &coef * dc;
                }
            }
            qv[k] = coef;
        }
        r.truncate(dd);
        (UPoly::new(qv), UPoly::new(r))
    }

    pub fn div_exact(&self, d: &UPoly) -> UPoly {
        let (qt, r) = self.divrem(d);
        debug_assert!(r.is_zero(), "inexact division");
        qt
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, v)| v * q(i as i64))
                .collect(),
        )
    }

    /// Integer primitive form: positive leading coefficient, coprime integer coefficients.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut l = BigInt::one();
        for v in &self.c {
            l = l.lcm(v.denom());
        }
        let mut ints: Vec<BigInt> = self.c.iter().map(|v| (v * Q::from_integer(l.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        if ints.last().is_some_and(|v| v.is_negative()) {
            g = -g;
        }
        for v in ints.iter_mut() {
            *v = &*v / &g;
        }
        ints
    }

    /// All rational roots with multiplicity, ascending, plus the cofactor
    /// without rational roots.
    pub fn rational_roots(&self) -> (Vec<(Q, u32)>, UPoly) {
        let mut rest = self.clone();
        let mut roots: Vec<(Q, u32)> = Vec::new();
        if rest.is_zero() {
            return (roots, rest);
        }
        let v = rest.valuation();
        if v > 0 {
            roots.push((Q::zero(), v as u32));
            rest = UPoly::new(rest.c[v..].to_vec());
        }
        let ints = rest.primitive_integer();
        let (a0, an) = (ints[0].abs(), ints[ints.len() - 1].abs());
        let mut cands: Vec<Q> = Vec::new();
        if rest.degree() > 0 {
            let ps = divisors(&a0);
            let qs = divisors(&an);
            for p in &ps {
                for d in &qs {
                    let r = Q::new(p.clone(), d.clone());
                    cands.push(r.clone());
                    cands.push(-r);
                }
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            let lin = UPoly::new(vec![-r.clone(), Q::one()]);
            let mut m = 0;
            loop {
                if rest.degree() == 0 {
                    break;
                }
                let (qt, rem) = rest.divrem(&lin);
                if !rem.is_zero() {
                    break;
                }
                rest = qt;
                m += 1;
            }
            if m > 0 {
                roots.push((r, m));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, rest)
    }

    pub fn to_string_in(&self, var: &str) -> String {
        let mut p = Poly::zero();
        for (i, v) in self.c.iter().enumerate() {
            p.add_term(0, i as u32, v.clone());
        }
        p.to_string().replace('y', var)
    }
}

impl Add for &UPoly {
    type Output = UPoly;
    fn add(self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::new(
            (0..n)
                .map(|i| {
                    self.c.get(i).cloned().unwrap_or_else(Q::zero) + o.c.get(i).cloned().unwrap_or_else(Q::zero)
                })
                .collect(),
        )
    }
}

impl Sub for &UPoly {
    type Output = UPoly;
    fn sub(self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::new(
            (0..n)
                .map(|i| {
                    self.c.get(i).cloned().unwrap_or_else(Q::zero) - o.c.get(i).cloned().unwrap_or_else(Q::zero)
                })
                .collect(),
        )
    }
}

impl Mul for &UPoly {
    type Output = UPoly;
    fn mul(self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut r = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        UPoly::new(r)
    }
}

/// Positive divisors of a nonzero integer (trial division).
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let e = &n / &d;
            if e != d {
                large.push(e);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorSearch {
    /// A proper factor over the integers was found.
    Factor(Vec<BigInt>),
    /// No factor of degree up to half the degree exists.
    Irreducible,
    /// Search budget exhausted.
    Unknown,
}

/// Kronecker search for an integer factor of a primitive integer polynomial
/// without rational roots.
pub fn kronecker_factor(f: &[BigInt], budget: usize) -> FactorSearch {
    let deg = f.len() - 1;
    if deg <= 3 {
        return FactorSearch::Irreducible;
    }
    let eval = |c: &[BigInt], t: i64| -> BigInt {
        let mut acc = BigInt::zero();
        for v in c.iter().rev() {
            acc = acc * BigInt::from(t) + v;
        }
        acc
    };
    let fu = UPoly::new(f.iter().map(|v| Q::from_integer(v.clone())).collect());
    let mut spent = 0usize;
    for d in 2..=deg / 2 {
        let pts: Vec<i64> = (0..=d as i64).map(|k| if k % 2 == 0 { -(k / 2) } else { (k + 1) / 2 }).collect();
        let vals: Vec<BigInt> = pts.iter().map(|&t| eval(f, t)).collect();
        if vals.iter().any(|v| v.is_zero()) {
            return FactorSearch::Unknown;
        }
        let divs: Vec<Vec<BigInt>> = vals
            .iter()
            .map(|v| {
                let ds = divisors(v);
                let mut s: Vec<BigInt> = ds.iter().cloned().collect();
                s.extend(ds.iter().map(|x| -x));
                s
            })
            .collect();
        let mut idx = vec![0usize; d + 1];
        loop {
            spent += 1;
            if spent > budget {
                return FactorSearch::Unknown;
            }
            let ys: Vec<Q> = idx.iter().enumerate().map(|(k, &i)| Q::from_integer(divs[k][i].clone())).collect();
            let xs: Vec<Q> = pts.iter().map(|&t| q(t)).collect();
            let g = lagrange(&xs, &ys);
            if g.degree() == d && g.coeffs().iter().all(|c| c.is_integer()) {
                let (_, r) = fu.divrem(&g);
                if r.is_zero() {
                    return FactorSearch::Factor(g.primitive_integer());
                }
            }
            let mut k = 0;
            loop {
                if k > d {
                    break;
                }
                idx[k] += 1;
                if idx[k] < divs[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k > d {
                break;
            }
        }
    }
    FactorSearch::Irreducible
}

fn lagrange(xs: &[Q], ys: &[Q]) -> UPoly {
    let mut acc = UPoly::zero();
    for (i, xi) in xs.iter().enumerate() {
        let mut basis = UPoly::one();
        let mut den = Q::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = &basis * &UPoly::new(vec![-xj.clone(), Q::one()]);
                den *= xi - xj;
            }
        }
        let s = &ys[i] / den;
        acc = &acc + &UPoly::new(basis.c.iter().map(|c| c * &s).collect());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        crate::parse::parse_poly(s).unwrap()
    }

    #[test]
    fn chart_substitutions() {
        let cusp = p("y^2 - x^3");
        assert_eq!(cusp.chart1(), p("x^2*y^2 - x^3"));
        assert_eq!(cusp.chart2(), p("y^2 - x^3*y^3"));
    }

    #[test]
    fn gcd_detects_repeated_factor() {
        assert_eq!(p("y^2").gcd(&p("2*y")), p("y"));
        let f = p("(y - x)^2*(y + x)");
        assert_eq!(f.gcd(&f.dx()).gcd(&f.dy()), p("x - y"));
        assert!(!f.is_square_free());
        assert!(p("y^2 - x^3").is_square_free());
        assert!(p("x*y*(y - x)").is_square_free());
    }

    #[test]
    fn gcd_bivariate_common_factor() {
        let a = p("(x^2 + y)*(x - y^3)");
        let b = p("(x^2 + y)*(1 + x*y)");
        assert_eq!(a.gcd(&b), p("x^2 + y"));
        assert!(a.gcd(&p("x + 1")).is_constant());
    }

    #[test]
    fn translation_and_order() {
        let f = p("y^2 - x^3");
        let g = f.translate(&q(1), &q(1));
        assert_eq!(g.constant_term(), q(0));
        assert_eq!(g.order(), Some(1));
        assert_eq!(f.order(), Some(2));
        assert_eq!(f.homogeneous_part(2), p("y^2"));
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        let u = UPoly::from_ints(&[0, 0, -2, 1, 1]);
        let (roots, rest) = u.rational_roots();
        assert_eq!(roots, vec![(q(-2), 1), (q(0), 2), (q(1), 1)]);
        assert_eq!(rest.degree(), 0);
        let v = UPoly::new(vec![qr(-1, 4), q(0), q(1)]);
        assert_eq!(v.rational_roots().0, vec![(qr(-1, 2), 1), (qr(1, 2), 1)]);
        let w = UPoly::from_ints(&[-2, 0, 1]);
        let (r, rest) = w.rational_roots();
        assert!(r.is_empty());
        assert_eq!(rest.degree(), 2);
    }

    #[test]
    fn kronecker_splits_quartic() {
        // (t^2 - 2)(t^2 + 1)
        let f: Vec<BigInt> = [-2, 0, -1, 0, 1].iter().map(|&v| BigInt::from(v)).collect();
        match kronecker_factor(&f, 1_000_000) {
            FactorSearch::Factor(g) => assert_eq!(g.len(), 3),
            other => panic!("{:?}", other),
        }
        let irr: Vec<BigInt> = [2, 0, 0, 0, 1].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(kronecker_factor(&irr, 1_000_000), FactorSearch::Irreducible);
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(p("x^3*(-1) + y^2").to_string(), "-x^3 + y^2");
        assert_eq!(p("1/2*x*y - 3").to_string(), "1/2*x*y - 3");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn float_conversion_of_huge_fraction() {
        let big = Q::new(BigInt::from(10).pow(400u32), BigInt::from(3) * BigInt::from(10).pow(399u32));
        assert!((q_to_f64(&big) - 10.0 / 3.0).abs() < 1e-12);
    }
}
