//! Adaptive Dormand–Prince 5(4) integration of holomorphic vector fields on C^2
//! along piecewise-linear complex-time paths.

use num_complex::Complex64 as C;
use thiserror::Error;

pub type State = [C; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("trajectory left the domain at t = {t} (|x| = {ax:.3e}, |y| = {ay:.3e})")]
    LeftDomain { t: C, ax: f64, ay: f64 },
    #[error("field denominator vanishes at t = {t} (|g| = {g:.3e})")]
    SingularField { t: C, g: f64 },
    #[error("step cap of {0} steps reached")]
    StepCap(usize),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(C),
    #[error("non-finite state at t = {0}")]
    NonFinite(C),
    #[error("event not reached along the path")]
    NoEvent,
    #[error("{0}")]
    Domain(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Largest step in path arclength.
    pub h_max: f64,
    pub record: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-13, max_steps: 1_000_000, h_max: 0.25, record: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: C,
    pub z: State,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Stats {
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest normalized local error estimate among accepted steps (<= 1).
    pub max_local_error: f64,
}

impl Stats {
    fn absorb(&mut self, o: &Stats) {
        self.steps += o.steps;
        self.rejected += o.rejected;
        self.evaluations += o.evaluations;
        self.max_local_error = self.max_local_error.max(o.max_local_error);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub samples: Vec<Sample>,
    pub end: Sample,
    pub event_hit: bool,
    pub stats: Stats,
}

/// Vector field with a domain guard.
pub trait Field {
    fn eval(&self, z: &State) -> Result<State, FlowError>;
    fn guard(&self, _t: C, _z: &State) -> Result<(), FlowError> {
        Ok(())
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn lin(z: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *z;
    for (c, k) in terms {
        out[0] += k[0] * (c * h);
        out[1] += k[1] * (c * h);
    }
    out
}

struct Stepper<'a, F: Field + ?Sized> {
    f: &'a F,
    dir: C,
    evals: usize,
}

impl<F: Field + ?Sized> Stepper<'_, F> {
    fn rhs(&mut self, z: &State) -> Result<State, FlowError> {
        self.evals += 1;
        let v = self.f.eval(z)?;
        Ok([v[0] * self.dir, v[1] * self.dir])
    }

    /// One DP5 step of size `h` from `z` with derivative `k1`; returns the new
    /// state, its derivative and the error vector.
    fn step(&mut self, z: &State, k1: &State, h: f64) -> Result<(State, State, State), FlowError> {
        let k2 = self.rhs(&lin(z, &[(A21, k1)], h))?;
        let k3 = self.rhs(&lin(z, &[(A31, k1), (A32, &k2)], h))?;
        let k4 = self.rhs(&lin(z, &[(A41, k1), (A42, &k2), (A43, &k3)], h))?;
        let k5 = self.rhs(&lin(z, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)], h))?;
        let k6 = self.rhs(&lin(z, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h))?;
        let zn = lin(z, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = self.rhs(&zn)?;
        let mut err = [C::new(0.0, 0.0); 2];
        for i in 0..2 {
            err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        }
        Ok((zn, k7, err))
    }
}

fn err_norm(z: &State, zn: &State, e: &State, o: &OdeOptions) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        let sc = o.atol + o.rtol * z[i].norm().max(zn[i].norm());
        s += (e[i].norm() / sc).powi(2);
    }
    (s / 2.0).sqrt()
}

/// Cubic Hermite interpolation on a step of length `h` at fraction `th`.
fn hermite(z0: &State, f0: &State, z1: &State, f1: &State, h: f64, th: f64) -> State {
    let h00 = 2.0 * th.powi(3) - 3.0 * th * th + 1.0;
    let h10 = th.powi(3) - 2.0 * th * th + th;
    let h01 = -2.0 * th.powi(3) + 3.0 * th * th;
    let h11 = th.powi(3) - th * th;
    let mut out = [C::new(0.0, 0.0); 2];
    for i in 0..2 {
        out[i] = z0[i] * h00 + f0[i] * (h10 * h) + z1[i] * h01 + f1[i] * (h11 * h);
    }
    out
}

fn finite(z: &State) -> bool {
    z.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Integrate along the polyline `path` (complex times). With `event`, stop at
/// the first sign change of `event(z)` from negative to nonnegative.
pub fn integrate<F: Field + ?Sized>(
    f: &F,
    z0: State,
    path: &[C],
    opts: &OdeOptions,
    event: Option<&dyn Fn(&State) -> f64>,
) -> Result<Outcome, FlowError> {
    let mut samples = Vec::new();
    let mut stats = Stats::default();
    let mut z = z0;
    let t0 = path.first().copied().unwrap_or(C::new(0.0, 0.0));
    if opts.record {
        samples.push(Sample { t: t0, z });
    }
    let mut t_end = t0;
    for w in path.windows(2) {
        let seg = integrate_segment(f, z, w[0], w[1], opts, event, &mut samples)?;
        stats.absorb(&seg.stats);
        z = seg.end.z;
        t_end = seg.end.t;
        if seg.event_hit {
            return Ok(Outcome { samples, end: seg.end, event_hit: true, stats });
        }
        if stats.steps > opts.max_steps {
            return Err(FlowError::StepCap(opts.max_steps));
        }
    }
    Ok(Outcome { samples, end: Sample { t: t_end, z }, event_hit: false, stats })
}

fn integrate_segment<F: Field + ?Sized>(
    f: &F,
    z0: State,
    ta: C,
    tb: C,
    opts: &OdeOptions,
    event: Option<&dyn Fn(&State) -> f64>,
    samples: &mut Vec<Sample>,
) -> Result<Outcome, FlowError> {
    let len = (tb - ta).norm();
    let mut stats = Stats::default();
    if len == 0.0 {
        return Ok(Outcome { samples: Vec::new(), end: Sample { t: ta, z: z0 }, event_hit: false, stats });
    }
    let dir = (tb - ta) / len;
    let mut st = Stepper { f, dir, evals: 0 };
    let mut s = 0.0;
    let mut z = z0;
    let mut k1 = st.rhs(&z)?;
    f.guard(ta, &z)?;
    let mut g_prev = event.map(|e| e(&z));
    // Initial step from the derivative scale.
    let scale = (z[0].norm() + z[1].norm()).max(opts.atol / opts.rtol);
    let dn = (k1[0].norm() + k1[1].norm()).max(1e-300);
    let mut h = (0.01 * scale / dn).min(opts.h_max).min(len).max(1e-12 * len);
    loop {
        if s >= len {
            break;
        }
        if stats.steps >= opts.max_steps {
            return Err(FlowError::StepCap(opts.max_steps));
        }
        let last = s + h >= len * (1.0 - 1e-14);
        let hh = if last { len - s } else { h };
        let (zn, kn, e) = st.step(&z, &k1, hh)?;
        let en = err_norm(&z, &zn, &e, opts);
        if !en.is_finite() || !finite(&zn) {
            stats.rejected += 1;
            h = hh * 0.2;
            if h < 1e-14 * len.max(1.0) {
                return Err(FlowError::NonFinite(ta + dir * s));
            }
            continue;
        }
        if en > 1.0 {
            stats.rejected += 1;
            h = hh * (0.9 * en.powf(-0.2)).clamp(0.2, 1.0);
            if h < 1e-14 * len.max(1.0) {
                return Err(FlowError::StepUnderflow(ta + dir * s));
            }
            continue;
        }
        stats.steps += 1;
        stats.max_local_error = stats.max_local_error.max(en);
        if let (Some(ev), Some(gp)) = (event, g_prev) {
            let gn = ev(&zn);
            if gp < 0.0 && gn >= 0.0 {
                let (tz, zz) = locate_event(&mut st, ev, &z, &k1, &zn, &kn, hh)?;
                let t_hit = ta + dir * (s + tz);
                f.guard(t_hit, &zz)?;
                stats.evaluations = st.evals;
                let end = Sample { t: t_hit, z: zz };
                if opts.record {
                    samples.push(end);
                }
                return Ok(Outcome { samples: Vec::new(), end, event_hit: true, stats });
            }
            g_prev = Some(gn);
        }
        s = if last { len } else { s + hh };
        z = zn;
        k1 = kn;
        let t_now = ta + dir * s;
        f.guard(t_now, &z)?;
        if opts.record {
            samples.push(Sample { t: t_now, z });
        }
        h = (hh * (0.9 * en.max(1e-10).powf(-0.2)).clamp(0.2, 5.0)).min(opts.h_max);
    }
    stats.evaluations = st.evals;
    Ok(Outcome { samples: Vec::new(), end: Sample { t: tb, z }, event_hit: false, stats })
}

/// Bisection on the Hermite interpolant, then Newton on exact sub-steps.
fn locate_event<F: Field + ?Sized>(
    st: &mut Stepper<'_, F>,
    ev: &dyn Fn(&State) -> f64,
    z0: &State,
    k0: &State,
    z1: &State,
    k1: &State,
    h: f64,
) -> Result<(f64, State), FlowError> {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ev(&hermite(z0, k0, z1, k1, h, mid)) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = 0.5 * (lo + hi) * h;
    let mut z = hermite(z0, k0, z1, k1, h, tau / h);
    for _ in 0..8 {
        if tau <= 0.0 {
            return Ok((0.0, *z0));
        }
        let (zn, kn, _) = st.step(z0, k0, tau)?;
        z = zn;
        let g = ev(&zn);
        // Directional derivative of the event along the flow, by finite difference.
        let eps = 1e-7 * h.max(1e-300);
        let zp = [zn[0] + kn[0] * eps, zn[1] + kn[1] * eps];
        let dg = (ev(&zp) - g) / eps;
        if dg == 0.0 || !dg.is_finite() {
            break;
        }
        let d = g / dg;
        tau = (tau - d).clamp(0.0, h);
        if d.abs() <= 1e-15 * h.max(1.0) {
            let (zf, _, _) = st.step(z0, k0, tau)?;
            z = zf;
            break;
        }
    }
    Ok((tau, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Lin(f64);
    impl Field for Lin {
        fn eval(&self, z: &State) -> Result<State, FlowError> {
            Ok([z[0], -z[1] * self.0])
        }
    }

    #[test]
    fn linear_rotation_matches_closed_form() {
        let lam = 0.4;
        let y0 = C::new(0.03, 0.01);
        let path = [C::new(0.0, 0.0), C::new(0.0, 2.0 * std::f64::consts::PI)];
        let out = integrate(&Lin(lam), [C::new(1.0, 0.0), y0], &path, &OdeOptions::default(), None).unwrap();
        let want = y0 * C::new(0.0, -2.0 * std::f64::consts::PI * lam).exp();
        assert!((out.end.z[1] - want).norm() < 1e-12);
        assert!((out.end.z[0] - 1.0).norm() < 1e-9);
        assert!(out.stats.max_local_error <= 1.0);
    }

    #[test]
    fn zero_length_path_is_identity() {
        let z = [C::new(0.5, 0.0), C::new(0.1, 0.2)];
        let out = integrate(&Lin(1.0), z, &[C::new(0.0, 0.0), C::new(0.0, 0.0)], &OdeOptions::default(), None).unwrap();
        assert_eq!(out.end.z, z);
    }

    #[test]
    fn event_on_modulus() {
        let z = [C::new(0.01, 0.0), C::new(1.0, 0.0)];
        let ev = |z: &State| z[0].norm().ln();
        let path = [C::new(0.0, 0.0), C::new(50.0, 0.0)];
        let out = integrate(&Lin(1.0), z, &path, &OdeOptions::default(), Some(&ev)).unwrap();
        assert!(out.event_hit);
        assert!((out.end.t.re - 100f64.ln()).abs() < 1e-9);
        assert!((out.end.z[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn piecewise_path_composes() {
        let z = [C::new(1.0, 0.0), C::new(0.1, 0.0)];
        let direct = integrate(&Lin(0.5), z, &[C::new(0.0, 0.0), C::new(1.0, 1.0)], &OdeOptions::default(), None).unwrap();
        let bent = integrate(
            &Lin(0.5),
            z,
            &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 1.0)],
            &OdeOptions::default(),
            None,
        )
        .unwrap();
        assert!((direct.end.z[1] - bent.end.z[1]).norm() < 1e-11);
    }
}
