//! Embedded resolution of a reduced plane-curve germ by point blow-ups over Q.

use crate::graph::{DualGraph, VertexKind};
use crate::parse::{parse_poly, ParseError};
use crate::poly::{kronecker_factor, FactorSearch, Poly, UPoly, Q};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

pub const DEFAULT_MAX_BLOWUPS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("polynomial is identically zero")]
    Zero,
    #[error("germ does not pass through the origin (f(0,0) = {0})")]
    NotThroughOrigin(String),
    #[error("not reduced: gcd(f, f_x, f_y) = {0}")]
    NotReduced(String),
    #[error("non-rational infinitely near point: {0}")]
    Irrational(IrrationalCertificate),
    #[error("iteration cap of {0} blow-ups exceeded")]
    IterationCap(usize),
    #[error("center {center} in chart {chart} is not a tracked point of the divisor")]
    CenterNotOnDivisor { chart: String, center: String },
    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),
}

/// Tangent directions with no rational representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrrationalCertificate {
    pub chart: String,
    pub center: (Q, Q),
    /// Integer coefficients in ascending degree of the slope `t = y/x`.
    pub minimal_polynomial: Vec<BigInt>,
    /// False when the factor search budget ran out before certifying irreducibility.
    pub certified_irreducible: bool,
}

impl fmt::Display for IrrationalCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = UPoly::new(self.minimal_polynomial.iter().map(|c| Q::from_integer(c.clone())).collect());
        write!(
            f,
            "tangent slope t at ({},{}) in chart {} is a root of {}{}",
            self.center.0,
            self.center.1,
            self.chart,
            p.to_string_in("t"),
            if self.certified_irreducible { " (irreducible over Q)" } else { " (irreducibility not certified)" }
        )
    }
}

/// Reduced curve germ `f = 0` at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneCurveGerm {
    poly: Poly,
}

impl PlaneCurveGerm {
    pub fn new(poly: Poly) -> Result<Self, ResolutionError> {
        if poly.is_zero() {
            return Err(ResolutionError::Zero);
        }
        let c = poly.constant_term();
        if !c.is_zero() {
            return Err(ResolutionError::NotThroughOrigin(c.to_string()));
        }
        let g = poly.gcd(&poly.dx()).gcd(&poly.dy());
        if !g.is_constant() {
            return Err(ResolutionError::NotReduced(g.to_string()));
        }
        Ok(PlaneCurveGerm { poly })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }
}

pub fn parse_curve(text: &str) -> Result<PlaneCurveGerm, ResolutionError> {
    PlaneCurveGerm::new(parse_poly(text)?)
}

/// A point of the current surface where the strict transform meets the divisor,
/// in local coordinates centred at `center` of chart `chart`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartPoint {
    pub chart: String,
    pub center: (Q, Q),
    /// Exceptional component with local equation `x = 0`.
    pub x_comp: Option<usize>,
    /// Exceptional component with local equation `y = 0`.
    pub y_comp: Option<usize>,
    pub strict: Poly,
}

impl ChartPoint {
    fn comps(&self) -> Vec<usize> {
        self.x_comp.iter().chain(self.y_comp.iter()).copied().collect()
    }

    /// Strict transform smooth, meeting exactly one component transversally.
    pub fn is_resolved(&self) -> bool {
        if !self.strict.constant_term().is_zero() {
            return true;
        }
        if self.strict.order() != Some(1) {
            return false;
        }
        match (self.x_comp, self.y_comp) {
            (None, None) => true,
            (Some(_), None) => !self.strict.coeff(0, 1).is_zero(),
            (None, Some(_)) => !self.strict.coeff(1, 0).is_zero(),
            (Some(_), Some(_)) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupEvent {
    pub chart: String,
    pub center: (Q, Q),
    pub new_component: usize,
    /// Exceptional components through the center, ascending.
    pub through: Vec<usize>,
    pub substitutions: [String; 2],
    /// Total transform in each new chart, exceptional factors included.
    pub total_transform: [Poly; 2],
    /// Strict transform in each new chart.
    pub strict_transform: [Poly; 2],
    pub extracted_multiplicity: u64,
}

impl BlowupEvent {
    pub fn chart_ids(&self, index: usize) -> [String; 2] {
        [format!("B{}.1", index + 1), format!("B{}.2", index + 1)]
    }

    pub fn log_line(&self, index: usize) -> String {
        let through: Vec<String> = self.through.iter().map(|c| format!("E{}", c)).collect();
        format!(
            "{} chart={} center=({},{}) mult={} new=E{} through=[{}] B{}.1: {} B{}.2: {}",
            index + 1,
            self.chart,
            self.center.0,
            self.center.1,
            self.extracted_multiplicity,
            self.new_component,
            through.join(","),
            index + 1,
            self.total_transform[0],
            index + 1,
            self.total_transform[1]
        )
    }
}

/// Working configuration: tracked points, component bookkeeping, event log.
#[derive(Clone, Debug)]
pub struct Configuration {
    germ: PlaneCurveGerm,
    points: Vec<ChartPoint>,
    self_int: BTreeMap<usize, i64>,
    mult: BTreeMap<usize, u64>,
    edges: BTreeSet<(usize, usize)>,
    events: Vec<BlowupEvent>,
}

impl Configuration {
    pub fn new(germ: PlaneCurveGerm) -> Self {
        let root = ChartPoint {
            chart: "C0".into(),
            center: (Q::zero(), Q::zero()),
            x_comp: None,
            y_comp: None,
            strict: germ.poly().clone(),
        };
        Configuration {
            germ,
            points: vec![root],
            self_int: BTreeMap::new(),
            mult: BTreeMap::new(),
            edges: BTreeSet::new(),
            events: Vec::new(),
        }
    }

    pub fn points(&self) -> &[ChartPoint] {
        &self.points
    }

    pub fn events(&self) -> &[BlowupEvent] {
        &self.events
    }

    pub fn self_intersections(&self) -> &BTreeMap<usize, i64> {
        &self.self_int
    }

    pub fn multiplicities(&self) -> &BTreeMap<usize, u64> {
        &self.mult
    }

    /// Blow up the tracked point `center` of `chart`.
    pub fn blow_up(&mut self, chart: &str, center: &(Q, Q)) -> Result<&BlowupEvent, ResolutionError> {
        let idx = self
            .points
            .iter()
            .position(|p| p.chart == chart && &p.center == center)
            .ok_or_else(|| ResolutionError::CenterNotOnDivisor {
                chart: chart.to_string(),
                center: format!("({},{})", center.0, center.1),
            })?;
        let pt = self.points[idx].clone();
        let k = self.events.len();
        let e = self.self_int.len() + 1;
        let ord = pt.strict.order().unwrap_or(0);
        let ma = pt.x_comp.map_or(0, |c| self.mult[&c]);
        let mb = pt.y_comp.map_or(0, |c| self.mult[&c]);
        let m = ma + mb + ord as u64;

        let g1 = pt.strict.chart1().div_monomial(ord, 0);
        let g2 = pt.strict.chart2().div_monomial(0, ord);
        let t1 = g1.mul_monomial(m as u32, mb as u32);
        let t2 = g2.mul_monomial(ma as u32, m as u32);

        // New points: chart 1 along the rational tangent slopes, chart 2 origin.
        let cone = pt.strict.homogeneous_part(ord).dehomogenize();
        let (roots, rest) = cone.rational_roots();
        if rest.degree() > 0 {
            return Err(ResolutionError::Irrational(certificate(&pt, &rest)));
        }
        let [c1, c2] = [format!("B{}.1", k + 1), format!("B{}.2", k + 1)];
        let mut children = Vec::new();
        for (t, _) in roots {
            children.push(ChartPoint {
                chart: c1.clone(),
                center: (Q::zero(), t.clone()),
                x_comp: Some(e),
                y_comp: if t.is_zero() { pt.y_comp } else { None },
                strict: g1.translate(&Q::zero(), &t),
            });
        }
        if g2.constant_term().is_zero() && ord > 0 {
            children.push(ChartPoint {
                chart: c2.clone(),
                center: (Q::zero(), Q::zero()),
                x_comp: pt.x_comp,
                y_comp: Some(e),
                strict: g2.clone(),
            });
        }

        let through = {
            let mut t = pt.comps();
            t.sort_unstable();
            t
        };
        for &c in &through {
            *self.self_int.get_mut(&c).unwrap() -= 1;
            self.edges.insert((c.min(e), c.max(e)));
        }
        if let [a, b] = through[..] {
            self.edges.remove(&(a, b));
        }
        self.self_int.insert(e, -1);
        self.mult.insert(e, m);
        self.points.remove(idx);
        self.points.extend(children);
        self.events.push(BlowupEvent {
            chart: pt.chart.clone(),
            center: pt.center.clone(),
            new_component: e,
            through,
            substitutions: ["(x,y) -> (x, x*y)".into(), "(x,y) -> (x*y, y)".into()],
            total_transform: [t1, t2],
            strict_transform: [g1, g2],
            extracted_multiplicity: m,
        });
        Ok(self.events.last().unwrap())
    }

    /// First tracked point that still needs a blow-up.
    pub fn next_center(&self) -> Option<&ChartPoint> {
        self.points.iter().find(|p| !p.is_resolved())
    }

    /// Final dual graph; arrows numbered after the exceptional components in
    /// tracked-point order.
    pub fn dual_graph(&self) -> DualGraph {
        let mut vertices: BTreeMap<usize, VertexKind> = self
            .self_int
            .iter()
            .map(|(&id, &s)| (id, VertexKind::Exceptional { self_intersection: s }))
            .collect();
        let mut edges: Vec<(usize, usize)> = self.edges.iter().copied().collect();
        let mut next = self.self_int.len() + 1;
        for p in &self.points {
            if p.strict.constant_term().is_zero() {
                vertices.insert(next, VertexKind::Arrow);
                if let Some(c) = p.x_comp.or(p.y_comp) {
                    edges.push((c, next));
                }
                next += 1;
            }
        }
        let mult = if self.mult.is_empty() { None } else { Some(self.mult.clone()) };
        DualGraph::new(vertices, edges, mult).expect("bookkeeping produces a valid graph")
    }

    pub fn finish(self) -> ResolutionTrace {
        let graph = self.dual_graph();
        ResolutionTrace { germ: self.germ, events: self.events, graph, mult: self.mult, terminal: self.points }
    }
}

fn certificate(pt: &ChartPoint, rest: &UPoly) -> IrrationalCertificate {
    let sqfree = rest.div_exact(&rest.gcd(&rest.derivative()));
    let mut f = sqfree.primitive_integer();
    let mut certified = true;
    loop {
        match kronecker_factor(&f, 200_000) {
            FactorSearch::Factor(g) => f = g,
            FactorSearch::Irreducible => break,
            FactorSearch::Unknown => {
                certified = false;
                break;
            }
        }
    }
    IrrationalCertificate { chart: pt.chart.clone(), center: pt.center.clone(), minimal_polynomial: f, certified_irreducible: certified }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionTrace {
    pub germ: PlaneCurveGerm,
    pub events: Vec<BlowupEvent>,
    pub graph: DualGraph,
    pub mult: BTreeMap<usize, u64>,
    /// Points where the strict transform meets the divisor, one per arrow.
    pub terminal: Vec<ChartPoint>,
}

impl ResolutionTrace {
    pub fn event_log(&self) -> String {
        let mut s = String::new();
        for (i, e) in self.events.iter().enumerate() {
            s.push_str(&e.log_line(i));
            s.push('\n');
        }
        s
    }

    pub fn branch_count(&self) -> usize {
        self.graph.arrow_ids().len()
    }

    /// Check normal crossings at every terminal point and on the graph.
    pub fn normal_crossings_certificate(&self) -> Result<(), String> {
        for p in &self.terminal {
            if p.strict.constant_term().is_zero() {
                if p.strict.order() != Some(1) {
                    return Err(format!("strict transform singular at {} ({},{})", p.chart, p.center.0, p.center.1));
                }
                if p.x_comp.is_some() && p.y_comp.is_some() {
                    return Err(format!("strict transform through a corner at {}", p.chart));
                }
                // Linear parts of the strict transform and the component must be independent.
                let lin_ok = match (p.x_comp, p.y_comp) {
                    (Some(_), None) => !p.strict.coeff(0, 1).is_zero(),
                    (None, Some(_)) => !p.strict.coeff(1, 0).is_zero(),
                    _ => true,
                };
                if !lin_ok {
                    return Err(format!("strict transform tangent to the divisor at {}", p.chart));
                }
            }
        }
        // Exceptional configuration from point blow-ups is a tree.
        let exc = self.graph.exceptional_ids();
        let inner = self.graph.edges().iter().filter(|(a, b)| self.graph.is_exceptional(*a) && self.graph.is_exceptional(*b)).count();
        if !exc.is_empty() && inner + 1 != exc.len() {
            return Err("exceptional configuration is not a tree".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolveOptions {
    pub max_blowups: usize,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { max_blowups: DEFAULT_MAX_BLOWUPS }
    }
}

pub fn resolve(germ: &PlaneCurveGerm) -> Result<ResolutionTrace, ResolutionError> {
    resolve_with(germ, ResolveOptions::default())
}

pub fn resolve_with(germ: &PlaneCurveGerm, opts: ResolveOptions) -> Result<ResolutionTrace, ResolutionError> {
    let mut cfg = Configuration::new(germ.clone());
    while let Some(p) = cfg.next_center() {
        if cfg.events().len() >= opts.max_blowups {
            return Err(ResolutionError::IterationCap(opts.max_blowups));
        }
        let (chart, center) = (p.chart.clone(), p.center.clone());
        cfg.blow_up(&chart, &center)?;
    }
    Ok(cfg.finish())
}

/// Re-execute `events` from `germ`, checking each recorded event.
pub fn replay(germ: &PlaneCurveGerm, events: &[BlowupEvent]) -> Result<ResolutionTrace, ResolutionError> {
    let mut cfg = Configuration::new(germ.clone());
    for (i, ev) in events.iter().enumerate() {
        let got = cfg.blow_up(&ev.chart, &ev.center)?;
        if got != ev {
            return Err(ResolutionError::ReplayMismatch(format!("event {} differs", i + 1)));
        }
    }
    if let Some(p) = cfg.next_center() {
        return Err(ResolutionError::ReplayMismatch(format!(
            "point ({},{}) of chart {} left unresolved",
            p.center.0, p.center.1, p.chart
        )));
    }
    Ok(cfg.finish())
}

/// `ord_D F` per exceptional component, recomputed by replay.
pub fn pullback_multiplicities(trace: &ResolutionTrace) -> Result<BTreeMap<usize, u64>, ResolutionError> {
    let r = replay(&trace.germ, &trace.events)?;
    if r.graph != trace.graph {
        return Err(ResolutionError::ReplayMismatch("final graph differs".into()));
    }
    let direct: BTreeMap<usize, u64> =
        r.events.iter().map(|e| (e.new_component, e.total_transform[0].x_valuation() as u64)).collect();
    if direct != r.mult || direct != trace.mult {
        return Err(ResolutionError::ReplayMismatch("multiplicities differ".into()));
    }
    Ok(direct)
}
