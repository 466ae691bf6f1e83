//! Weighted dual graphs of the total divisor and their combinatorial decomposition.

use crate::poly::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph file line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("hypothesis violation: components {0:?} are each adjacent to at least two dead branches")]
    TwoCentral(Vec<usize>),
    #[error("intersection matrix is singular")]
    Singular,
    #[error("multiplicity of E{id} is {value}, not a positive integer")]
    BadMultiplicity { id: usize, value: String },
    #[error("invalid dead branch: {0}")]
    InvalidDeadBranch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Exceptional { self_intersection: i64 },
    Arrow,
}

/// Dual graph: exceptional components and strict-transform arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    vertices: BTreeMap<usize, VertexKind>,
    edges: BTreeSet<(usize, usize)>,
    mult: Option<BTreeMap<usize, u64>>,
}

impl DualGraph {
    /// Validates ids, loops, duplicate edges and arrow attachment. Connectivity
    /// is checked by the decomposition routines.
    pub fn new(
        vertices: BTreeMap<usize, VertexKind>,
        edges: impl IntoIterator<Item = (usize, usize)>,
        mult: Option<BTreeMap<usize, u64>>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::Invalid(format!("self-loop at {}", a)));
            }
            let e = (a.min(b), a.max(b));
            for v in [a, b] {
                if !vertices.contains_key(&v) {
                    return Err(GraphError::Invalid(format!("edge mentions unknown vertex {}", v)));
                }
            }
            if !set.insert(e) {
                return Err(GraphError::Invalid(format!("duplicate edge {} {}", e.0, e.1)));
            }
        }
        let g = DualGraph { vertices, edges: set, mult };
        if g.vertices.is_empty() {
            return Err(GraphError::Invalid("no vertices".into()));
        }
        let lone_arrow = g.vertices.len() == 1;
        for (&v, k) in &g.vertices {
            if *k == VertexKind::Arrow && !lone_arrow {
                let nb = g.neighbors(v);
                if nb.len() != 1 || !g.is_exceptional(nb[0]) {
                    return Err(GraphError::Invalid(format!(
                        "arrow {} must meet exactly one exceptional component",
                        v
                    )));
                }
            }
        }
        if let Some(m) = &g.mult {
            for (&id, &val) in m {
                if !g.is_exceptional(id) {
                    return Err(GraphError::Invalid(format!("multiplicity given for non-exceptional {}", id)));
                }
                if val == 0 {
                    return Err(GraphError::BadMultiplicity { id, value: "0".into() });
                }
            }
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &BTreeMap<usize, VertexKind> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn mult(&self) -> Option<&BTreeMap<usize, u64>> {
        self.mult.as_ref()
    }

    pub fn with_mult(mut self, mult: BTreeMap<usize, u64>) -> Result<Self, GraphError> {
        self.mult = Some(mult);
        DualGraph::new(self.vertices, self.edges, self.mult)
    }

    pub fn is_exceptional(&self, v: usize) -> bool {
        matches!(self.vertices.get(&v), Some(VertexKind::Exceptional { .. }))
    }

    pub fn self_intersection(&self, v: usize) -> Option<i64> {
        match self.vertices.get(&v) {
            Some(VertexKind::Exceptional { self_intersection }) => Some(*self_intersection),
            _ => None,
        }
    }

    pub fn exceptional_ids(&self) -> Vec<usize> {
        self.vertices.keys().copied().filter(|&v| self.is_exceptional(v)).collect()
    }

    pub fn arrow_ids(&self) -> Vec<usize> {
        self.vertices.keys().copied().filter(|&v| !self.is_exceptional(v)).collect()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    /// Number of singular points on the component: meetings with any other
    /// divisor component, arrows included.
    pub fn valence(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    pub fn arrows_on(&self, v: usize) -> usize {
        self.neighbors(v).into_iter().filter(|&w| !self.is_exceptional(w)).count()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// `(D, E)`: self-intersection on the diagonal, 1 for adjacent, else 0.
    pub fn intersection_number(&self, a: usize, b: usize) -> i64 {
        if a == b {
            self.self_intersection(a).unwrap_or(0)
        } else if self.adjacent(a, b) {
            1
        } else {
            0
        }
    }

    /// Exceptional intersection matrix in ascending id order.
    pub fn intersection_matrix(&self) -> (Vec<usize>, Vec<Vec<i64>>) {
        let ids = self.exceptional_ids();
        let m = ids
            .iter()
            .map(|&a| ids.iter().map(|&b| self.intersection_number(a, b)).collect())
            .collect();
        (ids, m)
    }

    pub fn is_connected(&self) -> bool {
        let start = match self.vertices.keys().next() {
            Some(&s) => s,
            None => return true,
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Leading principal minors of the exceptional matrix alternate in sign,
    /// starting negative.
    pub fn is_negative_definite(&self) -> bool {
        let (_, m) = self.intersection_matrix();
        leading_pivots(&m).is_some_and(|p| p.iter().all(|v| v.is_negative()))
    }

    /// Canonical text form: `V` lines, then `E`, then `M`, each ascending.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (&id, k) in &self.vertices {
            match k {
                VertexKind::Exceptional { self_intersection } => {
                    writeln!(s, "V {} exc {}", id, self_intersection).unwrap()
                }
                VertexKind::Arrow => writeln!(s, "V {} arrow", id).unwrap(),
            }
        }
        for (a, b) in &self.edges {
            writeln!(s, "E {} {}", a, b).unwrap();
        }
        if let Some(m) = &self.mult {
            for (id, v) in m {
                writeln!(s, "M {} {}", id, v).unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut vertices = BTreeMap::new();
        let mut edges = Vec::new();
        let mut mult: Option<BTreeMap<usize, u64>> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| GraphError::Syntax { line: ln + 1, msg: msg.to_string() };
            let tok: Vec<&str> = line.split_whitespace().collect();
            let num = |t: &str| t.parse::<usize>().map_err(|_| err(&format!("bad id '{}'", t)));
            match tok.as_slice() {
                ["V", id, "exc", si] => {
                    let si: i64 = si.parse().map_err(|_| err("bad self-intersection"))?;
                    if vertices.insert(num(id)?, VertexKind::Exceptional { self_intersection: si }).is_some() {
                        return Err(err("duplicate vertex"));
                    }
                }
                ["V", id, "arrow"] => {
                    if vertices.insert(num(id)?, VertexKind::Arrow).is_some() {
                        return Err(err("duplicate vertex"));
                    }
                }
                ["E", a, b] => edges.push((num(a)?, num(b)?)),
                ["M", id, m] => {
                    let m: u64 = m.parse().map_err(|_| err("bad multiplicity"))?;
                    if mult.get_or_insert_with(BTreeMap::new).insert(num(id)?, m).is_some() {
                        return Err(err("duplicate multiplicity"));
                    }
                }
                _ => return Err(err("unrecognized line")),
            }
        }
        DualGraph::new(vertices, edges, mult)
    }
}

/// Pivots of Gaussian elimination without row exchange; `None` if a pivot vanishes.
fn leading_pivots(m: &[Vec<i64>]) -> Option<Vec<Q>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .map(|r| r.iter().map(|&v| Q::from_integer(BigInt::from(v))).collect())
        .collect();
    let mut piv = Vec::with_capacity(n);
    for k in 0..n {
        let p = a[k][k].clone();
        if p.is_zero() {
            return None;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &p;
            for j in k..n {
                let d = &f * &a[k][j];
                a[i][j] -= d;
            }
        }
        piv.push(p);
    }
    Some(piv)
}

/// A maximal chain of valence at most 2 exceptional components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeadBranch {
    /// Extremity first.
    pub chain: Vec<usize>,
    pub attach: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregatedBlock {
    pub center: usize,
    pub dead_branches: Vec<DeadBranch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorDecomposition {
    pub chains: Vec<Vec<usize>>,
    pub dead_branches: Vec<DeadBranch>,
    pub simple_components: Vec<usize>,
    pub aggregated_blocks: Vec<AggregatedBlock>,
    pub central_component: Option<usize>,
}

impl DivisorDecomposition {
    pub fn to_text(&self) -> String {
        let ids = |v: &[usize]| v.iter().map(|i| format!("E{}", i)).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        for c in &self.chains {
            writeln!(s, "chain {}", ids(c)).unwrap();
        }
        for d in &self.dead_branches {
            writeln!(s, "dead-branch {} attach E{}", ids(&d.chain), d.attach).unwrap();
        }
        for v in &self.simple_components {
            writeln!(s, "simple E{}", v).unwrap();
        }
        for b in &self.aggregated_blocks {
            let parts: Vec<String> = b.dead_branches.iter().map(|d| format!("[{}]", ids(&d.chain))).collect();
            writeln!(s, "block E{} {}", b.center, parts.join(" ")).unwrap();
        }
        match self.central_component {
            Some(c) => writeln!(s, "central E{}", c).unwrap(),
            None => writeln!(s, "central none").unwrap(),
        }
        s
    }

    /// Dead branch containing `v`, if any.
    pub fn branch_of(&self, v: usize) -> Option<&DeadBranch> {
        self.dead_branches.iter().find(|d| d.chain.contains(&v))
    }
}

pub fn classify_components(g: &DualGraph) -> Result<DivisorDecomposition, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let low: BTreeSet<usize> = g.exceptional_ids().into_iter().filter(|&v| g.valence(v) <= 2).collect();
    let mut seen = BTreeSet::new();
    let mut chains = Vec::new();
    for &v in &low {
        if seen.contains(&v) {
            continue;
        }
        let mut comp = BTreeSet::from([v]);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for w in g.neighbors(u) {
                if low.contains(&w) && comp.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.extend(comp.iter().copied());
        chains.push(order_chain(g, &comp));
    }
    chains.sort();

    let mut dead = Vec::new();
    for c in &chains {
        if !c.iter().any(|&v| g.valence(v) == 1) {
            continue;
        }
        let set: BTreeSet<usize> = c.iter().copied().collect();
        let outside: BTreeSet<usize> = c
            .iter()
            .flat_map(|&v| g.neighbors(v))
            .filter(|w| !set.contains(w))
            .collect();
        if outside.len() == 1 {
            let a = *outside.iter().next().unwrap();
            if g.is_exceptional(a) {
                dead.push(DeadBranch { chain: c.clone(), attach: a });
            }
        }
    }
    dead.sort_by(|a, b| (a.attach, &a.chain).cmp(&(b.attach, &b.chain)));

    let in_dead: BTreeSet<usize> = dead.iter().flat_map(|d| d.chain.iter().copied()).collect();
    let mut blocks: BTreeMap<usize, Vec<DeadBranch>> = BTreeMap::new();
    for d in &dead {
        blocks.entry(d.attach).or_default().push(d.clone());
    }
    let simple: Vec<usize> = g
        .exceptional_ids()
        .into_iter()
        .filter(|v| !in_dead.contains(v) && !blocks.contains_key(v))
        .collect();
    let central = central_of(&blocks)?;
    Ok(DivisorDecomposition {
        chains,
        dead_branches: dead,
        simple_components: simple,
        aggregated_blocks: blocks
            .into_iter()
            .map(|(center, dead_branches)| AggregatedBlock { center, dead_branches })
            .collect(),
        central_component: central,
    })
}

fn central_of(blocks: &BTreeMap<usize, Vec<DeadBranch>>) -> Result<Option<usize>, GraphError> {
    let many: Vec<usize> = blocks.iter().filter(|(_, d)| d.len() >= 2).map(|(&c, _)| c).collect();
    match many.len() {
        0 => Ok(None),
        1 => Ok(Some(many[0])),
        _ => Err(GraphError::TwoCentral(many)),
    }
}

/// Order a chain as a path: start at a valence-1 extremity if there is one,
/// otherwise at the smallest chain endpoint.
fn order_chain(g: &DualGraph, comp: &BTreeSet<usize>) -> Vec<usize> {
    let inner = |v: usize| g.neighbors(v).into_iter().filter(|w| comp.contains(w)).collect::<Vec<_>>();
    let start = comp
        .iter()
        .copied()
        .find(|&v| g.valence(v) == 1)
        .or_else(|| comp.iter().copied().find(|&v| inner(v).len() <= 1))
        .unwrap_or(*comp.iter().next().unwrap());
    let mut out = vec![start];
    let mut prev = None;
    let mut cur = start;
    loop {
        let next = inner(cur).into_iter().find(|&w| Some(w) != prev && !out.contains(&w));
        match next {
            Some(n) => {
                out.push(n);
                prev = Some(cur);
                cur = n;
            }
            None => break,
        }
    }
    out
}

pub fn central_component(g: &DualGraph) -> Result<Option<usize>, GraphError> {
    Ok(classify_components(g)?.central_component)
}

/// Solve `M m = -a` exactly, `a_k` the number of arrows on `E_k`.
pub fn solve_multiplicities(g: &DualGraph) -> Result<BTreeMap<usize, u64>, GraphError> {
    let (ids, m) = g.intersection_matrix();
    let n = ids.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Q> = row.iter().map(|&v| Q::from_integer(BigInt::from(v))).collect();
            r.push(Q::from_integer(BigInt::from(-(g.arrows_on(ids[i]) as i64))));
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(GraphError::Singular)?;
        a.swap(k, p);
        let piv = a[k][k].clone();
        for j in k..=n {
            a[k][j] = &a[k][j] / &piv;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in k..=n {
                    let d = &f * &a[k][j];
                    a[i][j] -= d;
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (i, &id) in ids.iter().enumerate() {
        let v = &a[i][n];
        let bad = || GraphError::BadMultiplicity { id, value: v.to_string() };
        if !v.is_integer() || !v.is_positive() {
            return Err(bad());
        }
        out.insert(id, v.to_integer().to_u64().ok_or_else(bad)?);
    }
    Ok(out)
}

/// Seifert invariants of a dead branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeifertPair {
    pub p: u64,
    pub q: u64,
    pub m: u64,
    pub n: u64,
}

impl SeifertPair {
    /// Build from coprime `p >= 2`, `q >= 1`.
    pub fn from_pq(p: u64, q: u64) -> Result<Self, GraphError> {
        if p < 2 {
            return Err(GraphError::InvalidDeadBranch(format!("p = {} (trivial holonomy)", p)));
        }
        if q == 0 || p.gcd(&q) != 1 {
            return Err(GraphError::InvalidDeadBranch(format!("p/q = {}/{} not reduced positive", p, q)));
        }
        let (pi, qi) = (p as i128, q as i128);
        let inv = modinv(qi.rem_euclid(pi), pi);
        let n = (-inv).rem_euclid(pi);
        let m = (1 + n * qi) / pi;
        Ok(SeifertPair { p, q, m: m as u64, n: n as u64 })
    }
}

fn modinv(a: i128, m: i128) -> i128 {
    let e = a.extended_gcd(&m);
    e.x.rem_euclid(m)
}

/// `self_intersections` lists `-b_1, ..., -b_k` from extremity to attach side.
pub fn seifert_pair(self_intersections: &[i64]) -> Result<SeifertPair, GraphError> {
    if self_intersections.is_empty() {
        return Err(GraphError::InvalidDeadBranch("empty chain".into()));
    }
    let mut r: Option<Q> = None;
    for &s in self_intersections {
        let b = -s;
        if b < 1 {
            return Err(GraphError::InvalidDeadBranch(format!("self-intersection {} is not negative", s)));
        }
        let bq = Q::from_integer(BigInt::from(b));
        r = Some(match r {
            None => bq,
            Some(prev) => {
                if !prev.is_positive() {
                    return Err(GraphError::InvalidDeadBranch("continued fraction not positive".into()));
                }
                bq - prev.recip()
            }
        });
    }
    let r = r.unwrap();
    if !r.is_positive() {
        return Err(GraphError::InvalidDeadBranch(format!("p/q = {} is not positive", r)));
    }
    let p = r.numer().to_u64().ok_or_else(|| GraphError::InvalidDeadBranch("p too large".into()))?;
    let q = r.denom().to_u64().ok_or_else(|| GraphError::InvalidDeadBranch("q too large".into()))?;
    SeifertPair::from_pq(p, q)
}

/// Seifert pair of a dead branch of `g`.
pub fn branch_seifert_pair(g: &DualGraph, d: &DeadBranch) -> Result<SeifertPair, GraphError> {
    let si: Vec<i64> = d.chain.iter().map(|&v| g.self_intersection(v).unwrap_or(0)).collect();
    seifert_pair(&si)
}

/// Plain undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        SimpleGraph { n, edges }
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
        }
        adj
    }

    fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edge_set().len() + 1 == self.n
    }

    /// Some cycle as a closed vertex walk (first vertex not repeated).
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let adj = self.adjacency();
        let mut parent = vec![usize::MAX; self.n];
        let mut depth = vec![usize::MAX; self.n];
        for root in 0..self.n {
            if depth[root] != usize::MAX {
                continue;
            }
            depth[root] = 0;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if w == parent[v] {
                        continue;
                    }
                    if depth[w] == usize::MAX {
                        depth[w] = depth[v] + 1;
                        parent[w] = v;
                        stack.push(w);
                    } else {
                        let (mut a, mut b) = (v, w);
                        let mut left = vec![a];
                        let mut right = vec![b];
                        while a != b {
                            if depth[a] >= depth[b] {
                                a = parent[a];
                                left.push(a);
                            } else {
                                b = parent[b];
                                right.push(b);
                            }
                        }
                        right.pop();
                        right.reverse();
                        left.extend(right);
                        if left.len() >= 3 {
                            return Some(left);
                        }
                    }
                }
            }
        }
        None
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("not a graph morphism: edge {0:?} is not sent to an edge")]
    NotAMorphism((usize, usize)),
    #[error("vertex map has wrong length or out-of-range image")]
    BadMap,
    #[error("target is not a tree")]
    TargetNotTree,
    #[error("source is not connected")]
    SourceDisconnected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismVerdict {
    InjectiveTree,
    /// Two neighbours of `vertex` share an image.
    LocallyNonInjective { vertex: usize, pair: (usize, usize) },
    /// Locally injective yet the source has a cycle.
    CycleCertificate { cycle: Vec<usize> },
    /// Locally injective and acyclic yet two vertices collide.
    GlobalCollision { pair: (usize, usize) },
}

/// Check a strict morphism (edges to edges) from a connected graph to a tree.
pub fn check_tree_morphism(
    source: &SimpleGraph,
    target: &SimpleGraph,
    map: &[usize],
) -> Result<MorphismVerdict, MorphismError> {
    if map.len() != source.n || map.iter().any(|&v| v >= target.n) {
        return Err(MorphismError::BadMap);
    }
    if !target.is_tree() {
        return Err(MorphismError::TargetNotTree);
    }
    if !source.is_connected() {
        return Err(MorphismError::SourceDisconnected);
    }
    let tedges = target.edge_set();
    for &(a, b) in &source.edges {
        let (u, v) = (map[a], map[b]);
        if !tedges.contains(&(u.min(v), u.max(v))) {
            return Err(MorphismError::NotAMorphism((a, b)));
        }
    }
    let adj = source.adjacency();
    for (v, nb) in adj.iter().enumerate() {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for &w in nb {
            if let Some(&prev) = seen.get(&map[w]) {
                return Ok(MorphismVerdict::LocallyNonInjective { vertex: v, pair: (prev, w) });
            }
            seen.insert(map[w], w);
        }
    }
    if let Some(cycle) = source.find_cycle() {
        return Ok(MorphismVerdict::CycleCertificate { cycle });
    }
    let mut first: BTreeMap<usize, usize> = BTreeMap::new();
    for (v, &img) in map.iter().enumerate() {
        if let Some(&u) = first.get(&img) {
            return Ok(MorphismVerdict::GlobalCollision { pair: (u, v) });
        }
        first.insert(img, v);
    }
    Ok(MorphismVerdict::InjectiveTree)
}

/// Exceptional intersection-matrix rows, used by callers that need `BigInt`.
pub fn matrix_bigint(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

/// Determinant sign pattern helper for reports.
pub fn leading_minors(m: &[Vec<i64>]) -> Option<Vec<Q>> {
    let piv = leading_pivots(m)?;
    let mut acc = Q::one();
    Some(
        piv.into_iter()
            .map(|p| {
                acc = &acc * &p;
                acc.clone()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cusp() -> DualGraph {
        DualGraph::from_text("V 1 exc -3\nV 2 exc -2\nV 3 exc -1\nV 4 arrow\nE 1 3\nE 2 3\nE 3 4\n").unwrap()
    }

    fn xy() -> DualGraph {
        DualGraph::from_text("V 1 exc -1\nV 2 arrow\nV 3 arrow\nE 1 2\nE 1 3\n").unwrap()
    }

    #[test]
    fn text_round_trip_is_exact() {
        let src = "# cusp\nV 3 exc -1\nV 1 exc -3\nV 2 exc -2\nV 4 arrow\nE 3 1\nE 2 3\nE 3 4\nM 3 6\nM 1 2\nM 2 3\n";
        let g = DualGraph::from_text(src).unwrap();
        let t = g.to_text();
        assert_eq!(DualGraph::from_text(&t).unwrap().to_text(), t);
        assert_eq!(DualGraph::from_text(&t).unwrap(), g);
        assert!(t.starts_with("V 1 exc -3\n"));
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(DualGraph::from_text("V 1 exc -1\nE 1 1\n").is_err());
        assert!(DualGraph::from_text("V 1 exc -1\nV 2 arrow\nE 1 2\nE 2 1\n").is_err());
        assert!(DualGraph::from_text("V 1 arrow\nV 2 arrow\nE 1 2\n").is_err());
        assert!(DualGraph::from_text("X 1\n").is_err());
        let disc = DualGraph::from_text("V 1 exc -1\nV 2 exc -1\nV 3 arrow\nV 4 arrow\nE 1 3\nE 2 4\n").unwrap();
        assert_eq!(classify_components(&disc), Err(GraphError::Disconnected));
    }

    #[test]
    fn cusp_decomposition() {
        let d = classify_components(&cusp()).unwrap();
        assert_eq!(d.dead_branches.len(), 2);
        assert_eq!(d.dead_branches[0], DeadBranch { chain: vec![1], attach: 3 });
        assert_eq!(d.dead_branches[1], DeadBranch { chain: vec![2], attach: 3 });
        assert!(d.simple_components.is_empty());
        assert_eq!(d.central_component, Some(3));
        assert_eq!(d.aggregated_blocks.len(), 1);
    }

    #[test]
    fn xy_and_chain_decompositions() {
        let d = classify_components(&xy()).unwrap();
        assert!(d.dead_branches.is_empty());
        assert_eq!(d.simple_components, vec![1]);
        assert_eq!(d.central_component, None);
        let chain = DualGraph::from_text("V 1 exc -1\nV 2 exc -1\nV 3 arrow\nV 4 arrow\nE 1 2\nE 1 3\nE 2 4\n").unwrap();
        let d = classify_components(&chain).unwrap();
        assert!(d.dead_branches.is_empty());
        assert_eq!(d.simple_components, vec![1, 2]);
    }

    #[test]
    fn two_central_components_is_a_violation() {
        let g = DualGraph::from_text(
            "V 1 exc -1\nV 2 exc -1\nV 3 exc -2\nV 4 exc -2\nV 5 exc -2\nV 6 exc -2\nV 7 arrow\n\
             E 1 2\nE 1 3\nE 1 4\nE 2 5\nE 2 6\nE 1 7\n",
        )
        .unwrap();
        assert_eq!(central_component(&g), Err(GraphError::TwoCentral(vec![1, 2])));
        assert_eq!(central_component(&xy()), Ok(None));
    }

    #[test]
    fn multiplicity_solves() {
        assert_eq!(solve_multiplicities(&cusp()).unwrap(), BTreeMap::from([(1, 2), (2, 3), (3, 6)]));
        assert_eq!(solve_multiplicities(&xy()).unwrap(), BTreeMap::from([(1, 2)]));
        let g = DualGraph::from_text("V 1 exc -2\nV 2 exc -1\nV 3 arrow\nV 4 arrow\nE 1 2\nE 2 3\nE 2 4\n").unwrap();
        assert_eq!(solve_multiplicities(&g).unwrap(), BTreeMap::from([(1, 2), (2, 4)]));
        let sing = DualGraph::from_text("V 1 exc -1\nV 2 exc -1\nV 3 arrow\nE 1 2\nE 1 3\n").unwrap();
        assert_eq!(solve_multiplicities(&sing), Err(GraphError::Singular));
    }

    #[test]
    fn definiteness() {
        assert!(cusp().is_negative_definite());
        let (_, m) = cusp().intersection_matrix();
        let minors = leading_minors(&m).unwrap();
        assert_eq!(minors, vec![Q::from_integer((-3).into()), Q::from_integer(6.into()), Q::from_integer((-1).into())]);
        let bad = DualGraph::from_text("V 1 exc -1\nV 2 exc -1\nV 3 arrow\nE 1 2\nE 1 3\n").unwrap();
        assert!(!bad.is_negative_definite());
    }

    #[test]
    fn seifert_pairs() {
        assert_eq!(seifert_pair(&[-2]).unwrap(), SeifertPair { p: 2, q: 1, m: 1, n: 1 });
        assert_eq!(seifert_pair(&[-2, -2]).unwrap(), SeifertPair { p: 3, q: 2, m: 1, n: 1 });
        assert_eq!(seifert_pair(&[-3]).unwrap(), SeifertPair { p: 3, q: 1, m: 1, n: 2 });
        assert!(seifert_pair(&[-1]).is_err());
        assert!(seifert_pair(&[-1, -1]).is_err());
        assert!(seifert_pair(&[0]).is_err());
    }

    #[test]
    fn morphism_examples() {
        let path = SimpleGraph::new(3, vec![(0, 1), (1, 2)]);
        assert_eq!(check_tree_morphism(&path, &path, &[0, 1, 2]), Ok(MorphismVerdict::InjectiveTree));
        let square = SimpleGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(
            check_tree_morphism(&square, &path, &[0, 1, 2, 1]),
            Ok(MorphismVerdict::LocallyNonInjective { vertex: 0, pair: (1, 3) })
        );
        let tri = SimpleGraph::new(3, vec![(0, 1), (1, 2), (2, 0)]);
        assert!(matches!(check_tree_morphism(&tri, &path, &[0, 1, 0]), Err(MorphismError::NotAMorphism(_))));
        // 5-vertex tree (star with one long arm) into a 7-vertex tree.
        let src = SimpleGraph::new(5, vec![(0, 1), (0, 2), (0, 3), (3, 4)]);
        let tgt = SimpleGraph::new(7, vec![(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (0, 6)]);
        assert_eq!(check_tree_morphism(&src, &tgt, &[0, 1, 6, 3, 4]), Ok(MorphismVerdict::InjectiveTree));
    }

    #[test]
    fn cycle_finder() {
        let sq = SimpleGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        let c = sq.find_cycle().unwrap();
        assert_eq!(c.len(), 4);
        assert!(SimpleGraph::new(3, vec![(0, 1), (1, 2)]).find_cycle().is_none());
    }
}
