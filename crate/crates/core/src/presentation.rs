//! Finitely presented groups: block presentations, global assembly over the
//! dual graph, Tietze simplification and abelian invariants.

use crate::graph::{classify_components, DivisorDecomposition, DualGraph, SeifertPair};
use crate::snf;
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

/// Word as syllables `(generator index, nonzero exponent)`.
pub type Word = Vec<(usize, i64)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("nu = {0} must be positive")]
    NonPositiveNu(i64),
    #[error("dead-branch index {0} clashes or is out of range")]
    IndexClash(usize),
    #[error("missing multiplicity for E{0}")]
    MissingMultiplicity(usize),
    #[error("decomposition does not match the graph")]
    DecompositionMismatch,
    #[error("presentation text line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

/// Merge equal neighbours and drop zero exponents.
pub fn free_reduce(w: &[(usize, i64)]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &(g, e) in w {
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.0 == g => {
                last.1 += e;
                if last.1 == 0 {
                    out.pop();
                }
            }
            _ => out.push((g, e)),
        }
    }
    out
}

/// Free reduction followed by cyclic reduction.
pub fn cyclic_reduce(w: &[(usize, i64)]) -> Word {
    let mut v = free_reduce(w);
    while v.len() >= 2 && v[0].0 == v[v.len() - 1].0 {
        let (_, e) = v.pop().unwrap();
        v[0].1 += e;
        if v[0].1 == 0 {
            v.remove(0);
        }
        v = free_reduce(&v);
    }
    v
}

pub fn inverse(w: &[(usize, i64)]) -> Word {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

fn commutator(a: usize, b: usize) -> Word {
    vec![(a, 1), (b, 1), (a, -1), (b, -1)]
}

pub fn word_length(w: &[(usize, i64)]) -> u64 {
    w.iter().map(|s| s.1.unsigned_abs()).sum()
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Self {
        Presentation { generators, relators: relators.iter().map(|r| free_reduce(r)).collect() }
    }

    pub fn free(generators: Vec<String>) -> Self {
        Presentation { generators, relators: Vec::new() }
    }

    pub fn word_to_string(&self, w: &[(usize, i64)]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&(g, e)| format!("{}^{}", self.generators[g], e)).collect::<Vec<_>>().join(" ")
    }

    /// Exponent-sum matrix, one row per relator.
    pub fn relation_matrix(&self) -> Vec<Vec<BigInt>> {
        self.relators
            .iter()
            .map(|r| {
                let mut row = vec![0i64; self.generators.len()];
                for &(g, e) in r {
                    row[g] += e;
                }
                row.into_iter().map(BigInt::from).collect()
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.generators {
            writeln!(s, "gen {}", g).unwrap();
        }
        for r in &self.relators {
            let body: Vec<String> = r.iter().map(|&(g, e)| format!("{}^{}", self.generators[g], e)).collect();
            writeln!(s, "rel {}", body.join(" ")).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, PresentationError> {
        let mut gens: Vec<String> = Vec::new();
        let mut rels = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let err = |m: &str| PresentationError::Syntax { line: ln + 1, msg: m.to_string() };
            let mut tok = line.split_whitespace();
            match tok.next() {
                None => continue,
                Some("gen") => {
                    let name = tok.next().ok_or_else(|| err("missing name"))?;
                    gens.push(name.to_string());
                }
                Some("rel") => {
                    let mut w = Vec::new();
                    for t in tok {
                        let (n, e) = t.split_once('^').ok_or_else(|| err("expected name^exponent"))?;
                        let g = gens.iter().position(|x| x == n).ok_or_else(|| err("unknown generator"))?;
                        let e: i64 = e.parse().map_err(|_| err("bad exponent"))?;
                        w.push((g, e));
                    }
                    rels.push(w);
                }
                Some(_) => return Err(err("unrecognized line")),
            }
        }
        Ok(Presentation { generators: gens, relators: rels })
    }

    pub fn matrix_csv(&self) -> String {
        let mut s = String::from("relator");
        for g in &self.generators {
            s.push(',');
            s.push_str(g);
        }
        s.push('\n');
        for (i, row) in self.relation_matrix().iter().enumerate() {
            s.push_str(&format!("r{}", i + 1));
            for v in row {
                s.push_str(&format!(",{}", v));
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 { "Z".into() } else { format!("Z^{}", self.rank) });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{}", t));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn abelianize(p: &Presentation) -> AbelianInvariants {
    let (rank, torsion) = snf::cokernel(&p.relation_matrix(), p.generators.len());
    AbelianInvariants { rank, torsion }
}

/// `<a_0..a_n, c | a_0...a_n c^-nu, [a_r, c]>`.
pub fn presentation_block_d(n: usize, nu: i64) -> Result<Presentation, PresentationError> {
    if nu <= 0 {
        return Err(PresentationError::NonPositiveNu(nu));
    }
    let mut gens: Vec<String> = (0..=n).map(|r| format!("a{}", r)).collect();
    gens.push("c".into());
    let c = n + 1;
    let mut rels = Vec::new();
    let mut prod: Word = (0..=n).map(|r| (r, 1)).collect();
    prod.push((c, -nu));
    rels.push(prod);
    for r in 0..=n {
        rels.push(commutator(r, c));
    }
    Ok(Presentation::new(gens, rels))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeadBranchGroup {
    pub presentation: Presentation,
    pub pair: SeifertPair,
    /// `a^m c^-n`, a generator of the (infinite cyclic) group.
    pub distinguished: Word,
}

/// `<a, c | [a, c], a^p c^-q>`.
pub fn presentation_dead_branch(pair: SeifertPair) -> DeadBranchGroup {
    let rels = vec![commutator(0, 1), vec![(0, pair.p as i64), (1, -(pair.q as i64))]];
    DeadBranchGroup {
        presentation: Presentation::new(vec!["a".into(), "c".into()], rels),
        pair,
        distinguished: free_reduce(&[(0, pair.m as i64), (1, -(pair.n as i64))]),
    }
}

/// Block presentation plus `a_j^{p_j} c^{-q_j}` for each dead branch on `a_j`.
pub fn presentation_aggregated(
    n: usize,
    nu: i64,
    pairs: &[(usize, SeifertPair)],
) -> Result<Presentation, PresentationError> {
    let mut p = presentation_block_d(n, nu)?;
    let c = n + 1;
    let mut used = BTreeSet::new();
    for &(j, sp) in pairs {
        if j > n || !used.insert(j) {
            return Err(PresentationError::IndexClash(j));
        }
        p.relators.push(vec![(j, sp.p as i64), (c, -(sp.q as i64))]);
    }
    Ok(p)
}

/// Global presentation with the vertex id behind each generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalPresentation {
    pub presentation: Presentation,
    pub vertex_ids: Vec<usize>,
    /// `ord_D F` on exceptional generators, 1 on arrows.
    pub weights: Vec<i64>,
}

/// One generator per divisor component; intersection rows and commutators of
/// adjacent pairs with an exceptional member.
pub fn assemble_global(
    g: &DualGraph,
    decomposition: &DivisorDecomposition,
    mults: &BTreeMap<usize, u64>,
) -> Result<GlobalPresentation, PresentationError> {
    match classify_components(g) {
        Ok(d) if &d == decomposition => {}
        _ => return Err(PresentationError::DecompositionMismatch),
    }
    let ids: Vec<usize> = g.vertices().keys().copied().collect();
    let index: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let gens: Vec<String> = ids
        .iter()
        .map(|&v| if g.is_exceptional(v) { format!("aE{}", v) } else { format!("aS{}", v) })
        .collect();
    let mut weights = Vec::new();
    for &v in &ids {
        if g.is_exceptional(v) {
            weights.push(*mults.get(&v).ok_or(PresentationError::MissingMultiplicity(v))? as i64);
        } else {
            weights.push(1);
        }
    }
    let mut rels = Vec::new();
    for e in g.exceptional_ids() {
        let row: Word = ids
            .iter()
            .filter_map(|&d| {
                let k = g.intersection_number(d, e);
                (k != 0).then(|| (index[&d], k))
            })
            .collect();
        rels.push(row);
    }
    for &(a, b) in g.edges() {
        if g.is_exceptional(a) || g.is_exceptional(b) {
            rels.push(commutator(index[&a], index[&b]));
        }
    }
    Ok(GlobalPresentation { presentation: Presentation::new(gens, rels), vertex_ids: ids, weights })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentVerdict {
    /// `(relator index, weighted exponent sum)` for each failing relator.
    pub violations: Vec<(usize, i64)>,
}

impl ExponentVerdict {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every relator must have zero weighted exponent sum.
pub fn exponent_check(p: &Presentation, weights: &[i64]) -> ExponentVerdict {
    let violations = p
        .relators
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            let s: i64 = r.iter().map(|&(g, e)| weights[g] * e).sum();
            (s != 0).then_some((i, s))
        })
        .collect();
    ExponentVerdict { violations }
}

/// Record of one simplification step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TietzeStep {
    Eliminate { generator: String, definition: String },
    Rewrite { from: String, to: String },
    DropTrivial(usize),
}

/// Tietze simplification: eliminate generators occurring once with exponent
/// +-1 in a relator (fewest relators touched first), rewrite powers through two-syllable relators
/// `g^a h^-b` (`|a| > |b|`), free/cyclic reduction, drop trivial and repeated
/// relators.
pub fn tietze_simplify(p: &Presentation) -> (Presentation, Vec<TietzeStep>) {
    let mut gens: Vec<Option<String>> = p.generators.iter().cloned().map(Some).collect();
    let mut rels: Vec<Word> = p.relators.iter().map(|r| cyclic_reduce(r)).collect();
    let mut steps = Vec::new();
    let name = |gens: &[Option<String>], g: usize| gens[g].clone().unwrap_or_default();
    let show = |gens: &[Option<String>], w: &Word| -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&(g, e)| format!("{}^{}", name(gens, g), e)).collect::<Vec<_>>().join(" ")
    };
    for _round in 0..1000 {
        rels = tidy(rels, &mut steps);
        // (a) elimination, shortest defining relator first.
        let mut best: Option<(usize, u64, usize, usize)> = None;
        for (ri, r) in rels.iter().enumerate() {
            for &(g, e) in r {
                if e.abs() == 1 && r.iter().filter(|s| s.0 == g).count() == 1 {
                    let spread = rels.iter().filter(|w| w.iter().any(|s| s.0 == g)).count();
                    let key = (spread, word_length(r), ri, g);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
        }
        if let Some((_, _, ri, g)) = best {
            let r = rels.remove(ri);
            let pos = r.iter().position(|s| s.0 == g).unwrap();
            let e = r[pos].1;
            // r = u g^e v = 1  =>  g = (v u)^{-e}
            let mut vu: Word = r[pos + 1..].to_vec();
            vu.extend_from_slice(&r[..pos]);
            let def = if e == 1 { inverse(&vu) } else { vu };
            let def = free_reduce(&def);
            steps.push(TietzeStep::Eliminate { generator: name(&gens, g), definition: show(&gens, &def) });
            rels = rels.iter().map(|w| substitute(w, g, &def)).collect();
            gens[g] = None;
            continue;
        }
        // (c) power rewriting, accepted only when it shortens the target relator.
        let mut changed = false;
        'search: for ri in 0..rels.len() {
            let r = rels[ri].clone();
            if r.len() != 2 || r[0].0 == r[1].0 {
                continue;
            }
            // r[0].0^{r[0].1} = r[1].0^{-r[1].1}
            let dirs = [(r[0].0, r[0].1, r[1].0, -r[1].1), (r[1].0, r[1].1, r[0].0, -r[0].1)];
            for rj in 0..rels.len() {
                if rj == ri {
                    continue;
                }
                let cur = word_length(&rels[rj]);
                let best = dirs
                    .iter()
                    .map(|&(g, a, h, b)| (rewrite_powers(&rels[rj], g, a, h, b), g, a, h, b))
                    .min_by_key(|c| word_length(&c.0));
                if let Some((nw, g, a, h, b)) = best {
                    if word_length(&nw) < cur {
                        rels[rj] = nw;
                        steps.push(TietzeStep::Rewrite {
                            from: format!("{}^{}", name(&gens, g), a),
                            to: format!("{}^{}", name(&gens, h), b),
                        });
                        changed = true;
                        break 'search;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    rels = tidy(rels, &mut steps);
    // Compact generator indices.
    let keep: Vec<usize> = (0..gens.len()).filter(|&g| gens[g].is_some()).collect();
    let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let out_rels = rels.iter().map(|w| w.iter().map(|&(g, e)| (remap[&g], e)).collect()).collect();
    let out_gens = keep.iter().map(|&g| gens[g].clone().unwrap()).collect();
    (Presentation { generators: out_gens, relators: out_rels }, steps)
}

fn tidy(rels: Vec<Word>, steps: &mut Vec<TietzeStep>) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    for (i, r) in rels.into_iter().enumerate() {
        let r = cyclic_reduce(&r);
        if r.is_empty() {
            steps.push(TietzeStep::DropTrivial(i));
            continue;
        }
        let key = canonical_cyclic(&r);
        if seen.insert(key) {
            out.push(r);
        }
    }
    out
}

/// Least cyclic rotation of the word or its inverse.
fn canonical_cyclic(w: &Word) -> Word {
    let mut best: Option<Word> = None;
    for cand in [w.clone(), cyclic_reduce(&inverse(w))] {
        for k in 0..cand.len().max(1) {
            let mut rot = cand[k..].to_vec();
            rot.extend_from_slice(&cand[..k]);
            if best.as_ref().is_none_or(|b| &rot < b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

fn substitute(w: &Word, g: usize, def: &Word) -> Word {
    let mut out = Vec::new();
    for &(x, e) in w {
        if x == g {
            let piece = if e > 0 { def.clone() } else { inverse(def) };
            for _ in 0..e.unsigned_abs() {
                out.extend_from_slice(&piece);
            }
        } else {
            out.push((x, e));
        }
    }
    cyclic_reduce(&out)
}

/// Replace `g^e` by `h^{k b} g^{e - k a}` with `k = trunc(e / a)`; valid since
/// `g^a = h^b` commutes with `g`.
fn rewrite_powers(w: &Word, g: usize, a: i64, h: usize, b: i64) -> Word {
    let mut out = Vec::new();
    for &(x, e) in w {
        if x == g && e.abs() >= a.abs() {
            let k = e / a;
            out.push((h, k * b));
            let r = e - k * a;
            if r != 0 {
                out.push((g, r));
            }
        } else {
            out.push((x, e));
        }
    }
    cyclic_reduce(&out)
}

/// Two generators and one relator cyclically equal to `u^3 v^-2` up to
/// inversion and renaming.
pub fn is_trefoil(p: &Presentation) -> bool {
    if p.generators.len() != 2 || p.relators.len() != 1 {
        return false;
    }
    let key = canonical_cyclic(&p.relators[0]);
    [vec![(0, 3), (1, -2)], vec![(1, 3), (0, -2)]]
        .iter()
        .any(|t| canonical_cyclic(t) == key)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reductions() {
        assert_eq!(free_reduce(&[(0, 1), (0, -1), (1, 2), (1, 1)]), vec![(1, 3)]);
        assert_eq!(cyclic_reduce(&[(0, 1), (1, 2), (0, -1)]), vec![(1, 2)]);
        assert!(cyclic_reduce(&commutator(0, 0)).is_empty());
    }

    #[test]
    fn block_d_examples() {
        let p = presentation_block_d(2, 1).unwrap();
        assert_eq!(p.relators[0], vec![(0, 1), (1, 1), (2, 1), (3, -1)]);
        assert_eq!(p.relators.len(), 4);
        assert_eq!(abelianize(&presentation_block_d(0, 1).unwrap()), AbelianInvariants { rank: 1, torsion: vec![] });
        assert_eq!(abelianize(&presentation_block_d(1, 2).unwrap()).rank, 2);
        assert!(presentation_block_d(1, 0).is_err());
    }

    #[test]
    fn dead_branch_examples() {
        let g = presentation_dead_branch(SeifertPair::from_pq(3, 1).unwrap());
        assert_eq!(g.distinguished, vec![(0, 1), (1, -2)]);
        let g = presentation_dead_branch(SeifertPair::from_pq(2, 1).unwrap());
        assert_eq!(g.distinguished, vec![(0, 1), (1, -1)]);
        assert_eq!(abelianize(&g.presentation), AbelianInvariants { rank: 1, torsion: vec![] });
    }

    #[test]
    fn aggregated_examples() {
        let p31 = SeifertPair::from_pq(3, 1).unwrap();
        let p21 = SeifertPair::from_pq(2, 1).unwrap();
        let p = presentation_aggregated(2, 1, &[(1, p31), (2, p21)]).unwrap();
        let (s, steps) = tietze_simplify(&p);
        assert!(is_trefoil(&s), "{}", s.to_text());
        assert!(steps.iter().any(|s| matches!(s, TietzeStep::Eliminate { generator, .. } if generator == "c")));
        assert_eq!(presentation_aggregated(1, 2, &[]).unwrap(), presentation_block_d(1, 2).unwrap());
        let q = presentation_aggregated(1, 2, &[(1, p21)]).unwrap();
        assert_eq!(abelianize(&q), AbelianInvariants { rank: 1, torsion: vec![] });
        assert!(presentation_aggregated(1, 2, &[(1, p21), (1, p31)]).is_err());
        assert!(presentation_aggregated(1, 2, &[(2, p21)]).is_err());
    }

    #[test]
    fn abelianize_examples() {
        let p = Presentation::new(vec!["u".into(), "v".into()], vec![vec![(0, 2), (1, -3)]]);
        assert_eq!(abelianize(&p), AbelianInvariants { rank: 1, torsion: vec![] });
        let c5 = Presentation::new(vec!["a".into()], vec![vec![(0, 5)]]);
        assert_eq!(abelianize(&c5), AbelianInvariants { rank: 0, torsion: vec![BigInt::from(5)] });
        let f3 = Presentation::free(vec!["a".into(), "b".into(), "c".into()]);
        assert_eq!(abelianize(&f3).rank, 3);
    }

    #[test]
    fn text_round_trip() {
        let p = presentation_block_d(1, 2).unwrap();
        assert_eq!(Presentation::from_text(&p.to_text()).unwrap(), p);
        assert!(p.matrix_csv().starts_with("relator,a0,a1,c\nr1,1,1,-2\n"));
    }

    #[test]
    fn trefoil_recognition() {
        let t = Presentation::new(vec!["u".into(), "v".into()], vec![vec![(1, 2), (0, -3)]]);
        assert!(is_trefoil(&t));
        let nt = Presentation::new(vec!["u".into(), "v".into()], vec![vec![(1, 2), (0, -5)]]);
        assert!(!is_trefoil(&nt));
    }
}
