#![allow(dead_code)]

use folpi::graph::DualGraph;
use folpi::resolution::{parse_curve, resolve, ResolutionTrace};

/// Reduced germs with rational resolutions and their branch counts, counted by hand.
pub const CORPUS: [(&str, usize); 11] = [
    ("x*y", 2),
    ("y^2-x^3", 1),
    ("y^2-x^5", 1),
    ("y^3-x^4", 1),
    ("(y^2-x^3)*(y^2+x^3)", 2),
    ("x*(y^2-x^3)", 2),
    ("(y-x)*(y+x)*(y-2*x)", 3),
    ("y*(y-x^2)", 2),
    ("y^3-x^5", 1),
    ("(y^2-x^3)*(y^2-2*x^3)", 2),
    ("(y^2-x^3)*(y-x)", 2),
];

pub fn trace(poly: &str) -> ResolutionTrace {
    resolve(&parse_curve(poly).unwrap()).unwrap()
}

pub fn graph(poly: &str) -> DualGraph {
    let t = trace(poly);
    t.graph.clone().with_mult(t.mult.clone()).unwrap()
}

use folpi::graph::SimpleGraph;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random tree on `n` vertices, each vertex attached to an earlier one.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> SimpleGraph {
    let edges = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    SimpleGraph::new(n, edges)
}

/// Grows a source tree breadth first, sending the neighbours of each vertex to
/// distinct neighbours of its image other than the image of its parent.
pub fn locally_injective(rng: &mut impl Rng, target: &SimpleGraph, max_source: usize) -> (SimpleGraph, Vec<usize>) {
    let adj = target.adjacency();
    let mut map = vec![rng.gen_range(0..target.n)];
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut edges = Vec::new();
    let mut next = 0;
    while next < map.len() {
        let v = next;
        next += 1;
        let pt = parent[v].map(|p| map[p]);
        let mut free: Vec<usize> = adj[map[v]].iter().copied().filter(|&t| Some(t) != pt).collect();
        free.shuffle(rng);
        let room = max_source - map.len();
        let k = rng.gen_range(0..=free.len().min(room));
        for &t in &free[..k] {
            edges.push((v, map.len()));
            map.push(t);
            parent.push(Some(v));
        }
    }
    (SimpleGraph::new(map.len(), edges), map)
}

/// A morphism to a tree that folds two neighbours of some vertex together.
pub fn folding(rng: &mut impl Rng, target: &SimpleGraph, max_source: usize) -> (SimpleGraph, Vec<usize>) {
    if rng.gen_bool(0.5) {
        // Even cycle walked up and back down a path of the target.
        let adj = target.adjacency();
        let mut path = vec![rng.gen_range(0..target.n)];
        while path.len() <= max_source / 2 {
            let last = *path.last().unwrap();
            let prev = path.len().checked_sub(2).map(|i| path[i]);
            let step: Vec<usize> = adj[last].iter().copied().filter(|&t| Some(t) != prev).collect();
            match step.choose(rng) {
                Some(&t) => path.push(t),
                None => break,
            }
        }
        let k = path.len() - 1;
        if k >= 1 {
            let n = 2 * k;
            let map: Vec<usize> = (0..n).map(|i| if i <= k { path[i] } else { path[n - i] }).collect();
            let edges = (0..n).map(|i| (i, (i + 1) % n)).filter(|&(a, b)| a != b).collect();
            if n > 2 {
                return (SimpleGraph::new(n, edges), map);
            }
        }
    }
    loop {
        let (g, mut map) = locally_injective(rng, target, max_source - 1);
        let adj = g.adjacency();
        let candidates: Vec<usize> = (0..g.n).filter(|&v| !adj[v].is_empty()).collect();
        let Some(&v) = candidates.choose(rng) else { continue };
        let w = *adj[v].choose(rng).unwrap();
        let mut edges = g.edges.clone();
        edges.push((v, g.n));
        map.push(map[w]);
        return (SimpleGraph::new(g.n + 1, edges), map);
    }
}
