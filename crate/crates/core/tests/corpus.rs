mod common;

use folpi::graph::{classify_components, solve_multiplicities, DualGraph};
use folpi::presentation::{abelianize, assemble_global, tietze_simplify};
use folpi::resolution::{parse_curve, replay};

use common::{graph, trace, CORPUS};

#[test]
fn graph_files_round_trip() {
    for (p, _) in CORPUS {
        let g = graph(p);
        let back = DualGraph::from_text(&g.to_text()).unwrap();
        assert_eq!(back, g, "{p}");
        assert_eq!(back.mult().unwrap(), &solve_multiplicities(&back).unwrap(), "{p}");
    }
}

#[test]
fn event_logs_replay() {
    for (p, _) in CORPUS {
        let t = trace(p);
        let again = replay(&parse_curve(p).unwrap(), &t.events).unwrap();
        assert_eq!(again, t, "{p}");
        assert!(t.normal_crossings_certificate().is_ok(), "{p}");
        assert!(t.graph.is_negative_definite(), "{p}");
    }
}

#[test]
fn tietze_keeps_the_abelianization() {
    for (p, rho) in CORPUS {
        let g = graph(p);
        let dec = classify_components(&g).unwrap();
        let pres = assemble_global(&g, &dec, g.mult().unwrap()).unwrap();
        let (s, _) = tietze_simplify(&pres.presentation);
        assert!(s.generators.len() <= pres.presentation.generators.len());
        let ab = abelianize(&s);
        assert_eq!((ab.rank, ab.torsion.len()), (rho, 0), "{p}");
    }
}

#[test]
fn central_component_is_unique_and_exceptional() {
    for (p, _) in CORPUS {
        let g = graph(p);
        let dec = classify_components(&g).unwrap();
        if let Some(c) = dec.central_component {
            assert!(g.is_exceptional(c), "{p}");
            assert!(dec.aggregated_blocks.iter().any(|b| b.center == c), "{p}");
        }
        for d in &dec.dead_branches {
            assert!(d.chain.iter().all(|&v| g.valence(v) <= 2), "{p}");
        }
    }
}
