mod common;

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::time::Instant;

use folpi::graph::{
    branch_seifert_pair, check_tree_morphism, classify_components, solve_multiplicities, MorphismVerdict,
};
use folpi::lunule::lunule_decomposition;
use folpi::presentation::{
    abelianize, assemble_global, exponent_check, is_trefoil, presentation_dead_branch, tietze_simplify,
};
use folpi::rabotage::{
    build_collar, collar_slice, iterate_rabotage, linear_collar_contains, saturation_oracle, transport_for, verify_bounds_sweep,
    CONTAINMENT_TOL, ORACLE_RAYS, SWEEP_SIZES,
};
use folpi::report::{run, Command, RunConfig};
use folpi::resolution::pullback_multiplicities;
use folpi::rugosity::{rugosity, xi_rugosity, PACurve, PolyMap};
use folpi::saddle::{col_passage, dulac_asymptotics, dulac_map, flow, holonomy, FieldKind, SaddleModel, DECADES};
use folpi::ode::OdeOptions;
use folpi::star::{radial_distance, union_intersection_rugosity_check, StarDomain};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{folding, locally_injective, random_tree, trace, CORPUS};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cusp_end_to_end() -> Verdict {
    let out = run(&RunConfig::new(Command::Pi1 { input: "y^2-x^3".into() }));
    ensure(out.code == 0, format!("exit {}", out.code))?;
    let t = trace("y^2-x^3");
    let si: Vec<i64> = t.graph.exceptional_ids().iter().map(|&v| t.graph.self_intersection(v).unwrap()).collect();
    ensure(si == [-3, -2, -1], format!("self-intersections {si:?}"))?;
    let m: Vec<u64> = t.mult.values().copied().collect();
    ensure(m == [2, 3, 6], format!("multiplicities {m:?}"))?;
    let dec = classify_components(&t.graph).map_err(|e| e.to_string())?;
    let g = assemble_global(&t.graph, &dec, &t.mult).map_err(|e| e.to_string())?;
    ensure(g.presentation.generators.len() == 4, "presentation is not on 4 generators")?;
    let ab = abelianize(&g.presentation);
    ensure(ab.rank == 1 && ab.torsion.is_empty(), format!("abelianization {ab}"))?;
    let (s, _) = tietze_simplify(&g.presentation);
    ensure(is_trefoil(&s), format!("simplified to {}", s.to_text().replace('\n', "; ")))?;
    Ok(format!("abelianization {ab}, simplified relator {}", s.word_to_string(&s.relators[0])))
}

fn h1_law() -> Verdict {
    for (p, rho) in CORPUS {
        let t = trace(p);
        ensure(t.branch_count() == rho, format!("{p}: {} branches, expected {rho}", t.branch_count()))?;
        let dec = classify_components(&t.graph).map_err(|e| e.to_string())?;
        let g = assemble_global(&t.graph, &dec, &t.mult).map_err(|e| e.to_string())?;
        let ab = abelianize(&g.presentation);
        ensure(ab.rank == rho && ab.torsion.is_empty(), format!("{p}: abelianization {ab}"))?;
    }
    Ok(format!("{} germs", CORPUS.len()))
}

fn multiplicity_double_computation() -> Verdict {
    for (p, _) in CORPUS {
        let t = trace(p);
        let replay = pullback_multiplicities(&t).map_err(|e| e.to_string())?;
        let solved = solve_multiplicities(&t.graph).map_err(|e| e.to_string())?;
        ensure(replay == solved, format!("{p}: replay {replay:?} solve {solved:?}"))?;
    }
    Ok(format!("{} germs", CORPUS.len()))
}

fn exponent_homomorphism() -> Verdict {
    let mut relators = 0;
    for (p, _) in CORPUS {
        let t = trace(p);
        let dec = classify_components(&t.graph).map_err(|e| e.to_string())?;
        let g = assemble_global(&t.graph, &dec, &t.mult).map_err(|e| e.to_string())?;
        let v = exponent_check(&g.presentation, &g.weights);
        ensure(v.passes(), format!("{p}: violations {:?}", v.violations))?;
        relators += g.presentation.relators.len();
    }
    Ok(format!("{relators} relators"))
}

fn seifert_law() -> Verdict {
    let mut branches = 0;
    for (p, _) in CORPUS {
        let t = trace(p);
        let dec = classify_components(&t.graph).map_err(|e| e.to_string())?;
        for d in &dec.dead_branches {
            let s = branch_seifert_pair(&t.graph, d).map_err(|e| e.to_string())?;
            let (a, b) = (s.p as i128, s.q as i128);
            ensure(num_integer::gcd(a, b) == 1 && s.p >= 2, format!("{p}: pair {s:?}"))?;
            ensure(s.m as i128 * a - s.n as i128 * b == 1, format!("{p}: mp - nq != 1 for {s:?}"))?;
            let ab = abelianize(&presentation_dead_branch(s).presentation);
            ensure(ab.rank == 1 && ab.torsion.is_empty(), format!("{p}: dead-branch group {ab}"))?;
            branches += 1;
        }
    }
    Ok(format!("{branches} dead branches"))
}

fn morphism_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..1000 {
        let n = rng.gen_range(2..=12);
        let target = random_tree(&mut rng, n);
        let (src, map) = locally_injective(&mut rng, &target, 12);
        let v = check_tree_morphism(&src, &target, &map).map_err(|e| format!("case {i}: {e}"))?;
        ensure(v == MorphismVerdict::InjectiveTree, format!("case {i}: {v:?}"))?;
    }
    for i in 0..100 {
        let n = rng.gen_range(3..=12);
        let target = random_tree(&mut rng, n);
        let (src, map) = folding(&mut rng, &target, 12);
        let v = check_tree_morphism(&src, &target, &map).map_err(|e| format!("fold {i}: {e}"))?;
        let MorphismVerdict::LocallyNonInjective { vertex, pair: (a, b) } = v else {
            return Err(format!("fold {i}: {v:?}"));
        };
        let adj = src.adjacency();
        ensure(
            a != b && map[a] == map[b] && adj[vertex].contains(&a) && adj[vertex].contains(&b),
            format!("fold {i}: bad certificate at {vertex}"),
        )?;
    }
    Ok("1000 injective, 100 folds certified".into())
}

fn linear_holonomy() -> Verdict {
    let mut worst: f64 = 0.0;
    for (p, q) in [(1, 2), (1, 3), (2, 5), (3, 1)] {
        let m = SaddleModel::linear(p, q).map_err(|e| e.to_string())?;
        let rot = C::from_polar(1.0, -TAU * m.lambda());
        for r in [1e-3, 1e-2, 1e-1] {
            for j in 0..8 {
                let y0 = C::from_polar(r, j as f64 * PI / 4.0 + 0.1);
                let h = holonomy(&m, y0).map_err(|e| e.to_string())?;
                worst = worst.max((h - rot * y0).norm());
            }
        }
    }
    ensure(worst < 1e-9, format!("max deviation {worst:.3e}"))?;
    Ok(format!("max deviation {worst:.3e}"))
}

fn col_passage_property() -> Verdict {
    let radii = [5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4];
    let mut drift: f64 = 0.0;
    let mut closed: f64 = 0.0;
    for spec in ["linear:1", "linear:1/2", "linear:3", "normal:1:k=1:alpha=0.5", "normal:1/2:k=1:alpha=0"] {
        let m = SaddleModel::parse(spec).map_err(|e| e.to_string())?;
        for theta in [0.3, 2.0, -1.2] {
            let mut dist = Vec::new();
            for &r in &radii {
                let cp = col_passage(&m, C::from_polar(r, 0.7), theta).map_err(|e| format!("{spec}: {e}"))?;
                drift = drift.max(cp.arg_drift);
                dist.push(cp.y.norm());
                if spec.starts_with("linear") {
                    // |x|^λ |y| is conserved.
                    closed = closed.max((cp.y.norm() / r.powf(m.lambda()) - 1.0).abs());
                }
            }
            ensure(dist.windows(2).all(|w| w[1] < w[0]), format!("{spec}: distance not decreasing {dist:?}"))?;
            ensure(*dist.last().unwrap() < 0.1 * dist[0], format!("{spec}: distance not tending to 0"))?;
        }
    }
    ensure(drift < 1e-9, format!("arg drift {drift:.3e}"))?;
    ensure(closed < 1e-8, format!("linear distance off closed form by {closed:.3e}"))?;
    Ok(format!("arg drift {drift:.3e}, linear closed-form error {closed:.3e}"))
}

fn dulac_asymptotics_criterion() -> Verdict {
    let one = dulac_asymptotics(&SaddleModel::linear(1, 1).unwrap(), 0.5, 0.0, &DECADES).map_err(|e| e.to_string())?;
    ensure((one.kappa - 1.0).abs() < 1e-3, format!("lambda=1 exponent {}", one.kappa))?;
    ensure((one.limit - 1.0).norm() < 1e-3, format!("lambda=1 limit {}", one.limit))?;
    let two = dulac_asymptotics(&SaddleModel::linear(2, 1).unwrap(), 0.5, 0.0, &DECADES).map_err(|e| e.to_string())?;
    ensure(
        (two.kappa - 2.0).abs() < 1e-2 || (two.kappa - 0.5).abs() < 1e-2,
        format!("lambda=2 exponent {}", two.kappa),
    )?;
    let mut agree: f64 = 0.0;
    let mut drift: f64 = 0.0;
    let mut near_axis: f64 = 0.0;
    for alpha in [0.0, 0.5] {
        let m = SaddleModel::normal_form(1, 1, 1, C::new(alpha, 0.0)).map_err(|e| e.to_string())?;
        for theta in [0.0, 0.5, 2.0, 6.0] {
            for &r in &DECADES {
                let d = dulac_map(&m, r, theta, 0.0).map_err(|e| format!("alpha {alpha}: {e}"))?;
                agree = agree.max(d.agreement.ok_or("no first integral")?);
            }
        }
        // Leaves with |u| >= 3e-2; the relative drift of H is conditioned like 1/|u|^k.
        let lp = [C::new(0.0, 0.0), C::new(0.0, TAU)];
        for y in [3e-2, 5e-2, 9e-2] {
            for j in 0..8 {
                let y0 = C::from_polar(y, j as f64 * PI / 4.0 + 0.1);
                let tr = flow(&m, (C::new(1.0, 0.0), y0), FieldKind::X, &lp, &OdeOptions::default())
                    .map_err(|e| e.to_string())?;
                drift = drift.max(tr.first_integral_drift.ok_or("no drift")?);
                let ty = flow(&m, (C::new(0.5, 0.0), y0), FieldKind::Y, &[lp[0], C::new(0.6, 0.0)], &OdeOptions::default())
                    .map_err(|e| e.to_string())?;
                drift = drift.max(ty.first_integral_drift.ok_or("no drift")?);
            }
        }
        let near = flow(&m, (C::new(1.0, 0.0), C::new(1e-3, 0.0)), FieldKind::X, &lp, &OdeOptions::default())
            .map_err(|e| e.to_string())?;
        near_axis = near_axis.max(near.first_integral_drift.ok_or("no drift")?);
    }
    ensure(agree < 1e-7, format!("two-method agreement {agree:.3e}"))?;
    ensure(drift < 1e-8, format!("first-integral drift {drift:.3e}"))?;
    Ok(format!(
        "lambda=1 exponent {:.6} limit {:.6}; lambda=2 exponent {:.6} ({}); agreement {agree:.2e}; drift {drift:.2e} for |u| >= 3e-2 (|u| = 1e-3 gives {near_axis:.2e})",
        one.kappa, one.limit.re, two.kappa, two.convention
    ))
}

fn random_star(rng: &mut impl Rng, r: f64) -> StarDomain {
    let terms: Vec<(u32, f64, f64)> = (1..=rng.gen_range(1..=4))
        .map(|k| (k, rng.gen_range(-0.08..0.08), rng.gen_range(-0.08..0.08)))
        .collect();
    StarDomain::perturbed_circle(r, &terms).unwrap()
}

fn rugosity_suite() -> Verdict {
    let mut spiral: f64 = 0.0;
    for k in [0.05, 0.3, 1.0, 2.5, -0.7] {
        let s = PACurve::log_spiral(0.5, k, 0.0, TAU).map_err(|e| e.to_string())?;
        spiral = spiral.max((rugosity(&s).map_err(|e| e.to_string())? - f64::atan(f64::abs(k))).abs());
        let back = rugosity(&s.reversed()).map_err(|e| e.to_string())?;
        ensure(back == f64::INFINITY, format!("reversed spiral k={k} gives {back}"))?;
    }
    ensure(spiral < 1e-6, format!("spiral error {spiral:.3e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for i in 0..500 {
        let a = random_star(&mut rng, 1.0);
        let r = rng.gen_range(0.9..1.1);
        let b = random_star(&mut rng, r);
        let v = union_intersection_rugosity_check(&a, &b);
        ensure(v.holds, format!("pair {i}: {v:?}"))?;
    }
    let maps = [
        PolyMap::real(&[0.0, 1.0, 1.0], 0.5),
        PolyMap::real(&[0.0, 0.0, 1.0, -0.5], 0.5),
        PolyMap::new(vec![C::new(0.0, 0.0), C::new(0.0, 2.0), C::new(1.0, 1.0)], 0.4),
    ];
    let mut sweeps = 0;
    for g in &maps {
        for r in [1e-1, 1e-2, 1e-3, 1e-4] {
            let curves = [
                PACurve::log_spiral(r, 0.1, 0.0, 1.0),
                PACurve::circle_arc(r, -1.0, 1.0),
                PACurve::radial_segment(0.3, r * 0.5, r),
            ];
            for c in curves {
                let x = xi_rugosity(&c.map_err(|e| e.to_string())?, g).map_err(|e| e.to_string())?;
                ensure(x.direct <= x.bound, format!("xi sweep at r={r}: {x:?}"))?;
                sweeps += 1;
            }
        }
    }
    Ok(format!("spiral error {spiral:.2e}; 500 pairs; {sweeps} xi cases"))
}

fn lunule_rabotage() -> Verdict {
    let d = StarDomain::disc(1.0).unwrap();
    let h = StarDomain::perturbed_circle(1.0, &[(1, 0.1, 0.0)]).unwrap();
    let l = lunule_decomposition(&d, &h).map_err(|e| e.to_string())?;
    ensure(l.q() == 2, format!("{} lunules", l.q()))?;
    let err = (l.angles[0] - PI / 2.0).abs().max((l.angles[1] - 1.5 * PI).abs());
    ensure(err < 1e-8, format!("crossing angles off by {err:.3e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pairs = 0;
    while pairs < 200 {
        let a = random_star(&mut rng, 1.0);
        let r = rng.gen_range(0.97..1.03);
        let b = random_star(&mut rng, r);
        let Ok(l) = lunule_decomposition(&a, &b) else { continue };
        if l.is_empty() {
            continue;
        }
        ensure(l.k_set().len() >= 2, format!("pair {pairs}: #K = {}", l.k_set().len()))?;
        pairs += 1;
    }

    let mut worst: f64 = 0.0;
    let mut shrink = f64::INFINITY;
    let mut merges = 0;
    for (p, q, a, shift) in [(1, 2, 0.05, 0.0), (1, 2, 0.05, 0.7), (1, 3, 0.04, 2.0), (2, 5, 0.03, 1.1)] {
        let m = SaddleModel::linear(p, q).map_err(|e| e.to_string())?;
        let lam = m.lambda();
        let delta = StarDomain::from_fn(move |t: f64| (0.01 * (1.0 + a * (t - shift).cos()), -0.01 * a * (t - shift).sin()))
            .unwrap();
        let collar = build_collar(&m, &delta).map_err(|e| e.to_string())?;
        let t = transport_for(&m);
        let out = iterate_rabotage(&collar.slabs, t.as_ref(), 0.0, CONTAINMENT_TOL).map_err(|e| e.to_string())?;
        let qn = collar.slabs.len();
        ensure(qn >= 2, format!("lambda {lam}: only {qn} slabs"))?;
        ensure(out.lengths == (1..=qn).rev().collect::<Vec<_>>(), format!("lengths {:?}", out.lengths))?;
        merges += qn - 1;
        let member = |x: C, phi: f64| Ok(linear_collar_contains(&delta, lam, x, phi));
        let oracle = saturation_oracle(&member, t.as_ref(), &out, &collar.angles, ORACLE_RAYS).map_err(|e| e.to_string())?;
        let dev = oracle.iter().map(|&(psi, r)| (out.delta_prime.radius(psi) - r).abs()).fold(0.0, f64::max);
        worst = worst.max(dev / 0.01);
        let (slice, _) = collar_slice(&m, &delta, 0.0).map_err(|e| e.to_string())?;
        ensure(out.delta_prime.is_subset_of(&slice, 1e-9), format!("lambda {lam}: reduced domain leaves its slice"))?;
        let moved = radial_distance(&out.delta_prime, &slice, 4096) / slice.max_radius();
        ensure(moved > 1e-3, format!("lambda {lam}: planing removed nothing"))?;
        shrink = shrink.min(moved);
    }
    ensure(worst < 1e-6, format!("oracle distance {worst:.3e}"))?;
    Ok(format!("angle error {err:.2e}; 200 pairs with #K >= 2; oracle distance {worst:.2e} (relative, planing trims the basepoint slice by at least {shrink:.2e}); {merges} merges"))
}

fn bounds_sweep() -> Verdict {
    let r = verify_bounds_sweep(&SaddleModel::linear(1, 1).unwrap(), &SWEEP_SIZES);
    if let Some(a) = &r.aborted {
        return Err(format!("aborted at {:e}: {}", a.size, a.message));
    }
    let slope = r.slope.ok_or("no slope")?;
    ensure((slope - 1.0).abs() <= 0.05, format!("slope {slope}"))?;
    ensure(r.loss_decreasing, "loss increases")?;
    Ok(format!("slope {slope:.4}; loss {:?}", r.rows.iter().map(|x| x.loss).collect::<Vec<_>>()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict, Option<f64>); 12] = [
        ("cusp end-to-end", cusp_end_to_end, Some(1.0)),
        ("H1 law on the corpus", h1_law, None),
        ("multiplicity double computation", multiplicity_double_computation, None),
        ("exponent homomorphism", exponent_homomorphism, None),
        ("Seifert-pair law", seifert_law, None),
        ("tree morphism property suite", morphism_suite, Some(10.0)),
        ("linear holonomy", linear_holonomy, Some(5.0)),
        ("col passage", col_passage_property, None),
        ("Dulac asymptotics", dulac_asymptotics_criterion, None),
        ("rugosity suite", rugosity_suite, None),
        ("lunules and rabotage", lunule_rabotage, None),
        ("bounds sweep", bounds_sweep, Some(60.0)),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr().lock();
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut verdict = f();
        let secs = start.elapsed().as_secs_f64();
        if let (Ok(_), Some(l)) = (&verdict, limit) {
            if secs >= *l {
                verdict = Err(format!("took {secs:.2} s, limit {l} s"));
            }
        }
        let (tag, detail) = match &verdict {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        writeln!(err, "{tag} {:>2} {name} ({secs:.2} s): {detail}", i + 1).unwrap();
        if verdict.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
