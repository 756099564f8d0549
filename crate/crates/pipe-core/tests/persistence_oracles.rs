use pipe_core::encode::{lap_pe, pe_multiset_equal, rw_pe, Policy, COMPUTED_TOL};
use pipe_core::graphcore::{betti, permute, Graph};
use pipe_core::persist::{
    diagram0, diagram1, diagrams, diagrams_equal, filtration_values, ColorAssignment, Death, FiltrationSpec,
};
use pipe_core::rng::Stream;

/// Finite deaths recomputed from component counts at every threshold.
fn sweep_deaths(g: &Graph, a: &[f64]) -> Vec<f64> {
    let mut ts: Vec<f64> = a.to_vec();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut out = Vec::new();
    let mut prev = 0usize;
    for &t in &ts {
        let keep: Vec<bool> = a.iter().map(|&x| x <= t).collect();
        let (h, _) = g.induced_subgraph(&keep);
        let now = betti(&h).beta0;
        let born = a.iter().filter(|&&x| x == t).count();
        for _ in 0..prev + born - now {
            out.push(t);
        }
        prev = now;
    }
    out
}

fn random_values(s: &mut Stream, n: usize) -> Vec<f64> {
    s.permutation(n).into_iter().map(|i| i as f64 * 0.5 + 0.25).collect()
}

#[test]
fn infinite_counts_and_deaths_match_oracles() {
    let mut s = Stream::new(3);
    for _ in 0..300 {
        let n = 1 + s.below(12);
        let g = s.gnp(n, 0.3);
        let a = random_values(&mut s, n);
        let (d0, d1) = diagrams(&g, &a).unwrap();
        let b = betti(&g);
        assert_eq!(d0.infinite_count(), b.beta0);
        assert_eq!(d1.infinite_count(), b.beta1);
        assert_eq!(d1.tuples.len(), g.edge_count());
        let mut deaths: Vec<f64> = d0.tuples.iter().filter_map(|t| t.death.finite()).collect();
        deaths.sort_by(f64::total_cmp);
        assert_eq!(deaths, sweep_deaths(&g, &a));
        assert!(d0.tuples.iter().all(|t| t.death.finite().is_none_or(|d| t.birth <= d)));
    }
}

#[test]
fn deaths_match_oracle_with_ties() {
    let mut s = Stream::new(4);
    for _ in 0..300 {
        let n = 1 + s.below(10);
        let g = s.gnp(n, 0.4);
        let a: Vec<f64> = (0..n).map(|_| s.below(3) as f64).collect();
        let mut deaths: Vec<f64> = diagram0(&g, &a).unwrap().tuples.iter().filter_map(|t| t.death.finite()).collect();
        deaths.sort_by(f64::total_cmp);
        assert_eq!(deaths, sweep_deaths(&g, &a));
    }
}

#[test]
fn diagrams_are_relabelling_invariant() {
    let mut s = Stream::new(8);
    for _ in 0..100 {
        let n = 1 + s.below(10);
        let g = s.gnp(n, 0.35);
        let a: Vec<f64> = (0..n).map(|_| s.below(4) as f64).collect();
        let perm = s.permutation(n);
        let h = permute(&g, &perm).unwrap();
        let mut b = vec![0.0; n];
        for v in 0..n {
            b[perm[v]] = a[v];
        }
        let (g0, g1) = diagrams(&g, &a).unwrap();
        let (h0, h1) = diagrams(&h, &b).unwrap();
        assert!(diagrams_equal(&g0, &h0, 0.0).unwrap());
        assert!(diagrams_equal(&g1, &h1, 0.0).unwrap());
    }
}

#[test]
fn dimension_zero_is_stable_under_jitter() {
    let mut s = Stream::new(9);
    let eps = 1e-3;
    for _ in 0..100 {
        let n = 2 + s.below(9);
        let g = s.gnp(n, 0.4);
        let a = random_values(&mut s, n);
        let b: Vec<f64> = a.iter().map(|x| x + s.symmetric(eps)).collect();
        // Values are 0.5 apart, so jitter keeps the vertex order and pairing.
        let (da, db) = (diagram0(&g, &a).unwrap(), diagram0(&g, &b).unwrap());
        for (ta, tb) in da.tuples.iter().zip(&db.tuples) {
            assert!((ta.birth - tb.birth).abs() <= eps);
            match (ta.death, tb.death) {
                (Death::Finite(x), Death::Finite(y)) => assert!((x - y).abs() <= eps),
                (Death::Infinite, Death::Infinite) => {}
                other => panic!("pairing changed: {other:?}"),
            }
        }
    }
}

/// Lemma: the dim-0 birth multiset encodes the colour multiset, so unequal
/// encodings give unequal diagrams under any injective filtration.
#[test]
fn unequal_encodings_give_unequal_births() {
    let mut s = Stream::new(12);
    let mut checked = 0;
    while checked < 100 {
        let n = 3 + s.below(8);
        let (g1, g2) = (s.gnp(n, 0.4), s.gnp(n, 0.4));
        for (p1, p2) in [
            (rw_pe(&g1, 3).unwrap(), rw_pe(&g2, 3).unwrap()),
            (
                lap_pe(&g1, 2, Policy::EigenspaceProjection).unwrap(),
                lap_pe(&g2, 2, Policy::EigenspaceProjection).unwrap(),
            ),
        ] {
            if p1.width() != p2.width() || pe_multiset_equal(&p1, &p2, COMPUTED_TOL).unwrap() {
                continue;
            }
            let (c1, c2) = (ColorAssignment::from_pe(&p1), ColorAssignment::from_pe(&p2));
            let f = FiltrationSpec::injective_random(&[&c1, &c2], &mut s);
            let d1 = diagram0(&g1, &filtration_values(&c1, &f).unwrap()).unwrap();
            let d2 = diagram0(&g2, &filtration_values(&c2, &f).unwrap()).unwrap();
            assert_ne!(d1.births(), d2.births());
            assert!(!diagrams_equal(&d1, &d2, 0.0).unwrap());
            checked += 1;
        }
    }
}

#[test]
fn trees_have_only_dummies() {
    let mut s = Stream::new(2);
    for _ in 0..50 {
        let n = 1 + s.below(12);
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (s.below(v), v)).collect();
        let g = Graph::new(n, &edges).unwrap();
        let d = diagram1(&g, &random_values(&mut s, n)).unwrap();
        assert_eq!(d.infinite_count(), 0);
    }
}
