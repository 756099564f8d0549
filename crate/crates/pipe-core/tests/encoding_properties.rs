use pipe_core::encode::{
    sorted_rows, distance_pe, lap_pe, lap_pe_with, pe_multiset_equal, rows_match_assignment, rows_multiset_equal, rw_pe, Anchors,
    DistanceMode, LapOptions, Policy, COMPUTED_TOL,
};
use pipe_core::graphcore::{permute, Graph};
use pipe_core::rng::Stream;

fn relabelled(s: &mut Stream, g: &Graph) -> Graph {
    let p = s.permutation(g.n());
    permute(g, &p).unwrap()
}

#[test]
fn encodings_are_relabelling_invariant() {
    let mut s = Stream::new(21);
    for _ in 0..60 {
        let n = 2 + s.below(9);
        let g = s.gnp(n, 0.4);
        let h = relabelled(&mut s, &g);
        let k = 1 + s.below(n);
        let pairs = [
            (rw_pe(&g, k).unwrap(), rw_pe(&h, k).unwrap()),
            (
                lap_pe(&g, k, Policy::EigenspaceProjection).unwrap(),
                lap_pe(&h, k, Policy::EigenspaceProjection).unwrap(),
            ),
            (
                distance_pe(&g, &Anchors::SelfAnchored, k, &DistanceMode::RwVector).unwrap(),
                distance_pe(&h, &Anchors::SelfAnchored, k, &DistanceMode::RwVector).unwrap(),
            ),
        ];
        for (a, b) in &pairs {
            assert!(pe_multiset_equal(a, b, COMPUTED_TOL).unwrap(), "{:?} k={k}\n{:?}\n{:?}", a.method, sorted_rows(&a.rows), sorted_rows(&b.rows));
        }
    }
}

/// Raw LapPE is invariant once every eigenvalue in the window is simple.
#[test]
fn raw_lap_invariant_on_simple_spectra() {
    let mut s = Stream::new(22);
    let mut checked = 0;
    while checked < 40 {
        let n = 4 + s.below(6);
        let g = s.gnp(n, 0.5);
        let opts = LapOptions::new(3, Policy::Raw).skip_trivial();
        let a = lap_pe_with(&g, opts).unwrap();
        let basis = pipe_core::encode::lap_basis(&g).unwrap();
        let simple = |j: usize| basis.groups.iter().filter(|&&x| x == basis.groups[j]).count() == 1;
        if !(0..4).all(simple) {
            continue;
        }
        let b = lap_pe_with(&relabelled(&mut s, &g), opts).unwrap();
        assert!(pe_multiset_equal(&a, &b, 1e-7).unwrap());
        checked += 1;
    }
}

#[test]
fn greedy_comparison_agrees_with_assignment_oracle() {
    let mut s = Stream::new(23);
    for _ in 0..200 {
        let n = 2 + s.below(8);
        let (g, h) = (s.gnp(n, 0.4), s.gnp(n, 0.4));
        let (a, b) = (rw_pe(&g, 4).unwrap(), rw_pe(&h, 4).unwrap());
        assert_eq!(
            rows_multiset_equal(&a.rows, &b.rows, COMPUTED_TOL),
            rows_match_assignment(&a.rows, &b.rows, COMPUTED_TOL)
        );
    }
}

#[test]
fn random_walk_rows_are_probabilities() {
    let mut s = Stream::new(24);
    for _ in 0..50 {
        let n = 1 + s.below(10);
        let g = s.gnp(n, 0.3);
        let p = rw_pe(&g, 5).unwrap();
        assert!(p.rows.iter().flatten().all(|x| (0.0..=1.0).contains(x)));
    }
}
