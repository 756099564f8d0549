use pipe_core::graphcore::{
    are_isomorphic, betti, build_graph, cycle, disjoint_union, parse_graph6, permute, write_graph6, Graph,
};
use pipe_core::rng::Stream;
use proptest::prelude::*;

/// Spanning-forest size by depth-first search, independent of union-find.
fn forest_edges(g: &Graph) -> usize {
    let mut seen = vec![false; g.n()];
    let mut count = 0;
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &u in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
    }
    count
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for v in 1..n {
                for u in 0..v {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            build_graph(n, &edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn betti_matches_spanning_forest(g in arb_graph(14)) {
        let b = betti(&g);
        prop_assert_eq!(b.beta0, g.n() - forest_edges(&g));
        prop_assert_eq!(b.beta1, g.edge_count() - forest_edges(&g));
    }

    #[test]
    fn graph6_round_trips(g in arb_graph(40)) {
        let s = write_graph6(&g);
        prop_assert_eq!(parse_graph6(&s).unwrap(), g);
        prop_assert_eq!(write_graph6(&parse_graph6(&s).unwrap()), s);
    }

    #[test]
    fn relabelling_preserves_betti_and_isomorphism(g in arb_graph(9), seed in any::<u64>()) {
        let perm = Stream::new(seed).permutation(g.n());
        let h = permute(&g, &perm).unwrap();
        prop_assert_eq!(betti(&g), betti(&h));
        prop_assert!(are_isomorphic(&g, &h).unwrap());
        prop_assert!(are_isomorphic(&h, &g).unwrap());
    }
}

#[test]
fn isomorphism_is_an_equivalence_on_random_triples() {
    let mut s = Stream::new(11);
    for _ in 0..200 {
        let n = 2 + s.below(7);
        let gs: Vec<Graph> = (0..3).map(|_| s.gnp(n, 0.5)).collect();
        let r = |a: &Graph, b: &Graph| are_isomorphic(a, b).unwrap();
        for g in &gs {
            assert!(r(g, g));
        }
        for a in &gs {
            for b in &gs {
                assert_eq!(r(a, b), r(b, a));
            }
        }
        if r(&gs[0], &gs[1]) && r(&gs[1], &gs[2]) {
            assert!(r(&gs[0], &gs[2]));
        }
    }
}

/// Brute-force oracle: try every bijection.
fn iso_brute(a: &Graph, b: &Graph) -> bool {
    fn go(a: &Graph, b: &Graph, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let v = map.len();
        if v == a.n() {
            return true;
        }
        for w in 0..b.n() {
            if used[w] || (0..v).any(|x| a.has_edge(v, x) != b.has_edge(w, map[x])) {
                continue;
            }
            used[w] = true;
            map.push(w);
            if go(a, b, map, used) {
                return true;
            }
            map.pop();
            used[w] = false;
        }
        false
    }
    a.n() == b.n() && a.edge_count() == b.edge_count() && go(a, b, &mut Vec::new(), &mut vec![false; b.n()])
}

#[test]
fn isomorphism_agrees_with_brute_force() {
    let mut s = Stream::new(5);
    let mut positives = 0;
    for _ in 0..400 {
        let n = 1 + s.below(7);
        let a = s.gnp(n, 0.5);
        let b = if s.unit() < 0.5 {
            permute(&a, &s.permutation(n)).unwrap()
        } else {
            s.gnp(n, 0.5)
        };
        let want = iso_brute(&a, &b);
        positives += usize::from(want);
        assert_eq!(are_isomorphic(&a, &b).unwrap(), want, "{a:?} {b:?}");
    }
    assert!(positives > 100);
}

#[test]
fn cycle_union_is_not_a_long_cycle() {
    let c55 = disjoint_union(&[cycle(5), cycle(5)]).unwrap();
    assert!(!are_isomorphic(&cycle(10), &c55).unwrap());
}
