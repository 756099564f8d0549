use pipe_core::graphcore::{complete, cycle, disjoint_union, permute};
use pipe_core::persist::{is_color_separating, ColorAssignment};
use pipe_core::rng::Stream;
use pipe_core::wl::{kfwl_distinguish, kfwl_joint, kfwl_node_projection, wl1, wl1_distinguish, KfwlBudget};

#[test]
fn histograms_are_relabelling_invariant() {
    let mut s = Stream::new(31);
    for _ in 0..40 {
        let n = 2 + s.below(7);
        let g = s.gnp(n, 0.4);
        let h = permute(&g, &s.permutation(n)).unwrap();
        let k = ColorAssignment::constant(n);
        assert_eq!(wl1(&g, &k).1, wl1(&h, &k).1);
        assert!(!wl1_distinguish(&g, &k, &h, &k));
        assert!(!kfwl_distinguish(&g, &h, 2).unwrap());
    }
}

#[test]
fn two_fwl_refines_one_wl() {
    let mut s = Stream::new(32);
    let mut wl_separated = 0;
    for _ in 0..150 {
        let n = 3 + s.below(6);
        let (g, h) = (s.gnp(n, 0.5), s.gnp(n, 0.5));
        let k = ColorAssignment::constant(n);
        if wl1_distinguish(&g, &k, &h, &k) {
            wl_separated += 1;
            assert!(kfwl_distinguish(&g, &h, 2).unwrap());
        }
    }
    assert!(wl_separated > 50);
}

#[test]
fn projection_separates_every_two_fwl_distinguished_pair() {
    let mut s = Stream::new(33);
    let budget = KfwlBudget::default();
    for _ in 0..60 {
        let n = 3 + s.below(7);
        let (g, h) = (s.gnp(n, 0.4), s.gnp(n, 0.4));
        let tc = kfwl_joint(&[&g, &h], 2, &budget).unwrap();
        if tc[0].histogram() == tc[1].histogram() {
            continue;
        }
        let (x, y) = (kfwl_node_projection(&g, &tc[0]), kfwl_node_projection(&h, &tc[1]));
        assert!(is_color_separating(&g, &x, &h, &y, &[]));
    }
}

#[test]
fn three_fwl_on_small_pairs() {
    let c33 = disjoint_union(&[cycle(3), cycle(3)]).unwrap();
    assert!(kfwl_distinguish(&cycle(6), &c33, 3).unwrap());
    assert!(!kfwl_distinguish(&complete(4), &complete(4), 3).unwrap());
}
