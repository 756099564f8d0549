use pipe_core::encode::Policy;
use pipe_core::graphcore::{cycle, disjoint_union, path, permute};
use pipe_core::pipe::{
    grad_check, grad_check_with, init_params, lspe_forward, output_gap, pipe_forward, BasePe, NodeInput, PiPEConfig,
};
use pipe_core::rng::Stream;

#[test]
fn outputs_are_relabelling_invariant() {
    let mut s = Stream::new(41);
    for base in [BasePe::Rw, BasePe::Lap { policy: Policy::EigenspaceProjection, skip_trivial: false }, BasePe::Distance] {
        let cfg = PiPEConfig { base_pe: base, base_k: 3, ..PiPEConfig::default() };
        let params = init_params(&cfg).unwrap();
        for _ in 0..5 {
            let g = s.gnp(9, 0.35);
            let a = pipe_forward(&g, NodeInput::Constant, &params).unwrap();
            let b = lspe_forward(&g, NodeInput::Constant, &params).unwrap();
            for _ in 0..5 {
                let h = permute(&g, &s.permutation(9)).unwrap();
                let gap = output_gap(&a, &pipe_forward(&h, NodeInput::Constant, &params).unwrap());
                assert!(gap <= 1e-9, "{base:?} gap {gap}");
                assert!(output_gap(&b, &lspe_forward(&h, NodeInput::Constant, &params).unwrap()) <= 1e-9);
            }
        }
    }
}

#[test]
fn symmetric_graphs_stay_invariant_across_seeds() {
    // Automorphisms make filtration values tie; every filtration must break
    // the ties the same way.
    let mut s = Stream::new(8);
    let mut graphs = vec![path(4), path(5), disjoint_union(&[cycle(4), path(3)]).unwrap()];
    graphs.extend((0..6).map(|_| s.gnp(6, 0.3)));
    for base in [BasePe::Rw, BasePe::Lap { policy: Policy::EigenspaceProjection, skip_trivial: false }, BasePe::Distance] {
        for seed in 0..5 {
            let cfg = PiPEConfig { base_pe: base, base_k: 3, seed, ..PiPEConfig::default() };
            let params = init_params(&cfg).unwrap();
            for g in &graphs {
                let a = pipe_forward(g, NodeInput::Constant, &params).unwrap();
                for _ in 0..4 {
                    let h = permute(g, &s.permutation(g.n())).unwrap();
                    let gap = output_gap(&a, &pipe_forward(&h, NodeInput::Constant, &params).unwrap());
                    assert!(gap <= 1e-9, "{base:?} seed {seed} {g:?} gap {gap}");
                }
            }
        }
    }
}

#[test]
fn near_equal_encoding_rows_do_not_break_invariance() {
    // Rows 0 and 6 of the projection encoding share a first entry up to
    // float noise, and later layers tie several values exactly.
    let g = pipe_core::Graph::new(7, &[(0, 1), (0, 4), (1, 2), (3, 4), (4, 6), (5, 6)]).unwrap();
    let cfg = PiPEConfig {
        base_pe: BasePe::Lap { policy: Policy::EigenspaceProjection, skip_trivial: false },
        base_k: 3,
        seed: 10,
        ..PiPEConfig::default()
    };
    let params = init_params(&cfg).unwrap();
    let a = pipe_forward(&g, NodeInput::Constant, &params).unwrap();
    let mut s = Stream::new(1);
    for _ in 0..20 {
        let h = permute(&g, &s.permutation(7)).unwrap();
        assert!(output_gap(&a, &pipe_forward(&h, NodeInput::Constant, &params).unwrap()) <= 1e-9);
    }
}

#[test]
fn gradients_match_finite_differences() {
    let mut s = Stream::new(42);
    let cfg = PiPEConfig::default();
    for i in 0..5 {
        let g = s.gnp(8, 0.4);
        let r = grad_check(&g, &cfg, i, 1e-5).unwrap();
        assert!(r.max_rel_err <= 1e-4, "graph {i}: {}", r.max_rel_err);
    }
}

#[test]
fn zero_vectorizations_give_zero_gradients() {
    let g = disjoint_union(&[cycle(4), cycle(5)]).unwrap();
    let r = grad_check_with(&g, &PiPEConfig::default(), 0, 1e-5, |p| p.zero_topology()).unwrap();
    assert!(r.analytic.iter().all(|&x| x == 0.0));
    assert!(r.numeric.iter().all(|&x| x == 0.0));
}

#[test]
fn padded_channel_has_no_gradient() {
    // Base width 2 inside pe_dim 4: layer-0 weights on the padding see zeros.
    let cfg = PiPEConfig { base_k: 2, ..PiPEConfig::default() };
    let g = Stream::new(5).gnp(8, 0.4);
    let r = grad_check(&g, &cfg, 3, 1e-5).unwrap();
    // Flattened layout: per layer, per filtration, pe_dim weights then bias.
    for f in 0..cfg.filtration_count {
        for j in 2..cfg.pe_dim {
            let idx = f * (cfg.pe_dim + 1) + j;
            assert!(r.analytic[idx].abs() <= 1e-8 && r.numeric[idx].abs() <= 1e-8);
        }
    }
}
