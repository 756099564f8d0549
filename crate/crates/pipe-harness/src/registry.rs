//! Graph-pair constructions and the claims each one carries.

use pipe_core::encode::{Anchors, DistanceMode, Policy};
use pipe_core::graphcore::{complete, cycle, disjoint_union, hypercube, path, repeat};
use pipe_core::pipe::{BasePe, PiPEConfig};
use pipe_core::Graph;

use crate::checks::{Check, Colors, Pe, Shape, Side};
use crate::reconstruct::{self, Target};
use crate::tables::{self, rows};
use crate::HarnessError;

/// Every registered construction, in report order.
pub const IDS: &[&str] = &[
    "prop31_s1",
    "prop31_s23",
    "prop32_s1",
    "prop32_s23",
    "lemma33",
    "prop34_rw",
    "prop34_lpe",
    "prop35_de",
    "prop36",
    "prop41",
    "prop42",
    "prop43",
    "prop44",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub id: &'static str,
    pub statement: String,
    pub check: Check,
    /// `None` records the measurement without a verdict.
    pub expect: Option<bool>,
}

fn claim(id: &'static str, statement: &str, check: Check, expect: bool) -> Claim {
    Claim {
        id,
        statement: statement.to_string(),
        check,
        expect: Some(expect),
    }
}

fn info(id: &'static str, statement: &str, check: Check) -> Claim {
    Claim {
        id,
        statement: statement.to_string(),
        check,
        expect: None,
    }
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub id: &'static str,
    pub description: &'static str,
    /// Whether `n` changes the pair.
    pub scaled: bool,
    pub g1: Graph,
    pub g2: Graph,
    pub claims: Vec<Claim>,
}

fn union(parts: Vec<Graph>) -> Graph {
    disjoint_union(&parts).expect("disjoint union of valid graphs")
}

fn times(g: &Graph, n: usize) -> Graph {
    repeat(g, n).expect("repeat of a valid graph")
}

fn lap_pipe(policy: Policy, k: usize) -> PiPEConfig {
    PiPEConfig {
        base_pe: BasePe::Lap {
            policy,
            skip_trivial: false,
        },
        base_k: k,
        ..PiPEConfig::default()
    }
}

fn rw_pipe(k: usize) -> PiPEConfig {
    PiPEConfig {
        base_pe: BasePe::Rw,
        base_k: k,
        ..PiPEConfig::default()
    }
}

/// Builds construction `id` at scale `n`.
pub fn construction(id: &str, n: usize) -> Result<Construction, HarnessError> {
    if n == 0 {
        return Err(HarnessError::Scale(n));
    }
    let id: &'static str = IDS
        .iter()
        .find(|&&x| x == id)
        .ok_or_else(|| HarnessError::UnknownId(id.to_string()))?;
    Ok(match id {
        "prop31_s1" => six_vertex_lap(id)?,
        "prop31_s23" => isolated_vs_triangles(id, n),
        "prop32_s1" => six_vertex_rw(id)?,
        "prop32_s23" => cycles_rw(id),
        "lemma33" => birth_encoding(id),
        "prop34_rw" => ph_rw(id, n),
        "prop34_lpe" => ph_lpe(id, n),
        "prop35_de" => ph_distance(id, n),
        "prop36" => degree_pair(id)?,
        "prop41" => pipe_vs_lspe(id, n),
        "prop42" => pipe_vs_ph(id, n),
        "prop43" => cospectral(id)?,
        "prop44" => fwl_projection(id, n),
        _ => unreachable!("id checked against IDS"),
    })
}

fn six_vertex_lap(id: &'static str) -> Result<Construction, HarnessError> {
    let (g1, g2) = reconstruct::cached_pair(reconstruct::SIX_K, reconstruct::SIX_K_PRIME)?;
    let mut claims = vec![
        claim(
            "table_k",
            "K reproduces its published LapPE table (trivial eigenvector skipped) within 0.02",
            Check::MatchesTable(Side::First, Target::lap(rows(tables::SIX_K_LAP))),
            true,
        ),
        claim(
            "table_k_prime",
            "K' reproduces its published LapPE table within 0.02",
            Check::MatchesTable(Side::Second, Target::lap(rows(tables::SIX_K_PRIME_LAP))),
            true,
        ),
        claim("non_isomorphic", "K and K' are not isomorphic", Check::NonIsomorphic, true),
        claim("betti_equal", "K and K' have equal Betti numbers", Check::BettiEqual(vec![0, 1]), true),
        claim(
            "lap_skip_trivial_differs",
            "LapPE without the trivial eigenvector differs for k = 2..5",
            Check::PeDiffer((2..=5).map(Pe::lap_skip).collect()),
            true,
        ),
    ];
    claims.push(claim(
        "lap_raw_differs",
        "raw LapPE differs for k = 2..6",
        Check::PeDiffer((2..=6).map(Pe::lap_raw).collect()),
        true,
    ));
    Ok(Construction {
        id,
        description: "six-vertex pair K, K' with equal Betti numbers, reconstructed from its LapPE tables",
        scaled: false,
        g1,
        g2,
        claims,
    })
}

fn isolated_vs_triangles(id: &'static str, n: usize) -> Construction {
    let g1 = times(&union(vec![complete(1), complete(3)]), n);
    let g2 = Graph::empty(4 * n);
    let claims = vec![
        claim("betti0_differs", "beta0 differs", Check::BettiDiffer(0), true),
        claim("betti1_differs", "beta1 differs", Check::BettiDiffer(1), true),
        claim(
            "lap_k1_equal",
            "raw LapPE with k = 1 (the trivial eigenvector) is equal",
            Check::PeEqual(vec![Pe::lap_raw(1)]),
            true,
        ),
        claim(
            "null_space_equal",
            "the 2n smallest eigenvalues coincide (all zero)",
            Check::SmallestEigenvaluesEqual(2 * n),
            true,
        ),
        info("lap_k2", "raw LapPE with k = 2", Check::PeEqual(vec![Pe::lap_raw(2)])),
        info(
            "lap_projection_k1",
            "LapPE eigenspace projection with k = 1",
            Check::PeEqual(vec![Pe::lap_projection(1)]),
        ),
    ];
    Construction {
        id,
        description: "n copies of K1 u K3 vs 4n isolated vertices",
        scaled: true,
        g1,
        g2,
        claims,
    }
}

fn six_vertex_rw(id: &'static str) -> Result<Construction, HarnessError> {
    let (g1, g2) = reconstruct::cached_pair(reconstruct::SIX_K, reconstruct::SIX_K_PRIME)?;
    let claims = vec![
        claim(
            "table_k",
            "K reproduces its published RWPE table within 0.02",
            Check::MatchesTable(Side::First, Target::rw(rows(tables::SIX_K_RW))),
            true,
        ),
        claim(
            "table_k_prime",
            "K' reproduces its published RWPE table within 0.02",
            Check::MatchesTable(Side::Second, Target::rw(rows(tables::SIX_K_PRIME_RW))),
            true,
        ),
        claim("betti_equal", "K and K' have equal Betti numbers", Check::BettiEqual(vec![0, 1]), true),
        claim(
            "rw_differs",
            "RWPE differs for k = 2..10",
            Check::PeDiffer((2..=10).map(|k| Pe::Rw { k }).collect()),
            true,
        ),
    ];
    Ok(Construction {
        id,
        description: "six-vertex pair K, K' compared by random-walk encodings",
        scaled: false,
        g1,
        g2,
        claims,
    })
}

fn cycles_rw(id: &'static str) -> Construction {
    let (g1, g2) = reconstruct::cycle_pair_direct();
    let claims = vec![
        claim(
            "rw_equal",
            "RWPE is equal for k = 1..4",
            Check::PeEqual((1..=4).map(|k| Pe::Rw { k }).collect()),
            true,
        ),
        claim(
            "rw_exact",
            "every RWPE row with k = 4, scaled by 16, is exactly (0, 8, 0, 6)",
            Check::RwScaledExact {
                k: 4,
                scale: 16.0,
                row: vec![0.0, 8.0, 0.0, 6.0],
            },
            true,
        ),
        claim(
            "table",
            "both graphs reproduce the published rounded row (0, 0.50, 0, 0.37)",
            Check::MatchesTable(Side::Both, Target::rw(vec![tables::CYCLE_RW_ROW.to_vec(); 10])),
            true,
        ),
        claim("betti0_differs", "beta0 differs", Check::BettiDiffer(0), true),
        claim("betti1_differs", "beta1 differs", Check::BettiDiffer(1), true),
        claim(
            "search_finds_pair",
            "exhaustive search over 2-regular ten-vertex graphs finds exactly this pair",
            Check::CycleSearchReturnsPair,
            true,
        ),
    ];
    Construction {
        id,
        description: "C10 vs C5 u C5 compared by random-walk encodings",
        scaled: false,
        g1,
        g2,
        claims,
    }
}

fn birth_encoding(id: &'static str) -> Construction {
    let (g1, g2) = reconstruct::cycle_pair_direct();
    Construction {
        id,
        description: "seeded random pairs; birth multisets under injective filtrations",
        scaled: false,
        g1,
        g2,
        claims: vec![claim(
            "births_encode_colors",
            "over 200 random pairs, unequal RWPE / LapPE / DE multisets give unequal dim-0 birth multisets under every injective filtration tried",
            Check::EncodingsDetermineBirths { pairs: 200 },
            true,
        )],
    }
}

fn ph_rw(id: &'static str, n: usize) -> Construction {
    let (a, b) = reconstruct::cycle_pair_direct();
    let rw = Pe::Rw { k: 4 };
    Construction {
        id,
        description: "n copies of C10 vs n copies of C5 u C5 under RW colours",
        scaled: true,
        g1: times(&a, n),
        g2: times(&b, n),
        claims: vec![
            claim("rw_equal", "RWPE with k = 4 is equal", Check::PeEqual(vec![rw.clone()]), true),
            claim("betti0_differs", "beta0 differs", Check::BettiDiffer(0), true),
            claim(
                "diagram0_differs",
                "dim-0 diagrams under RW colours differ for every injective filtration",
                Check::DiagramsDiffer {
                    colors: Colors::Pe(rw),
                    dims: vec![0],
                },
                true,
            ),
        ],
    }
}

fn ph_lpe(id: &'static str, n: usize) -> Construction {
    let (a, b) = reconstruct::cycle_pair_direct();
    let lap = Pe::lap_raw(1);
    Construction {
        id,
        description: "n copies of C10 vs n copies of C5 u C5 under LapPE colours",
        scaled: true,
        g1: times(&a, n),
        g2: times(&b, n),
        claims: vec![
            claim("lap_equal", "raw LapPE with k = 1 is equal", Check::PeEqual(vec![lap.clone()]), true),
            claim("betti0_differs", "beta0 differs", Check::BettiDiffer(0), true),
            claim(
                "diagram0_differs",
                "dim-0 diagrams under LapPE colours differ for every injective filtration",
                Check::DiagramsDiffer {
                    colors: Colors::Pe(lap),
                    dims: vec![0],
                },
                true,
            ),
        ],
    }
}

fn ph_distance(id: &'static str, n: usize) -> Construction {
    let g1 = times(&hypercube(3), n);
    let g2 = times(&hypercube(2), 2 * n);
    let sp = Pe::Distance {
        anchors: Anchors::SelfAnchored,
        mode: DistanceMode::ShortestPath,
        k: 1,
    };
    let claims = vec![
        claim(
            "de_equal",
            "self-anchored shortest-path DE is equal",
            Check::PeEqual(vec![sp.clone()]),
            true,
        ),
        claim("betti0_differs", "beta0 differs", Check::BettiDiffer(0), true),
        claim(
            "diagram0_differs",
            "dim-0 diagrams under DE colours differ for every injective filtration",
            Check::DiagramsDiffer {
                colors: Colors::Pe(sp),
                dims: vec![0],
            },
            true,
        ),
        info(
            "de_fixed_anchor",
            "shortest-path DE anchored at vertex 0",
            Check::PeEqual(vec![Pe::Distance {
                anchors: Anchors::Fixed(vec![0]),
                mode: DistanceMode::ShortestPath,
                k: 1,
            }]),
        ),
        info(
            "de_rw_vector",
            "self-anchored random-walk DE with k = 3",
            Check::PeEqual(vec![Pe::Distance {
                anchors: Anchors::SelfAnchored,
                mode: DistanceMode::RwVector,
                k: 3,
            }]),
        ),
        info(
            "de_pagerank",
            "self-anchored PageRank DE with coefficients (1/2, 1/4, 1/8)",
            Check::PeEqual(vec![Pe::Distance {
                anchors: Anchors::SelfAnchored,
                mode: DistanceMode::PageRank(vec![0.5, 0.25, 0.125]),
                k: 3,
            }]),
        ),
    ];
    Construction {
        id,
        description: "n copies of Q3 vs 2n copies of Q2 under distance colours",
        scaled: true,
        g1,
        g2,
        claims,
    }
}

const ALPHA: &str = "a";
const GAMMA: &str = "g";

/// Degree-filtration shape with `f(3) = alpha`, `f(2) = gamma`.
fn degree_shape(alpha: f64, gamma: f64, pairs: Vec<(f64, Option<f64>)>) -> Shape {
    Shape {
        table: vec![(2, gamma), (3, alpha)],
        names: vec![(alpha, ALPHA), (gamma, GAMMA)],
        pairs,
    }
}

fn degree_pair(id: &'static str) -> Result<Construction, HarnessError> {
    let (g1, g2) = reconstruct::cached_pair(reconstruct::TEN_G, reconstruct::TEN_G_PRIME)?;
    let (lo, hi) = (0.25, 0.75);
    let mut case1 = vec![(lo, Some(lo)), (lo, None)];
    case1.extend(std::iter::repeat_n((hi, Some(hi)), 8));
    let mut case2 = vec![(lo, None), (lo, Some(lo))];
    case2.extend(std::iter::repeat_n((hi, Some(hi)), 8));
    let lap = Pe::lap_skip(2);
    let rw = Pe::Rw { k: 5 };
    let claims = vec![
        claim(
            "lap_table",
            "G reproduces its published LapPE table within 0.02",
            Check::MatchesTable(Side::First, Target::lap(rows(tables::TEN_G_LAP))),
            true,
        ),
        claim(
            "lap_table_prime",
            "G' reproduces its published LapPE table within 0.02",
            Check::MatchesTable(Side::Second, Target::lap(rows(tables::TEN_G_PRIME_LAP))),
            true,
        ),
        claim(
            "rw_table",
            "G reproduces its published RWPE table within 0.02",
            Check::MatchesTable(Side::First, Target::rw(rows(tables::TEN_G_RW))),
            true,
        ),
        claim(
            "rw_table_prime",
            "G' reproduces its published RWPE table within 0.02",
            Check::MatchesTable(Side::Second, Target::rw(rows(tables::TEN_G_PRIME_RW))),
            true,
        ),
        claim("degrees_equal", "degree multisets are equal", Check::DegreesEqual, true),
        claim(
            "degree_diagrams_equal",
            "dim-0 diagrams under degree colours agree for every injective filtration",
            Check::DiagramsEqual {
                colors: Colors::Degree,
                dims: vec![0],
            },
            true,
        ),
        claim(
            "shape_alpha_first",
            "with f(3) = a < f(2) = g both diagrams are {(a,a), (a,inf), 8x(g,g)}",
            Check::DegreeShape(Side::Both, degree_shape(lo, hi, case1)),
            true,
        ),
        claim(
            "shape_gamma_first",
            "with f(2) = g < f(3) = a both diagrams are {8x(a,a), (g,inf), (g,g)}",
            Check::DegreeShape(Side::Both, degree_shape(hi, lo, case2)),
            true,
        ),
        claim(
            "lap_differs",
            "LapPE without the trivial eigenvector, k = 2, differs",
            Check::PeDiffer(vec![lap.clone()]),
            true,
        ),
        claim(
            "lap_diagrams_differ",
            "dim-0 diagrams under LapPE colours differ for every injective filtration",
            Check::DiagramsDiffer {
                colors: Colors::Pe(lap),
                dims: vec![0],
            },
            true,
        ),
        claim("rw_differs", "RWPE with k = 5 differs", Check::PeDiffer(vec![rw.clone()]), true),
        claim(
            "rw_diagrams_differ",
            "dim-0 diagrams under RW colours differ for every injective filtration",
            Check::DiagramsDiffer {
                colors: Colors::Pe(rw),
                dims: vec![0],
            },
            true,
        ),
    ];
    Ok(Construction {
        id,
        description: "ten-vertex pair with equal degree multisets, reconstructed from its LapPE and RWPE tables",
        scaled: false,
        g1,
        g2,
        claims,
    })
}

fn pipe_vs_lspe(id: &'static str, n: usize) -> Construction {
    let g1 = times(&cycle(4), 3 * n);
    let g2 = times(&cycle(6), 2 * n);
    let cfg = lap_pipe(Policy::Raw, 1);
    Construction {
        id,
        description: "3n copies of C4 vs 2n copies of C6",
        scaled: true,
        g1,
        g2,
        claims: vec![
            claim("lap_equal", "raw LapPE with k = 1 is equal", Check::PeEqual(vec![Pe::lap_raw(1)]), true),
            claim("wl1_equal", "1-WL does not distinguish the pair", Check::Wl1Distinguishes, false),
            claim(
                "lspe_equal",
                "LSPE embeddings coincide on every seed",
                Check::LspeSeparates(cfg.clone()),
                false,
            ),
            claim("pipe_separates", "PiPE embeddings separate the pair", Check::PipeSeparates(cfg), true),
            claim(
                "diagram0_differs",
                "dim-0 diagrams under LapPE colours differ for every injective filtration",
                Check::DiagramsDiffer {
                    colors: Colors::Pe(Pe::lap_raw(1)),
                    dims: vec![0],
                },
                true,
            ),
        ],
    }
}

fn pipe_vs_ph(id: &'static str, n: usize) -> Construction {
    let g1 = times(&cycle(4), n);
    let g2 = times(&path(4), n);
    let cfg = lap_pipe(Policy::Raw, 1);
    Construction {
        id,
        description: "n copies of C4 vs n copies of P4",
        scaled: true,
        g1,
        g2,
        claims: vec![
            claim("betti0_equal", "beta0 is equal", Check::BettiEqual(vec![0]), true),
            claim(
                "lap_diagrams_equal",
                "diagrams under raw LapPE colours (k = 1) agree for every injective filtration",
                Check::DiagramsEqual {
                    colors: Colors::Pe(Pe::lap_raw(1)),
                    dims: vec![0, 1],
                },
                true,
            ),
            claim("pipe_separates", "PiPE embeddings separate the pair", Check::PipeSeparates(cfg.clone()), true),
            claim(
                "lspe_equal",
                "LSPE embeddings coincide on every seed",
                Check::LspeSeparates(cfg),
                false,
            ),
        ],
    }
}

fn cospectral(id: &'static str) -> Result<Construction, HarnessError> {
    let (g1, g2) = reconstruct::cached_pair(reconstruct::COSPECTRAL_K, reconstruct::COSPECTRAL_K_PRIME)?;
    let rw = Pe::Rw { k: 4 };
    let claims = vec![
        claim(
            "table",
            "K reproduces its published RWPE table within 0.02, third column divided by 10",
            Check::MatchesTable(
                Side::First,
                Target::rw(tables::cospectral_corrected(tables::COSPECTRAL_K_RW)),
            ),
            true,
        ),
        claim(
            "table_prime",
            "K' reproduces its published RWPE table within 0.02, third column divided by 10",
            Check::MatchesTable(
                Side::Second,
                Target::rw(tables::cospectral_corrected(tables::COSPECTRAL_K_PRIME_RW)),
            ),
            true,
        ),
        info(
            "table_literal",
            "K reproduces the published RWPE table as printed",
            Check::MatchesTable(Side::First, Target::rw(rows(tables::COSPECTRAL_K_RW))),
        ),
        claim("regular", "both graphs are 4-regular", Check::Regular(4), true),
        claim("cospectral", "normalized Laplacian spectra are equal", Check::Cospectral, true),
        claim("non_isomorphic", "K and K' are not isomorphic", Check::NonIsomorphic, true),
        claim(
            "rw_equal",
            "RWPE is equal for k = 1..12",
            Check::PeEqual((1..=12).map(|k| Pe::Rw { k }).collect()),
            true,
        ),
        claim("wl1_equal", "1-WL does not distinguish the pair", Check::Wl1Distinguishes, false),
        claim("fwl2_distinguishes", "2-FWL distinguishes the pair", Check::KfwlDistinguishes(2), true),
        claim(
            "rw_diagrams_equal",
            "diagrams under RW colours (k = 4) agree for every injective filtration",
            Check::DiagramsEqual {
                colors: Colors::Pe(rw),
                dims: vec![0, 1],
            },
            true,
        ),
        info(
            "pipe_rw",
            "RW-based PiPE embeddings separate the pair",
            Check::PipeSeparates(rw_pipe(4)),
        ),
    ];
    Ok(Construction {
        id,
        description: "cospectral 4-regular ten-vertex pair, reconstructed from its RWPE tables",
        scaled: false,
        g1,
        g2,
        claims,
    })
}

fn fwl_projection(id: &'static str, n: usize) -> Construction {
    let g1 = times(&cycle(6), n);
    let g2 = times(&cycle(3), 2 * n);
    Construction {
        id,
        description: "n copies of C6 vs 2n copies of C3, plus a seeded random corpus",
        scaled: true,
        g1,
        g2,
        claims: vec![
            claim("wl1_equal", "1-WL does not distinguish the pair", Check::Wl1Distinguishes, false),
            claim("fwl2_distinguishes", "2-FWL distinguishes the pair", Check::KfwlDistinguishes(2), true),
            claim(
                "projection_separates",
                "on 50 random pairs plus regular pairs, every 2-FWL-distinguished pair is separated by the node projection of 2-FWL colours",
                Check::FwlProjectionSeparates { pairs: 50 },
                true,
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_builds_with_unique_claim_ids() {
        for id in IDS {
            let c = construction(id, 1).unwrap();
            let mut names: Vec<&str> = c.claims.iter().map(|c| c.id).collect();
            names.sort_unstable();
            names.dedup();
            assert_eq!(names.len(), c.claims.len(), "{id}");
        }
    }

    #[test]
    fn documented_examples() {
        let c = construction("prop41", 1).unwrap();
        assert_eq!((c.g1.n(), c.g2.n()), (12, 12));
        assert!(c.g1.degrees().iter().chain(&c.g2.degrees()).all(|&d| d == 2));
        let c = construction("prop42", 1).unwrap();
        assert_eq!((c.g1.edge_count(), c.g2.edge_count()), (4, 3));
        let c = construction("prop34_rw", 1).unwrap();
        assert_eq!((c.g1.n(), c.g2.n(), c.g2.components().len()), (10, 10, 2));
    }

    #[test]
    fn bad_requests() {
        assert!(matches!(construction("prop99", 1), Err(HarnessError::UnknownId(_))));
        assert!(matches!(construction("prop41", 0), Err(HarnessError::Scale(0))));
    }
}
