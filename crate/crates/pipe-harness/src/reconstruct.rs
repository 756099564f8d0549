//! Brute-force reconstruction of graphs that are only given through their
//! encoding tables, and the committed cache of the results.

use std::collections::BTreeMap;

use pipe_core::encode::{self, rows_match_assignment, EncodeError, LapOptions, Policy, ROUNDED_TOL};
use pipe_core::graphcore::{are_isomorphic, cycle, disjoint_union, GraphError};
use pipe_core::spectral;
use pipe_core::Graph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tables::{self, rows};

#[derive(Debug, Error)]
pub enum ReconstructError {
    #[error("search space unbounded: a vertex count is required")]
    Unbounded,
    #[error("degree sequence has length {got}, expected {n}")]
    DegreeLength { n: usize, got: usize },
    #[error("exhaustive search over all graphs is limited to {limit} vertices, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("no graph matches {0}")]
    NoMatch(String),
    #[error("{what}: expected {expected} isomorphism classes, found {found}")]
    Ambiguous { what: String, expected: usize, found: usize },
    #[error("unknown cache entry {0}")]
    MissingEntry(String),
    #[error("cache: {0}")]
    Cache(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

/// Largest `n` for which every graph on `n` vertices is enumerated.
pub const ALL_GRAPHS_MAX_N: usize = 7;

/// Finite set of labelled graphs to search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchSpace {
    pub n: Option<usize>,
    /// Per-vertex degrees, non-increasing. `None` enumerates every graph.
    pub degrees: Option<Vec<usize>>,
    pub connected: bool,
}

impl SearchSpace {
    pub fn all(n: usize) -> Self {
        Self {
            n: Some(n),
            ..Self::default()
        }
    }

    pub fn regular(n: usize, d: usize) -> Self {
        Self::with_degrees(vec![d; n])
    }

    pub fn with_degrees(mut degrees: Vec<usize>) -> Self {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        Self {
            n: Some(degrees.len()),
            degrees: Some(degrees),
            connected: false,
        }
    }

    pub fn connected(mut self) -> Self {
        self.connected = true;
        self
    }

    /// Calls `visit` on every labelled graph of the space, up to the
    /// relabellings removed by symmetry breaking.
    pub fn for_each(&self, mut visit: impl FnMut(&Graph)) -> Result<(), ReconstructError> {
        let n = self.n.ok_or(ReconstructError::Unbounded)?;
        let mut emit = |edges: &[(usize, usize)]| {
            let g = Graph::new(n, edges).expect("search emits simple graphs");
            if !self.connected || g.components().len() == 1 {
                visit(&g);
            }
        };
        match &self.degrees {
            None => {
                if n > ALL_GRAPHS_MAX_N {
                    return Err(ReconstructError::TooLarge {
                        n,
                        limit: ALL_GRAPHS_MAX_N,
                    });
                }
                let slots: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
                for mask in 0u64..1 << slots.len() {
                    let edges: Vec<(usize, usize)> = slots
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &e)| e)
                        .collect();
                    emit(&edges);
                }
            }
            Some(deg) => {
                if deg.len() != n {
                    return Err(ReconstructError::DegreeLength { n, got: deg.len() });
                }
                let mut need = deg.clone();
                let mut edges = Vec::new();
                fill(0, deg, &mut need, &mut edges, &mut emit);
            }
        }
        Ok(())
    }
}

/// Chooses the remaining neighbours of vertex `v` among later vertices.
///
/// Vertex 0 is processed first, while all other vertices of equal degree are
/// still interchangeable, so its neighbours are taken as a prefix of every
/// degree class.
fn fill(
    v: usize,
    deg: &[usize],
    need: &mut [usize],
    edges: &mut Vec<(usize, usize)>,
    emit: &mut impl FnMut(&[(usize, usize)]),
) {
    let n = deg.len();
    if v == n {
        emit(edges);
        return;
    }
    let candidates: Vec<usize> = (v + 1..n).filter(|&w| need[w] > 0).collect();
    if need[v] > candidates.len() {
        return;
    }
    let mut chosen = Vec::with_capacity(need[v]);
    choose(v, 0, &candidates, deg, need, edges, &mut chosen, emit);
}

#[allow(clippy::too_many_arguments)]
fn choose(
    v: usize,
    start: usize,
    candidates: &[usize],
    deg: &[usize],
    need: &mut [usize],
    edges: &mut Vec<(usize, usize)>,
    chosen: &mut Vec<usize>,
    emit: &mut impl FnMut(&[(usize, usize)]),
) {
    if chosen.len() == need[v] {
        let saved = need[v];
        for &w in chosen.iter() {
            need[w] -= 1;
            edges.push((v, w));
        }
        need[v] = 0;
        fill(v + 1, deg, need, edges, emit);
        need[v] = saved;
        for &w in chosen.iter() {
            need[w] += 1;
            edges.pop();
        }
        return;
    }
    for i in start..candidates.len() {
        if candidates.len() - i < need[v] - chosen.len() {
            break;
        }
        let w = candidates[i];
        if v == 0 {
            // Prefix rule: skipping an earlier vertex of the same degree
            // class forbids choosing a later one.
            let skipped = candidates[start..i].iter().any(|&u| deg[u] == deg[w]);
            if skipped {
                continue;
            }
        }
        chosen.push(w);
        choose(v, i + 1, candidates, deg, need, edges, chosen, emit);
        chosen.pop();
    }
}

/// Encoding a reference table was printed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableEncoding {
    /// Raw LapPE without the trivial eigenvector.
    LapSkipTrivial { k: usize },
    Rw { k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub encoding: TableEncoding,
    pub rows: Vec<Vec<f64>>,
}

impl Target {
    pub fn lap(rows: Vec<Vec<f64>>) -> Self {
        let k = rows.first().map_or(0, Vec::len);
        Self {
            encoding: TableEncoding::LapSkipTrivial { k },
            rows,
        }
    }

    pub fn rw(rows: Vec<Vec<f64>>) -> Self {
        let k = rows.first().map_or(0, Vec::len);
        Self {
            encoding: TableEncoding::Rw { k },
            rows,
        }
    }
}

/// True iff the encoding of `g` equals `target` up to row order (and column
/// signs for LapPE), entrywise within `tol`.
pub fn matches_table(g: &Graph, target: &Target, tol: f64) -> Result<bool, EncodeError> {
    if g.n() != target.rows.len() {
        return Ok(false);
    }
    match target.encoding {
        TableEncoding::Rw { k } => Ok(rows_match_assignment(&encode::rw_pe(g, k)?.rows, &target.rows, tol)),
        TableEncoding::LapSkipTrivial { k } => {
            let pe = encode::lap_pe_with(g, LapOptions::new(k, Policy::Raw).skip_trivial())?;
            for flips in 0u32..1 << k {
                let flipped: Vec<Vec<f64>> = pe
                    .rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .map(|(j, &x)| if flips >> j & 1 == 1 { -x } else { x })
                            .collect()
                    })
                    .collect();
                if rows_match_assignment(&flipped, &target.rows, tol) {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Every isomorphism class in `space` whose encodings match all `targets`
/// within [`ROUNDED_TOL`], each represented by its first-enumerated member.
pub fn reconstruct_from_matrix(targets: &[Target], space: &SearchSpace) -> Result<Vec<Graph>, ReconstructError> {
    let mut classes: Vec<Graph> = Vec::new();
    let mut failure = None;
    space.for_each(|g| {
        if failure.is_some() {
            return;
        }
        let hit = targets.iter().try_fold(true, |acc, t| Ok::<_, EncodeError>(acc && matches_table(g, t, ROUNDED_TOL)?));
        match hit {
            Ok(true) => match classes.iter().map(|c| are_isomorphic(c, g)).collect::<Result<Vec<_>, _>>() {
                Ok(seen) if seen.iter().any(|&s| s) => {}
                Ok(_) => classes.push(g.clone()),
                Err(e) => failure = Some(ReconstructError::from(e)),
            },
            Ok(false) => {}
            Err(e) => failure = Some(e.into()),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(classes),
    }
}

fn exactly(what: &str, found: Vec<Graph>, expected: usize) -> Result<Vec<Graph>, ReconstructError> {
    match found.len() {
        0 => Err(ReconstructError::NoMatch(what.to_string())),
        f if f == expected => Ok(found),
        f => Err(ReconstructError::Ambiguous {
            what: what.to_string(),
            expected,
            found: f,
        }),
    }
}

/// Isomorphism classes of 2-regular ten-vertex graphs with the cycle RW
/// table: C10 and C5 u C5.
pub fn cycle_pair() -> Result<Vec<Graph>, ReconstructError> {
    let target = Target::rw(vec![tables::CYCLE_RW_ROW.to_vec(); 10]);
    exactly("cycle RW table", reconstruct_from_matrix(&[target], &SearchSpace::regular(10, 2))?, 2)
}

/// Six-vertex pair with equal Betti numbers and different LapPE.
pub fn six_vertex_pair() -> Result<(Graph, Graph), ReconstructError> {
    let space = SearchSpace::all(6).connected();
    let k = exactly("six-vertex K table", reconstruct_from_matrix(&[Target::lap(rows(tables::SIX_K_LAP))], &space)?, 1)?;
    let kp = exactly(
        "six-vertex K' table",
        reconstruct_from_matrix(&[Target::lap(rows(tables::SIX_K_PRIME_LAP))], &space)?,
        1,
    )?;
    Ok((k[0].clone(), kp[0].clone()))
}

/// Ten-vertex pair with equal degree-filtration diagrams, two vertices of
/// degree 3 and eight of degree 2.
pub fn degree_pair() -> Result<(Graph, Graph), ReconstructError> {
    let mut deg = vec![3, 3];
    deg.extend([2; 8]);
    let space = SearchSpace::with_degrees(deg).connected();
    let g = exactly(
        "ten-vertex G tables",
        reconstruct_from_matrix(
            &[Target::lap(rows(tables::TEN_G_LAP)), Target::rw(rows(tables::TEN_G_RW))],
            &space,
        )?,
        1,
    )?;
    let gp = exactly(
        "ten-vertex G' tables",
        reconstruct_from_matrix(
            &[Target::lap(rows(tables::TEN_G_PRIME_LAP)), Target::rw(rows(tables::TEN_G_PRIME_RW))],
            &space,
        )?,
        1,
    )?;
    Ok((g[0].clone(), gp[0].clone()))
}

/// Cospectral 4-regular ten-vertex pair with the RW table (shifted column
/// corrected). Both printed tables have the same rows as multisets, so one
/// search serves both graphs; among its classes exactly one cospectral pair
/// must exist, returned in enumeration order.
pub fn cospectral_pair() -> Result<(Graph, Graph), ReconstructError> {
    let k = Target::rw(tables::cospectral_corrected(tables::COSPECTRAL_K_RW));
    let kp = Target::rw(tables::cospectral_corrected(tables::COSPECTRAL_K_PRIME_RW));
    let found = reconstruct_from_matrix(&[k, kp], &SearchSpace::regular(10, 4))?;
    let mut pairs = Vec::new();
    for i in 0..found.len() {
        for j in i + 1..found.len() {
            if cospectral(&found[i], &found[j]) {
                pairs.push((found[i].clone(), found[j].clone()));
            }
        }
    }
    match pairs.len() {
        1 => Ok(pairs.remove(0)),
        0 => Err(ReconstructError::NoMatch("cospectral RW tables".to_string())),
        f => Err(ReconstructError::Ambiguous {
            what: "cospectral pairs matching the RW tables".to_string(),
            expected: 1,
            found: f,
        }),
    }
}

/// C10 and C5 u C5 built directly.
pub fn cycle_pair_direct() -> (Graph, Graph) {
    let c5 = cycle(5);
    (cycle(10), disjoint_union(&[c5.clone(), c5]).expect("disjoint union"))
}

/// Spectra of the normalized Laplacian agree within `1e-9`.
pub fn cospectral(g1: &Graph, g2: &Graph) -> bool {
    spectral::spectra_equal(g1, g2, 1e-9)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl From<&Graph> for CachedGraph {
    fn from(g: &Graph) -> Self {
        Self {
            n: g.n(),
            edges: g.edges().to_vec(),
        }
    }
}

pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionCache {
    pub format_version: u32,
    pub graphs: BTreeMap<String, CachedGraph>,
}

/// Committed output of [`regenerate_cache`].
pub const CACHE_JSON: &str = include_str!("../data/reconstructions.json");

pub const SIX_K: &str = "six_vertex_k";
pub const SIX_K_PRIME: &str = "six_vertex_k_prime";
pub const TEN_G: &str = "degree_pair_g";
pub const TEN_G_PRIME: &str = "degree_pair_g_prime";
pub const COSPECTRAL_K: &str = "cospectral_k";
pub const COSPECTRAL_K_PRIME: &str = "cospectral_k_prime";

/// Runs every search and collects the results.
pub fn regenerate_cache() -> Result<ReconstructionCache, ReconstructError> {
    let (k, kp) = six_vertex_pair()?;
    let (g, gp) = degree_pair()?;
    let (c, cp) = cospectral_pair()?;
    let graphs = [
        (SIX_K, &k),
        (SIX_K_PRIME, &kp),
        (TEN_G, &g),
        (TEN_G_PRIME, &gp),
        (COSPECTRAL_K, &c),
        (COSPECTRAL_K_PRIME, &cp),
    ]
    .into_iter()
    .map(|(name, g)| (name.to_string(), CachedGraph::from(g)))
    .collect();
    Ok(ReconstructionCache {
        format_version: CACHE_FORMAT_VERSION,
        graphs,
    })
}

/// Serialized form written to `data/reconstructions.json`.
pub fn cache_to_json(cache: &ReconstructionCache) -> Result<String, ReconstructError> {
    Ok(serde_json::to_string_pretty(cache)? + "\n")
}

pub fn load_cache() -> Result<ReconstructionCache, ReconstructError> {
    Ok(serde_json::from_str(CACHE_JSON)?)
}

/// A graph from the committed cache.
pub fn cached(name: &str) -> Result<Graph, ReconstructError> {
    let cache = load_cache()?;
    let entry = cache
        .graphs
        .get(name)
        .ok_or_else(|| ReconstructError::MissingEntry(name.to_string()))?;
    Ok(Graph::new(entry.n, &entry.edges)?)
}

pub fn cached_pair(a: &str, b: &str) -> Result<(Graph, Graph), ReconstructError> {
    Ok((cached(a)?, cached(b)?))
}

#[cfg(test)]
mod tests {
    use pipe_core::graphcore::{are_isomorphic, cycle, disjoint_union};
    use pipe_core::Graph;
    use crate::reconstruct::*;
    use crate::tables::{self, rows};

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, edges).unwrap()
    }

    #[test]
    fn committed_cache_regenerates_identically() {
        let fresh = cache_to_json(&regenerate_cache().unwrap()).unwrap();
        assert_eq!(fresh, CACHE_JSON);
        assert_eq!(load_cache().unwrap().format_version, CACHE_FORMAT_VERSION);
    }

    #[test]
    fn cycle_search_finds_exactly_two_classes() {
        let found = cycle_pair().unwrap();
        assert_eq!(found.len(), 2);
        let c5 = cycle(5);
        let expected = [cycle(10), disjoint_union(&[c5.clone(), c5]).unwrap()];
        for e in &expected {
            assert_eq!(found.iter().filter(|f| are_isomorphic(f, e).unwrap()).count(), 1);
        }
    }

    #[test]
    fn cached_graphs_have_the_hand_identified_shapes() {
        let ladder = graph(6, &[(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]);
        let k_prime = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (5, 2)]);
        let mut theta: Vec<(usize, usize)> = (0..10).map(|i| (i, (i + 1) % 10)).collect();
        theta.push((0, 5));
        let mut bridged: Vec<(usize, usize)> = (0..5).flat_map(|i| [(i, (i + 1) % 5), (5 + i, 5 + (i + 1) % 5)]).collect();
        bridged.push((0, 5));
        let cases = [
            (SIX_K, ladder),
            (SIX_K_PRIME, k_prime),
            (TEN_G, graph(10, &theta)),
            (TEN_G_PRIME, graph(10, &bridged)),
        ];
        for (name, expected) in cases {
            assert!(are_isomorphic(&cached(name).unwrap(), &expected).unwrap(), "{name}");
        }
    }

    #[test]
    fn cached_cospectral_pair_matches_corrected_tables() {
        let (k, kp) = cached_pair(COSPECTRAL_K, COSPECTRAL_K_PRIME).unwrap();
        assert!(k.degrees().iter().chain(&kp.degrees()).all(|&d| d == 4));
        assert!(cospectral(&k, &kp));
        assert!(!are_isomorphic(&k, &kp).unwrap());
        let t = Target::rw(tables::cospectral_corrected(tables::COSPECTRAL_K_RW));
        let tp = Target::rw(tables::cospectral_corrected(tables::COSPECTRAL_K_PRIME_RW));
        assert!(matches_table(&k, &t, 0.02).unwrap());
        assert!(matches_table(&kp, &tp, 0.02).unwrap());
        // As printed, the third column is out of range for a 4-regular graph.
        assert!(!matches_table(&k, &Target::rw(rows(tables::COSPECTRAL_K_RW)), 0.02).unwrap());
    }

    #[test]
    fn unbounded_and_unknown_requests_fail() {
        let empty = SearchSpace::default();
        assert!(matches!(
            reconstruct_from_matrix(&[Target::rw(vec![vec![0.0]])], &empty),
            Err(ReconstructError::Unbounded)
        ));
        assert!(matches!(cached("nope"), Err(ReconstructError::MissingEntry(_))));
    }

    #[test]
    fn unmatched_table_reports_no_classes() {
        let target = Target::rw(vec![vec![0.9, 0.9]; 4]);
        assert!(reconstruct_from_matrix(&[target], &SearchSpace::all(4)).unwrap().is_empty());
    }
}
