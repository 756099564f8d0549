//! 1-WL colour refinement and folklore k-WL tuple refinement.
//!
//! Colour ids come from a dictionary over sorted signatures shared by every
//! graph in one run, so ids are comparable across the graphs.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::encode::lex_cmp;
use crate::graphcore::Graph;
use crate::persist::ColorAssignment;

pub type ColorHistogram = BTreeMap<usize, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WlError {
    #[error("k = {0} unsupported; use 2 or 3")]
    UnsupportedK(usize),
    #[error("{k}-FWL on {n} vertices exceeds the budget of n <= {limit}")]
    Budget { k: usize, n: usize, limit: usize },
    #[error("expected one initial colouring per graph")]
    InitCount,
}

/// Vertex limits for tuple refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KfwlBudget {
    pub max_n_k2: usize,
    pub max_n_k3: usize,
}

impl Default for KfwlBudget {
    fn default() -> Self {
        Self {
            max_n_k2: 12,
            max_n_k3: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleColoring {
    pub k: usize,
    pub n: usize,
    /// Colour of tuple `(v_1, ..., v_k)` at index `sum v_i n^(k-i)`.
    pub colors: Vec<usize>,
    pub rounds: usize,
}

impl TupleColoring {
    pub fn histogram(&self) -> ColorHistogram {
        histogram(&self.colors)
    }

    pub fn tuple(&self, mut idx: usize) -> Vec<usize> {
        let mut t = vec![0; self.k];
        for slot in t.iter_mut().rev() {
            *slot = idx % self.n;
            idx /= self.n;
        }
        t
    }
}

pub fn histogram(colors: &[usize]) -> ColorHistogram {
    let mut h = ColorHistogram::new();
    for &c in colors {
        *h.entry(c).or_default() += 1;
    }
    h
}

/// Relabels signatures to dense ids in sorted-signature order.
fn relabel<S: Ord + Clone>(sigs: &[Vec<S>]) -> Vec<Vec<usize>> {
    let mut dict: BTreeMap<S, usize> = BTreeMap::new();
    for s in sigs.iter().flatten() {
        dict.entry(s.clone()).or_insert(0);
    }
    for (i, id) in dict.values_mut().enumerate() {
        *id = i;
    }
    sigs.iter().map(|g| g.iter().map(|s| dict[s]).collect()).collect()
}

fn class_count(colors: &[Vec<usize>]) -> usize {
    let mut all: Vec<usize> = colors.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

/// Initial ids from arbitrary colour vectors, shared across graphs.
fn initial_ids(inits: &[&ColorAssignment]) -> Vec<Vec<usize>> {
    let mut all: Vec<&Vec<f64>> = inits.iter().flat_map(|c| c.rows()).collect();
    all.sort_by(|a, b| lex_cmp(a, b));
    all.dedup();
    inits
        .iter()
        .map(|c| {
            c.rows()
                .iter()
                .map(|r| all.binary_search_by(|x| lex_cmp(x, r)).expect("colour present"))
                .collect()
        })
        .collect()
}

/// Joint 1-WL on several graphs until the shared partition is stable.
pub fn wl1_joint(graphs: &[&Graph], inits: &[&ColorAssignment]) -> Result<Vec<Vec<usize>>, WlError> {
    if graphs.len() != inits.len() {
        return Err(WlError::InitCount);
    }
    let mut colors = initial_ids(inits);
    let max_rounds = graphs.iter().map(|g| g.n()).sum::<usize>() + 1;
    for _ in 0..max_rounds {
        let sigs: Vec<Vec<(usize, Vec<usize>)>> = graphs
            .iter()
            .zip(&colors)
            .map(|(g, c)| {
                (0..g.n())
                    .map(|v| {
                        let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&u| c[u]).collect();
                        nb.sort_unstable();
                        (c[v], nb)
                    })
                    .collect()
            })
            .collect();
        let next = relabel(&sigs);
        let done = class_count(&next) == class_count(&colors);
        colors = next;
        if done {
            break;
        }
    }
    Ok(colors)
}

/// Stable 1-WL colouring of one graph and its histogram.
pub fn wl1(g: &Graph, init: &ColorAssignment) -> (ColorAssignment, ColorHistogram) {
    let c = wl1_joint(&[g], &[init]).expect("one init per graph").remove(0);
    (ColorAssignment::ids(&c), histogram(&c))
}

/// True iff joint 1-WL histograms differ.
pub fn wl1_distinguish(g1: &Graph, c1: &ColorAssignment, g2: &Graph, c2: &ColorAssignment) -> bool {
    let c = wl1_joint(&[g1, g2], &[c1, c2]).expect("two inits");
    histogram(&c[0]) != histogram(&c[1])
}

fn budget_check(k: usize, n: usize, budget: &KfwlBudget) -> Result<(), WlError> {
    let limit = match k {
        2 => budget.max_n_k2,
        3 => budget.max_n_k3,
        _ => return Err(WlError::UnsupportedK(k)),
    };
    if n > limit {
        return Err(WlError::Budget { k, n, limit });
    }
    Ok(())
}

/// Equality and adjacency pattern of the ordered tuple.
fn atomic_type(g: &Graph, t: &[usize]) -> Vec<u8> {
    let mut out = Vec::with_capacity(t.len() * t.len());
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            out.push(u8::from(t[i] == t[j]) << 1 | u8::from(t[i] != t[j] && g.has_edge(t[i], t[j])));
        }
    }
    out
}

/// Joint folklore k-WL on several graphs.
pub fn kfwl_joint(graphs: &[&Graph], k: usize, budget: &KfwlBudget) -> Result<Vec<TupleColoring>, WlError> {
    for g in graphs {
        budget_check(k, g.n(), budget)?;
    }
    let sizes: Vec<usize> = graphs.iter().map(|g| g.n().pow(k as u32)).collect();
    let tuples = |n: usize, idx: usize| -> Vec<usize> {
        let mut t = vec![0; k];
        let mut x = idx;
        for slot in t.iter_mut().rev() {
            *slot = x % n;
            x /= n;
        }
        t
    };
    let encode = |n: usize, t: &[usize]| t.iter().fold(0, |acc, &v| acc * n + v);
    let init: Vec<Vec<Vec<u8>>> = graphs
        .iter()
        .zip(&sizes)
        .map(|(g, &m)| (0..m).map(|i| atomic_type(g, &tuples(g.n(), i))).collect())
        .collect();
    let mut colors = relabel(&init);
    let mut rounds = 0;
    loop {
        let sigs: Vec<Vec<(usize, Vec<Vec<usize>>)>> = graphs
            .iter()
            .zip(&colors)
            .zip(&sizes)
            .map(|((g, c), &m)| {
                let n = g.n();
                (0..m)
                    .map(|i| {
                        let t = tuples(n, i);
                        let mut multiset: Vec<Vec<usize>> = (0..n)
                            .map(|w| {
                                (0..k)
                                    .map(|slot| {
                                        let mut s = t.clone();
                                        s[slot] = w;
                                        c[encode(n, &s)]
                                    })
                                    .collect()
                            })
                            .collect();
                        multiset.sort_unstable();
                        (c[i], multiset)
                    })
                    .collect()
            })
            .collect();
        let next = relabel(&sigs);
        rounds += 1;
        let done = class_count(&next) == class_count(&colors);
        colors = next;
        if done {
            break;
        }
    }
    Ok(graphs
        .iter()
        .zip(colors)
        .map(|(g, c)| TupleColoring {
            k,
            n: g.n(),
            colors: c,
            rounds,
        })
        .collect())
}

pub fn kfwl(g: &Graph, k: usize) -> Result<TupleColoring, WlError> {
    Ok(kfwl_joint(&[g], k, &KfwlBudget::default())?.remove(0))
}

pub fn kfwl_distinguish(g1: &Graph, g2: &Graph, k: usize) -> Result<bool, WlError> {
    kfwl_distinguish_with(g1, g2, k, &KfwlBudget::default())
}

pub fn kfwl_distinguish_with(g1: &Graph, g2: &Graph, k: usize, budget: &KfwlBudget) -> Result<bool, WlError> {
    if g1.n() != g2.n() {
        return Ok(true);
    }
    let tc = kfwl_joint(&[g1, g2], k, budget)?;
    Ok(tc[0].histogram() != tc[1].histogram())
}

/// Node colour = the set of stable tuple colours over tuples containing the
/// node, written as the sorted id list. Comparable across graphs whenever the
/// tuple colourings were computed jointly.
pub fn kfwl_node_projection(g: &Graph, tc: &TupleColoring) -> ColorAssignment {
    let n = g.n();
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &c) in tc.colors.iter().enumerate() {
        let mut t = tc.tuple(i);
        t.sort_unstable();
        t.dedup();
        for u in t {
            sets[u].push(c);
        }
    }
    ColorAssignment::new(
        sets.into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s.into_iter().map(|c| c as f64).collect()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::{cycle, disjoint_union, hypercube, path, permute};
    use crate::persist::is_color_separating;

    fn c33() -> Graph {
        disjoint_union(&[cycle(3), cycle(3)]).unwrap()
    }

    #[test]
    fn wl1_examples() {
        let k = ColorAssignment::constant(6);
        assert!(!wl1_distinguish(&cycle(6), &k, &c33(), &k));
        let (_, h) = wl1(&path(3), &ColorAssignment::constant(3));
        let mut counts: Vec<usize> = h.values().copied().collect();
        counts.sort_unstable();
        assert_eq!(counts, vec![1, 2]);
        let (_, h) = wl1(&hypercube(3), &ColorAssignment::constant(8));
        assert_eq!(h.len(), 1);
    }

    #[test]
    fn kfwl_examples() {
        let tc = kfwl(&cycle(4), 2).unwrap();
        let diag: Vec<usize> = (0..4).map(|v| tc.colors[v * 4 + v]).collect();
        assert!(diag.iter().all(|&c| c == diag[0]));
        assert!(kfwl_distinguish(&cycle(6), &c33(), 2).unwrap());
        let g = cycle(7);
        let p = permute(&g, &[3, 1, 4, 0, 6, 5, 2]).unwrap();
        assert!(!kfwl_distinguish(&g, &p, 2).unwrap());
        assert!(!kfwl_distinguish(&g, &p, 3).unwrap());
        assert_eq!(kfwl(&g, 4), Err(WlError::UnsupportedK(4)));
        assert!(matches!(kfwl(&cycle(13), 2), Err(WlError::Budget { .. })));
    }

    #[test]
    fn projection_examples() {
        let p3 = kfwl_node_projection(&path(3), &kfwl(&path(3), 2).unwrap());
        assert_eq!(p3.rows()[0], p3.rows()[2]);
        assert_ne!(p3.rows()[0], p3.rows()[1]);
        let c8 = kfwl_node_projection(&cycle(8), &kfwl(&cycle(8), 2).unwrap());
        assert!(c8.rows().iter().all(|r| r == &c8.rows()[0]));
        let (g1, g2) = (cycle(6), c33());
        let tc = kfwl_joint(&[&g1, &g2], 2, &KfwlBudget::default()).unwrap();
        let x1 = kfwl_node_projection(&g1, &tc[0]);
        let x2 = kfwl_node_projection(&g2, &tc[1]);
        assert!(is_color_separating(&g1, &x1, &g2, &x2, &[]));
    }
}
