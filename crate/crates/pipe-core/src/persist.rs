//! Vertex-colour sublevel filtrations and their 0- and 1-dimensional
//! persistence diagrams.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::encode::{lex_cmp, tolerant_sorted, PEMatrix};
use crate::graphcore::{canonical_labeling, DisjointSet, Graph};
use crate::rng::Stream;
use crate::wl;

/// Colours closer than this in every entry are treated as the same colour
/// when building injective tables.
pub const COLOR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PersistError {
    #[error("no table entry for colour {0:?}")]
    MissingColor(Vec<f64>),
    #[error("table is not injective: colours {0:?} and {1:?} share value {2}")]
    NotInjective(Vec<f64>, Vec<f64>, f64),
    #[error("table lists colour {0:?} twice")]
    DuplicateKey(Vec<f64>),
    #[error("identity filtration needs scalar colours, got width {0}")]
    NotScalar(usize),
    #[error("affine weights have length {weights}, colours have width {width}")]
    WidthMismatch { weights: usize, width: usize },
    #[error("cannot compare a dim-{0} diagram with a dim-{1} diagram")]
    DimMismatch(u8, u8),
    #[error("expected {expected} values, got {got}")]
    ValueCount { expected: usize, got: usize },
}

/// One colour per vertex; scalar colours are width-1 rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorAssignment {
    rows: Vec<Vec<f64>>,
}

impl ColorAssignment {
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x + 0.0).collect())
            .collect();
        Self { rows }
    }

    pub fn scalars(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| vec![x]).collect())
    }

    pub fn ids(ids: &[usize]) -> Self {
        Self::new(ids.iter().map(|&x| vec![x as f64]).collect())
    }

    pub fn degrees(g: &Graph) -> Self {
        Self::ids(&g.degrees())
    }

    pub fn constant(n: usize) -> Self {
        Self::new(vec![vec![0.0]; n])
    }

    pub fn from_pe(p: &PEMatrix) -> Self {
        Self::new(p.rows.clone())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FiltrationSpec {
    /// Scalar colour used directly.
    Identity,
    /// Injective colour-to-value table; lookups match within [`COLOR_TOL`].
    Tabulated(Vec<(Vec<f64>, f64)>),
    /// `sigmoid(w . c + b)`.
    AffineSigmoid { weights: Vec<f64>, bias: f64 },
}

impl FiltrationSpec {
    /// Checks injectivity (distinct colours map to distinct values).
    pub fn tabulated(table: Vec<(Vec<f64>, f64)>) -> Result<Self, PersistError> {
        for (i, (ci, vi)) in table.iter().enumerate() {
            for (cj, vj) in &table[i + 1..] {
                if colors_close(ci, cj) {
                    return Err(PersistError::DuplicateKey(ci.clone()));
                }
                if vi == vj {
                    return Err(PersistError::NotInjective(ci.clone(), cj.clone(), *vi));
                }
            }
        }
        Ok(Self::Tabulated(table))
    }

    /// Table over the union of all colours, assigning `0, 1, 2, ...` in
    /// lexicographic colour order.
    pub fn injective_rank(colorings: &[&ColorAssignment]) -> Self {
        let classes = distinct_colors(colorings);
        Self::Tabulated(
            classes
                .into_iter()
                .enumerate()
                .map(|(i, c)| (c, i as f64))
                .collect(),
        )
    }

    /// Like [`Self::injective_rank`] but with the rank order reversed.
    pub fn injective_rank_reversed(colorings: &[&ColorAssignment]) -> Self {
        let classes = distinct_colors(colorings);
        let m = classes.len();
        Self::Tabulated(
            classes
                .into_iter()
                .enumerate()
                .map(|(i, c)| (c, (m - 1 - i) as f64))
                .collect(),
        )
    }

    /// Random injective table over the union of all colours.
    pub fn injective_random(colorings: &[&ColorAssignment], stream: &mut Stream) -> Self {
        let classes = distinct_colors(colorings);
        let mut values: Vec<f64> = Vec::with_capacity(classes.len());
        while values.len() < classes.len() {
            let x = stream.unit();
            if !values.contains(&x) {
                values.push(x);
            }
        }
        Self::Tabulated(classes.into_iter().zip(values).collect())
    }
}

/// Distinct colours across several assignments, merging colours that agree
/// within [`COLOR_TOL`]. The order is lexicographic with entries within
/// [`COLOR_TOL`] treated as equal, so float noise cannot reorder it.
pub fn distinct_colors(colorings: &[&ColorAssignment]) -> Vec<Vec<f64>> {
    let all: Vec<Vec<f64>> = colorings.iter().flat_map(|c| c.rows.iter().cloned()).collect();
    let all = tolerant_sorted(&all, COLOR_TOL);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for c in all {
        if !out.iter().any(|r| colors_close(r, &c)) {
            out.push(c);
        }
    }
    out
}

fn colors_close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= COLOR_TOL)
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn filtration_values(colors: &ColorAssignment, spec: &FiltrationSpec) -> Result<Vec<f64>, PersistError> {
    colors
        .rows
        .iter()
        .map(|c| match spec {
            FiltrationSpec::Identity => match c.as_slice() {
                [x] => Ok(*x),
                _ => Err(PersistError::NotScalar(c.len())),
            },
            FiltrationSpec::Tabulated(table) => table
                .iter()
                .find(|(k, _)| colors_close(k, c))
                .map(|(_, v)| *v)
                .ok_or_else(|| PersistError::MissingColor(c.clone())),
            FiltrationSpec::AffineSigmoid { weights, bias } => {
                if weights.len() != c.len() {
                    return Err(PersistError::WidthMismatch {
                        weights: weights.len(),
                        width: c.len(),
                    });
                }
                let s: f64 = weights.iter().zip(c).map(|(w, x)| w * x).sum::<f64>() + bias;
                Ok(sigmoid(s))
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Death {
    Finite(f64),
    Infinite,
}

impl Death {
    pub fn is_infinite(self) -> bool {
        matches!(self, Death::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Death::Finite(x) => Some(x),
            Death::Infinite => None,
        }
    }
}

impl fmt::Display for Death {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Death::Finite(x) => write!(f, "{x}"),
            Death::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Death {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Death::Finite(x) => s.serialize_f64(*x),
            Death::Infinite => s.serialize_str("inf"),
        }
    }
}

/// What created a tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Vertex(usize),
    Edge(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: Death,
    pub source: Source,
    /// Vertex whose filtration value is the birth.
    pub birth_vertex: usize,
    /// Vertex whose filtration value is the finite death.
    pub death_vertex: Option<usize>,
}

/// Tuples are indexed by their source: `tuples[v]` for vertex `v` in
/// dimension 0, `tuples[i]` for `g.edges()[i]` in dimension 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceDiagram {
    pub dim: u8,
    pub tuples: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn infinite_count(&self) -> usize {
        self.tuples.iter().filter(|t| t.death.is_infinite()).count()
    }

    pub fn births(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.tuples.iter().map(|t| t.birth).collect();
        b.sort_by(f64::total_cmp);
        b
    }

    /// `(birth, death)` pairs sorted with finite tuples first.
    pub fn sorted_pairs(&self) -> Vec<(f64, Death)> {
        let mut v: Vec<(f64, Death)> = self.tuples.iter().map(|t| (t.birth, t.death)).collect();
        v.sort_by(|a, b| pair_cmp(*a, *b));
        v
    }
}

fn pair_cmp(a: (f64, Death), b: (f64, Death)) -> Ordering {
    match (a.1, b.1) {
        (Death::Finite(x), Death::Finite(y)) => a.0.total_cmp(&b.0).then(x.total_cmp(&y)),
        (Death::Finite(_), Death::Infinite) => Ordering::Less,
        (Death::Infinite, Death::Finite(_)) => Ordering::Greater,
        (Death::Infinite, Death::Infinite) => a.0.total_cmp(&b.0),
    }
}

/// Both diagrams of the sublevel filtration in one union-find pass.
///
/// Edges enter at the larger endpoint value. At a merge the component born
/// earlier survives. Values within [`COLOR_TOL`] count as tied; ties between
/// vertices, and between edges, follow a canonical labelling of `g` coloured
/// by value cluster, so the pairing does not depend on vertex names.
pub fn diagrams(g: &Graph, values: &[f64]) -> Result<(PersistenceDiagram, PersistenceDiagram), PersistError> {
    diagrams_with_ties(g, values, None)
}

/// [`diagrams`] with tie-break labels from [`tie_labels`]; `None` derives
/// them from the value clusters alone.
pub fn diagrams_with_ties(
    g: &Graph,
    values: &[f64],
    labels: Option<&[usize]>,
) -> Result<(PersistenceDiagram, PersistenceDiagram), PersistError> {
    let n = g.n();
    if values.len() != n {
        return Err(PersistError::ValueCount {
            expected: n,
            got: values.len(),
        });
    }
    let later = |u: usize, v: usize| {
        if (values[u], u).partial_cmp(&(values[v], v)) == Some(Ordering::Greater) {
            u
        } else {
            v
        }
    };
    if let Some(l) = labels {
        if l.len() != n {
            return Err(PersistError::ValueCount {
                expected: n,
                got: l.len(),
            });
        }
    }
    let key = tie_keys(g, values, labels);
    let edges = g.edges();
    let edge_value = |i: usize| values[edges[i].0].max(values[edges[i].1]);
    let edge_key = |i: usize| {
        let (u, v) = edges[i];
        let (a, b) = (key[u].min(key[v]), key[u].max(key[v]));
        (b.0, a.0, b.1, a.1, edges[i])
    };
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by_key(|&i| edge_key(i));

    let mut ds = DisjointSet::new(n);
    // Oldest vertex of the component rooted at each index.
    let mut creator: Vec<usize> = (0..n).collect();
    let mut dim0: Vec<PersistencePair> = (0..n)
        .map(|v| PersistencePair {
            birth: values[v],
            death: Death::Infinite,
            source: Source::Vertex(v),
            birth_vertex: v,
            death_vertex: None,
        })
        .collect();
    let mut dim1: Vec<Option<PersistencePair>> = vec![None; edges.len()];
    for i in order {
        let (u, v) = edges[i];
        let t = edge_value(i);
        let top = later(u, v);
        let (ru, rv) = (ds.find(u), ds.find(v));
        if ru == rv {
            dim1[i] = Some(PersistencePair {
                birth: t,
                death: Death::Infinite,
                source: Source::Edge(u, v),
                birth_vertex: top,
                death_vertex: None,
            });
            continue;
        }
        let (cu, cv) = (creator[ru], creator[rv]);
        let (elder, younger) = if key[cu] > key[cv] {
            (cv, cu)
        } else {
            (cu, cv)
        };
        dim0[younger].death = Death::Finite(t);
        dim0[younger].death_vertex = Some(top);
        let root = ds.union(ru, rv).expect("distinct roots");
        creator[root] = elder;
        dim1[i] = Some(PersistencePair {
            birth: t,
            death: Death::Finite(t),
            source: Source::Edge(u, v),
            birth_vertex: top,
            death_vertex: Some(top),
        });
    }
    Ok((
        PersistenceDiagram { dim: 0, tuples: dim0 },
        PersistenceDiagram {
            dim: 1,
            tuples: dim1.into_iter().map(|t| t.expect("every edge processed")).collect(),
        },
    ))
}

/// Order key per vertex: (value cluster, canonical position, index).
///
/// Values within `COLOR_TOL` share a cluster. Inside a cluster vertices are
/// ordered by a canonical labelling of the graph coloured by cluster, so a
/// relabelled graph resolves every tie through an automorphism and the
/// resulting per-vertex tuples are the relabelled ones. Past the canonical
/// search budget the 1-WL colour of the clusters stands in, with vertex index
/// as the last resort.
fn value_ranks(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut rank = vec![0; values.len()];
    for w in 1..idx.len() {
        let (prev, cur) = (idx[w - 1], idx[w]);
        rank[cur] = rank[prev] + usize::from(values[cur] - values[prev] > COLOR_TOL);
    }
    rank
}

/// Vertex labels used to order vertices and edges whose filtration values
/// agree within [`COLOR_TOL`]: a canonical labelling of `g` under `colors`,
/// falling back to 1-WL colours when the search budget runs out.
///
/// Passing the same labels to every filtration of one graph keeps all tie
/// breaks consistent with a single colour-preserving isomorphism.
pub fn tie_labels(g: &Graph, colors: &ColorAssignment) -> Vec<usize> {
    let palette = distinct_colors(&[colors]);
    let ids: Vec<usize> = colors
        .rows
        .iter()
        .map(|r| palette.iter().position(|p| colors_close(p, r)).expect("colour in palette"))
        .collect();
    canonical_labeling(g, &ids).unwrap_or_else(|| {
        wl::wl1_joint(&[g], &[&ColorAssignment::ids(&ids)]).expect("one init per graph").remove(0)
    })
}

fn tie_keys(g: &Graph, values: &[f64], labels: Option<&[usize]>) -> Vec<((usize, usize), usize)> {
    let rank = value_ranks(values);
    let own;
    let labels = match labels {
        Some(l) => l,
        None => {
            own = tie_labels(g, &ColorAssignment::ids(&rank));
            &own
        }
    };
    (0..values.len()).map(|v| ((rank[v], labels[v]), v)).collect()
}

pub fn diagram0(g: &Graph, values: &[f64]) -> Result<PersistenceDiagram, PersistError> {
    Ok(diagrams(g, values)?.0)
}

pub fn diagram1(g: &Graph, values: &[f64]) -> Result<PersistenceDiagram, PersistError> {
    Ok(diagrams(g, values)?.1)
}

/// Multiset equality of `(birth, death)` pairs within `tol`; infinite deaths
/// only match infinite deaths. Provenance is ignored.
pub fn diagrams_equal(d1: &PersistenceDiagram, d2: &PersistenceDiagram, tol: f64) -> Result<bool, PersistError> {
    if d1.dim != d2.dim {
        return Err(PersistError::DimMismatch(d1.dim, d2.dim));
    }
    if d1.tuples.len() != d2.tuples.len() || d1.infinite_count() != d2.infinite_count() {
        return Ok(false);
    }
    Ok(d1
        .sorted_pairs()
        .iter()
        .zip(d2.sorted_pairs())
        .all(|(a, b)| {
            (a.0 - b.0).abs() <= tol
                && match (a.1, b.1) {
                    (Death::Finite(x), Death::Finite(y)) => (x - y).abs() <= tol,
                    (Death::Infinite, Death::Infinite) => true,
                    _ => false,
                }
        }))
}

/// Per component, the sorted set of distinct colours; collected as a sorted
/// multiset.
pub fn component_wise_colors(g: &Graph, colors: &ColorAssignment) -> Vec<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<Vec<f64>>> = g
        .components()
        .iter()
        .map(|comp| {
            let mut set: Vec<Vec<f64>> = comp.iter().map(|&v| colors.rows[v].clone()).collect();
            set.sort_by(|a, b| lex_cmp(a, b));
            set.dedup();
            set
        })
        .collect();
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| lex_cmp(x, y))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| a.len().cmp(&b.len()))
    });
    out
}

/// Deletes vertices coloured from `q` in both graphs and reports whether the
/// remaining component-wise colours differ.
pub fn is_color_separating(
    g1: &Graph,
    c1: &ColorAssignment,
    g2: &Graph,
    c2: &ColorAssignment,
    q: &[Vec<f64>],
) -> bool {
    let strip = |g: &Graph, c: &ColorAssignment| {
        let keep: Vec<bool> = c.rows.iter().map(|r| !q.contains(r)).collect();
        let (h, map) = g.induced_subgraph(&keep);
        let hc = ColorAssignment::new(map.iter().map(|&v| c.rows[v].clone()).collect());
        component_wise_colors(&h, &hc)
    };
    strip(g1, c1) != strip(g2, c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::{complete, cycle, disjoint_union, path, Graph};

    fn pairs(d: &PersistenceDiagram) -> Vec<(f64, Death)> {
        d.sorted_pairs()
    }

    #[test]
    fn path_elder_rule() {
        let d = diagram0(&path(3), &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(
            pairs(&d),
            vec![(1.0, Death::Finite(1.0)), (2.0, Death::Finite(2.0)), (0.0, Death::Infinite)]
        );
        assert_eq!(d.tuples[0].death, Death::Infinite);
    }

    #[test]
    fn constant_connected() {
        let d = diagram0(&cycle(5), &[0.3; 5]).unwrap();
        assert_eq!(d.infinite_count(), 1);
        assert!(d.tuples.iter().all(|t| t.birth == 0.3));
        // Equal births: the lowest creating vertex survives.
        assert_eq!(d.tuples[0].death, Death::Infinite);
    }

    #[test]
    fn triangle_cycle_tuple() {
        let d = diagram1(&cycle(3), &[0.0; 3]).unwrap();
        assert_eq!(pairs(&d), vec![(0.0, Death::Finite(0.0)), (0.0, Death::Finite(0.0)), (0.0, Death::Infinite)]);
        let t = diagram1(&path(5), &[4.0, 1.0, 3.0, 0.0, 2.0]).unwrap();
        assert_eq!(t.infinite_count(), 0);
        assert!(t.tuples.iter().all(|p| p.death == Death::Finite(p.birth)));
    }

    #[test]
    fn merge_death_vertex_is_later_endpoint() {
        let d = diagram0(&path(2), &[0.0, 1.0]).unwrap();
        assert_eq!(d.tuples[1].death, Death::Finite(1.0));
        assert_eq!(d.tuples[1].death_vertex, Some(1));
        assert_eq!(d.tuples[1].birth_vertex, 1);
    }

    #[test]
    fn equality_and_dim_check() {
        let a = diagram0(&cycle(10), &[0.0; 10]).unwrap();
        let b = diagram0(&disjoint_union(&[cycle(5), cycle(5)]).unwrap(), &[0.0; 10]).unwrap();
        assert!(diagrams_equal(&a, &a, 0.0).unwrap());
        assert!(!diagrams_equal(&a, &b, 0.0).unwrap());
        let c = diagram1(&cycle(10), &[0.0; 10]).unwrap();
        assert_eq!(diagrams_equal(&a, &c, 0.0), Err(PersistError::DimMismatch(0, 1)));
    }

    #[test]
    fn filtration_kinds() {
        let c = ColorAssignment::scalars(&[0.0, 1.0, 2.0]);
        assert_eq!(filtration_values(&c, &FiltrationSpec::Identity).unwrap(), vec![0.0, 1.0, 2.0]);
        let s = FiltrationSpec::AffineSigmoid { weights: vec![0.0], bias: 0.0 };
        assert_eq!(filtration_values(&c, &s).unwrap(), vec![0.5; 3]);
        let t = FiltrationSpec::tabulated(vec![(vec![2.0], 0.7), (vec![3.0], 0.2)]).unwrap();
        let deg = ColorAssignment::degrees(&cycle(4));
        assert_eq!(filtration_values(&deg, &t).unwrap(), vec![0.7; 4]);
        assert!(matches!(
            filtration_values(&ColorAssignment::degrees(&path(2)), &t),
            Err(PersistError::MissingColor(_))
        ));
        assert!(FiltrationSpec::tabulated(vec![(vec![2.0], 0.7), (vec![3.0], 0.7)]).is_err());
    }

    #[test]
    fn rank_tables_merge_near_equal_colours() {
        let a = ColorAssignment::scalars(&[0.1, 0.2]);
        let b = ColorAssignment::scalars(&[0.2 + 1e-15, 0.3]);
        let FiltrationSpec::Tabulated(t) = FiltrationSpec::injective_rank(&[&a, &b]) else {
            unreachable!()
        };
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn component_colours() {
        let g = disjoint_union(&[Graph::empty(1), complete(3)]).unwrap();
        let cw = component_wise_colors(&g, &ColorAssignment::degrees(&g));
        assert_eq!(cw, vec![vec![vec![0.0]], vec![vec![2.0]]]);
        let c33 = disjoint_union(&[cycle(3), cycle(3)]).unwrap();
        assert_eq!(component_wise_colors(&c33, &ColorAssignment::constant(6)).len(), 2);
        assert_eq!(component_wise_colors(&cycle(6), &ColorAssignment::constant(6)).len(), 1);
    }

    #[test]
    fn separating_sets() {
        let c33 = disjoint_union(&[cycle(3), cycle(3)]).unwrap();
        let c6 = cycle(6);
        let k = ColorAssignment::constant(6);
        assert!(is_color_separating(&c33, &k, &c6, &k, &[]));
        assert!(!is_color_separating(&c6, &k, &c6, &k, &[]));
        // Removing every vertex leaves two empty graphs.
        assert!(!is_color_separating(&c33, &k, &c6, &k, &[vec![0.0]]));
    }
}
