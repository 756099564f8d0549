//! Simple undirected graphs, standard families, Betti numbers, small-graph
//! isomorphism and the graph6 text format.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::spectral;

/// Default vertex limit for [`are_isomorphic`].
pub const ISO_N_MAX: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    OutOfRange { u: usize, v: usize, n: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("{family} requires parameter >= {min}, got {got}")]
    FamilyParam {
        family: &'static str,
        min: usize,
        got: usize,
    },
    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),
    #[error("disjoint union of an empty list")]
    EmptyUnion,
    #[error("graph with {n} vertices exceeds the isomorphism limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("permutation is not a bijection on 0..{0}")]
    NotBijection(usize),
    #[error("graph6: {0}")]
    Graph6(String),
}

/// Immutable simple undirected graph on vertices `0..n`.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted lexicographically.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adj: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

/// Number of connected components and independent cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BettiPair {
    pub beta0: usize,
    pub beta1: usize,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, out-of-range endpoints and
    /// duplicate edges (in either orientation).
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_edges(n, edges))
    }

    fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Self { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_edges(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut ds = DisjointSet::new(self.n);
        for &(u, v) in &self.edges {
            ds.union(u, v);
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.n {
            by_root.entry(ds.find(v)).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// Subgraph induced by the vertices with `keep[v]`, relabelled in
    /// increasing order. Also returns the new-to-old vertex map.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (Graph, Vec<usize>) {
        let old: Vec<usize> = (0..self.n).filter(|&v| keep[v]).collect();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &v) in old.iter().enumerate() {
            new_of[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| keep[u] && keep[v])
            .map(|&(u, v)| (new_of[u], new_of[v]))
            .collect();
        (Self::from_sorted_edges(old.len(), edges), old)
    }
}

/// Builds a graph from an edge list; see [`Graph::new`].
pub fn build_graph(n: usize, edge_list: &[(usize, usize)]) -> Result<Graph, GraphError> {
    Graph::new(n, edge_list)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cycle,
    Path,
    Complete,
    Hypercube,
}

impl std::str::FromStr for Family {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cycle" => Ok(Self::Cycle),
            "path" => Ok(Self::Path),
            "complete" => Ok(Self::Complete),
            "hypercube" => Ok(Self::Hypercube),
            other => Err(GraphError::UnknownFamily(other.to_string())),
        }
    }
}

/// Standard family member. Cycle `i -- i+1 mod n`, path `i -- i+1`, hypercube
/// on `d`-bit labels adjacent at Hamming distance one.
pub fn family(name: Family, param: usize) -> Result<Graph, GraphError> {
    let check = |family, min| {
        if param < min {
            Err(GraphError::FamilyParam {
                family,
                min,
                got: param,
            })
        } else {
            Ok(())
        }
    };
    let edges: Vec<(usize, usize)> = match name {
        Family::Cycle => {
            check("cycle", 3)?;
            (0..param).map(|i| (i, (i + 1) % param)).collect()
        }
        Family::Path => {
            check("path", 1)?;
            (1..param).map(|i| (i - 1, i)).collect()
        }
        Family::Complete => {
            check("complete", 1)?;
            (0..param)
                .flat_map(|u| (u + 1..param).map(move |v| (u, v)))
                .collect()
        }
        Family::Hypercube => {
            check("hypercube", 1)?;
            if param > 20 {
                return Err(GraphError::TooLarge {
                    n: 1 << param.min(63),
                    limit: 1 << 20,
                });
            }
            let n = 1usize << param;
            (0..n)
                .flat_map(|u| {
                    (0..param)
                        .map(move |b| (u, u ^ (1 << b)))
                        .filter(|&(u, v)| u < v)
                })
                .collect()
        }
    };
    let n = match name {
        Family::Hypercube => 1 << param,
        _ => param,
    };
    Graph::new(n, &edges)
}

pub fn cycle(n: usize) -> Graph {
    family(Family::Cycle, n).expect("cycle length >= 3")
}

pub fn path(n: usize) -> Graph {
    family(Family::Path, n).expect("path length >= 1")
}

pub fn complete(n: usize) -> Graph {
    family(Family::Complete, n).expect("complete size >= 1")
}

pub fn hypercube(d: usize) -> Graph {
    family(Family::Hypercube, d).expect("hypercube dimension >= 1")
}

/// Disjoint union with vertex offsets assigned in list order.
pub fn disjoint_union(gs: &[Graph]) -> Result<Graph, GraphError> {
    if gs.is_empty() {
        return Err(GraphError::EmptyUnion);
    }
    let mut offset = 0;
    let mut edges = Vec::with_capacity(gs.iter().map(Graph::edge_count).sum());
    for g in gs {
        edges.extend(g.edges.iter().map(|&(u, v)| (u + offset, v + offset)));
        offset += g.n;
    }
    // Offsets are increasing, so concatenated sorted lists stay sorted.
    Ok(Graph::from_sorted_edges(offset, edges))
}

/// `count` disjoint copies of `g`.
pub fn repeat(g: &Graph, count: usize) -> Result<Graph, GraphError> {
    disjoint_union(&vec![g.clone(); count])
}

pub fn betti(g: &Graph) -> BettiPair {
    let mut ds = DisjointSet::new(g.n);
    for &(u, v) in &g.edges {
        ds.union(u, v);
    }
    let beta0 = ds.set_count();
    BettiPair {
        beta0,
        beta1: g.edges.len() + beta0 - g.n,
    }
}

/// Relabels `g` so vertex `v` becomes `perm[v]`.
pub fn permute(g: &Graph, perm: &[usize]) -> Result<Graph, GraphError> {
    if perm.len() != g.n {
        return Err(GraphError::NotBijection(g.n));
    }
    let mut seen = vec![false; g.n];
    for &p in perm {
        if p >= g.n || std::mem::replace(&mut seen[p], true) {
            return Err(GraphError::NotBijection(g.n));
        }
    }
    let edges: Vec<_> = g.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    Graph::new(g.n, &edges)
}

/// Exact isomorphism test for graphs up to [`ISO_N_MAX`] vertices.
pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> Result<bool, GraphError> {
    are_isomorphic_with_limit(g1, g2, ISO_N_MAX)
}

/// Isomorphism by backtracking over colour-refined candidate maps, after
/// pruning on edge count, degree sequence and normalized-Laplacian spectrum.
pub fn are_isomorphic_with_limit(g1: &Graph, g2: &Graph, limit: usize) -> Result<bool, GraphError> {
    let n = g1.n.max(g2.n);
    if n > limit {
        return Err(GraphError::TooLarge { n, limit });
    }
    if g1.n != g2.n || g1.edges.len() != g2.edges.len() {
        return Ok(false);
    }
    let mut d1 = g1.degrees();
    let mut d2 = g2.degrees();
    d1.sort_unstable();
    d2.sort_unstable();
    if d1 != d2 {
        return Ok(false);
    }
    if !spectral::spectra_equal(g1, g2, 1e-8) {
        return Ok(false);
    }
    let (c1, c2) = joint_refinement(g1, g2);
    let mut h1 = c1.clone();
    let mut h2 = c2.clone();
    h1.sort_unstable();
    h2.sort_unstable();
    if h1 != h2 {
        return Ok(false);
    }
    Ok(Matcher::new(g1, g2, &c1, &c2).run())
}

/// Colour refinement run on both graphs with a shared colour dictionary.
fn joint_refinement(g1: &Graph, g2: &Graph) -> (Vec<usize>, Vec<usize>) {
    let mut c1 = g1.degrees();
    let mut c2 = g2.degrees();
    loop {
        let mut dict: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let sig = |g: &Graph, c: &[usize]| -> Vec<(usize, Vec<usize>)> {
            (0..g.n)
                .map(|v| {
                    let mut nb: Vec<usize> = g.adj[v].iter().map(|&u| c[u]).collect();
                    nb.sort_unstable();
                    (c[v], nb)
                })
                .collect()
        };
        let s1 = sig(g1, &c1);
        let s2 = sig(g2, &c2);
        for s in s1.iter().chain(&s2) {
            let next = dict.len();
            dict.entry(s.clone()).or_insert(next);
        }
        // Ids in sorted-signature order keep the relabelling canonical.
        for (i, id) in dict.values_mut().enumerate() {
            *id = i;
        }
        let n1: Vec<usize> = s1.iter().map(|s| dict[s]).collect();
        let n2: Vec<usize> = s2.iter().map(|s| dict[s]).collect();
        let classes = |c: &[usize]| {
            let mut v = c.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len()
        };
        let stable = classes(&n1) == classes(&c1) && classes(&n2) == classes(&c2);
        c1 = n1;
        c2 = n2;
        if stable {
            return (c1, c2);
        }
    }
}

struct Matcher<'a> {
    g1: &'a Graph,
    g2: &'a Graph,
    c1: &'a [usize],
    c2: &'a [usize],
    order: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(g1: &'a Graph, g2: &'a Graph, c1: &'a [usize], c2: &'a [usize]) -> Self {
        // Visit vertices in BFS order from the rarest colour class so each
        // new vertex is adjacent to already-mapped ones where possible.
        let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
        for &c in c1 {
            *freq.entry(c).or_default() += 1;
        }
        let mut order = Vec::with_capacity(g1.n);
        let mut placed = vec![false; g1.n];
        while order.len() < g1.n {
            let start = (0..g1.n)
                .filter(|&v| !placed[v])
                .min_by_key(|&v| (freq[&c1[v]], v))
                .expect("unplaced vertex");
            placed[start] = true;
            let mut head = order.len();
            order.push(start);
            while head < order.len() {
                let v = order[head];
                head += 1;
                for &u in &g1.adj[v] {
                    if !placed[u] {
                        placed[u] = true;
                        order.push(u);
                    }
                }
            }
        }
        Self {
            g1,
            g2,
            c1,
            c2,
            order,
            map: vec![usize::MAX; g1.n],
            used: vec![false; g1.n],
        }
    }

    fn run(&mut self) -> bool {
        self.extend(0)
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let v = self.order[depth];
        for w in 0..self.g2.n {
            if self.used[w] || self.c2[w] != self.c1[v] || !self.consistent(depth, v, w) {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.used[w] = false;
            self.map[v] = usize::MAX;
        }
        false
    }

    fn consistent(&self, depth: usize, v: usize, w: usize) -> bool {
        self.order[..depth]
            .iter()
            .all(|&x| self.g1.has_edge(v, x) == self.g2.has_edge(w, self.map[x]))
    }
}

/// Union-find with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
    sets: usize,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
            sets: n,
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; returns the new root, or `None` if
    /// they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        self.sets -= 1;
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        Some(hi)
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}

/// Search-node limit for [`canonical_labeling`].
pub const CANON_NODE_BUDGET: usize = 20_000;

/// Canonical vertex order of `g` under initial vertex colours `colors`.
///
/// Individualization-refinement: every leaf of the search tree is a discrete
/// refined colouring, and the leaf whose relabelled edge list is
/// lexicographically smallest wins. `label[v]` is the position of `v`; two
/// labellings returned for isomorphic coloured graphs differ by an
/// isomorphism. Returns `None` when the search visits more than
/// [`CANON_NODE_BUDGET`] nodes.
pub fn canonical_labeling(g: &Graph, colors: &[usize]) -> Option<Vec<usize>> {
    assert_eq!(colors.len(), g.n(), "one colour per vertex");
    let comps = g.components();
    if comps.len() <= 1 {
        return connected_labeling(g, colors);
    }
    // Components are labelled separately and placed in certificate order.
    let mut parts = Vec::with_capacity(comps.len());
    for comp in &comps {
        let mut keep = vec![false; g.n()];
        for &v in comp {
            keep[v] = true;
        }
        let (h, map) = g.induced_subgraph(&keep);
        let sub: Vec<usize> = map.iter().map(|&v| colors[v]).collect();
        let label = connected_labeling(&h, &sub)?;
        let mut by_pos = vec![0; h.n()];
        for (i, &pos) in label.iter().enumerate() {
            by_pos[pos] = sub[i];
        }
        let mut edges: Vec<(usize, usize)> = h
            .edges()
            .iter()
            .map(|&(u, v)| (label[u].min(label[v]), label[u].max(label[v])))
            .collect();
        edges.sort_unstable();
        parts.push(((by_pos, edges), map, label));
    }
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = vec![0; g.n()];
    let mut offset = 0;
    for (_, map, label) in parts {
        for (i, &v) in map.iter().enumerate() {
            out[v] = offset + label[i];
        }
        offset += map.len();
    }
    Some(out)
}

fn connected_labeling(g: &Graph, colors: &[usize]) -> Option<Vec<usize>> {
    let start = refine_colors(g, colors.to_vec());
    let mut best = None;
    let mut nodes = 0;
    canon_search(g, start, &mut best, &mut nodes).then(|| best.map(|(_, label)| label).unwrap_or_default())
}

/// Equitable refinement with ids ordered by sorted signature, so the order of
/// the input classes is kept and ids do not depend on vertex names.
fn refine_colors(g: &Graph, mut c: Vec<usize>) -> Vec<usize> {
    let dense = |sigs: &[(usize, Vec<usize>)]| -> Vec<usize> {
        let mut uniq: Vec<&(usize, Vec<usize>)> = sigs.iter().collect();
        uniq.sort();
        uniq.dedup();
        sigs.iter().map(|s| uniq.binary_search(&s).expect("present")).collect()
    };
    let count = |c: &[usize]| c.iter().max().map_or(0, |m| m + 1);
    c = dense(&c.iter().map(|&x| (x, Vec::new())).collect::<Vec<_>>());
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..g.n())
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&u| c[u]).collect();
                nb.sort_unstable();
                (c[v], nb)
            })
            .collect();
        let next = dense(&sigs);
        if count(&next) == count(&c) {
            return next;
        }
        c = next;
    }
}

type Leaf = (Vec<(usize, usize)>, Vec<usize>);

fn canon_search(g: &Graph, c: Vec<usize>, best: &mut Option<Leaf>, nodes: &mut usize) -> bool {
    *nodes += 1;
    if *nodes > CANON_NODE_BUDGET {
        return false;
    }
    let mut sizes = vec![0usize; g.n()];
    for &x in &c {
        sizes[x] += 1;
    }
    let Some(target) = sizes.iter().position(|&k| k > 1) else {
        let mut cert: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|&(u, v)| (c[u].min(c[v]), c[u].max(c[v])))
            .collect();
        cert.sort_unstable();
        if best.as_ref().is_none_or(|(b, _)| cert < *b) {
            *best = Some((cert, c));
        }
        return true;
    };
    for v in (0..g.n()).filter(|&v| c[v] == target) {
        let mut split: Vec<usize> = c.iter().map(|&x| 2 * x + 1).collect();
        split[v] -= 1;
        if !canon_search(g, refine_colors(g, split), best, nodes) {
            return false;
        }
    }
    true
}

const GRAPH6_HEADER: &str = ">>graph6<<";

/// Parses one graph6 line (short or long size form, optional header).
pub fn parse_graph6(text: &str) -> Result<Graph, GraphError> {
    let line = text.trim_end_matches(['\n', '\r']);
    let line = line.strip_prefix(GRAPH6_HEADER).unwrap_or(line);
    let bytes = line.as_bytes();
    if bytes.is_empty() {
        return Err(GraphError::Graph6("empty line".into()));
    }
    if let Some((i, &b)) = bytes.iter().enumerate().find(|(_, &b)| !(63..=126).contains(&b)) {
        return Err(GraphError::Graph6(format!(
            "byte {b:#04x} at offset {i} outside 63..=126"
        )));
    }
    let (n, body) = if bytes[0] != 126 {
        (usize::from(bytes[0] - 63), &bytes[1..])
    } else if bytes.len() >= 4 && bytes[1] != 126 {
        let n = bytes[1..4]
            .iter()
            .fold(0usize, |acc, &b| (acc << 6) | usize::from(b - 63));
        (n, &bytes[4..])
    } else {
        return Err(GraphError::Graph6("unsupported or truncated size field".into()));
    };
    let bits = n * n.saturating_sub(1) / 2;
    let need = bits.div_ceil(6);
    if body.len() < need {
        return Err(GraphError::Graph6(format!(
            "truncated: {n} vertices need {need} data bytes, found {}",
            body.len()
        )));
    }
    if body.len() > need {
        return Err(GraphError::Graph6(format!(
            "trailing garbage: {} extra bytes",
            body.len() - need
        )));
    }
    let bit = |k: usize| (body[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    if (bits..need * 6).any(bit) {
        return Err(GraphError::Graph6("nonzero padding bits".into()));
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for v in 1..n {
        for u in 0..v {
            if bit(k) {
                edges.push((u, v));
            }
            k += 1;
        }
    }
    Graph::new(n, &edges)
}

/// Writes `g` in graph6 without header or newline.
pub fn write_graph6(g: &Graph) -> String {
    let n = g.n;
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else {
        assert!(n < 1 << 18, "graph6 writer supports n < 262144");
        out.push(126);
        out.extend((0..3).rev().map(|i| ((n >> (6 * i)) & 63) as u8 + 63));
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for v in 1..n {
        for u in 0..v {
            acc = (acc << 1) | u8::from(g.has_edge(u, v));
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

/// Parses every non-empty line of a graph6 file, skipping a header line.
pub fn parse_graph6_file(text: &str) -> Result<Vec<Graph>, GraphError> {
    text.lines()
        .map(|l| l.strip_prefix(GRAPH6_HEADER).unwrap_or(l))
        .filter(|l| !l.trim().is_empty())
        .map(parse_graph6)
        .collect()
}
