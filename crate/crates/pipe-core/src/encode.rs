//! Laplacian, random-walk and distance positional encodings, and multiset
//! comparison of encoding matrices.

use std::cmp::Ordering;
use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphcore::Graph;
use crate::spectral::{self, SpectralError};

/// Default tolerance for comparing computed encodings.
pub const COMPUTED_TOL: f64 = 1e-8;
/// Tolerance for comparing against two-decimal published tables.
pub const ROUNDED_TOL: f64 = 0.02;

const SIGN_TIE_TOL: f64 = 1e-9;
const MAX_SYMMETRIES: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EncodeError {
    #[error("k = {k} outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("empty anchor set")]
    EmptyAnchors,
    #[error("anchor {0} is not a vertex")]
    AnchorOutOfRange(usize),
    #[error("pagerank mode needs {k} coefficients, got {got}")]
    PageRankCoefficients { k: usize, got: usize },
    #[error("cannot compare encodings: {0}")]
    Mismatch(String),
    #[error("raw LapPE comparison would enumerate {0} sign/permutation choices")]
    TooManySymmetries(u128),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeMethod {
    Lap,
    Rw,
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Raw,
    EigenspaceProjection,
}

/// Per-node encoding rows plus what is needed to compare them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PEMatrix {
    pub method: PeMethod,
    pub k: usize,
    pub policy: Policy,
    pub rows: Vec<Vec<f64>>,
    /// Raw LapPE only: eigenvalue-group id of every column. Columns sharing an
    /// id span part of one eigenspace and may be permuted in comparisons.
    pub column_groups: Option<Vec<usize>>,
}

impl PEMatrix {
    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LapOptions {
    pub k: usize,
    pub policy: Policy,
    /// Drop the trivial null-space vector before taking `k` columns.
    pub skip_trivial: bool,
}

impl LapOptions {
    pub fn new(k: usize, policy: Policy) -> Self {
        Self {
            k,
            policy,
            skip_trivial: false,
        }
    }

    pub fn skip_trivial(mut self) -> Self {
        self.skip_trivial = true;
        self
    }
}

/// LapPE including the trivial eigenvector.
pub fn lap_pe(g: &Graph, k: usize, policy: Policy) -> Result<PEMatrix, EncodeError> {
    lap_pe_with(g, LapOptions::new(k, policy))
}

/// Canonical normalized-Laplacian eigenbasis.
///
/// The null space is re-expressed so that its first column is the normalized
/// projection of the all-ones vector onto it (the trivial eigenvector); the
/// remaining null columns are Gram-Schmidt completions. Every column is
/// sign-fixed so its largest-magnitude entry is positive, ties to the lowest
/// index.
#[derive(Debug, Clone)]
pub struct LapBasis {
    pub values: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
    pub groups: Vec<usize>,
}

pub fn lap_basis(g: &Graph) -> Result<LapBasis, EncodeError> {
    let n = g.n();
    let eig = spectral::eigh(&spectral::normalized_laplacian(g))?;
    let mut columns = eig.vectors.clone();
    let zero = &eig.groups[0];
    debug_assert!(eig.values[zero[0]].abs() <= spectral::TAU_EIG);
    let null: Vec<&Vec<f64>> = zero.iter().map(|&j| &eig.vectors[j]).collect();
    let mut trivial = vec![0.0; n];
    for u in &null {
        let c: f64 = u.iter().sum();
        axpy(&mut trivial, c, u);
    }
    normalize(&mut trivial);
    let mut basis = vec![trivial];
    let mut pool: Vec<Vec<f64>> = null.iter().map(|u| (*u).clone()).collect();
    while basis.len() < zero.len() {
        // Largest residual first keeps the completion well conditioned.
        let residuals: Vec<Vec<f64>> = pool
            .iter()
            .map(|u| {
                let mut r = u.clone();
                for b in &basis {
                    let d = dot(&r, b);
                    axpy(&mut r, -d, b);
                }
                r
            })
            .collect();
        let best = (0..residuals.len())
            .max_by(|&a, &b| {
                norm(&residuals[a])
                    .total_cmp(&norm(&residuals[b]))
                    .then(b.cmp(&a))
            })
            .expect("pool larger than remaining dimension");
        let mut r = residuals[best].clone();
        normalize(&mut r);
        basis.push(r);
        pool.remove(best);
    }
    for (slot, b) in zero.iter().zip(basis) {
        columns[*slot] = b;
    }
    for c in &mut columns {
        fix_sign(c);
    }
    let mut groups = vec![0; n];
    for (gid, members) in eig.groups.iter().enumerate() {
        for &j in members {
            groups[j] = gid;
        }
    }
    Ok(LapBasis {
        values: eig.values,
        columns,
        groups,
    })
}

pub fn lap_pe_with(g: &Graph, opts: LapOptions) -> Result<PEMatrix, EncodeError> {
    let n = g.n();
    let offset = usize::from(opts.skip_trivial);
    let max = n - offset.min(n);
    if opts.k == 0 || opts.k > max {
        return Err(EncodeError::KOutOfRange { k: opts.k, max });
    }
    let basis = lap_basis(g)?;
    let cols = &basis.columns[offset..];
    let groups = &basis.groups[offset..];
    let (rows, column_groups) = match opts.policy {
        Policy::Raw => {
            let rows = (0..n)
                .map(|v| cols[..opts.k].iter().map(|c| c[v]).collect())
                .collect();
            (rows, Some(groups[..opts.k].to_vec()))
        }
        Policy::EigenspaceProjection => {
            let mut touched: Vec<usize> = groups[..opts.k].to_vec();
            touched.dedup();
            let rows = (0..n)
                .map(|v| {
                    touched
                        .iter()
                        .map(|&gid| {
                            cols.iter()
                                .zip(groups)
                                .filter(|(_, &cg)| cg == gid)
                                .map(|(c, _)| c[v] * c[v])
                                .sum()
                        })
                        .collect()
                })
                .collect();
            (rows, None)
        }
    };
    Ok(PEMatrix {
        method: PeMethod::Lap,
        k: opts.k,
        policy: opts.policy,
        rows,
        column_groups,
    })
}

/// Random-walk return probabilities `((D^{-1}A)^i)_{vv}` for `i = 1..=k`.
pub fn rw_pe(g: &Graph, k: usize) -> Result<PEMatrix, EncodeError> {
    if k == 0 {
        return Err(EncodeError::KOutOfRange { k, max: usize::MAX });
    }
    let powers = spectral::rw_powers(g, k)?;
    let rows = (0..g.n())
        .map(|v| powers.iter().map(|m| m.get(v, v)).collect())
        .collect();
    Ok(PEMatrix {
        method: PeMethod::Rw,
        k,
        policy: Policy::Raw,
        rows,
        column_groups: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistanceMode {
    /// k-vector of walk probabilities `(D^{-1}A)^i_{vs}`, `i = 1..=k`.
    RwVector,
    /// Scalar `sum_i gamma_i (D^{-1}A)^i_{vs}` with `k` coefficients.
    PageRank(Vec<f64>),
    /// Hop distance; unreachable anchors count as `n`.
    ShortestPath,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Anchors {
    /// The same anchor set for every row.
    Fixed(Vec<usize>),
    /// Row `v` uses the anchor set `{v}`.
    SelfAnchored,
}

/// Sum over anchors of a per-mode distance encoding.
pub fn distance_pe(
    g: &Graph,
    anchors: &Anchors,
    k: usize,
    mode: &DistanceMode,
) -> Result<PEMatrix, EncodeError> {
    let n = g.n();
    if let Anchors::Fixed(set) = anchors {
        if set.is_empty() {
            return Err(EncodeError::EmptyAnchors);
        }
        if let Some(&bad) = set.iter().find(|&&s| s >= n) {
            return Err(EncodeError::AnchorOutOfRange(bad));
        }
    }
    if k == 0 {
        return Err(EncodeError::KOutOfRange { k, max: usize::MAX });
    }
    if let DistanceMode::PageRank(gamma) = mode {
        if gamma.len() != k {
            return Err(EncodeError::PageRankCoefficients { k, got: gamma.len() });
        }
    }
    let anchor_set = |v: usize| -> Vec<usize> {
        match anchors {
            Anchors::Fixed(set) => set.clone(),
            Anchors::SelfAnchored => vec![v],
        }
    };
    let rows: Vec<Vec<f64>> = match mode {
        DistanceMode::RwVector | DistanceMode::PageRank(_) => {
            let powers = spectral::rw_powers(g, k)?;
            (0..n)
                .map(|v| {
                    let mut walk = vec![0.0; k];
                    for s in anchor_set(v) {
                        for (i, m) in powers.iter().enumerate() {
                            walk[i] += m.get(v, s);
                        }
                    }
                    match mode {
                        DistanceMode::PageRank(gamma) => {
                            vec![gamma.iter().zip(&walk).map(|(a, b)| a * b).sum()]
                        }
                        _ => walk,
                    }
                })
                .collect()
        }
        DistanceMode::ShortestPath => {
            let dist: Vec<Vec<usize>> = (0..n).map(|s| bfs(g, s)).collect();
            (0..n)
                .map(|v| {
                    let total: usize = anchor_set(v)
                        .iter()
                        .map(|&s| dist[s][v].min(n))
                        .sum();
                    vec![total as f64]
                })
                .collect()
        }
    };
    Ok(PEMatrix {
        method: PeMethod::Distance,
        k,
        policy: Policy::Raw,
        rows,
        column_groups: None,
    })
}

/// Hop distances from `s`; unreachable vertices get `usize::MAX`.
pub fn bfs(g: &Graph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Multiset equality of encoding rows under greedy sorted-lexicographic
/// pairing with per-entry tolerance. Raw LapPE additionally ranges over
/// per-column sign flips and column permutations inside eigenvalue groups.
pub fn pe_multiset_equal(p1: &PEMatrix, p2: &PEMatrix, tol: f64) -> Result<bool, EncodeError> {
    if p1.method != p2.method || p1.k != p2.k || p1.policy != p2.policy {
        return Err(EncodeError::Mismatch(format!(
            "({:?}, k={}, {:?}) vs ({:?}, k={}, {:?})",
            p1.method, p1.k, p1.policy, p2.method, p2.k, p2.policy
        )));
    }
    if p1.rows.len() != p2.rows.len() || p1.width() != p2.width() {
        return Ok(false);
    }
    match (&p1.column_groups, &p2.column_groups) {
        (Some(_), Some(g2)) => {
            let a = tolerant_sorted(&p1.rows, tol);
            for variant in column_variants(&p2.rows, g2)? {
                if rows_equal_sorted(&a, &tolerant_sorted(&variant, tol), tol) {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        _ => Ok(rows_multiset_equal(&p1.rows, &p2.rows, tol)),
    }
}

/// Greedy sorted-lexicographic multiset comparison of row lists.
pub fn rows_multiset_equal(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.len() == b.len() && rows_equal_sorted(&tolerant_sorted(a, tol), &tolerant_sorted(b, tol), tol)
}

fn rows_equal_sorted(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| {
        x.len() == y.len() && x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol)
    })
}

/// Plain lexicographic sort with `f64::total_cmp`.
pub fn sorted_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = rows.to_vec();
    out.sort_by(|x, y| lex_cmp(x, y));
    out
}

/// Lexicographic sort that treats entries within `tol` as equal: rows are
/// sorted by one column, split into runs whose consecutive values differ by
/// at most `tol`, and each run is sorted recursively by the next column.
/// Rows equal up to `tol` therefore end up in matching positions even when
/// rounding noise reorders their leading entries.
pub fn tolerant_sorted(rows: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut out = rows.to_vec();
    tolerant_sort_from(&mut out, 0, tol);
    out
}

fn tolerant_sort_from(rows: &mut [Vec<f64>], col: usize, tol: f64) {
    if rows.len() < 2 {
        return;
    }
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    if col >= width {
        return;
    }
    let key = |r: &Vec<f64>| r.get(col).copied().unwrap_or(f64::NEG_INFINITY);
    rows.sort_by(|x, y| key(x).total_cmp(&key(y)));
    let mut start = 0;
    for i in 1..=rows.len() {
        if i == rows.len() || key(&rows[i]) - key(&rows[i - 1]) > tol {
            tolerant_sort_from(&mut rows[start..i], col + 1, tol);
            start = i;
        }
    }
}

pub fn lex_cmp(x: &[f64], y: &[f64]) -> Ordering {
    x.iter()
        .zip(y)
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| x.len().cmp(&y.len()))
}

/// Every sign-flip / within-group-permutation variant of the columns.
fn column_variants(rows: &[Vec<f64>], groups: &[usize]) -> Result<Vec<Vec<Vec<f64>>>, EncodeError> {
    let k = groups.len();
    let mut runs: Vec<Vec<usize>> = Vec::new();
    for (c, &gid) in groups.iter().enumerate() {
        match runs.last_mut() {
            Some(r) if groups[r[0]] == gid => r.push(c),
            _ => runs.push(vec![c]),
        }
    }
    let perms: u128 = runs
        .iter()
        .map(|r| (1..=r.len() as u128).product::<u128>())
        .product();
    let total = perms.saturating_mul(1u128 << k.min(100));
    if total > MAX_SYMMETRIES {
        return Err(EncodeError::TooManySymmetries(total));
    }
    let mut orders: Vec<Vec<usize>> = vec![Vec::new()];
    for run in &runs {
        let mut next = Vec::new();
        for prefix in &orders {
            for p in permutations(run) {
                let mut o = prefix.clone();
                o.extend(p);
                next.push(o);
            }
        }
        orders = next;
    }
    let mut out = Vec::with_capacity(total as usize);
    for order in &orders {
        for mask in 0..1u64 << k {
            out.push(
                rows.iter()
                    .map(|r| {
                        order
                            .iter()
                            .enumerate()
                            .map(|(slot, &c)| if mask >> slot & 1 == 1 { -r[c] } else { r[c] })
                            .collect()
                    })
                    .collect(),
            );
        }
    }
    Ok(out)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Exact multiset matching of rows by maximum bipartite matching (any row of
/// `a` may pair with any row of `b` within `tol` entrywise). Independent of
/// row order heuristics; used to check computed encodings against published
/// tables and as an oracle for the greedy comparison.
pub fn rows_match_assignment(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let ok: Vec<Vec<bool>> = a
        .iter()
        .map(|x| {
            b.iter()
                .map(|y| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol))
                .collect()
        })
        .collect();
    let mut owner = vec![usize::MAX; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, &ok, &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(i: usize, ok: &[Vec<bool>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    for j in 0..owner.len() {
        if ok[i][j] && !seen[j] {
            seen[j] = true;
            if owner[j] == usize::MAX || augment(owner[j], ok, owner, seen) {
                owner[j] = i;
                return true;
            }
        }
    }
    false
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn normalize(a: &mut [f64]) {
    let s = norm(a);
    for x in a {
        *x /= s;
    }
}

fn fix_sign(c: &mut [f64]) {
    let max = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(&lead) = c.iter().find(|x| x.abs() >= max - SIGN_TIE_TOL) {
        if lead < 0.0 {
            for x in c.iter_mut() {
                *x = -*x;
            }
        }
    }
}
