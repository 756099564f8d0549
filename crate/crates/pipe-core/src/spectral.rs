//! Dense symmetric eigendecomposition (cyclic Jacobi) and random-walk powers.

use thiserror::Error;

use crate::graphcore::Graph;

/// Equal-eigenvalue grouping tolerance.
pub const TAU_EIG: f64 = 1e-8;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("Jacobi did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("random-walk power must be >= 1")]
    ZeroPower,
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SpectralError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(SpectralError::Shape {
                    expected: n,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Symmetric matrix; symmetry is checked exactly at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self, SpectralError> {
        for i in 0..m.n {
            for j in i + 1..m.n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(SpectralError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n
    }
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[j]` is the unit eigenvector for `values[j]`.
    pub vectors: Vec<Vec<f64>>,
    /// Consecutive index ranges whose eigenvalues agree within [`TAU_EIG`].
    pub groups: Vec<Vec<usize>>,
}

impl EigenDecomposition {
    /// Index of the group containing eigenpair `j`.
    pub fn group_of(&self, j: usize) -> usize {
        self.groups
            .iter()
            .position(|g| g.contains(&j))
            .expect("every index belongs to a group")
    }
}

/// Cyclic Jacobi eigendecomposition. Stops once the off-diagonal Frobenius
/// norm is at most `1e-12 * ||M||_F`.
pub fn eigh(m: &SymMatrix) -> Result<EigenDecomposition, SpectralError> {
    let n = m.n();
    let mut a = m.0.clone();
    let mut v = Matrix::identity(n);
    let target = 1e-12 * a.frobenius();
    let off = |a: &Matrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.get(i, j) * a.get(i, j);
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(SpectralError::NoConvergence {
                sweeps,
                residual: off(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = order
        .iter()
        .map(|&c| (0..n).map(|r| v.get(r, c)).collect())
        .collect();
    let groups = group_indices(&values, TAU_EIG);
    Ok(EigenDecomposition {
        values,
        vectors,
        groups,
    })
}

fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    if apq == 0.0 {
        return;
    }
    let n = a.n;
    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        let np = c * akp - s * akq;
        let nq = s * akp + c * akq;
        a.set(k, p, np);
        a.set(p, k, np);
        a.set(k, q, nq);
        a.set(q, k, nq);
    }
    a.set(p, p, a.get(p, p) - t * apq);
    a.set(q, q, a.get(q, q) + t * apq);
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}

/// Splits an ascending list into runs whose consecutive gaps are <= `tol`.
pub fn group_indices(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if x - values[*g.last().expect("nonempty group")] <= tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// `I - D^{-1/2} A D^{-1/2}`, with a zero diagonal entry for isolated vertices.
pub fn normalized_laplacian(g: &Graph) -> SymMatrix {
    let n = g.n();
    let mut m = Matrix::zeros(n);
    let inv_sqrt: Vec<f64> = g
        .degrees()
        .iter()
        .map(|&d| if d > 0 { 1.0 / (d as f64).sqrt() } else { 0.0 })
        .collect();
    for v in 0..n {
        if g.degree(v) > 0 {
            m.set(v, v, 1.0);
        }
    }
    for &(u, v) in g.edges() {
        let x = -inv_sqrt[u] * inv_sqrt[v];
        m.set(u, v, x);
        m.set(v, u, x);
    }
    SymMatrix(m)
}

/// Normalized-Laplacian eigenvalues, ascending.
pub fn laplacian_spectrum(g: &Graph) -> Vec<f64> {
    eigh(&normalized_laplacian(g))
        .expect("Jacobi converges on normalized Laplacians")
        .values
}

/// True iff both normalized-Laplacian spectra agree entrywise within `tol`.
pub fn spectra_equal(g1: &Graph, g2: &Graph, tol: f64) -> bool {
    if g1.n() != g2.n() {
        return false;
    }
    let s1 = laplacian_spectrum(g1);
    let s2 = laplacian_spectrum(g2);
    s1.iter().zip(&s2).all(|(a, b)| (a - b).abs() <= tol)
}

/// `D^{-1} A`; rows of isolated vertices are zero.
pub fn rw_matrix(g: &Graph) -> Matrix {
    let n = g.n();
    let mut m = Matrix::zeros(n);
    for v in 0..n {
        let d = g.degree(v);
        for &u in g.neighbors(v) {
            m.set(v, u, 1.0 / d as f64);
        }
    }
    m
}

/// `[D^{-1}A, (D^{-1}A)^2, ..., (D^{-1}A)^k]` by repeated multiplication.
pub fn rw_powers(g: &Graph, k: usize) -> Result<Vec<Matrix>, SpectralError> {
    if k == 0 {
        return Err(SpectralError::ZeroPower);
    }
    let base = rw_matrix(g);
    let mut out = Vec::with_capacity(k);
    out.push(base.clone());
    for _ in 1..k {
        let next = out.last().expect("nonempty").mul(&base);
        out.push(next);
    }
    Ok(out)
}

/// `((D^{-1}A)^k)_{uv}`.
pub fn rw_power_entry(g: &Graph, k: usize, u: usize, v: usize) -> Result<f64, SpectralError> {
    Ok(rw_powers(g, k)?.last().expect("k >= 1").get(u, v))
}
