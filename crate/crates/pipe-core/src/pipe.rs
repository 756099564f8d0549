//! PiPE: persistence-informed positional encodings inside a GIN-style
//! backbone, the LSPE baseline (topological channels masked), and analytic
//! gradients of the loss with respect to the filtration parameters.
//!
//! Per layer, with `F` parallel filtrations `a_{v,f} = sigmoid(w_f . p_v + b_f)`:
//!
//! ```text
//! t0_v   = concat_f (birth, death or 0, is_infinite) of v's dim-0 tuple
//! t1_e   = concat_f (birth, death or 0, is_infinite) of e's dim-1 tuple
//! r0_v   = tanh(Psi0 t0_v)
//! r1_v   = sum_{e ~ v} tanh(Psi1 t1_e)
//! m_v    = [r0_v, r1_v, p_v]
//! p'_v   = relu(Up [m_v, sum_{u ~ v} m_u])
//! h_v    = [x_v, p_v, r0_v, r1_v]
//! x'_v   = relu(Ux (h_v + sum_{u ~ v} h_u))
//! ```
//!
//! The graph embedding is `[sum_v x^L_v, sum_v p^L_v, mean_{l,v} [r0, r1]]`
//! and the output is one affine map of it.

use thiserror::Error;

use crate::encode::{self, Anchors, DistanceMode, EncodeError, LapOptions, Policy};
use crate::graphcore::Graph;
use crate::persist::{self, sigmoid, ColorAssignment, Death, PersistError, PersistenceDiagram};
use crate::rng::Stream;

const MAX_RESEEDS: u64 = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipeError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("filtration values stayed degenerate after {0} reseeds")]
    Degenerate(u64),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Persist(#[from] PersistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasePe {
    Lap { policy: Policy, skip_trivial: bool },
    Rw,
    /// Sum of hop distances to every vertex.
    Distance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiPEConfig {
    pub layers: usize,
    /// Width of positional embeddings; base encodings are zero-padded to it.
    pub pe_dim: usize,
    pub hidden: usize,
    /// Width of the input node features.
    pub input_dim: usize,
    pub base_pe: BasePe,
    pub base_k: usize,
    pub filtration_count: usize,
    pub seed: u64,
    /// Feed zero-persistence dim-1 tuples of non-cycle edges into `r1`.
    pub include_dummies: bool,
}

impl Default for PiPEConfig {
    fn default() -> Self {
        Self {
            layers: 2,
            pe_dim: 4,
            hidden: 8,
            input_dim: 1,
            base_pe: BasePe::Rw,
            base_k: 4,
            filtration_count: 2,
            seed: 0,
            include_dummies: true,
        }
    }
}

impl PiPEConfig {
    fn validate(&self) -> Result<(), PipeError> {
        let dims = [
            ("layers", self.layers),
            ("pe_dim", self.pe_dim),
            ("hidden", self.hidden),
            ("input_dim", self.input_dim),
            ("base_k", self.base_k),
            ("filtration_count", self.filtration_count),
        ];
        if let Some((name, _)) = dims.iter().find(|(_, v)| *v == 0) {
            return Err(PipeError::Config(format!("{name} must be >= 1")));
        }
        let base_width = match self.base_pe {
            BasePe::Distance => 1,
            _ => self.base_k,
        };
        if base_width > self.pe_dim {
            return Err(PipeError::Config(format!(
                "base encoding width {base_width} exceeds pe_dim {}",
                self.pe_dim
            )));
        }
        Ok(())
    }
}

/// Dense affine map `y = W x + b` with `W` stored row-major `out x inp`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub out: usize,
    pub inp: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Affine {
    fn random(out: usize, inp: usize, rng: &mut Stream) -> Self {
        let s = 1.0 / (inp as f64).sqrt();
        let w = (0..out * inp).map(|_| rng.symmetric(s)).collect();
        let b = (0..out).map(|_| rng.symmetric(s)).collect();
        Self { out, inp, w, b }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.inp);
        (0..self.out)
            .map(|o| {
                self.w[o * self.inp..(o + 1) * self.inp]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    + self.b[o]
            })
            .collect()
    }

    /// `W^T dy`.
    fn back(&self, dy: &[f64]) -> Vec<f64> {
        let mut dx = vec![0.0; self.inp];
        for (o, &g) in dy.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            for (i, d) in dx.iter_mut().enumerate() {
                *d += self.w[o * self.inp + i] * g;
            }
        }
        dx
    }

    pub fn zero(&mut self) {
        self.w.fill(0.0);
        self.b.fill(0.0);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    /// `filt_w[f]` has length `pe_dim`.
    pub filt_w: Vec<Vec<f64>>,
    pub filt_b: Vec<f64>,
    pub psi0: Affine,
    pub psi1: Affine,
    pub upd_p: Affine,
    pub upd_x: Affine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiPEParams {
    pub cfg: PiPEConfig,
    pub layers: Vec<LayerParams>,
    pub readout: Affine,
}

impl PiPEParams {
    /// Zeroes both vectorizations in every layer, which makes every
    /// topological embedding identically zero.
    pub fn zero_topology(&mut self) {
        for l in &mut self.layers {
            l.psi0.zero();
            l.psi1.zero();
        }
    }
}

/// Draws every tensor uniformly from `[-1/sqrt(fan_in), 1/sqrt(fan_in))` in a
/// fixed order: per layer the filtrations, Psi0, Psi1, Up, Ux; then readout.
pub fn init_params(cfg: &PiPEConfig) -> Result<PiPEParams, PipeError> {
    cfg.validate()?;
    let mut rng = Stream::new(cfg.seed);
    let (d, h, nf) = (cfg.pe_dim, cfg.hidden, cfg.filtration_count);
    let layers = (0..cfg.layers)
        .map(|l| {
            let s = 1.0 / (d as f64).sqrt();
            let filt_w = (0..nf)
                .map(|_| (0..d).map(|_| rng.symmetric(s)).collect())
                .collect();
            let filt_b = (0..nf).map(|_| rng.symmetric(s)).collect();
            let dx = if l == 0 { cfg.input_dim } else { h };
            LayerParams {
                filt_w,
                filt_b,
                psi0: Affine::random(h, 3 * nf, &mut rng),
                psi1: Affine::random(h, 3 * nf, &mut rng),
                upd_p: Affine::random(d, 2 * (2 * h + d), &mut rng),
                upd_x: Affine::random(h, dx + d + 2 * h, &mut rng),
            }
        })
        .collect();
    let readout = Affine::random(h, h + d + 2 * h, &mut rng);
    Ok(PiPEParams {
        cfg: cfg.clone(),
        layers,
        readout,
    })
}

/// Input node features.
#[derive(Debug, Clone, Copy)]
pub enum NodeInput<'a> {
    /// All-ones rows of width `input_dim`.
    Constant,
    Colors(&'a ColorAssignment),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Pipe,
    Lspe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrace {
    pub p: Vec<Vec<f64>>,
    pub x: Vec<Vec<f64>>,
    /// `values[f][v]`.
    pub values: Vec<Vec<f64>>,
    /// `(dim 0, dim 1)` per filtration; empty under LSPE.
    pub diagrams: Vec<(PersistenceDiagram, PersistenceDiagram)>,
    pub r0: Vec<Vec<f64>>,
    pub r1: Vec<Vec<f64>>,
    /// `tanh(Psi1 t1_e)` per edge; zero rows for excluded dummies.
    q: Vec<Vec<f64>>,
    edge_included: Vec<bool>,
    pre_p: Vec<Vec<f64>>,
    pre_x: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub layers: Vec<LayerTrace>,
    pub x_final: Vec<Vec<f64>>,
    pub p_final: Vec<Vec<f64>>,
    pub graph_embedding: Vec<f64>,
    pub output: Vec<f64>,
}

/// Base positional encoding, zero-padded to `pe_dim`.
pub fn base_encoding(g: &Graph, cfg: &PiPEConfig) -> Result<Vec<Vec<f64>>, PipeError> {
    let pe = match cfg.base_pe {
        BasePe::Lap { policy, skip_trivial } => {
            let opts = LapOptions {
                k: cfg.base_k,
                policy,
                skip_trivial,
            };
            encode::lap_pe_with(g, opts)?
        }
        BasePe::Rw => encode::rw_pe(g, cfg.base_k)?,
        BasePe::Distance => {
            let all: Vec<usize> = (0..g.n()).collect();
            if all.is_empty() {
                return Ok(Vec::new());
            }
            encode::distance_pe(g, &Anchors::Fixed(all), 1, &DistanceMode::ShortestPath)?
        }
    };
    Ok(pe
        .rows
        .into_iter()
        .map(|mut r| {
            r.resize(cfg.pe_dim, 0.0);
            r
        })
        .collect())
}

pub fn pipe_forward(g: &Graph, x0: NodeInput<'_>, params: &PiPEParams) -> Result<ForwardTrace, PipeError> {
    forward(g, x0, params, Mode::Pipe)
}

/// Same pipeline with every topological embedding masked to zero.
pub fn lspe_forward(g: &Graph, x0: NodeInput<'_>, params: &PiPEParams) -> Result<ForwardTrace, PipeError> {
    forward(g, x0, params, Mode::Lspe)
}

fn initial_features(g: &Graph, x0: NodeInput<'_>, cfg: &PiPEConfig) -> Result<Vec<Vec<f64>>, PipeError> {
    match x0 {
        NodeInput::Constant => Ok(vec![vec![1.0; cfg.input_dim]; g.n()]),
        NodeInput::Colors(c) => {
            if c.len() != g.n() || c.rows().iter().any(|r| r.len() != cfg.input_dim) {
                return Err(PipeError::Shape(format!(
                    "node input must be {} rows of width {}",
                    g.n(),
                    cfg.input_dim
                )));
            }
            Ok(c.rows().to_vec())
        }
    }
}

/// Per-tuple vectorization input: `(birth, death or 0, is_infinite)`.
fn tuple_features(birth: f64, death: Death) -> [f64; 3] {
    match death {
        Death::Finite(d) => [birth, d, 0.0],
        Death::Infinite => [birth, 0.0, 1.0],
    }
}

fn forward(g: &Graph, x0: NodeInput<'_>, params: &PiPEParams, mode: Mode) -> Result<ForwardTrace, PipeError> {
    let cfg = &params.cfg;
    let n = g.n();
    let (d, h, nf) = (cfg.pe_dim, cfg.hidden, cfg.filtration_count);
    let mut p = base_encoding(g, cfg)?;
    let mut x = initial_features(g, x0, cfg)?;
    let start: Vec<Vec<f64>> = p.iter().zip(&x).map(|(a, b)| [a.as_slice(), b].concat()).collect();
    let labels = persist::tie_labels(g, &ColorAssignment::new(start));
    let mut traces = Vec::with_capacity(cfg.layers);
    for lp in &params.layers {
        let mut values = Vec::new();
        let mut diagrams = Vec::new();
        let mut r0 = vec![vec![0.0; h]; n];
        let mut r1 = vec![vec![0.0; h]; n];
        let mut q = vec![vec![0.0; h]; g.edge_count()];
        let mut edge_included = vec![false; g.edge_count()];
        if mode == Mode::Pipe {
            for f in 0..nf {
                let a: Vec<f64> = p
                    .iter()
                    .map(|pv| sigmoid(dot(&lp.filt_w[f], pv) + lp.filt_b[f]))
                    .collect();
                diagrams.push(persist::diagrams_with_ties(g, &a, Some(&labels))?);
                values.push(a);
            }
            for (v, out) in r0.iter_mut().enumerate() {
                let t: Vec<f64> = diagrams
                    .iter()
                    .flat_map(|(d0, _)| tuple_features(d0.tuples[v].birth, d0.tuples[v].death))
                    .collect();
                *out = lp.psi0.apply(&t).into_iter().map(f64::tanh).collect();
            }
            for (i, &(u, v)) in g.edges().iter().enumerate() {
                let dummy = diagrams.iter().all(|(_, d1)| !d1.tuples[i].death.is_infinite());
                if dummy && !cfg.include_dummies {
                    continue;
                }
                edge_included[i] = true;
                let t: Vec<f64> = diagrams
                    .iter()
                    .flat_map(|(_, d1)| tuple_features(d1.tuples[i].birth, d1.tuples[i].death))
                    .collect();
                q[i] = lp.psi1.apply(&t).into_iter().map(f64::tanh).collect();
                add_to(&mut r1[u], &q[i]);
                add_to(&mut r1[v], &q[i]);
            }
        }
        let m: Vec<Vec<f64>> = (0..n).map(|v| concat(&[&r0[v], &r1[v], &p[v]])).collect();
        let hv: Vec<Vec<f64>> = (0..n).map(|v| concat(&[&x[v], &p[v], &r0[v], &r1[v]])).collect();
        let mut pre_p = Vec::with_capacity(n);
        let mut pre_x = Vec::with_capacity(n);
        for v in 0..n {
            let mut agg = vec![0.0; 2 * h + d];
            let mut gin = hv[v].clone();
            for &u in g.neighbors(v) {
                add_to(&mut agg, &m[u]);
                add_to(&mut gin, &hv[u]);
            }
            pre_p.push(lp.upd_p.apply(&concat(&[&m[v], &agg])));
            pre_x.push(lp.upd_x.apply(&gin));
        }
        let next_p = pre_p.iter().map(|r| relu(r)).collect();
        let next_x = pre_x.iter().map(|r| relu(r)).collect();
        traces.push(LayerTrace {
            p: std::mem::replace(&mut p, next_p),
            x: std::mem::replace(&mut x, next_x),
            values,
            diagrams,
            r0,
            r1,
            q,
            edge_included,
            pre_p,
            pre_x,
        });
    }
    let mut zx = vec![0.0; h];
    let mut zp = vec![0.0; d];
    for v in 0..n {
        add_to(&mut zx, &x[v]);
        add_to(&mut zp, &p[v]);
    }
    let mut zt = vec![0.0; 2 * h];
    if n > 0 {
        let scale = 1.0 / (n * traces.len()) as f64;
        for t in &traces {
            for v in 0..n {
                for j in 0..h {
                    zt[j] += t.r0[v][j] * scale;
                    zt[h + j] += t.r1[v][j] * scale;
                }
            }
        }
    }
    let z = concat(&[&zx, &zp, &zt]);
    let output = params.readout.apply(&z);
    Ok(ForwardTrace {
        layers: traces,
        x_final: x,
        p_final: p,
        graph_embedding: z,
        output,
    })
}

/// Largest absolute difference between two graph-level outputs.
pub fn output_gap(a: &ForwardTrace, b: &ForwardTrace) -> f64 {
    a.output
        .iter()
        .zip(&b.output)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Cotangent of one tuple: `(d/d birth, d/d death)`.
pub type TupleCotangent = (f64, f64);

/// Scatters tuple cotangents onto the vertices whose filtration values the
/// births and finite deaths are; infinite deaths contribute nothing.
pub fn scatter_diagram_grads(
    n: usize,
    d0: &PersistenceDiagram,
    up0: &[TupleCotangent],
    d1: &PersistenceDiagram,
    up1: &[TupleCotangent],
) -> Vec<f64> {
    let mut grad = vec![0.0; n];
    for (d, up) in [(d0, up0), (d1, up1)] {
        for (t, &(gb, gd)) in d.tuples.iter().zip(up) {
            grad[t.birth_vertex] += gb;
            if let Some(v) = t.death_vertex {
                grad[v] += gd;
            }
        }
    }
    grad
}

/// Gradient of `sum <upstream, tuple>` with respect to the vertex values.
/// Tuples are indexed as in [`persist::diagrams`]; ties follow the recorded
/// provenance.
pub fn diagram_value_grads(
    g: &Graph,
    values: &[f64],
    up0: &[TupleCotangent],
    up1: &[TupleCotangent],
) -> Result<Vec<f64>, PipeError> {
    if up0.len() != g.n() || up1.len() != g.edge_count() {
        return Err(PipeError::Shape(format!(
            "need {} dim-0 and {} dim-1 cotangents",
            g.n(),
            g.edge_count()
        )));
    }
    let (d0, d1) = persist::diagrams(g, values)?;
    Ok(scatter_diagram_grads(g.n(), &d0, up0, &d1, up1))
}

/// Gradients of the filtration parameters, shaped like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationGrads {
    pub w: Vec<Vec<Vec<f64>>>,
    pub b: Vec<Vec<f64>>,
}

impl FiltrationGrads {
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (wl, bl) in self.w.iter().zip(&self.b) {
            for (wf, bf) in wl.iter().zip(bl) {
                out.extend(wf);
                out.push(*bf);
            }
        }
        out
    }
}

/// `sum_j z_j^2` over the graph embedding.
pub fn embedding_loss(t: &ForwardTrace) -> f64 {
    t.graph_embedding.iter().map(|z| z * z).sum()
}

/// Analytic gradient of [`embedding_loss`] with respect to every filtration
/// weight and bias.
pub fn filtration_grads(g: &Graph, params: &PiPEParams, trace: &ForwardTrace) -> FiltrationGrads {
    let cfg = &params.cfg;
    let n = g.n();
    let (d, h, nf) = (cfg.pe_dim, cfg.hidden, cfg.filtration_count);
    let nl = params.layers.len();
    let dz: Vec<f64> = trace.graph_embedding.iter().map(|z| 2.0 * z).collect();
    let mut dx: Vec<Vec<f64>> = vec![dz[..h].to_vec(); n];
    let mut dp: Vec<Vec<f64>> = vec![dz[h..h + d].to_vec(); n];
    let scale = if n > 0 { 1.0 / (n * nl) as f64 } else { 0.0 };
    let dr0_pool: Vec<f64> = dz[h + d..2 * h + d].iter().map(|x| x * scale).collect();
    let dr1_pool: Vec<f64> = dz[2 * h + d..].iter().map(|x| x * scale).collect();
    let mut gw = vec![vec![vec![0.0; d]; nf]; nl];
    let mut gb = vec![vec![0.0; nf]; nl];

    for l in (0..nl).rev() {
        let lp = &params.layers[l];
        let t = &trace.layers[l];
        let dxin = t.x.first().map_or(cfg.input_dim, Vec::len);
        let mh = 2 * h + d;

        let dg: Vec<Vec<f64>> = (0..n)
            .map(|v| lp.upd_x.back(&relu_back(&dx[v], &t.pre_x[v])))
            .collect();
        let dmm: Vec<Vec<f64>> = (0..n)
            .map(|v| lp.upd_p.back(&relu_back(&dp[v], &t.pre_p[v])))
            .collect();
        let mut new_dx = vec![vec![0.0; dxin]; n];
        let mut new_dp = vec![vec![0.0; d]; n];
        let mut dr0 = vec![dr0_pool.clone(); n];
        let mut dr1 = vec![dr1_pool.clone(); n];
        for v in 0..n {
            let mut dh = dg[v].clone();
            let mut dm = dmm[v][..mh].to_vec();
            for &u in g.neighbors(v) {
                add_to(&mut dh, &dg[u]);
                add_to(&mut dm, &dmm[u][mh..]);
            }
            new_dx[v].copy_from_slice(&dh[..dxin]);
            add_to(&mut new_dp[v], &dh[dxin..dxin + d]);
            add_to(&mut dr0[v], &dh[dxin + d..dxin + d + h]);
            add_to(&mut dr1[v], &dh[dxin + d + h..]);
            add_to(&mut dr0[v], &dm[..h]);
            add_to(&mut dr1[v], &dm[h..2 * h]);
            add_to(&mut new_dp[v], &dm[2 * h..]);
        }

        if !t.diagrams.is_empty() {
            let dt0: Vec<Vec<f64>> = (0..n)
                .map(|v| lp.psi0.back(&tanh_back(&dr0[v], &t.r0[v])))
                .collect();
            let dt1: Vec<Vec<f64>> = g
                .edges()
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| {
                    let mut dq = dr1[a].clone();
                    add_to(&mut dq, &dr1[b]);
                    if !t.edge_included[i] {
                        return vec![0.0; 3 * nf];
                    }
                    lp.psi1.back(&tanh_back(&dq, &t.q[i]))
                })
                .collect();
            for f in 0..nf {
                let (d0, d1) = &t.diagrams[f];
                let cot = |dt: &[f64], death: Death| -> TupleCotangent {
                    (dt[3 * f], if death.is_infinite() { 0.0 } else { dt[3 * f + 1] })
                };
                let up0: Vec<TupleCotangent> = (0..n).map(|v| cot(&dt0[v], d0.tuples[v].death)).collect();
                let up1: Vec<TupleCotangent> = (0..g.edge_count())
                    .map(|i| cot(&dt1[i], d1.tuples[i].death))
                    .collect();
                let da = scatter_diagram_grads(n, d0, &up0, d1, &up1);
                for v in 0..n {
                    let a = t.values[f][v];
                    let ds = da[v] * a * (1.0 - a);
                    if ds == 0.0 {
                        continue;
                    }
                    gb[l][f] += ds;
                    for j in 0..d {
                        gw[l][f][j] += ds * t.p[v][j];
                        new_dp[v][j] += ds * lp.filt_w[f][j];
                    }
                }
            }
        }
        dx = new_dx;
        dp = new_dp;
    }
    FiltrationGrads { w: gw, b: gb }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub max_rel_err: f64,
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
    /// Parameter seed that passed the degeneracy checks.
    pub seed: u64,
}

/// Relative error with a floor so coordinates that vanish analytically and
/// numerically do not divide by zero.
pub fn relative_error(a: f64, f: f64) -> f64 {
    (a - f).abs() / a.abs().max(f.abs()).max(1e-6)
}

/// Central finite differences of [`embedding_loss`] against the analytic
/// filtration gradient. Reseeds (up to ten times) while some filtration has
/// two values closer than `10 eps` but not equal, or while a probe flips a
/// ReLU.
pub fn grad_check(g: &Graph, cfg: &PiPEConfig, seed: u64, eps: f64) -> Result<GradCheck, PipeError> {
    grad_check_with(g, cfg, seed, eps, |_| {})
}

/// [`grad_check`] with a hook that may edit the parameters after init.
pub fn grad_check_with(
    g: &Graph,
    cfg: &PiPEConfig,
    seed: u64,
    eps: f64,
    edit: impl Fn(&mut PiPEParams),
) -> Result<GradCheck, PipeError> {
    for attempt in 0..MAX_RESEEDS {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut params = init_params(&PiPEConfig { seed: s, ..cfg.clone() })?;
        edit(&mut params);
        let base = pipe_forward(g, NodeInput::Constant, &params)?;
        if has_near_ties(&base, eps) {
            continue;
        }
        let mask = combinatorial_signature(&base);
        let analytic = filtration_grads(g, &params, &base).flatten();
        let mut numeric = Vec::with_capacity(analytic.len());
        let mut stable = true;
        'coords: for l in 0..params.layers.len() {
            for f in 0..cfg.filtration_count {
                for j in 0..=cfg.pe_dim {
                    let probe = |delta: f64| -> Result<(f64, bool), PipeError> {
                        let mut q = params.clone();
                        if j < cfg.pe_dim {
                            q.layers[l].filt_w[f][j] += delta;
                        } else {
                            q.layers[l].filt_b[f] += delta;
                        }
                        let t = pipe_forward(g, NodeInput::Constant, &q)?;
                        Ok((embedding_loss(&t), combinatorial_signature(&t) == mask))
                    };
                    let (lp, ok_p) = probe(eps)?;
                    let (lm, ok_m) = probe(-eps)?;
                    if !(ok_p && ok_m) {
                        stable = false;
                        break 'coords;
                    }
                    numeric.push((lp - lm) / (2.0 * eps));
                }
            }
        }
        if !stable {
            continue;
        }
        let max_rel_err = analytic
            .iter()
            .zip(&numeric)
            .map(|(&a, &f)| relative_error(a, f))
            .fold(0.0, f64::max);
        return Ok(GradCheck {
            max_rel_err,
            analytic,
            numeric,
            seed: s,
        });
    }
    Err(PipeError::Degenerate(MAX_RESEEDS))
}

/// True if some filtration has two values closer than `gap` yet not within
/// float noise of each other. Exact ties (typically automorphic vertices) are
/// stable under perturbation and allowed.
fn has_near_ties(t: &ForwardTrace, gap: f64) -> bool {
    t.layers.iter().flat_map(|l| &l.values).any(|vals| {
        let mut s = vals.clone();
        s.sort_by(f64::total_cmp);
        s.windows(2).any(|w| {
            let diff = w[1] - w[0];
            diff > 1e-12 && diff <= gap
        })
    })
}

/// ReLU activation pattern plus the rank of every filtration value. Ranks
/// treat values within `1e-12` as equal, so ties forced by automorphisms do
/// not register as crossings.
fn combinatorial_signature(t: &ForwardTrace) -> Vec<usize> {
    let relu = t
        .layers
        .iter()
        .flat_map(|l| l.pre_p.iter().chain(&l.pre_x))
        .flatten()
        .map(|&x| usize::from(x > 0.0));
    let ranks = t.layers.iter().flat_map(|l| &l.values).flat_map(|vals| {
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let mut rank = vec![0; vals.len()];
        for w in 1..idx.len() {
            rank[idx[w]] = rank[idx[w - 1]] + usize::from(vals[idx[w]] - vals[idx[w - 1]] > 1e-12);
        }
        rank
    });
    relu.chain(ranks).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn add_to(acc: &mut [f64], x: &[f64]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b;
    }
}

fn concat(parts: &[&[f64]]) -> Vec<f64> {
    parts.concat()
}

fn relu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

fn relu_back(dy: &[f64], pre: &[f64]) -> Vec<f64> {
    dy.iter().zip(pre).map(|(&g, &p)| if p > 0.0 { g } else { 0.0 }).collect()
}

fn tanh_back(dy: &[f64], y: &[f64]) -> Vec<f64> {
    dy.iter().zip(y).map(|(&g, &t)| g * (1.0 - t * t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::{cycle, disjoint_union, path};

    #[test]
    fn init_is_deterministic() {
        let cfg = PiPEConfig::default();
        assert_eq!(init_params(&cfg).unwrap(), init_params(&cfg).unwrap());
        let other = init_params(&PiPEConfig { seed: 1, ..cfg.clone() }).unwrap();
        assert_ne!(init_params(&cfg).unwrap(), other);
        assert!(init_params(&PiPEConfig { layers: 0, ..cfg }).is_err());
    }

    #[test]
    fn weights_within_fan_in_bound() {
        let p = init_params(&PiPEConfig::default()).unwrap();
        let a = &p.layers[0].upd_x;
        let s = 1.0 / (a.inp as f64).sqrt();
        assert!(a.w.iter().chain(&a.b).all(|x| x.abs() <= s));
    }

    #[test]
    fn path_value_grads() {
        let g = path(2);
        let up0 = vec![(0.0, 0.0), (1.0, 1.0)];
        let up1 = vec![(0.0, 0.0)];
        assert_eq!(diagram_value_grads(&g, &[0.0, 1.0], &up0, &up1).unwrap(), vec![0.0, 2.0]);
        let zero = diagram_value_grads(&g, &[0.0, 1.0], &[(0.0, 0.0); 2], &up1).unwrap();
        assert_eq!(zero, vec![0.0, 0.0]);
    }

    #[test]
    fn zeroed_topology_matches_lspe() {
        let g = disjoint_union(&[cycle(4), path(3)]).unwrap();
        let mut params = init_params(&PiPEConfig::default()).unwrap();
        params.zero_topology();
        let a = pipe_forward(&g, NodeInput::Constant, &params).unwrap();
        let b = lspe_forward(&g, NodeInput::Constant, &params).unwrap();
        assert_eq!(a.output, b.output);
        assert_eq!(a.graph_embedding, b.graph_embedding);
    }

    #[test]
    fn diagrams_in_trace_have_expected_sizes() {
        let g = cycle(5);
        let params = init_params(&PiPEConfig::default()).unwrap();
        let t = pipe_forward(&g, NodeInput::Constant, &params).unwrap();
        for l in &t.layers {
            for (d0, d1) in &l.diagrams {
                assert_eq!(d0.tuples.len(), 5);
                assert_eq!(d0.infinite_count(), 1);
                assert_eq!(d1.infinite_count(), 1);
            }
        }
    }

    #[test]
    fn rejects_bad_input_width() {
        let params = init_params(&PiPEConfig::default()).unwrap();
        let c = ColorAssignment::new(vec![vec![1.0, 2.0]; 3]);
        assert!(pipe_forward(&path(3), NodeInput::Colors(&c), &params).is_err());
    }
}
