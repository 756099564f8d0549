//! Machine-checkable claims about a pair of graphs and their evaluation.

use pipe_core::encode::{self, Anchors, DistanceMode, LapOptions, PEMatrix, Policy, COMPUTED_TOL};
use pipe_core::graphcore::{are_isomorphic, betti, cycle, disjoint_union};
use pipe_core::persist::{self, ColorAssignment, FiltrationSpec, PersistenceDiagram};
use pipe_core::pipe::{init_params, lspe_forward, output_gap, pipe_forward, NodeInput, PiPEConfig};
use pipe_core::rng::Stream;
use pipe_core::spectral;
use pipe_core::wl::{self, KfwlBudget};
use pipe_core::Graph;

use crate::reconstruct::{self, matches_table, Target};
use crate::HarnessError;

/// Embedding gap above which a seed separates a pair.
pub const SEPARATED: f64 = 1e-6;
/// Embedding gap at or below which a seed leaves a pair equal.
pub const EQUAL: f64 = 1e-9;
/// Seeds tried for embedding comparisons.
pub const SEEDS: u64 = 5;
/// Random injective filtrations tried on top of rank order and its reverse.
pub const RANDOM_FILTRATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Pe {
    Lap { k: usize, policy: Policy, skip_trivial: bool },
    Rw { k: usize },
    Distance { anchors: Anchors, mode: DistanceMode, k: usize },
}

impl Pe {
    pub fn lap_raw(k: usize) -> Self {
        Pe::Lap {
            k,
            policy: Policy::Raw,
            skip_trivial: false,
        }
    }

    pub fn lap_skip(k: usize) -> Self {
        Pe::Lap {
            k,
            policy: Policy::Raw,
            skip_trivial: true,
        }
    }

    pub fn lap_projection(k: usize) -> Self {
        Pe::Lap {
            k,
            policy: Policy::EigenspaceProjection,
            skip_trivial: false,
        }
    }

    pub fn compute(&self, g: &Graph) -> Result<PEMatrix, HarnessError> {
        Ok(match self {
            Pe::Lap { k, policy, skip_trivial } => {
                let mut opts = LapOptions::new(*k, *policy);
                opts.skip_trivial = *skip_trivial;
                encode::lap_pe_with(g, opts)?
            }
            Pe::Rw { k } => encode::rw_pe(g, *k)?,
            Pe::Distance { anchors, mode, k } => encode::distance_pe(g, anchors, *k, mode)?,
        })
    }

    pub fn label(&self) -> String {
        match self {
            Pe::Lap { k, policy, skip_trivial } => {
                let p = match policy {
                    Policy::Raw => "raw",
                    Policy::EigenspaceProjection => "projection",
                };
                let t = if *skip_trivial { ", no trivial" } else { "" };
                format!("LapPE({p}{t}, k={k})")
            }
            Pe::Rw { k } => format!("RWPE(k={k})"),
            Pe::Distance { anchors, mode, k } => {
                let a = match anchors {
                    Anchors::SelfAnchored => "self".to_string(),
                    Anchors::Fixed(s) => format!("{s:?}"),
                };
                let m = match mode {
                    DistanceMode::RwVector => "rw_vector",
                    DistanceMode::PageRank(_) => "pagerank",
                    DistanceMode::ShortestPath => "shortest_path",
                };
                format!("DE({m}, anchors={a}, k={k})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Colors {
    Degree,
    Pe(Pe),
}

impl Colors {
    pub fn assign(&self, g: &Graph) -> Result<ColorAssignment, HarnessError> {
        Ok(match self {
            Colors::Degree => ColorAssignment::degrees(g),
            Colors::Pe(pe) => ColorAssignment::from_pe(&pe.compute(g)?),
        })
    }

    fn label(&self) -> String {
        match self {
            Colors::Degree => "degree".to_string(),
            Colors::Pe(pe) => pe.label(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
    Both,
}

impl Side {
    fn pick<'a>(self, g1: &'a Graph, g2: &'a Graph) -> Vec<&'a Graph> {
        match self {
            Side::First => vec![g1],
            Side::Second => vec![g2],
            Side::Both => vec![g1, g2],
        }
    }
}

/// Expected dim-0 diagram of a degree filtration, as `(birth, death)` pairs
/// over named values.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    /// Filtration value per degree.
    pub table: Vec<(usize, f64)>,
    /// Symbol per value, for reporting.
    pub names: Vec<(f64, &'static str)>,
    pub pairs: Vec<(f64, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    NonIsomorphic,
    /// Betti numbers of the listed dimensions agree.
    BettiEqual(Vec<usize>),
    BettiDiffer(usize),
    Regular(usize),
    DegreesEqual,
    Cospectral,
    /// The `count` smallest normalized-Laplacian eigenvalues agree.
    SmallestEigenvaluesEqual(usize),
    MatchesTable(Side, Target),
    /// Every listed encoding has equal row multisets on the two graphs.
    PeEqual(Vec<Pe>),
    /// Every listed encoding has different row multisets.
    PeDiffer(Vec<Pe>),
    /// RW rows of both graphs times `scale` equal `row` exactly.
    RwScaledExact { k: usize, scale: f64, row: Vec<f64> },
    /// Diagrams of the listed dimensions agree under every filtration tried.
    DiagramsEqual { colors: Colors, dims: Vec<usize> },
    /// Some listed dimension differs under every filtration tried.
    DiagramsDiffer { colors: Colors, dims: Vec<usize> },
    DegreeShape(Side, Shape),
    Wl1Distinguishes,
    KfwlDistinguishes(usize),
    PipeSeparates(PiPEConfig),
    LspeSeparates(PiPEConfig),
    /// The 2-regular ten-vertex search returns exactly the two graphs.
    CycleSearchReturnsPair,
    /// Random pairs with unequal encodings have unequal birth multisets.
    EncodingsDetermineBirths { pairs: usize },
    /// Random 2-FWL-distinguished pairs are separated by the node projection.
    FwlProjectionSeparates { pairs: usize },
}

/// `holds` is `None` when the evaluation is inconclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub holds: Option<bool>,
    pub measured: String,
}

impl Outcome {
    fn of(holds: bool, measured: impl Into<String>) -> Self {
        Self {
            holds: Some(holds),
            measured: measured.into(),
        }
    }
}

/// Rank order, reverse rank order and seeded random injective tables over
/// the union of both colourings.
pub fn filtration_family(c1: &ColorAssignment, c2: &ColorAssignment, seed: u64) -> Vec<FiltrationSpec> {
    let both = [c1, c2];
    let mut out = vec![
        FiltrationSpec::injective_rank(&both),
        FiltrationSpec::injective_rank_reversed(&both),
    ];
    let mut s = Stream::new(seed);
    out.extend((0..RANDOM_FILTRATIONS).map(|_| FiltrationSpec::injective_random(&both, &mut s)));
    out
}

/// Per listed dimension, whether the two graphs' diagrams agree.
pub fn diagrams_agree(
    g1: &Graph,
    c1: &ColorAssignment,
    g2: &Graph,
    c2: &ColorAssignment,
    f: &FiltrationSpec,
    dims: &[usize],
) -> Result<Vec<bool>, HarnessError> {
    let (a0, a1) = persist::diagrams(g1, &persist::filtration_values(c1, f)?)?;
    let (b0, b1) = persist::diagrams(g2, &persist::filtration_values(c2, f)?)?;
    dims.iter()
        .map(|&d| {
            let (x, y): (&PersistenceDiagram, &PersistenceDiagram) = if d == 0 { (&a0, &b0) } else { (&a1, &b1) };
            Ok(persist::diagrams_equal(x, y, COMPUTED_TOL)?)
        })
        .collect()
}

/// Largest graph-level gap per seed, PiPE or LSPE.
pub fn embedding_gaps(g1: &Graph, g2: &Graph, cfg: &PiPEConfig, lspe: bool) -> Result<Vec<f64>, HarnessError> {
    (0..SEEDS)
        .map(|i| {
            let params = init_params(&PiPEConfig {
                seed: cfg.seed.wrapping_add(i),
                ..cfg.clone()
            })?;
            let run = if lspe { lspe_forward } else { pipe_forward };
            let a = run(g1, NodeInput::Constant, &params)?;
            let b = run(g2, NodeInput::Constant, &params)?;
            Ok(if a.output.len() == b.output.len() {
                output_gap(&a, &b)
            } else {
                f64::INFINITY
            })
        })
        .collect()
}

/// Separated if some seed exceeds [`SEPARATED`], equal if all are within
/// [`EQUAL`], otherwise inconclusive.
pub fn separation(gaps: &[f64]) -> Option<bool> {
    if gaps.iter().any(|&g| g > SEPARATED) {
        Some(true)
    } else if gaps.iter().all(|&g| g <= EQUAL) {
        Some(false)
    } else {
        None
    }
}

fn fmt_gaps(gaps: &[f64]) -> String {
    let parts: Vec<String> = gaps.iter().map(|g| format!("{g:.3e}")).collect();
    format!("gaps per seed [{}]", parts.join(", "))
}

fn symbol(x: f64, names: &[(f64, &str)]) -> String {
    names
        .iter()
        .find(|(v, _)| (v - x).abs() <= 1e-12)
        .map_or_else(|| format!("{x}"), |(_, s)| s.to_string())
}

/// Multiset of `(birth, death)` pairs written with symbols, e.g.
/// `{(a,inf), 2x(g,g)}`.
pub fn shape_string(pairs: &[(f64, Option<f64>)], names: &[(f64, &str)]) -> String {
    let mut items: Vec<String> = pairs
        .iter()
        .map(|(b, d)| {
            let d = d.map_or_else(|| "inf".to_string(), |d| symbol(d, names));
            format!("({},{d})", symbol(*b, names))
        })
        .collect();
    items.sort();
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let j = (i..items.len()).find(|&j| items[j] != items[i]).unwrap_or(items.len());
        out.push(if j - i > 1 { format!("{}x{}", j - i, items[i]) } else { items[i].clone() });
        i = j;
    }
    format!("{{{}}}", out.join(", "))
}

fn as_pairs(d: &PersistenceDiagram) -> Vec<(f64, Option<f64>)> {
    d.sorted_pairs()
        .into_iter()
        .map(|(b, death)| (b, death.finite()))
        .collect()
}

fn same_pairs(a: &[(f64, Option<f64>)], b: &[(f64, Option<f64>)]) -> bool {
    let key = |p: &(f64, Option<f64>)| (p.0, p.1.unwrap_or(f64::INFINITY));
    let mut a: Vec<(f64, f64)> = a.iter().map(key).collect();
    let mut b: Vec<(f64, f64)> = b.iter().map(key).collect();
    a.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    b.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    a.len() == b.len()
        && a.iter().zip(&b).all(|(x, y)| {
            (x.0 - y.0).abs() <= 1e-12 && (x.1 == y.1 || (x.1 - y.1).abs() <= 1e-12)
        })
}

/// Evaluates `check` on `(g1, g2)`; `seed` drives random filtrations,
/// parameter draws and generated corpora.
pub fn evaluate(check: &Check, g1: &Graph, g2: &Graph, seed: u64) -> Result<Outcome, HarnessError> {
    Ok(match check {
        Check::NonIsomorphic => {
            let iso = are_isomorphic(g1, g2)?;
            Outcome::of(!iso, format!("isomorphic = {iso}"))
        }
        Check::BettiEqual(dims) => {
            let (b1, b2) = (betti(g1), betti(g2));
            let get = |b: &pipe_core::BettiPair, d: usize| if d == 0 { b.beta0 } else { b.beta1 };
            let holds = dims.iter().all(|&d| get(&b1, d) == get(&b2, d));
            Outcome::of(
                holds,
                format!("(b0, b1) = ({}, {}) vs ({}, {})", b1.beta0, b1.beta1, b2.beta0, b2.beta1),
            )
        }
        Check::BettiDiffer(d) => {
            let (b1, b2) = (betti(g1), betti(g2));
            let (x, y) = if *d == 0 { (b1.beta0, b2.beta0) } else { (b1.beta1, b2.beta1) };
            Outcome::of(x != y, format!("b{d} = {x} vs {y}"))
        }
        Check::Regular(d) => {
            let holds = g1.degrees().iter().chain(&g2.degrees()).all(|x| x == d);
            Outcome::of(holds, format!("degrees {:?} / {:?}", g1.degrees(), g2.degrees()))
        }
        Check::DegreesEqual => {
            let (mut a, mut b) = (g1.degrees(), g2.degrees());
            a.sort_unstable();
            b.sort_unstable();
            Outcome::of(a == b, format!("sorted degrees {a:?} vs {b:?}"))
        }
        Check::Cospectral => {
            let holds = reconstruct::cospectral(g1, g2);
            Outcome::of(holds, format!("normalized Laplacian spectra equal within 1e-9: {holds}"))
        }
        Check::SmallestEigenvaluesEqual(count) => {
            let (a, b) = (spectral::laplacian_spectrum(g1), spectral::laplacian_spectrum(g2));
            let m = (*count).min(a.len()).min(b.len());
            let holds = m == *count && a[..m].iter().zip(&b[..m]).all(|(x, y)| (x - y).abs() <= spectral::TAU_EIG);
            let show = |v: &[f64]| format!("{:?}", v.iter().take(*count).map(|x| (x * 1e6).round() / 1e6).collect::<Vec<_>>());
            Outcome::of(holds, format!("{} vs {}", show(&a), show(&b)))
        }
        Check::MatchesTable(side, target) => {
            let hits = side
                .pick(g1, g2)
                .into_iter()
                .map(|g| matches_table(g, target, encode::ROUNDED_TOL))
                .collect::<Result<Vec<_>, _>>()?;
            Outcome::of(hits.iter().all(|&h| h), format!("match within 0.02 per graph: {hits:?}"))
        }
        Check::PeEqual(list) | Check::PeDiffer(list) => {
            let mut equal = Vec::new();
            for pe in list {
                equal.push(encode::pe_multiset_equal(&pe.compute(g1)?, &pe.compute(g2)?, COMPUTED_TOL)?);
            }
            let holds = match check {
                Check::PeEqual(_) => equal.iter().all(|&e| e),
                _ => equal.iter().all(|&e| !e),
            };
            let detail: Vec<String> = list
                .iter()
                .zip(&equal)
                .map(|(pe, e)| format!("{} {}", pe.label(), if *e { "equal" } else { "differ" }))
                .collect();
            Outcome::of(holds, detail.join("; "))
        }
        Check::RwScaledExact { k, scale, row } => {
            let mut all = true;
            for g in [g1, g2] {
                for r in encode::rw_pe(g, *k)?.rows {
                    let scaled: Vec<f64> = r.iter().map(|x| x * scale).collect();
                    all &= scaled == *row;
                }
            }
            Outcome::of(all, format!("every row x {scale} == {row:?}: {all}"))
        }
        Check::DiagramsEqual { colors, dims } | Check::DiagramsDiffer { colors, dims } => {
            let (c1, c2) = (colors.assign(g1)?, colors.assign(g2)?);
            let family = filtration_family(&c1, &c2, seed);
            let mut equal_count = 0;
            for f in &family {
                if diagrams_agree(g1, &c1, g2, &c2, f, dims)?.iter().all(|&e| e) {
                    equal_count += 1;
                }
            }
            let holds = match check {
                Check::DiagramsEqual { .. } => equal_count == family.len(),
                _ => equal_count == 0,
            };
            Outcome::of(
                holds,
                format!(
                    "{} colours, dims {dims:?}: equal under {equal_count} of {} injective filtrations",
                    colors.label(),
                    family.len()
                ),
            )
        }
        Check::DegreeShape(side, shape) => {
            let table: Vec<(Vec<f64>, f64)> = shape.table.iter().map(|&(d, v)| (vec![d as f64], v)).collect();
            let f = FiltrationSpec::tabulated(table)?;
            let mut holds = true;
            let mut seen = Vec::new();
            for g in side.pick(g1, g2) {
                let d0 = persist::diagram0(g, &persist::filtration_values(&ColorAssignment::degrees(g), &f)?)?;
                let pairs = as_pairs(&d0);
                holds &= same_pairs(&pairs, &shape.pairs);
                seen.push(shape_string(&pairs, &shape.names));
            }
            Outcome::of(
                holds,
                format!("expected {}; measured {}", shape_string(&shape.pairs, &shape.names), seen.join(" / ")),
            )
        }
        Check::Wl1Distinguishes => {
            let (k1, k2) = (ColorAssignment::constant(g1.n()), ColorAssignment::constant(g2.n()));
            let d = wl::wl1_distinguish(g1, &k1, g2, &k2);
            Outcome::of(d, format!("1-WL histograms differ: {d}"))
        }
        Check::KfwlDistinguishes(k) => {
            let d = wl::kfwl_distinguish(g1, g2, *k)?;
            Outcome::of(d, format!("{k}-FWL histograms differ: {d}"))
        }
        Check::PipeSeparates(cfg) | Check::LspeSeparates(cfg) => {
            let cfg = PiPEConfig { seed, ..cfg.clone() };
            let gaps = embedding_gaps(g1, g2, &cfg, matches!(check, Check::LspeSeparates(_)))?;
            Outcome {
                holds: separation(&gaps),
                measured: fmt_gaps(&gaps),
            }
        }
        Check::CycleSearchReturnsPair => {
            let found = reconstruct::cycle_pair()?;
            let mut hit = [false; 2];
            for f in &found {
                for (slot, g) in hit.iter_mut().zip([g1, g2]) {
                    *slot |= are_isomorphic(f, g)?;
                }
            }
            let holds = found.len() == 2 && hit.iter().all(|&h| h);
            Outcome::of(holds, format!("{} classes found, matching the pair: {hit:?}", found.len()))
        }
        Check::EncodingsDetermineBirths { pairs } => encodings_determine_births(*pairs, seed)?,
        Check::FwlProjectionSeparates { pairs } => fwl_projection_separates(*pairs, seed)?,
    })
}

fn births_equal(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> bool {
    let (mut a, mut b) = (d1.births(), d2.births());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12)
}

fn encodings_determine_births(pairs: usize, seed: u64) -> Result<Outcome, HarnessError> {
    let mut s = Stream::new(seed ^ 0x1e33);
    let encodings = [
        Pe::Rw { k: 3 },
        Pe::lap_projection(3),
        Pe::Distance {
            anchors: Anchors::SelfAnchored,
            mode: DistanceMode::RwVector,
            k: 3,
        },
    ];
    let (mut unequal, mut violations) = (0usize, 0usize);
    for _ in 0..pairs {
        let n = 4 + s.below(7);
        let g1 = s.gnp(n, 0.4);
        let g2 = s.gnp(n, 0.4);
        for pe in &encodings {
            let (p1, p2) = (pe.compute(&g1)?, pe.compute(&g2)?);
            if encode::pe_multiset_equal(&p1, &p2, COMPUTED_TOL)? {
                continue;
            }
            unequal += 1;
            let (c1, c2) = (ColorAssignment::from_pe(&p1), ColorAssignment::from_pe(&p2));
            for f in filtration_family(&c1, &c2, s.next_u64()) {
                let d1 = persist::diagram0(&g1, &persist::filtration_values(&c1, &f)?)?;
                let d2 = persist::diagram0(&g2, &persist::filtration_values(&c2, &f)?)?;
                if births_equal(&d1, &d2) {
                    violations += 1;
                }
            }
        }
    }
    Ok(Outcome::of(
        violations == 0 && unequal > 0,
        format!("{unequal} (pair, encoding) cases with unequal encodings; {violations} with equal births"),
    ))
}

/// Seeded pairs for the k-FWL projection check: random same-size pairs plus
/// a few 1-WL-equivalent regular pairs.
pub fn fwl_corpus(pairs: usize, seed: u64) -> Vec<(Graph, Graph)> {
    let mut s = Stream::new(seed ^ 0x44);
    let mut out: Vec<(Graph, Graph)> = (0..pairs)
        .map(|_| {
            let n = 5 + s.below(4);
            let p = 0.3 + 0.2 * s.unit();
            (s.gnp(n, p), s.gnp(n, p))
        })
        .collect();
    let c3 = cycle(3);
    let c4 = cycle(4);
    out.push((cycle(6), disjoint_union(&[c3.clone(), c3]).expect("union")));
    out.push((cycle(8), disjoint_union(&[c4.clone(), c4]).expect("union")));
    if let Ok(pair) = reconstruct::cached_pair(reconstruct::COSPECTRAL_K, reconstruct::COSPECTRAL_K_PRIME) {
        out.push(pair);
    }
    out
}

fn fwl_projection_separates(pairs: usize, seed: u64) -> Result<Outcome, HarnessError> {
    let corpus = fwl_corpus(pairs, seed);
    let (mut distinguished, mut failures) = (0usize, 0usize);
    for (g1, g2) in &corpus {
        let tc = wl::kfwl_joint(&[g1, g2], 2, &KfwlBudget::default())?;
        if tc[0].histogram() == tc[1].histogram() {
            continue;
        }
        distinguished += 1;
        let x1 = wl::kfwl_node_projection(g1, &tc[0]);
        let x2 = wl::kfwl_node_projection(g2, &tc[1]);
        let separating = persist::is_color_separating(g1, &x1, g2, &x2, &[]);
        let f = FiltrationSpec::injective_rank(&[&x1, &x2]);
        let d1 = persist::diagram0(g1, &persist::filtration_values(&x1, &f)?)?;
        let d2 = persist::diagram0(g2, &persist::filtration_values(&x2, &f)?)?;
        if !separating || persist::diagrams_equal(&d1, &d2, COMPUTED_TOL)? {
            failures += 1;
        }
    }
    Ok(Outcome::of(
        failures == 0,
        format!(
            "{distinguished} of {} pairs 2-FWL-distinguished; {failures} not separated by the empty set or by dim-0 diagrams",
            corpus.len()
        ),
    ))
}
