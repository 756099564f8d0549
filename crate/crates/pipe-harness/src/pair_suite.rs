//! Pairwise distinguishability of graph pairs by persistence-based methods.

use std::fmt;
use std::str::FromStr;

use pipe_core::encode::Policy;
use pipe_core::graphcore::{cycle, disjoint_union, parse_graph6_file, permute};
use pipe_core::persist::{ColorAssignment, FiltrationSpec};
use pipe_core::pipe::{BasePe, PiPEConfig};
use pipe_core::rng::Stream;
use pipe_core::Graph;

use crate::checks::{self, diagrams_agree, Pe};
use crate::registry;
use crate::report::{Entry, Report, Verdict};
use crate::HarnessError;

/// Ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Diagrams under degree colours.
    PhOnly,
    /// Diagrams under degree colours and under LapPE colours.
    PhLpe,
    /// Seeded PiPE embeddings.
    Pipe,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::PhOnly, Method::PhLpe, Method::Pipe];

    pub fn name(self) -> &'static str {
        match self {
            Method::PhOnly => "ph_only",
            Method::PhLpe => "ph_lpe",
            Method::Pipe => "pipe",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ph" | "ph_only" => Ok(Method::PhOnly),
            "ph_lpe" => Ok(Method::PhLpe),
            "pipe" => Ok(Method::Pipe),
            other => Err(HarnessError::UnknownMethod(other.to_string())),
        }
    }
}

/// Parses a comma-separated method list, sorted and deduplicated.
pub fn parse_methods(list: &str) -> Result<Vec<Method>, HarnessError> {
    let mut out = list
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<Vec<Method>, _>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairVerdict {
    Distinguished,
    Equal,
    Inconclusive,
}

impl fmt::Display for PairVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairVerdict::Distinguished => "distinguished",
            PairVerdict::Equal => "equal",
            PairVerdict::Inconclusive => "inconclusive",
        })
    }
}

fn ph_differs(g1: &Graph, c1: &ColorAssignment, g2: &Graph, c2: &ColorAssignment) -> Result<bool, HarnessError> {
    let f = FiltrationSpec::injective_rank(&[c1, c2]);
    Ok(diagrams_agree(g1, c1, g2, c2, &f, &[0, 1])?.contains(&false))
}

fn lap_k(g1: &Graph, g2: &Graph) -> usize {
    3.min(g1.n()).min(g2.n()).max(1)
}

fn decided(d: bool) -> PairVerdict {
    if d {
        PairVerdict::Distinguished
    } else {
        PairVerdict::Equal
    }
}

/// Verdict of `method` on one pair.
pub fn distinguish(method: Method, g1: &Graph, g2: &Graph, seed: u64) -> Result<PairVerdict, HarnessError> {
    let degree = |g: &Graph| ColorAssignment::degrees(g);
    Ok(match method {
        Method::PhOnly => decided(ph_differs(g1, &degree(g1), g2, &degree(g2))?),
        Method::PhLpe => {
            if ph_differs(g1, &degree(g1), g2, &degree(g2))? {
                PairVerdict::Distinguished
            } else {
                let pe = Pe::lap_projection(lap_k(g1, g2));
                let (c1, c2) = (
                    ColorAssignment::from_pe(&pe.compute(g1)?),
                    ColorAssignment::from_pe(&pe.compute(g2)?),
                );
                decided(ph_differs(g1, &c1, g2, &c2)?)
            }
        }
        Method::Pipe => {
            let cfg = PiPEConfig {
                base_pe: BasePe::Lap {
                    policy: Policy::EigenspaceProjection,
                    skip_trivial: false,
                },
                base_k: lap_k(g1, g2),
                seed,
                ..PiPEConfig::default()
            };
            match checks::separation(&checks::embedding_gaps(g1, g2, &cfg, false)?) {
                Some(d) => decided(d),
                None => PairVerdict::Inconclusive,
            }
        }
    })
}

#[derive(Debug, Clone)]
pub struct LabeledPair {
    pub label: String,
    pub g1: Graph,
    pub g2: Graph,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub methods: Vec<Method>,
    pub labels: Vec<String>,
    /// `verdicts[i][m]` for pair `i` and `methods[m]`.
    pub verdicts: Vec<Vec<PairVerdict>>,
    pub seed: u64,
}

impl SuiteResult {
    pub fn fraction(&self, m: usize) -> f64 {
        if self.verdicts.is_empty() {
            return 0.0;
        }
        let hits = self
            .verdicts
            .iter()
            .filter(|v| v[m] == PairVerdict::Distinguished)
            .count();
        hits as f64 / self.verdicts.len() as f64
    }

    /// Pairs distinguished by a weaker selected method but not by the next
    /// stronger one, as `(pair index, weaker, stronger)`.
    pub fn containment_violations(&self) -> Vec<(usize, Method, Method)> {
        let mut out = Vec::new();
        for (i, v) in self.verdicts.iter().enumerate() {
            for m in 1..self.methods.len() {
                if v[m - 1] == PairVerdict::Distinguished && v[m] != PairVerdict::Distinguished {
                    out.push((i, self.methods[m - 1], self.methods[m]));
                }
            }
        }
        out
    }

    pub fn monotone(&self) -> bool {
        self.containment_violations().is_empty()
    }

    /// One info entry per pair and method, one per method fraction, and a
    /// pass/fail entry for containment.
    pub fn to_report(&self) -> Report {
        let mut r = Report::new(self.seed);
        for (label, v) in self.labels.iter().zip(&self.verdicts) {
            for (m, verdict) in self.methods.iter().zip(v) {
                r.entries.push(Entry {
                    construction: label.clone(),
                    claim: m.name().to_string(),
                    statement: format!("{m} distinguishes the pair"),
                    verdict: Verdict::Info,
                    measured: verdict.to_string(),
                });
            }
        }
        for (i, m) in self.methods.iter().enumerate() {
            r.entries.push(Entry {
                construction: "summary".to_string(),
                claim: format!("fraction_{m}"),
                statement: format!("fraction of pairs distinguished by {m}"),
                verdict: Verdict::Info,
                measured: format!("{:.4}", self.fraction(i)),
            });
        }
        let bad = self.containment_violations();
        let names: Vec<&str> = self.methods.iter().map(|m| m.name()).collect();
        r.entries.push(Entry {
            construction: "summary".to_string(),
            claim: "monotone".to_string(),
            statement: format!("distinguished sets are nested: {}", names.join(" <= ")),
            verdict: if bad.is_empty() { Verdict::Pass } else { Verdict::Fail },
            measured: if bad.is_empty() {
                "no violations".to_string()
            } else {
                let shown: Vec<String> = bad
                    .iter()
                    .map(|(i, a, b)| format!("{}: {a} but not {b}", self.labels[*i]))
                    .collect();
                format!("{} violations; {}", bad.len(), shown.join("; "))
            },
        });
        r
    }
}

/// Evaluates every selected method on every pair.
pub fn pair_suite(pairs: &[LabeledPair], methods: &[Method], seed: u64) -> Result<SuiteResult, HarnessError> {
    let mut methods = methods.to_vec();
    methods.sort_unstable();
    methods.dedup();
    let verdicts = pairs
        .iter()
        .map(|p| methods.iter().map(|&m| distinguish(m, &p.g1, &p.g2, seed)).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    Ok(SuiteResult {
        methods,
        labels: pairs.iter().map(|p| p.label.clone()).collect(),
        verdicts,
        seed,
    })
}

/// Consecutive graph6 lines as pairs, labelled by line index.
pub fn pairs_from_graph6(text: &str) -> Result<Vec<LabeledPair>, HarnessError> {
    let graphs = parse_graph6_file(text)?;
    if graphs.len() % 2 == 1 {
        return Err(HarnessError::OddLineCount(graphs.len()));
    }
    Ok(graphs
        .chunks(2)
        .enumerate()
        .map(|(i, c)| LabeledPair {
            label: format!("pair{i}"),
            g1: c[0].clone(),
            g2: c[1].clone(),
        })
        .collect())
}

/// Registry pairs at scale 1, seeded random pairs, relabelled copies and a
/// few 1-WL-equivalent regular pairs.
pub fn builtin_corpus(seed: u64) -> Result<Vec<LabeledPair>, HarnessError> {
    let mut out = Vec::new();
    for id in registry::IDS {
        let c = registry::construction(id, 1)?;
        out.push(LabeledPair {
            label: (*id).to_string(),
            g1: c.g1,
            g2: c.g2,
        });
    }
    let mut s = Stream::new(seed ^ 0xb7ec);
    for i in 0..20 {
        let n = 5 + s.below(6);
        let (g1, g2) = (s.gnp(n, 0.35), s.gnp(n, 0.35));
        out.push(LabeledPair {
            label: format!("random{i}"),
            g1,
            g2,
        });
    }
    for i in 0..10 {
        let n = 4 + s.below(7);
        let g = s.gnp(n, 0.4);
        let p = permute(&g, &s.permutation(n))?;
        out.push(LabeledPair {
            label: format!("relabelled{i}"),
            g1: g,
            g2: p,
        });
    }
    let c3 = cycle(3);
    let c4 = cycle(4);
    out.push(LabeledPair {
        label: "c6_vs_2c3".to_string(),
        g1: cycle(6),
        g2: disjoint_union(&[c3.clone(), c3])?,
    });
    out.push(LabeledPair {
        label: "c8_vs_2c4".to_string(),
        g1: cycle(8),
        g2: disjoint_union(&[c4.clone(), c4])?,
    });
    Ok(out)
}
