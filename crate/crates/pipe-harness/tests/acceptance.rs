//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.
//!
//! `PIPE_PAIR_CORPUS` names an optional graph6 file of consecutive pairs used
//! by criteria 8 and 9.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pipe_core::encode::{pe_multiset_equal, rw_pe};
use pipe_core::graphcore::{betti, cycle, disjoint_union, parse_graph6, permute, write_graph6};
use pipe_core::persist::{self, ColorAssignment};
use pipe_core::pipe::{grad_check, init_params, output_gap, pipe_forward, BasePe, NodeInput, PiPEConfig};
use pipe_core::rng::Stream;
use pipe_core::wl;
use pipe_core::Graph;
use pipe_harness::pair_suite::{builtin_corpus, pair_suite, pairs_from_graph6, Method};
use pipe_harness::report::Verdict;
use pipe_harness::reproduce::{reproduce, reproduce_report};

type Outcome = (bool, String);

fn claims_pass(id: &str, claims: &[&str]) -> Outcome {
    let entries = reproduce(id, 1, 0).expect("registered id");
    let mut ok = true;
    let mut notes = Vec::new();
    for c in claims {
        let e = entries.iter().find(|e| e.claim == *c).expect("registered claim");
        if e.verdict != Verdict::Pass {
            ok = false;
            notes.push(format!("{id}/{c}: {}", e.measured));
        }
    }
    (ok, notes.join("; "))
}

fn criterion1() -> Outcome {
    let t = Instant::now();
    let report = reproduce_report(&["all"], 1, 0).expect("registry builds");
    let elapsed = t.elapsed();
    let failed: Vec<String> = report.failures().map(|e| format!("{}/{}", e.construction, e.claim)).collect();
    let fast = elapsed < Duration::from_secs(60);
    (
        failed.is_empty() && fast,
        format!("{} claims in {elapsed:.2?}; failing: [{}]", report.entries.len(), failed.join(", ")),
    )
}

fn criterion2() -> Outcome {
    let c5 = cycle(5);
    let a = rw_pe(&cycle(10), 4).unwrap();
    let b = rw_pe(&disjoint_union(&[c5.clone(), c5]).unwrap(), 4).unwrap();
    let exact = a.rows.iter().all(|r| r.iter().map(|x| x * 16.0).collect::<Vec<_>>() == [0.0, 8.0, 0.0, 6.0])
        && a.rows.iter().all(|r| r == &[0.0, 0.5, 0.0, 0.375]);
    let rounded = a.rows.iter().all(|r| r.iter().zip([0.0, 0.50, 0.0, 0.37]).all(|(x, p)| (x - p).abs() <= 0.02));
    let same = pe_multiset_equal(&a, &b, 0.0).unwrap();
    (exact && rounded && same, format!("exact x16 {exact}, rounded table {rounded}, C5uC5 equal at tol 0 {same}"))
}

fn criterion3() -> Outcome {
    claims_pass("prop36", &["shape_alpha_first", "shape_gamma_first", "degree_diagrams_equal", "lap_diagrams_differ"])
}

/// Finite dim-0 deaths by brute force: at each threshold, deaths equal the
/// components entering the level minus the components leaving it.
fn sweep_deaths(g: &Graph, values: &[f64]) -> BTreeMap<u64, usize> {
    let mut levels: Vec<f64> = values.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut out = BTreeMap::new();
    let mut before = 0;
    for &t in &levels {
        let keep: Vec<bool> = values.iter().map(|&v| v <= t).collect();
        let (h, _) = g.induced_subgraph(&keep);
        let now = h.components().len();
        let born = values.iter().filter(|&&v| v == t).count();
        let deaths = before + born - now;
        if deaths > 0 {
            out.insert(t.to_bits(), deaths);
        }
        before = now;
    }
    out
}

fn criterion4() -> Outcome {
    let mut s = Stream::new(4);
    let mut failures = 0;
    for _ in 0..500 {
        let n = 1 + s.below(12);
        let g = s.gnp(n, 0.3);
        let values: Vec<f64> = (0..n).map(|_| s.below(5) as f64 / 4.0).collect();
        let (d0, d1) = persist::diagrams(&g, &values).unwrap();
        let b = betti(&g);
        let mut deaths = BTreeMap::new();
        for t in &d0.tuples {
            if let Some(d) = t.death.finite() {
                *deaths.entry(d.to_bits()).or_insert(0) += 1;
            }
        }
        let ok = d0.infinite_count() == b.beta0
            && d1.infinite_count() == b.beta1
            && b.beta1 + n == g.edge_count() + b.beta0
            && deaths == sweep_deaths(&g, &values);
        failures += usize::from(!ok);
    }
    (failures == 0, format!("{failures} failures over 500 graphs"))
}

fn criterion5() -> Outcome {
    let (c6, c3) = (cycle(6), cycle(3));
    let two = disjoint_union(&[c3.clone(), c3]).unwrap();
    let fwl = wl::kfwl_distinguish(&c6, &two, 2).unwrap();
    let k = ColorAssignment::constant(6);
    let wl1 = wl::wl1_distinguish(&c6, &k, &two, &k);
    let (corpus, note) = claims_pass("prop44", &["projection_separates"]);
    (fwl && !wl1 && corpus, format!("2-FWL {fwl}, 1-WL {wl1}; corpus ok {corpus} {note}"))
}

fn criterion6() -> Outcome {
    let mut s = Stream::new(6);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let g = s.gnp(8, 0.4);
        let cfg = PiPEConfig {
            layers: 2,
            seed: i,
            ..PiPEConfig::default()
        };
        worst = worst.max(grad_check(&g, &cfg, i, 1e-5).unwrap().max_rel_err);
    }
    (worst <= 1e-4, format!("max relative error {worst:.3e}"))
}

fn criterion7() -> Outcome {
    let mut s = Stream::new(7);
    let bases = [
        BasePe::Rw,
        BasePe::Lap {
            policy: pipe_core::encode::Policy::EigenspaceProjection,
            skip_trivial: false,
        },
        BasePe::Distance,
    ];
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let n = 5 + s.below(8);
        let g = s.gnp(n, 0.3);
        let cfg = PiPEConfig {
            base_pe: bases[i % 3],
            base_k: 3,
            seed: i as u64,
            ..PiPEConfig::default()
        };
        let params = init_params(&cfg).unwrap();
        let a = pipe_forward(&g, NodeInput::Constant, &params).unwrap();
        for _ in 0..20 {
            let h = permute(&g, &s.permutation(n)).unwrap();
            worst = worst.max(output_gap(&a, &pipe_forward(&h, NodeInput::Constant, &params).unwrap()));
        }
    }
    (worst <= 1e-9, format!("max output gap {worst:.3e}"))
}

fn criterion8(user: Option<&str>) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut corpora = vec![("builtin", builtin_corpus(0).unwrap())];
    if let Some(text) = user {
        match pairs_from_graph6(text) {
            Ok(p) => corpora.push(("user", p)),
            Err(e) => {
                ok = false;
                notes.push(format!("user corpus: {e}"));
            }
        }
    }
    for (name, pairs) in corpora {
        let r = pair_suite(&pairs, &Method::ALL, 0).unwrap();
        let fr: Vec<String> = (0..3).map(|m| format!("{}={:.3}", r.methods[m], r.fraction(m))).collect();
        ok &= r.monotone();
        notes.push(format!("{name}: nested {} ({})", r.monotone(), fr.join(" ")));
    }
    for id in ["prop41", "prop42"] {
        let (pass, note) = claims_pass(id, &["pipe_separates", "lspe_equal"]);
        ok &= pass;
        if !note.is_empty() {
            notes.push(note);
        }
    }
    (ok, notes.join("; "))
}

fn criterion9(user: Option<&str>) -> Outcome {
    let mut s = Stream::new(9);
    let mut failures = 0;
    for i in 0..1000 {
        let n = if i % 100 == 0 { 63 + s.below(40) } else { s.below(20) };
        let p = s.unit();
        let g = s.gnp(n, p);
        let line = write_graph6(&g);
        let back = parse_graph6(&line).unwrap();
        failures += usize::from(back.edges() != g.edges() || back.n() != n || write_graph6(&back) != line);
    }
    let mut note = format!("{failures} failures over 1000 random graphs");
    if let Some(text) = user {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let bad = lines
            .iter()
            .filter(|l| parse_graph6(l).map_or(true, |g| write_graph6(&g) != l.trim_end()))
            .count();
        failures += bad;
        note.push_str(&format!("; user corpus {bad} of {} lines differ", lines.len()));
    }
    (failures == 0, note)
}

fn main() -> ExitCode {
    let user = std::env::var("PIPE_PAIR_CORPUS")
        .ok()
        .map(|p| std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("reading {p}: {e}")));
    let user = user.as_deref();
    type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Criterion)> = vec![
        ("proposition suite", Box::new(criterion1)),
        ("exact cycle RW rows", Box::new(criterion2)),
        ("degree-pair diagram shapes", Box::new(criterion3)),
        ("Betti and sweep oracle", Box::new(criterion4)),
        ("WL cross-validation", Box::new(criterion5)),
        ("gradient check", Box::new(criterion6)),
        ("permutation invariance", Box::new(criterion7)),
        ("expressivity ordering", Box::new(move || criterion8(user))),
        ("graph6 round trip", Box::new(move || criterion9(user))),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, note) = run();
        all &= ok;
        println!("{} criterion {} ({name}): {note}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
