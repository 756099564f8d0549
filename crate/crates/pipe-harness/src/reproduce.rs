//! Evaluates registered constructions into report entries.

use std::thread;

use crate::checks;
use crate::registry::{self, Claim, Construction};
use crate::report::{Entry, Report, Verdict};
use crate::HarnessError;

fn verdict(claim: &Claim, holds: Option<bool>) -> Verdict {
    match claim.expect {
        None => Verdict::Info,
        Some(e) if holds == Some(e) => Verdict::Pass,
        Some(_) => Verdict::Fail,
    }
}

/// One entry per claim. Evaluation errors become failing entries.
pub fn evaluate(c: &Construction, seed: u64) -> Vec<Entry> {
    c.claims
        .iter()
        .map(|claim| {
            let (holds, measured) = match checks::evaluate(&claim.check, &c.g1, &c.g2, seed) {
                Ok(o) => (o.holds, o.measured),
                Err(e) => (None, format!("error: {e}")),
            };
            let measured = match (claim.expect, holds) {
                (Some(_), None) if !measured.starts_with("error") => format!("inconclusive; {measured}"),
                _ => measured,
            };
            Entry {
                construction: c.id.to_string(),
                claim: claim.id.to_string(),
                statement: claim.statement.clone(),
                verdict: verdict(claim, holds),
                measured,
            }
        })
        .collect()
}

/// Entries for construction `id` at scale `n`.
pub fn reproduce(id: &str, n: usize, seed: u64) -> Result<Vec<Entry>, HarnessError> {
    Ok(evaluate(&registry::construction(id, n)?, seed))
}

/// Report over `ids`, or every registered construction when `ids` is
/// `["all"]`. Constructions run on separate threads; entries keep registry
/// order.
pub fn reproduce_report(ids: &[&str], n: usize, seed: u64) -> Result<Report, HarnessError> {
    let ids: Vec<&str> = if ids == ["all"] { registry::IDS.to_vec() } else { ids.to_vec() };
    let built = ids
        .iter()
        .map(|id| registry::construction(id, n))
        .collect::<Result<Vec<_>, _>>()?;
    let entries: Vec<Vec<Entry>> = thread::scope(|s| {
        let handles: Vec<_> = built.iter().map(|c| s.spawn(move || evaluate(c, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("claim evaluation panicked")).collect()
    });
    let mut report = Report::new(seed);
    report.entries = entries.into_iter().flatten().collect();
    Ok(report)
}
