//! Choosing a non-overlapping subset of matches.

use std::fmt;

use thiserror::Error;

use crate::corpus::Corpus;
use crate::matcher::Match;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    /// Overlaps the accepted match for this rule.
    Overlap { with: String },
    Disabled,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Overlap { with } => write!(f, "overlaps a match of '{with}'"),
            RejectReason::Disabled => f.write_str("rule is disabled"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ApplicationPlan {
    /// Accepted matches, in the order they were accepted.
    pub selected: Vec<Match>,
    pub rejected: Vec<(Match, RejectReason)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("match refers to rule '{0}', which is not in the corpus")]
    UnknownRule(String),
}

/// Greedy selection: highest average speedup first, then rule id, then
/// earliest window. A match is accepted unless it overlaps one already
/// accepted.
pub fn schedule(matches: &[Match], corpus: &Corpus) -> Result<ApplicationPlan, ScheduleError> {
    let mut keyed = Vec::with_capacity(matches.len());
    for m in matches {
        let rule = corpus.get(&m.rule_id).ok_or_else(|| ScheduleError::UnknownRule(m.rule_id.clone()))?;
        keyed.push((rule.meta.priority(), rule.meta.enabled, m));
    }
    keyed.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| a.2.rule_id.cmp(&b.2.rule_id))
            .then_with(|| a.2.stmt_range.start.cmp(&b.2.stmt_range.start))
            .then_with(|| a.2.context.cmp(&b.2.context))
            .then_with(|| a.2.stmt_range.end.cmp(&b.2.stmt_range.end))
    });

    let mut plan = ApplicationPlan::default();
    for (_, enabled, m) in keyed {
        if !enabled {
            plan.rejected.push((m.clone(), RejectReason::Disabled));
        } else if let Some(hit) = plan.selected.iter().find(|s| s.overlaps(m)) {
            let with = hit.rule_id.clone();
            plan.rejected.push((m.clone(), RejectReason::Overlap { with }));
        } else {
            plan.selected.push(m.clone());
        }
    }
    Ok(plan)
}

#[cfg(test)]
mod tests;
