//! Rule-driven rewriting of pandas code.
//!
//! A rule pairs a pattern (LHS) with a replacement (RHS) and runtime
//! preconditions. [`rewrite_cell`] finds every match in a cell, lets the
//! [`scheduler`] pick a non-overlapping subset, and replaces each chosen
//! window with `if <preconditions>: <RHS> else: <original>`.

pub mod cli;
pub mod corpus;
pub mod matcher;
pub mod notebook;
pub mod rewriter;
pub mod rule;
pub mod scheduler;
pub mod syntax;

#[cfg(test)]
#[path = "../tests/common/gen.rs"]
mod gen;

pub use corpus::{load_corpus, record_hit, report, Corpus, CorpusError, HitEvent, HitLog, HitReport};
pub use matcher::{compile_pattern, find_matches, match_at, Bound, Match, Matcher, Substitution};
pub use rewriter::{apply_rule, build_guard, instantiate, rewrite_cell, Guard, RewriteError, RewrittenCell};
pub use rule::{check_rule, parse_rule_file, serialize_rule, validate_rule, Code, Diagnostic, Rule, RuleMeta, VarKind};
pub use scheduler::{schedule, ApplicationPlan, RejectReason, ScheduleError};
pub use syntax::{parse_expr, parse_source, print_source, Node, StmtList, SyntaxError};
