//! Random subject code for property tests.
//!
//! Shared by the unit tests (through `#[path]`) and the integration tests.

#![allow(dead_code)]

use proptest::prelude::*;

pub fn name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["df", "a", "b", "x", "col", "pd", "np", "s"]).prop_map(String::from)
}

pub fn attr() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["drop", "pop", "loc", "iloc", "sum", "columns", "shape", "values", "plot", "bar"])
        .prop_map(String::from)
}

pub fn constant() -> impl Strategy<Value = String> {
    prop_oneof![
        (0u64..20).prop_map(|i| i.to_string()),
        prop::sample::select(vec!["'a'", "'Date'", "\"b c\"", "''", "1.5", "0.25", "True", "False", "None", "1e309", "12345678901234567890123"])
            .prop_map(String::from),
        Just("'x\\ny'".to_string()),
    ]
}

fn slice_part() -> impl Strategy<Value = String> {
    prop_oneof![Just(String::new()), (0u8..4).prop_map(|i| i.to_string()), name()]
}

pub fn slice() -> impl Strategy<Value = String> {
    (slice_part(), slice_part(), prop::option::of(slice_part()))
        .prop_map(|(a, b, c)| match c {
            None => format!("{a}:{b}"),
            Some(c) => format!("{a}:{b}:{c}"),
        })
}

/// Parenthesizes anything but a bare name or keyword constant.
pub fn p(e: &str) -> String {
    if !e.is_empty() && e.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !e.starts_with(|c: char| c.is_ascii_digit()) {
        e.to_string()
    } else {
        format!("({e})")
    }
}

/// Expressions over a small pandas-flavoured vocabulary.
pub fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![3 => name(), 2 => constant()];
    leaf.prop_recursive(4, 48, 4, |inner| {
        prop_oneof![
            (inner.clone(), attr()).prop_map(|(e, a)| format!("{}.{a}", p(&e))),
            (inner.clone(), prop::collection::vec(inner.clone(), 0..3), prop::option::of((name(), inner.clone())))
                .prop_map(|(f, args, kw)| {
                    let mut parts = args;
                    if let Some((k, v)) = kw {
                        parts.push(format!("{k}={v}"));
                    }
                    format!("{}({})", p(&f), parts.join(", "))
                }),
            (inner.clone(), inner.clone()).prop_map(|(e, i)| format!("{}[{}]", p(&e), p(&i))),
            (inner.clone(), slice()).prop_map(|(e, s)| format!("{}[{s}]", p(&e))),
            (inner.clone(), slice(), inner.clone()).prop_map(|(e, s, i)| format!("{}[{s}, {}]", p(&e), p(&i))),
            (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/", "//", "%", "**", "&", "|", "^", "<<", "@"]), inner.clone())
                .prop_map(|(a, op, b)| format!("{} {op} {}", p(&a), p(&b))),
            (inner.clone(), prop::sample::select(vec!["==", "<", ">=", "!=", "in", "not in", "is", "is not"]), inner.clone())
                .prop_map(|(a, op, b)| format!("{} {op} {}", p(&a), p(&b))),
            (inner.clone(), prop::sample::select(vec!["and", "or"]), inner.clone())
                .prop_map(|(a, op, b)| format!("{} {op} {}", p(&a), p(&b))),
            (prop::sample::select(vec!["-", "+", "~", "not "]), inner.clone()).prop_map(|(op, e)| format!("{op}{}", p(&e))),
            prop::collection::vec(inner.clone(), 0..3).prop_map(|v| format!("[{}]", v.join(", "))),
            prop::collection::vec(inner.clone(), 0..3).prop_map(|v| match v.len() {
                1 => format!("({},)", v[0]),
                _ => format!("({})", v.join(", ")),
            }),
            prop::collection::vec((inner.clone(), inner.clone()), 0..3)
                .prop_map(|v| format!("{{{}}}", v.iter().map(|(k, x)| format!("{}: {}", p(k), p(x))).collect::<Vec<_>>().join(", "))),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(a, b, c)| format!("{} if {} else {}", p(&a), p(&b), p(&c))),
            (inner.clone(), name(), inner.clone()).prop_map(|(e, v, it)| format!("[{} for {v} in {}]", p(&e), p(&it))),
            (name(), inner.clone()).prop_map(|(v, e)| format!("(lambda {v}: {e})")),
            inner.clone().prop_map(|e| format!("({e})")),
        ]
    })
}

pub fn simple_stmt() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => (name(), expr()).prop_map(|(t, e)| format!("{t} = {e}")),
        2 => expr(),
        1 => (name(), attr(), expr()).prop_map(|(t, a, e)| format!("{t}.{a} = {e}")),
        1 => (name(), expr(), expr()).prop_map(|(t, i, e)| format!("{t}[{}] = {e}", p(&i))),
        1 => (name(), expr()).prop_map(|(t, e)| format!("{t} += {e}")),
        1 => (name(), name(), expr()).prop_map(|(a, b, e)| format!("{a}, {b} = {e}")),
        1 => Just("pass".to_string()),
        1 => name().prop_map(|n| format!("del {n}")),
    ]
}

fn indent(body: &[String]) -> String {
    body.iter().flat_map(|s| s.lines()).map(|l| format!("    {l}\n")).collect()
}

/// A statement, possibly a compound one with nested bodies.
pub fn stmt() -> impl Strategy<Value = String> {
    simple_stmt().prop_recursive(2, 12, 3, |inner| {
        let body = prop::collection::vec(inner.clone(), 1..3);
        prop_oneof![
            (expr(), body.clone(), prop::option::of(body.clone())).prop_map(|(t, b, e)| {
                let mut s = format!("if {}:\n{}", p(&t), indent(&b));
                if let Some(e) = e {
                    s.push_str(&format!("else:\n{}", indent(&e)));
                }
                s.trim_end().to_string()
            }),
            (name(), expr(), body.clone()).prop_map(|(v, it, b)| format!("for {v} in {}:\n{}", p(&it), indent(&b)).trim_end().to_string()),
            (expr(), body.clone()).prop_map(|(t, b)| format!("while {}:\n{}", p(&t), indent(&b)).trim_end().to_string()),
            (expr(), name(), body.clone()).prop_map(|(c, v, b)| format!("with {} as {v}:\n{}", p(&c), indent(&b)).trim_end().to_string()),
            (name(), body).prop_map(|(f, b)| format!("def {f}(p, *q, k=1, **r):\n{}", indent(&b)).trim_end().to_string()),
        ]
    })
}

pub fn cell() -> impl Strategy<Value = String> {
    prop::collection::vec(stmt(), 0..6).prop_map(|v| {
        let mut s = v.join("\n");
        s.push('\n');
        s
    })
}
