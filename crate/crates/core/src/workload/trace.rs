use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::levels::{IndexKey, Value};

/// One step of a replayable workload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WorkloadOp {
    InsertKey { key: IndexKey, value: Value },
    InsertAfterPos { pos: usize, value: Value },
    InsertFront { value: Value },
    Append { value: Value },
    DeleteKey { key: IndexKey },
    DeletePos { pos: usize },
    QueryLength,
    Extract,
}

impl WorkloadOp {
    pub fn name(&self) -> &'static str {
        match self {
            WorkloadOp::InsertKey { .. } => "insert_key",
            WorkloadOp::InsertAfterPos { .. } => "insert_after_pos",
            WorkloadOp::InsertFront { .. } => "insert_front",
            WorkloadOp::Append { .. } => "append",
            WorkloadOp::DeleteKey { .. } => "delete_key",
            WorkloadOp::DeletePos { .. } => "delete_pos",
            WorkloadOp::QueryLength => "query",
            WorkloadOp::Extract => "extract",
        }
    }

    pub fn is_insert(&self) -> bool {
        matches!(
            self,
            WorkloadOp::InsertKey { .. }
                | WorkloadOp::InsertAfterPos { .. }
                | WorkloadOp::InsertFront { .. }
                | WorkloadOp::Append { .. }
        )
    }

    pub fn is_delete(&self) -> bool {
        matches!(self, WorkloadOp::DeleteKey { .. } | WorkloadOp::DeletePos { .. })
    }

    pub fn is_mutation(&self) -> bool {
        self.is_insert() || self.is_delete()
    }
}

/// `<opname> [p=<int>] [k=<int>] [v=<int>]`
impl fmt::Display for WorkloadOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match *self {
            WorkloadOp::InsertKey { key, value } => write!(f, " k={key} v={value}"),
            WorkloadOp::InsertAfterPos { pos, value } => write!(f, " p={pos} v={value}"),
            WorkloadOp::InsertFront { value } | WorkloadOp::Append { value } => write!(f, " v={value}"),
            WorkloadOp::DeleteKey { key } => write!(f, " k={key}"),
            WorkloadOp::DeletePos { pos } => write!(f, " p={pos}"),
            WorkloadOp::QueryLength | WorkloadOp::Extract => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl FromStr for WorkloadOp {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, String> {
        let mut words = line.split_whitespace();
        let name = words.next().ok_or("empty line")?;
        let (mut p, mut k, mut v) = (None, None, None);
        for w in words {
            let (field, raw) = w.split_once('=').ok_or_else(|| format!("malformed field `{w}`"))?;
            let slot = match field {
                "p" => &mut p,
                "k" => &mut k,
                "v" => &mut v,
                _ => return Err(format!("unknown field `{field}`")),
            };
            if slot.is_some() {
                return Err(format!("field `{field}` given twice"));
            }
            *slot = Some(raw);
        }

        let int = |field: &str, raw: Option<&str>| -> Result<i64, String> {
            let raw = raw.ok_or_else(|| format!("`{name}` requires {field}="))?;
            raw.parse::<i64>()
                .map_err(|e| format!("bad integer `{raw}` for {field}=: {e}"))
        };
        let pos = |raw: Option<&str>| -> Result<usize, String> {
            let raw = raw.ok_or_else(|| format!("`{name}` requires p="))?;
            raw.parse::<usize>()
                .map_err(|e| format!("bad position `{raw}`: {e}"))
        };
        let (needs_p, needs_k, needs_v) = match name {
            "insert_key" => (false, true, true),
            "insert_after_pos" => (true, false, true),
            "insert_front" | "append" => (false, false, true),
            "delete_key" => (false, true, false),
            "delete_pos" => (true, false, false),
            "query" | "query_length" | "extract" => (false, false, false),
            other => return Err(format!("unknown op `{other}`")),
        };
        for (given, needed, field) in [(p, needs_p, "p"), (k, needs_k, "k"), (v, needs_v, "v")] {
            if given.is_some() && !needed {
                return Err(format!("`{name}` does not take {field}="));
            }
        }

        Ok(match name {
            "insert_key" => WorkloadOp::InsertKey {
                key: int("k", k)?,
                value: int("v", v)?,
            },
            "insert_after_pos" => WorkloadOp::InsertAfterPos {
                pos: pos(p)?,
                value: int("v", v)?,
            },
            "insert_front" => WorkloadOp::InsertFront { value: int("v", v)? },
            "append" => WorkloadOp::Append { value: int("v", v)? },
            "delete_key" => WorkloadOp::DeleteKey { key: int("k", k)? },
            "delete_pos" => WorkloadOp::DeletePos { pos: pos(p)? },
            "extract" => WorkloadOp::Extract,
            _ => WorkloadOp::QueryLength,
        })
    }
}

/// Parses a trace. Blank lines and lines starting with `#` are skipped;
/// line numbers in errors are 1-based.
pub fn parse_trace(text: &str) -> Result<Vec<WorkloadOp>, ParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(n, l)| {
            l.parse().map_err(|message| ParseError {
                line: n + 1,
                message,
            })
        })
        .collect()
}

/// One op per line, newline terminated.
pub fn emit_trace(ops: &[WorkloadOp]) -> String {
    let mut out = String::with_capacity(ops.len() * 16);
    for op in ops {
        out.push_str(&op.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_examples() {
        assert_eq!("append v=5".parse(), Ok(WorkloadOp::Append { value: 5 }));
        assert_eq!(
            "insert_after_pos p=2 v=-7".parse(),
            Ok(WorkloadOp::InsertAfterPos { pos: 2, value: -7 })
        );
        assert_eq!("query".parse(), Ok(WorkloadOp::QueryLength));
        assert_eq!("query_length".parse(), Ok(WorkloadOp::QueryLength));
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_trace("append v=1\n\n# note\nappend v=x\n").unwrap_err();
        assert_eq!(err.line, 4);
        assert_eq!(parse_trace("frobnicate").unwrap_err().line, 1);
        assert!(parse_trace("append").is_err());
        assert!(parse_trace("query v=3").is_err());
        assert!(parse_trace("delete_pos p=-1").is_err());
        assert!(parse_trace("append v=1 v=2").is_err());
        assert_eq!(parse_trace("").unwrap(), vec![]);
    }

    fn arb_op() -> impl Strategy<Value = WorkloadOp> {
        prop_oneof![
            (any::<i64>(), any::<i64>()).prop_map(|(key, value)| WorkloadOp::InsertKey { key, value }),
            (any::<usize>(), any::<i64>()).prop_map(|(pos, value)| WorkloadOp::InsertAfterPos { pos, value }),
            any::<i64>().prop_map(|value| WorkloadOp::InsertFront { value }),
            any::<i64>().prop_map(|value| WorkloadOp::Append { value }),
            any::<i64>().prop_map(|key| WorkloadOp::DeleteKey { key }),
            any::<usize>().prop_map(|pos| WorkloadOp::DeletePos { pos }),
            Just(WorkloadOp::QueryLength),
            Just(WorkloadOp::Extract),
        ]
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(ops in prop::collection::vec(arb_op(), 0..64)) {
            let text = emit_trace(&ops);
            prop_assert_eq!(parse_trace(&text).unwrap(), ops);
        }
    }
}
