//! Input formats and serialization helpers.
//!
//! Text format, one directive per line:
//!
//! ```text
//! # comment
//! vars x y z
//! eq: x^2 + y^2 + z^2 - 1
//! gt: z
//! ```
//!
//! JSON format: `{"vars": [...], "equations": [...], "inequalities": [...]}`
//! with expressions as strings; `inequalities` may be omitted.

use crate::poly::{parse_polynomial_at, ParseError, Polynomial, Vars, C64};
use crate::reduce::{SemiAlgebraicInput, RESERVED_PREFIX};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid JSON input: {0}")]
    Json(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// Serializes complex vectors as `[[re, im], ...]`.
pub fn ser_cvec<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonInput {
    vars: Vec<String>,
    equations: Vec<String>,
    #[serde(default)]
    inequalities: Vec<String>,
}

fn check_names(names: &[String], line: usize) -> Result<(), InputError> {
    for (k, name) in names.iter().enumerate() {
        let ok = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(InputError::Format { line, msg: format!("invalid variable name `{name}`") });
        }
        if name.starts_with(RESERVED_PREFIX) {
            return Err(InputError::Format { line, msg: format!("variable names starting with `{RESERVED_PREFIX}` are reserved") });
        }
        if names[..k].contains(name) {
            return Err(InputError::Format { line, msg: format!("variable `{name}` declared twice") });
        }
    }
    if names.is_empty() {
        return Err(InputError::Format { line, msg: "no variables declared".into() });
    }
    Ok(())
}

/// Parses the text or JSON format; JSON is recognized by a leading `{`.
pub fn parse_input_str(src: &str) -> Result<SemiAlgebraicInput, InputError> {
    if src.trim_start().starts_with('{') {
        parse_json(src)
    } else {
        parse_text(src)
    }
}

pub fn parse_input(path: &Path) -> Result<SemiAlgebraicInput, InputError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| InputError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    parse_input_str(&src)
}

fn parse_json(src: &str) -> Result<SemiAlgebraicInput, InputError> {
    let j: JsonInput = serde_json::from_str(src).map_err(|e| InputError::Json(e.to_string()))?;
    check_names(&j.vars, 1)?;
    let vars = Vars::new(&j.vars);
    // positions refer to the index in the list, reported as the line number
    let parse_all = |list: &[String]| {
        list.iter()
            .enumerate()
            .map(|(k, e)| parse_polynomial_at(e, &vars, k + 1, 1))
            .collect::<Result<Vec<_>, _>>()
    };
    let equations = parse_all(&j.equations)?;
    let inequalities = parse_all(&j.inequalities)?;
    Ok(SemiAlgebraicInput { vars, equations, inequalities })
}

fn parse_text(src: &str) -> Result<SemiAlgebraicInput, InputError> {
    let mut vars: Option<Vars> = None;
    let mut equations = Vec::new();
    let mut inequalities = Vec::new();
    for (k, raw) in src.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let lead = content.len() - trimmed.len();
        if let Some(rest) = trimmed.strip_prefix("vars") {
            if !rest.is_empty() && !rest.starts_with([' ', '\t', ':']) {
                return Err(InputError::Format { line, msg: format!("unknown directive `{}`", trimmed.trim()) });
            }
            if vars.is_some() {
                return Err(InputError::Format { line, msg: "`vars` given twice".into() });
            }
            let names: Vec<String> = rest
                .trim_start_matches(':')
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            check_names(&names, line)?;
            vars = Some(Vars::new(names));
            continue;
        }
        let (target, rest, skip) = if let Some(r) = trimmed.strip_prefix("eq:") {
            (&mut equations, r, 3)
        } else if let Some(r) = trimmed.strip_prefix("gt:") {
            (&mut inequalities, r, 3)
        } else {
            return Err(InputError::Format { line, msg: format!("unknown directive `{}`", trimmed.trim()) });
        };
        let Some(v) = vars.as_ref() else {
            return Err(InputError::Format { line, msg: "`vars` must come before equations".into() });
        };
        target.push(parse_polynomial_at(rest, v, line, lead + skip + 1)?);
    }
    let Some(vars) = vars else {
        return Err(InputError::Format { line: 1, msg: "missing `vars` line".into() });
    };
    Ok(SemiAlgebraicInput { vars, equations, inequalities })
}

/// Text form accepted by [`parse_input_str`].
pub fn serialize(input: &SemiAlgebraicInput) -> String {
    let mut out = format!("vars {}\n", input.vars.names().join(" "));
    for e in &input.equations {
        out.push_str(&format!("eq: {e}\n"));
    }
    for q in &input.inequalities {
        out.push_str(&format!("gt: {q}\n"));
    }
    out
}

/// JSON form accepted by [`parse_input_str`].
pub fn serialize_json(input: &SemiAlgebraicInput) -> String {
    let show = |ps: &[Polynomial]| ps.iter().map(|p| p.to_string()).collect();
    let j = JsonInput {
        vars: input.vars.names().to_vec(),
        equations: show(&input.equations),
        inequalities: show(&input.inequalities),
    };
    serde_json::to_string_pretty(&j).expect("plain strings serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_text() {
        let s = parse_input_str("vars x y\neq: x^2+y^2-1").unwrap();
        assert_eq!(s.vars.names(), ["x", "y"]);
        assert_eq!(s.equations.len(), 1);
        assert!(s.inequalities.is_empty());
    }

    #[test]
    fn lips_and_inequality() {
        let s = parse_input_str("# lips\nvars x y\n\neq: y^2-(x^3-x^2)^2\n").unwrap();
        assert_eq!(s.equations[0].total_degree(), 6);
        let s = parse_input_str("vars x y\neq: x\ngt: y").unwrap();
        assert_eq!(s.inequalities.len(), 1);
        let lifted = crate::reduce::lift_inequalities(&s).unwrap();
        assert_eq!(lifted.nvars(), 3);
    }

    #[test]
    fn json_matches_text() {
        let a = parse_input_str(r#"{"vars": ["x", "y"], "equations": ["x^2+y^2-1"], "inequalities": ["y"]}"#).unwrap();
        let b = parse_input_str("vars x, y\neq: x^2+y^2-1\ngt: y").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_input_str("vars x y\neq: x^2 + q") {
            Err(InputError::Parse(e)) => {
                assert_eq!(e.line, 2);
                assert_eq!(e.col, 11, "{e}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_input_str("eq: x"), Err(InputError::Format { line: 1, .. })));
        assert!(matches!(parse_input_str("vars x\nle: x"), Err(InputError::Format { line: 2, .. })));
        assert!(matches!(parse_input_str("vars _z"), Err(InputError::Format { .. })));
        assert!(matches!(parse_input_str("{\"vars\": [\"x\"]}"), Err(InputError::Json(_))));
    }

    #[test]
    fn round_trip() {
        let src = "vars x y z\neq: x^2 - y^2*z\neq: 0.25*x + (1+2*I)*y^3 - 1e-7\ngt: z + 1/3\n";
        let a = parse_input_str(src).unwrap();
        assert_eq!(parse_input_str(&serialize(&a)).unwrap(), a);
        assert_eq!(parse_input_str(&serialize_json(&a)).unwrap(), a);
    }
}
