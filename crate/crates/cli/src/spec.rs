//! Sequence spec grammar: `family ":" key "=" value ("," key "=" value)*`.
//!
//! Families: `power-diff(x, y)`, `lucas-u(P, Q)`, `explicit(file)`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use lseq_core::seq::SequenceSpec;
use lseq_core::Nat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("invalid spec: {0}")]
    Constraint(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn syntax(position: usize, message: impl Into<String>) -> SpecError {
    SpecError::Syntax {
        position,
        message: message.into(),
    }
}

/// Parses and validates a spec. Explicit files are read here.
pub fn parse_spec(text: &str) -> Result<SequenceSpec, SpecError> {
    let colon = text
        .find(':')
        .ok_or_else(|| syntax(text.len(), "expected ':' after the family name"))?;
    let family = &text[..colon];
    let params = parse_params(text, colon + 1)?;
    match family {
        "power-diff" => {
            expect_keys(&params, &["x", "y"], colon)?;
            let x = nat_param(&params, "x")?;
            let y = nat_param(&params, "y")?;
            SequenceSpec::power_diff(x, y).map_err(|e| SpecError::Constraint(e.to_string()))
        }
        "lucas-u" => {
            expect_keys(&params, &["P", "Q"], colon)?;
            let p = int_param(&params, "P")?;
            let q = int_param(&params, "Q")?;
            if p < 1 {
                return Err(SpecError::Constraint(format!(
                    "lucas-u needs P >= 1 so that U_2 = P is positive, got P={p}"
                )));
            }
            Ok(SequenceSpec::lucas_u(p, q))
        }
        "explicit" => {
            expect_keys(&params, &["file"], colon)?;
            load_explicit(&params["file"].1)
        }
        other => Err(syntax(
            0,
            format!("unknown family '{other}' (expected power-diff, lucas-u, explicit)"),
        )),
    }
}

/// key -> (position of the value, value text)
fn parse_params(text: &str, start: usize) -> Result<BTreeMap<String, (usize, String)>, SpecError> {
    let mut out = BTreeMap::new();
    if start >= text.len() {
        return Err(syntax(start, "expected key=value"));
    }
    let mut pos = start;
    for item in text[start..].split(',') {
        let eq = item
            .find('=')
            .ok_or_else(|| syntax(pos, format!("expected key=value, found '{item}'")))?;
        let key = &item[..eq];
        let value = &item[eq + 1..];
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax(pos, format!("invalid key '{key}'")));
        }
        if value.is_empty() {
            return Err(syntax(pos + eq + 1, format!("empty value for '{key}'")));
        }
        if out
            .insert(key.to_string(), (pos + eq + 1, value.to_string()))
            .is_some()
        {
            return Err(syntax(pos, format!("duplicate key '{key}'")));
        }
        pos += item.len() + 1;
    }
    Ok(out)
}

fn expect_keys(
    params: &BTreeMap<String, (usize, String)>,
    keys: &[&str],
    at: usize,
) -> Result<(), SpecError> {
    for key in keys {
        if !params.contains_key(*key) {
            return Err(syntax(at, format!("missing key '{key}'")));
        }
    }
    if let Some((extra, (pos, _))) = params.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
        return Err(syntax(*pos, format!("unexpected key '{extra}'")));
    }
    Ok(())
}

fn nat_param(params: &BTreeMap<String, (usize, String)>, key: &str) -> Result<Nat, SpecError> {
    let (pos, value) = &params[key];
    if !value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(
            *pos,
            format!("'{key}' must be a nonnegative integer"),
        ));
    }
    Nat::from_str(value).map_err(|_| syntax(*pos, format!("'{key}' must be a nonnegative integer")))
}

fn int_param(params: &BTreeMap<String, (usize, String)>, key: &str) -> Result<i64, SpecError> {
    let (pos, value) = &params[key];
    value
        .parse::<i64>()
        .map_err(|_| syntax(*pos, format!("'{key}' must be a 64-bit integer")))
}

/// One base-10 positive integer per line; blank lines and `#` comments are
/// ignored.
pub fn parse_explicit(source: &str, text: &str) -> Result<SequenceSpec, SpecError> {
    let mut terms = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !line.bytes().all(|b| b.is_ascii_digit()) {
            return Err(SpecError::Constraint(format!(
                "{source}:{}: expected a positive integer, found '{line}'",
                lineno + 1
            )));
        }
        terms.push(Nat::from_str(line).expect("digits checked"));
    }
    SequenceSpec::explicit(source, terms).map_err(|e| SpecError::Constraint(e.to_string()))
}

pub fn load_explicit(path: &str) -> Result<SequenceSpec, SpecError> {
    let text = fs::read_to_string(Path::new(path)).map_err(|e| SpecError::Io {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    parse_explicit(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(v: u64) -> Nat {
        Nat::from(v)
    }

    #[test]
    fn parses_families() {
        assert_eq!(
            parse_spec("power-diff:x=4,y=1").unwrap(),
            SequenceSpec::PowerDiff {
                x: nat(4),
                y: nat(1)
            }
        );
        assert_eq!(
            parse_spec("lucas-u:P=1,Q=-1").unwrap(),
            SequenceSpec::LucasU { p: 1, q: -1 }
        );
        assert_eq!(
            parse_spec("power-diff:y=1,x=4").unwrap(),
            parse_spec("power-diff:x=4,y=1").unwrap()
        );
    }

    #[test]
    fn rejects_non_coprime() {
        let err = parse_spec("power-diff:x=4,y=2").unwrap_err();
        assert!(
            matches!(err, SpecError::Constraint(ref m) if m.contains("gcd(4,2) = 2")),
            "{err}"
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(
            parse_spec("power-diff"),
            Err(SpecError::Syntax { position: 10, .. })
        ));
        assert!(matches!(
            parse_spec("power-diff:x=4,y"),
            Err(SpecError::Syntax { position: 15, .. })
        ));
        assert!(matches!(
            parse_spec("power-diff:x=a,y=1"),
            Err(SpecError::Syntax { position: 13, .. })
        ));
        assert!(matches!(
            parse_spec("power-diff:x=4,y=1,z=2"),
            Err(SpecError::Syntax { .. })
        ));
        assert!(matches!(
            parse_spec("power-sum:x=4,y=1"),
            Err(SpecError::Syntax { .. })
        ));
        assert!(matches!(
            parse_spec("lucas-u:P=1"),
            Err(SpecError::Syntax { .. })
        ));
        assert!(matches!(
            parse_spec("lucas-u:P=0,Q=1"),
            Err(SpecError::Constraint(_))
        ));
    }

    #[test]
    fn explicit_text() {
        let spec = parse_explicit("mem", "# header\n5\n\n25\n").unwrap();
        assert_eq!(
            spec,
            SequenceSpec::Explicit {
                source: "mem".into(),
                terms: vec![nat(5), nat(25)]
            }
        );
        assert!(parse_explicit("mem", "5\n0\n").is_err());
        assert!(parse_explicit("mem", "5\n-3\n").is_err());
        assert!(parse_explicit("mem", "# nothing\n").is_err());
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            parse_spec("explicit:file=/nonexistent/terms.txt"),
            Err(SpecError::Io { .. })
        ));
    }
}
