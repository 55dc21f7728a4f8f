//! Plain-text artifact formats: operator triplet files, eigenvector
//! coefficient files, and generator rate tables.
//!
//! All writers emit entries in ascending index order so re-exports of the
//! same configuration are byte-identical. Scalar values use the canonical
//! Laurent textual form (`q^2 - 2 + q^-2`); rates use Rust's shortest
//! round-trip float formatting.

use std::fmt::Write as _;

use qexch_core::linop::{SparseOperator, VectorOnBasis};
use qexch_core::scalar::LaurentScalar;
use qexch_core::simulate::CtmcGenerator;
use qexch_core::statespace::MultiConfig;

#[derive(Debug, thiserror::Error)]
pub enum OpFileError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("missing `dims` header")]
    MissingHeader,
}

/// Serializes an operator as a `dims` header plus `row col value` triplets.
pub fn write_operator(op: &SparseOperator) -> String {
    let mut out = String::from("dims");
    for d in op.dims() {
        write!(out, " {d}").unwrap();
    }
    out.push('\n');
    for (r, c, v) in op.iter() {
        writeln!(out, "{r} {c} {v}").unwrap();
    }
    out
}

/// Parses the format produced by [`write_operator`]. Duplicate positions
/// accumulate, matching sparse construction semantics.
pub fn read_operator(text: &str) -> Result<SparseOperator, OpFileError> {
    let mut lines = text.lines().enumerate();
    let dims = loop {
        let (lineno, line) = lines.next().ok_or(OpFileError::MissingHeader)?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rest = line.strip_prefix("dims").ok_or(OpFileError::MissingHeader)?;
        let mut dims = Vec::new();
        for tok in rest.split_whitespace() {
            dims.push(tok.parse::<usize>().map_err(|_| OpFileError::Parse {
                line: lineno + 1,
                reason: format!("bad dimension `{tok}`"),
            })?);
        }
        if dims.is_empty() {
            return Err(OpFileError::Parse {
                line: lineno + 1,
                reason: "empty dims header".into(),
            });
        }
        break dims;
    };
    let mut op = SparseOperator::zero(dims);
    let dim = op.dim();
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(3, char::is_whitespace);
        let parse_idx = |tok: Option<&str>| -> Result<usize, OpFileError> {
            let tok = tok.ok_or(OpFileError::Parse {
                line: lineno + 1,
                reason: "expected `row col value`".into(),
            })?;
            tok.parse().map_err(|_| OpFileError::Parse {
                line: lineno + 1,
                reason: format!("bad index `{tok}`"),
            })
        };
        let row = parse_idx(parts.next())?;
        let col = parse_idx(parts.next())?;
        let value_text = parts.next().ok_or(OpFileError::Parse {
            line: lineno + 1,
            reason: "missing value".into(),
        })?;
        if row >= dim || col >= dim {
            return Err(OpFileError::Parse {
                line: lineno + 1,
                reason: format!("index ({row},{col}) outside dimension {dim}"),
            });
        }
        let value: LaurentScalar = value_text.trim().parse().map_err(|e| OpFileError::Parse {
            line: lineno + 1,
            reason: format!("bad scalar `{value_text}`: {e}"),
        })?;
        op.add_to(row, col, &value);
    }
    Ok(op)
}

/// One `index value` line per basis component, including exact zeros, so
/// the file length equals the dimension.
pub fn write_eigenvector(v: &VectorOnBasis) -> String {
    let mut out = String::new();
    for idx in 0..v.dim() {
        writeln!(out, "{idx} {}", v.get(idx)).unwrap();
    }
    out
}

/// Compact textual form of a multi-site configuration, e.g. `(0,1)|(1,0)`.
pub fn config_text(c: &MultiConfig) -> String {
    c.sites()
        .iter()
        .map(|s| {
            let inner = s
                .entries()
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            format!("({inner})")
        })
        .collect::<Vec<_>>()
        .join("|")
}

/// Rate table: sector label, state list, then `rate from to value` lines.
pub fn write_generator(gen: &CtmcGenerator) -> String {
    let mut out = String::from("sector ");
    out.push_str(
        &gen.sector
            .0
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for (idx, state) in gen.states.iter().enumerate() {
        writeln!(out, "state {idx} {}", config_text(state)).unwrap();
    }
    for (&(from, to), rate) in &gen.rates {
        writeln!(out, "rate {from} {to} {rate}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use qexch_core::weights::asep_local_h;

    #[test]
    fn operator_roundtrip() {
        let h = asep_local_h();
        let text = write_operator(&h);
        assert!(text.starts_with("dims 2 2\n"));
        let back = read_operator(&text).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn write_is_deterministic() {
        let h = asep_local_h();
        assert_eq!(write_operator(&h), write_operator(&h.clone()));
    }

    #[test]
    fn rejects_missing_header_and_bad_entries() {
        assert!(matches!(
            read_operator("0 0 q\n"),
            Err(OpFileError::MissingHeader)
        ));
        assert!(read_operator("dims 2\n5 0 q\n").is_err());
        assert!(read_operator("dims 2\n0 0 wibble\n").is_err());
    }

    #[test]
    fn eigenvector_has_one_line_per_component() {
        let mut v = VectorOnBasis::zero(4);
        v.set(2, "q^2".parse().unwrap());
        let text = write_eigenvector(&v);
        assert_eq!(text.lines().count(), 4);
        assert!(text.contains("2 q^2"));
        assert!(text.contains("0 0"));
    }
}
