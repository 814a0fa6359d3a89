//! Plain-text polynomial files.
//!
//! ```text
//! domain=ising num_vars=3 constant=0.5
//! 2 0 1
//! -1.5 0 1 2
//! ```
//!
//! The header fixes the domain, the variable count, and the constant term;
//! every following line is one term: a coefficient, then its variable indices
//! in strictly ascending order. Blank lines and lines starting with `#` are
//! skipped. Parsing is strict: repeated indices inside a term, out-of-order
//! indices, and repeated index sets across lines are errors rather than being
//! silently merged.

use std::path::Path;

use super::{BinaryPolynomial, VariableDomain};
use crate::error::{Error, Result};

pub fn write_polynomial(p: &BinaryPolynomial) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "domain={} num_vars={} constant={:?}\n",
        p.domain().name(),
        p.num_vars(),
        p.constant()
    ));
    for (key, coeff) in p.terms() {
        out.push_str(&format!("{coeff:?}"));
        for i in key {
            out.push_str(&format!(" {i}"));
        }
        out.push('\n');
    }
    out
}

pub fn write_polynomial_file<P: AsRef<Path>>(p: &BinaryPolynomial, path: P) -> Result<()> {
    std::fs::write(path, write_polynomial(p))?;
    Ok(())
}

pub fn parse_polynomial(input: &str) -> Result<BinaryPolynomial> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        message: "empty input; expected a header line".into(),
    })?;
    let (domain, num_vars, constant) = parse_header(header_line, header)?;

    let mut p = BinaryPolynomial::new(num_vars, domain);
    p.add_constant(constant);
    let mut seen: std::collections::BTreeSet<Vec<u32>> = std::collections::BTreeSet::new();
    for (line_no, line) in lines {
        let mut fields = line.split_whitespace();
        let coeff_text = fields.next().expect("non-empty line");
        let coeff: f64 = coeff_text.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad coefficient {coeff_text:?}"),
        })?;
        let mut indices = Vec::new();
        for f in fields {
            let i: u32 = f.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad variable index {f:?}"),
            })?;
            if i as usize >= num_vars {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("index {i} out of range for num_vars={num_vars}"),
                });
            }
            if let Some(&last) = indices.last() {
                if i <= last {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!(
                            "indices must be strictly ascending; {i} follows {last}"
                        ),
                    });
                }
            }
            indices.push(i);
        }
        if indices.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "term line has a coefficient but no indices".into(),
            });
        }
        if !seen.insert(indices.clone()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate term over indices {indices:?}"),
            });
        }
        p.add_term(&indices, coeff).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
    }
    Ok(p)
}

pub fn read_polynomial_file<P: AsRef<Path>>(path: P) -> Result<BinaryPolynomial> {
    let text = std::fs::read_to_string(path)?;
    parse_polynomial(&text)
}

fn parse_header(line_no: usize, header: &str) -> Result<(VariableDomain, usize, f64)> {
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::Parse {
            line: line_no,
            message: format!(
                "header must be `domain=<boolean|ising> num_vars=<N> constant=<c>`, got {header:?}"
            ),
        });
    }
    let expect = |field: &str, key: &str| -> Result<String> {
        match field.split_once('=') {
            Some((k, v)) if k == key => Ok(v.to_string()),
            _ => Err(Error::Parse {
                line: line_no,
                message: format!("expected `{key}=...`, got {field:?}"),
            }),
        }
    };
    let domain: VariableDomain = expect(fields[0], "domain")?.parse().map_err(|e| {
        Error::Parse {
            line: line_no,
            message: format!("{e}"),
        }
    })?;
    let num_vars: usize = expect(fields[1], "num_vars")?.parse().map_err(|_| Error::Parse {
        line: line_no,
        message: "num_vars must be a non-negative integer".into(),
    })?;
    let constant: f64 = expect(fields[2], "constant")?.parse().map_err(|_| Error::Parse {
        line: line_no,
        message: "constant must be a real number".into(),
    })?;
    Ok((domain, num_vars, constant))
}
