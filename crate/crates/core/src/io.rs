//! Sequence interchange files.
//!
//! Complex form: header `index,re,im`, one row per entry. Phase form: header
//! `index,phase,q`, mapped through ψ on read. Blank lines and lines starting
//! with `#` are ignored.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::seqcore::{psi, ComplexSequence, PhaseSequence};

pub fn complex_csv(a: &ComplexSequence) -> String {
    let mut out = String::from("index,re,im\n");
    for (i, v) in a.values().iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", v.re, v.im);
    }
    out
}

pub fn phase_csv(p: &PhaseSequence) -> String {
    let mut out = String::from("index,phase,q\n");
    for (i, v) in p.values().iter().enumerate() {
        let _ = writeln!(out, "{i},{v},{}", p.q());
    }
    out
}

/// Two-column `t_frac,imepr` trace.
pub fn trace_csv(trace: &[f64]) -> String {
    let n = trace.len();
    let mut out = String::from("t_frac,imepr\n");
    for (i, v) in trace.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i as f64 / n as f64, v);
    }
    out
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

/// Reads either the complex or the phase layout.
pub fn parse_sequence_csv(text: &str) -> Result<ComplexSequence> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = rows
        .next()
        .ok_or_else(|| Error::Parse("empty sequence file".into()))?;
    let cols: Vec<String> = header
        .split(',')
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    let is_phase = match cols.as_slice() {
        [i, r, m] if i == "index" && r == "re" && m == "im" => false,
        [i, p, q] if i == "index" && p == "phase" && q == "q" => true,
        _ => {
            return Err(parse_err(
                hline,
                format!("expected header index,re,im or index,phase,q, got {header:?}"),
            ))
        }
    };

    let mut complex = Vec::new();
    let mut phases = Vec::new();
    let mut modulus = None;
    for (expected, (line, row)) in rows.enumerate() {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(
                line,
                format!("expected 3 fields, got {}", fields.len()),
            ));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(line, format!("index: {e}")))?;
        if index != expected {
            return Err(parse_err(
                line,
                format!("index {index}, expected {expected}"),
            ));
        }
        if is_phase {
            let p: u32 = fields[1]
                .parse()
                .map_err(|e| parse_err(line, format!("phase: {e}")))?;
            let q: u32 = fields[2]
                .parse()
                .map_err(|e| parse_err(line, format!("q: {e}")))?;
            if *modulus.get_or_insert(q) != q {
                return Err(parse_err(line, "q changes within the file"));
            }
            phases.push(p);
        } else {
            let re: f64 = fields[1]
                .parse()
                .map_err(|e| parse_err(line, format!("re: {e}")))?;
            let im: f64 = fields[2]
                .parse()
                .map_err(|e| parse_err(line, format!("im: {e}")))?;
            complex.push(Complex64::new(re, im));
        }
    }
    if is_phase {
        let q = modulus.ok_or_else(|| Error::Parse("no entries".into()))?;
        Ok(psi(&PhaseSequence::new(q, phases)?))
    } else {
        if complex.is_empty() {
            return Err(Error::Parse("no entries".into()));
        }
        ComplexSequence::new(complex)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_round_trip() {
        let a = psi(&PhaseSequence::new(8, vec![0, 1, 3, 7, 5]).unwrap());
        let back = parse_sequence_csv(&complex_csv(&a)).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn phase_layout() {
        let p = PhaseSequence::new(4, vec![0, 1, 2, 3]).unwrap();
        let back = parse_sequence_csv(&phase_csv(&p)).unwrap();
        assert_eq!(back, psi(&p));
    }

    #[test]
    fn comments_and_zeros() {
        let text = "# masked\nindex,re,im\n0,1,0\n\n1,0,0\n2,-1,0\n3,0,1\n";
        let a = parse_sequence_csv(text).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.support_len(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_sequence_csv("").is_err());
        assert!(parse_sequence_csv("a,b,c\n0,1,0\n").is_err());
        assert!(parse_sequence_csv("index,re,im\n1,1,0\n").is_err());
        assert!(parse_sequence_csv("index,re,im\n0,2,0\n").is_err());
        assert!(parse_sequence_csv("index,phase,q\n0,1,4\n1,1,2\n").is_err());
        assert!(parse_sequence_csv("index,phase,q\n0,5,4\n").is_err());
    }

    #[test]
    fn trace_layout() {
        assert_eq!(trace_csv(&[2.0, 0.0]), "t_frac,imepr\n0,2\n0.5,0\n");
    }
}
