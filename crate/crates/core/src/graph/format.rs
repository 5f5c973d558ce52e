//! Text format for weighted graphs.
//!
//! ```text
//! # comment
//! n 3
//! edge 1 2 pi/8
//! edge 2 3 0.25
//! ```
//!
//! One statement per line; `#` starts a comment. `n` must precede every
//! `edge` line and appear exactly once. Angles are either real literals
//! (radians) or rational multiples of π written as `[-][coef][*]pi[/den]`,
//! e.g. `pi`, `-pi/2`, `3pi/8`, `3*pi/8`, `0.5*pi`. Duplicate edges, in
//! either orientation, are rejected.

use std::f64::consts::PI;
use std::path::Path;

use super::WeightedGraph;
use crate::error::{Error, Result};

/// Parses an angle literal in radians.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let Some(pos) = s.find("pi") else {
        return s
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("bad angle {s:?}"));
    };
    let (head, tail) = (&s[..pos], &s[pos + 2..]);
    let (sign, head) = match head.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, head.strip_prefix('+').unwrap_or(head)),
    };
    let head = head.strip_suffix('*').unwrap_or(head).trim();
    let coef = if head.is_empty() {
        1.0
    } else {
        head.parse::<f64>()
            .map_err(|_| format!("bad coefficient in angle {s:?}"))?
    };
    let den = match tail.trim() {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .and_then(|d| d.trim().parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(|| format!("bad denominator in angle {s:?}"))?,
    };
    let v = sign * coef * PI / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("bad angle {s:?}"))
    }
}

/// Parses the graph text format.
pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    parse_graph_named(text, "<graph>")
}

/// Reads and parses a graph file.
pub fn load_graph(path: &Path) -> Result<WeightedGraph> {
    let text = std::fs::read_to_string(path)?;
    parse_graph_named(&text, &path.display().to_string())
}

fn parse_graph_named(text: &str, name: &str) -> Result<WeightedGraph> {
    let err = |line: usize, msg: String| Error::Parse {
        path: name.to_string(),
        line,
        msg,
    };
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("n") => {
                if n.is_some() {
                    return Err(err(lineno, "repeated `n`".into()));
                }
                let v = toks
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .filter(|&v| v > 0)
                    .ok_or_else(|| err(lineno, "expected positive vertex count".into()))?;
                if toks.next().is_some() {
                    return Err(err(lineno, "trailing tokens".into()));
                }
                n = Some(v);
            }
            Some("edge") => {
                if n.is_none() {
                    return Err(err(lineno, "`edge` before `n`".into()));
                }
                let rest: Vec<&str> = toks.collect();
                if rest.len() != 3 {
                    return Err(err(lineno, "expected `edge j k theta`".into()));
                }
                let j = rest[0]
                    .parse::<usize>()
                    .map_err(|_| err(lineno, format!("bad vertex {:?}", rest[0])))?;
                let k = rest[1]
                    .parse::<usize>()
                    .map_err(|_| err(lineno, format!("bad vertex {:?}", rest[1])))?;
                let theta = parse_angle(rest[2]).map_err(|m| err(lineno, m))?;
                edges.push((lineno, j, k, theta));
            }
            Some(other) => return Err(err(lineno, format!("unknown statement {other:?}"))),
            None => unreachable!(),
        }
    }
    let n = n.ok_or_else(|| err(0, "missing `n`".into()))?;
    let mut g = WeightedGraph::empty(n)?;
    for (lineno, j, k, theta) in edges {
        g.insert_edge(j, k, theta).map_err(|e| match e {
            Error::Input(m) => err(lineno, m),
            other => other,
        })?;
    }
    Ok(g)
}
