//! Text formats.
//!
//! ```text
//! # coords 1 2 12
//! HREP 3 4
//! 0 0 -1 0
//! ```
//!
//! Each H row holds `d + 1` rational tokens `a_1 .. a_d b` for `a . x <= b`.
//! V files use `VREP d m` and rows of `d` tokens in `{0, 1}`. Everything after
//! `#` is a comment; a comment of the form `# coords l_1 .. l_d` carries
//! coordinate labels and is otherwise ignored by readers that don't know it.

use std::io::{BufRead, Write};

use super::{InequalitySystem, LinearInequality, VertexSet};
use crate::error::{Error, Result};
use crate::linalg::{format_rational, parse_rational};

const COORDS_TAG: &str = "coords";

struct Lines {
    labels: Option<Vec<String>>,
    body: Vec<(usize, Vec<String>)>,
}

fn scan<R: BufRead>(reader: R) -> Result<Lines> {
    let mut labels = None;
    let mut body = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let (content, comment) = match line.split_once('#') {
            Some((c, rest)) => (c, Some(rest)),
            None => (line.as_str(), None),
        };
        if let Some(rest) = comment {
            let mut toks = rest.split_whitespace();
            if toks.next() == Some(COORDS_TAG) {
                labels = Some(toks.map(str::to_string).collect());
            }
        }
        let toks: Vec<String> = content.split_whitespace().map(str::to_string).collect();
        if !toks.is_empty() {
            body.push((i + 1, toks));
        }
    }
    Ok(Lines { labels, body })
}

fn header(lines: &Lines, tag: &str) -> Result<(usize, usize)> {
    let Some((ln, toks)) = lines.body.first() else {
        return Err(Error::parse(0, format!("missing `{tag}` header")));
    };
    if toks.len() != 3 || toks[0] != tag {
        return Err(Error::parse(*ln, format!("expected `{tag} d m`")));
    }
    let d = toks[1]
        .parse()
        .map_err(|_| Error::parse(*ln, "bad dimension"))?;
    let m = toks[2]
        .parse()
        .map_err(|_| Error::parse(*ln, "bad row count"))?;
    if lines.body.len() - 1 != m {
        return Err(Error::parse(
            *ln,
            format!("header announces {m} rows, found {}", lines.body.len() - 1),
        ));
    }
    Ok((d, m))
}

pub fn read_hrep<R: BufRead>(reader: R) -> Result<InequalitySystem> {
    let lines = scan(reader)?;
    let (d, _) = header(&lines, "HREP")?;
    let mut rows = Vec::new();
    for (ln, toks) in &lines.body[1..] {
        if toks.len() != d + 1 {
            return Err(Error::parse(
                *ln,
                format!("expected {} tokens, found {}", d + 1, toks.len()),
            ));
        }
        let vals = toks
            .iter()
            .map(|t| {
                parse_rational(t).ok_or_else(|| Error::parse(*ln, format!("bad rational `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let (a, b) = vals.split_at(d);
        rows.push(LinearInequality::new(a.to_vec(), b[0].clone()));
    }
    let mut s = InequalitySystem::new(d, rows)?;
    s.set_labels(lines.labels);
    Ok(s)
}

pub fn write_hrep<W: Write>(mut w: W, s: &InequalitySystem) -> Result<()> {
    let c = s.canonical();
    if let Some(l) = c.labels() {
        writeln!(w, "# {COORDS_TAG} {}", l.join(" "))?;
    }
    writeln!(w, "HREP {} {}", c.dim(), c.len())?;
    for r in c.rows() {
        let mut toks: Vec<String> = r.coeffs.iter().map(format_rational).collect();
        toks.push(format_rational(&r.bound));
        writeln!(w, "{}", toks.join(" "))?;
    }
    Ok(())
}

pub fn read_vrep<R: BufRead>(reader: R) -> Result<VertexSet> {
    let lines = scan(reader)?;
    let (d, _) = header(&lines, "VREP")?;
    let mut verts = Vec::new();
    for (ln, toks) in &lines.body[1..] {
        if toks.len() != d {
            return Err(Error::parse(
                *ln,
                format!("expected {d} tokens, found {}", toks.len()),
            ));
        }
        let v = toks
            .iter()
            .map(|t| match t.as_str() {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                _ => Err(Error::parse(
                    *ln,
                    format!("vertex entry `{t}` is not 0 or 1"),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        verts.push(v);
    }
    let mut v = VertexSet::new(d, verts)?;
    v.set_labels(lines.labels);
    Ok(v)
}

/// Writes vertices in lexicographic order.
pub fn write_vrep<W: Write>(mut w: W, v: &VertexSet) -> Result<()> {
    let s = v.sorted();
    if let Some(l) = s.labels() {
        writeln!(w, "# {COORDS_TAG} {}", l.join(" "))?;
    }
    writeln!(w, "VREP {} {}", s.dim(), s.len())?;
    for p in s.vertices() {
        let toks: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", toks.join(" "))?;
    }
    Ok(())
}
