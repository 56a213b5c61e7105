//! Scenario, measure and atom files.
//!
//! ```text
//! SCENARIO 4
//! PARTIES 2 2
//! 1 3
//! 1 4
//! ```
//!
//! A scenario file lists one context per line as 1-based indices; with a
//! `PARTIES` line and no contexts, the multipartite contexts are used.
//! `MEASURE n` is followed by `i j .. = value` lines, one per nonempty
//! subset; `ATOMS n` by `bitstring value` lines, one per assignment.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use super::measure::{atom_label, complete_index};
use super::{build_multipartite, AtomTable, MeasureTable, Scenario, Subset};
use crate::error::{Error, Result};
use crate::linalg::{format_rational, parse_rational, Rational};

fn content_lines<R: BufRead>(reader: R) -> Result<Vec<(usize, Vec<String>)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        let toks: Vec<String> = content.split_whitespace().map(str::to_string).collect();
        if !toks.is_empty() {
            out.push((i + 1, toks));
        }
    }
    Ok(out)
}

fn header(lines: &[(usize, Vec<String>)], tag: &str) -> Result<usize> {
    let Some((ln, toks)) = lines.first() else {
        return Err(Error::parse(0, format!("missing `{tag}` header")));
    };
    if toks.len() != 2 || toks[0] != tag {
        return Err(Error::parse(*ln, format!("expected `{tag} n`")));
    }
    toks[1]
        .parse()
        .map_err(|_| Error::parse(*ln, "bad number of observables"))
}

fn parse_index(tok: &str, n: usize, ln: usize) -> Result<usize> {
    match tok.parse::<usize>() {
        Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
        _ => Err(Error::parse(
            ln,
            format!("`{tok}` is not an observable in 1..={n}"),
        )),
    }
}

pub fn read_scenario<R: BufRead>(reader: R) -> Result<Scenario> {
    let lines = content_lines(reader)?;
    let n = header(&lines, "SCENARIO")?;
    let mut rest = &lines[1..];
    let mut parties = None;
    if let Some((ln, toks)) = rest.first() {
        if toks[0] == "PARTIES" {
            let p = toks[1..]
                .iter()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(*ln, format!("bad setting count `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            parties = Some(p);
            rest = &rest[1..];
        }
    }
    let mut contexts = Vec::with_capacity(rest.len());
    for (ln, toks) in rest {
        let idx = toks
            .iter()
            .map(|t| parse_index(t, n, *ln))
            .collect::<Result<Vec<_>>>()?;
        contexts.push(Subset::from_indices(idx));
    }
    match parties {
        Some(p) if contexts.is_empty() => {
            let sc = build_multipartite(&p)?;
            if sc.n() != n {
                return Err(Error::InvalidScenario(format!(
                    "parties have {} settings in total, expected {n}",
                    sc.n()
                )));
            }
            Ok(sc)
        }
        p => Scenario::new(n, contexts, p),
    }
}

pub fn write_scenario<W: Write>(mut w: W, sc: &Scenario) -> Result<()> {
    writeln!(w, "SCENARIO {}", sc.n())?;
    if let Some(p) = sc.parties() {
        let toks: Vec<String> = p.iter().map(usize::to_string).collect();
        writeln!(w, "PARTIES {}", toks.join(" "))?;
    }
    for s in sc.contexts().subsets() {
        let toks: Vec<String> = s.indices().map(|i| (i + 1).to_string()).collect();
        writeln!(w, "{}", toks.join(" "))?;
    }
    Ok(())
}

pub fn read_measure<R: BufRead>(reader: R) -> Result<MeasureTable> {
    let lines = content_lines(reader)?;
    let n = header(&lines, "MEASURE")?;
    if n == 0 || n > super::DEFAULT_GUARD {
        return Err(Error::parse(
            lines[0].0,
            format!("unsupported number of observables {n}"),
        ));
    }
    let idx = complete_index(n);
    let mut values: Vec<Option<Rational>> = vec![None; idx.len()];
    for (ln, toks) in &lines[1..] {
        let Some(eq) = toks.iter().position(|t| t == "=") else {
            return Err(Error::parse(*ln, "expected `indices = value`"));
        };
        if eq == 0 || eq + 2 != toks.len() {
            return Err(Error::parse(*ln, "expected `indices = value`"));
        }
        let s = Subset::from_indices(
            toks[..eq]
                .iter()
                .map(|t| parse_index(t, n, *ln))
                .collect::<Result<Vec<_>>>()?,
        );
        if s.len() != eq {
            return Err(Error::parse(*ln, "repeated index"));
        }
        let v = parse_rational(&toks[eq + 1])
            .ok_or_else(|| Error::parse(*ln, format!("bad rational `{}`", toks[eq + 1])))?;
        let pos = idx
            .position(s)
            .expect("every nonempty subset is a coordinate");
        if values[pos].replace(v).is_some() {
            return Err(Error::parse(
                *ln,
                format!("subset {} given twice", s.label()),
            ));
        }
    }
    let values = values
        .into_iter()
        .zip(idx.subsets())
        .map(|(v, s)| {
            v.ok_or_else(|| Error::parse(0, format!("no value for subset {}", s.label())))
        })
        .collect::<Result<Vec<_>>>()?;
    MeasureTable::new(n, values)
}

pub fn write_measure<W: Write>(mut w: W, f: &MeasureTable) -> Result<()> {
    writeln!(w, "MEASURE {}", f.n())?;
    for s in complete_index(f.n()).subsets() {
        let toks: Vec<String> = s.indices().map(|i| (i + 1).to_string()).collect();
        writeln!(w, "{} = {}", toks.join(" "), format_rational(f.get(*s)))?;
    }
    Ok(())
}

pub fn read_atoms<R: BufRead>(reader: R) -> Result<AtomTable> {
    let lines = content_lines(reader)?;
    let n = header(&lines, "ATOMS")?;
    if n == 0 || n > super::DEFAULT_GUARD {
        return Err(Error::parse(
            lines[0].0,
            format!("unsupported number of observables {n}"),
        ));
    }
    let mut values: Vec<Option<Rational>> = vec![None; 1 << n];
    let mut seen = HashSet::new();
    for (ln, toks) in &lines[1..] {
        if toks.len() != 2 || toks[0].len() != n || !toks[0].bytes().all(|b| b == b'0' || b == b'1')
        {
            return Err(Error::parse(*ln, format!("expected `<{n} bits> value`")));
        }
        let eps = toks[0]
            .bytes()
            .enumerate()
            .fold(0u64, |e, (i, b)| e | (((b - b'0') as u64) << i));
        if !seen.insert(eps) {
            return Err(Error::parse(*ln, format!("atom {} given twice", toks[0])));
        }
        values[eps as usize] = Some(
            parse_rational(&toks[1])
                .ok_or_else(|| Error::parse(*ln, format!("bad rational `{}`", toks[1])))?,
        );
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(e, v)| {
            v.ok_or_else(|| {
                Error::parse(0, format!("no value for atom {}", atom_label(n, e as u64)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AtomTable::new(n, values)
}

/// Atoms in descending bitstring order, `11..1` first.
pub fn write_atoms<W: Write>(mut w: W, a: &AtomTable) -> Result<()> {
    let n = a.n();
    writeln!(w, "ATOMS {n}")?;
    let mut labels: Vec<(String, u64)> = (0u64..1 << n).map(|e| (atom_label(n, e), e)).collect();
    labels.sort_by(|x, y| y.0.cmp(&x.0));
    for (l, e) in labels {
        writeln!(w, "{l} {}", format_rational(a.get(e)))?;
    }
    Ok(())
}
