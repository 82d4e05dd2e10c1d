//! Text formats for graphs, weighted SCMs, separation sets, datasets and
//! selection reports, plus atomic file writes.
//!
//! All node labels in files are 1-based. Blank lines and `#` comments are
//! ignored on input.
//!
//! ```text
//! p=4
//! 1 -> 2
//! 2 -> 3 0.5      # SCM files add a weight
//! 1 _||_ 3 | 2    # separation statement; `| -` for the empty set
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Dcg;
use crate::nodeset::NodeSet;
use crate::scm::{Dataset, LinearScm};
use crate::selection::{Assumption, SelectionReport};
use crate::sepset::{SepSet, SepStatement};

/// Content lines with their 1-based line numbers, comments stripped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// Splits off the mandatory `p=<int>` header.
fn header(text: &str) -> Result<(usize, impl Iterator<Item = (usize, &str)>)> {
    let mut it = lines(text);
    let (ln, first) = it
        .next()
        .ok_or_else(|| Error::parse(1, "missing `p=<int>` header"))?;
    let value = first
        .strip_prefix('p')
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Error::parse(ln, format!("expected `p=<int>`, found `{first}`")))?;
    let p: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::parse(ln, format!("bad node count `{}`", value.trim())))?;
    if !(2..=crate::nodeset::MAX_NODES).contains(&p) {
        return Err(Error::parse(ln, format!("p must lie in 2..=16, got {p}")));
    }
    Ok((p, it))
}

fn node(ln: usize, tok: &str, p: usize) -> Result<usize> {
    let v: usize = tok
        .trim()
        .parse()
        .map_err(|_| Error::parse(ln, format!("bad node label `{}`", tok.trim())))?;
    if v == 0 || v > p {
        return Err(Error::parse(ln, format!("node {v} outside 1..={p}")));
    }
    Ok(v - 1)
}

/// `(j, k, rest)` from `j -> k rest`.
fn arrow(ln: usize, line: &str, p: usize) -> Result<(usize, usize, Option<String>)> {
    let (lhs, rhs) = line
        .split_once("->")
        .ok_or_else(|| Error::parse(ln, format!("expected `j -> k`, found `{line}`")))?;
    let mut toks = rhs.split_whitespace();
    let k = toks
        .next()
        .ok_or_else(|| Error::parse(ln, "missing edge head"))?;
    let rest: Vec<&str> = toks.collect();
    let rest = (!rest.is_empty()).then(|| rest.join(" "));
    Ok((node(ln, lhs, p)?, node(ln, k, p)?, rest))
}

pub fn parse_graph(text: &str) -> Result<Dcg> {
    let (p, body) = header(text)?;
    let mut g = Dcg::empty(p)?;
    for (ln, line) in body {
        let (j, k, rest) = arrow(ln, line, p)?;
        if let Some(extra) = rest {
            return Err(Error::parse(ln, format!("unexpected `{extra}` after edge")));
        }
        if j == k {
            return Err(Error::parse(ln, "self-loops are not allowed"));
        }
        g.add_edge(j, k)?;
    }
    Ok(g)
}

pub fn format_graph(g: &Dcg) -> String {
    let mut s = format!("p={}\n", g.p());
    for (j, k) in g.edges() {
        let _ = writeln!(s, "{} -> {}", j + 1, k + 1);
    }
    s
}

pub fn parse_scm(text: &str) -> Result<LinearScm> {
    let (p, body) = header(text)?;
    let mut edges = Vec::new();
    for (ln, line) in body {
        let (j, k, rest) = arrow(ln, line, p)?;
        let w: f64 = rest
            .as_deref()
            .ok_or_else(|| Error::parse(ln, "missing edge weight"))?
            .parse()
            .map_err(|_| Error::parse(ln, "bad edge weight"))?;
        if j == k {
            return Err(Error::parse(ln, "self-loops are not allowed"));
        }
        if w == 0.0 || !w.is_finite() {
            return Err(Error::parse(ln, "edge weights must be finite and nonzero"));
        }
        edges.push((j, k, w));
    }
    LinearScm::from_edges(p, &edges)
}

pub fn format_scm(scm: &LinearScm) -> String {
    let mut s = format!("p={}\n", scm.p());
    for (j, k, w) in scm.weighted_edges() {
        let _ = writeln!(s, "{} -> {} {w:?}", j + 1, k + 1);
    }
    s
}

pub fn parse_statement(ln: usize, line: &str, p: usize) -> Result<SepStatement> {
    let (pair, cond) = line
        .rsplit_once('|')
        .ok_or_else(|| Error::parse(ln, format!("expected `j _||_ k | S`, found `{line}`")))?;
    let (j, k) = pair
        .split_once("_||_")
        .ok_or_else(|| Error::parse(ln, "expected `_||_` between the endpoints"))?;
    let (j, k) = (node(ln, j, p)?, node(ln, k, p)?);
    let cond = cond.trim();
    let set = if cond == "-" || cond.is_empty() {
        NodeSet::EMPTY
    } else {
        cond.split(',')
            .map(|t| node(ln, t, p))
            .collect::<Result<NodeSet>>()?
    };
    SepStatement::new(j, k, set).map_err(|e| Error::parse(ln, e.to_string()))
}

pub fn parse_sepset(text: &str) -> Result<SepSet> {
    let (p, body) = header(text)?;
    let mut set = SepSet::new(p)?;
    for (ln, line) in body {
        set.insert(parse_statement(ln, line, p)?)?;
    }
    Ok(set)
}

pub fn format_sepset(set: &SepSet) -> String {
    let mut s = format!("p={}\n", set.p());
    for st in set.iter() {
        let _ = writeln!(s, "{st}");
    }
    s
}

/// Comma-separated node list (`"1,3"`, `"-"` or empty for none).
pub fn parse_node_list(text: &str, p: usize) -> Result<NodeSet> {
    let t = text.trim();
    if t.is_empty() || t == "-" {
        return Ok(NodeSet::EMPTY);
    }
    t.split(',').map(|tok| node(1, tok, p)).collect()
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut seed = 0;
    let mut header: Option<usize> = None;
    let mut rows: Vec<f64> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if let Some(c) = line.strip_prefix('#') {
            if let Some(v) = c.trim().strip_prefix("seed=") {
                seed = v.trim().parse().map_err(|_| Error::parse(ln, "bad seed"))?;
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        match header {
            None => {
                for (c, name) in cells.iter().enumerate() {
                    if *name != format!("X{}", c + 1) {
                        return Err(Error::parse(
                            ln,
                            format!("expected column X{}, found `{name}`", c + 1),
                        ));
                    }
                }
                header = Some(cells.len());
            }
            Some(p) => {
                if cells.len() != p {
                    return Err(Error::parse(
                        ln,
                        format!("expected {p} values, found {}", cells.len()),
                    ));
                }
                for c in cells {
                    rows.push(
                        c.parse()
                            .map_err(|_| Error::parse(ln, format!("bad number `{c}`")))?,
                    );
                }
            }
        }
    }
    let p = header.ok_or_else(|| Error::parse(1, "missing X1..Xp header"))?;
    let n = rows.len() / p.max(1);
    Dataset::new(DMatrix::from_row_slice(n, p, &rows), seed)
}

pub fn format_dataset(data: &Dataset) -> String {
    let p = data.p();
    let mut s = format!("# seed={}\n", data.seed());
    let names: Vec<String> = (1..=p).map(|c| format!("X{c}")).collect();
    s.push_str(&names.join(","));
    s.push('\n');
    let x = data.values();
    for r in 0..data.n() {
        for c in 0..p {
            if c > 0 {
                s.push(',');
            }
            let _ = write!(s, "{:?}", x[(r, c)]);
        }
        s.push('\n');
    }
    s
}

/// Markov graphs of a report, one row each with per-assumption 0/1 flags.
pub fn format_report(r: &SelectionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# p={}", r.p);
    let _ = writeln!(s, "# space={}", r.space);
    let _ = writeln!(s, "# ci_digest={}", r.ci_digest);
    let _ = writeln!(s, "# markov={} mecs={}", r.markov_count(), r.mecs.len());
    let mut flags = vec![[false; 6]; r.markov.len()];
    for (slot, a) in Assumption::ALL.into_iter().enumerate() {
        let o = r.outcome(a);
        let _ = writeln!(
            s,
            "# {a}: selected={} unique_mec={} unique_skeleton={}",
            o.members.len(),
            o.unique_mec,
            o.unique_skeleton
        );
        for &i in &o.members {
            flags[i][slot] = true;
        }
    }
    s.push_str("graph_id,total_edges,dsep_count,mec_id");
    for a in Assumption::ALL {
        let _ = write!(s, ",{a}");
    }
    s.push('\n');
    for (m, f) in r.markov.iter().zip(&flags) {
        let _ = write!(s, "{},{},{},{}", m.id, m.total_edges, m.dsep_count, m.mec);
        for &b in f {
            s.push_str(if b { ",1" } else { ",0" });
        }
        s.push('\n');
    }
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn read_graph(path: &Path) -> Result<Dcg> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn read_scm(path: &Path) -> Result<LinearScm> {
    parse_scm(&fs::read_to_string(path)?)
}

pub fn read_sepset(path: &Path) -> Result<SepSet> {
    parse_sepset(&fs::read_to_string(path)?)
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    parse_dataset(&fs::read_to_string(path)?)
}
