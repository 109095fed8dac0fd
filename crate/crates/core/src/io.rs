//! Line-oriented text formats.
//!
//! Networks:
//!
//! ```text
//! HYTN <n>
//! E <tail> <head> <w>
//! MH <tail> <k> <head1> <w1> ... <headk> <wk>
//! MT <head> <k> <tail1> <w1> ... <tailk> <wk>
//! ```
//!
//! Games: `MPG <n>`, then `N <id> <owner>` for every node and
//! `A <from> <to> <w>` for every arc. Schedules are `s <id> <value>` lines;
//! certificates are one `S <ids...>` line plus `C <arc index> [arc line]`
//! lines. Everything after `#` on a line is ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{ArcId, ArcKind, Hyperarc, Hytn, ModelError, NegativeCycleCert, Schedule, TimepointId, Weight};
use crate::mpg::{MeanPayoffGame, MpgError, Player};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

/// Non-empty lines with comments removed, as `(line number, tokens)`.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

struct Tokens<'a> {
    line: usize,
    items: std::slice::Iter<'a, &'a str>,
}

impl<'a> Tokens<'a> {
    fn new(line: usize, tokens: &'a [&'a str]) -> Self {
        Tokens {
            line,
            items: tokens.iter(),
        }
    }

    fn next<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let token = self
            .items
            .next()
            .ok_or_else(|| ParseError::new(self.line, format!("missing {what}")))?;
        token
            .parse()
            .map_err(|_| ParseError::new(self.line, format!("invalid {what} `{token}`")))
    }

    fn id(&mut self, what: &str, order: usize) -> Result<usize, ParseError> {
        let id: usize = self.next(what)?;
        if id >= order {
            return Err(ParseError::new(self.line, format!("{what} {id} out of range 0..{order}")));
        }
        Ok(id)
    }

    fn finish(mut self) -> Result<(), ParseError> {
        match self.items.next() {
            Some(extra) => Err(ParseError::new(self.line, format!("unexpected token `{extra}`"))),
            None => Ok(()),
        }
    }
}

fn header(line: usize, tokens: &[&str], keyword: &str) -> Result<usize, ParseError> {
    if tokens.first() != Some(&keyword) {
        return Err(ParseError::new(line, format!("expected `{keyword} <n>` header")));
    }
    let mut t = Tokens::new(line, &tokens[1..]);
    let n = t.next("node count")?;
    t.finish()?;
    Ok(n)
}

fn parse_arc(line: usize, tokens: &[&str], order: usize) -> Result<Hyperarc, ParseError> {
    let mut t = Tokens::new(line, &tokens[1..]);
    let arc = match tokens[0] {
        "E" => {
            let tail = t.id("tail", order)?;
            let head = t.id("head", order)?;
            Hyperarc::standard(tail, head, t.next("weight")?)
        }
        kw @ ("MH" | "MT") => {
            let pivot = t.id(if kw == "MH" { "tail" } else { "head" }, order)?;
            let k: usize = t.next("end count")?;
            if k == 0 {
                return Err(ParseError::new(line, "hyperarc without ends"));
            }
            let end = if kw == "MH" { "head" } else { "tail" };
            let mut ends = Vec::with_capacity(k.min(1 << 16));
            for _ in 0..k {
                ends.push((t.id(end, order)?, t.next("weight")?));
            }
            if kw == "MH" {
                Hyperarc::multi_head(pivot, &ends)
            } else {
                Hyperarc::multi_tail(pivot, &ends)
            }
        }
        other => return Err(ParseError::new(line, format!("unknown record `{other}`"))),
    };
    t.finish()?;
    Ok(arc)
}

/// Parses a network; arcs keep their file order, which defines their ids.
pub fn parse_hytn(text: &str) -> Result<Hytn, ParseError> {
    let mut records = lines(text);
    let (line, tokens) = records.next().ok_or_else(|| ParseError::new(0, "empty input"))?;
    let order = header(line, &tokens, "HYTN")?;
    let mut arcs = Vec::new();
    let mut arc_lines = Vec::new();
    for (line, tokens) in records {
        arcs.push(parse_arc(line, &tokens, order)?);
        arc_lines.push(line);
    }
    Hytn::new(order, arcs).map_err(|e| structural(e, &arc_lines))
}

fn structural(e: ModelError, arc_lines: &[usize]) -> ParseError {
    let line = e.arc().and_then(|a| arc_lines.get(a).copied()).unwrap_or(0);
    ParseError::new(line, e.to_string())
}

/// One arc as a line of the network format.
pub fn format_arc(arc: &Hyperarc) -> String {
    arc_line(arc.kind(), arc.pivot(), arc.ends())
}

fn arc_line(kind: ArcKind, p: TimepointId, ends: &[(TimepointId, Weight)]) -> String {
    let mut out = match kind {
        ArcKind::Standard => return format!("E {} {} {}", p, ends[0].0, ends[0].1),
        ArcKind::MultiHead => format!("MH {p} {}", ends.len()),
        ArcKind::MultiTail => format!("MT {p} {}", ends.len()),
    };
    for (v, w) in ends {
        let _ = write!(out, " {v} {w}");
    }
    out
}

fn canonical_key(arc: &Hyperarc) -> (u8, usize, Vec<(TimepointId, Weight)>) {
    let mut ends = arc.ends().to_vec();
    ends.sort_unstable();
    let rank = match arc.kind() {
        ArcKind::Standard => 0,
        ArcKind::MultiHead => 1,
        ArcKind::MultiTail => 2,
    };
    (rank, arc.pivot().0, ends)
}

/// Canonical text of a network: standard arcs first, then multi-head, then
/// multi-tail, each group sorted by endpoint ids.
pub fn serialize_hytn(network: &Hytn) -> String {
    let mut arcs: Vec<_> = network.arcs().iter().map(|a| (canonical_key(a), a.kind())).collect();
    arcs.sort_unstable();
    let mut out = format!("HYTN {}\n", network.order());
    for ((_, pivot, ends), kind) in arcs {
        out.push_str(&arc_line(kind, TimepointId(pivot), &ends));
        out.push('\n');
    }
    out
}

/// The network's arcs in their own order, one per line; unlike
/// [`serialize_hytn`] this keeps arc ids stable.
pub fn write_hytn(network: &Hytn) -> String {
    let mut out = format!("HYTN {}\n", network.order());
    for a in network.arcs() {
        out.push_str(&format_arc(a));
        out.push('\n');
    }
    out
}

pub fn parse_mpg(text: &str) -> Result<MeanPayoffGame, ParseError> {
    let mut records = lines(text);
    let (line, tokens) = records.next().ok_or_else(|| ParseError::new(0, "empty input"))?;
    let n = header(line, &tokens, "MPG")?;
    let mut owners: Vec<Option<Player>> = vec![None; n];
    let mut arcs = Vec::new();
    let mut last_line = line;
    for (line, tokens) in records {
        last_line = line;
        let mut t = Tokens::new(line, &tokens[1..]);
        match tokens[0] {
            "N" => {
                let id = t.id("node", n)?;
                let owner = match t.next::<u8>("owner")? {
                    0 => Player::Zero,
                    1 => Player::One,
                    o => return Err(ParseError::new(line, format!("owner must be 0 or 1, got {o}"))),
                };
                if owners[id].replace(owner).is_some() {
                    return Err(ParseError::new(line, format!("node {id} declared twice")));
                }
            }
            "A" => {
                let from = t.id("node", n)?;
                let to = t.id("node", n)?;
                for v in [from, to] {
                    if owners[v].is_none() {
                        return Err(ParseError::new(line, format!("node {v} used before its declaration")));
                    }
                }
                arcs.push((from, to, t.next("weight")?, line));
            }
            other => return Err(ParseError::new(line, format!("unknown record `{other}`"))),
        }
        t.finish()?;
    }
    if let Some(v) = owners.iter().position(Option::is_none) {
        return Err(ParseError::new(last_line, format!("node {v} is never declared")));
    }
    let lines_of: Vec<usize> = arcs.iter().map(|a| a.3).collect();
    MeanPayoffGame::new(
        owners.into_iter().map(Option::unwrap).collect(),
        arcs.iter().map(|&(t, h, w, _)| (t, h, w)).collect(),
    )
    .map_err(|e| {
        let line = match e {
            MpgError::SelfLoop(v) | MpgError::DeadEnd(v) => {
                arcs.iter().position(|a| a.0 == v).map_or(last_line, |i| lines_of[i])
            }
            MpgError::ParallelArc(t, h) => arcs
                .iter()
                .rposition(|a| a.0 == t && a.1 == h)
                .map_or(last_line, |i| lines_of[i]),
            MpgError::WeightOutOfRange(w) => arcs.iter().position(|a| a.2 == w).map_or(last_line, |i| lines_of[i]),
            _ => last_line,
        };
        ParseError::new(line, e.to_string())
    })
}

pub fn serialize_mpg(game: &MeanPayoffGame) -> String {
    let mut out = format!("MPG {}\n", game.node_count());
    for v in 0..game.node_count() {
        let _ = writeln!(out, "N {v} {}", game.owner(v));
    }
    for &(t, h, w) in game.arcs() {
        let _ = writeln!(out, "A {t} {h} {w}");
    }
    out
}

pub fn serialize_schedule(s: &Schedule) -> String {
    let mut out = String::new();
    for (v, x) in s.values().iter().enumerate() {
        let _ = writeln!(out, "s {v} {x}");
    }
    out
}

/// Parses `s <id> <value>` lines; every id in `0..k` must appear once,
/// where `k` is the number of lines.
pub fn parse_schedule(text: &str) -> Result<Schedule, ParseError> {
    let records: Vec<_> = lines(text).collect();
    let k = records.len();
    let mut values = vec![None; k];
    for (line, tokens) in &records {
        if tokens[0] != "s" {
            return Err(ParseError::new(*line, format!("unknown record `{}`", tokens[0])));
        }
        let mut t = Tokens::new(*line, &tokens[1..]);
        let id = t.id("timepoint", k)?;
        let value: Weight = t.next("value")?;
        t.finish()?;
        if values[id].replace(value).is_some() {
            return Err(ParseError::new(*line, format!("timepoint {id} scheduled twice")));
        }
    }
    Ok(Schedule::new(values.into_iter().map(|v| v.expect("k distinct ids below k")).collect()))
}

/// Certificate text. Each `C` line names the arc id and repeats the arc.
pub fn serialize_certificate(network: &Hytn, cert: &NegativeCycleCert) -> String {
    let mut out = String::from("S");
    for v in cert.nodes() {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    for &a in cert.arcs() {
        let _ = writeln!(out, "C {a} {}", format_arc(network.arc(a)));
    }
    out
}

/// Parses a certificate against `network`. Arc ids must exist; an arc
/// repeated after the id must match the network's arc of that id.
pub fn parse_certificate(text: &str, network: &Hytn) -> Result<NegativeCycleCert, ParseError> {
    let mut nodes = Vec::new();
    let mut arcs = Vec::new();
    let mut seen_s = false;
    for (line, tokens) in lines(text) {
        match tokens[0] {
            "S" => {
                if std::mem::replace(&mut seen_s, true) {
                    return Err(ParseError::new(line, "second `S` line"));
                }
                let mut t = Tokens::new(line, &tokens[1..]);
                for _ in 1..tokens.len() {
                    nodes.push(TimepointId(t.id("timepoint", network.order())?));
                }
            }
            "C" => {
                let mut t = Tokens::new(line, &tokens[1..2.min(tokens.len())]);
                let id = t.id("arc", network.arcs().len())?;
                if tokens.len() > 2 {
                    let stated = parse_arc(line, &tokens[2..], network.order())?;
                    if canonical_key(&stated) != canonical_key(network.arc(ArcId(id))) {
                        return Err(ParseError::new(line, format!("arc {id} does not match the network")));
                    }
                }
                arcs.push(ArcId(id));
            }
            other => return Err(ParseError::new(line, format!("unknown record `{other}`"))),
        }
    }
    if !seen_s {
        return Err(ParseError::new(0, "missing `S` line"));
    }
    Ok(NegativeCycleCert::new(nodes, arcs))
}
