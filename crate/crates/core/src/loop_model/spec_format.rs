//! Line-oriented loop-spec text format.
//!
//! ```text
//! # simple loop
//! edges 1
//! 1 1 1 1 2
//! word
//! 1
//! areas
//! 0.5 0.5
//! ```
//!
//! Edge rows are `j s(j) t(j) l(j) r(j)` with 1-based indices, word tokens
//! are `j` or `-j`, and there is one area per face in face order.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{validate, CombinatorialLoop, FaceAreaVector, PlanarGraph, Step};
use crate::{Error, Result};

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut rest = line;
        let mut offset = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let tail = &rest[start..];
            let end = tail.find(char::is_whitespace).unwrap_or(tail.len());
            out.push(Token { text: &tail[..end], line: i + 1, column: offset + start + 1 });
            offset += start + end;
            rest = &tail[end..];
        }
    }
    out
}

fn parse_error(tok: Option<&Token<'_>>, message: impl Into<String>) -> Error {
    let (line, column) = tok.map_or((0, 0), |t| (t.line, t.column));
    Error::Parse { line, column, message: message.into() }
}

struct Cursor<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<&Token<'a>> {
        let i = self.pos;
        if i >= self.tokens.len() {
            let last = self.tokens.last();
            return Err(parse_error(last, alloc::format!("unexpected end of input, expected {what}")));
        }
        self.pos += 1;
        Ok(&self.tokens[i])
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        let tok = self.next(word)?;
        if tok.text != word {
            return Err(parse_error(Some(tok), alloc::format!("expected `{word}`, found `{}`", tok.text)));
        }
        Ok(())
    }

    fn index(&mut self, what: &str) -> Result<usize> {
        let tok = self.next(what)?;
        match tok.text.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(parse_error(Some(tok), alloc::format!("expected a positive integer {what}, found `{}`", tok.text))),
        }
    }
}

/// Parse a loop-spec, validate the loop and check the areas. The total
/// area is the sum of the face areas.
pub fn parse_loop_spec(text: &str) -> Result<(CombinatorialLoop, FaceAreaVector)> {
    let mut cur = Cursor { tokens: tokenize(text), pos: 0 };
    cur.keyword("edges")?;
    let tok = cur.next("edge count")?;
    let m: usize = tok
        .text
        .parse()
        .ok()
        .filter(|&m| m >= 1)
        .ok_or_else(|| parse_error(Some(tok), "edge count must be a positive integer"))?;
    let mut rows = vec![None; m];
    for _ in 0..m {
        let at = cur.pos;
        let j = cur.index("edge index")?;
        if j >= m || rows[j].is_some() {
            return Err(parse_error(cur.tokens.get(at), "edge index out of range or repeated"));
        }
        let s = cur.index("source vertex")?;
        let t = cur.index("target vertex")?;
        let l = cur.index("left face")?;
        let r = cur.index("right face")?;
        rows[j] = Some([s, t, l, r]);
    }
    let mut g = PlanarGraph::new(vec![0; m], vec![0; m], vec![0; m], vec![0; m]);
    for (j, row) in rows.into_iter().enumerate() {
        let [s, t, l, r] = row.expect("every row read");
        (g.source[j], g.target[j], g.left[j], g.right[j]) = (s, t, l, r);
    }

    cur.keyword("word")?;
    let mut word = Vec::new();
    while let Some(tok) = cur.peek() {
        if tok.text == "areas" {
            break;
        }
        let (neg, digits) = match tok.text.strip_prefix('-') {
            Some(d) => (true, d),
            None => (false, tok.text),
        };
        match digits.parse::<usize>() {
            Ok(j) if (1..=m).contains(&j) => word.push(Step::new(j - 1, !neg)),
            _ => return Err(parse_error(Some(tok), alloc::format!("bad word token `{}`", tok.text))),
        }
        cur.pos += 1;
    }
    if word.is_empty() {
        return Err(parse_error(cur.peek(), "empty word"));
    }
    cur.keyword("areas")?;
    let mut areas = Vec::new();
    while let Some(tok) = cur.peek() {
        match tok.text.parse::<f64>() {
            Ok(a) if a.is_finite() && a >= 0.0 => areas.push(a),
            _ => return Err(parse_error(Some(tok), alloc::format!("area must be a finite non-negative number, found `{}`", tok.text))),
        }
        cur.pos += 1;
    }
    let p = g.face_count();
    if areas.len() != p {
        let last = cur.tokens.last();
        return Err(parse_error(last, alloc::format!("expected {p} areas, found {}", areas.len())));
    }
    let l = validate(g, word)?;
    Ok((l, FaceAreaVector::new(areas)?))
}

/// Serialise a loop and its areas. The output is a fixed function of the
/// data, so parse → write round trips are byte-stable.
pub fn write_loop_spec(l: &CombinatorialLoop, areas: &FaceAreaVector) -> String {
    let g = l.graph();
    let mut out = String::new();
    let _ = writeln!(out, "edges {}", g.edge_count());
    for j in 0..g.edge_count() {
        let _ = writeln!(out, "{} {} {} {} {}", j + 1, g.source[j] + 1, g.target[j] + 1, g.left[j] + 1, g.right[j] + 1);
    }
    out.push_str("word\n");
    let tokens: Vec<String> = l
        .word()
        .iter()
        .map(|s| if s.forward { (s.edge + 1).to_string() } else { alloc::format!("-{}", s.edge + 1) })
        .collect();
    out.push_str(&tokens.join(" "));
    out.push_str("\nareas\n");
    let nums: Vec<String> = areas.areas().iter().map(|&a| format_g17(a)).collect();
    out.push_str(&nums.join(" "));
    out.push('\n');
    out
}

/// `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = alloc::format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').into()
        } else {
            s.into()
        }
    };
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        alloc::format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        trim(&alloc::format!("{:.*}", (16 - exp) as usize, x))
    }
}
