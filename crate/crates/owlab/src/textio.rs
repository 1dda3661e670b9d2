//! Text grammars for the CLI and deterministic machine rendering.
//!
//! Semigroups: `zd:<d>`, `nat:<d>`, `heis`, `table:<path.json>`.
//! Sets: `box:<lo>:<hi>` (half-open, comma-separated coordinates) or
//! `list:<path.json>`. Set functions: `card:<c>`, `invmax`, `sft:<name or
//! path>`, `bernoulli:<p1,p2,...>`, `markov:<path.json>`, `cmd:<shell
//! command>`. Rationals are `num/den` or a bare integer.
//!
//! Machine output never renders a rational as a float; reals are printed
//! with 12 significant digits.

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::{Command, Stdio};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::Value;

use crate::boundary::ExactRatio;
use crate::dynamics::{
    bernoulli_entropy_h, markov_entropy_h, sft_entropy_h, ForbiddenPattern, MarkovSpec, SftSpec,
};
use crate::error::{Error, Result};
use crate::semigroup::{Element, FinSubset, FiniteTable, Semigroup};
use crate::subadditive::{card_multiple, inv_max_card, PropertyFlags, SetFunction};

pub fn parse_semigroup(text: &str) -> Result<Semigroup> {
    if text == "heis" {
        return Ok(Semigroup::heisenberg());
    }
    if let Some(d) = text.strip_prefix("zd:") {
        let d: usize = d
            .parse()
            .map_err(|_| Error::Config(format!("semigroup `{text}`: dimension must be a positive integer")))?;
        return Semigroup::int_lattice(d);
    }
    if let Some(d) = text.strip_prefix("nat:") {
        let d: usize = d
            .parse()
            .map_err(|_| Error::Config(format!("semigroup `{text}`: dimension must be a positive integer")))?;
        return Semigroup::nat_monoid(d);
    }
    if let Some(path) = text.strip_prefix("table:") {
        let raw = std::fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&raw)?;
        let n = v["n"]
            .as_u64()
            .ok_or_else(|| Error::Config(format!("{path}: missing integer field `n`")))? as usize;
        let rows = v["table"]
            .as_array()
            .ok_or_else(|| Error::Config(format!("{path}: missing array field `table`")))?;
        let table: Vec<Vec<usize>> = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Config(format!("{path}: table rows must be arrays")))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|u| u as usize)
                            .ok_or_else(|| Error::Config(format!("{path}: table entries must be indices")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        if table.len() != n {
            return Err(Error::Config(format!("{path}: table has {} rows, expected n = {n}", table.len())));
        }
        return Ok(Semigroup::FiniteTable(FiniteTable::new(table)?));
    }
    Err(Error::Config(format!(
        "unknown semigroup `{text}` (expected zd:<d>, nat:<d>, heis, or table:<path>)"
    )))
}

fn parse_vector(text: &str) -> Result<Vec<BigInt>> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Config(format!("bad coordinate `{c}` in vector `{text}`")))
        })
        .collect()
}

fn element_from_json(v: &Value) -> Result<Element> {
    match v {
        Value::Number(n) => {
            let idx = n
                .as_u64()
                .ok_or_else(|| Error::Config(format!("bad table index {n}")))?;
            Ok(Element::Table(idx as usize))
        }
        Value::Array(coords) => {
            let coords: Vec<BigInt> = coords
                .iter()
                .map(|c| {
                    c.as_i64()
                        .map(BigInt::from)
                        .ok_or_else(|| Error::Config(format!("bad coordinate {c}")))
                })
                .collect::<Result<_>>()?;
            Ok(Element::Point(coords))
        }
        other => Err(Error::Config(format!(
            "elements must be coordinate arrays or table indices, got {other}"
        ))),
    }
}

/// Parses `box:<lo>:<hi>` or `list:<path.json>` and validates membership.
pub fn parse_set(sg: &Semigroup, text: &str) -> Result<FinSubset> {
    let set = if let Some(rest) = text.strip_prefix("box:") {
        let (lo, hi) = rest
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("set `{text}`: expected box:<lo>:<hi>")))?;
        FinSubset::lattice_box(&parse_vector(lo)?, &parse_vector(hi)?)?
    } else if let Some(path) = text.strip_prefix("list:") {
        let raw = std::fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&raw)?;
        let items = v
            .as_array()
            .ok_or_else(|| Error::Config(format!("{path}: expected a JSON array of elements")))?;
        FinSubset::from_elements(
            items
                .iter()
                .map(element_from_json)
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        return Err(Error::Config(format!(
            "unknown set `{text}` (expected box:<lo>:<hi> or list:<path>)"
        )));
    };
    sg.validate_set(&set)
        .map_err(|e| Error::Config(format!("set `{text}`: {e}")))?;
    Ok(set)
}

/// Parses `num/den` or a bare integer into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Config(format!("bad rational `{text}` (expected num/den or an integer)"));
    if let Some((n, d)) = text.split_once('/') {
        let num: BigInt = n.trim().parse().map_err(|_| bad())?;
        let den: BigInt = d.trim().parse().map_err(|_| bad())?;
        if den == BigInt::from(0) {
            return Err(bad());
        }
        Ok(BigRational::new(num, den))
    } else {
        let num: BigInt = text.trim().parse().map_err(|_| bad())?;
        Ok(BigRational::from(num))
    }
}

fn sft_from_json(path: &str) -> Result<SftSpec> {
    let raw = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&raw)?;
    let alphabet = v["alphabet"]
        .as_u64()
        .ok_or_else(|| Error::Config(format!("{path}: missing `alphabet`")))? as usize;
    let dim = v["dim"]
        .as_u64()
        .ok_or_else(|| Error::Config(format!("{path}: missing `dim`")))? as usize;
    let mut forbidden = Vec::new();
    for f in v["forbidden"]
        .as_array()
        .ok_or_else(|| Error::Config(format!("{path}: missing `forbidden` array")))?
    {
        let cells: Vec<Vec<i64>> = f["shape"]
            .as_array()
            .ok_or_else(|| Error::Config(format!("{path}: forbidden entry missing `shape`")))?
            .iter()
            .map(|c| {
                c.as_array()
                    .ok_or_else(|| Error::Config(format!("{path}: shape cells must be arrays")))?
                    .iter()
                    .map(|x| {
                        x.as_i64()
                            .ok_or_else(|| Error::Config(format!("{path}: bad shape coordinate")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let symbols: Vec<usize> = f["pattern"]
            .as_array()
            .ok_or_else(|| Error::Config(format!("{path}: forbidden entry missing `pattern`")))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|u| u as usize)
                    .ok_or_else(|| Error::Config(format!("{path}: bad pattern symbol")))
            })
            .collect::<Result<_>>()?;
        forbidden.push(ForbiddenPattern::new(cells, symbols)?);
    }
    SftSpec::new(alphabet, dim, forbidden)
}

fn markov_from_json(path: &str) -> Result<MarkovSpec> {
    let raw = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&raw)?;
    let parse_rat = |x: &Value| -> Result<BigRational> {
        match x {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n
                .as_i64()
                .map(|i| BigRational::from(BigInt::from(i)))
                .ok_or_else(|| Error::Config(format!("{path}: probabilities must be \"num/den\" strings"))),
            _ => Err(Error::Config(format!("{path}: probabilities must be \"num/den\" strings"))),
        }
    };
    let matrix: Vec<Vec<BigRational>> = v["P"]
        .as_array()
        .ok_or_else(|| Error::Config(format!("{path}: missing `P`")))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Config(format!("{path}: rows of P must be arrays")))?
                .iter()
                .map(parse_rat)
                .collect()
        })
        .collect::<Result<_>>()?;
    let pi: Vec<BigRational> = v["pi"]
        .as_array()
        .ok_or_else(|| Error::Config(format!("{path}: missing `pi`")))?
        .iter()
        .map(parse_rat)
        .collect::<Result<_>>()?;
    MarkovSpec::new(matrix, pi)
}

/// A user-supplied h over a subprocess: the command receives the element
/// list as JSON on standard input and must print one decimal real.
fn subprocess_h(command: String) -> SetFunction {
    SetFunction::new(
        format!("cmd[{command}]"),
        f64::INFINITY,
        PropertyFlags::default(),
        move |f| {
            let mut child = Command::new("sh")
                .arg("-c")
                .arg(&command)
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .spawn()?;
            child
                .stdin
                .as_mut()
                .expect("piped stdin")
                .write_all(render_set(f).as_bytes())?;
            let out = child.wait_with_output()?;
            if !out.status.success() {
                return Err(Error::Domain(format!(
                    "subprocess h exited with {}",
                    out.status
                )));
            }
            let text = String::from_utf8_lossy(&out.stdout);
            text.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("subprocess h printed `{}`, not a real", text.trim())))
        },
    )
}

/// Parses the set-function grammar. `budget` caps pattern-count work for
/// the `sft:` family.
pub fn parse_h(text: &str, budget: u64) -> Result<SetFunction> {
    if text == "invmax" {
        return Ok(inv_max_card());
    }
    if let Some(c) = text.strip_prefix("card:") {
        let c: f64 = c
            .parse()
            .map_err(|_| Error::Config(format!("bad multiplier in `{text}`")))?;
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Config(format!("multiplier in `{text}` must be a finite non-negative real")));
        }
        return Ok(card_multiple(c));
    }
    if let Some(name) = text.strip_prefix("sft:") {
        let sft = match name {
            "full2" => SftSpec::full_shift(2, 1)?,
            "golden" => SftSpec::golden_mean(),
            "hardsq" => SftSpec::hard_squares(),
            path => sft_from_json(path)?,
        };
        return Ok(sft_entropy_h(sft, budget));
    }
    if let Some(probs) = text.strip_prefix("bernoulli:") {
        let p: Vec<BigRational> = probs
            .split(',')
            .map(|x| parse_rational(x.trim()))
            .collect::<Result<_>>()?;
        return bernoulli_entropy_h(p);
    }
    if let Some(path) = text.strip_prefix("markov:") {
        return Ok(markov_entropy_h(markov_from_json(path)?));
    }
    if let Some(command) = text.strip_prefix("cmd:") {
        return Ok(subprocess_h(command.to_string()));
    }
    Err(Error::Config(format!(
        "unknown set function `{text}` (expected card:<c>, invmax, sft:<name|path>, bernoulli:<p,...>, markov:<path>, or cmd:<command>)"
    )))
}

pub fn render_element(e: &Element) -> String {
    match e {
        Element::Table(i) => i.to_string(),
        Element::Point(coords) => {
            let inner: Vec<String> = coords.iter().map(BigInt::to_string).collect();
            format!("[{}]", inner.join(","))
        }
    }
}

/// Canonical JSON array of elements in the set's (lexicographic) order.
pub fn render_set(f: &FinSubset) -> String {
    let inner: Vec<String> = f.iter().map(render_element).collect();
    format!("[{}]", inner.join(","))
}

/// Unreduced rational as `{"num":p,"den":q}`.
pub fn render_ratio(r: &ExactRatio) -> String {
    format!("{{\"num\":{},\"den\":{}}}", r.num, r.den)
}

/// Exact rational as `{"num":p,"den":q}` (reduced form of a BigRational).
pub fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{{\"num\":{},\"den\":1}}", r.numer())
    } else {
        format!("{{\"num\":{},\"den\":{}}}", r.numer(), r.denom())
    }
}

/// Reals with 12 significant digits in scientific notation; NaN and
/// infinities become JSON null.
pub fn render_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "null".to_string()
    }
}

pub fn render_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
