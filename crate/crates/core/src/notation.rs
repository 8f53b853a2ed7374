//! The `v/μ + v/μ` text notation for fuzzy values.
//!
//! Rendering: `{4/0.9 + 4.84/1 + 5.76/0.9}, cm^2`. Type-2 sets nest a grade
//! set after each primary value, `{2.9/{0.8/0.9 + 0.95/1}}`. Tuples are
//! parenthesized, `({1/1}, {2/1}), cm`.

use thiserror::Error;

use crate::fuzzy::{FuzzyError, Type1FuzzySet, Type2FuzzySet};
use crate::model::{FuzzyTuple, ModelError, PropertyValue};
use crate::scalar::Scalar;

/// Renders with at most [`Scalar::fraction_digits`] fractional digits (nine
/// for `f64`) and no trailing zeros.
pub fn format_scalar<S: Scalar>(x: S) -> String {
    let s = format!("{:.*}", S::fraction_digits(), x.as_f64());
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        &s
    };
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

fn join<I: Iterator<Item = String>>(items: I) -> String {
    items.collect::<Vec<_>>().join(" + ")
}

pub fn render_type1<S: Scalar>(set: &Type1FuzzySet<S>) -> String {
    format!(
        "{{{}}}",
        join(set.elements().iter().map(|&(v, m)| format!("{}/{}", format_scalar(v), format_scalar(m))))
    )
}

pub fn render_type2<S: Scalar>(set: &Type2FuzzySet<S>) -> String {
    format!(
        "{{{}}}",
        join(set.elements().iter().map(|(v, g)| format!("{}/{}", format_scalar(*v), render_type1(g))))
    )
}

fn with_unit(body: String, unit: &str) -> String {
    if unit.is_empty() {
        body
    } else {
        format!("{body}, {unit}")
    }
}

pub fn render_value<S: Scalar>(value: &PropertyValue<S>) -> String {
    match value {
        PropertyValue::Crisp { value, unit } => with_unit(format_scalar(*value), unit),
        PropertyValue::CrispTuple { values, unit } => with_unit(
            format!("({})", values.iter().map(|v| format_scalar(*v)).collect::<Vec<_>>().join(", ")),
            unit,
        ),
        PropertyValue::Fuzzy1 { set, unit } => with_unit(render_type1(set), unit),
        PropertyValue::Fuzzy2 { set, unit } => with_unit(render_type2(set), unit),
        PropertyValue::FuzzyTuple { sets, unit } => {
            let parts: Vec<String> = match sets {
                FuzzyTuple::Type1(s) => s.iter().map(render_type1).collect(),
                FuzzyTuple::Type2(s) => s.iter().map(render_type2).collect(),
            };
            with_unit(format!("({})", parts.join(", ")), unit)
        }
        PropertyValue::Verification(d) => format_scalar(d.value()),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NotationError {
    #[error("at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: &'static str },
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

enum Parsed<S> {
    Num(S),
    T1(Type1FuzzySet<S>),
    T2(Type2FuzzySet<S>),
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, expected: &'static str) -> Result<(), NotationError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(expected))
        }
    }

    fn err(&self, expected: &'static str) -> NotationError {
        NotationError::Syntax {
            offset: self.pos,
            expected,
        }
    }

    fn number<S: Scalar>(&mut self) -> Result<S, NotationError> {
        self.ws();
        let rest = &self.src[self.pos..];
        let end = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || ((c == '-' || c == '+') && (i == 0 || rest[..i].ends_with(['e', 'E'])))))
            .map_or(rest.len(), |(i, _)| i);
        let n: f64 = rest[..end].parse().map_err(|_| self.err("number"))?;
        self.pos += end;
        Ok(S::of(n))
    }

    /// `{ v/μ + … }` where each μ is a number or a nested type-1 set.
    fn set<S: Scalar>(&mut self) -> Result<Parsed<S>, NotationError> {
        self.expect('{', "`{`")?;
        let mut t1 = Vec::new();
        let mut t2 = Vec::new();
        loop {
            let v = self.number::<S>()?;
            self.expect('/', "`/`")?;
            self.ws();
            if self.src[self.pos..].starts_with('{') {
                match self.set::<S>()? {
                    Parsed::T1(g) => t2.push((v, g)),
                    _ => return Err(self.err("type-1 grade set")),
                }
            } else {
                t1.push((v, self.number::<S>()?));
            }
            if !self.eat('+') {
                break;
            }
        }
        self.expect('}', "`}`")?;
        match (t1.is_empty(), t2.is_empty()) {
            (false, true) => Ok(Parsed::T1(Type1FuzzySet::new(t1)?)),
            (true, false) => Ok(Parsed::T2(Type2FuzzySet::new(t2)?)),
            _ => Err(self.err("memberships of one kind")),
        }
    }

    fn item<S: Scalar>(&mut self) -> Result<Parsed<S>, NotationError> {
        self.ws();
        if self.src[self.pos..].starts_with('{') {
            self.set()
        } else {
            Ok(Parsed::Num(self.number()?))
        }
    }
}

/// Parses a quantitative value in the rendered notation. A bare number is a
/// crisp scalar; the unit follows an optional comma.
pub fn parse_value<S: Scalar>(text: &str) -> Result<PropertyValue<S>, NotationError> {
    let mut c = Cursor { src: text, pos: 0 };
    let body = if c.eat('(') {
        let mut items = vec![c.item::<S>()?];
        while c.eat(',') {
            items.push(c.item()?);
        }
        c.expect(')', "`)`")?;
        Some(items)
    } else {
        None
    };
    let single = match body {
        None => Some(c.item::<S>()?),
        Some(_) => None,
    };
    c.eat(',');
    c.ws();
    let unit = c.src[c.pos..].trim().to_owned();
    if unit.contains(char::is_whitespace) || unit.contains(['{', '}', '(', ')', '/']) {
        return Err(c.err("unit"));
    }
    let value = match (single, body) {
        (Some(Parsed::Num(x)), _) => PropertyValue::crisp(x, unit),
        (Some(Parsed::T1(s)), _) => PropertyValue::fuzzy1(s, unit),
        (Some(Parsed::T2(s)), _) => PropertyValue::fuzzy2(s, unit),
        (None, Some(items)) => {
            if items.iter().all(|i| matches!(i, Parsed::Num(_))) {
                let values = items
                    .into_iter()
                    .map(|i| match i {
                        Parsed::Num(x) => x,
                        _ => unreachable!(),
                    })
                    .collect();
                PropertyValue::crisp_tuple(values, unit)?
            } else if items.iter().all(|i| matches!(i, Parsed::T1(_))) {
                let sets = items
                    .into_iter()
                    .filter_map(|i| match i {
                        Parsed::T1(s) => Some(s),
                        _ => None,
                    })
                    .collect();
                PropertyValue::fuzzy_tuple(FuzzyTuple::Type1(sets), unit)?
            } else if items.iter().all(|i| matches!(i, Parsed::T2(_))) {
                let sets = items
                    .into_iter()
                    .filter_map(|i| match i {
                        Parsed::T2(s) => Some(s),
                        _ => None,
                    })
                    .collect();
                PropertyValue::fuzzy_tuple(FuzzyTuple::Type2(sets), unit)?
            } else {
                return Err(c.err("tuple components of one kind"));
            }
        }
        (None, None) => unreachable!(),
    };
    Ok(value)
}
