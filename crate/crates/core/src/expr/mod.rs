//! Method expressions: parsing, printing, structural comparison and
//! evaluation over crisp and fuzzy operands.

mod eval;
mod parse;

use std::fmt;

use thiserror::Error;

use crate::fuzzy::FuzzyError;
use crate::model::{PropertyValue, Specification, ValueKind};
use crate::notation::format_scalar;
use crate::scalar::Scalar;

pub use eval::{evaluate, guard_holds, Binding, Bindings, UnitPower};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("parse error at {line}:{column}: expected {}, found {found}", expected.join(" or "))]
    Parse {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("parameter `{0}` is declared more than once")]
    DuplicateParameter(String),
    #[error("`{0}` is not a declared parameter")]
    UndeclaredParameter(String),
    #[error("method `{method}` is not applicable: guard on `{property}` does not hold")]
    GuardFailed { method: String, property: String },
    #[error("two fuzzy operands meet at one operator")]
    MultiFuzzyOperands,
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("property `{0}` is not a verification degree")]
    NotVerification(String),
    #[error("property `{0}` is a tuple; select a component with an index")]
    TupleOperand(String),
    #[error("property `{property}` has no component {index}")]
    IndexOutOfRange { property: String, index: usize },
    #[error("incompatible units `{left}` and `{right}`")]
    UnitMismatch { left: String, right: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
    Neg,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            "neg" => Some(Func::Neg),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Neg => "neg",
        }
    }
}

/// Abstract syntax of a method body.
///
/// `Var` names a declared parameter; `Prop` (written `$name` or
/// `$name[i]`) reads a property of the subject directly.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<S = f64> {
    Num(S),
    Var(String),
    Prop { name: String, index: Option<usize> },
    Binary {
        op: BinOp,
        lhs: Box<Expr<S>>,
        rhs: Box<Expr<S>>,
    },
    Call { func: Func, arg: Box<Expr<S>> },
}

pub type MethodExpr<S = f64> = Expr<S>;

impl<S: Scalar> Expr<S> {
    pub fn binary(op: BinOp, lhs: Expr<S>, rhs: Expr<S>) -> Self {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn call(func: Func, arg: Expr<S>) -> Self {
        Expr::Call {
            func,
            arg: Box::new(arg),
        }
    }

    /// Names of parameter references, in first-occurrence order.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Var(v) = e {
                if !out.contains(&v.as_str()) {
                    out.push(v.as_str());
                }
            }
        });
        out
    }

    pub fn property_refs(&self) -> Vec<(&str, Option<usize>)> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Prop { name, index } = e {
                out.push((name.as_str(), *index));
            }
        });
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr<S>)) {
        f(self);
        match self {
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            Expr::Call { arg, .. } => arg.walk(f),
            _ => {}
        }
    }

    fn write(&self, out: &mut String, min_prec: u8) {
        const NEG: u8 = 3;
        const ATOM: u8 = 5;
        let (prec, body) = match self {
            Expr::Num(n) if *n < S::zero() => (ATOM, format!("({n})")),
            Expr::Num(n) => (ATOM, n.to_string()),
            Expr::Var(v) => (ATOM, v.clone()),
            Expr::Prop { name, index: None } => (ATOM, format!("${name}")),
            Expr::Prop {
                name,
                index: Some(i),
            } => (ATOM, format!("${name}[{i}]")),
            Expr::Call {
                func: Func::Neg,
                arg,
            } => {
                let mut s = String::from("-");
                arg.write(&mut s, NEG);
                (NEG, s)
            }
            Expr::Call { func, arg } => {
                let mut s = format!("{}(", func.name());
                arg.write(&mut s, 0);
                s.push(')');
                (ATOM, s)
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                let (lmin, rmin) = match op {
                    BinOp::Pow => (ATOM, NEG),
                    _ => (p, p + 1),
                };
                let mut s = String::new();
                lhs.write(&mut s, lmin);
                s.push(' ');
                s.push_str(op.symbol());
                s.push(' ');
                rhs.write(&mut s, rmin);
                (p, s)
            }
        };
        if prec < min_prec {
            out.push('(');
            out.push_str(&body);
            out.push(')');
        } else {
            out.push_str(&body);
        }
    }
}

impl<S: Scalar> fmt::Display for Expr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, 0);
        f.write_str(&s)
    }
}

/// Parses a method body. Identifiers stay unresolved until the expression
/// is attached to a [`MethodDef`].
pub fn parse_expr<S: Scalar>(text: &str) -> Result<Expr<S>, ExprError> {
    parse::Parser::new(text).parse_expr()
}

/// Parses a conjunction of `property = degree` atoms.
pub fn parse_guard<S: Scalar>(text: &str) -> Result<Vec<GuardAtom<S>>, ExprError> {
    parse::Parser::new(text).parse_guard()
}

/// Reference to a property of the subject, optionally one tuple component.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PropertyRef {
    pub property: String,
    pub index: Option<usize>,
}

impl PropertyRef {
    pub fn new(property: impl Into<String>, index: Option<usize>) -> Self {
        Self {
            property: property.into(),
            index,
        }
    }
}

impl fmt::Display for PropertyRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}[{i}]", self.property),
            None => f.write_str(&self.property),
        }
    }
}

/// A declared parameter. `source` is the subject property it reads when the
/// caller supplies no binding.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub source: Option<PropertyRef>,
}

impl Param {
    pub fn new(name: impl Into<String>, source: Option<PropertyRef>) -> Self {
        Self {
            name: name.into(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuardAtom<S = f64> {
    pub property: String,
    pub degree: S,
}

impl<S: Scalar> fmt::Display for GuardAtom<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.property, format_scalar(self.degree))
    }
}

/// Exploiters read their subject; modifiers may change it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MethodKind {
    #[default]
    Exploiter,
    Modifier,
}

impl MethodKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodKind::Exploiter => "exploiter",
            MethodKind::Modifier => "modifier",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDef<S = f64> {
    name: String,
    params: Vec<Param>,
    body: Expr<S>,
    guard: Vec<GuardAtom<S>>,
    kind: MethodKind,
}

impl<S: Scalar> MethodDef<S> {
    /// An empty guard means the method always applies.
    pub fn new(
        name: impl Into<String>,
        params: Vec<Param>,
        body: Expr<S>,
        guard: Vec<GuardAtom<S>>,
        kind: MethodKind,
    ) -> Result<Self, ExprError> {
        for (i, p) in params.iter().enumerate() {
            if params[..i].iter().any(|q| q.name == p.name) {
                return Err(ExprError::DuplicateParameter(p.name.clone()));
            }
        }
        if let Some(v) = body.vars().into_iter().find(|v| !params.iter().any(|p| p.name == *v)) {
            return Err(ExprError::UndeclaredParameter(v.to_owned()));
        }
        Ok(Self {
            name: name.into(),
            params,
            body,
            guard,
            kind,
        })
    }

    /// Parses `body` and `guard` (empty string for none).
    pub fn parse(
        name: impl Into<String>,
        params: Vec<Param>,
        body: &str,
        guard: &str,
        kind: MethodKind,
    ) -> Result<Self, ExprError> {
        let guard = if guard.trim().is_empty() {
            Vec::new()
        } else {
            parse_guard(guard)?
        };
        Self::new(name, params, parse_expr(body)?, guard, kind)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn body(&self) -> &Expr<S> {
        &self.body
    }

    pub fn guard(&self) -> &[GuardAtom<S>] {
        &self.guard
    }

    pub fn kind(&self) -> MethodKind {
        self.kind
    }

    pub fn guard_text(&self) -> String {
        self.guard
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" & ")
    }

    /// Same definition under another name and other parameter names.
    pub fn renamed(&self, name: impl Into<String>, param_names: &[String]) -> Result<Self, ExprError> {
        let map = |v: &str| {
            let i = self.params.iter().position(|p| p.name == v).expect("declared");
            param_names[i].clone()
        };
        let params = self
            .params
            .iter()
            .zip(param_names)
            .map(|(p, n)| Param::new(n.clone(), p.source.clone()))
            .collect();
        Self::new(name, params, rename_vars(&self.body, &map), self.guard.clone(), self.kind)
    }

    /// Checks references against the owning specification: every property
    /// named by the body, parameter sources or guard must exist, and guards
    /// may only test verification degrees.
    pub fn check_against(&self, spec: &Specification<S>) -> Result<(), ExprError> {
        let refs = self
            .body
            .property_refs()
            .into_iter()
            .map(|(n, _)| n)
            .chain(self.params.iter().filter_map(|p| p.source.as_ref()).map(|r| r.property.as_str()));
        for name in refs {
            if spec.get(name).is_none() {
                return Err(ExprError::UnknownProperty(name.to_owned()));
            }
        }
        for atom in &self.guard {
            match spec.get(&atom.property) {
                None => return Err(ExprError::UnknownProperty(atom.property.clone())),
                Some(p) if p.value().kind() != ValueKind::Verification => {
                    return Err(ExprError::NotVerification(atom.property.clone()))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Guard atoms that fail on `value_of`.
    pub(crate) fn failing_guard<'a>(
        &'a self,
        value_of: impl Fn(&str) -> Option<&'a PropertyValue<S>>,
    ) -> Option<&'a GuardAtom<S>>
    where
        S: 'a,
    {
        self.guard.iter().find(|atom| match value_of(&atom.property) {
            Some(PropertyValue::Verification(d)) => !d.value().approx_eq(atom.degree),
            _ => true,
        })
    }
}

fn rename_vars<S: Scalar>(e: &Expr<S>, map: &impl Fn(&str) -> String) -> Expr<S> {
    match e {
        Expr::Var(v) => Expr::Var(map(v)),
        Expr::Binary { op, lhs, rhs } => Expr::binary(*op, rename_vars(lhs, map), rename_vars(rhs, map)),
        Expr::Call { func, arg } => Expr::call(*func, rename_vars(arg, map)),
        other => other.clone(),
    }
}

fn same_body<S: Scalar>(a: &Expr<S>, pa: &[Param], b: &Expr<S>, pb: &[Param]) -> bool {
    let pos = |ps: &[Param], v: &str| ps.iter().position(|p| p.name == v);
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => x.approx_eq(*y),
        (Expr::Var(x), Expr::Var(y)) => pos(pa, x).is_some() && pos(pa, x) == pos(pb, y),
        (Expr::Prop { name: n, index: i }, Expr::Prop { name: m, index: j }) => n == m && i == j,
        (
            Expr::Binary {
                op: o1,
                lhs: l1,
                rhs: r1,
            },
            Expr::Binary {
                op: o2,
                lhs: l2,
                rhs: r2,
            },
        ) => o1 == o2 && same_body(l1, pa, l2, pb) && same_body(r1, pa, r2, pb),
        (Expr::Call { func: f1, arg: a1 }, Expr::Call { func: f2, arg: a2 }) => {
            f1 == f2 && same_body(a1, pa, a2, pb)
        }
        _ => false,
    }
}

fn same_guard<S: Scalar>(a: &[GuardAtom<S>], b: &[GuardAtom<S>]) -> bool {
    fn sorted<S>(g: &[GuardAtom<S>]) -> Vec<&GuardAtom<S>> {
        let mut v: Vec<_> = g.iter().collect();
        v.sort_by(|x, y| x.property.cmp(&y.property));
        v
    }
    a.len() == b.len()
        && sorted(a)
            .iter()
            .zip(sorted(b))
            .all(|(x, y)| x.property == y.property && x.degree.approx_eq(y.degree))
}

/// Structural equality up to a positional renaming of parameters.
///
/// Bodies, guards, kinds and the parameters' property sources must agree;
/// method names and parameter names are ignored, so `4*a` over side `a`
/// matches `4*b` over side `b`.
pub fn alpha_equivalent<S: Scalar>(a: &MethodDef<S>, b: &MethodDef<S>) -> bool {
    a.kind == b.kind
        && a.params.len() == b.params.len()
        && a.params.iter().zip(&b.params).all(|(p, q)| p.source == q.source)
        && same_guard(&a.guard, &b.guard)
        && same_body(&a.body, &a.params, &b.body, &b.params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn side(name: &str) -> Param {
        Param::new(name, Some(PropertyRef::new("p2", Some(0))))
    }

    fn def(name: &str, params: Vec<Param>, body: &str, guard: &str) -> MethodDef {
        MethodDef::parse(name, params, body, guard, MethodKind::Exploiter).unwrap()
    }

    #[test]
    fn perimeters_unify() {
        let fa = def("f1", vec![side("a")], "4*a", "");
        let fb = def("f1", vec![side("b")], "4*b", "");
        assert!(alpha_equivalent(&fa, &fb));
        assert!(alpha_equivalent(&fa, &fa));
    }

    #[test]
    fn areas_differ() {
        let fa = def("f2", vec![side("a")], "a^2", "p5 = 1 & p6 = 1");
        let fb = def(
            "f2",
            vec![side("b"), Param::new("alpha", Some(PropertyRef::new("p4", Some(0))))],
            "b^2*sin(alpha)",
            "p5 = 1",
        );
        assert!(!alpha_equivalent(&fa, &fb));
    }

    #[test]
    fn alpha_equivalence_checks_everything_but_names() {
        let base = def("f", vec![side("a")], "a+1", "p5=1");
        assert!(alpha_equivalent(&base, &def("g", vec![side("x")], "x + 1", "p5 = 1")));
        assert!(!alpha_equivalent(&base, &def("f", vec![side("a")], "a+1", "")));
        assert!(!alpha_equivalent(&base, &def("f", vec![side("a")], "1+a", "p5=1")));
        let other_src = Param::new("a", Some(PropertyRef::new("p2", Some(1))));
        assert!(!alpha_equivalent(&base, &def("f", vec![other_src], "a+1", "p5=1")));
        let m = MethodDef::parse("f", vec![side("a")], "a+1", "p5=1", MethodKind::Modifier).unwrap();
        assert!(!alpha_equivalent(&base, &m));
        let two = def("f", vec![side("a"), Param::new("b", None)], "a+b", "");
        let swapped = def("f", vec![side("a"), Param::new("b", None)], "b+a", "");
        assert!(!alpha_equivalent(&two, &swapped));
    }

    #[test]
    fn renaming_preserves_verdicts() {
        let fa = def("f1", vec![side("a")], "4*a", "");
        let r = fa.renamed("zz", &["q".to_owned()]).unwrap();
        assert_eq!(r.body().to_string(), "4 * q");
        assert!(alpha_equivalent(&fa, &r));
    }

    #[test]
    fn undeclared_and_duplicate_params() {
        assert_eq!(
            MethodDef::<f64>::parse("f", vec![], "a", "", MethodKind::Exploiter),
            Err(ExprError::UndeclaredParameter("a".into()))
        );
        assert_eq!(
            MethodDef::<f64>::parse(
                "f",
                vec![Param::new("a", None), Param::new("a", None)],
                "a",
                "",
                MethodKind::Exploiter
            ),
            Err(ExprError::DuplicateParameter("a".into()))
        );
    }

    #[test]
    fn printer_minimal_parens() {
        let cases = [
            ("4*a", "4 * a"),
            ("b^2*sin(alpha)", "b ^ 2 * sin(alpha)"),
            ("(a+b)*c", "(a + b) * c"),
            ("a-(b-c)", "a - (b - c)"),
            ("(-a)^2", "(-a) ^ 2"),
            ("-a^2", "-a ^ 2"),
            ("2^3^2", "2 ^ 3 ^ 2"),
            ("(2^3)^2", "(2 ^ 3) ^ 2"),
            ("a^-b", "a ^ -b"),
            ("$p2[1]*2", "$p2[1] * 2"),
        ];
        for (src, want) in cases {
            let e: Expr = parse_expr(src).unwrap();
            assert_eq!(e.to_string(), want, "{src}");
            assert_eq!(parse_expr::<f64>(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn check_against_spec() {
        use crate::model::{Property, PropertyValue};
        let spec = Specification::new(vec![
            Property::new("p2", PropertyValue::crisp(3.0, "cm")).unwrap(),
            Property::new("p5", PropertyValue::verification(1.0).unwrap()).unwrap(),
        ])
        .unwrap();
        assert!(def("f", vec![Param::new("a", Some(PropertyRef::new("p2", None)))], "a", "p5=1")
            .check_against(&spec)
            .is_ok());
        assert_eq!(
            def("f", vec![], "$p9", "").check_against(&spec),
            Err(ExprError::UnknownProperty("p9".into()))
        );
        assert_eq!(
            def("f", vec![], "1", "p2=1").check_against(&spec),
            Err(ExprError::NotVerification("p2".into()))
        );
    }
}
