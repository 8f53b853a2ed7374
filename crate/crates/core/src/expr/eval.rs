use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use super::{BinOp, Expr, ExprError, Func, MethodDef};
use crate::fuzzy::{Type1FuzzySet, Type2FuzzySet};
use crate::model::{FuzzyObject, PropertyValue};
use crate::scalar::Scalar;

/// Caller-supplied value for a parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Binding<S = f64> {
    Scalar(S),
    Value(PropertyValue<S>),
}

impl<S: Scalar> From<PropertyValue<S>> for Binding<S> {
    fn from(v: PropertyValue<S>) -> Self {
        Binding::Value(v)
    }
}

pub type Bindings<S = f64> = BTreeMap<String, Binding<S>>;

/// A unit tracked through arithmetic: one base symbol raised to an integer
/// power. `base == None` is dimensionless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitPower {
    pub base: Option<String>,
    pub exponent: i32,
}

impl UnitPower {
    pub fn dimensionless() -> Self {
        Self {
            base: None,
            exponent: 0,
        }
    }

    pub fn of(unit: &str) -> Self {
        if unit.is_empty() {
            Self::dimensionless()
        } else {
            Self {
                base: Some(unit.to_owned()),
                exponent: 1,
            }
        }
    }

    fn normalized(base: Option<String>, exponent: i32) -> Self {
        if exponent == 0 {
            Self::dimensionless()
        } else {
            Self { base, exponent }
        }
    }

    pub fn is_dimensionless(&self) -> bool {
        self.base.is_none()
    }

    fn mismatch(&self, other: &Self) -> ExprError {
        ExprError::UnitMismatch {
            left: self.to_string(),
            right: other.to_string(),
        }
    }

    fn is_angle(&self) -> bool {
        self.exponent == 1 && matches!(self.base.as_deref(), Some("deg" | "°" | "rad"))
    }
}

impl fmt::Display for UnitPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.base, self.exponent) {
            (None, _) => Ok(()),
            (Some(b), 1) => f.write_str(b),
            (Some(b), e) => write!(f, "{b}^{e}"),
        }
    }
}

type Lift<S> = Rc<dyn Fn(S) -> Result<S, ExprError>>;

#[derive(Clone)]
enum Source<S> {
    Type1(Type1FuzzySet<S>),
    Type2(Type2FuzzySet<S>),
}

/// A fuzzy operand kept symbolic: the set it came from plus the scalar
/// function accumulated on the way up the tree.
#[derive(Clone)]
struct Pending<S> {
    source: Source<S>,
    f: Lift<S>,
}

#[derive(Clone)]
enum Operand<S> {
    Crisp(S),
    Fuzzy(Pending<S>),
}

#[derive(Clone)]
struct Val<S> {
    operand: Operand<S>,
    unit: UnitPower,
}

fn apply_bin<S: Scalar>(op: BinOp, x: S, y: S) -> Result<S, ExprError> {
    let r = match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div => {
            if y == S::zero() {
                return Err(ExprError::Domain("division by zero".into()));
            }
            x / y
        }
        BinOp::Pow => x.powf(y),
    };
    if r.is_finite() {
        Ok(r)
    } else {
        Err(ExprError::Domain(format!("{x} {} {y} is not finite", op.symbol())))
    }
}

fn apply_func<S: Scalar>(func: Func, x: S, to_radians: S) -> Result<S, ExprError> {
    match func {
        Func::Sin => Ok((x * to_radians).sin()),
        Func::Cos => Ok((x * to_radians).cos()),
        Func::Neg => Ok(-x),
        Func::Sqrt if x < S::zero() => Err(ExprError::Domain(format!("sqrt of negative {x}"))),
        Func::Sqrt => Ok(x.sqrt()),
    }
}

fn bin_unit<S: Scalar>(op: BinOp, l: &UnitPower, r: &UnitPower, rhs: &Operand<S>) -> Result<UnitPower, ExprError> {
    match op {
        BinOp::Add | BinOp::Sub => match (l.is_dimensionless(), r.is_dimensionless()) {
            (true, _) => Ok(r.clone()),
            (_, true) => Ok(l.clone()),
            _ if l == r => Ok(l.clone()),
            _ => Err(l.mismatch(r)),
        },
        BinOp::Mul | BinOp::Div => {
            let sign = if op == BinOp::Mul { 1 } else { -1 };
            match (&l.base, &r.base) {
                (None, None) => Ok(UnitPower::dimensionless()),
                (Some(_), None) => Ok(l.clone()),
                (None, Some(b)) => Ok(UnitPower::normalized(Some(b.clone()), sign * r.exponent)),
                (Some(a), Some(b)) if a == b => {
                    Ok(UnitPower::normalized(Some(a.clone()), l.exponent + sign * r.exponent))
                }
                _ => Err(l.mismatch(r)),
            }
        }
        BinOp::Pow => {
            if !r.is_dimensionless() {
                return Err(l.mismatch(r));
            }
            if l.is_dimensionless() {
                return Ok(UnitPower::dimensionless());
            }
            match rhs {
                Operand::Crisp(n) if n.fract() == S::zero() => {
                    let n = n.to_i32().ok_or_else(|| ExprError::Domain(format!("exponent {n} too large")))?;
                    Ok(UnitPower::normalized(l.base.clone(), l.exponent * n))
                }
                _ => Err(ExprError::Domain(format!(
                    "a quantity in `{l}` can only be raised to a crisp integer power"
                ))),
            }
        }
    }
}

struct Evaluator<'a, S: Scalar> {
    method: &'a MethodDef<S>,
    subject: &'a FuzzyObject<S>,
    bindings: &'a Bindings<S>,
}

impl<S: Scalar> Evaluator<'_, S> {
    fn property(&self, name: &str, index: Option<usize>) -> Result<PropertyValue<S>, ExprError> {
        let prop = self
            .subject
            .property(name)
            .ok_or_else(|| ExprError::UnknownProperty(name.to_owned()))?;
        match index {
            None => Ok(prop.value().clone()),
            Some(i) => prop.value().component(i).ok_or(ExprError::IndexOutOfRange {
                property: name.to_owned(),
                index: i,
            }),
        }
    }

    fn leaf(&self, value: PropertyValue<S>, label: &str) -> Result<Val<S>, ExprError> {
        let identity: Lift<S> = Rc::new(Ok);
        let (operand, unit) = match value {
            PropertyValue::Crisp { value, unit } => (Operand::Crisp(value), UnitPower::of(&unit)),
            PropertyValue::Verification(d) => (Operand::Crisp(d.value()), UnitPower::dimensionless()),
            PropertyValue::Fuzzy1 { set, unit } => (
                Operand::Fuzzy(Pending {
                    source: Source::Type1(set),
                    f: identity,
                }),
                UnitPower::of(&unit),
            ),
            PropertyValue::Fuzzy2 { set, unit } => (
                Operand::Fuzzy(Pending {
                    source: Source::Type2(set),
                    f: identity,
                }),
                UnitPower::of(&unit),
            ),
            PropertyValue::CrispTuple { .. } | PropertyValue::FuzzyTuple { .. } => {
                return Err(ExprError::TupleOperand(label.to_owned()))
            }
        };
        Ok(Val { operand, unit })
    }

    fn var(&self, name: &str) -> Result<Val<S>, ExprError> {
        match self.bindings.get(name) {
            Some(Binding::Scalar(x)) => Ok(Val {
                operand: Operand::Crisp(*x),
                unit: UnitPower::dimensionless(),
            }),
            Some(Binding::Value(v)) => self.leaf(v.clone(), name),
            None => {
                let source = self
                    .method
                    .params()
                    .iter()
                    .find(|p| p.name == name)
                    .and_then(|p| p.source.as_ref())
                    .ok_or_else(|| ExprError::UnboundParameter(name.to_owned()))?;
                let value = self.property(&source.property, source.index)?;
                self.leaf(value, &source.property)
            }
        }
    }

    fn eval(&self, e: &Expr<S>) -> Result<Val<S>, ExprError> {
        match e {
            Expr::Num(n) => Ok(Val {
                operand: Operand::Crisp(*n),
                unit: UnitPower::dimensionless(),
            }),
            Expr::Var(v) => self.var(v),
            Expr::Prop { name, index } => self.leaf(self.property(name, *index)?, name),
            Expr::Binary { op, lhs, rhs } => {
                let (l, r) = (self.eval(lhs)?, self.eval(rhs)?);
                let unit = bin_unit(*op, &l.unit, &r.unit, &r.operand)?;
                let op = *op;
                let operand = match (l.operand, r.operand) {
                    (Operand::Crisp(x), Operand::Crisp(y)) => Operand::Crisp(apply_bin(op, x, y)?),
                    (Operand::Fuzzy(p), Operand::Crisp(y)) => {
                        let f = p.f;
                        Operand::Fuzzy(Pending {
                            source: p.source,
                            f: Rc::new(move |x| apply_bin(op, f(x)?, y)),
                        })
                    }
                    (Operand::Crisp(x), Operand::Fuzzy(p)) => {
                        let f = p.f;
                        Operand::Fuzzy(Pending {
                            source: p.source,
                            f: Rc::new(move |y| apply_bin(op, x, f(y)?)),
                        })
                    }
                    (Operand::Fuzzy(_), Operand::Fuzzy(_)) => return Err(ExprError::MultiFuzzyOperands),
                };
                Ok(Val { operand, unit })
            }
            Expr::Call { func, arg } => {
                let a = self.eval(arg)?;
                let func = *func;
                let (unit, to_radians) = match func {
                    Func::Neg => (a.unit.clone(), S::one()),
                    Func::Sin | Func::Cos => {
                        let factor = match a.unit.base.as_deref() {
                            None | Some("rad") => S::one(),
                            Some("deg" | "°") if a.unit.is_angle() => S::of(std::f64::consts::PI / 180.0),
                            _ => return Err(a.unit.mismatch(&UnitPower::of("rad"))),
                        };
                        (UnitPower::dimensionless(), factor)
                    }
                    Func::Sqrt => {
                        if a.unit.exponent % 2 != 0 {
                            return Err(ExprError::Domain(format!("sqrt of a quantity in `{}`", a.unit)));
                        }
                        (UnitPower::normalized(a.unit.base.clone(), a.unit.exponent / 2), S::one())
                    }
                };
                let operand = match a.operand {
                    Operand::Crisp(x) => Operand::Crisp(apply_func(func, x, to_radians)?),
                    Operand::Fuzzy(p) => {
                        let f = p.f;
                        Operand::Fuzzy(Pending {
                            source: p.source,
                            f: Rc::new(move |x| apply_func(func, f(x)?, to_radians)),
                        })
                    }
                };
                Ok(Val { operand, unit })
            }
        }
    }
}

/// `Ok(())` when every guard atom holds on `subject`.
pub fn guard_holds<S: Scalar>(m: &MethodDef<S>, subject: &FuzzyObject<S>) -> Result<(), ExprError> {
    match m.failing_guard(|name| subject.property(name).map(|p| p.value())) {
        None => Ok(()),
        Some(atom) => Err(ExprError::GuardFailed {
            method: m.name().to_owned(),
            property: atom.property.clone(),
        }),
    }
}

/// Evaluates a method on a subject.
///
/// Crisp subexpressions fold numerically. A single fuzzy operand is carried
/// symbolically and pushed through the extension principle once at the end;
/// if two fuzzy operands meet at one operator evaluation fails. Parameters
/// take their binding, or else the subject property named as their source.
pub fn evaluate<S: Scalar>(
    m: &MethodDef<S>,
    subject: &FuzzyObject<S>,
    bindings: &Bindings<S>,
) -> Result<PropertyValue<S>, ExprError> {
    guard_holds(m, subject)?;
    let ev = Evaluator {
        method: m,
        subject,
        bindings,
    };
    let v = ev.eval(m.body())?;
    let unit = v.unit.to_string();
    Ok(match v.operand {
        Operand::Crisp(x) => PropertyValue::crisp(x, unit),
        Operand::Fuzzy(Pending {
            source: Source::Type1(set),
            f,
        }) => PropertyValue::fuzzy1(set.map_unary(|x| f(x))?, unit),
        Operand::Fuzzy(Pending {
            source: Source::Type2(set),
            f,
        }) => PropertyValue::fuzzy2(set.map_unary(|x| f(x))?, unit),
    })
}
