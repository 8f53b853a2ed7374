//! JSON documents for knowledge bases.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "classes": { "T(A)": { "properties": [...], "methods": [...] } },
//!   "objects": { "A": { "class": "T(A)", "properties": [...] } },
//!   "rules": [ { "name": "...", "dependent": "p5", "sources": ["p2"], "check": "all-equal-components" } ],
//!   "derivations": [ { "operation": "union", "inputs": ["A", "B"], "output": "..." } ]
//! }
//! ```
//!
//! Heterogeneous classes replace `properties`/`methods` with `core` and
//! `projections`. Saving is canonical: keys sorted, two-space indentation,
//! numbers with at most nine fractional digits and no trailing zeros.

use std::fmt::Write as _;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::expr::{ExprError, MethodDef, MethodKind, Param, PropertyRef};
use crate::fuzzy::{Type1FuzzySet, Type2FuzzySet};
use crate::kb::{Derivation, KbError, KnowledgeBase};
use crate::model::{
    ClassBody, ClassPart, FuzzyClass, FuzzyObject, FuzzyTuple, Projection, Property, PropertyValue, Signature,
    Specification, ValueKind,
};
use crate::modifier::{Check, DependencyRule, ModAction, Modifier, ModifierKind};
use crate::notation::format_scalar;
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    /// The document does not have the published shape.
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    /// The shape is fine but a domain invariant is broken.
    #[error("{path}: {message}")]
    Validation { path: String, message: String },
    /// An expression or guard does not parse.
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
}

impl LoadError {
    pub fn path(&self) -> &str {
        match self {
            LoadError::Schema { path, .. } | LoadError::Validation { path, .. } | LoadError::Parse { path, .. } => path,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Reject unknown keys instead of ignoring them.
    pub strict: bool,
}

/// Cursor into the document that knows where it is.
#[derive(Clone, Copy)]
struct At<'a> {
    value: &'a Value,
    path: &'a str,
    opts: LoadOptions,
}

fn schema(path: &str, message: impl Into<String>) -> LoadError {
    LoadError::Schema {
        path: path.to_owned(),
        message: message.into(),
    }
}

fn invalid(path: &str, message: impl ToString) -> LoadError {
    LoadError::Validation {
        path: path.to_owned(),
        message: message.to_string(),
    }
}

fn expr_error(path: &str, e: ExprError) -> LoadError {
    match e {
        ExprError::Parse {
            line,
            column,
            expected,
            found,
        } => LoadError::Parse {
            path: path.to_owned(),
            line,
            column,
            message: format!("expected {}, found {found}", expected.join(" or ")),
        },
        other => invalid(path, other),
    }
}

fn child_path(path: &str, key: &str) -> String {
    let plain = !key.is_empty() && key.chars().all(|c| c.is_alphanumeric() || c == '_');
    if plain {
        format!("{path}.{key}")
    } else {
        format!("{path}[{}]", Value::from(key))
    }
}

impl<'a> At<'a> {
    fn object(&self, allowed: &[&str]) -> Result<&'a Map<String, Value>, LoadError> {
        let map = self.value.as_object().ok_or_else(|| schema(self.path, "expected an object"))?;
        if self.opts.strict {
            if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(schema(&child_path(self.path, k), "unknown key"));
            }
        }
        Ok(map)
    }

    fn array(&self) -> Result<&'a [Value], LoadError> {
        self.value
            .as_array()
            .map(Vec::as_slice)
            .ok_or_else(|| schema(self.path, "expected an array"))
    }

    fn str(&self) -> Result<&'a str, LoadError> {
        self.value.as_str().ok_or_else(|| schema(self.path, "expected a string"))
    }

    fn num<S: Scalar>(&self) -> Result<S, LoadError> {
        self.value
            .as_f64()
            .map(S::of)
            .ok_or_else(|| schema(self.path, "expected a number"))
    }
}

/// Walks children with owned paths; the closure gets a borrowed cursor.
fn with<'a, T>(
    parent: &At<'a>,
    map: &'a Map<String, Value>,
    key: &str,
    f: impl FnOnce(At<'_>) -> Result<T, LoadError>,
) -> Result<T, LoadError> {
    let path = child_path(parent.path, key);
    let value = map.get(key).ok_or_else(|| schema(&path, "missing"))?;
    f(At {
        value,
        path: &path,
        opts: parent.opts,
    })
}

fn with_opt<'a, T>(
    parent: &At<'a>,
    map: &'a Map<String, Value>,
    key: &str,
    f: impl FnOnce(At<'_>) -> Result<T, LoadError>,
) -> Result<Option<T>, LoadError> {
    match map.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => with(parent, map, key, f).map(Some),
    }
}

fn each<'a, T>(at: &At<'a>, mut f: impl FnMut(At<'_>) -> Result<T, LoadError>) -> Result<Vec<T>, LoadError> {
    at.array()?
        .iter()
        .enumerate()
        .map(|(i, value)| {
            let path = format!("{}[{i}]", at.path);
            f(At {
                value,
                path: &path,
                opts: at.opts,
            })
        })
        .collect()
}

fn load_type1<S: Scalar>(at: At<'_>) -> Result<Type1FuzzySet<S>, LoadError> {
    let pairs = each(&at, |e| {
        let m = e.object(&["value", "membership"])?;
        Ok((
            with(&e, m, "value", |a| a.num())?,
            with(&e, m, "membership", |a| a.num())?,
        ))
    })?;
    Type1FuzzySet::new(pairs).map_err(|e| invalid(at.path, e))
}

fn load_type2<S: Scalar>(at: At<'_>) -> Result<Type2FuzzySet<S>, LoadError> {
    let pairs = each(&at, |e| {
        let m = e.object(&["value", "grades"])?;
        Ok((with(&e, m, "value", |a| a.num())?, with(&e, m, "grades", load_type1)?))
    })?;
    Type2FuzzySet::new(pairs).map_err(|e| invalid(at.path, e))
}

fn load_value<S: Scalar>(kind: ValueKind, unit: String, at: At<'_>) -> Result<PropertyValue<S>, LoadError> {
    let v = match kind {
        ValueKind::Crisp => PropertyValue::crisp(at.num()?, unit),
        ValueKind::CrispTuple => PropertyValue::crisp_tuple(each(&at, |a| a.num())?, unit).map_err(|e| invalid(at.path, e))?,
        ValueKind::Fuzzy1 => PropertyValue::fuzzy1(load_type1(at)?, unit),
        ValueKind::Fuzzy2 => PropertyValue::fuzzy2(load_type2(at)?, unit),
        ValueKind::Fuzzy1Tuple => PropertyValue::fuzzy_tuple(FuzzyTuple::Type1(each(&at, load_type1)?), unit)
            .map_err(|e| invalid(at.path, e))?,
        ValueKind::Fuzzy2Tuple => PropertyValue::fuzzy_tuple(FuzzyTuple::Type2(each(&at, load_type2)?), unit)
            .map_err(|e| invalid(at.path, e))?,
        ValueKind::Verification => PropertyValue::verification(at.num()?).map_err(|e| invalid(at.path, e))?,
    };
    Ok(v)
}

fn kind_from_name(name: &str) -> Option<ValueKind> {
    [
        ValueKind::Crisp,
        ValueKind::CrispTuple,
        ValueKind::Fuzzy1,
        ValueKind::Fuzzy2,
        ValueKind::Fuzzy1Tuple,
        ValueKind::Fuzzy2Tuple,
        ValueKind::Verification,
    ]
    .into_iter()
    .find(|k| k.as_str() == name)
}

fn load_property<S: Scalar>(at: At<'_>) -> Result<Property<S>, LoadError> {
    let m = at.object(&["name", "type", "unit", "value"])?;
    let name = with(&at, m, "name", |a| a.str().map(str::to_owned))?;
    let kind = with(&at, m, "type", |a| {
        let s = a.str()?;
        kind_from_name(s).ok_or_else(|| schema(a.path, format!("unknown property type `{s}`")))
    })?;
    let unit = with_opt(&at, m, "unit", |a| a.str().map(str::to_owned))?.unwrap_or_default();
    if kind == ValueKind::Verification && !unit.is_empty() {
        return Err(invalid(&child_path(at.path, "unit"), "verification degrees carry no unit"));
    }
    let value = with(&at, m, "value", |a| load_value(kind, unit, a))?;
    Property::new(name, value).map_err(|e| invalid(at.path, e))
}

fn load_spec<S: Scalar>(at: At<'_>) -> Result<Specification<S>, LoadError> {
    Specification::new(each(&at, load_property)?).map_err(|e| invalid(at.path, e))
}

fn load_method<S: Scalar>(at: At<'_>) -> Result<MethodDef<S>, LoadError> {
    let m = at.object(&["name", "params", "body", "guard", "kind"])?;
    let name = with(&at, m, "name", |a| a.str().map(str::to_owned))?;
    let params = with_opt(&at, m, "params", |a| {
        each(&a, |p| {
            let pm = p.object(&["name", "source"])?;
            let pname = with(&p, pm, "name", |a| a.str().map(str::to_owned))?;
            let source = with_opt(&p, pm, "source", |s| {
                let sm = s.object(&["property", "index"])?;
                let property = with(&s, sm, "property", |a| a.str().map(str::to_owned))?;
                let index = with_opt(&s, sm, "index", |a| {
                    a.value
                        .as_u64()
                        .map(|i| i as usize)
                        .ok_or_else(|| schema(a.path, "expected a non-negative integer"))
                })?;
                Ok(PropertyRef::new(property, index))
            })?;
            Ok(Param::new(pname, source))
        })
    })?
    .unwrap_or_default();
    let kind = with_opt(&at, m, "kind", |a| match a.str()? {
        "exploiter" => Ok(MethodKind::Exploiter),
        "modifier" => Ok(MethodKind::Modifier),
        other => Err(schema(a.path, format!("unknown method kind `{other}`"))),
    })?
    .unwrap_or_default();
    let body_path = child_path(at.path, "body");
    let body = with(&at, m, "body", |a| a.str().map(str::to_owned))?;
    let guard = with_opt(&at, m, "guard", |a| a.str().map(str::to_owned))?.unwrap_or_default();
    let body_expr = crate::expr::parse_expr::<S>(&body).map_err(|e| expr_error(&body_path, e))?;
    let guard_atoms = if guard.trim().is_empty() {
        Vec::new()
    } else {
        crate::expr::parse_guard::<S>(&guard).map_err(|e| expr_error(&child_path(at.path, "guard"), e))?
    };
    MethodDef::new(name, params, body_expr, guard_atoms, kind).map_err(|e| expr_error(at.path, e))
}

/// Generated classes may keep methods that read properties held only by
/// their member objects, so missing names are tolerated for them. Guards on
/// properties that are present must still test verification degrees.
fn check_method<S: Scalar>(meth: &MethodDef<S>, spec: &Specification<S>, generated: bool) -> Result<(), ExprError> {
    if !generated {
        return meth.check_against(spec);
    }
    for atom in meth.guard() {
        if let Some(p) = spec.get(&atom.property) {
            if p.value().kind() != ValueKind::Verification {
                return Err(ExprError::NotVerification(atom.property.clone()));
            }
        }
    }
    Ok(())
}

fn load_part<S: Scalar>(at: &At<'_>, m: &Map<String, Value>, generated: bool) -> Result<ClassPart<S>, LoadError> {
    let spec = with_opt(at, m, "properties", load_spec)?.unwrap_or_else(Specification::empty);
    let methods = with_opt(at, m, "methods", |a| each(&a, load_method))?.unwrap_or_default();
    let sig = Signature::new(methods).map_err(|e| invalid(&child_path(at.path, "methods"), e))?;
    for (i, meth) in sig.iter().enumerate() {
        check_method(meth, &spec, generated)
            .map_err(|e| invalid(&format!("{}[{i}]", child_path(at.path, "methods")), e))?;
    }
    Ok(ClassPart::new(spec, sig))
}

fn load_class<S: Scalar>(name: &str, at: At<'_>, generated: bool) -> Result<FuzzyClass<S>, LoadError> {
    let m = at.object(&["properties", "methods", "core", "projections"])?;
    if m.contains_key("projections") {
        if m.contains_key("properties") || m.contains_key("methods") {
            return Err(schema(at.path, "a class has either `properties`/`methods` or `core`/`projections`"));
        }
        let core = with_opt(&at, m, "core", |a| load_part(&a, a.object(&["properties", "methods"])?, generated))?
            .unwrap_or_default();
        let projections = with(&at, m, "projections", |a| {
            each(&a, |p| {
                let pm = p.object(&["label", "properties", "methods"])?;
                let label = with(&p, pm, "label", |a| a.str().map(str::to_owned))?;
                let props = with_opt(&p, pm, "properties", load_spec)?.unwrap_or_else(Specification::empty);
                let methods = with_opt(&p, pm, "methods", |a| each(&a, load_method))?.unwrap_or_default();
                let sig = Signature::new(methods).map_err(|e| invalid(&child_path(p.path, "methods"), e))?;
                let merged = Specification::new(core.spec.iter().chain(props.iter()).cloned().collect())
                    .map_err(|e| invalid(p.path, e))?;
                for (i, meth) in core.sig.iter().chain(sig.iter()).enumerate() {
                    check_method(meth, &merged, generated)
                        .map_err(|e| invalid(&format!("{}.methods[{i}]", p.path), e))?;
                }
                Ok(Projection {
                    label,
                    part: ClassPart::new(props, sig),
                })
            })
        })?;
        FuzzyClass::heterogeneous(name, core, projections).map_err(|e| invalid(at.path, e))
    } else {
        FuzzyClass::homogeneous(name, load_part(&at, m, generated)?).map_err(|e| invalid(at.path, e))
    }
}

fn load_object<S: Scalar>(id: &str, at: At<'_>) -> Result<FuzzyObject<S>, LoadError> {
    let m = at.object(&["class", "properties"])?;
    let class = with(&at, m, "class", |a| a.str().map(str::to_owned))?;
    let spec = with(&at, m, "properties", load_spec)?;
    FuzzyObject::new(id, class, spec).map_err(|e| invalid(at.path, e))
}

fn load_rule<S: Scalar>(at: At<'_>) -> Result<DependencyRule<S>, LoadError> {
    let m = at.object(&["name", "dependent", "sources", "check", "value", "min", "max"])?;
    let name = with_opt(&at, m, "name", |a| a.str().map(str::to_owned))?;
    let dependent = with(&at, m, "dependent", |a| a.str().map(str::to_owned))?;
    let sources = with(&at, m, "sources", |a| each(&a, |s| s.str().map(str::to_owned)))?;
    let check = with(&at, m, "check", |a| match a.str()? {
        "all-equal-components" => Ok(Check::AllEqualComponents),
        "all-components-equal-constant" => Ok(Check::AllComponentsEqual {
            value: with(&at, m, "value", |v| v.num())?,
        }),
        "custom-degree-bound" => Ok(Check::DegreeBound {
            min: with(&at, m, "min", |v| v.num())?,
            max: with(&at, m, "max", |v| v.num())?,
        }),
        other => Err(schema(a.path, format!("unknown check `{other}`"))),
    })?;
    DependencyRule::new(name, dependent, sources, check).map_err(|e| invalid(at.path, e))
}

fn load_derivation(at: At<'_>) -> Result<Derivation, LoadError> {
    let m = at.object(&["operation", "inputs", "output"])?;
    Ok(Derivation {
        operation: with(&at, m, "operation", |a| a.str().map(str::to_owned))?,
        inputs: with(&at, m, "inputs", |a| each(&a, |s| s.str().map(str::to_owned)))?,
        output: with(&at, m, "output", |a| a.str().map(str::to_owned))?,
    })
}

fn kb_error(path: String, e: KbError) -> LoadError {
    LoadError::Validation {
        path,
        message: e.to_string(),
    }
}

/// Parses and fully validates a document.
pub fn load<S: Scalar>(bytes: &[u8], opts: LoadOptions) -> Result<KnowledgeBase<S>, LoadError> {
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| LoadError::Parse {
        path: "$".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let root = At {
        value: &doc,
        path: "$",
        opts,
    };
    let m = root.object(&["format_version", "classes", "objects", "rules", "derivations"])?;
    let version = with(&root, m, "format_version", |a| {
        a.value.as_u64().ok_or_else(|| schema(a.path, "expected a positive integer"))
    })?;
    if version != FORMAT_VERSION {
        return Err(schema("$.format_version", format!("unsupported version {version}")));
    }
    let mut kb = KnowledgeBase::new();
    let for_keyed = |key: &str| -> Result<Option<&Map<String, Value>>, LoadError> {
        match m.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_object()
                .map(Some)
                .ok_or_else(|| schema(&child_path("$", key), "expected an object")),
        }
    };
    // Outputs named by the log; the log itself is validated further down.
    let generated: Vec<&str> = m
        .get("derivations")
        .and_then(Value::as_array)
        .into_iter()
        .flatten()
        .filter_map(|d| d.get("output").and_then(Value::as_str))
        .collect();
    for (name, value) in for_keyed("classes")?.into_iter().flatten() {
        let p = child_path("$.classes", name);
        let class = load_class(name, At { value, path: &p, opts }, generated.contains(&name.as_str()))?;
        kb.add_class(class).map_err(|e| kb_error(p.clone(), e))?;
    }
    let objects = for_keyed("objects")?;
    for (id, value) in objects.into_iter().flatten() {
        let p = child_path("$.objects", id);
        let obj = load_object(id, At { value, path: &p, opts })?;
        let class_path = child_path(&p, "class");
        kb.add_object(obj).map_err(|e| kb_error(class_path, e))?;
    }
    if let Some(rules) = with_opt(&root, m, "rules", |a| each(&a, |r| Ok((load_rule(r)?, r.path.to_owned()))))? {
        for (rule, p) in rules {
            kb.add_rule(rule).map_err(|e| kb_error(p, e))?;
        }
    }
    if let Some(ds) = with_opt(&root, m, "derivations", |a| {
        each(&a, |d| Ok((load_derivation(d)?, d.path.to_owned())))
    })? {
        for (d, p) in ds {
            kb.add_derivation(d).map_err(|e| kb_error(format!("{p}.output"), e))?;
        }
    }
    Ok(kb)
}

fn load_action<S: Scalar>(at: At<'_>) -> Result<(String, ModAction<S>), LoadError> {
    let m = at.object(&["target", "action", "type", "unit", "value", "k", "n", "var", "expr"])?;
    let target = with(&at, m, "target", |a| a.str().map(str::to_owned))?;
    let exponent = |key: &str| {
        with(&at, m, key, |a| {
            a.value
                .as_i64()
                .ok_or_else(|| schema(a.path, "expected an integer"))
        })
    };
    let value = || -> Result<PropertyValue<S>, LoadError> {
        let kind = with(&at, m, "type", |a| {
            let s = a.str()?;
            kind_from_name(s).ok_or_else(|| schema(a.path, format!("unknown property type `{s}`")))
        })?;
        let unit = with_opt(&at, m, "unit", |a| a.str().map(str::to_owned))?.unwrap_or_default();
        with(&at, m, "value", |a| load_value(kind, unit, a))
    };
    let action = with(&at, m, "action", |a| match a.str()? {
        "set" => Ok(ModAction::SetValue(value()?)),
        "add" => Ok(ModAction::Add(value()?)),
        "remove" => Ok(ModAction::Remove),
        "dilute" => Ok(ModAction::Dilute(exponent("k")?)),
        "concentrate" => Ok(ModAction::Concentrate(exponent("n")?)),
        "map" => {
            let var = with(&at, m, "var", |a| a.str().map(str::to_owned))?;
            let expr_path = child_path(at.path, "expr");
            let text = with(&at, m, "expr", |a| a.str().map(str::to_owned))?;
            let expr = crate::expr::parse_expr::<S>(&text).map_err(|e| expr_error(&expr_path, e))?;
            if let Some(v) = expr.vars().into_iter().find(|v| *v != var) {
                return Err(invalid(&expr_path, format!("`{v}` is not the mapped variable `{var}`")));
            }
            Ok(ModAction::MapValues { var, expr })
        }
        other => Err(schema(a.path, format!("unknown action `{other}`"))),
    })?;
    Ok((target, action))
}

/// Parses a modifier document: `{"kind": "partial", "actions": [...]}`.
///
/// Each action names a `target` property and an `action`: `set` and `add`
/// carry `type`, `unit` and `value` like a property; `dilute` takes `k`,
/// `concentrate` takes `n`; `map` takes `var` and `expr`; `remove` takes
/// nothing.
pub fn load_modifier<S: Scalar>(bytes: &[u8], opts: LoadOptions) -> Result<Modifier<S>, LoadError> {
    let doc: Value = serde_json::from_slice(bytes).map_err(|e| LoadError::Parse {
        path: "$".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let root = At {
        value: &doc,
        path: "$",
        opts,
    };
    let m = root.object(&["kind", "actions"])?;
    let kind = with(&root, m, "kind", |a| {
        let s = a.str()?;
        ModifierKind::from_name(s).ok_or_else(|| schema(a.path, format!("unknown modifier kind `{s}`")))
    })?;
    let actions = with_opt(&root, m, "actions", |a| each(&a, load_action))?.unwrap_or_default();
    Modifier::new(kind, actions).map_err(|e| invalid("$", e))
}

fn num<S: Scalar>(x: S) -> Value {
    // Stored as the rendered decimal so the writer prints it verbatim.
    let text = format_scalar(x);
    Value::Number(serde_json::Number::from_f64(text.parse().expect("rendered decimal")).expect("finite"))
}

fn type1_json<S: Scalar>(s: &Type1FuzzySet<S>) -> Value {
    Value::Array(
        s.elements()
            .iter()
            .map(|&(v, m)| obj([("value", num(v)), ("membership", num(m))]))
            .collect(),
    )
}

fn type2_json<S: Scalar>(s: &Type2FuzzySet<S>) -> Value {
    Value::Array(
        s.elements()
            .iter()
            .map(|(v, g)| obj([("value", num(*v)), ("grades", type1_json(g))]))
            .collect(),
    )
}

fn obj<const N: usize>(entries: [(&str, Value); N]) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_owned(), v)).collect())
}

/// Document form of one property.
pub fn property_to_value<S: Scalar>(p: &Property<S>) -> Value {
    let v = p.value();
    let value = match v {
        PropertyValue::Crisp { value, .. } => num(*value),
        PropertyValue::CrispTuple { values, .. } => Value::Array(values.iter().map(|x| num(*x)).collect()),
        PropertyValue::Fuzzy1 { set, .. } => type1_json(set),
        PropertyValue::Fuzzy2 { set, .. } => type2_json(set),
        PropertyValue::FuzzyTuple {
            sets: FuzzyTuple::Type1(s),
            ..
        } => Value::Array(s.iter().map(type1_json).collect()),
        PropertyValue::FuzzyTuple {
            sets: FuzzyTuple::Type2(s),
            ..
        } => Value::Array(s.iter().map(type2_json).collect()),
        PropertyValue::Verification(d) => num(d.value()),
    };
    let mut m = Map::new();
    m.insert("name".into(), p.name().into());
    m.insert("type".into(), v.kind().as_str().into());
    if let Some(unit) = v.unit() {
        m.insert("unit".into(), unit.into());
    }
    m.insert("value".into(), value);
    Value::Object(m)
}

fn method_json<S: Scalar>(meth: &MethodDef<S>) -> Value {
    let params = meth
        .params()
        .iter()
        .map(|p| {
            let mut m = Map::new();
            m.insert("name".into(), p.name.clone().into());
            if let Some(src) = &p.source {
                let mut s = Map::new();
                s.insert("property".into(), src.property.clone().into());
                if let Some(i) = src.index {
                    s.insert("index".into(), i.into());
                }
                m.insert("source".into(), Value::Object(s));
            }
            Value::Object(m)
        })
        .collect();
    obj([
        ("name", meth.name().into()),
        ("params", Value::Array(params)),
        ("body", meth.body().to_string().into()),
        ("guard", meth.guard_text().into()),
        ("kind", meth.kind().as_str().into()),
    ])
}

fn part_entries<S: Scalar>(part: &ClassPart<S>, m: &mut Map<String, Value>) {
    m.insert("properties".into(), Value::Array(part.spec.iter().map(property_to_value).collect()));
    m.insert("methods".into(), Value::Array(part.sig.iter().map(method_json).collect()));
}

/// Document form of a class body, without its name.
pub fn class_to_value<S: Scalar>(c: &FuzzyClass<S>) -> Value {
    let mut m = Map::new();
    match c.body() {
        ClassBody::Homogeneous(part) => part_entries(part, &mut m),
        ClassBody::Heterogeneous { core, projections } => {
            let mut cm = Map::new();
            part_entries(core, &mut cm);
            m.insert("core".into(), Value::Object(cm));
            let prs = projections
                .iter()
                .map(|p| {
                    let mut pm = Map::new();
                    pm.insert("label".into(), p.label.clone().into());
                    part_entries(&p.part, &mut pm);
                    Value::Object(pm)
                })
                .collect();
            m.insert("projections".into(), Value::Array(prs));
        }
    }
    Value::Object(m)
}

fn rule_json<S: Scalar>(r: &DependencyRule<S>) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), r.name().into());
    m.insert("dependent".into(), r.dependent().into());
    m.insert(
        "sources".into(),
        Value::Array(r.sources().iter().map(|s| s.clone().into()).collect()),
    );
    m.insert("check".into(), r.check().name().into());
    match r.check() {
        Check::AllEqualComponents => {}
        Check::AllComponentsEqual { value } => {
            m.insert("value".into(), num(*value));
        }
        Check::DegreeBound { min, max } => {
            m.insert("min".into(), num(*min));
            m.insert("max".into(), num(*max));
        }
    }
    Value::Object(m)
}

/// Document form of an object, without its id.
pub fn object_to_value<S: Scalar>(o: &FuzzyObject<S>) -> Value {
    obj([
        ("class", o.class_name().into()),
        ("properties", Value::Array(o.spec().iter().map(property_to_value).collect())),
    ])
}

/// The document tree for `kb`, before canonical rendering.
pub fn to_value<S: Scalar>(kb: &KnowledgeBase<S>) -> Value {
    let classes = kb.classes().map(|c| (c.name().to_owned(), class_to_value(c))).collect();
    let objects = kb
        .objects()
        .map(|o| (o.id().to_owned(), object_to_value(o)))
        .collect();
    let derivations = kb
        .derivations()
        .iter()
        .map(|d| {
            obj([
                ("operation", d.operation.clone().into()),
                ("inputs", Value::Array(d.inputs.iter().map(|s| s.clone().into()).collect())),
                ("output", d.output.clone().into()),
            ])
        })
        .collect();
    obj([
        ("format_version", FORMAT_VERSION.into()),
        ("classes", Value::Object(classes)),
        ("objects", Value::Object(objects)),
        ("rules", Value::Array(kb.rules().iter().map(rule_json).collect())),
        ("derivations", Value::Array(derivations)),
    ])
}

/// Canonical rendering of any JSON value.
pub fn to_canonical_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => write!(out, "{u}").expect("string write"),
            (None, Some(i), _) => write!(out, "{i}").expect("string write"),
            (None, None, Some(f)) => out.push_str(&format_scalar(f)),
            _ => unreachable!("json numbers are u64, i64 or f64"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[k.as_str()], depth + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// Canonical document bytes for `kb`.
pub fn save<S: Scalar>(kb: &KnowledgeBase<S>) -> Vec<u8> {
    to_canonical_string(&to_value(kb)).into_bytes()
}
