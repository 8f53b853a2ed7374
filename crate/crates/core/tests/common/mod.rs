#![allow(dead_code)]

use std::path::PathBuf;

use foodn::algebra::{core_and_projections, EmptyNamespace};
use foodn::expr::{BinOp, Func};
use foodn::{
    check_consistency, concentration, dilution, eq_property, Check, ClassPart, Degree, DependencyRule, Expr,
    FuzzyClass, FuzzyObject, FuzzyTuple, KnowledgeBase, LoadOptions, MethodDef, MethodKind, ModAction, Mode,
    Modifier, Param, Property, PropertyValue, Signature, Specification, Type1FuzzySet, Type2FuzzySet, Typed,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn load_fixture(name: &str) -> KnowledgeBase {
    let bytes = std::fs::read(fixture(name)).expect("fixture exists");
    foodn::load(&bytes, LoadOptions { strict: true }).expect("fixture loads")
}

pub fn load_modifier_fixture(name: &str) -> Modifier {
    let bytes = std::fs::read(fixture(name)).expect("fixture exists");
    foodn::load_modifier(&bytes, LoadOptions { strict: true }).expect("modifier loads")
}

pub fn part(kb: &KnowledgeBase, class: &str) -> ClassPart {
    kb.class(class).unwrap().as_homogeneous().unwrap().clone()
}

pub fn prop_names(spec: &Specification) -> Vec<&str> {
    spec.names().collect()
}

pub fn method_names(sig: &Signature) -> Vec<&str> {
    sig.names().collect()
}

// ---- generators ----

fn grid(k: i32) -> f64 {
    f64::from(k) / 10.0
}

fn mu(k: u32) -> f64 {
    f64::from(k) / 20.0
}

pub fn arb_type1() -> impl Strategy<Value = Type1FuzzySet> {
    prop::collection::btree_map(-500i32..500, 1u32..=20, 1..5)
        .prop_map(|m| Type1FuzzySet::new(m.into_iter().map(|(v, g)| (grid(v), mu(g)))).unwrap())
}

pub fn arb_grade_set() -> impl Strategy<Value = Type1FuzzySet> {
    prop::collection::btree_map(0u32..=20, 1u32..=20, 1..4)
        .prop_map(|m| Type1FuzzySet::new(m.into_iter().map(|(v, g)| (mu(v), mu(g)))).unwrap())
}

pub fn arb_type2() -> impl Strategy<Value = Type2FuzzySet> {
    prop::collection::btree_map(-500i32..500, arb_grade_set(), 1..4)
        .prop_map(|m| Type2FuzzySet::new(m.into_iter().map(|(v, g)| (grid(v), g))).unwrap())
}

pub fn arb_unit() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["", "cm", "deg", "sd."]).prop_map(str::to_owned)
}

pub fn arb_value() -> impl Strategy<Value = PropertyValue> {
    prop_oneof![
        ((-500i32..500), arb_unit()).prop_map(|(v, u)| PropertyValue::crisp(grid(v), u)),
        (prop::collection::vec(-500i32..500, 1..5), arb_unit())
            .prop_map(|(v, u)| PropertyValue::crisp_tuple(v.into_iter().map(grid).collect(), u).unwrap()),
        (arb_type1(), arb_unit()).prop_map(|(s, u)| PropertyValue::fuzzy1(s, u)),
        (arb_type2(), arb_unit()).prop_map(|(s, u)| PropertyValue::fuzzy2(s, u)),
        (prop::collection::vec(arb_type1(), 1..4), arb_unit())
            .prop_map(|(s, u)| PropertyValue::fuzzy_tuple(FuzzyTuple::Type1(s), u).unwrap()),
        (prop::collection::vec(arb_type2(), 1..3), arb_unit())
            .prop_map(|(s, u)| PropertyValue::fuzzy_tuple(FuzzyTuple::Type2(s), u).unwrap()),
        (0u32..=20).prop_map(|d| PropertyValue::verification(mu(d)).unwrap()),
    ]
}

pub fn arb_spec(max: usize) -> impl Strategy<Value = Specification> {
    prop::collection::btree_map(0usize..8, arb_value(), 1..=max).prop_map(|m| {
        Specification::new(
            m.into_iter()
                .map(|(i, v)| Property::new(format!("p{i}"), v).unwrap())
                .collect(),
        )
        .unwrap()
    })
}

const BODIES: [&str; 4] = ["4*a", "a^2", "a + 1", "2*sin(a)"];

pub fn arb_signature() -> impl Strategy<Value = Signature> {
    prop::collection::btree_map(0usize..4, 0usize..BODIES.len(), 0..4).prop_map(|m| {
        Signature::new(
            m.into_iter()
                .map(|(i, b)| {
                    MethodDef::parse(format!("f{i}"), vec![Param::new("a", None)], BODIES[b], "", MethodKind::Exploiter)
                        .unwrap()
                })
                .collect(),
        )
        .unwrap()
    })
}

pub fn arb_part(max: usize) -> impl Strategy<Value = ClassPart> {
    (arb_spec(max), arb_signature()).prop_map(|(s, g)| ClassPart::new(s, g))
}

/// Parts whose properties come from a small per-name menu, so equal and
/// equivalent pairs show up often.
pub fn arb_menu_part() -> impl Strategy<Value = ClassPart> {
    let menu = |name: usize, choice: usize, shift: i32| -> PropertyValue {
        match (name % 3, choice) {
            (0, c) => PropertyValue::crisp(f64::from(c as u8), "sd."),
            (1, c) => {
                let pairs = [[(1.0, 0.5), (2.0, 1.0)], [(1.0, 1.0), (2.0, 0.5)], [(1.0, 0.5), (3.0, 1.0)]][c];
                PropertyValue::fuzzy1(
                    Type1FuzzySet::new(pairs.iter().map(|&(v, m)| (v + f64::from(shift), m))).unwrap(),
                    "cm",
                )
            }
            (_, c) => PropertyValue::verification([1.0, 0.8, 0.5][c]).unwrap(),
        }
    };
    let props = prop::collection::btree_map(0usize..6, (0usize..3, -2i32..3), 0..=6);
    let methods = prop::collection::btree_map(0usize..3, (0usize..2, 0usize..2), 0..3);
    (props, methods).prop_map(move |(p, m)| {
        let spec = Specification::new(
            p.into_iter()
                .map(|(i, (c, s))| Property::new(format!("p{i}"), menu(i, c, s)).unwrap())
                .collect(),
        )
        .unwrap();
        let sig = Signature::new(
            m.into_iter()
                .map(|(i, (body, param))| {
                    let x = ["a", "b"][param];
                    let text = ["4*x", "x^2"][body].replace('x', x);
                    MethodDef::parse(format!("f{i}"), vec![Param::new(x, None)], &text, "", MethodKind::Exploiter).unwrap()
                })
                .collect(),
        )
        .unwrap();
        ClassPart::new(spec, sig)
    })
}

pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..10_000).prop_map(|k| Expr::Num(f64::from(k) / 100.0)),
        prop::sample::select(vec!["a", "b", "c"]).prop_map(|v| Expr::Var(v.to_owned())),
        (prop::sample::select(vec!["p", "q"]), prop::option::of(0usize..4)).prop_map(|(n, index)| Expr::Prop {
            name: n.to_owned(),
            index
        }),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (
                prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow]),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (prop::sample::select(vec![Func::Sin, Func::Cos, Func::Sqrt, Func::Neg]), inner)
                .prop_map(|(f, a)| Expr::call(f, a)),
        ]
    })
}

/// A homogeneous class and an object with the class's exact values.
pub fn arb_kb() -> impl Strategy<Value = KnowledgeBase> {
    prop::collection::vec((arb_spec(4), arb_signature(), 0usize..3), 0..4).prop_map(|classes| {
        let mut kb = KnowledgeBase::new();
        for (i, (spec, sig, n_obj)) in classes.into_iter().enumerate() {
            let name = format!("C{i}");
            let class = FuzzyClass::homogeneous(&name, ClassPart::new(spec.clone(), sig)).unwrap();
            kb.add_class(class).unwrap();
            for j in 0..n_obj {
                kb.add_object(FuzzyObject::new(format!("o{i}_{j}"), &name, spec.clone()).unwrap())
                    .unwrap();
            }
            let quantities: Vec<String> = spec
                .iter()
                .filter(|p| p.value().kind().is_quantitative())
                .map(|p| p.name().to_owned())
                .collect();
            if let Some(v) = spec.iter().find(|p| p.value().degree().is_some()) {
                let check = if i % 2 == 0 {
                    Check::DegreeBound { min: 0.25, max: 1.0 }
                } else {
                    Check::AllEqualComponents
                };
                let rule = DependencyRule::new(None, v.name(), quantities, check).unwrap();
                kb.add_rule(rule).unwrap();
            }
            if n_obj > 0 {
                kb.add_derivation(foodn::Derivation {
                    operation: "clone".into(),
                    inputs: vec![format!("o{i}_0")],
                    output: name.clone(),
                })
                .unwrap();
            }
        }
        kb
    })
}

// ---- laws ----

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(TestCaseError::fail(format!($($msg)+)));
        }
    };
}

pub fn law_equivalence(p: &PropertyValue, q: &PropertyValue) -> Result<(), TestCaseError> {
    let a = Property::new("x", p.clone()).unwrap();
    let b = Property::new("x", q.clone()).unwrap();
    ensure!(eq_property(&a, &a), "not reflexive on {p}");
    ensure!(eq_property(&a, &b) == eq_property(&b, &a), "not symmetric on {p} / {q}");
    Ok(())
}

pub fn law_translation(set: &Type1FuzzySet, t2: &Type2FuzzySet, shift: i32, unit: &str) -> Result<(), TestCaseError> {
    let c = grid(shift);
    let moved = set.map_unary::<foodn::FuzzyError>(|v| Ok(v + c)).unwrap();
    let a = Property::new("x", PropertyValue::fuzzy1(set.clone(), unit)).unwrap();
    let b = Property::new("x", PropertyValue::fuzzy1(moved, unit)).unwrap();
    ensure!(eq_property(&a, &b), "translation by {c} broke equivalence of {set}");
    let moved2 = t2.map_unary::<foodn::FuzzyError>(|v| Ok(v + c)).unwrap();
    let a = Property::new("x", PropertyValue::fuzzy2(t2.clone(), unit)).unwrap();
    let b = Property::new("x", PropertyValue::fuzzy2(moved2, unit)).unwrap();
    ensure!(eq_property(&a, &b), "translation by {c} broke equivalence of {t2}");
    Ok(())
}

pub fn law_reconstruction(parts: &[ClassPart]) -> Result<(), TestCaseError> {
    let labels: Vec<String> = (0..parts.len()).map(|i| format!("o{i}")).collect();
    let input: Vec<(&str, &ClassPart)> = labels.iter().map(String::as_str).zip(parts).collect();
    let d = core_and_projections(&input);
    for (label, part) in &input {
        let pr = d.projection(label).expect("one projection per part");
        let mut names: Vec<&str> = d.core.spec.names().chain(pr.spec.names()).collect();
        let mut want: Vec<&str> = part.spec.names().collect();
        names.sort_unstable();
        want.sort_unstable();
        ensure!(names == want, "property names of {label} not reconstructed");
        let mut m: Vec<&str> = d.core.sig.names().chain(pr.sig.names()).collect();
        let mut wm: Vec<&str> = part.sig.names().collect();
        m.sort_unstable();
        wm.sort_unstable();
        ensure!(m == wm, "method names of {label} not reconstructed");
        for p in pr.spec.iter() {
            ensure!(part.spec.get(p.name()) == Some(p), "projection altered {}", p.name());
        }
        for p in d.core.spec.iter() {
            ensure!(
                part.spec.get(p.name()).is_some_and(|q| eq_property(p, q)),
                "core property {} not equivalent in {label}",
                p.name()
            );
        }
        let order: Vec<&str> = part.spec.names().filter(|n| pr.spec.get(n).is_some()).collect();
        ensure!(order == prop_names(&pr.spec), "projection order differs for {label}");
    }
    Ok(())
}

pub fn law_immutability(a: &ClassPart, b: &ClassPart) -> Result<(), TestCaseError> {
    let ca = FuzzyClass::homogeneous("TA", a.clone());
    let cb = FuzzyClass::homogeneous("TB", b.clone());
    let (Ok(ca), Ok(cb)) = (ca, cb) else { return Ok(()) };
    let (Ok(oa), Ok(ob)) = (
        FuzzyObject::new("A", "TA", a.spec.clone()),
        FuzzyObject::new("B", "TB", b.spec.clone()),
    ) else {
        return Ok(());
    };
    let snapshot = (oa.clone(), ob.clone(), ca.clone(), cb.clone());
    let ta = Typed::new(&oa, &ca).unwrap();
    let tb = Typed::new(&ob, &cb).unwrap();
    let ns = EmptyNamespace;
    let _ = foodn::union(&ns, &[ta, tb]);
    let _ = foodn::intersection(&ns, &[ta, tb]);
    let _ = foodn::difference(&ns, ta, tb);
    let _ = foodn::symmetric_difference(&ns, ta, tb);
    let copy = foodn::clone_object(&ns, &oa, 1).unwrap();
    ensure!(copy.spec() == oa.spec(), "clone differs from its original");
    ensure!(
        snapshot == (oa, ob, ca, cb),
        "an exploiter changed its inputs"
    );
    Ok(())
}

pub fn law_hedges(d: f64, k: i64) -> Result<(), TestCaseError> {
    let deg = Degree::new(d).unwrap();
    let dil = dilution(&deg, k).unwrap();
    let con = concentration(&deg, k).unwrap();
    ensure!(dil.value() >= d - 1e-12, "dilution lowered {d}");
    ensure!(con.value() <= d + 1e-12, "concentration raised {d}");
    let back = concentration(&dil, k).unwrap();
    ensure!((back.value() - d).abs() < 1e-9, "dilute/concentrate by {k} not inverse at {d}");
    Ok(())
}

fn side_rule() -> DependencyRule {
    DependencyRule::new(Some("sides".into()), "eq", vec!["sides".into()], Check::AllEqualComponents).unwrap()
}

fn angle_rule() -> DependencyRule {
    DependencyRule::new(
        Some("right".into()),
        "rt",
        vec!["angles".into()],
        Check::AllComponentsEqual { value: 90.0 },
    )
    .unwrap()
}

/// A consistent object: `eq` reflects `sides`, `rt` reflects `angles`.
pub fn polygon(sides: &[f64], angles: &[f64]) -> (FuzzyObject, FuzzyClass) {
    let mut spec = Specification::new(vec![
        Property::new("sides", PropertyValue::crisp_tuple(sides.to_vec(), "cm").unwrap()).unwrap(),
        Property::new("angles", PropertyValue::crisp_tuple(angles.to_vec(), "deg").unwrap()).unwrap(),
        Property::new("eq", PropertyValue::verification(1.0).unwrap()).unwrap(),
        Property::new("rt", PropertyValue::verification(1.0).unwrap()).unwrap(),
    ])
    .unwrap();
    let mut fixed = Vec::new();
    for rule in [side_rule(), angle_rule()] {
        let d = rule.reflected_degree(&spec);
        fixed.push(Property::new(rule.dependent(), PropertyValue::verification(d).unwrap()).unwrap());
    }
    spec = Specification::new(
        spec.iter()
            .map(|p| fixed.iter().find(|f| f.name() == p.name()).unwrap_or(p).clone())
            .collect(),
    )
    .unwrap();
    let area = MethodDef::parse(
        "area",
        vec![Param::new("a", Some(foodn::expr::PropertyRef::new("sides", Some(0))))],
        "a^2",
        "eq = 1 & rt = 1",
        MethodKind::Exploiter,
    )
    .unwrap();
    let class = FuzzyClass::homogeneous("Poly", ClassPart::new(spec.clone(), Signature::new(vec![area]).unwrap())).unwrap();
    (FuzzyObject::new("P", "Poly", spec).unwrap(), class)
}

pub fn arb_modification() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, Option<u32>, Option<u32>)> {
    let tuple = |lo: i32, hi: i32| prop::collection::vec((lo..hi).prop_map(|k| f64::from(k) * 5.0), 3..5);
    (
        tuple(1, 4),
        tuple(16, 20),
        tuple(1, 4),
        prop::option::of(0u32..=20),
        prop::option::of(0u32..=20),
    )
}

/// Strict successors are consistent; auto-reflect always yields one.
pub fn law_strict_consistency(
    sides: &[f64],
    angles: &[f64],
    new_sides: &[f64],
    eq: Option<u32>,
    rt: Option<u32>,
) -> Result<(), TestCaseError> {
    let (obj, class) = polygon(sides, angles);
    let rules = [side_rule(), angle_rule()];
    ensure!(check_consistency(&obj, &rules).is_empty(), "fixture object inconsistent");
    let mut actions = vec![(
        "sides".to_owned(),
        ModAction::SetValue(PropertyValue::crisp_tuple(new_sides.to_vec(), "cm").unwrap()),
    )];
    if let Some(d) = eq {
        actions.push(("eq".into(), ModAction::SetValue(PropertyValue::verification(mu(d)).unwrap())));
    }
    if let Some(d) = rt {
        actions.push(("rt".into(), ModAction::SetValue(PropertyValue::verification(mu(d)).unwrap())));
    }
    let m = Modifier::partial(actions).unwrap();
    let typed = Typed::new(&obj, &class).unwrap();
    let before = obj.clone();
    if let Ok(r) = foodn::apply_modifier(&EmptyNamespace, typed, &m, &rules, Mode::Strict) {
        ensure!(
            check_consistency(&r.successor, &rules).is_empty(),
            "strict successor violates a rule"
        );
        let reused = r.class == class;
        for meth in r.class.as_homogeneous().unwrap().sig.iter() {
            let held_before = foodn::guard_holds(meth, &obj).is_ok();
            ensure!(
                foodn::guard_holds(meth, &r.successor).is_ok() || (reused && !held_before),
                "retained method {} fails its guard",
                meth.name()
            );
        }
    }
    let auto = foodn::apply_modifier(&EmptyNamespace, typed, &m, &rules, Mode::AutoReflect);
    ensure!(
        auto.as_ref().is_ok_and(|r| check_consistency(&r.successor, &rules).is_empty()),
        "auto-reflect failed: {auto:?}"
    );
    ensure!(obj == before, "modifier changed its input");
    Ok(())
}

pub fn law_persistence(kb: &KnowledgeBase) -> Result<(), TestCaseError> {
    let bytes = foodn::save(kb);
    ensure!(bytes == foodn::save(kb), "save is not deterministic");
    let back: KnowledgeBase = foodn::load(&bytes, LoadOptions { strict: true })
        .map_err(|e| TestCaseError::fail(format!("reload failed: {e}")))?;
    ensure!(&back == kb, "round trip changed the knowledge base");
    ensure!(foodn::save(&back) == bytes, "second save differs");
    Ok(())
}

pub fn law_expr_roundtrip(e: &Expr) -> Result<(), TestCaseError> {
    let text = e.to_string();
    let back: Expr = foodn::expr::parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
    ensure!(&back == e, "`{text}` reparsed as {back:?}");
    Ok(())
}

// ---- brute-force core oracle ----

fn oracle_equivalent(p: &PropertyValue, q: &PropertyValue) -> bool {
    match (p, q) {
        (PropertyValue::Crisp { value: a, unit: u }, PropertyValue::Crisp { value: b, unit: v }) => {
            u == v && (a - b).abs() < 1e-9
        }
        (PropertyValue::Fuzzy1 { set: a, unit: u }, PropertyValue::Fuzzy1 { set: b, unit: v }) => {
            let (x, y) = (a.elements(), b.elements());
            u == v
                && x.len() == y.len()
                && x.iter().zip(y).all(|(s, t)| (s.1 - t.1).abs() < 1e-9)
                && x.windows(2)
                    .zip(y.windows(2))
                    .all(|(s, t)| ((s[1].0 - s[0].0) - (t[1].0 - t[0].0)).abs() < 1e-9)
        }
        (PropertyValue::Verification(a), PropertyValue::Verification(b)) => (a.value() - b.value()).abs() < 1e-9,
        _ => false,
    }
}

fn oracle_alpha(a: &MethodDef, b: &MethodDef) -> bool {
    // Bodies with their single parameter replaced by a placeholder.
    let norm = |m: &MethodDef| m.body().to_string().replace(m.params()[0].name.as_str(), "_");
    norm(a) == norm(b) && a.guard_text() == b.guard_text() && a.kind() == b.kind()
}

/// Core names by checking every property pair and every method pair.
pub fn oracle_core(a: &ClassPart, b: &ClassPart) -> (Vec<String>, Vec<String>) {
    let mut props = Vec::new();
    for p in a.spec.iter() {
        for q in b.spec.iter() {
            if p.name() == q.name() && oracle_equivalent(p.value(), q.value()) {
                props.push(p.name().to_owned());
            }
        }
    }
    let mut methods = Vec::new();
    for m in a.sig.iter() {
        for n in b.sig.iter() {
            if m.name() == n.name() && oracle_alpha(m, n) {
                methods.push(m.name().to_owned());
            }
        }
    }
    (props, methods)
}

pub fn law_oracle(a: &ClassPart, b: &ClassPart) -> Result<(), TestCaseError> {
    let d = core_and_projections(&[("a", a), ("b", b)]);
    let (props, methods) = oracle_core(a, b);
    let core_props: Vec<String> = d.core.spec.names().map(str::to_owned).collect();
    let core_methods: Vec<String> = d.core.sig.names().map(str::to_owned).collect();
    ensure!(core_props == props, "core properties {core_props:?}, oracle {props:?}");
    ensure!(core_methods == methods, "core methods {core_methods:?}, oracle {methods:?}");
    for (label, part) in [("a", a), ("b", b)] {
        let pr = d.projection(label).unwrap();
        let want: Vec<&str> = part.spec.names().filter(|n| !props.iter().any(|p| p == n)).collect();
        ensure!(prop_names(&pr.spec) == want, "projection {label} properties differ");
        let want: Vec<&str> = part.sig.names().filter(|n| !methods.iter().any(|p| p == n)).collect();
        ensure!(method_names(&pr.sig) == want, "projection {label} methods differ");
    }
    Ok(())
}
