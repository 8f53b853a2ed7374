//! `foodn`: validate, combine, evaluate and modify fuzzy object knowledge bases.
//!
//! Exit codes: 0 success, 1 domain error (violations, guards, empty results),
//! 2 usage or document errors. The input knowledge base is never rewritten;
//! results go to `--out` only.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use foodn::expr::{Binding, Bindings, ExprError};
use foodn::notation::{parse_value, render_value};
use foodn::persist::{class_to_value, object_to_value, property_to_value, to_canonical_string};
use foodn::{
    AlgebraError, ClassBody, ClassPart, FuzzyClass, KbError, KnowledgeBase, LoadError, LoadOptions, MethodDef, Mode,
    ModifyError,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "foodn", version, about = "Fuzzy object-oriented knowledge base tool")]
struct Cli {
    /// Emit canonical JSON instead of a text report.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a knowledge base and report rule violations.
    Validate {
        #[arg(long)]
        kb: PathBuf,
        /// Reject unknown keys.
        #[arg(long)]
        strict: bool,
    },
    /// Apply a set operation or clone and report the generated class.
    Op {
        op: Op,
        /// Object ids; for `clone`, an id followed by the copy index.
        #[arg(required = true)]
        ids: Vec<String>,
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a method of an object.
    Eval {
        #[arg(long)]
        kb: PathBuf,
        object: String,
        method: String,
        /// Parameter binding `name=value`, value in v/μ notation.
        #[arg(long = "bind", value_name = "NAME=VALUE")]
        binds: Vec<String>,
    },
    /// Apply a modifier document to an object.
    Modify {
        #[arg(long)]
        kb: PathBuf,
        object: String,
        #[arg(long)]
        modifier: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Union,
    Intersect,
    Diff,
    Symdiff,
    Clone,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Auto,
}

/// A failed run: exit code, error kind and message.
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind: "Usage".into(),
            message: message.into(),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        let kind = match e {
            LoadError::Schema { .. } => "Schema",
            LoadError::Validation { .. } => "Validation",
            LoadError::Parse { .. } => "Parse",
        };
        Self {
            code: 2,
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

impl From<KbError> for Failure {
    fn from(e: KbError) -> Self {
        Self {
            code: 1,
            kind: kb_kind(&e),
            message: e.to_string(),
        }
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        Self {
            code: 1,
            kind: variant(&e),
            message: e.to_string(),
        }
    }
}

/// Name of the enum variant behind a `Debug` rendering.
fn variant(e: &impl std::fmt::Debug) -> String {
    let s = format!("{e:?}");
    s.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or_default().to_owned()
}

fn kb_kind(e: &KbError) -> String {
    match e {
        KbError::Algebra(AlgebraError::Model(m)) | KbError::Model(m) => variant(m),
        KbError::Algebra(a) => variant(a),
        KbError::Modify(ModifyError::Expr(x)) => variant(x),
        KbError::Modify(ModifyError::Algebra(a)) => variant(a),
        KbError::Modify(m) => variant(m),
        other => variant(other),
    }
}

/// What a command prints on success, plus its exit code.
struct Report {
    code: u8,
    text: String,
    machine: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let machine = cli.machine;
    let outcome = match cli.command {
        Command::Validate { kb, strict } => validate(&kb, strict),
        Command::Op { op, ids, kb, out } => operate(op, &ids, &kb, out.as_deref()),
        Command::Eval {
            kb,
            object,
            method,
            binds,
        } => eval(&kb, &object, &method, &binds),
        Command::Modify {
            kb,
            object,
            modifier,
            mode,
            out,
        } => modify(&kb, &object, &modifier, mode, out.as_deref()),
    };
    match outcome {
        Ok(r) => {
            if machine {
                print!("{}", to_canonical_string(&r.machine));
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(r.code)
        }
        Err(f) => {
            if machine {
                let v = json!({"status": "error", "kind": f.kind, "message": f.message});
                print!("{}", to_canonical_string(&v));
            } else {
                eprintln!("error [{}]: {}", f.kind, f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure {
        code: 2,
        kind: "Io".into(),
        message: format!("{}: {e}", path.display()),
    })
}

fn load_kb(path: &Path, strict: bool) -> Result<KnowledgeBase, Failure> {
    Ok(foodn::load(&read(path)?, LoadOptions { strict })?)
}

/// Refuses an `--out` that names the input file.
fn check_out(input: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let Some(out) = out else { return Ok(()) };
    if let (Ok(a), Ok(b)) = (input.canonicalize(), out.canonicalize()) {
        if a == b {
            return Err(Failure::usage("--out must differ from --kb; the input is never rewritten"));
        }
    }
    Ok(())
}

fn write_out(kb: &KnowledgeBase, out: Option<&Path>) -> Result<(), Failure> {
    let Some(out) = out else { return Ok(()) };
    std::fs::write(out, foodn::save(kb)).map_err(|e| Failure {
        code: 2,
        kind: "Io".into(),
        message: format!("{}: {e}", out.display()),
    })
}

fn validate(path: &Path, strict: bool) -> Result<Report, Failure> {
    let kb = load_kb(path, strict)?;
    let violations = kb.violations();
    let classes = kb.classes().count();
    let objects = kb.objects().count();
    let mut text = format!(
        "{}, {}, {}\n",
        count(classes, "class", "classes"),
        count(objects, "object", "objects"),
        count(violations.len(), "violation", "violations")
    );
    for (id, v) in &violations {
        let _ = writeln!(text, "  {id}.{}: {v}", v.dependent);
    }
    let listed: Vec<Value> = violations
        .iter()
        .map(|(id, v)| {
            json!({"object": id, "rule": v.rule, "dependent": v.dependent,
                   "observed": v.observed, "required": v.required})
        })
        .collect();
    let status = if violations.is_empty() { "ok" } else { "violations" };
    Ok(Report {
        code: u8::from(!violations.is_empty()),
        text,
        machine: json!({"status": status, "classes": classes, "objects": objects, "violations": listed}),
    })
}

fn describe_method(m: &MethodDef) -> String {
    let params: Vec<&str> = m.params().iter().map(|p| p.name.as_str()).collect();
    let mut s = format!("{}({}) = {}", m.name(), params.join(", "), m.body());
    let guard = m.guard_text();
    if !guard.is_empty() {
        let _ = write!(s, "  when {guard}");
    }
    s
}

fn count(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn describe_part(out: &mut String, title: &str, part: &ClassPart) {
    let _ = writeln!(
        out,
        "{title}: {}, {}",
        count(part.spec.len(), "property", "properties"),
        count(part.sig.len(), "method", "methods")
    );
    for p in part.spec.iter() {
        let _ = writeln!(out, "  {} = {}", p.name(), render_value(p.value()));
    }
    for m in part.sig.iter() {
        let _ = writeln!(out, "  {}", describe_method(m));
    }
}

fn describe_class(class: &FuzzyClass) -> String {
    let mut out = format!("class {}\n", class.name());
    match class.body() {
        ClassBody::Homogeneous(part) => describe_part(&mut out, "homogeneous", part),
        ClassBody::Heterogeneous { core, projections } => {
            describe_part(&mut out, "core", core);
            for p in projections {
                describe_part(&mut out, &format!("projection {}", p.label), &p.part);
            }
        }
    }
    out
}

fn operate(op: Op, ids: &[String], path: &Path, out: Option<&Path>) -> Result<Report, Failure> {
    check_out(path, out)?;
    let mut kb = load_kb(path, false)?;
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let pair = || match refs.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Failure::usage("this operation takes exactly two object ids")),
    };
    let (text, machine) = match op {
        Op::Clone => {
            let [id, n] = refs.as_slice() else {
                return Err(Failure::usage("clone takes an object id and a copy index"));
            };
            let n: u32 = n.parse().map_err(|_| Failure::usage(format!("bad copy index `{n}`")))?;
            let copy = kb.clone_object(id, n)?;
            (
                format!("new object: {} of class {}\n", copy.id(), copy.class_name()),
                json!({"status": "ok", "operation": "clone", "inputs": [id],
                       "object": {"id": copy.id(), "value": object_to_value(copy)}}),
            )
        }
        _ => {
            let (name, class, members) = match op {
                Op::Union => {
                    let (set, class) = kb.union(&refs)?;
                    ("union", class.clone(), Some(set.members))
                }
                Op::Intersect => ("intersect", kb.intersect(&refs)?.clone(), None),
                Op::Diff => {
                    let (a, b) = pair()?;
                    ("diff", kb.diff(a, b)?.clone(), None)
                }
                Op::Symdiff => {
                    let (a, b) = pair()?;
                    ("symdiff", kb.symdiff(a, b)?.clone(), None)
                }
                Op::Clone => unreachable!(),
            };
            let mut text = String::new();
            if let Some(m) = &members {
                let _ = writeln!(text, "members: {}", m.join(", "));
            }
            text.push_str(&describe_class(&class));
            let mut v = json!({"status": "ok", "operation": name, "inputs": refs,
                               "class": {"name": class.name(), "value": class_to_value(&class)}});
            if let Some(m) = members {
                v["members"] = json!(m);
            }
            (text, v)
        }
    };
    write_out(&kb, out)?;
    Ok(Report { code: 0, text, machine })
}

fn eval(path: &Path, id: &str, method: &str, binds: &[String]) -> Result<Report, Failure> {
    let kb = load_kb(path, false)?;
    let mut bindings = Bindings::new();
    for b in binds {
        let (name, text) = b
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("binding `{b}` is not NAME=VALUE")))?;
        let value = parse_value(text).map_err(|e| Failure::usage(format!("binding `{name}`: {e}")))?;
        bindings.insert(name.trim().to_owned(), Binding::Value(value));
    }
    let obj = kb.object(id)?;
    let (m, inherited) = kb.find_method(id, method)?;
    let value = foodn::evaluate(m, obj, &bindings)?;
    if inherited {
        return Err(Failure {
            code: 1,
            kind: "DroppedMethod".into(),
            message: format!("method `{method}` was dropped from class `{}`", obj.class_name()),
        });
    }
    let text = render_value(&value);
    let typed = foodn::Property::new("result", value).map_err(|e| Failure::usage(e.to_string()))?;
    let mut body = property_to_value(&typed);
    if let Value::Object(map) = &mut body {
        map.remove("name");
    }
    Ok(Report {
        code: 0,
        text: format!("{text}\n"),
        machine: json!({"status": "ok", "object": id, "method": method, "text": text, "result": body}),
    })
}

fn modify(path: &Path, id: &str, modifier: &Path, mode: ModeArg, out: Option<&Path>) -> Result<Report, Failure> {
    check_out(path, out)?;
    let mut kb = load_kb(path, false)?;
    let m = foodn::load_modifier(&read(modifier)?, LoadOptions::default())?;
    let mode = match mode {
        ModeArg::Strict => Mode::Strict,
        ModeArg::Auto => Mode::AutoReflect,
    };
    let original = kb.object(id)?.clone();
    let r = kb.modify(id, &m, mode)?;
    let mut text = format!("successor: {}\n", r.successor.id());
    if r.generated {
        let _ = writeln!(text, "generated class: {}", r.class.name());
    } else {
        let _ = writeln!(text, "class: {} (unchanged)", r.class.name());
    }
    for p in r.successor.spec().iter() {
        if original.property(p.name()).map(|q| q.value()) != Some(p.value()) {
            let _ = writeln!(text, "changed: {} = {}", p.name(), render_value(p.value()));
        }
    }
    for p in original.spec().iter() {
        if r.successor.property(p.name()).is_none() {
            let _ = writeln!(text, "removed: {}", p.name());
        }
    }
    if !r.dropped.is_empty() {
        let _ = writeln!(text, "dropped: {}", r.dropped.join(", "));
    }
    if !r.reflected.is_empty() {
        let _ = writeln!(text, "reflected: {}", r.reflected.join(", "));
    }
    let mut machine = json!({"status": "ok", "input": id, "successor": r.successor.id(),
        "object": object_to_value(&r.successor), "class": r.class.name(), "generated": r.generated,
        "dropped": r.dropped, "reflected": r.reflected});
    if r.generated {
        machine["class_value"] = class_to_value(&r.class);
    }
    write_out(&kb, out)?;
    Ok(Report { code: 0, text, machine })
}
