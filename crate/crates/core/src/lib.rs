//! Fuzzy object-oriented dynamic networks.
//!
//! Objects carry crisp and fuzzy properties plus methods. Classes group
//! objects by shape, combine through a class algebra, and evolve through
//! modifiers that respect dependency rules between properties.
//!
//! Everything is generic over the scalar type ([`Scalar`], implemented for
//! `f64` and `f32`); the aliases at the bottom of this file fix the common
//! choices.

pub mod algebra;
pub mod expr;
pub mod fuzzy;
pub mod kb;
pub mod model;
pub mod modifier;
pub mod notation;
pub mod persist;
pub mod scalar;

pub use algebra::{
    clone_object, core_and_projections, difference, intersection, symmetric_difference, union, AlgebraError,
    Decomposition, Namespace, ObjectSet, Typed,
};
pub use expr::{alpha_equivalent, evaluate, guard_holds, Binding, Bindings, Expr, ExprError, MethodDef, MethodKind, Param};
pub use fuzzy::{concentration, dilution, Degree, FuzzyError, Hedge, Type1FuzzySet, Type2FuzzySet, Validation};
pub use model::{
    eq_property, eq_qualitative, eq_quantitative, instantiate, same_type, ClassBody, ClassPart, FuzzyClass,
    FuzzyObject, FuzzyTuple, ModelError, Projection, Property, PropertyValue, Signature, Specification, ValueKind,
};
pub use modifier::{
    apply_fuzzy_modifier, apply_modifier, check_consistency, Check, DependencyRule, ModAction, Modification,
    Modifier, ModifierKind, ModifyError, Mode, Violation,
};
pub use kb::{Derivation, KbError, KnowledgeBase};
pub use persist::{load, load_modifier, save, LoadError, LoadOptions};
pub use scalar::Scalar;

pub type DegreeF64 = Degree<f64>;
pub type DegreeF32 = Degree<f32>;
pub type Type1F64 = Type1FuzzySet<f64>;
pub type Type1F32 = Type1FuzzySet<f32>;
pub type Type2F64 = Type2FuzzySet<f64>;
pub type Type2F32 = Type2FuzzySet<f32>;
pub type ObjectF64 = FuzzyObject<f64>;
pub type ObjectF32 = FuzzyObject<f32>;
pub type ClassF64 = FuzzyClass<f64>;
pub type ClassF32 = FuzzyClass<f32>;
pub type KnowledgeBaseF64 = KnowledgeBase<f64>;
pub type KnowledgeBaseF32 = KnowledgeBase<f32>;
