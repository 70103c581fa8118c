//! Finite Kripke models for intuitionistic propositional and first-order
//! logic: forcing and per-node classical truth, Friedman and
//! universally-double-negating translations, model pruning, synthesis and
//! verification of localizing sentences, and depth-based slicing of
//! excluded-middle instances via bounded countermodel search.

pub mod enumerate;
pub mod krank;
pub mod localize;
pub mod model;
pub mod semantics;
pub mod syntax;
pub mod testkit;
pub mod translate;

pub use model::{
    cardinality_sentence, forces_pem1, non_classical_witness, validate_model, witness_for, ElemId,
    Fact, KripkeModel, ModelError, NodeId, NonClassicalWitness, PredId, RawFact, RawModel,
    ValidationError, ValidationReport, WitnessKind, WitnessPreference,
};
pub use semantics::{classical_truth, forces, Evaluator, SemanticsError};
pub use syntax::{
    infer_signature, parse_formula, Formula, FormulaError, ParseError, ParseErrorKind, Signature,
    SignatureError, Term,
};
pub use translate::{
    check_chain_membership, friedman, kuroda_variant, pem_instance, realize_chain, PemInstance,
    TranslateError, TranslationChain,
};
