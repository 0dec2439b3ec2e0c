//! A symbolic exact-sequence reasoner for Ext groups over the Steenrod
//! algebra: instantiates the long exact sequences induced by the
//! Smith-Toda cofibrations over windows of filtrations, ingests cited
//! dimension facts, saturates with sound inference rules, and replays the
//! dimension computations with auditable derivation logs.

mod engine;
mod facts;
mod replay;

pub use engine::{
    cofibration_modules, edge_labels, instantiate_les, DegExpr, Derivation, Family, Graph,
    LesError, NodeKey, Origin, Spectrum, Step,
};
pub use facts::{
    standard_fact_base, Fact, FactBase, Provenance, CIT_AIKAWA_81, CIT_AIKAWA_82, CIT_LIN, CIT_LIU,
    CIT_WANG,
};
pub use replay::{replay_all, replay_proposition, ReplayReport, PROPOSITIONS};
