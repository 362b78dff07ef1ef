//! Finite-field quaternion data, bireversible automata, explicit Ramanujan
//! graph families and the regular two-dimensional subshifts built from them.

pub mod ffield;
pub mod graphs;
pub mod io;
pub mod matrix;
pub mod mealy;
pub mod quaternion;
pub mod spectral;
pub mod subshift;
pub mod vhdatum;

pub use ffield::{FieldError, FieldSpec, Fq2Elem, FqElem, QuadExt};
pub use graphs::{
    level_graph, nb_matrix, product_level_graph, DartGraph, GraphError, LevelSide, UGraph,
};
pub use matrix::IntMatrix;
pub use mealy::{LabeledGraph, LiftSystem, Mealy, MealyError};
pub use quaternion::{QuatAlgebra, QuatElem, QuatError};
pub use spectral::{ramanujan_check, SpectralError, SpectralReport};
pub use subshift::{
    build_wang, build_xd, mixing_table, CorrelationTable, CylinderSpec, Direction, MatrixSubshift,
    Pattern, SubshiftError,
};
pub use vhdatum::{
    build_quaternionic_datum, validate_datum, verify_relations, DatumError, VHDatum,
};
