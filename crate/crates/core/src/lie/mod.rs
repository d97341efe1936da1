//! Graded free Lie algebras and propagation of quasi-unipotence.

pub mod cyclotomic;
pub mod free;
pub mod matrix;
pub mod monodromy;

pub use cyclotomic::{cyclotomic, euler_phi, is_quasiunipotent, Annihilator, QuasiUnipotence};
pub use free::{bracket_string, hall_basis, lyndon_words, GradedFreeLie};
pub use matrix::QMatrix;
pub use monodromy::{
    extend_automorphism, induced_quasiunipotence, var_check, GradedAutomorphism, VarReport,
};
