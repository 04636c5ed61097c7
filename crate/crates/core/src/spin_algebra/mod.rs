//! Angular-momentum machinery for three coupled collective spins.

mod basis;
mod coupling;
mod half_int;
mod operators;
mod transitions;

pub use basis::{
    build_coupled_basis, ladder, BasisState, CoupledBasis, Sense, DEFAULT_DIMENSION_CAP,
};
pub use coupling::{clebsch_gordan, ln_factorial, wigner_3j, wigner_6j};
pub use half_int::HalfInt;
pub use operators::{collective_operator, total_ladder, total_spin_squared, total_spin_z};
pub use transitions::{transition_table, ExtremalLabel, TransitionTable};
