//! Lindblad evolution, its rate-equation limit and projective measurement.

mod blocked;
mod density;
mod integrator;
mod lindblad;
mod measure;
mod rate;
mod trajectory;

pub use density::DensityMatrix;
pub use integrator::{integrate, IntegratorStats, OdeState, StepPolicy};
pub use lindblad::{evolve, lindblad_rhs, steady_state, EvolveOptions, Evolution, Jump, LindbladModel, Monitors, Observable};
pub use measure::{outcome_distribution, projective_measure, MeasuredObservable};
pub use rate::{rate_equation_evolve, sector_name, RateEvolution, RateModel};
pub use trajectory::Trajectory;
