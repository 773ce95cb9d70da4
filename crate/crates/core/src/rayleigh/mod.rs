//! Discrete weighted p-Rayleigh quotients on radial domains.

pub mod collar;
pub mod decay;
pub mod energy;
pub mod mesh;
pub mod solver;
pub mod study;

pub use collar::{
    collar_constant, collar_ends, collar_study, default_collar_study, default_widths, CollarEnd, CollarLevel,
    CollarSequence, CollarSettings, CollarStudy,
};
pub use decay::{decay_exponent, decay_fit, fit_line, fit_power_law, DecayWindow, PowerFit};
pub use energy::{assemble_energies, EnergyForms};
pub use mesh::{domain_mesh, GradedMesh, Grading, GridFn, MeshSummary, Segment};
pub use solver::{minimize_quotient, minimize_quotient_from, RayleighResult, SolverOptions};
pub use study::{
    extrapolate_cutoffs, fit_cutoff_model, hardy_study, refinement_study, CutoffExtrapolation, CutoffFit,
    HardyProblem, LevelRecord, RefinementStudy, StudySettings,
};
