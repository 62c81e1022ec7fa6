//! Finite-domain constraint solving by lazy clause generation.

mod heap;
pub mod lit;
pub mod luby;
pub mod model;
pub mod props;
pub mod solver;
pub mod minimize;

pub use lit::{LBool, Lit, Var};
pub use luby::{luby, LubySchedule};
pub use model::{Assignment, Atom, BoolVar, Cell, Constraint, IntVar, MLit, Model, ModelError};
pub use solver::{
    Branching, Budget, Conflict, Ctx, IntLits, Propagator, SolveResult, Solver, SolverConfig, SolverStats,
    Terminator, ValueChoice,
};
pub use minimize::{minimize, MinimizeResult, MinimizeStatus};
