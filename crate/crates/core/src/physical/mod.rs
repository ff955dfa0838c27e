//! Physical-frame integration of `u_t = Δu + |u|^{p-1}u` up to numerical blow-up.

mod blowup_time;
mod solver;

pub use blowup_time::{estimate_blowup_time, BlowupFit, FitWindow};
pub(crate) use solver::hermite;
pub use solver::{
    rhs, solve_sweep, solve_until_blowup, step, step_with_dt, RunResult, SeriesRecord, SolveOptions, StepControl,
    Termination,
};
