//! Single-objective local searches: Nelder-Mead (comparison baseline) and
//! normalized gradient descent (the refinement step inside SO-MOGSA).

mod gradient_descent;
mod nelder_mead;

pub use gradient_descent::{gradient_descent_f1, Descent, DescentStatus, GradientDescentConfig};
pub use nelder_mead::{nelder_mead, NelderMeadConfig};
