//! Adaptive learning rates built on terminal attractors, plus the tooling
//! needed to check their finite-time convergence claims numerically.
//!
//! A terminal attractor is an ODE equilibrium that trajectories reach in
//! finite time because the vector field violates the Lipschitz condition
//! there. Driving the training energy E with dE/dt = -beta * E^(q/p)
//! (0 < q < p) produces such an attractor at E = 0, and solving the
//! gradient-flow decoupling for the learning rate gives gamma as a function
//! of E and the gradient norm. This crate implements four such rules:
//!
//! - `ta`:   gamma = beta * E^(q/p) / |grad|^2
//! - `fta`:  gamma = (alpha * E + beta * E^(q/p)) / |grad|^2
//! - `pta`:  gamma = beta * E^(q/p) / |grad| * sigmoid(1/|grad|)
//! - `pfta`: gamma = (alpha * E + beta * E^(q/p)) / |grad| * sigmoid(1/|grad|)
//!
//! The `ta`/`fta` rates blow up where the gradient vanishes, which ejects
//! trajectories from non-global minima (and is safeguarded by a clamp); the
//! sigmoid-bounded `pta`/`pfta` variants keep the step size below the
//! attractor function itself. The [`scalar`] module integrates the decoupled
//! energy flow with RK4 and serves as the independent oracle for the
//! closed-form relaxation times; [`objectives`] provides testbed functions
//! with analytic gradients; [`harness`] runs multi-seed benchmark campaigns
//! and writes CSV/JSON artifacts.
//!
//! ```
//! use tagrad::integrator::{run, OptConfig};
//! use tagrad::objectives::Quadratic;
//! use tagrad::rate::LrRule;
//!
//! let objective = Quadratic::one_d(1.0, 1.0); // E = w^2 from w0 = 1
//! let rule = LrRule::ta(1.0, 2.0, 1.0);       // gamma = E^(1/2) / |grad|^2
//! let record = run(&objective, &rule, &OptConfig::new(1.0, 100, 1e-12));
//! assert!(record.final_energy() <= 1e-12);
//! ```

pub mod baselines;
pub mod eval;
pub mod harness;
pub mod integrator;
pub mod objectives;
pub mod rate;
pub mod scalar;
pub mod vector;

pub use eval::{evaluate, EvalError, GradEval, Objective};
pub use rate::{LrRule, RateOutput};
pub use vector::ParamVector;
