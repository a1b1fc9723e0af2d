//! Finite-field experiments on polynomial systems.
//!
//! Sample random points over F_p to estimate the codimension and number of
//! components of a variety, tally Jacobian ranks computed with dual numbers,
//! and lift modular solutions of zero-dimensional systems to exact integer
//! or rational solutions by Chinese remaindering or p-adic Newton iteration.
//!
//! ```
//! use fieldprobe::mpoly::PolySystem;
//! use fieldprobe::lift::{all_points, DEFAULT_BUDGET};
//!
//! let names = vec!["x".to_string(), "y".to_string()];
//! let sys = PolySystem::parse(&["x^2 - y", "y - 4"], &names).unwrap();
//! assert_eq!(all_points(&sys, 7, DEFAULT_BUDGET).unwrap(), vec![vec![2, 4], vec![5, 4]]);
//! ```

pub mod dual;
pub mod ffarith;
pub mod lift;
pub mod mpoly;
pub mod par;
pub mod scan;
pub mod stats;

pub use ffarith::{BigInt, Fraction, PrimeField, Residue};
pub use mpoly::{PolySystem, Polynomial};
