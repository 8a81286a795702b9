//! Numerical Weil-Petersson geometry on the universal Teichmüller space.
//!
//! The crate is organised bottom-up: [`geometry`] holds points, Möbius maps and
//! the resolvent kernel; [`quadrature`] integrates over the disk and applies the
//! resolvent; [`series`] stores holomorphic functions and harmonic Beltrami
//! differentials as coefficient vectors; [`qc_solver`] solves the Beltrami
//! equation and extracts Schwarzians and weldings; [`curvature`] and [`forms`]
//! build the metric, curvature and characteristic-form computations on top;
//! [`harness`] runs named verification suites and serializes reports.

pub mod curvature;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod harness;
pub mod qc_solver;
pub mod quadrature;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
