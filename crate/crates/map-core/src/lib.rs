//! Task-agnostic assessment of robot movement reproductions.
//!
//! The crate models the wrench (force/torque) measured during a movement as
//! six independent Gaussian processes over goal-relative pose and time, one
//! per wrench dimension. A reproduction is compared against a demonstration
//! by the Hellinger distance between the induced Gaussian distributions,
//! and the six normalized distances feed a Gaussian naive Bayes classifier
//! that decides whether the reproduction succeeded.
//!
//! The pipeline, in dependency order:
//!
//! * [`trajectory`] — recorded movements and goal-relative transforms
//! * [`align`] — time alignment of a reproduction onto its demonstration
//! * [`kernel`] / [`gp`] — covariance construction and evidence-based fits
//! * [`features`] — Hellinger similarity features
//! * [`classifier`] — Gaussian naive Bayes training, assessment, and LOOCV
//! * [`synth`] — seeded synthetic assembly datasets for benchmarking
//!
//! The crate is `no_std` (with `alloc`) so the numerics can run on robot
//! controllers; file formats and orchestration live in the companion CLI
//! crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod align;
pub mod classifier;
pub mod features;
pub mod gp;
pub mod kernel;
pub mod linalg;
pub mod neldermead;
pub mod oracle;
pub mod quat;
pub mod synth;
pub mod trajectory;
