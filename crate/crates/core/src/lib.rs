//! Exact intersection theory and bundle arithmetic on elliptically fibered
//! Calabi-Yau threefolds over del Pezzo, Hirzebruch and Enriques bases.

pub mod anomaly;
pub mod bundle;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod nonsplit;
pub mod ring;
pub mod scalar;
pub mod search;
pub mod verdict;
pub mod windows;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

pub type DivisorClassQ = lattice::DivisorClass<Rational>;
pub type DivisorXQ = ring::DivisorX<Rational>;
pub type FourClassQ = ring::FourClass<Rational>;
pub type BundleSpecQ = bundle::BundleSpec<Rational>;
pub type StabilityWindowQ = windows::StabilityWindow<Rational>;

pub type DivisorClassF = lattice::DivisorClass<f64>;
pub type DivisorXF = ring::DivisorX<f64>;
pub type FourClassF = ring::FourClass<f64>;
