//! Exact desk-scale arithmetic for local orders in matrix algebras:
//! canonical lattice classes over `Z/p^M`, invariant-lattice enumeration,
//! spinor image sets, residual-algebra invariants, and finite abelian
//! class-field scenarios.

// Index loops read better than iterator chains in the matrix kernels.
#![allow(clippy::needless_range_loop)]

pub mod classfield;
pub mod config;
pub mod error;
pub mod fq;
pub mod howell;
pub mod lattice;
pub mod mat;
pub mod order;
pub mod poly;
pub mod residual;
pub mod ring;
pub mod rng;
pub mod spinor;
pub mod verify;

pub use classfield::{AbelianGroup, GaloisScenario, Place, PlacePayload, ScenarioVerdict};
pub use error::CoreError;
pub use fq::Fq;
pub use lattice::{DistanceClass, Submodule};
pub use mat::Mat;
pub use order::{LocalOrder, PrimitivityCertificate, UnramifiedEmbedding};
pub use residual::{IrreducibleProfile, ResidualAlgebra};
pub use ring::{ModulusRing, Ring};
pub use spinor::{LocalDefinedReport, SpinorImage, SpinorOptions, SubgroupZn};
