//! Hopf decompositions of measured group actions, and horospheric limit sets of
//! discrete groups acting on hyperbolic spaces.
//!
//! * [`ergodic`]: exact atomic models of countable group actions.
//! * [`hyperbolic`]: Gromov products, Busemann cocycles and horoballs for any [`SpaceModel`].
//! * [`tree`]: free groups acting on their Cayley trees, with Stallings core graphs.
//! * [`disk`]: Fuchsian groups acting on the Poincare disk.
//! * [`classifier`]: conservative/dissipative classification of boundary points.

pub mod classifier;
pub mod disk;
pub mod ergodic;
pub mod error;
pub mod hyperbolic;
pub mod tree;

pub use error::{Error, Result};
pub use hyperbolic::{BusemannValue, Exactness, SpaceModel};
