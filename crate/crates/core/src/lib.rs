//! Frames in finite-dimensional Krein spaces.
//!
//! Validates J-frames, builds the J-frame operator `S = TT⁺` and its block
//! representations, recovers frame bounds spectrally, checks spectral
//! enclosures, computes the principal square root two ways and performs the
//! Krein polar decomposition of synthesis operators.

pub mod analysis;
pub mod error;
pub mod frames;
pub mod genkit;
pub mod io;
pub mod jframe;
pub mod krein;
pub mod linalg;
pub mod spectral;
pub mod sqrtpolar;
pub mod svg;
pub mod tol;
pub mod verify;

pub use error::{KreinError, Result};
pub use frames::{is_jframe, Frame, JFrameReport};
pub use krein::{KreinSpace, Sign, Subspace};
pub use tol::Tolerances;
