//! Polynomial functors over finite sets, computed exactly.
//!
//! Everything bottoms out in [`finset`]: finite carriers `0..n` and total maps
//! stored as tables. On top of that:
//!
//! - [`fam`]: families of sets (slices), the `Σ ⊣ Δ ⊣ Π` triple, and explicit
//!   witnesses for Beck–Chevalley and distributivity;
//! - [`poly`]: polynomial diagrams `I ← D → A → J`, their extensions and the
//!   constructions on them (composition, `⊗`, `⊕`, `⊸`, `!`, duals, span lifts);
//! - [`nat`]: container morphisms representing strong natural transformations;
//! - [`sim`]: simulation cells between endo-diagrams, the morphisms of the
//!   category of polynomial diagrams;
//! - [`smcc`]: executable checks of the monoidal closed, additive and exponential
//!   structure.
//!
//! Every enumeration respects a global bound (see [`guard`]) so that an
//! accidentally large request fails fast with [`Error::SearchTooLarge`].
#![no_std]

extern crate alloc;

pub mod error;
pub mod fam;
pub mod finset;
pub mod guard;
pub mod nat;
pub mod poly;
pub mod sim;
pub mod smcc;

pub use error::{Error, Result};
pub use fam::{FamMorphism, Family};
pub use finset::{FinMap, FinSet};
pub use nat::DiagMorphism;
pub use poly::PolyDiagram;
pub use sim::{SimCell, Span};
