//! Stellar moves on simplicial complexes over Z/2, ball and sphere
//! recognition, star normal forms of closed and bounded manifolds, and
//! fundamental group presentations read off those normal forms.

pub mod complex;
pub mod document;
pub mod fixtures;
pub mod moves;
pub mod normalize;
pub mod pi1;
pub mod quotient;
pub mod recognition;
pub mod smith;

pub use complex::{Complex, ComplexError, Outcome, Simplex, Verdict, VertexId};
pub use document::{ComplexDocument, DocumentError};
pub use moves::{MoveError, MoveRecord, MoveSequence, Relabeling};
pub use normalize::{normalize, NormalizeError, StarNormalForm};
pub use pi1::{AbelianInvariants, GroupPresentation, Pi1Error};
pub use quotient::{GeneratorPairing, QuotientComplex, QuotientError, RegularEquivalence};
pub use recognition::{ManifoldReport, RecognitionResult, Shape, DEFAULT_BUDGET};
