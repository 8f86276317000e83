use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two objects that had to line up (domain/codomain, bases, carriers) do not.
    Mismatch { what: &'static str, left: usize, right: usize },
    /// A table entry points outside its codomain, or a structural condition fails.
    Invalid(String),
    /// The requested enumeration exceeds the configured bound.
    SearchTooLarge { requested: u128, limit: u128 },
    /// A square handed in as a pullback is not one.
    NotPullback,
    /// The operation only exists for diagrams with `I = J = 1`.
    NotSingleSorted,
    /// The operation needs an endo-diagram (`I = J`).
    NotEndo,
    /// Reading a transformation back from its values disagreed with the transformation.
    NotNatural(String),
    /// A comparison morphism that should be invertible is not.
    NotIso(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Mismatch { what, left, right } => {
                write!(f, "{what} mismatch: {left} vs {right}")
            }
            Error::Invalid(msg) => write!(f, "invalid data: {msg}"),
            Error::SearchTooLarge { requested, limit } => {
                write!(f, "search too large: {requested} exceeds bound {limit}")
            }
            Error::NotPullback => f.write_str("square is not a pullback"),
            Error::NotSingleSorted => {
                f.write_str("general hom not implemented: diagram is not single-sorted")
            }
            Error::NotEndo => f.write_str("diagram is not an endo-diagram"),
            Error::NotNatural(msg) => write!(f, "oracle not natural: {msg}"),
            Error::NotIso(what) => write!(f, "{what} is not an isomorphism"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn ensure_eq(what: &'static str, left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::Mismatch { what, left, right })
    }
}
