pub mod error;
pub mod exactnum;
pub mod quadspace;
pub mod rootdata;
pub mod dsconst;
pub mod archcmp;
pub mod endoscopy;
pub mod hecke;
pub mod signs;

pub use error::{Error, Result};

/// Code samples from the guide in `book/`, compiled and run as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-numbers.md")]
    mod exact_numbers {}
    #[doc = include_str!("../../../book/src/quadratic-spaces.md")]
    mod quadratic_spaces {}
    #[doc = include_str!("../../../book/src/root-data.md")]
    mod root_data {}
    #[doc = include_str!("../../../book/src/endoscopic-data.md")]
    mod endoscopic_data {}
    #[doc = include_str!("../../../book/src/hecke.md")]
    mod hecke {}
    #[doc = include_str!("../../../book/src/signs.md")]
    mod signs {}
    #[doc = include_str!("../../../book/src/reports.md")]
    mod reports {}
}
