//! Pointwise tensor algebra on coordinate charts.
//!
//! Real coordinates are ordered (x1, y1, ..., xn, yn) with q_k = x_k + i y_k.
//! Two-forms and bivectors are stored as contraction maps, so that pairings
//! and compositions are plain matrix products.

pub mod ad;
pub mod error;
pub mod expr;
pub mod grid;
pub mod linalg;
pub mod ops;
pub mod potential;
pub mod special;
pub mod tensor;

pub use ad::{CJet, Dual2};
pub use error::{GkError, Kernel, Result};
pub use grid::{CoordGrid, GridSpec, Ray};
pub use linalg::{CMat, CVec, RMat, RVec};
pub use ops::{oneone_part, pushforward_cx, wedge_top4};
pub use potential::{eval_jet2, third_derivs_fd, Jet2, PotentialFn};
pub use special::dilog;
pub use tensor::{Bivector, ChartPoint, ComplexBivector, ComplexTwoForm, Endomorphism, SymTensor, TwoForm};
