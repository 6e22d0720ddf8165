//! Scalar bound for grid entries.

use std::fmt::Debug;
use std::ops::AddAssign;

use num_traits::{One, Zero};

/// Entry type for the dense grids.
///
/// Satisfied by the arbitrary-precision integers and rationals the crate
/// uses, and by the primitive numeric types (`u64`, `f64`, ...) when a
/// caller wants cheap inexact grids.
pub trait Scalar: Clone + PartialEq + PartialOrd + Zero + One + AddAssign + Debug {}

impl<T> Scalar for T where T: Clone + PartialEq + PartialOrd + Zero + One + AddAssign + Debug {}
