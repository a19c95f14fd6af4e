// Items shared by every module regardless of whether `std` is linked.

pub(crate) use alloc::{format, string::String, vec, vec::Vec};

// Supplies sqrt/sin/cos/... on f64 when `std` is absent.
#[allow(unused_imports)]
pub(crate) use num_traits::Float;
