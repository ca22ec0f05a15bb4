//! Exact arithmetic for imaginary quadratic fields.
//!
//! Ideal classes are represented by primitive reduced binary quadratic forms
//! of negative discriminant. On top of the form arithmetic this crate carries
//! the pieces needed to study the fields `Q(sqrt(1 - 2m^t))`:
//!
//! * [`integers`]: factorization, primality, square-free parts, Fibonacci/Lucas.
//! * [`quadforms`]: reduction, enumeration (class numbers), composition, orders.
//! * [`pthpower`]: whether `±2^((p-1)/2)(1 + sqrt(1 - 2m^p))` is a p-th power.
//! * [`diophantine`]: the equation `D1 x^2 + D2 = λ² m^y` and its exceptional families.
//! * [`family`]: field points of the family, the explicit order-p class, consecutive pairs `d, d+1`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod diophantine;
pub mod family;
pub mod integers;
pub mod pthpower;
pub mod quadforms;

pub use error::{Error, Result};
pub use quadforms::{ClassGroup, Discriminant, QuadForm};
