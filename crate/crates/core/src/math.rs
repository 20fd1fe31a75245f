//! Float math that works with and without `std`.
//!
//! Without `std` the `libm` feature must supply the transcendental
//! functions.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("segi-core needs either the `std` feature or the `libm` feature");

macro_rules! forward {
    ($(fn $name:ident($($arg:ident),+) -> $ret:ty;)*) => {
        $(
            #[inline]
            pub(crate) fn $name($($arg: f64),+) -> $ret {
                #[cfg(feature = "std")]
                { f64::$name($($arg),+) }
                #[cfg(not(feature = "std"))]
                { libm_impl::$name($($arg),+) }
            }
        )*
    };
}

forward! {
    fn exp(x) -> f64;
    fn log10(x) -> f64;
    fn ceil(x) -> f64;
    fn round(x) -> f64;
    fn sin(x) -> f64;
    fn cos(x) -> f64;
}

#[cfg(not(feature = "std"))]
mod libm_impl {
    pub use libm::{ceil, cos, exp, log10, round, sin};
}

/// Small-integer power by repeated multiplication.
///
/// Used instead of `powi` so the evaluation order (and therefore the exact
/// result) is identical across std and no_std builds.
#[inline]
pub(crate) fn pow_u32(base: f64, exponent: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exponent {
        acc *= base;
    }
    acc
}
