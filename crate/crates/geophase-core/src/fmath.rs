//! Float intrinsics routed through std or libm so the crate builds without std.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("geophase-core needs either the `std` or the `libm` feature");

macro_rules! unary {
    ($($name:ident),* $(,)?) => {$(
        #[inline]
        pub(crate) fn $name(x: f64) -> f64 {
            #[cfg(feature = "std")]
            {
                f64::$name(x)
            }
            #[cfg(all(not(feature = "std"), feature = "libm"))]
            {
                libm::$name(x)
            }
        }
    )*};
}

unary!(sin, cos, sqrt, floor, ceil, atan);

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        f64::hypot(x, y)
    }
    #[cfg(all(not(feature = "std"), feature = "libm"))]
    {
        libm::hypot(x, y)
    }
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        f64::abs(x)
    }
    #[cfg(all(not(feature = "std"), feature = "libm"))]
    {
        libm::fabs(x)
    }
}

/// Fractional part mapped to [0, 1); `frac(1.0) == 0.0` exactly, which is what
/// keeps periodically generated loops bitwise-closed.
#[inline]
pub(crate) fn frac(x: f64) -> f64 {
    x - floor(x)
}
