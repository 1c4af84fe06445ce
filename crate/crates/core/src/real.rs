//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar the solvers are written against (`f32` or `f64`).
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` constant. Panics only for values unrepresentable in `Self`,
    /// which never happens for the finite constants used in this crate.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("representable count")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Neumaier-compensated summation.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(terms: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            // mid + half * (2k - (n-1)) / (n-1) keeps grids symmetric about the midpoint
            let last = T::of_usize(n - 1);
            let mid = (lo + hi) / T::two();
            let half = (hi - lo) / T::two();
            (0..n)
                .map(|k| {
                    if k == 0 {
                        lo
                    } else if k == n - 1 {
                        hi
                    } else {
                        let num = T::of_usize(2 * k) - last;
                        mid + half * (num / last)
                    }
                })
                .collect()
        }
    }
}

/// `|x|^(s-2) x`, continuous at zero for `s >= 2`.
#[inline]
pub fn signed_pow<T: Real>(x: T, s: T) -> T {
    if x == T::zero() {
        T::zero()
    } else if s == T::two() {
        x
    } else {
        x.abs().powf(s - T::two()) * x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(terms), 2.0);
    }

    #[test]
    fn linspace_hits_zero_exactly_on_symmetric_odd_grid() {
        let grid = linspace(-1.0_f64, 1.0, 21);
        assert_eq!(grid[10], 0.0);
        assert_eq!(grid[0], -1.0);
        assert_eq!(grid[20], 1.0);
        for k in 0..21 {
            assert_eq!(grid[k], -grid[20 - k]);
        }
    }

    #[test]
    fn signed_pow_is_odd() {
        assert_eq!(signed_pow(-2.0_f64, 3.0), -4.0);
        assert_eq!(signed_pow(0.0_f64, 2.0), 0.0);
        assert_eq!(signed_pow(3.0_f32, 2.0), 3.0);
    }
}
