//! Scalar abstraction shared by the algebraic engines.
//!
//! The Hecke algebra, the walk evolutions, the lattice recursion and the
//! character computations are all written once, generically, against this
//! trait. Instantiating at [`num_rational::BigRational`] gives exact results;
//! at `f64`/`f32` a fast floating pipeline; at
//! [`num_complex::Complex<f64>`] the spectral route. The quadratic tower
//! [`crate::qext::Quad23`] also implements it so that character tables over
//! `Q(sqrt 2, sqrt 3)` stay exact.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field-like scalar the engines compute in.
///
/// Beyond arithmetic this captures the few questions the algorithms actually
/// ask: "are you exact?", "does this square root exist in your field?",
/// "are you a nonnegative real?".
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// True when arithmetic is exact (no rounding); comparisons against zero
    /// are then meaningful without tolerances.
    const EXACT: bool;

    fn from_u64(n: u64) -> Self;

    fn from_i64(n: i64) -> Self;

    fn from_big_rational(x: &BigRational) -> Self;

    /// num/den as a scalar. `den` must be nonzero.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Best-effort float image, for reporting and tolerance checks.
    fn to_f64_approx(&self) -> f64;

    /// True when the value is a real number `>= 0`. For complex scalars this
    /// requires a vanishing imaginary part.
    fn is_nonnegative(&self) -> bool;

    /// Complex conjugate; identity on real scalar types.
    fn conj(&self) -> Self {
        self.clone()
    }

    /// Square root *within the field*, if one exists there. Rationals only
    /// answer for perfect squares; floats always answer for nonnegative
    /// inputs; the quadratic tower answers when the square-free part divides
    /// its basis.
    fn sqrt_in_field(&self) -> Option<Self>;

    /// Exact rational image, when the value is one.
    fn as_exact_rational(&self) -> Option<BigRational>;

    /// cos(2π·j/m) as a field element, when it exists there (`m >= 1`).
    /// Floats always answer; rationals answer exactly for the five rational
    /// cosines (denominators 1, 2, 3, 4, 6 after reduction); the quadratic
    /// tower answers whenever the reduced denominator divides 24.
    fn cos_two_pi(j: u64, m: u64) -> Option<Self>;

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_big_rational(x: &BigRational) -> Self {
        big_rational_to_f64(x)
    }

    fn to_f64_approx(&self) -> f64 {
        *self
    }

    fn is_nonnegative(&self) -> bool {
        *self >= 0.0
    }

    fn sqrt_in_field(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(self.sqrt())
        } else {
            None
        }
    }

    fn as_exact_rational(&self) -> Option<BigRational> {
        None
    }

    fn cos_two_pi(j: u64, m: u64) -> Option<Self> {
        if m == 0 {
            return None;
        }
        Some((std::f64::consts::TAU * j as f64 / m as f64).cos())
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_u64(n: u64) -> Self {
        n as f32
    }

    fn from_i64(n: i64) -> Self {
        n as f32
    }

    fn from_big_rational(x: &BigRational) -> Self {
        big_rational_to_f64(x) as f32
    }

    fn to_f64_approx(&self) -> f64 {
        *self as f64
    }

    fn is_nonnegative(&self) -> bool {
        *self >= 0.0
    }

    fn sqrt_in_field(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(self.sqrt())
        } else {
            None
        }
    }

    fn as_exact_rational(&self) -> Option<BigRational> {
        None
    }

    fn cos_two_pi(j: u64, m: u64) -> Option<Self> {
        f64::cos_two_pi(j, m).map(|c| c as f32)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_big_rational(x: &BigRational) -> Self {
        x.clone()
    }

    fn to_f64_approx(&self) -> f64 {
        big_rational_to_f64(self)
    }

    fn is_nonnegative(&self) -> bool {
        !self.is_negative()
    }

    fn sqrt_in_field(&self) -> Option<Self> {
        rational_sqrt(self)
    }

    fn as_exact_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn cos_two_pi(j: u64, m: u64) -> Option<Self> {
        crate::qext::Quad23::cos_two_pi(j, m).and_then(|c| c.as_exact_rational())
    }
}

impl Scalar for num_complex::Complex<f64> {
    const EXACT: bool = false;

    fn from_u64(n: u64) -> Self {
        Self::new(n as f64, 0.0)
    }

    fn from_i64(n: i64) -> Self {
        Self::new(n as f64, 0.0)
    }

    fn from_big_rational(x: &BigRational) -> Self {
        Self::new(big_rational_to_f64(x), 0.0)
    }

    fn to_f64_approx(&self) -> f64 {
        self.re
    }

    fn is_nonnegative(&self) -> bool {
        self.im == 0.0 && self.re >= 0.0
    }

    fn conj(&self) -> Self {
        num_complex::Complex::conj(self)
    }

    fn sqrt_in_field(&self) -> Option<Self> {
        Some(num_complex::Complex::sqrt(*self))
    }

    fn as_exact_rational(&self) -> Option<BigRational> {
        None
    }

    fn cos_two_pi(j: u64, m: u64) -> Option<Self> {
        f64::cos_two_pi(j, m).map(|c| Self::new(c, 0.0))
    }
}

/// Convert without overflowing: `to_f64` on huge numerators would saturate,
/// so fall back to a quotient of rounded parts when needed.
pub fn big_rational_to_f64(x: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale both parts down by a common power of two until they fit.
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    let shift = (n.bits().max(d.bits())).saturating_sub(900);
    n >>= shift;
    d >>= shift;
    match (n.to_f64(), d.to_f64()) {
        (Some(n), Some(d)) if d != 0.0 => n / d,
        _ => f64::NAN,
    }
}

/// `base^n` by binary exponentiation; exact scalars stay exact.
pub fn scalar_pow<S: Scalar>(base: &S, mut n: u64) -> S {
    let mut result = S::one();
    let mut square = base.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = result * square.clone();
        }
        square = square.clone() * square.clone();
        n >>= 1;
    }
    result
}

/// Exact rational square root: `Some` iff numerator and denominator are both
/// perfect squares (after reduction, which `BigRational` maintains).
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = num_integer::Roots::sqrt(x.numer());
    let d = num_integer::Roots::sqrt(x.denom());
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Reconstruct a rational with bounded denominator from a float using the
/// continued-fraction expansion. Returns `Some(p/q)` when a convergent with
/// `q <= max_den` lands within `tol` of `x`; this is how floating-point runs
/// decide whether a computed multiplicity "is" a rational number.
pub fn rational_reconstruct(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    // Convergents p_k/q_k of the continued fraction of x.
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::from(0));
    let (mut p1, mut q1) = (BigInt::from(x.floor() as i64), BigInt::from(1));
    let mut frac = x - x.floor();
    let bound = BigInt::from(max_den);
    for _ in 0..64 {
        let cand = BigRational::new(p1.clone(), q1.clone());
        if (big_rational_to_f64(&cand) - x).abs() <= tol {
            return Some(cand);
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if !a.is_finite() || a >= 9.0e15 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > bound {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        frac = inv - a;
    }
    let cand = BigRational::new(p1, q1);
    if (big_rational_to_f64(&cand) - x).abs() <= tol {
        Some(cand)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_detects_perfect_squares() {
        let x = BigRational::new(BigInt::from(49), BigInt::from(16));
        assert_eq!(
            rational_sqrt(&x),
            Some(BigRational::new(BigInt::from(7), BigInt::from(4)))
        );
        let y = BigRational::new(BigInt::from(2), BigInt::from(1));
        assert_eq!(rational_sqrt(&y), None);
        assert_eq!(rational_sqrt(&-x), None);
        assert_eq!(
            rational_sqrt(&BigRational::zero()),
            Some(BigRational::zero())
        );
    }

    #[test]
    fn reconstruct_simple_fractions() {
        let r = rational_reconstruct(1.0 / 3.0, 100, 1e-9).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(1), BigInt::from(3)));
        let r = rational_reconstruct(16.0 / 45.0, 1000, 1e-9).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(16), BigInt::from(45)));
        // An irrational stays unrecognized under a tight denominator bound.
        assert_eq!(rational_reconstruct(std::f64::consts::SQRT_2, 50, 1e-9), None);
        // Negative values work through the floor-based expansion.
        let r = rational_reconstruct(-3.0 / 7.0, 100, 1e-9).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(-3), BigInt::from(7)));
    }

    #[test]
    fn generic_ratio_agrees_across_scalars() {
        fn probe<S: Scalar>() -> f64 {
            S::ratio(-5, 8).to_f64_approx()
        }
        assert_eq!(probe::<f64>(), -0.625);
        assert_eq!(probe::<BigRational>(), -0.625);
        assert_eq!(probe::<num_complex::Complex<f64>>(), -0.625);
        assert_eq!(probe::<f32>(), -0.625);
    }

    #[test]
    fn huge_rational_to_f64_stays_finite() {
        let big = BigInt::from(10).pow(400);
        let x = BigRational::new(big.clone() * 3, big);
        assert!((big_rational_to_f64(&x) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn complex_nonnegativity_requires_real_axis() {
        use num_complex::Complex;
        assert!(Scalar::is_nonnegative(&Complex::new(2.0, 0.0)));
        assert!(!Scalar::is_nonnegative(&Complex::new(2.0, 1e-3)));
        assert!(!Scalar::is_nonnegative(&Complex::new(-2.0, 0.0)));
    }
}
