//! Exact arithmetic in the real quadratic tower `Q(sqrt 2, sqrt 3)`.
//!
//! Elements are stored on the basis `(1, sqrt 2, sqrt 3, sqrt 6)` with
//! [`BigRational`] coordinates. The field contains `cos(2*pi*j/m)` for every
//! `m` dividing 24, which covers all gonalities a finite thick generalized
//! polygon can have — so character tables and orthogonality counts for those
//! geometries can be computed with no rounding at all, and irrationality of a
//! multiplicity is a theorem, not a tolerance call.
//!
//! Sign determination is exact: a recursive descent through the two quadratic
//! layers reduces every comparison to rational arithmetic.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{big_rational_to_f64, rational_sqrt, Scalar};

/// `a + b*sqrt2 + c*sqrt3 + d*sqrt6` with rational coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quad23 {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

fn rat_i64(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Quad23 {
    pub fn of_parts(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Quad23 { a, b, c, d }
    }

    pub fn rational(a: BigRational) -> Self {
        Quad23::of_parts(a, BigRational::zero(), BigRational::zero(), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Quad23::rational(rat_i64(num, den))
    }

    pub fn sqrt2() -> Self {
        let mut x = Self::zero();
        x.b = BigRational::one();
        x
    }

    pub fn sqrt3() -> Self {
        let mut x = Self::zero();
        x.c = BigRational::one();
        x
    }

    pub fn sqrt6() -> Self {
        let mut x = Self::zero();
        x.d = BigRational::one();
        x
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// Galois conjugate sending `sqrt2 -> -sqrt2`.
    fn conj2(&self) -> Self {
        Quad23::of_parts(self.a.clone(), -self.b.clone(), self.c.clone(), -self.d.clone())
    }

    /// Galois conjugate sending `sqrt3 -> -sqrt3`.
    fn conj3(&self) -> Self {
        Quad23::of_parts(self.a.clone(), self.b.clone(), -self.c.clone(), -self.d.clone())
    }

    fn mul_ref(&self, o: &Self) -> Self {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&o.a, &o.b, &o.c, &o.d);
        let two = rat_i64(2, 1);
        let three = rat_i64(3, 1);
        let six = rat_i64(6, 1);
        Quad23::of_parts(
            a1 * a2 + &two * (b1 * b2) + &three * (c1 * c2) + &six * (d1 * d2),
            a1 * b2 + b1 * a2 + &three * (c1 * d2 + d1 * c2),
            a1 * c2 + c1 * a2 + &two * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )
    }

    /// Multiplicative inverse via the product of Galois conjugates: the norm
    /// `x * s2(x) * s3(x) * s2s3(x)` is rational, so the inverse is the
    /// conjugate product divided by it.
    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in Q(sqrt2, sqrt3)");
        let cofactor = self
            .conj2()
            .mul_ref(&self.conj3())
            .mul_ref(&self.conj2().conj3());
        let norm = self.mul_ref(&cofactor);
        debug_assert!(norm.is_rational());
        let n = norm.a;
        Quad23::of_parts(
            cofactor.a / &n,
            cofactor.b / &n,
            cofactor.c / &n,
            cofactor.d / &n,
        )
    }

    pub fn to_f64(&self) -> f64 {
        big_rational_to_f64(&self.a)
            + big_rational_to_f64(&self.b) * std::f64::consts::SQRT_2
            + big_rational_to_f64(&self.c) * 3f64.sqrt()
            + big_rational_to_f64(&self.d) * 6f64.sqrt()
    }

    /// Exact sign: -1, 0, or +1. Works by viewing the element as
    /// `u + v*sqrt3` with `u, v` in `Q(sqrt2)` and recursing: when `u` and
    /// `v` agree in sign the answer is theirs; otherwise it is decided by
    /// which of `u^2` and `3*v^2` dominates (they can only tie at zero,
    /// since `sqrt3` is not in `Q(sqrt2)`).
    pub fn signum(&self) -> i32 {
        fn sign_q2(p: &BigRational, q: &BigRational) -> i32 {
            // sign of p + q*sqrt2
            let sp = rat_sign(p);
            let sq = rat_sign(q);
            if sq == 0 {
                return sp;
            }
            if sp == 0 {
                return sq;
            }
            if sp == sq {
                return sp;
            }
            let disc = p * p - rat_i64(2, 1) * (q * q);
            sp * rat_sign(&disc)
        }
        fn rat_sign(x: &BigRational) -> i32 {
            if x.is_zero() {
                0
            } else if x.is_negative() {
                -1
            } else {
                1
            }
        }
        let su = sign_q2(&self.a, &self.b);
        let sv = sign_q2(&self.c, &self.d);
        if sv == 0 {
            return su;
        }
        if su == 0 {
            return sv;
        }
        if su == sv {
            return su;
        }
        // u, v of opposite sign: compare u^2 against 3 v^2 inside Q(sqrt2).
        // u^2 - 3 v^2 = (a^2 + 2b^2 - 3c^2 - 6d^2) + (2ab - 6cd) sqrt2
        let two = rat_i64(2, 1);
        let p = &self.a * &self.a + &two * (&self.b * &self.b)
            - rat_i64(3, 1) * (&self.c * &self.c)
            - rat_i64(6, 1) * (&self.d * &self.d);
        let q = &two * (&self.a * &self.b) - rat_i64(6, 1) * (&self.c * &self.d);
        su * sign_q2(&p, &q)
    }
}

impl Add for Quad23 {
    type Output = Quad23;
    fn add(self, o: Quad23) -> Quad23 {
        Quad23::of_parts(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Quad23 {
    type Output = Quad23;
    fn sub(self, o: Quad23) -> Quad23 {
        Quad23::of_parts(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Quad23 {
    type Output = Quad23;
    fn neg(self) -> Quad23 {
        Quad23::of_parts(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Quad23 {
    type Output = Quad23;
    fn mul(self, o: Quad23) -> Quad23 {
        self.mul_ref(&o)
    }
}

impl Div for Quad23 {
    type Output = Quad23;
    fn div(self, o: Quad23) -> Quad23 {
        self.mul_ref(&o.inverse())
    }
}

impl Zero for Quad23 {
    fn zero() -> Self {
        Quad23::of_parts(
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        )
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }
}

impl One for Quad23 {
    fn one() -> Self {
        Quad23::rational(BigRational::one())
    }
}

impl fmt::Display for Quad23 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        if !self.a.is_zero() {
            terms.push(format!("{}", self.a));
        }
        for (coef, name) in [(&self.b, "r2"), (&self.c, "r3"), (&self.d, "r6")] {
            if !coef.is_zero() {
                terms.push(format!("{coef}*{name}"));
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Scalar for Quad23 {
    const EXACT: bool = true;

    fn from_u64(n: u64) -> Self {
        Quad23::rational(BigRational::from_integer(BigInt::from(n)))
    }

    fn from_i64(n: i64) -> Self {
        Quad23::rational(BigRational::from_integer(BigInt::from(n)))
    }

    fn from_big_rational(x: &BigRational) -> Self {
        Quad23::rational(x.clone())
    }

    fn to_f64_approx(&self) -> f64 {
        self.to_f64()
    }

    fn is_nonnegative(&self) -> bool {
        self.signum() >= 0
    }

    fn sqrt_in_field(&self) -> Option<Self> {
        sqrt_in_tower(self)
    }

    fn as_exact_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.a.clone())
        } else {
            None
        }
    }

    fn cos_two_pi(j: u64, m: u64) -> Option<Self> {
        if m == 0 {
            return None;
        }
        cos2pi(j, m)
    }

    fn recip(&self) -> Self {
        self.inverse()
    }
}

/// Square root of a nonnegative rational, when it lies in the tower: writing
/// `p/q = (p q)/q^2`, the root exists iff the square-free part of `p q` is
/// one of 1, 2, 3, 6.
pub fn sqrt_nonneg_rational(x: &BigRational) -> Option<Quad23> {
    if x.is_negative() {
        return None;
    }
    let n: BigInt = x.numer() * x.denom();
    let q = x.denom().clone();
    let candidates: [(i64, fn(BigRational) -> Quad23); 4] = [
        (1, |r| Quad23::rational(r)),
        (2, |r| {
            let mut v = Quad23::zero();
            v.b = r;
            v
        }),
        (3, |r| {
            let mut v = Quad23::zero();
            v.c = r;
            v
        }),
        (6, |r| {
            let mut v = Quad23::zero();
            v.d = r;
            v
        }),
    ];
    for (s, build) in candidates {
        let s = BigInt::from(s);
        if (&n % &s).is_zero() {
            let m = &n / &s;
            let k = num_integer::Roots::sqrt(&m);
            if &k * &k == m {
                return Some(build(BigRational::new(k, q)));
            }
        }
    }
    None
}

/// Square root of `p + q*sqrt2` inside `Q(sqrt2)`, as basis coordinates.
fn sqrt_in_q2(p: &BigRational, q: &BigRational) -> Option<(BigRational, BigRational)> {
    let two = rat_i64(2, 1);
    if q.is_zero() {
        if let Some(s) = rational_sqrt(p) {
            return Some((s, BigRational::zero()));
        }
        // p = 2 t^2 gives sqrt = t sqrt2
        if let Some(t) = rational_sqrt(&(p / &two)) {
            return Some((BigRational::zero(), t));
        }
        return None;
    }
    // (s + t sqrt2)^2 = s^2 + 2t^2 + 2st sqrt2; with q != 0 neither s nor t
    // vanishes, and s^2 solves 4x^2 - 4px + 2q^2 = 0, i.e. x = (p ± sqrt(p^2 - 2q^2))/2.
    let disc = p * p - &two * (q * q);
    let root = rational_sqrt(&disc)?;
    for sign in [1i64, -1] {
        let s2 = (p + BigRational::from_integer(BigInt::from(sign)) * &root) / &two;
        if s2.is_negative() {
            continue;
        }
        if let Some(s) = rational_sqrt(&s2) {
            if s.is_zero() {
                continue;
            }
            let t = q / (&two * &s);
            // verify
            if &(&s * &s) + &two * (&t * &t) == *p && &two * &s * &t == *q {
                return Some((s, t));
            }
        }
    }
    None
}

/// Square root within the tower, when one exists. Splits the element as
/// `u + v*sqrt3` over `Q(sqrt2)` and solves `(s + t*sqrt3)^2 = u + v*sqrt3`.
pub fn sqrt_in_tower(x: &Quad23) -> Option<Quad23> {
    if x.signum() < 0 {
        return None;
    }
    if x.is_zero() {
        return Some(Quad23::zero());
    }
    let three = rat_i64(3, 1);
    // u = a + b sqrt2, v = c + d sqrt2
    let (ua, ub, va, vb) = (&x.a, &x.b, &x.c, &x.d);
    if va.is_zero() && vb.is_zero() {
        // sqrt of an element of Q(sqrt2): either stays there, or is
        // (t sqrt3) with t in Q(sqrt2) when x/3 is a square there.
        if let Some((s, t)) = sqrt_in_q2(ua, ub) {
            let cand = Quad23::of_parts(s, t, BigRational::zero(), BigRational::zero());
            if cand.signum() >= 0 {
                return Some(cand);
            }
            return Some(-cand);
        }
        let p3 = ua / &three;
        let q3 = ub / &three;
        if let Some((s, t)) = sqrt_in_q2(&p3, &q3) {
            let cand = Quad23::of_parts(BigRational::zero(), BigRational::zero(), s, t);
            if cand.signum() >= 0 {
                return Some(cand);
            }
            return Some(-cand);
        }
        return None;
    }
    // v != 0: s^2 = (u ± sqrt(u^2 - 3 v^2))/2 with the inner root in Q(sqrt2).
    let two = rat_i64(2, 1);
    // u^2 - 3 v^2 in Q(sqrt2) coordinates:
    let p = ua * ua + &two * (ub * ub) - &three * (va * va) - &three * &two * (vb * vb);
    let q = &two * (ua * ub) - &three * &two * (va * vb);
    let (ra, rb) = sqrt_in_q2(&p, &q)?;
    for sign in [1i64, -1] {
        let sgn = BigRational::from_integer(BigInt::from(sign));
        let s2a = (ua + &sgn * &ra) / &two;
        let s2b = (ub + &sgn * &rb) / &two;
        if let Some((sa, sb)) = sqrt_in_q2(&s2a, &s2b) {
            let s = Quad23::of_parts(sa, sb, BigRational::zero(), BigRational::zero());
            if s.is_zero() {
                continue;
            }
            // t = v / (2 s), placed on the sqrt3 axis
            let v = Quad23::of_parts(va.clone(), vb.clone(), BigRational::zero(), BigRational::zero());
            let t = v.mul_ref(&s.inverse()) / Quad23::from_ratio(2, 1);
            let cand = Quad23::of_parts(
                s.a.clone(),
                s.b.clone(),
                t.a.clone(),
                t.b.clone(),
            );
            if cand.mul_ref(&cand) == *x {
                if cand.signum() >= 0 {
                    return Some(cand);
                }
                return Some(-cand);
            }
        }
    }
    None
}

/// `cos(2*pi*j/m)` exactly, for every angle that is a multiple of 15 degrees
/// (reduced denominator of `j/m` dividing 24). Returns `None` otherwise.
pub fn cos2pi(j: u64, m: u64) -> Option<Quad23> {
    assert!(m > 0);
    let jm = j % m;
    let g = num_integer::gcd(jm, m);
    let s = m / g;
    if 24 % s != 0 {
        return None;
    }
    let p = if jm == 0 { 0 } else { jm / g };
    let k = (p * (24 / s)) % 24;
    let idx = k.min(24 - k); // cos(2 pi - t) = cos t
    Some(cos_k_pi_12(idx as i64))
}

/// `cos(k * pi / 12)` for `0 <= k <= 12`.
fn cos_k_pi_12(k: i64) -> Quad23 {
    debug_assert!((0..=12).contains(&k));
    if k > 6 {
        return -cos_k_pi_12(12 - k);
    }
    match k {
        0 => Quad23::one(),
        // (sqrt6 + sqrt2)/4
        1 => Quad23::of_parts(BigRational::zero(), rat_i64(1, 4), BigRational::zero(), rat_i64(1, 4)),
        2 => Quad23::of_parts(BigRational::zero(), BigRational::zero(), rat_i64(1, 2), BigRational::zero()),
        3 => Quad23::of_parts(BigRational::zero(), rat_i64(1, 2), BigRational::zero(), BigRational::zero()),
        4 => Quad23::from_ratio(1, 2),
        // (sqrt6 - sqrt2)/4
        5 => Quad23::of_parts(BigRational::zero(), rat_i64(-1, 4), BigRational::zero(), rat_i64(1, 4)),
        6 => Quad23::zero(),
        _ => unreachable!(),
    }
}
