//! Exact Gaussian rationals `a + b·i` with `a, b ∈ ℚ`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

/// An exact complex number with rational real and imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gaussian {
    pub re: Rational64,
    pub im: Rational64,
}

impl Gaussian {
    pub fn new(re: Rational64, im: Rational64) -> Self {
        Gaussian { re, im }
    }

    pub fn from_int(v: i64) -> Self {
        Gaussian::new(Rational64::from_integer(v), Rational64::zero())
    }

    pub fn real(re: Rational64) -> Self {
        Gaussian::new(re, Rational64::zero())
    }

    pub fn i() -> Self {
        Gaussian::new(Rational64::zero(), Rational64::one())
    }

    pub fn zero() -> Self {
        Gaussian::from_int(0)
    }

    pub fn one() -> Self {
        Gaussian::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gaussian::new(self.re, -self.im)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = self.re * self.re + self.im * self.im;
        Some(Gaussian::new(self.re / norm, -self.im / norm))
    }

    /// Returns the value as a nonnegative integer when it is one.
    pub fn as_nonneg_integer(&self) -> Option<u64> {
        if self.is_real() && self.re.is_integer() && !self.re.is_negative() {
            u64::try_from(*self.re.numer()).ok()
        } else {
            None
        }
    }

    /// `[num, den, num_i, den_i]`, the wire form used by the JSON schemas.
    pub fn to_parts(&self) -> [i64; 4] {
        [*self.re.numer(), *self.re.denom(), *self.im.numer(), *self.im.denom()]
    }

    pub fn from_parts(p: [i64; 4]) -> Option<Self> {
        if p[1] == 0 || p[3] == 0 {
            return None;
        }
        Some(Gaussian::new(Rational64::new(p[0], p[1]), Rational64::new(p[2], p[3])))
    }
}

impl Default for Gaussian {
    fn default() -> Self {
        Gaussian::zero()
    }
}

impl From<i64> for Gaussian {
    fn from(v: i64) -> Self {
        Gaussian::from_int(v)
    }
}

impl Add for Gaussian {
    type Output = Gaussian;
    fn add(self, o: Gaussian) -> Gaussian {
        Gaussian::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign for Gaussian {
    fn add_assign(&mut self, o: Gaussian) {
        *self = *self + o;
    }
}

impl Sub for Gaussian {
    type Output = Gaussian;
    fn sub(self, o: Gaussian) -> Gaussian {
        Gaussian::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian::new(-self.re, -self.im)
    }
}

impl Mul for Gaussian {
    type Output = Gaussian;
    fn mul(self, o: Gaussian) -> Gaussian {
        Gaussian::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "({}-{}i)", self.re, -self.im)
        } else {
            write!(f, "({}+{}i)", self.re, self.im)
        }
    }
}
