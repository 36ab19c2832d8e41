use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

/// Constant payload of an expression leaf.
///
/// Arithmetic on two exact values stays exact unless it overflows, in which
/// case the result degrades to a complex float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Number {
    Exact(Rational64),
    Inexact(Complex64),
}

impl Number {
    pub fn from_f64(v: f64) -> Number {
        if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 {
            return Number::Exact(Rational64::from_integer(v as i64));
        }
        // Dyadic fractions with a short mantissa survive exactly.
        if v.is_finite() {
            for shift in 1..=20 {
                let scaled = v * f64::from(1u32 << shift);
                if scaled.fract() == 0.0 && scaled.abs() < 1e15 {
                    return Number::Exact(Rational64::new(scaled as i64, 1i64 << shift));
                }
            }
        }
        Number::Inexact(Complex64::new(v, 0.0))
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Number::Exact(r) => Complex64::new(ratio_to_f64(r), 0.0),
            Number::Inexact(c) => c,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Exact(r) => r.is_zero(),
            Number::Inexact(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Number::Exact(r) => r.is_one(),
            Number::Inexact(c) => c.re == 1.0 && c.im == 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Number::Exact(_))
    }

    /// Integer value, if this is an exact integer.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Number::Exact(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    /// Strictly negative real value (exact or inexact with zero imaginary part).
    pub fn is_negative_real(&self) -> bool {
        match self {
            Number::Exact(r) => r.is_negative(),
            Number::Inexact(c) => c.im == 0.0 && c.re < 0.0,
        }
    }

    /// Division; `None` when the divisor is zero.
    pub fn try_div(self, other: Number) -> Option<Number> {
        if other.is_zero() {
            return None;
        }
        Some(self.combine(other, |a, b| a.checked_div(&b), |a, b| a / b))
    }

    /// Integer power, exact when possible. `None` for zero to a negative power.
    pub fn powi(self, k: i64) -> Option<Number> {
        if self.is_zero() && k < 0 {
            return None;
        }
        if let Number::Exact(r) = self {
            if k.unsigned_abs() <= 64 {
                let mut acc = Some(Rational64::one());
                for _ in 0..k.unsigned_abs() {
                    acc = acc.and_then(|a| a.checked_mul(&r));
                }
                if let Some(p) = acc {
                    let p = if k < 0 { p.recip() } else { p };
                    return Some(Number::Exact(p));
                }
            }
        }
        Some(Number::Inexact(powi_complex(self.to_complex(), k)))
    }

    fn combine(
        self,
        other: Number,
        exact: impl Fn(Rational64, Rational64) -> Option<Rational64>,
        inexact: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Number {
        if let (Number::Exact(a), Number::Exact(b)) = (self, other) {
            if let Some(r) = exact(a, b) {
                return Number::Exact(r);
            }
        }
        Number::Inexact(inexact(self.to_complex(), other.to_complex()))
    }
}

impl std::ops::Neg for Number {
    type Output = Number;
    fn neg(self) -> Number {
        match self {
            Number::Exact(r) => Number::Exact(-r),
            Number::Inexact(c) => Number::Inexact(-c),
        }
    }
}

impl std::ops::Add for Number {
    type Output = Number;
    fn add(self, other: Number) -> Number {
        self.combine(other, |a, b| a.checked_add(&b), |a, b| a + b)
    }
}

impl std::ops::Sub for Number {
    type Output = Number;
    fn sub(self, other: Number) -> Number {
        self.combine(other, |a, b| a.checked_sub(&b), |a, b| a - b)
    }
}

impl std::ops::Mul for Number {
    type Output = Number;
    fn mul(self, other: Number) -> Number {
        self.combine(other, |a, b| a.checked_mul(&b), |a, b| a * b)
    }
}

pub(crate) fn ratio_to_f64(r: Rational64) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| *r.numer() as f64 / *r.denom() as f64)
}

/// Integer power that stays on the real axis for real bases.
pub(crate) fn powi_complex(z: Complex64, k: i64) -> Complex64 {
    if z.im == 0.0 {
        let k32 = i32::try_from(k).unwrap_or(if k < 0 { i32::MIN } else { i32::MAX });
        return Complex64::new(z.re.powi(k32), 0.0);
    }
    let k32 = i32::try_from(k).unwrap_or(if k < 0 { i32::MIN } else { i32::MAX });
    z.powi(k32)
}
