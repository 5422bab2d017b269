use crate::phase::Phase;
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign};

/// Exact scalar in the ring Z[w, 1/sqrt(2)] with w = e^{i pi/4}.
///
/// Represents 2^(-half_power/2) * (c0 + c1 w + c2 w^2 + c3 w^3), using
/// w^4 = -1. This ring is closed under every operation the Clifford+T
/// fragment needs, so amplitudes, rewrite bookkeeping and decomposition
/// coefficients never round.
///
/// Canonical form: the zero scalar is (half_power 0, coeffs 0); otherwise
/// half_power >= 0 and, while half_power > 0, no further factor of
/// sqrt(2) = w - w^3 can be extracted from the coefficients.
#[derive(Copy, Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    half_power: i32,
    coeffs: [i64; 4],
}

impl ExactScalar {
    pub fn zero() -> ExactScalar {
        ExactScalar { half_power: 0, coeffs: [0; 4] }
    }

    pub fn one() -> ExactScalar {
        ExactScalar { half_power: 0, coeffs: [1, 0, 0, 0] }
    }

    pub fn new(half_power: i32, coeffs: [i64; 4]) -> ExactScalar {
        ExactScalar { half_power, coeffs }.canonical()
    }

    /// w^m = e^{i m pi/4}.
    pub fn from_phase(p: Phase) -> ExactScalar {
        let m = p.numerator() as usize;
        let mut coeffs = [0i64; 4];
        coeffs[m % 4] = if m < 4 { 1 } else { -1 };
        ExactScalar { half_power: 0, coeffs }
    }

    /// 1 + w^m: the value of an isolated phase-m spider.
    pub fn one_plus_phase(p: Phase) -> ExactScalar {
        ExactScalar::one() + ExactScalar::from_phase(p)
    }

    pub fn half_power(&self) -> i32 {
        self.half_power
    }

    pub fn coeffs(&self) -> [i64; 4] {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0; 4]
    }

    pub fn is_one(&self) -> bool {
        *self == ExactScalar::one()
    }

    /// Multiply by sqrt(2)^p (p may be negative).
    pub fn mul_sqrt2_pow(&mut self, p: i32) {
        if self.is_zero() {
            return;
        }
        self.half_power -= p;
        *self = self.canonical();
    }

    /// Multiply by w^m.
    pub fn mul_phase(&mut self, p: Phase) {
        *self = *self * ExactScalar::from_phase(p);
    }

    fn canonical(mut self) -> ExactScalar {
        if self.coeffs == [0; 4] {
            self.half_power = 0;
            return self;
        }
        // Raise negative half_power to 0 by multiplying coefficients by
        // sqrt(2) = w - w^3.
        while self.half_power < 0 {
            self.coeffs = sqrt2_times(self.coeffs);
            self.half_power += 1;
        }
        // Extract sqrt(2) factors while possible.
        while self.half_power > 0 {
            match sqrt2_div(self.coeffs) {
                Some(c) => {
                    self.coeffs = c;
                    self.half_power -= 1;
                }
                None => break,
            }
        }
        self
    }

    pub fn to_complex(&self) -> Complex64 {
        let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut wp = Complex64::new(1.0, 0.0);
        for c in self.coeffs {
            acc += wp * (c as f64);
            wp *= w;
        }
        acc * 2f64.powf(-(self.half_power as f64) / 2.0)
    }
}

/// sqrt(2) * (c0 + c1 w + c2 w^2 + c3 w^3) with sqrt(2) = w - w^3.
fn sqrt2_times(c: [i64; 4]) -> [i64; 4] {
    [c[1] - c[3], c[0] + c[2], c[1] + c[3], c[2] - c[0]]
}

/// Inverse of `sqrt2_times` when it exists over the integers.
fn sqrt2_div(d: [i64; 4]) -> Option<[i64; 4]> {
    if (d[0] + d[2]) % 2 != 0 || (d[1] + d[3]) % 2 != 0 {
        return None;
    }
    Some([
        (d[1] - d[3]) / 2,
        (d[0] + d[2]) / 2,
        (d[3] + d[1]) / 2,
        (d[2] - d[0]) / 2,
    ])
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: ExactScalar) -> ExactScalar {
        let mut coeffs = [0i64; 4];
        for i in 0..4 {
            if self.coeffs[i] == 0 {
                continue;
            }
            for j in 0..4 {
                if rhs.coeffs[j] == 0 {
                    continue;
                }
                let k = i + j;
                let v = self.coeffs[i] * rhs.coeffs[j];
                if k < 4 {
                    coeffs[k] += v;
                } else {
                    coeffs[k - 4] -= v;
                }
            }
        }
        ExactScalar { half_power: self.half_power + rhs.half_power, coeffs }.canonical()
    }
}

impl MulAssign for ExactScalar {
    fn mul_assign(&mut self, rhs: ExactScalar) {
        *self = *self * rhs;
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: ExactScalar) -> ExactScalar {
        if self.is_zero() {
            return rhs.canonical();
        }
        if rhs.is_zero() {
            return self.canonical();
        }
        let k = self.half_power.max(rhs.half_power);
        let mut a = self.coeffs;
        for _ in 0..(k - self.half_power) {
            a = sqrt2_times(a);
        }
        let mut b = rhs.coeffs;
        for _ in 0..(k - rhs.half_power) {
            b = sqrt2_times(b);
        }
        let coeffs = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
        ExactScalar { half_power: k, coeffs }.canonical()
    }
}

impl AddAssign for ExactScalar {
    fn add_assign(&mut self, rhs: ExactScalar) {
        *self = *self + rhs;
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "2^(-{}/2)*({} + {}w + {}w2 + {}w3)",
            self.half_power, self.coeffs[0], self.coeffs[1], self.coeffs[2], self.coeffs[3]
        )
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
