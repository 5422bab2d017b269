use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Spider phase as an integer multiple of pi/4, reduced modulo 8.
///
/// Clifford phases are the even multiples; odd multiples are T-like and
/// count towards the T-count of a diagram.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ZERO: Phase = Phase(0);
    pub const T: Phase = Phase(1);
    pub const S: Phase = Phase(2);
    pub const PI: Phase = Phase(4);
    pub const SDG: Phase = Phase(6);
    pub const TDG: Phase = Phase(7);

    /// Build from any integer number of pi/4 units.
    pub fn new(units: i64) -> Phase {
        Phase(units.rem_euclid(8) as u8)
    }

    pub fn numerator(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn is_pi(self) -> bool {
        self.0 == 4
    }

    /// 0 or pi.
    pub fn is_pauli(self) -> bool {
        self.0 % 4 == 0
    }

    pub fn is_clifford(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn is_t_like(self) -> bool {
        self.0 % 2 == 1
    }

    /// +pi/2 or -pi/2.
    pub fn is_proper_clifford(self) -> bool {
        self.0 == 2 || self.0 == 6
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 8)
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        Phase((8 + self.0 - rhs.0) % 8)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase((8 - self.0) % 8)
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}pi/4", self.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "0"),
            1 => write!(f, "pi/4"),
            2 => write!(f, "pi/2"),
            3 => write!(f, "3pi/4"),
            4 => write!(f, "pi"),
            5 => write!(f, "5pi/4"),
            6 => write!(f, "3pi/2"),
            7 => write!(f, "7pi/4"),
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_mod_8() {
        assert_eq!(Phase::new(9), Phase::T);
        assert_eq!(Phase::new(-1), Phase::TDG);
        assert_eq!(Phase::new(-8), Phase::ZERO);
    }

    #[test]
    fn clifford_vs_t() {
        assert!(Phase::new(0).is_clifford());
        assert!(Phase::new(2).is_clifford());
        assert!(Phase::new(1).is_t_like());
        assert!(Phase::new(7).is_t_like());
        assert!(!Phase::new(3).is_clifford());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(Phase::T + Phase::T, Phase::S);
        assert_eq!(Phase::T + Phase::TDG, Phase::ZERO);
        assert_eq!(-Phase::T, Phase::TDG);
        assert_eq!(Phase::PI - Phase::S, Phase::S);
    }
}
