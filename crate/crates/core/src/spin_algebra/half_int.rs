use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exact half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    pub const fn integer(n: i32) -> Self {
        Self { twice: 2 * n }
    }

    /// Converts a float that must be an exact multiple of ½.
    pub fn try_from_f64(x: f64) -> Result<Self> {
        let t = 2.0 * x;
        if !t.is_finite() || (t - t.round()).abs() > 1e-12 || t.abs() > i32::MAX as f64 {
            return Err(Error::Input(format!("{x} is not a half-integer")));
        }
        Ok(Self::from_twice(t.round() as i32))
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn abs(self) -> Self {
        Self::from_twice(self.twice.abs())
    }

    /// Number of projections `2j + 1` of a spin `j`.
    pub fn multiplicity(self) -> usize {
        debug_assert!(self.twice >= 0);
        (self.twice + 1) as usize
    }

    /// `-j, -j+1, …, j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> + Clone {
        (-self.twice..=self.twice).step_by(2).map(HalfInt::from_twice)
    }

    /// `|a - b|, …, a + b` in unit steps.
    pub fn triangle_range(a: HalfInt, b: HalfInt) -> impl Iterator<Item = HalfInt> + Clone {
        let lo = (a.twice - b.twice).abs();
        let hi = a.twice + b.twice;
        (lo..=hi).step_by(2).map(HalfInt::from_twice)
    }

    /// Whether `c` lies in the triangle range of `a` and `b`.
    pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
        c.twice >= (a.twice - b.twice).abs()
            && c.twice <= a.twice + b.twice
            && (a.twice + b.twice + c.twice) % 2 == 0
    }

    /// `|m| ≤ j` and `j − m` integral.
    pub fn is_projection_of(self, j: HalfInt) -> bool {
        self.twice.abs() <= j.twice && (j.twice - self.twice) % 2 == 0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3"`, `"3/2"`, `"-1/2"` and decimal forms such as `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("bad half-integer '{s}'")))?;
            match den.trim() {
                "2" => Ok(HalfInt::from_twice(num)),
                "1" => Ok(HalfInt::integer(num)),
                _ => Err(Error::Input(format!("'{s}' is not a half-integer"))),
            }
        } else {
            let x: f64 = s
                .parse()
                .map_err(|_| Error::Input(format!("bad half-integer '{s}'")))?;
            HalfInt::try_from_f64(x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("5/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(5));
        assert_eq!("2.5".parse::<HalfInt>().unwrap(), HalfInt::from_twice(5));
        assert_eq!("-3".parse::<HalfInt>().unwrap(), HalfInt::integer(-3));
        assert!("0.3".parse::<HalfInt>().is_err());
        assert!("1/3".parse::<HalfInt>().is_err());
        assert_eq!(HalfInt::from_twice(5).to_string(), "5/2");
        assert_eq!(HalfInt::integer(2).to_string(), "2");
    }

    #[test]
    fn ranges() {
        let j = HalfInt::from_twice(3);
        let ms: Vec<i32> = j.projections().map(|m| m.twice()).collect();
        assert_eq!(ms, vec![-3, -1, 1, 3]);
        let js: Vec<i32> = HalfInt::triangle_range(HalfInt::ONE, HalfInt::HALF)
            .map(|x| x.twice())
            .collect();
        assert_eq!(js, vec![1, 3]);
        assert!(HalfInt::triangle(HalfInt::ONE, HalfInt::ONE, HalfInt::ZERO));
        assert!(!HalfInt::triangle(HalfInt::ONE, HalfInt::HALF, HalfInt::ZERO));
    }
}
