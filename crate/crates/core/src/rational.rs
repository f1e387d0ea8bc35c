use std::fmt;

use num_rational::Ratio;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Nonnegative exact fraction, serialized as `{"num": .., "den": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<u128>);

impl Rational {
    /// `None` when `den == 0`.
    pub fn new(num: u128, den: u128) -> Option<Self> {
        (den != 0).then(|| Rational(Ratio::new(num, den)))
    }

    pub fn from_integer(v: u128) -> Self {
        Rational(Ratio::from_integer(v))
    }

    pub fn numer(&self) -> u128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u128 {
        *self.0.denom()
    }

    pub fn ceil(&self) -> u128 {
        self.numer().div_ceil(self.denom())
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    num: u128,
    den: u128,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire { num: self.numer(), den: self.denom() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        Rational::new(w.num, w.den).ok_or_else(|| D::Error::custom("zero denominator"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_rounds_up() {
        let r = Rational::new(36, 48).unwrap();
        assert_eq!((r.numer(), r.denom()), (3, 4));
        assert_eq!(r.ceil(), 1);
        assert_eq!(Rational::new(8, 4).unwrap().ceil(), 2);
        assert_eq!(Rational::new(0, 5).unwrap().ceil(), 0);
        assert!(Rational::new(1, 0).is_none());
        assert!(Rational::new(3, 16).unwrap() < Rational::new(9, 16).unwrap());
    }

    #[test]
    fn json_shape() {
        let r = Rational::new(9, 16).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"num":9,"den":16}"#);
        assert_eq!(serde_json::from_str::<Rational>(&s).unwrap(), r);
        assert!(serde_json::from_str::<Rational>(r#"{"num":1,"den":0}"#).is_err());
    }
}
