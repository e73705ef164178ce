use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign};

/// Additive cost. Finite values are negated log probabilities in
/// probabilistic models and arbitrary reals otherwise; `INFINITE` marks an
/// impossible event and absorbs addition.
#[derive(Clone, Copy, Debug, Default)]
pub struct Cost(f64);

impl Cost {
    pub const ZERO: Cost = Cost(0.0);
    pub const INFINITE: Cost = Cost(f64::INFINITY);

    /// Panics on NaN or negative infinity.
    pub fn new(value: f64) -> Cost {
        assert!(!value.is_nan(), "cost must not be NaN");
        assert!(value != f64::NEG_INFINITY, "cost must not be -inf");
        Cost(value)
    }

    pub fn from_probability(p: f64) -> Cost {
        if p <= 0.0 {
            Cost::INFINITE
        } else {
            Cost(-libm::log(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        !self.0.is_finite()
    }

    pub fn probability(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            libm::exp(-self.0)
        }
    }

    pub fn min(self, other: Cost) -> Cost {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl PartialEq for Cost {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        // -0.0 and 0.0 compare equal; NaN cannot be constructed.
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        if self.is_infinite() || rhs.is_infinite() {
            Cost::INFINITE
        } else {
            Cost(self.0 + rhs.0)
        }
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        *self = *self + rhs;
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

impl From<f64> for Cost {
    fn from(v: f64) -> Cost {
        Cost::new(v)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_absorbs_addition() {
        assert!((Cost::INFINITE + Cost::new(-3.0)).is_infinite());
        assert!((Cost::new(1.0) + Cost::INFINITE).is_infinite());
        assert_eq!(Cost::new(1.5) + Cost::new(-0.5), Cost::new(1.0));
    }

    #[test]
    fn ordering_is_total_with_infinity_last() {
        let mut v = [Cost::INFINITE, Cost::new(2.0), Cost::new(-1.0), Cost::ZERO];
        v.sort();
        assert_eq!(v[0], Cost::new(-1.0));
        assert!(v[3].is_infinite());
        assert_eq!(Cost::new(0.0), Cost::new(-0.0));
    }

    #[test]
    fn probability_round_trip() {
        let c = Cost::from_probability(0.25);
        assert!((c.probability() - 0.25).abs() < 1e-15);
        assert!(Cost::from_probability(0.0).is_infinite());
        assert_eq!(Cost::INFINITE.probability(), 0.0);
    }
}
