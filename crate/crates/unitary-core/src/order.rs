//! Exact orders of the form (ell_num/ell_den) * q^e with ell a power of 2.
//!
//! Group and subgroup orders in this crate are always powers of two, but the
//! exponents outgrow u128 quickly (|V_*| for |G| = 4096 over GF(256) has
//! thousands of binary digits). `OrderValue` keeps the leading rational
//! power of 2 and the field-size exponent separate, does exact arithmetic on
//! exponents, and only materializes an integer on demand.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;

use crate::{Error, Result};

/// An exact value (ell_num/ell_den) * q^e with q = 2^field_k.
///
/// Internally the rational ell part is stored as its (possibly negative)
/// base-2 logarithm. Two values are equal when they evaluate to the same
/// number, regardless of how the power of two is split between ell and e.
#[derive(Debug, Clone, Copy)]
pub struct OrderValue {
    log2_ell: i64,
    f_exponent: i64,
    field_k: u8,
}

impl OrderValue {
    /// Builds ell * q^e from log2(ell), e and the field degree k.
    pub fn new(log2_ell: i64, f_exponent: i64, field_k: u8) -> Self {
        OrderValue {
            log2_ell,
            f_exponent,
            field_k,
        }
    }

    /// The value 1.
    pub fn one(field_k: u8) -> Self {
        OrderValue::new(0, 0, field_k)
    }

    /// Wraps an integer count, which must be a power of two.
    pub fn from_count(count: u128, field_k: u8) -> Result<Self> {
        if count == 0 || !count.is_power_of_two() {
            return Err(Error::Domain(format!(
                "count {count} is not a power of two"
            )));
        }
        Ok(OrderValue::new(count.trailing_zeros() as i64, 0, field_k))
    }

    /// log2(ell), the rational leading factor.
    pub fn log2_ell(&self) -> i64 {
        self.log2_ell
    }

    /// The exponent of q.
    pub fn f_exponent(&self) -> i64 {
        self.f_exponent
    }

    /// The field degree k with q = 2^k.
    pub fn field_k(&self) -> u8 {
        self.field_k
    }

    /// log2 of the evaluated value.
    pub fn total_log2(&self) -> i64 {
        self.log2_ell + self.field_k as i64 * self.f_exponent
    }

    /// True when the evaluated value is an integer (no denominator left).
    pub fn is_integer(&self) -> bool {
        self.total_log2() >= 0
    }

    /// Exact product; both operands must live over the same field.
    pub fn mul(&self, other: &OrderValue) -> Result<OrderValue> {
        self.check_field(other)?;
        Ok(OrderValue::new(
            self.log2_ell + other.log2_ell,
            self.f_exponent + other.f_exponent,
            self.field_k,
        ))
    }

    /// Exact quotient; both operands must live over the same field.
    pub fn div(&self, other: &OrderValue) -> Result<OrderValue> {
        self.check_field(other)?;
        Ok(OrderValue::new(
            self.log2_ell - other.log2_ell,
            self.f_exponent - other.f_exponent,
            self.field_k,
        ))
    }

    /// Multiplies by 2^s.
    pub fn scale_pow2(&self, s: i64) -> OrderValue {
        OrderValue::new(self.log2_ell + s, self.f_exponent, self.field_k)
    }

    /// Multiplies by q^e.
    pub fn scale_q_pow(&self, e: i64) -> OrderValue {
        OrderValue::new(self.log2_ell, self.f_exponent + e, self.field_k)
    }

    /// Evaluates to u128 when the value is an integer that fits.
    pub fn to_u128(&self) -> Option<u128> {
        let t = self.total_log2();
        if (0..=127).contains(&t) {
            Some(1u128 << t)
        } else {
            None
        }
    }

    fn check_field(&self, other: &OrderValue) -> Result<()> {
        if self.field_k != other.field_k {
            return Err(Error::Domain(format!(
                "mixed-field order arithmetic: GF(2^{}) vs GF(2^{})",
                self.field_k, other.field_k
            )));
        }
        Ok(())
    }

    fn pow2_string(t: i64) -> String {
        if (0..=63).contains(&t) {
            (1u64 << t).to_string()
        } else {
            format!("2^{t}")
        }
    }
}

impl PartialEq for OrderValue {
    fn eq(&self, other: &Self) -> bool {
        self.total_log2() == other.total_log2()
    }
}

impl Eq for OrderValue {}

impl fmt::Display for OrderValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.total_log2();
        if t < 0 {
            return write!(f, "1/{}", Self::pow2_string(-t));
        }
        if t <= 63 {
            return write!(f, "{}", 1u64 << t);
        }
        write!(f, "2^{t}")
    }
}

impl Serialize for OrderValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("OrderValue", 5)?;
        s.serialize_field("ell_num", &Self::pow2_string(self.log2_ell.max(0)))?;
        s.serialize_field("ell_den", &Self::pow2_string((-self.log2_ell).max(0)))?;
        s.serialize_field("f_exponent", &self.f_exponent)?;
        s.serialize_field("q", &(1u16 << self.field_k))?;
        s.serialize_field("value", &self.to_string())?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_ignores_the_split() {
        // 4 * 2^17 over GF(2) equals 2^19 however it is written.
        let a = OrderValue::new(2, 17, 1);
        let b = OrderValue::new(19, 0, 1);
        let c = OrderValue::from_count(1 << 19, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.to_u128(), Some(1 << 19));
    }

    #[test]
    fn field_degree_scales_the_exponent() {
        // 4 * 4^17 over GF(4) is 2^36.
        let a = OrderValue::new(2, 17, 2);
        assert_eq!(a.total_log2(), 36);
        assert_eq!(a.to_u128(), Some(1u128 << 36));
    }

    #[test]
    fn from_count_rejects_non_powers() {
        assert!(OrderValue::from_count(0, 1).is_err());
        assert!(OrderValue::from_count(3, 1).is_err());
        assert!(OrderValue::from_count(1536, 1).is_err());
        assert_eq!(OrderValue::from_count(1, 1).unwrap().total_log2(), 0);
    }

    #[test]
    fn arithmetic_is_exact_on_exponents() {
        let half_q2 = OrderValue::new(-1, 2, 2); // (1/2) q^2, the GINS theta shape
        let big = OrderValue::new(0, 9, 2);
        let prod = big.mul(&half_q2).unwrap();
        assert_eq!(prod, OrderValue::new(-1, 11, 2));
        let back = prod.div(&half_q2).unwrap();
        assert_eq!(back, big);
        assert!(big.mul(&OrderValue::one(1)).is_err());
    }

    #[test]
    fn huge_values_stay_symbolic() {
        let v = OrderValue::new(3, 5000, 8);
        assert_eq!(v.to_u128(), None);
        assert_eq!(v.to_string(), "2^40003");
        assert!(v.is_integer());
    }

    #[test]
    fn fractions_display_and_detect() {
        let theta_recip = OrderValue::new(2, -3, 1); // 4 / q^3 over GF(2)
        assert!(!theta_recip.is_integer());
        assert_eq!(theta_recip.to_string(), "1/2");
        assert_eq!(theta_recip.to_u128(), None);
    }

    #[test]
    fn serializes_with_split_fields() {
        let v = OrderValue::new(-1, 2, 2);
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["ell_num"], "1");
        assert_eq!(json["ell_den"], "2");
        assert_eq!(json["f_exponent"], 2);
        assert_eq!(json["q"], 4);
        assert_eq!(json["value"], "8");
    }
}
