//! Arithmetic in GF(2^k) for 1 <= k <= 8.
//!
//! Elements are bit-packed polynomial residues stored in a `u8`. Each field
//! is built once: multiplication is reduced carry-less multiplication, and a
//! generator found by brute-force order search seeds exp/log tables that the
//! hot paths use.

use crate::{Error, Result};

/// A field element in bit-packed polynomial representation.
pub type FieldElement = u8;

/// Irreducible moduli for GF(2^k), k = 1..=8, as bit-packed polynomials.
const MODULI: [u16; 8] = [
    0b11,
    0b111,
    0b1011,
    0b10011,
    0b100101,
    0b1000011,
    0b10000011,
    0b100011011,
];

/// A concrete field GF(2^k) with precomputed exp/log tables.
#[derive(Debug, Clone)]
pub struct Field {
    k: u8,
    q: u16,
    modulus: u16,
    generator: FieldElement,
    /// exp[i] = generator^i for i in 0..2(q-1); doubled so mul can skip a reduction.
    exp: Vec<FieldElement>,
    /// log[x] for x in 1..q; log[0] is unused.
    log: Vec<u16>,
}

/// Multiplies two packed polynomials modulo the degree-k modulus.
fn clmul_mod(mut a: u16, mut b: u16, k: u8, modulus: u16) -> u16 {
    let mut acc = 0u16;
    let top = 1u16 << k;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc
}

/// Multiplicative order of a nonzero packed element.
fn order_of(x: u16, k: u8, modulus: u16) -> u32 {
    let mut pow = x;
    let mut ord = 1;
    while pow != 1 {
        pow = clmul_mod(pow, x, k, modulus);
        ord += 1;
    }
    ord
}

impl Field {
    /// Builds GF(2^k). Fails with a config error unless 1 <= k <= 8.
    pub fn new(k: u8) -> Result<Self> {
        if !(1..=8).contains(&k) {
            return Err(Error::Config(format!(
                "field degree k must be in 1..=8, got {k}"
            )));
        }
        let modulus = MODULI[(k - 1) as usize];
        let q = 1u16 << k;
        let generator = if k == 1 {
            1
        } else {
            (2..q)
                .find(|&x| order_of(x, k, modulus) == (q - 1) as u32)
                .expect("every finite field has a primitive element") as FieldElement
        };
        let mut exp = vec![0u8; 2 * (q - 1) as usize];
        let mut log = vec![0u16; q as usize];
        let mut pow = 1u16;
        for i in 0..(q - 1) as usize {
            exp[i] = pow as FieldElement;
            exp[i + (q - 1) as usize] = pow as FieldElement;
            log[pow as usize] = i as u16;
            pow = clmul_mod(pow, generator as u16, k, modulus);
        }
        Ok(Field {
            k,
            q,
            modulus,
            generator,
            exp,
            log,
        })
    }

    /// Field degree k.
    pub fn k(&self) -> u8 {
        self.k
    }

    /// Field size q = 2^k.
    pub fn q(&self) -> u16 {
        self.q
    }

    /// The packed modulus polynomial.
    pub fn modulus(&self) -> u16 {
        self.modulus
    }

    /// A fixed primitive element.
    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    /// Iterates over all field elements, zero first.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        0..self.q as u8
    }

    /// Addition (polynomial XOR).
    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a ^ b
    }

    /// Multiplication via exp/log tables.
    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Multiplicative inverse; zero has none.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a == 0 {
            return Err(Error::Domain("inverse of zero in GF(2^k)".into()));
        }
        let l = self.log[a as usize];
        Ok(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }

    /// Squaring (the Frobenius endomorphism).
    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Exponentiation by a nonnegative integer.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % (self.q as u64 - 1))) % (self.q as u64 - 1)) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_degrees() {
        assert!(Field::new(0).is_err());
        assert!(Field::new(9).is_err());
    }

    #[test]
    fn gf2_is_parity_arithmetic() {
        let f = Field::new(1).unwrap();
        assert_eq!(f.q(), 2);
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.mul(1, 1), 1);
        assert_eq!(f.inv(1).unwrap(), 1);
        assert_eq!(f.generator(), 1);
    }

    #[test]
    fn gf4_multiplication_matches_hand_table() {
        // GF(4) = {0, 1, t, t+1} packed as {0, 1, 2, 3}; t^2 = t + 1.
        let f = Field::new(2).unwrap();
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1);
        assert_eq!(f.mul(3, 3), 2);
    }

    #[test]
    fn zero_has_no_inverse() {
        for k in 1..=8 {
            let f = Field::new(k).unwrap();
            assert!(matches!(f.inv(0), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_k() {
        for k in 1..=4 {
            let f = Field::new(k).unwrap();
            let elems: Vec<_> = f.elements().collect();
            for &a in &elems {
                for &b in &elems {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &elems {
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn pairwise_laws_all_k() {
        for k in 1..=8 {
            let f = Field::new(k).unwrap();
            let elems: Vec<_> = f.elements().collect();
            for &a in &elems {
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.mul(a, 0), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for &b in &elems {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    // No zero divisors.
                    if a != 0 && b != 0 {
                        assert_ne!(f.mul(a, b), 0);
                    }
                    // Frobenius is additive in characteristic 2.
                    assert_eq!(f.square(f.add(a, b)), f.add(f.square(a), f.square(b)));
                }
            }
        }
    }

    #[test]
    fn squaring_is_a_permutation() {
        for k in 1..=8 {
            let f = Field::new(k).unwrap();
            let mut seen = vec![false; f.q() as usize];
            for a in f.elements() {
                let s = f.square(a) as usize;
                assert!(!seen[s]);
                seen[s] = true;
            }
        }
    }

    #[test]
    fn generator_has_full_order() {
        for k in 1..=8 {
            let f = Field::new(k).unwrap();
            let mut pow: FieldElement = 1;
            for _ in 0..(f.q() - 2) {
                pow = f.mul(pow, f.generator());
                assert_ne!(pow, 1);
            }
            pow = f.mul(pow, f.generator());
            assert_eq!(pow, 1);
        }
    }

    #[test]
    fn degree_eight_modulus_x_is_not_primitive() {
        // For x^8 + x^4 + x^3 + x + 1 the class of x has order 51, so the
        // generator search must move past it.
        let f = Field::new(8).unwrap();
        assert_eq!(order_of(2, 8, f.modulus()), 51);
        assert_ne!(f.generator(), 2);
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        for k in [1u8, 3, 8] {
            let f = Field::new(k).unwrap();
            for a in f.elements() {
                let mut acc: FieldElement = 1;
                for e in 0..2 * f.q() as u64 {
                    assert_eq!(f.pow(a, e), acc, "k={k} a={a} e={e}");
                    acc = f.mul(acc, a);
                }
            }
        }
    }
}
