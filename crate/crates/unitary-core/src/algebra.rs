//! The group algebra FG: dense coefficient vectors over GF(2^k) indexed by
//! group elements, with the * anti-automorphism, augmentation, indicator
//! sums, and the natural homomorphism onto F[G/G'].

use crate::gf2k::{Field, FieldElement};
use crate::group::{Elem, Group};
use crate::{Error, Result};

/// An element of FG as a dense coefficient vector indexed by group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    pub coeffs: Vec<FieldElement>,
}

impl AlgebraElement {
    /// Indices of the nonzero coefficients.
    pub fn support(&self) -> Vec<Elem> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(g, _)| g as Elem)
            .collect()
    }

    /// True if every coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 0)
    }
}

/// The algebra context: a group together with a coefficient field.
pub struct Algebra<'a> {
    group: &'a Group,
    field: &'a Field,
}

impl<'a> Algebra<'a> {
    /// Binds a group and a field into an algebra context.
    pub fn new(group: &'a Group, field: &'a Field) -> Self {
        Algebra { group, field }
    }

    pub fn group(&self) -> &Group {
        self.group
    }

    pub fn field(&self) -> &Field {
        self.field
    }

    fn check(&self, x: &AlgebraElement) -> Result<()> {
        if x.coeffs.len() != self.group.order() {
            return Err(Error::Domain(format!(
                "coefficient vector has length {} but the group has order {}",
                x.coeffs.len(),
                self.group.order()
            )));
        }
        Ok(())
    }

    fn check_scalar(&self, a: FieldElement) -> Result<()> {
        if u16::from(a) >= self.field.q() {
            return Err(Error::Domain(format!(
                "scalar {a} is not an element of GF({})",
                self.field.q()
            )));
        }
        Ok(())
    }

    /// The zero element.
    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement { coeffs: vec![0; self.group.order()] }
    }

    /// The multiplicative identity 1.
    pub fn one(&self) -> AlgebraElement {
        self.element(0)
    }

    /// The basis element g with coefficient 1.
    pub fn element(&self, g: Elem) -> AlgebraElement {
        let mut x = self.zero();
        x.coeffs[g as usize] = 1;
        x
    }

    /// Wraps a raw coefficient vector after validating it.
    pub fn from_coeffs(&self, coeffs: Vec<FieldElement>) -> Result<AlgebraElement> {
        let x = AlgebraElement { coeffs };
        self.check(&x)?;
        for &a in &x.coeffs {
            self.check_scalar(a)?;
        }
        Ok(x)
    }

    /// Coefficientwise sum.
    pub fn add(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        self.check(y)?;
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Ok(AlgebraElement { coeffs })
    }

    /// Scalar multiple a·x.
    pub fn scale(&self, a: FieldElement, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        self.check_scalar(a)?;
        let coeffs = x.coeffs.iter().map(|&b| self.field.mul(a, b)).collect();
        Ok(AlgebraElement { coeffs })
    }

    /// Convolution product via the Cayley table.
    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        self.check(y)?;
        if self.field.k() == 1 {
            Ok(self.mul_packed(x, y))
        } else {
            Ok(self.mul_generic(x, y))
        }
    }

    pub(crate) fn mul_generic(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = self.zero();
        for (g, &a) in x.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (h, &b) in y.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let gh = self.group.mul(g as Elem, h as Elem) as usize;
                out.coeffs[gh] = self.field.add(out.coeffs[gh], self.field.mul(a, b));
            }
        }
        out
    }

    /// GF(2) product on bit-packed vectors: XOR-accumulates one Cayley row
    /// per support element of x.
    pub(crate) fn mul_packed(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let n = self.group.order();
        let words = n.div_ceil(64);
        let mut ybits = vec![0u64; words];
        for (h, &b) in y.coeffs.iter().enumerate() {
            if b != 0 {
                ybits[h / 64] |= 1u64 << (h % 64);
            }
        }
        let mut obits = vec![0u64; words];
        for (g, &a) in x.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (w, &word) in ybits.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let h = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let gh = self.group.mul(g as Elem, h as Elem) as usize;
                    obits[gh / 64] ^= 1u64 << (gh % 64);
                }
            }
        }
        let mut out = self.zero();
        for g in 0..n {
            out.coeffs[g] = ((obits[g / 64] >> (g % 64)) & 1) as FieldElement;
        }
        out
    }

    /// The anti-automorphism sending Σ α_g g to Σ α_g g⁻¹.
    pub fn star(&self, x: &AlgebraElement) -> AlgebraElement {
        let mut out = self.zero();
        for (g, &a) in x.coeffs.iter().enumerate() {
            out.coeffs[self.group.inverse(g as Elem) as usize] = a;
        }
        out
    }

    /// The sum of all coefficients.
    pub fn augmentation(&self, x: &AlgebraElement) -> FieldElement {
        x.coeffs.iter().fold(0, |acc, &a| self.field.add(acc, a))
    }

    /// The indicator sum of a set of group elements.
    pub fn hat(&self, elements: &[Elem]) -> AlgebraElement {
        let mut out = self.zero();
        for &g in elements {
            out.coeffs[g as usize] = self.field.add(out.coeffs[g as usize], 1);
        }
        out
    }

    /// Inverse of a unit, via x^{2^t} = 1 for normalized x in char 2.
    ///
    /// Writing x = a(1+r) with a the augmentation and r of augmentation 0,
    /// r is nilpotent with r^{|G|} = 0, so (1+r)^{2^t} = 1 + r^{2^t} = 1
    /// once 2^t >= |G|, and (1+r)^{-1} = (1+r)^{2^t - 1}.
    pub fn inverse(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x)?;
        let a = self.augmentation(x);
        if a == 0 {
            return Err(Error::Domain(
                "element has augmentation 0 and is not a unit".into(),
            ));
        }
        let normalized = self.scale(self.field.inv(a)?, x)?;
        let t = usize::BITS - (self.group.order() - 1).leading_zeros();
        let mut inv = self.one();
        let mut power = normalized;
        for _ in 0..t {
            inv = self.mul(&inv, &power)?;
            power = self.mul(&power, &power)?;
        }
        self.scale(self.field.inv(a)?, &inv)
    }

    /// Builds the natural homomorphism FG -> F[G/G'] for |G'| = 2.
    pub fn psi_map(&self) -> Result<PsiMap> {
        let derived = self.group.derived();
        if derived.order() != 2 {
            return Err(Error::Unsupported(format!(
                "the natural map to F[G/G'] requires |G'| = 2, found {}",
                derived.order()
            )));
        }
        let (quotient, classes) = self.group.quotient_by_derived()?;
        Ok(PsiMap { quotient, classes })
    }
}

/// The natural homomorphism Psi: FG -> F[G/G'], coefficients summed along
/// G'-cosets.
pub struct PsiMap {
    quotient: Group,
    classes: Vec<Elem>,
}

impl PsiMap {
    pub fn quotient(&self) -> &Group {
        &self.quotient
    }

    /// The coset-class index of a group element.
    pub fn class_of(&self, g: Elem) -> Elem {
        self.classes[g as usize]
    }

    /// Applies the map; the result is indexed by quotient elements.
    pub fn apply(&self, field: &Field, x: &AlgebraElement) -> AlgebraElement {
        let mut coeffs = vec![0; self.quotient.order()];
        for (g, &a) in x.coeffs.iter().enumerate() {
            let class = self.classes[g] as usize;
            coeffs[class] = field.add(coeffs[class], a);
        }
        AlgebraElement { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builders::{build, parse_spec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grp(text: &str) -> Group {
        build(&parse_spec(text).unwrap()).unwrap()
    }

    fn random_element(alg: &Algebra, rng: &mut ChaCha8Rng) -> AlgebraElement {
        let coeffs = (0..alg.group().order())
            .map(|_| rng.gen_range(0..alg.field().q()) as FieldElement)
            .collect();
        alg.from_coeffs(coeffs).unwrap()
    }

    fn seeded_rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0x5eed)
    }

    #[test]
    fn char2_squares_act_on_exponents() {
        let g = grp("D8");
        let f = Field::new(1).unwrap();
        let alg = Algebra::new(&g, &f);
        for e in 0..g.order() as Elem {
            let x = alg.add(&alg.one(), &alg.element(e)).unwrap();
            let got = alg.mul(&x, &x).unwrap();
            let want = alg.add(&alg.one(), &alg.element(g.mul(e, e))).unwrap();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn derived_hat_is_central_and_squares_to_zero() {
        let g = grp("D8");
        let f = Field::new(1).unwrap();
        let alg = Algebra::new(&g, &f);
        let ghat = alg.hat(&g.derived().elements);
        let c = g.designated_c().unwrap();
        assert_eq!(ghat, alg.add(&alg.one(), &alg.element(c)).unwrap());
        assert!(alg.mul(&ghat, &ghat).unwrap().is_zero());
        let mut rng = seeded_rng();
        for _ in 0..20 {
            let x = random_element(&alg, &mut rng);
            let left = alg.mul(&ghat, &x).unwrap();
            let right = alg.mul(&x, &ghat).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn one_is_the_identity() {
        let g = grp("Q8");
        let f = Field::new(3).unwrap();
        let alg = Algebra::new(&g, &f);
        let mut rng = seeded_rng();
        for _ in 0..10 {
            let x = random_element(&alg, &mut rng);
            assert_eq!(alg.mul(&x, &alg.one()).unwrap(), x);
            assert_eq!(alg.mul(&alg.one(), &x).unwrap(), x);
        }
    }

    #[test]
    fn star_is_an_involutive_anti_automorphism() {
        for spec in ["D8", "Z8", "Q8 . M2(2,1)"] {
            let g = grp(spec);
            let f = Field::new(2).unwrap();
            let alg = Algebra::new(&g, &f);
            let mut rng = seeded_rng();
            for _ in 0..10 {
                let x = random_element(&alg, &mut rng);
                let y = random_element(&alg, &mut rng);
                assert_eq!(alg.star(&alg.star(&x)), x);
                let lhs = alg.star(&alg.mul(&x, &y).unwrap());
                let rhs = alg.mul(&alg.star(&y), &alg.star(&x)).unwrap();
                assert_eq!(lhs, rhs);
                let sum_star = alg.star(&alg.add(&x, &y).unwrap());
                let star_sum = alg.add(&alg.star(&x), &alg.star(&y)).unwrap();
                assert_eq!(sum_star, star_sum);
                assert_eq!(alg.augmentation(&alg.star(&x)), alg.augmentation(&x));
            }
        }
    }

    #[test]
    fn augmentation_is_a_ring_homomorphism() {
        let g = grp("M2(2,2)");
        let f = Field::new(2).unwrap();
        let alg = Algebra::new(&g, &f);
        let mut rng = seeded_rng();
        for _ in 0..20 {
            let x = random_element(&alg, &mut rng);
            let y = random_element(&alg, &mut rng);
            let prod = alg.mul(&x, &y).unwrap();
            assert_eq!(
                alg.augmentation(&prod),
                f.mul(alg.augmentation(&x), alg.augmentation(&y))
            );
        }
        assert_eq!(alg.augmentation(&alg.one()), 1);
        let one_plus_g = alg.add(&alg.one(), &alg.element(3)).unwrap();
        let f2 = Field::new(1).unwrap();
        let alg2 = Algebra::new(&g, &f2);
        assert_eq!(alg2.augmentation(&one_plus_g), 0);
    }

    #[test]
    fn hat_of_the_whole_group_absorbs_translation() {
        let g = grp("D8");
        let f = Field::new(1).unwrap();
        let alg = Algebra::new(&g, &f);
        let all: Vec<Elem> = (0..g.order() as Elem).collect();
        let ghat = alg.hat(&all);
        assert_eq!(alg.hat(&[0]), alg.one());
        for e in 0..g.order() as Elem {
            assert_eq!(alg.mul(&ghat, &alg.element(e)).unwrap(), ghat);
        }
    }

    #[test]
    fn packed_product_matches_the_generic_path() {
        for spec in ["D8", "Z8", "M2(2,2)", "Q8 x Z2"] {
            let g = grp(spec);
            let f = Field::new(1).unwrap();
            let alg = Algebra::new(&g, &f);
            let mut rng = seeded_rng();
            for _ in 0..25 {
                let x = random_element(&alg, &mut rng);
                let y = random_element(&alg, &mut rng);
                assert_eq!(alg.mul_packed(&x, &y), alg.mul_generic(&x, &y));
            }
        }
    }

    #[test]
    fn normalized_elements_are_invertible() {
        let f = Field::new(1).unwrap();
        for spec in ["Z8", "D8"] {
            let g = grp(spec);
            let alg = Algebra::new(&g, &f);
            let n = g.order();
            for tail in 0..1u32 << (n - 1) {
                let mut coeffs = vec![0; n];
                for i in 1..n {
                    coeffs[i] = ((tail >> (i - 1)) & 1) as FieldElement;
                }
                coeffs[0] = f.add(1, alg.augmentation(&AlgebraElement { coeffs: coeffs.clone() }));
                let x = alg.from_coeffs(coeffs).unwrap();
                assert_eq!(alg.augmentation(&x), 1);
                let inv = alg.inverse(&x).unwrap();
                assert_eq!(alg.mul(&x, &inv).unwrap(), alg.one());
                assert_eq!(alg.mul(&inv, &x).unwrap(), alg.one());
            }
        }
        let g = grp("Q8");
        let f4 = Field::new(2).unwrap();
        let alg = Algebra::new(&g, &f4);
        let mut rng = seeded_rng();
        for _ in 0..15 {
            let mut x = random_element(&alg, &mut rng);
            if alg.augmentation(&x) == 0 {
                x.coeffs[0] = f4.add(x.coeffs[0], 1);
            }
            let inv = alg.inverse(&x).unwrap();
            assert_eq!(alg.mul(&x, &inv).unwrap(), alg.one());
        }
        assert!(alg.inverse(&alg.zero()).is_err());
    }

    #[test]
    fn psi_kills_exactly_the_derived_ideal() {
        let g = grp("Q8");
        let f = Field::new(1).unwrap();
        let alg = Algebra::new(&g, &f);
        let psi = alg.psi_map().unwrap();
        assert!(psi.quotient().is_abelian());
        let c = g.designated_c().unwrap();
        let one_plus_c = alg.add(&alg.one(), &alg.element(c)).unwrap();
        assert!(psi.apply(&f, &one_plus_c).is_zero());
        let image = psi.apply(&f, &alg.element(3));
        assert_eq!(image.support(), vec![psi.class_of(3)]);
        let mut kernel = 0usize;
        for bits in 0..1u32 << g.order() {
            let coeffs = (0..g.order())
                .map(|i| ((bits >> i) & 1) as FieldElement)
                .collect();
            let x = alg.from_coeffs(coeffs).unwrap();
            if psi.apply(&f, &x).is_zero() {
                kernel += 1;
            }
        }
        assert_eq!(kernel, 16);
    }

    #[test]
    fn psi_commutes_with_star_and_multiplication() {
        let g = grp("M2(2,2)");
        let f = Field::new(2).unwrap();
        let alg = Algebra::new(&g, &f);
        let psi = alg.psi_map().unwrap();
        let qalg = Algebra::new(psi.quotient(), &f);
        let mut rng = seeded_rng();
        for _ in 0..15 {
            let x = random_element(&alg, &mut rng);
            let y = random_element(&alg, &mut rng);
            let star_then_psi = psi.apply(&f, &alg.star(&x));
            let psi_then_star = qalg.star(&psi.apply(&f, &x));
            assert_eq!(star_then_psi, psi_then_star);
            let psi_of_product = psi.apply(&f, &alg.mul(&x, &y).unwrap());
            let product_of_psis = qalg
                .mul(&psi.apply(&f, &x), &psi.apply(&f, &y))
                .unwrap();
            assert_eq!(psi_of_product, product_of_psis);
        }
    }

    #[test]
    fn psi_requires_a_derived_subgroup_of_order_two() {
        let g = grp("Z4");
        let f = Field::new(1).unwrap();
        let alg = Algebra::new(&g, &f);
        assert!(matches!(alg.psi_map(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn mismatched_vectors_are_rejected() {
        let g = grp("D8");
        let f = Field::new(1).unwrap();
        let alg = Algebra::new(&g, &f);
        assert!(alg.from_coeffs(vec![0; 4]).is_err());
        assert!(alg.from_coeffs(vec![2; 8]).is_err());
        let short = AlgebraElement { coeffs: vec![0; 4] };
        assert!(alg.add(&alg.one(), &short).is_err());
        assert!(alg.mul(&alg.one(), &short).is_err());
    }
}
