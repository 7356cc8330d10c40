//! The unitary subgroup machinery: exhaustive counting of star-fixed
//! normalized units, the S-subgroup basis with its Theta invariant, witness
//! generators, and the quotient recursion on concrete groups.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{Algebra, AlgebraElement};
use crate::formulas;
use crate::gf2k::{Field, FieldElement};
use crate::group::builders::flatten;
use crate::group::{Elem, Group};
use crate::order::OrderValue;
use crate::{Error, Result};

/// Default candidate budget for exhaustive enumerations.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Budget for the exhaustive S-subgroup scan; admits order-16 groups over
/// GF(4), the heaviest case the exact Theta checks need.
const EXHAUSTIVE_S_BUDGET: u64 = 1 << 32;

const SAMPLE_SEED: u64 = 0x5eed_0001;
const DEFAULT_STALL_ROUNDS: u32 = 64;

/// True when x is normalized and x * star(x) = 1.
pub fn is_unitary(algebra: &Algebra, x: &AlgebraElement) -> Result<bool> {
    let product = algebra.mul(x, &algebra.star(x))?;
    Ok(algebra.augmentation(x) == 1 && product == algebra.one())
}

fn require_small_derived(group: &Group) -> Result<Elem> {
    let derived = group.derived();
    if derived.order() != 2 {
        return Err(Error::Unsupported(format!(
            "the derived subgroup has order {}, expected 2",
            derived.order()
        )));
    }
    Ok(derived.elements[1])
}

fn check_budget(group: &Group, field: &Field, budget: u64) -> Result<()> {
    let required_log2 = u32::from(field.k()) * group.order() as u32;
    if required_log2 >= 64 || (1u128 << required_log2) > u128::from(budget) {
        return Err(Error::Capacity { required_log2, given: u128::from(budget) });
    }
    Ok(())
}

fn with_pool<T: Send>(work: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = std::env::var("UNITARY_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1);
    match threads {
        Some(t) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)),
        None => Ok(work()),
    }
}

/// Streaming unitarity test on a raw normalized coefficient vector: for
/// every non-identity w the coefficient of w in x * star(x) is
/// sum over h of x[w*h] * x[h]; abort at the first nonzero row.
fn unitary_coeffs(group: &Group, field: &Field, coeffs: &[FieldElement]) -> bool {
    let n = group.order();
    for w in 1..n as Elem {
        let mut acc = 0u8;
        for h in 0..n as Elem {
            if coeffs[h as usize] != 0 {
                acc ^= field.mul(coeffs[group.mul(w, h) as usize], coeffs[h as usize]);
            }
        }
        if acc != 0 {
            return false;
        }
    }
    true
}

/// Writes candidate `index` into `coeffs`: base-q digits fill the
/// non-identity positions and the identity coefficient is chosen last so
/// that the augmentation is 1.
fn decode_candidate(index: u64, q: u16, coeffs: &mut [FieldElement]) {
    let mask = u64::from(q) - 1;
    let shift = q.trailing_zeros();
    let mut rest = index;
    let mut aug = 0u8;
    for slot in coeffs.iter_mut().skip(1) {
        *slot = (rest & mask) as FieldElement;
        rest >>= shift;
        aug ^= *slot;
    }
    coeffs[0] = aug ^ 1;
}

fn count_vstar_generic(group: &Group, field: &Field) -> u128 {
    let n = group.order();
    let q = field.q();
    let total = u64::from(q).pow(n as u32 - 1);
    let blocks = 256u64.min(total);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = total / blocks * b + (total % blocks).min(b);
            let hi = total / blocks * (b + 1) + (total % blocks).min(b + 1);
            let mut coeffs = vec![0u8; n];
            let mut count = 0u128;
            for index in lo..hi {
                decode_candidate(index, q, &mut coeffs);
                if unitary_coeffs(group, field, &coeffs) {
                    count += 1;
                }
            }
            count
        })
        .sum()
}

/// GF(2) fast path: supports are bitmasks and the row test is
/// parity(x & w*x) with w*x looked up bytewise from the Cayley table.
fn count_vstar_packed(group: &Group) -> u128 {
    let n = group.order();
    let chunks = n.div_ceil(8);
    let mut rows = vec![vec![[0u64; 256]; chunks]; n];
    for (w, row) in rows.iter_mut().enumerate().skip(1) {
        for (ch, table) in row.iter_mut().enumerate() {
            for (byte, entry) in table.iter_mut().enumerate() {
                let mut mask = 0u64;
                for bit in 0..8 {
                    let h = ch * 8 + bit;
                    if h < n && byte >> bit & 1 == 1 {
                        mask |= 1u64 << group.mul(w as Elem, h as Elem);
                    }
                }
                *entry = mask;
            }
        }
    }
    let total = 1u64 << (n - 1);
    let blocks = 256u64.min(total);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = total / blocks * b;
            let hi = total / blocks * (b + 1);
            let mut count = 0u128;
            'candidate: for index in lo..hi {
                let x = (index << 1) | u64::from(index.count_ones() & 1 == 0);
                for row in rows.iter().skip(1) {
                    let mut wx = 0u64;
                    for (ch, table) in row.iter().enumerate() {
                        wx |= table[(x >> (8 * ch)) as usize & 0xff];
                    }
                    if (wx & x).count_ones() & 1 == 1 {
                        continue 'candidate;
                    }
                }
                count += 1;
            }
            count
        })
        .sum()
}

/// Exact |V_*(FG)| by enumerating every normalized coefficient vector.
/// `budget` caps the candidate count q^|G| (default 2^26).
pub fn count_vstar_bruteforce(group: &Group, field: &Field, budget: Option<u64>) -> Result<u128> {
    check_budget(group, field, budget.unwrap_or(DEFAULT_BUDGET))?;
    if field.k() == 1 {
        with_pool(|| count_vstar_packed(group))
    } else {
        with_pool(|| count_vstar_generic(group, field))
    }
}

/// How an S-subgroup basis was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMethod {
    /// Full enumeration of the normalized units; the rank is exact.
    Exhaustive,
    /// Witness seeding plus random products; the rank is a lower bound.
    Sampled,
}

/// GF(2)-basis of the S-subgroup written as {1 + w}: the w vectors, their
/// rank, and the method that produced them.
#[derive(Debug, Clone)]
pub struct SSubgroupBasis {
    pub reps: Vec<AlgebraElement>,
    pub rank: u32,
    pub method: BasisMethod,
}

impl SSubgroupBasis {
    /// |S| = 2^rank.
    pub fn subgroup_size(&self) -> u128 {
        1u128 << self.rank
    }
}

struct Gf2Span {
    rows: Vec<Vec<u64>>,
    leads: Vec<usize>,
}

impl Gf2Span {
    fn new() -> Self {
        Gf2Span { rows: Vec::new(), leads: Vec::new() }
    }

    fn reduce_in_place(&self, v: &mut [u64]) {
        for (row, &lead) in self.rows.iter().zip(&self.leads) {
            if v[lead / 64] >> (lead % 64) & 1 == 1 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
    }

    fn insert_reduced(&mut self, v: Vec<u64>) -> bool {
        let lead = match v
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
        {
            Some(l) => l,
            None => return false,
        };
        for row in self.rows.iter_mut() {
            if row[lead / 64] >> (lead % 64) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&v) {
                    *a ^= b;
                }
            }
        }
        self.rows.push(v);
        self.leads.push(lead);
        true
    }

    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        self.reduce_in_place(&mut v);
        self.insert_reduced(v)
    }

    fn rank(&self) -> u32 {
        self.rows.len() as u32
    }
}

fn expand_bits_into(coeffs: &[FieldElement], k: u8, words: &mut [u64]) {
    words.iter_mut().for_each(|w| *w = 0);
    for (i, &a) in coeffs.iter().enumerate() {
        for b in 0..usize::from(k) {
            if a >> b & 1 == 1 {
                let bit = i * usize::from(k) + b;
                words[bit / 64] |= 1u64 << (bit % 64);
            }
        }
    }
}

fn expand_bits(coeffs: &[FieldElement], k: u8) -> Vec<u64> {
    let bits = coeffs.len() * usize::from(k);
    let mut words = vec![0u64; bits.div_ceil(64)];
    expand_bits_into(coeffs, k, &mut words);
    words
}

/// x * star(x) - 1 as a raw coefficient vector, written into `out`.
fn s_element_into(group: &Group, field: &Field, coeffs: &[FieldElement], out: &mut [FieldElement]) {
    let n = group.order();
    for w in 0..n as Elem {
        let mut acc = 0u8;
        for h in 0..n as Elem {
            if coeffs[h as usize] != 0 {
                acc ^= field.mul(coeffs[group.mul(w, h) as usize], coeffs[h as usize]);
            }
        }
        out[w as usize] = acc;
    }
    out[0] ^= 1;
}

fn s_element(group: &Group, field: &Field, coeffs: &[FieldElement]) -> Vec<FieldElement> {
    let mut out = vec![0u8; group.order()];
    s_element_into(group, field, coeffs, &mut out);
    out
}

fn sampled_rounds() -> u32 {
    std::env::var("UNITARY_SAMPLE_ROUNDS")
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .filter(|&r| r >= 1)
        .unwrap_or(DEFAULT_STALL_ROUNDS)
}

fn random_coeffs(field: &Field, n: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    (0..n).map(|_| rng.gen_range(0..field.q()) as FieldElement).collect()
}

fn random_normalized(field: &Field, n: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    let mut coeffs = random_coeffs(field, n, rng);
    let aug = coeffs.iter().skip(1).fold(0, |a, &b| a ^ b);
    coeffs[0] = aug ^ 1;
    coeffs
}

/// Basis of S = {x * star(x) | x normalized with psi(x) unitary}, written
/// as 1 + w with the w collected into a GF(2) span.
pub fn s_subgroup(group: &Group, field: &Field, method: BasisMethod) -> Result<SSubgroupBasis> {
    require_small_derived(group)?;
    let algebra = Algebra::new(group, field);
    let psi = algebra.psi_map()?;
    let n = group.order();
    let mut span = Gf2Span::new();
    let mut reps = Vec::new();
    let mut record = |span: &mut Gf2Span, coeffs: Vec<FieldElement>| -> Result<bool> {
        let grew = span.insert(expand_bits(&coeffs, field.k()));
        if grew {
            reps.push(algebra.from_coeffs(coeffs)?);
        }
        Ok(grew)
    };

    match method {
        BasisMethod::Exhaustive => {
            check_budget(group, field, EXHAUSTIVE_S_BUDGET)?;
            let class_of: Vec<Elem> = (0..n as Elem).map(|g| psi.class_of(g)).collect();
            let quotient = psi.quotient();
            let q = field.q();
            let words = (n * usize::from(field.k())).div_ceil(64);
            let total = u64::from(q).pow(n as u32 - 1);
            let blocks = 256u64.min(total);
            let found: Vec<Vec<Vec<FieldElement>>> = with_pool(|| {
                (0..blocks)
                    .into_par_iter()
                    .map(|b| {
                        let lo = total / blocks * b + (total % blocks).min(b);
                        let hi = total / blocks * (b + 1) + (total % blocks).min(b + 1);
                        let mut coeffs = vec![0u8; n];
                        let mut image = vec![0u8; quotient.order()];
                        let mut w = vec![0u8; n];
                        let mut bits = vec![0u64; words];
                        let mut local = Gf2Span::new();
                        let mut kept = Vec::new();
                        for index in lo..hi {
                            decode_candidate(index, q, &mut coeffs);
                            image.iter_mut().for_each(|s| *s = 0);
                            for (g, &a) in coeffs.iter().enumerate() {
                                image[class_of[g] as usize] ^= a;
                            }
                            if !unitary_coeffs(quotient, field, &image) {
                                continue;
                            }
                            s_element_into(group, field, &coeffs, &mut w);
                            expand_bits_into(&w, field.k(), &mut bits);
                            local.reduce_in_place(&mut bits);
                            if local.insert_reduced(bits.clone()) {
                                kept.push(w.clone());
                            }
                        }
                        kept
                    })
                    .collect()
            })?;
            for w in found.into_iter().flatten() {
                record(&mut span, w)?;
            }
        }
        BasisMethod::Sampled => {
            let counts = group.omega_sets();
            let max_rank = u32::from(field.k())
                * ((n - counts.count1() + counts.count_c()) / 4) as u32;
            for witness in ins_generators(group)? {
                for alpha in field.elements() {
                    let (_, claimed) = witness.witness(&algebra, alpha)?;
                    let mut coeffs = claimed.coeffs;
                    coeffs[0] ^= 1;
                    record(&mut span, coeffs)?;
                }
            }
            let quotient_algebra = Algebra::new(psi.quotient(), field);
            let lift: Vec<Elem> = {
                let mut reps = vec![Elem::MAX; psi.quotient().order()];
                for g in (0..n as Elem).rev() {
                    reps[psi.class_of(g) as usize] = g;
                }
                reps
            };
            let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
            let limit = sampled_rounds();
            let mut stalled = 0;
            while stalled < limit && span.rank() < max_rank {
                let mut vbar = None;
                for _ in 0..4096 {
                    let y = quotient_algebra.from_coeffs(random_normalized(
                        field,
                        psi.quotient().order(),
                        &mut rng,
                    ))?;
                    if quotient_algebra.mul(&y, &quotient_algebra.star(&y))?
                        == quotient_algebra.one()
                    {
                        vbar = Some(y);
                        break;
                    }
                }
                let Some(vbar) = vbar else {
                    stalled += 1;
                    continue;
                };
                let mut x = vec![0u8; n];
                for (class, &a) in vbar.coeffs.iter().enumerate() {
                    x[lift[class] as usize] = a;
                }
                let noise = algebra.from_coeffs(random_coeffs(field, n, &mut rng))?;
                let kernel = algebra.mul(&noise, &algebra.hat(&group.derived().elements))?;
                let unit = algebra.add(&algebra.one(), &kernel)?;
                let x = algebra.mul(&algebra.from_coeffs(x)?, &unit)?;
                if record(&mut span, s_element(group, field, &x.coeffs))? {
                    stalled = 0;
                } else {
                    stalled += 1;
                }
            }
        }
    }
    Ok(SSubgroupBasis { reps, rank: span.rank(), method })
}

/// A tuple matching one of the five witness hypotheses. `case` is 1..=5;
/// case 5 uses a single element stored in both fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsWitness {
    pub case: u8,
    pub h1: Elem,
    pub h2: Elem,
}

impl InsWitness {
    /// The witness x and the claimed S-subgroup element for the given
    /// scalar; the pair satisfies x * star(x) = claimed identically.
    pub fn witness(
        &self,
        algebra: &Algebra,
        alpha: FieldElement,
    ) -> Result<(AlgebraElement, AlgebraElement)> {
        let group = algebra.group();
        let field = algebra.field();
        let ghat = algebra.hat(&group.derived().elements);
        let one = algebra.one();
        let elem = |g: Elem| algebra.element(g);
        let with_hat = |g: Elem, a: FieldElement| -> Result<AlgebraElement> {
            algebra.scale(a, &algebra.mul(&elem(g), &ghat)?)
        };
        match self.case {
            1 | 2 | 4 => {
                let x = algebra.add(
                    &one,
                    &algebra.add(
                        &algebra.scale(alpha, &elem(self.h1))?,
                        &algebra.scale(alpha, &elem(self.h2))?,
                    )?,
                )?;
                let claimed = match self.case {
                    1 => {
                        let sum = algebra.add(&elem(self.h1), &elem(self.h2))?;
                        algebra.add(&one, &algebra.scale(alpha, &algebra.mul(&sum, &ghat)?)?)?
                    }
                    2 => {
                        let first = with_hat(self.h1, alpha)?;
                        let second =
                            with_hat(group.mul(self.h1, self.h2), field.mul(alpha, alpha))?;
                        algebra.add(&one, &algebra.add(&first, &second)?)?
                    }
                    _ => algebra.add(&one, &with_hat(self.h1, alpha)?)?,
                };
                Ok((x, claimed))
            }
            3 => {
                let prod = group.mul(self.h1, self.h2);
                let x = algebra.add(
                    &one,
                    &algebra.add(
                        &algebra.scale(alpha, &elem(prod))?,
                        &algebra.scale(alpha, &elem(self.h2))?,
                    )?,
                )?;
                let claimed = algebra.add(&one, &with_hat(prod, alpha)?)?;
                Ok((x, claimed))
            }
            5 => {
                let h = self.h1;
                let hh = group.mul(h, h);
                let x = algebra.add(
                    &algebra.scale(alpha, &algebra.add(&one, &elem(hh))?)?,
                    &elem(h),
                )?;
                let claimed = algebra.add(&one, &with_hat(hh, field.mul(alpha, alpha))?)?;
                Ok((x, claimed))
            }
            other => Err(Error::Domain(format!("witness case {other} is not in 1..=5"))),
        }
    }
}

/// Scans the group for the five witness shapes: (i) commuting h1, h2 both
/// squaring to c; (ii) commuting h1 squaring to c and involution h2;
/// (iii) involutions with [h1,h2] = c; (iv) h1 squaring to c and
/// involution h2 with [h1,h2] = c; (v) h with h^4 = c.
pub fn ins_generators(group: &Group) -> Result<Vec<InsWitness>> {
    let c = require_small_derived(group)?;
    let n = group.order() as Elem;
    let squares: Vec<Elem> = (0..n).map(|g| group.mul(g, g)).collect();
    let to_c: Vec<Elem> = (0..n).filter(|&g| squares[g as usize] == c).collect();
    let to_one: Vec<Elem> = (0..n).filter(|&g| squares[g as usize] == 0).collect();
    let mut out = Vec::new();
    for (i, &h1) in to_c.iter().enumerate() {
        for &h2 in &to_c[i + 1..] {
            if group.commutator(h1, h2) == 0 {
                out.push(InsWitness { case: 1, h1, h2 });
            }
        }
    }
    for &h1 in &to_c {
        for &h2 in &to_one {
            match group.commutator(h1, h2) {
                0 => out.push(InsWitness { case: 2, h1, h2 }),
                comm if comm == c => out.push(InsWitness { case: 4, h1, h2 }),
                _ => {}
            }
        }
    }
    for (i, &h1) in to_one.iter().enumerate() {
        for &h2 in &to_one[i + 1..] {
            if group.commutator(h1, h2) == c {
                out.push(InsWitness { case: 3, h1, h2 });
            }
        }
    }
    for h in 0..n {
        if squares[squares[h as usize] as usize] == c {
            out.push(InsWitness { case: 5, h1: h, h2: h });
        }
    }
    Ok(out)
}

/// How Theta should be obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMethod {
    Exhaustive,
    Sampled,
    Lemma,
}

/// Theta = |S| / q^((|G| - |Omega_1| - |Omega_c|)/4), with |S| from the
/// chosen basis method, or from the closed-form dispatch for `Lemma`.
pub fn theta(group: &Group, field: &Field, method: ThetaMethod) -> Result<OrderValue> {
    require_small_derived(group)?;
    let basis_method = match method {
        ThetaMethod::Lemma => {
            let spec = group.provenance().ok_or_else(|| {
                Error::NoRule("the group carries no specification to dispatch on".into())
            })?;
            return formulas::theta_lemma(&flatten(spec)?, field.k());
        }
        ThetaMethod::Exhaustive => BasisMethod::Exhaustive,
        ThetaMethod::Sampled => BasisMethod::Sampled,
    };
    let basis = s_subgroup(group, field, basis_method)?;
    let counts = group.omega_sets();
    let free = group.order() - counts.count1() - counts.count_c();
    if free % 4 != 0 {
        return Err(Error::Domain(format!(
            "|G| - |Omega_1| - |Omega_c| = {free} is not divisible by 4"
        )));
    }
    Ok(OrderValue::new(i64::from(basis.rank), -((free / 4) as i64), field.k()))
}

/// |V_*(FG)| = (1/Theta) * q^((|G| + |Omega_1| + |Omega_c|)/4) * |V_*(FQ)|
/// where Q is the quotient by the derived subgroup; abelian groups go
/// straight to the closed form.
pub fn vstar_recursion(group: &Group, field: &Field, method: ThetaMethod) -> Result<OrderValue> {
    if group.is_abelian() {
        return formulas::abelian_vstar(group, field.k());
    }
    require_small_derived(group)?;
    let counts = group.omega_sets();
    let total = group.order() + counts.count1() + counts.count_c();
    if total % 4 != 0 {
        return Err(Error::Domain(format!(
            "|G| + |Omega_1| + |Omega_c| = {total} is not divisible by 4"
        )));
    }
    let th = theta(group, field, method)?;
    let (quotient, _) = group.quotient_by_derived()?;
    let tail = formulas::abelian_vstar(&quotient, field.k())?;
    tail.scale_q_pow((total / 4) as i64).div(&th)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builders::{build, parse_spec};

    fn grp(text: &str) -> Group {
        build(&parse_spec(text).unwrap()).unwrap()
    }

    fn brute(text: &str, k: u8) -> u128 {
        let g = grp(text);
        let f = Field::new(k).unwrap();
        count_vstar_bruteforce(&g, &f, None).unwrap()
    }

    #[test]
    fn singletons_and_the_identity_are_unitary() {
        let g = grp("D8");
        let f = Field::new(2).unwrap();
        let a = Algebra::new(&g, &f);
        assert!(is_unitary(&a, &a.one()).unwrap());
        for el in 0..g.order() as Elem {
            assert!(is_unitary(&a, &a.element(el)).unwrap());
        }
        let not_normalized = a.scale(2, &a.one()).unwrap();
        assert!(!is_unitary(&a, &not_normalized).unwrap());
    }

    #[test]
    fn every_normalized_element_of_fz4_is_unitary() {
        assert_eq!(brute("Z4", 1), 8);
    }

    #[test]
    fn brute_force_matches_the_dihedral_and_quaternion_orders() {
        assert_eq!(brute("D8", 1), 64);
        assert_eq!(brute("Q8", 1), 64);
        let f = Field::new(1).unwrap();
        let d16 = crate::group::builders::dihedral_like(false, 3).unwrap();
        let q16 = crate::group::builders::dihedral_like(true, 3).unwrap();
        assert_eq!(count_vstar_bruteforce(&d16, &f, None).unwrap(), 4096);
        assert_eq!(count_vstar_bruteforce(&q16, &f, None).unwrap(), 1024);
    }

    #[test]
    fn brute_force_matches_the_almost_extraspecial_base_case() {
        assert_eq!(brute("M2(2,2)", 1), 2048);
    }

    #[test]
    fn packed_and_generic_enumerations_agree() {
        let f = Field::new(1).unwrap();
        for text in ["D8", "Q8", "Z8", "M2(2,1,1)"] {
            let g = grp(text);
            let packed = with_pool(|| count_vstar_packed(&g)).unwrap();
            let generic = with_pool(|| count_vstar_generic(&g, &f)).unwrap();
            assert_eq!(packed, generic, "{text}");
        }
    }

    #[test]
    fn the_budget_rejects_oversized_groups() {
        let g = grp("M2(3,2)");
        let f = Field::new(1).unwrap();
        match count_vstar_bruteforce(&g, &f, None) {
            Err(Error::Capacity { required_log2, given }) => {
                assert_eq!(required_log2, 32);
                assert_eq!(given, u128::from(DEFAULT_BUDGET));
            }
            other => panic!("expected a capacity error, got {other:?}"),
        }
    }

    #[test]
    fn s_subgroup_sizes_match_the_proved_values() {
        let f = Field::new(1).unwrap();
        let q8 = grp("Q8");
        let basis = s_subgroup(&q8, &f, BasisMethod::Exhaustive).unwrap();
        assert_eq!(basis.subgroup_size(), 2);
        let m22 = grp("M2(2,2)");
        let basis = s_subgroup(&m22, &f, BasisMethod::Exhaustive).unwrap();
        assert_eq!(basis.subgroup_size(), 8);
        assert_eq!(basis.method, BasisMethod::Exhaustive);
    }

    #[test]
    fn s_subgroup_representatives_lie_in_the_psi_kernel() {
        let f = Field::new(1).unwrap();
        let g = grp("M2(2,2)");
        let a = Algebra::new(&g, &f);
        let psi = a.psi_map().unwrap();
        let basis = s_subgroup(&g, &f, BasisMethod::Exhaustive).unwrap();
        assert!(!basis.reps.is_empty());
        for w in &basis.reps {
            assert!(psi.apply(&f, w).is_zero());
        }
    }

    #[test]
    fn the_s_subgroup_is_elementary_abelian() {
        let f = Field::new(1).unwrap();
        let g = grp("M2(2,2)");
        let a = Algebra::new(&g, &f);
        let basis = s_subgroup(&g, &f, BasisMethod::Exhaustive).unwrap();
        let mut members = vec![a.one()];
        for w in &basis.reps {
            let grown: Vec<_> = members
                .iter()
                .map(|m| a.mul(m, &a.add(&a.one(), w).unwrap()).unwrap())
                .collect();
            members.extend(grown);
        }
        assert_eq!(members.len(), 8);
        for x in &members {
            let square = a.mul(x, x).unwrap();
            assert_eq!(square, a.one());
            for y in &members {
                let p = a.mul(x, y).unwrap();
                assert!(members.contains(&p));
            }
        }
    }

    #[test]
    fn products_with_the_star_avoid_the_involution_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for (text, k) in [("D8", 1u8), ("Q8", 2), ("M2(2,2)", 1), ("Z8", 2)] {
            let g = grp(text);
            let f = Field::new(k).unwrap();
            let a = Algebra::new(&g, &f);
            let counts = g.omega_sets();
            for _ in 0..200 {
                let x = a.from_coeffs(random_normalized(&f, g.order(), &mut rng)).unwrap();
                let p = a.mul(&x, &a.star(&x)).unwrap();
                for w in p.support() {
                    assert!(w == 0 || !counts.omega1.contains(&w), "{text}: {w}");
                }
            }
        }
    }

    #[test]
    fn witness_products_verify_over_gf4() {
        let f = Field::new(2).unwrap();
        for text in ["D8", "Q8", "M2(3,1)", "M2(2,2)", "M2(2,3)"] {
            let g = grp(text);
            let a = Algebra::new(&g, &f);
            let witnesses = ins_generators(&g).unwrap();
            assert!(!witnesses.is_empty(), "{text}");
            for witness in &witnesses {
                for alpha in f.elements() {
                    let (x, claimed) = witness.witness(&a, alpha).unwrap();
                    let product = a.mul(&x, &a.star(&x)).unwrap();
                    assert_eq!(product, claimed, "{text} case {}", witness.case);
                }
            }
        }
    }

    #[test]
    fn the_scanner_emits_the_expected_shapes() {
        let d8 = grp("D8");
        let d8_cases: Vec<u8> = ins_generators(&d8).unwrap().iter().map(|w| w.case).collect();
        assert!(d8_cases.contains(&3));
        assert!(!d8_cases.contains(&5));
        let m31 = grp("M2(3,1)");
        let m31_cases: Vec<u8> = ins_generators(&m31).unwrap().iter().map(|w| w.case).collect();
        assert!(m31_cases.contains(&5));
        let q8 = grp("Q8");
        for w in ins_generators(&q8).unwrap() {
            if w.case == 1 {
                assert_eq!(q8.commutator(w.h1, w.h2), 0);
            }
        }
        let no_square_roots_of_c = grp("M2(2,1,1)");
        assert!(ins_generators(&no_square_roots_of_c).unwrap().is_empty());
    }

    #[test]
    fn theta_methods_agree_on_small_groups() {
        for (text, k, expect) in [
            ("Q8", 1u8, 2u128),
            ("Q8", 2, 16),
            ("M2(2,2)", 1, 2),
            ("D8", 1, 2),
        ] {
            let g = grp(text);
            let f = Field::new(k).unwrap();
            let exhaustive = theta(&g, &f, ThetaMethod::Exhaustive).unwrap();
            let lemma = theta(&g, &f, ThetaMethod::Lemma).unwrap();
            let sampled = theta(&g, &f, ThetaMethod::Sampled).unwrap();
            assert_eq!(exhaustive.to_u128(), Some(expect), "{text} over GF(2^{k})");
            assert_eq!(exhaustive, lemma, "{text}");
            assert_eq!(exhaustive, sampled, "{text}");
        }
    }

    #[test]
    fn sampled_theta_reaches_the_closed_form_on_a_larger_group() {
        let g = grp("M2(2,3)");
        let f = Field::new(1).unwrap();
        let sampled = theta(&g, &f, ThetaMethod::Sampled).unwrap();
        assert_eq!(sampled.to_u128(), Some(2));
        assert_eq!(sampled, theta(&g, &f, ThetaMethod::Lemma).unwrap());
    }

    #[test]
    fn recursion_matches_brute_force_on_small_groups() {
        for text in [
            "D8",
            "Q8",
            "M2(2,2)",
            "M2(3,1)",
            "M2(2,1,1)",
            "D8 x Z2",
            "Q8 x Z2",
            "Z4 x Z4",
            "Z16",
        ] {
            let g = grp(text);
            let f = Field::new(1).unwrap();
            let counted = count_vstar_bruteforce(&g, &f, None).unwrap();
            let recursed = vstar_recursion(&g, &f, ThetaMethod::Exhaustive).unwrap();
            assert_eq!(recursed.to_u128(), Some(counted), "{text}");
        }
        for text in ["D8", "Q8", "Z8", "Z4 x Z2"] {
            let g = grp(text);
            let f = Field::new(2).unwrap();
            let counted = count_vstar_bruteforce(&g, &f, None).unwrap();
            let recursed = vstar_recursion(&g, &f, ThetaMethod::Exhaustive).unwrap();
            assert_eq!(recursed.to_u128(), Some(counted), "{text} over GF(4)");
        }
    }

    #[test]
    fn brute_force_counts_divide_the_unit_group_order() {
        for (text, k) in [("D8", 1u8), ("Q8", 2), ("Z4 x Z2", 3)] {
            let g = grp(text);
            let f = Field::new(k).unwrap();
            let counted = count_vstar_bruteforce(&g, &f, None).unwrap();
            let units = u128::from(f.q()).pow(g.order() as u32 - 1);
            assert_eq!(units % counted, 0, "{text}");
        }
    }

    #[test]
    fn direct_z2_factors_lift_the_count_as_predicted() {
        let f = Field::new(1).unwrap();
        for text in ["D8", "Q8"] {
            let g = grp(text);
            let counts = g.omega_sets();
            let base = count_vstar_bruteforce(&g, &f, None).unwrap();
            let lifted = brute(&format!("{text} x Z2"), 1);
            let base_value = OrderValue::from_count(base, 1).unwrap();
            let expect =
                formulas::udp_extend(&base_value, g.order() as u128, counts.count1() as u128, 1)
                    .unwrap();
            assert_eq!(expect.to_u128(), Some(lifted), "{text}");
        }
    }

    #[test]
    fn recursion_rejects_groups_with_a_large_derived_subgroup() {
        let d16 = crate::group::builders::dihedral_like(false, 3).unwrap();
        let f = Field::new(1).unwrap();
        assert!(matches!(
            vstar_recursion(&d16, &f, ThetaMethod::Exhaustive),
            Err(Error::Unsupported(_))
        ));
    }
}
