//! Concrete finite 2-groups as validated Cayley tables.
//!
//! Elements are indices 0..|G|-1 with 0 the identity. A group may carry a
//! designated central involution c; for every nonabelian group in scope the
//! derived subgroup is exactly {1, c}. Structural queries (center, derived
//! and Frattini subgroups, omega sets, the commutator form, the quotient
//! G/G') are exhaustive, which is fine at the supported cap |G| <= 4096.

pub mod builders;
pub mod iso;
pub mod rewrite;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};
use builders::GroupSpec;

/// Element index within a group.
pub type Elem = u16;

/// Largest supported group order.
pub const MAX_ORDER: usize = 4096;

/// A finite 2-group materialized as a Cayley table.
#[derive(Debug, Clone)]
pub struct Group {
    n: usize,
    table: Vec<Elem>,
    inv: Vec<Elem>,
    c: Option<Elem>,
    gen_names: Vec<String>,
    /// Exponent vectors over `gen_names`, used only for display.
    exps: Option<Vec<Vec<u8>>>,
    /// The specification this group was built from, when known.
    provenance: Option<GroupSpec>,
}

/// A subgroup as a sorted element list, closed by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub elements: Vec<Elem>,
}

impl Subgroup {
    /// Number of elements.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Membership test by binary search.
    pub fn contains(&self, e: Elem) -> bool {
        self.elements.binary_search(&e).is_ok()
    }
}

/// The center, derived and Frattini subgroups of a group.
#[derive(Debug, Clone)]
pub struct StructuralSubgroups {
    pub center: Subgroup,
    pub derived: Subgroup,
    pub frattini: Subgroup,
}

/// The sets Omega_1 = {g : g^2 = 1} and Omega_c = {g : g^2 = c}.
#[derive(Debug, Clone)]
pub struct OmegaCounts {
    pub omega1: Vec<Elem>,
    pub omega_c: Vec<Elem>,
}

impl OmegaCounts {
    /// |Omega_1|.
    pub fn count1(&self) -> usize {
        self.omega1.len()
    }

    /// |Omega_c|.
    pub fn count_c(&self) -> usize {
        self.omega_c.len()
    }
}

/// The commutator form on G/centre(G) as a GF(2) matrix.
#[derive(Debug, Clone)]
pub struct CommutatorForm {
    pub dim: usize,
    pub matrix: Vec<Vec<u8>>,
    pub nondegenerate: bool,
}

impl Group {
    /// Builds a group from a flat row-major Cayley table and validates it.
    ///
    /// Validation: exact Latin-square and identity checks; associativity
    /// exhaustively for |G| <= 64 and on 10^4 seeded random triples above;
    /// the designated involution, when present, must be a nonidentity
    /// central element of order 2.
    pub fn from_table(table: Vec<Elem>, n: usize, c: Option<Elem>) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::Domain(format!("group order {n} is not a power of 2")));
        }
        if n > MAX_ORDER {
            return Err(Error::Unsupported(format!(
                "group order {n} exceeds the cap {MAX_ORDER}"
            )));
        }
        if table.len() != n * n {
            return Err(Error::Domain(format!(
                "Cayley table has {} entries, expected {}",
                table.len(),
                n * n
            )));
        }
        let at = |a: usize, b: usize| table[a * n + b] as usize;
        for a in 0..n {
            if at(0, a) != a || at(a, 0) != a {
                return Err(Error::Domain("index 0 is not a two-sided identity".into()));
            }
        }
        let mut seen_row = vec![false; n];
        let mut seen_col = vec![false; n];
        for a in 0..n {
            seen_row.iter_mut().for_each(|s| *s = false);
            seen_col.iter_mut().for_each(|s| *s = false);
            for b in 0..n {
                let r = at(a, b);
                let cv = at(b, a);
                if r >= n || seen_row[r] || cv >= n || seen_col[cv] {
                    return Err(Error::Domain(
                        "Cayley table is not a Latin square".into(),
                    ));
                }
                seen_row[r] = true;
                seen_col[cv] = true;
            }
        }
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for g in 0..n {
                        if at(at(a, b), g) != at(a, at(b, g)) {
                            return Err(Error::Domain("associativity fails".into()));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
            for _ in 0..10_000 {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                let g = rng.gen_range(0..n);
                if at(at(a, b), g) != at(a, at(b, g)) {
                    return Err(Error::Domain("associativity fails".into()));
                }
            }
        }
        let mut inv = vec![0 as Elem; n];
        for a in 0..n {
            let mut found = None;
            for b in 0..n {
                if at(a, b) == 0 {
                    found = Some(b as Elem);
                    break;
                }
            }
            inv[a] = found.ok_or_else(|| Error::Domain("missing inverse".into()))?;
        }
        let group = Group {
            n,
            table,
            inv,
            c: None,
            gen_names: Vec::new(),
            exps: None,
            provenance: None,
        };
        match c {
            None => Ok(group),
            Some(cv) => group.with_designated_c(cv),
        }
    }

    /// Returns a copy with the designated central involution set to `c`.
    pub fn with_designated_c(mut self, c: Elem) -> Result<Self> {
        let cz = c as usize;
        if cz == 0 || cz >= self.n {
            return Err(Error::Domain(format!(
                "designated involution index {cz} invalid"
            )));
        }
        if self.mul(c, c) != 0 {
            return Err(Error::Domain("designated c does not square to 1".into()));
        }
        for g in 0..self.n as Elem {
            if self.mul(c, g) != self.mul(g, c) {
                return Err(Error::Domain("designated c is not central".into()));
            }
        }
        self.c = Some(c);
        Ok(self)
    }

    pub(crate) fn set_names(&mut self, gen_names: Vec<String>, exps: Option<Vec<Vec<u8>>>) {
        self.gen_names = gen_names;
        self.exps = exps;
    }

    pub(crate) fn set_provenance(&mut self, spec: GroupSpec) {
        self.provenance = Some(spec);
    }

    /// The specification this group was built from, when known.
    pub fn provenance(&self) -> Option<&GroupSpec> {
        self.provenance.as_ref()
    }

    /// |G|.
    pub fn order(&self) -> usize {
        self.n
    }

    /// The designated central involution, if any.
    pub fn designated_c(&self) -> Option<Elem> {
        self.c
    }

    /// Generator labels for display.
    pub fn gen_names(&self) -> &[String] {
        &self.gen_names
    }

    /// Product of two elements.
    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a as usize * self.n + b as usize]
    }

    /// Inverse of an element.
    #[inline]
    pub fn inverse(&self, a: Elem) -> Elem {
        self.inv[a as usize]
    }

    /// a^e with e possibly negative; a^0 = 1.
    pub fn pow(&self, a: Elem, e: i64) -> Elem {
        let (mut base, mut e) = if e < 0 {
            (self.inverse(a), (-e) as u64)
        } else {
            (a, e as u64)
        };
        let mut acc: Elem = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of an element.
    pub fn element_order(&self, a: Elem) -> u64 {
        let mut x = a;
        let mut ord = 1;
        while x != 0 {
            x = self.mul(x, a);
            ord += 1;
        }
        ord
    }

    /// Exponent of the group (max element order in a 2-group).
    pub fn exponent(&self) -> u64 {
        (0..self.n as Elem)
            .map(|a| self.element_order(a))
            .max()
            .unwrap_or(1)
    }

    /// The commutator [a, b] = a^-1 b^-1 a b.
    pub fn commutator(&self, a: Elem, b: Elem) -> Elem {
        let ab = self.mul(self.inverse(a), self.inverse(b));
        self.mul(ab, self.mul(a, b))
    }

    /// True when every pair of elements commutes.
    pub fn is_abelian(&self) -> bool {
        for a in 0..self.n as Elem {
            for b in (a + 1)..self.n as Elem {
                if self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
            }
        }
        true
    }

    /// Closure of a generating set as a sorted subgroup.
    pub fn closure(&self, gens: &[Elem]) -> Subgroup {
        let mut member = vec![false; self.n];
        member[0] = true;
        let mut frontier = vec![0 as Elem];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(g, x)] {
                    if !member[y as usize] {
                        member[y as usize] = true;
                        frontier.push(y);
                    }
                }
            }
        }
        let elements = (0..self.n as Elem).filter(|&e| member[e as usize]).collect();
        Subgroup { elements }
    }

    /// The center of the group.
    pub fn center(&self) -> Subgroup {
        let elements = (0..self.n as Elem)
            .filter(|&a| (0..self.n as Elem).all(|b| self.mul(a, b) == self.mul(b, a)))
            .collect();
        Subgroup { elements }
    }

    /// The derived subgroup, generated by all commutators.
    pub fn derived(&self) -> Subgroup {
        let mut gens = Vec::new();
        let mut seen = vec![false; self.n];
        for a in 0..self.n as Elem {
            for b in 0..self.n as Elem {
                let c = self.commutator(a, b);
                if !seen[c as usize] {
                    seen[c as usize] = true;
                    gens.push(c);
                }
            }
        }
        self.closure(&gens)
    }

    /// The Frattini subgroup of a 2-group, generated by squares and commutators.
    pub fn frattini(&self) -> Subgroup {
        let mut gens: Vec<Elem> = (0..self.n as Elem).map(|a| self.mul(a, a)).collect();
        gens.extend(self.derived().elements);
        self.closure(&gens)
    }

    /// Center, derived and Frattini subgroups in one call.
    pub fn structural_subgroups(&self) -> StructuralSubgroups {
        StructuralSubgroups {
            center: self.center(),
            derived: self.derived(),
            frattini: self.frattini(),
        }
    }

    /// d(G) = log2 |G / Frat(G)|, the minimal number of generators.
    pub fn min_generators(&self) -> u32 {
        (self.n / self.frattini().order()).trailing_zeros()
    }

    /// Omega_1 and Omega_c by one squaring pass.
    ///
    /// Omega_c is empty by definition for abelian groups, which carry no
    /// designated c in the paper's sense even when an involution was marked
    /// for central-product amalgamation.
    pub fn omega_sets(&self) -> OmegaCounts {
        let mut omega1 = Vec::new();
        let mut omega_c = Vec::new();
        let c = if self.is_abelian() { None } else { self.c };
        for g in 0..self.n as Elem {
            let s = self.mul(g, g);
            if s == 0 {
                omega1.push(g);
            } else if Some(s) == c {
                omega_c.push(g);
            }
        }
        OmegaCounts { omega1, omega_c }
    }

    /// The quotient G/G' and its projection map.
    pub fn quotient_by_derived(&self) -> Result<(Group, Vec<Elem>)> {
        let derived = self.derived();
        match derived.order() {
            1 => {
                let mut q = self.clone();
                q.c = None;
                q.provenance = None;
                Ok((q, (0..self.n as Elem).collect()))
            }
            2 => {
                let d = derived.elements[1];
                self.quotient_by_central_involution(d)
            }
            k => Err(Error::Unsupported(format!(
                "derived subgroup has order {k}; only |G'| <= 2 is supported"
            ))),
        }
    }

    /// Quotient by the order-2 central subgroup {1, d}.
    pub(crate) fn quotient_by_central_involution(&self, d: Elem) -> Result<(Group, Vec<Elem>)> {
        if self.mul(d, d) != 0 || d == 0 {
            return Err(Error::Domain("quotient element is not an involution".into()));
        }
        let m = self.n / 2;
        let mut proj = vec![Elem::MAX; self.n];
        let mut reps = Vec::with_capacity(m);
        for g in 0..self.n as Elem {
            if proj[g as usize] == Elem::MAX {
                let partner = self.mul(g, d);
                let idx = reps.len() as Elem;
                proj[g as usize] = idx;
                proj[partner as usize] = idx;
                reps.push(g);
            }
        }
        let mut table = vec![0 as Elem; m * m];
        for (i, &a) in reps.iter().enumerate() {
            for (j, &b) in reps.iter().enumerate() {
                table[i * m + j] = proj[self.mul(a, b) as usize];
            }
        }
        let q = Group::from_table(table, m, None)?;
        Ok((q, proj))
    }

    /// The commutator form on G/centre(G) over GF(2).
    pub fn commutator_form(&self) -> Result<CommutatorForm> {
        if self.is_abelian() {
            return Ok(CommutatorForm {
                dim: 0,
                matrix: Vec::new(),
                nondegenerate: true,
            });
        }
        let derived = self.derived();
        if derived.order() != 2 {
            return Err(Error::Unsupported(format!(
                "commutator form needs |G'| = 2, got {}",
                derived.order()
            )));
        }
        let c = derived.elements[1];
        let center = self.center();
        // Greedily extend the center by coset representatives; each must have
        // square in the center for G/centre(G) to be elementary abelian.
        let mut span = center.clone();
        let mut basis = Vec::new();
        for g in 0..self.n as Elem {
            if !span.contains(g) {
                if !center.contains(self.mul(g, g)) {
                    return Err(Error::Unsupported(
                        "G/centre(G) is not elementary abelian".into(),
                    ));
                }
                basis.push(g);
                let mut gens = span.elements.clone();
                gens.push(g);
                span = self.closure(&gens);
            }
        }
        let dim = basis.len();
        let mut matrix = vec![vec![0u8; dim]; dim];
        for (i, &a) in basis.iter().enumerate() {
            for (j, &b) in basis.iter().enumerate() {
                let k = self.commutator(a, b);
                matrix[i][j] = if k == 0 {
                    0
                } else if k == c {
                    1
                } else {
                    return Err(Error::Unsupported(
                        "commutator outside the derived subgroup".into(),
                    ));
                };
            }
        }
        let nondegenerate = gf2_rank(&matrix) == dim;
        Ok(CommutatorForm {
            dim,
            matrix,
            nondegenerate,
        })
    }

    /// The set {g^(2^i) : g in G}.
    pub fn power_subgroup(&self, i: u32) -> Subgroup {
        let mut member = vec![false; self.n];
        for g in 0..self.n as Elem {
            member[self.pow(g, 1i64 << i) as usize] = true;
        }
        let elements = (0..self.n as Elem).filter(|&e| member[e as usize]).collect();
        Subgroup { elements }
    }

    /// The subgroup {g : g^(2^i) = 1}. Only meaningful wholesale for abelian G.
    pub fn torsion_subgroup(&self, i: u32) -> Subgroup {
        let elements = (0..self.n as Elem)
            .filter(|&g| self.pow(g, 1i64 << i) == 0)
            .collect();
        Subgroup { elements }
    }

    /// |A^2[2]| for abelian A: square elements that are involutions or 1.
    pub fn squared_two_torsion(&self) -> Result<usize> {
        if !self.is_abelian() {
            return Err(Error::Domain(
                "A^2[2] is computed for abelian groups only".into(),
            ));
        }
        Ok(self
            .power_subgroup(1)
            .elements
            .iter()
            .filter(|&&g| self.mul(g, g) == 0)
            .count())
    }

    /// Invariant-factor style decomposition of an abelian group into cyclic
    /// orders, descending.
    pub fn abelian_decomposition(&self) -> Result<Vec<u64>> {
        if !self.is_abelian() {
            return Err(Error::Domain(
                "abelian_decomposition called on a nonabelian group".into(),
            ));
        }
        // t_i = number of cyclic factors of order >= 2^i, read off the
        // torsion tower |A[2^i]|.
        let mut log_sizes = vec![0u32];
        let mut i = 1;
        loop {
            let size = self.torsion_subgroup(i).order();
            log_sizes.push(size.trailing_zeros());
            if size == self.n {
                break;
            }
            i += 1;
        }
        let t: Vec<u32> = (1..log_sizes.len())
            .map(|j| log_sizes[j] - log_sizes[j - 1])
            .collect();
        let mut orders = Vec::new();
        for j in (0..t.len()).rev() {
            let higher = if j + 1 < t.len() { t[j + 1] } else { 0 };
            for _ in 0..(t[j] - higher) {
                orders.push(1u64 << (j + 1));
            }
        }
        orders.sort_unstable_by(|a, b| b.cmp(a));
        Ok(orders)
    }

    /// Number of distinct squares, a cheap isomorphism invariant.
    pub fn squaring_image_size(&self) -> usize {
        let mut member = vec![false; self.n];
        for g in 0..self.n as Elem {
            member[self.mul(g, g) as usize] = true;
        }
        member.iter().filter(|&&b| b).count()
    }

    /// Human-readable name of an element from its exponent vector, when known.
    pub fn element_name(&self, e: Elem) -> String {
        match &self.exps {
            Some(exps) if !self.gen_names.is_empty() => {
                let v = &exps[e as usize];
                let mut parts = Vec::new();
                for (name, &p) in self.gen_names.iter().zip(v.iter()) {
                    match p {
                        0 => {}
                        1 => parts.push(name.clone()),
                        _ => parts.push(format!("{name}^{p}")),
                    }
                }
                if parts.is_empty() {
                    "1".into()
                } else {
                    parts.join("*")
                }
            }
            _ => format!("g{e}"),
        }
    }
}

/// Rank of a GF(2) matrix given as 0/1 rows.
pub(crate) fn gf2_rank(matrix: &[Vec<u8>]) -> usize {
    let rows: Vec<u128> = matrix
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold(0u128, |acc, (i, &b)| acc | ((b as u128) << i))
        })
        .collect();
    let mut basis: Vec<u128> = Vec::new();
    for mut row in rows {
        for &b in &basis {
            let pivot = 1u128 << (127 - b.leading_zeros());
            if row & pivot != 0 {
                row ^= b;
            }
        }
        if row != 0 {
            basis.push(row);
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::builders;
    use super::*;

    fn cyclic4() -> Group {
        builders::build_atom(&builders::Atom::Z(4)).unwrap()
    }

    #[test]
    fn rejects_broken_tables() {
        // Order 2 table with a repeated row entry.
        assert!(Group::from_table(vec![0, 1, 1, 1], 2, None).is_err());
        // Valid Z2.
        let z2 = Group::from_table(vec![0, 1, 1, 0], 2, None).unwrap();
        assert_eq!(z2.order(), 2);
        assert_eq!(z2.inverse(1), 1);
        // Non-power-of-two order.
        assert!(Group::from_table(vec![0; 9], 3, None).is_err());
    }

    #[test]
    fn pow_and_order_on_z4() {
        let z = cyclic4();
        let g = (0..4)
            .find(|&e| z.element_order(e) == 4)
            .expect("Z4 has a generator");
        assert_eq!(z.pow(g, 4), 0);
        assert_eq!(z.pow(g, -1), z.inverse(g));
        assert_eq!(z.mul(g, z.pow(g, -1)), 0);
        assert_eq!(z.exponent(), 4);
    }

    #[test]
    fn d8_structure() {
        let d8 = builders::build_atom(&builders::Atom::D8).unwrap();
        assert_eq!(d8.order(), 8);
        assert!(!d8.is_abelian());
        let subs = d8.structural_subgroups();
        assert_eq!(subs.center.order(), 2);
        assert_eq!(subs.derived.order(), 2);
        assert_eq!(subs.derived.elements[1], d8.designated_c().unwrap());
        assert_eq!(d8.min_generators(), 2);
        let om = d8.omega_sets();
        assert_eq!((om.count1(), om.count_c()), (6, 2));
    }

    #[test]
    fn q8_structure() {
        let q8 = builders::build_atom(&builders::Atom::Q8).unwrap();
        let om = q8.omega_sets();
        assert_eq!((om.count1(), om.count_c()), (2, 6));
        assert_eq!(q8.exponent(), 4);
        // x^-1 = x*c for any order-4 element.
        let c = q8.designated_c().unwrap();
        for g in 0..8 {
            if q8.element_order(g) == 4 {
                assert_eq!(q8.inverse(g), q8.mul(g, c));
            }
        }
    }

    #[test]
    fn abelian_groups_have_empty_omega_c() {
        let z4 = cyclic4();
        assert!(z4.designated_c().is_some());
        let om = z4.omega_sets();
        assert_eq!(om.count1(), 2);
        assert_eq!(om.count_c(), 0);
    }

    #[test]
    fn quotient_of_q8_is_klein() {
        let q8 = builders::build_atom(&builders::Atom::Q8).unwrap();
        let (quot, proj) = q8.quotient_by_derived().unwrap();
        assert_eq!(quot.order(), 4);
        assert!(quot.is_abelian());
        assert_eq!(quot.abelian_decomposition().unwrap(), vec![2, 2]);
        // The projection is a homomorphism.
        for a in 0..8u16 {
            for b in 0..8u16 {
                assert_eq!(
                    proj[q8.mul(a, b) as usize],
                    quot.mul(proj[a as usize], proj[b as usize])
                );
            }
        }
    }

    #[test]
    fn quotient_of_abelian_is_identity() {
        let z4 = cyclic4();
        let (quot, proj) = z4.quotient_by_derived().unwrap();
        assert_eq!(quot.order(), 4);
        assert!(proj.iter().enumerate().all(|(i, &p)| p as usize == i));
        assert!(quot.designated_c().is_none());
    }

    #[test]
    fn commutator_form_of_d8() {
        let d8 = builders::build_atom(&builders::Atom::D8).unwrap();
        let form = d8.commutator_form().unwrap();
        assert_eq!(form.dim, 2);
        assert_eq!(form.matrix, vec![vec![0, 1], vec![1, 0]]);
        assert!(form.nondegenerate);
    }

    #[test]
    fn commutator_form_of_abelian_is_empty() {
        let form = cyclic4().commutator_form().unwrap();
        assert_eq!(form.dim, 0);
        assert!(form.nondegenerate);
    }

    #[test]
    fn abelian_decomposition_examples() {
        assert_eq!(cyclic4().abelian_decomposition().unwrap(), vec![4]);
        let z2 = builders::build_atom(&builders::Atom::Z(2)).unwrap();
        let z4 = cyclic4();
        let prod = builders::direct_product(&z2, &z4).unwrap();
        assert_eq!(prod.abelian_decomposition().unwrap(), vec![4, 2]);
        assert_eq!(prod.squared_two_torsion().unwrap(), 2);
        let klein = builders::direct_product(&z2, &z2).unwrap();
        assert_eq!(klein.squared_two_torsion().unwrap(), 1);
    }

    #[test]
    fn gf2_rank_basics() {
        assert_eq!(gf2_rank(&[vec![0, 1], vec![1, 0]]), 2);
        assert_eq!(gf2_rank(&[vec![1, 1], vec![1, 1]]), 1);
        assert_eq!(gf2_rank(&[]), 0);
    }
}
