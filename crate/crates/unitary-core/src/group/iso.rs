//! Isomorphism testing for small 2-groups.
//!
//! A cheap invariant fingerprint filters most non-isomorphic pairs; the
//! remaining candidates go through a backtracking search mapping a
//! generating set of one group onto signature-matched elements of the other.

use serde::{Deserialize, Serialize};

use super::{Elem, Group};
use crate::{Error, Result};

/// Order cap for the backtracking isomorphism test.
pub const ISO_MAX_ORDER: usize = 256;

/// Invariants preserved by isomorphism, used as a fast filter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: usize,
    pub exponent: u64,
    pub center_order: usize,
    pub derived_order: usize,
    pub min_generators: u32,
    /// Sorted (element order, count) pairs.
    pub order_histogram: Vec<(u64, usize)>,
    pub squaring_image_size: usize,
    /// For each central involution t, the count of g with g^2 = t, sorted.
    pub central_involution_squares: Vec<usize>,
}

/// Computes the invariant fingerprint of a group.
pub fn fingerprint(g: &Group) -> Fingerprint {
    let n = g.order();
    let mut hist = std::collections::BTreeMap::new();
    for e in 0..n as Elem {
        *hist.entry(g.element_order(e)).or_insert(0usize) += 1;
    }
    let center = g.center();
    let mut sq_counts = Vec::new();
    for &t in &center.elements {
        if g.element_order(t) == 2 {
            let count = (0..n as Elem).filter(|&e| g.mul(e, e) == t).count();
            sq_counts.push(count);
        }
    }
    sq_counts.sort_unstable();
    Fingerprint {
        order: n,
        exponent: g.exponent(),
        center_order: center.order(),
        derived_order: g.derived().order(),
        min_generators: g.min_generators(),
        order_histogram: hist.into_iter().collect(),
        squaring_image_size: g.squaring_image_size(),
        central_involution_squares: sq_counts,
    }
}

/// Per-element invariants used to prune the backtracking search.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Signature {
    order: u64,
    centralizer: usize,
    square_order: u64,
    sqrt_count: usize,
    central: bool,
}

fn signatures(g: &Group) -> Vec<Signature> {
    let n = g.order();
    let mut sqrt_count = vec![0usize; n];
    for e in 0..n as Elem {
        sqrt_count[g.mul(e, e) as usize] += 1;
    }
    (0..n as Elem)
        .map(|e| {
            let centralizer = (0..n as Elem).filter(|&a| g.mul(e, a) == g.mul(a, e)).count();
            Signature {
                order: g.element_order(e),
                centralizer,
                square_order: g.element_order(g.mul(e, e)),
                sqrt_count: sqrt_count[e as usize],
                central: centralizer == n,
            }
        })
        .collect()
}

/// A short generating sequence, greedily preferring high-order elements.
pub(crate) fn generating_sequence(g: &Group) -> Vec<Elem> {
    let n = g.order();
    let mut by_order: Vec<Elem> = (0..n as Elem).collect();
    by_order.sort_by_key(|&e| std::cmp::Reverse(g.element_order(e)));
    let mut gens = Vec::new();
    let mut closure = g.closure(&gens);
    while closure.order() < n {
        let next = by_order
            .iter()
            .copied()
            .find(|&e| !closure.contains(e))
            .expect("closure is proper");
        gens.push(next);
        closure = g.closure(&gens);
    }
    gens
}

/// Extends a partial injective homomorphism with gen -> image and closes it
/// under multiplication. Returns None on conflict.
pub(crate) fn extend_map(
    g: &Group,
    h: &Group,
    map: &[Elem],
    used: &[bool],
    known: &[Elem],
    gen: Elem,
    image: Elem,
) -> Option<(Vec<Elem>, Vec<bool>, Vec<Elem>)> {
    let mut map = map.to_vec();
    let mut used = used.to_vec();
    let mut known = known.to_vec();
    let mut queue = Vec::new();
    let assign = |e: Elem,
                  img: Elem,
                  map: &mut Vec<Elem>,
                  used: &mut Vec<bool>,
                  known: &mut Vec<Elem>,
                  queue: &mut Vec<Elem>|
     -> bool {
        if map[e as usize] != Elem::MAX {
            return map[e as usize] == img;
        }
        if used[img as usize] {
            return false;
        }
        map[e as usize] = img;
        used[img as usize] = true;
        known.push(e);
        queue.push(e);
        true
    };
    if !assign(gen, image, &mut map, &mut used, &mut known, &mut queue) {
        return None;
    }
    while let Some(e) = queue.pop() {
        let ei = map[e as usize];
        // Multiply against every currently known element on both sides.
        for idx in 0..known.len() {
            let a = known[idx];
            let ai = map[a as usize];
            let p1 = g.mul(a, e);
            let i1 = h.mul(ai, ei);
            if !assign(p1, i1, &mut map, &mut used, &mut known, &mut queue) {
                return None;
            }
            let p2 = g.mul(e, a);
            let i2 = h.mul(ei, ai);
            if !assign(p2, i2, &mut map, &mut used, &mut known, &mut queue) {
                return None;
            }
        }
    }
    Some((map, used, known))
}

/// Enumerates all injective homomorphisms from `dom` into the subgroup of
/// `codom` marked by `allowed`, subject to pinned element images.
pub(crate) fn enumerate_embeddings(
    dom: &Group,
    codom: &Group,
    allowed: &[bool],
    pins: &[(Elem, Elem)],
) -> Vec<Vec<Elem>> {
    let gens = generating_sequence(dom);
    let candidates: Vec<Vec<Elem>> = gens
        .iter()
        .map(|&e| {
            (0..codom.order() as Elem)
                .filter(|&y| allowed[y as usize] && codom.element_order(y) == dom.element_order(e))
                .collect()
        })
        .collect();
    let mut found = Vec::new();
    let mut map = vec![Elem::MAX; dom.order()];
    let mut used = vec![false; codom.order()];
    map[0] = 0;
    used[0] = true;
    fn rec(
        dom: &Group,
        codom: &Group,
        gens: &[Elem],
        candidates: &[Vec<Elem>],
        pins: &[(Elem, Elem)],
        level: usize,
        map: Vec<Elem>,
        used: Vec<bool>,
        known: Vec<Elem>,
        found: &mut Vec<Vec<Elem>>,
    ) {
        if level == gens.len() {
            if known.len() != dom.order() {
                return;
            }
            for &(d, c) in pins {
                if map[d as usize] != c {
                    return;
                }
            }
            let n = dom.order() as Elem;
            for a in 0..n {
                for b in 0..n {
                    if map[dom.mul(a, b) as usize] != codom.mul(map[a as usize], map[b as usize]) {
                        return;
                    }
                }
            }
            found.push(map);
            return;
        }
        let gen = gens[level];
        if map[gen as usize] != Elem::MAX {
            rec(dom, codom, gens, candidates, pins, level + 1, map, used, known, found);
            return;
        }
        for &image in &candidates[level] {
            if used[image as usize] {
                continue;
            }
            if let Some((m2, u2, k2)) = extend_map(dom, codom, &map, &used, &known, gen, image) {
                rec(dom, codom, gens, candidates, pins, level + 1, m2, u2, k2, found);
            }
        }
    }
    rec(
        dom,
        codom,
        &gens,
        &candidates,
        pins,
        0,
        std::mem::take(&mut map),
        std::mem::take(&mut used),
        vec![0],
        &mut found,
    );
    found
}

struct Matcher<'a> {
    g: &'a Group,
    h: &'a Group,
    gens: Vec<Elem>,
    candidates: Vec<Vec<Elem>>,
}

impl<'a> Matcher<'a> {

    fn search(&self, level: usize, map: Vec<Elem>, used: Vec<bool>, known: Vec<Elem>) -> bool {
        if level == self.gens.len() {
            if known.len() != self.g.order() {
                return false;
            }
            let n = self.g.order() as Elem;
            for a in 0..n {
                for b in 0..n {
                    if map[self.g.mul(a, b) as usize]
                        != self.h.mul(map[a as usize], map[b as usize])
                    {
                        return false;
                    }
                }
            }
            return true;
        }
        let gen = self.gens[level];
        if map[gen as usize] != Elem::MAX {
            // Already forced by earlier assignments.
            return self.search(level + 1, map, used, known);
        }
        for &image in &self.candidates[level] {
            if used[image as usize] {
                continue;
            }
            if let Some((m2, u2, k2)) = extend_map(self.g, self.h, &map, &used, &known, gen, image)
            {
                if self.search(level + 1, m2, u2, k2) {
                    return true;
                }
            }
        }
        false
    }
}

/// Tests whether two groups are isomorphic. Orders above
/// [`ISO_MAX_ORDER`] are rejected with a capacity error.
pub fn is_isomorphic(g: &Group, h: &Group) -> Result<bool> {
    if g.order() > ISO_MAX_ORDER || h.order() > ISO_MAX_ORDER {
        return Err(Error::Capacity {
            required_log2: (g.order().max(h.order())).next_power_of_two().trailing_zeros(),
            given: ISO_MAX_ORDER as u128,
        });
    }
    if g.order() != h.order() {
        return Ok(false);
    }
    if fingerprint(g) != fingerprint(h) {
        return Ok(false);
    }
    let sig_g = signatures(g);
    let sig_h = signatures(h);
    let gens = generating_sequence(g);
    let candidates: Vec<Vec<Elem>> = gens
        .iter()
        .map(|&e| {
            (0..h.order() as Elem)
                .filter(|&y| sig_h[y as usize] == sig_g[e as usize])
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(false);
    }
    let matcher = Matcher {
        g,
        h,
        gens,
        candidates,
    };
    let mut map = vec![Elem::MAX; g.order()];
    let mut used = vec![false; h.order()];
    map[0] = 0;
    used[0] = true;
    Ok(matcher.search(0, map, used, vec![0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builders::{build, build_atom, central_product, parse_spec, Atom};

    fn built(text: &str) -> Group {
        build(&parse_spec(text).unwrap()).unwrap()
    }

    #[test]
    fn distinguishes_d8_from_q8() {
        let d8 = build_atom(&Atom::D8).unwrap();
        let q8 = build_atom(&Atom::Q8).unwrap();
        assert!(!is_isomorphic(&d8, &q8).unwrap());
        assert!(is_isomorphic(&d8, &d8).unwrap());
    }

    #[test]
    fn atom_relabelings_are_isomorphic() {
        // D8 = M2(2,1) = M2(1,1,1) under three different constructions.
        let d8 = build_atom(&Atom::D8).unwrap();
        let m21 = build_atom(&Atom::M2(2, 1)).unwrap();
        let m111 = build_atom(&Atom::M2Star(1, 1)).unwrap();
        assert!(is_isomorphic(&d8, &m21).unwrap());
        assert!(is_isomorphic(&d8, &m111).unwrap());
    }

    #[test]
    fn central_product_commutes_up_to_iso() {
        let a = built("D8 . Q8");
        let b = built("Q8 . D8");
        assert!(is_isomorphic(&a, &b).unwrap());
    }

    #[test]
    fn q8_pair_equals_d8_pair() {
        let qq = built("Q8 . Q8");
        let dd = built("D8 . D8");
        assert!(is_isomorphic(&qq, &dd).unwrap());
        let dq = built("D8 . Q8");
        assert!(!is_isomorphic(&qq, &dq).unwrap());
    }

    #[test]
    fn abelian_invariants_separate() {
        let a = built("Z4 x Z4");
        let b = built("Z8 x Z2");
        let c = built("Z4 . Z8");
        assert!(!is_isomorphic(&a, &b).unwrap());
        assert!(is_isomorphic(&b, &c).unwrap());
    }

    #[test]
    fn m2_star_absorption() {
        // M2(2,1,1) central Z4 over c = z^2: both orderings agree.
        let m = build_atom(&Atom::M2Star(2, 1)).unwrap();
        let z4 = build_atom(&Atom::Z(4)).unwrap();
        let left = central_product(&m, &z4).unwrap();
        let right = central_product(&z4, &m).unwrap();
        assert!(is_isomorphic(&left, &right).unwrap());
    }

    #[test]
    fn capacity_cap() {
        let big = built("Z256 x Z2");
        assert!(matches!(
            is_isomorphic(&big, &big),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn fingerprint_counts_involution_squares() {
        let q8 = build_atom(&Atom::Q8).unwrap();
        let fp = fingerprint(&q8);
        // Q8: one central involution, six square roots of it plus identity
        // pair counts: squares hitting c are the six order-4 elements.
        assert_eq!(fp.central_involution_squares, vec![6]);
        assert_eq!(fp.order_histogram, vec![(1, 1), (2, 1), (4, 6)]);
    }
}
