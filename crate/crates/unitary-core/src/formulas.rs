//! Closed-form evaluators: gamma counting functions, abelian and
//! dihedral/quaternion base orders, direct-product lifting, symbolic Omega
//! and Theta rules, the symbolic quotient recursion, and the classified
//! case table with its divisibility check.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::group::builders::{flatten, Atom, Flat, GroupSpec};
use crate::group::Group;
use crate::order::OrderValue;
use crate::{Error, Result};

/// The counting pair gamma1(k) = 2^(2k-1) + 2^(k-1) and
/// gamma2(k) = 2^(2k-1) - 2^(k-1), with gamma(0) = (1, 0).
///
/// Valid for k <= 62; larger arguments overflow u128.
pub fn gamma(k: u32) -> (u128, u128) {
    if k == 0 {
        return (1, 0);
    }
    let high = 1u128 << (2 * k - 1);
    let low = 1u128 << (k - 1);
    (high + low, high - low)
}

/// The same pair evaluated from the binomial sums
/// sum over even i of C(k,i) 3^(k-i) and sum over odd i of C(k,i) 3^(k-i).
pub fn gamma_binomial(k: u32) -> (u128, u128) {
    let mut even = 0u128;
    let mut odd = 0u128;
    let mut binom = 1u128;
    for i in 0..=k {
        let term = binom * 3u128.pow(k - i);
        if i % 2 == 0 {
            even += term;
        } else {
            odd += term;
        }
        if i < k {
            binom = binom * u128::from(k - i) / u128::from(i + 1);
        }
    }
    (even, odd)
}

/// (|Omega_1|, |Omega_c|) of the central power of D8 (variant 1) or of Q8
/// amalgamated with k-1 copies of D8 (variant 2).
pub fn omega_central_power(variant: u8, k: u32) -> Result<(u128, u128)> {
    if !(1..=2).contains(&variant) {
        return Err(Error::Domain(format!("variant must be 1 or 2, got {variant}")));
    }
    if k == 0 || k > 62 {
        return Err(Error::Domain(format!("central power exponent {k} out of range 1..=62")));
    }
    let (g1, g2) = gamma(k);
    if variant == 1 {
        Ok((2 * g1, 2 * g2))
    } else {
        Ok((2 * g2, 2 * g1))
    }
}

/// |V_*(FA)| for an abelian 2-group given its cyclic orders:
/// |A^2[2]| * q^((|A| + |Omega_1(A)|)/2 - 1).
pub fn abelian_vstar_from_orders(orders: &[u64], field_k: u8) -> Result<OrderValue> {
    let mut size_log2 = 0u32;
    let mut rank = 0u32;
    let mut square_torsion = 0i64;
    for &o in orders {
        if o == 1 {
            continue;
        }
        if !o.is_power_of_two() {
            return Err(Error::Domain(format!("cyclic order {o} is not a power of 2")));
        }
        size_log2 += o.trailing_zeros();
        rank += 1;
        if o >= 4 {
            square_torsion += 1;
        }
    }
    if size_log2 > 62 {
        return Err(Error::Domain(format!(
            "abelian group of order 2^{size_log2} exceeds the exact arithmetic range"
        )));
    }
    let size = 1u128 << size_log2;
    let omega1 = 1u128 << rank;
    let exponent = i64::try_from((size + omega1) / 2 - 1)
        .map_err(|_| Error::Domain("exponent exceeds the exact arithmetic range".into()))?;
    Ok(OrderValue::new(square_torsion, exponent, field_k))
}

/// |V_*(FA)| for a concrete abelian 2-group.
pub fn abelian_vstar(group: &Group, field_k: u8) -> Result<OrderValue> {
    if !group.is_abelian() {
        return Err(Error::Domain("the abelian order formula needs an abelian group".into()));
    }
    let orders = group.abelian_decomposition()?;
    abelian_vstar_from_orders(&orders, field_k)
}

/// |V_*(FG)| for the dihedral (q^(3*2^(n-1))) or generalized quaternion
/// (4*q^(2^n)) group of order 2^(n+1), n >= 2.
pub fn dq_vstar(quaternion: bool, n: u32, field_k: u8) -> Result<OrderValue> {
    if !(2..=60).contains(&n) {
        return Err(Error::Domain(format!(
            "dihedral/quaternion exponent n must lie in 2..=60, got {n}"
        )));
    }
    if quaternion {
        Ok(OrderValue::new(2, 1i64 << n, field_k))
    } else {
        Ok(OrderValue::new(0, 3 * (1i64 << (n - 1)), field_k))
    }
}

/// Lifts |V_*(FG)| to G x A for an elementary abelian A of rank k_a:
/// multiplies by q^((|G| + |Omega_1(G)|)(|A| - 1)/2).
pub fn udp_extend(base: &OrderValue, gsize: u128, omega1: u128, k_a: u32) -> Result<OrderValue> {
    if k_a > 60 {
        return Err(Error::Domain(format!("elementary abelian rank {k_a} out of range 0..=60")));
    }
    let step = (gsize + omega1) * ((1u128 << k_a) - 1) / 2;
    let step = i64::try_from(step)
        .map_err(|_| Error::Domain("exponent exceeds the exact arithmetic range".into()))?;
    Ok(base.scale_q_pow(step))
}

/// |V_*| for M2(2,2) x E with E elementary abelian of rank k_a:
/// 4*q^((|G| + |Omega_1(G)|)/2 - 1).
pub fn ccu_vstar(k_a: u32, field_k: u8) -> Result<OrderValue> {
    let base = OrderValue::new(2, 9, field_k);
    udp_extend(&base, 16, 4, k_a)
}

fn atom_omega(atom: &Atom) -> Result<(u128, u128)> {
    Ok(match *atom {
        Atom::D8 => (6, 2),
        Atom::Q8 => (2, 6),
        Atom::M2(2, 1) => (6, 2),
        Atom::M2(_, _) => (4, 4),
        Atom::M2Star(1, _) => (6, 2),
        Atom::M2Star(_, _) => (8, 0),
        Atom::Z(_) => {
            return Err(Error::Domain("cyclic atoms appear as legs, not chain entries".into()))
        }
    })
}

fn central_fold(a: (u128, u128), b: (u128, u128)) -> Result<(u128, u128)> {
    let prod = |x: u128, y: u128| {
        x.checked_mul(y)
            .ok_or_else(|| Error::Domain("Omega count exceeds the exact arithmetic range".into()))
    };
    let o1 = (prod(a.0, b.0)? + prod(a.1, b.1)?) / 2;
    let oc = (prod(a.0, b.1)? + prod(a.1, b.0)?) / 2;
    Ok((o1, oc))
}

/// Symbolic (|Omega_1|, |Omega_c|) of a flattened specification: chain atoms
/// and legs combine by the central-product convolution, direct cyclic
/// factors double both counts. Abelian shapes report |Omega_c| = 0, matching
/// the counting on concrete groups where c only marks a derived generator.
pub fn omega_closed_spec(flat: &Flat) -> Result<(u128, u128)> {
    let mut acc = (2u128, 0u128);
    for atom in &flat.chain {
        acc = central_fold(acc, atom_omega(atom)?)?;
    }
    for &u in &flat.legs {
        let leg = if u >= 2 { (2, 2) } else { (2, 0) };
        acc = central_fold(acc, leg)?;
    }
    for _ in &flat.directs {
        acc = central_fold(acc, (4, 0))?;
    }
    if flat.chain.is_empty() {
        acc.1 = 0;
    }
    Ok(acc)
}

/// Theta of a flattened specification as ell * q^(|Omega_c|/2), dispatching
/// on the shape of the chain, legs and direct factors. Shapes outside the
/// proved table return `NoRule`.
pub fn theta_lemma(flat: &Flat, field_k: u8) -> Result<OrderValue> {
    if flat.chain.is_empty() {
        return Err(Error::NoRule(
            "Theta is defined through the derived subgroup; the group is abelian".into(),
        ));
    }
    let (_, oc) = omega_closed_spec(flat)?;
    if oc == 0 {
        return Ok(OrderValue::one(field_k));
    }
    let half_oc = i64::try_from(oc / 2)
        .map_err(|_| Error::Domain("exponent exceeds the exact arithmetic range".into()))?;

    // Order-2 direct factors double Omega_c but never change the scale.
    let mut stripped = flat.clone();
    stripped.directs.retain(|&d| d != 2);

    let chain = &stripped.chain;
    let covers_full = chain.iter().any(|a| {
        matches!(a, Atom::D8)
            || matches!(a, Atom::M2(u, v) if *u > 2 || (*u == 2 && *v == 1))
    }) || stripped.legs.iter().any(|&u| u >= 3);

    let m11 = chain
        .iter()
        .filter(|a| matches!(a, Atom::M2Star(w, _) if *w >= 2))
        .count();
    let q8 = chain.iter().filter(|a| matches!(a, Atom::Q8)).count();
    let m2v = chain
        .iter()
        .filter(|a| matches!(a, Atom::M2(2, v) if *v >= 2))
        .count();
    let z4_leg = stripped.legs.as_slice() == [2];
    let no_leg = stripped.legs.is_empty();
    let nd = stripped.directs.len();

    let scale: i64 = if covers_full {
        0
    } else if z4_leg && q8 == 1 && chain.len() == 1 && nd <= 1 {
        -1
    } else if z4_leg && m11 == 1 && q8 <= 1 && m11 + q8 == chain.len() && nd == 0 {
        -1
    } else if no_leg && m2v == 1 && q8 <= 1 && m2v + q8 == chain.len() && nd == 0 {
        -1
    } else if no_leg && q8 == 1 && chain.len() == 1 && nd <= 1 {
        -2
    } else if no_leg && m11 == 1 && q8 == 1 && chain.len() == 2 && nd == 0 {
        -2
    } else {
        return Err(Error::NoRule(format!(
            "no Theta rule covers the shape with chain {:?}, legs {:?}, directs {:?}",
            stripped.chain, stripped.legs, stripped.directs
        )));
    };
    Ok(OrderValue::new(scale, half_oc, field_k))
}

fn quotient_cyclic_orders(flat: &Flat) -> Vec<u64> {
    let mut orders = Vec::new();
    for atom in &flat.chain {
        match *atom {
            Atom::D8 | Atom::Q8 => orders.extend_from_slice(&[2, 2]),
            Atom::M2(u, v) => orders.extend_from_slice(&[1 << (u - 1), 1 << v]),
            Atom::M2Star(n, m) => orders.extend_from_slice(&[1 << n, 1 << m]),
            Atom::Z(_) => {}
        }
    }
    for &u in &flat.legs {
        if u >= 2 {
            orders.push(1 << (u - 1));
        }
    }
    orders.extend_from_slice(&flat.directs);
    orders
}

/// |V_*(FG)| through the quotient recursion evaluated symbolically:
/// (1/Theta) * q^((|G| + |Omega_1| + |Omega_c|)/4) * |V_*(F[G/G'])|,
/// with the abelian formula as the base case.
pub fn vstar_recursion_symbolic(flat: &Flat, field_k: u8) -> Result<OrderValue> {
    if flat.is_abelian() {
        return abelian_vstar_from_orders(&flat.abelian_orders(), field_k);
    }
    let theta = theta_lemma(flat, field_k)?;
    let (o1, oc) = omega_closed_spec(flat)?;
    let size = u128::from(flat.order());
    let total = size + o1 + oc;
    if total % 4 != 0 {
        return Err(Error::Domain(format!(
            "|G| + |Omega_1| + |Omega_c| = {total} is not divisible by 4"
        )));
    }
    let quarter = i64::try_from(total / 4)
        .map_err(|_| Error::Domain("exponent exceeds the exact arithmetic range".into()))?;
    let tail = abelian_vstar_from_orders(&quotient_cyclic_orders(flat), field_k)?;
    tail.scale_q_pow(quarter).div(&theta)
}

/// Identifier of a classified family with a closed-form unitary order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TheoremId {
    Usmd,
    Usdq,
    Usmd2,
    Ummd,
    Ummd2,
    Um1d,
    Um1dc,
    Um1d2,
    M11dq,
    M11dq2,
    M11dq3,
    Dqzz,
}

impl TheoremId {
    /// Every identifier, in declaration order.
    pub const ALL: [TheoremId; 12] = [
        TheoremId::Usmd,
        TheoremId::Usdq,
        TheoremId::Usmd2,
        TheoremId::Ummd,
        TheoremId::Ummd2,
        TheoremId::Um1d,
        TheoremId::Um1dc,
        TheoremId::Um1d2,
        TheoremId::M11dq,
        TheoremId::M11dq2,
        TheoremId::M11dq3,
        TheoremId::Dqzz,
    ];

    /// True when the family carries a dihedral/quaternion variant l.
    pub fn has_variant(self) -> bool {
        !matches!(self, TheoremId::Usmd | TheoremId::Usdq)
    }

    fn name(self) -> &'static str {
        match self {
            TheoremId::Usmd => "USMD",
            TheoremId::Usdq => "USDQ",
            TheoremId::Usmd2 => "USMD2",
            TheoremId::Ummd => "UMMD",
            TheoremId::Ummd2 => "UMMD2",
            TheoremId::Um1d => "UM1D",
            TheoremId::Um1dc => "UM1DC",
            TheoremId::Um1d2 => "UM1D2",
            TheoremId::M11dq => "M11DQ",
            TheoremId::M11dq2 => "M11DQ2",
            TheoremId::M11dq3 => "M11DQ3",
            TheoremId::Dqzz => "DQZZ",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<TheoremId> {
        let upper = s.to_ascii_uppercase();
        TheoremId::ALL
            .into_iter()
            .find(|id| id.name() == upper)
            .ok_or_else(|| Error::Config(format!("unknown theorem id {s}")))
    }
}

/// One parameter tuple of a classified family. For `Dqzz` the fields `n`
/// and `m` hold the independent exponents n1 and m1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TheoremCase {
    pub id: TheoremId,
    /// Variant: 1 glues a dihedral factor, 2 a quaternion factor.
    pub l: u8,
    pub n: u32,
    pub m: u32,
    pub k: u32,
}

impl TheoremCase {
    /// Validated constructor.
    pub fn new(id: TheoremId, l: u8, n: u32, m: u32, k: u32) -> Result<TheoremCase> {
        let case = TheoremCase { id, l, n, m, k };
        case.validate()?;
        Ok(case)
    }

    fn req(&self, ok: bool, text: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::Spec(format!("{} violates constraint: {text}", self.id)))
        }
    }

    fn validate(&self) -> Result<()> {
        self.req(self.n >= 1 && self.m >= 1 && self.k >= 1, "n, m, k >= 1")?;
        if self.id.has_variant() {
            self.req(self.l == 1 || self.l == 2, "l must be 1 or 2")?;
        } else {
            self.req(self.l == 1, "the family has no quaternion variant; use l = 1")?;
        }
        self.req(
            self.n + self.m + 2 * self.k <= 58,
            "n + m + 2k <= 58 keeps the order within exact arithmetic",
        )?;
        match self.id {
            TheoremId::Usmd => self.req(self.n >= self.m, "n >= m"),
            TheoremId::Usdq => {
                self.req(self.n >= self.m, "n >= m")?;
                self.req(self.k >= 2, "k >= 2")
            }
            TheoremId::Usmd2 => {
                self.req(self.n > self.m, "n > m")?;
                self.req(self.k >= 2, "k >= 2")
            }
            TheoremId::Ummd => {
                self.req(self.n >= self.m, "n >= m")?;
                self.req(self.k >= 3, "k >= 3")
            }
            TheoremId::Ummd2 => {
                self.req(self.n > self.m, "n > m")?;
                self.req(self.k >= 3, "k >= 3")
            }
            TheoremId::Um1d | TheoremId::Um1dc => {
                self.req(self.n >= self.m, "n >= m")?;
                self.req(self.k >= 2, "k >= 2")
            }
            TheoremId::Um1d2 => {
                self.req(self.n > self.m, "n > m")?;
                self.req(self.k >= 2, "k >= 2")
            }
            TheoremId::M11dq => {
                self.req(self.n >= self.m, "n >= m")?;
                self.req(self.l == 1 || self.k >= 2, "k >= 2 when l = 2")
            }
            TheoremId::M11dq2 => {
                self.req(self.n > self.m, "n > m")?;
                self.req(self.l == 1 || self.k >= 2, "k >= 2 when l = 2")
            }
            TheoremId::M11dq3 => {
                self.req(self.n >= self.m, "n >= m")?;
                self.req(self.k >= 2, "k >= 2")
            }
            TheoremId::Dqzz => Ok(()),
        }
    }

    /// log2 of the group order.
    pub fn group_log2(&self) -> u32 {
        let base = self.n + self.m + 2 * self.k;
        match self.id {
            TheoremId::Um1dc | TheoremId::M11dq3 => base + 1,
            _ => base,
        }
    }

    /// Closed-form (|Omega_1|, |Omega_c|) of the case.
    pub fn omega_closed(&self) -> (u128, u128) {
        let k = self.k;
        let sq = |e: u32| 1u128 << e;
        let skewed = |e: u32| {
            let base = sq(e);
            let d = sq(k + 1);
            if self.l == 1 {
                (base + d, base - d)
            } else {
                (base - d, base + d)
            }
        };
        match self.id {
            TheoremId::Usmd | TheoremId::Usdq | TheoremId::Usmd2 => (sq(2 * k), sq(2 * k)),
            TheoremId::Ummd if self.n == 1 => skewed(2 * k),
            TheoremId::Ummd2 if self.m == 1 => skewed(2 * k),
            TheoremId::Ummd | TheoremId::Ummd2 => (sq(2 * k), sq(2 * k)),
            TheoremId::Um1d | TheoremId::Um1dc if self.n == 1 => skewed(2 * k + 1),
            TheoremId::Um1d2 if self.m == 1 => skewed(2 * k + 1),
            TheoremId::Um1d | TheoremId::Um1dc | TheoremId::Um1d2 => {
                (sq(2 * k + 1), sq(2 * k + 1))
            }
            TheoremId::M11dq if self.n == 1 => skewed(2 * k),
            TheoremId::M11dq2 if self.m == 1 => skewed(2 * k),
            TheoremId::M11dq | TheoremId::M11dq2 | TheoremId::M11dq3 => {
                (sq(2 * k + 1), sq(2 * k + 1))
            }
            TheoremId::Dqzz if self.n == 1 => skewed(2 * k + 1),
            TheoremId::Dqzz => (sq(2 * k + 2), sq(2 * k + 2)),
        }
    }

    fn ell_log2(&self) -> i64 {
        let (l, n, m, k) = (self.l, self.n, self.m, self.k);
        match self.id {
            TheoremId::Usmd => {
                if n == 1 && k >= 2 {
                    1
                } else {
                    2
                }
            }
            TheoremId::Usdq => {
                if n == 1 && k >= 3 {
                    1
                } else {
                    2
                }
            }
            TheoremId::Usmd2 => {
                if m == 1 && (l == 1 || k >= 3) {
                    1
                } else {
                    2
                }
            }
            TheoremId::Ummd => {
                if n == 1 {
                    1
                } else {
                    2
                }
            }
            TheoremId::Ummd2 => {
                if m == 1 {
                    1
                } else {
                    2
                }
            }
            TheoremId::Um1d => {
                if n == 1 && m == 1 {
                    0
                } else if m == 1 {
                    1
                } else {
                    2
                }
            }
            TheoremId::Um1dc => {
                if n == 1 && m == 1 {
                    1
                } else {
                    2
                }
            }
            TheoremId::Um1d2 => {
                if m == 1 {
                    1
                } else {
                    2
                }
            }
            TheoremId::M11dq | TheoremId::M11dq2 => {
                let key = if self.id == TheoremId::M11dq { n } else { m };
                if l == 1 {
                    if key == 1 || (key == 2 && k >= 2) {
                        1
                    } else {
                        2
                    }
                } else if key == 1 && k == 2 {
                    3
                } else if key <= 2 && k >= 3 {
                    1
                } else {
                    2
                }
            }
            TheoremId::M11dq3 => {
                if m == 1 && (l == 1 || k >= 3) {
                    1
                } else {
                    2
                }
            }
            TheoremId::Dqzz => {
                if l == 1 {
                    if n <= 2 && m == 1 {
                        0
                    } else if n >= 3 && m >= 2 {
                        2
                    } else {
                        1
                    }
                } else if n == 1 && k == 1 && m >= 2 {
                    3
                } else if (n == 1 && m == 1 && k == 1)
                    || (n == 2 && m >= 2 && k == 1)
                    || (n >= 3 && m >= 2)
                {
                    2
                } else if n <= 2 && m == 1 && k >= 2 {
                    0
                } else {
                    1
                }
            }
        }
    }

    /// The group specification the case describes.
    pub fn to_spec(&self) -> GroupSpec {
        let (l, n, m, k) = (self.l, self.n, self.m, self.k);
        let m2 = |u: u32, v: u32| GroupSpec::Atom(Atom::M2(u, v));
        let m2s = |a: u32, b: u32| GroupSpec::Atom(Atom::M2Star(a, b));
        let z = |e: u32| GroupSpec::Atom(Atom::Z(1u64 << e));
        let variant = || {
            if l == 1 {
                GroupSpec::Atom(Atom::D8)
            } else {
                GroupSpec::Atom(Atom::Q8)
            }
        };
        // Chain of the variant factor followed by `extra` dihedral factors.
        let dihedral_tail = |head: GroupSpec, extra: u32| {
            (0..extra).fold(head, |acc, _| {
                GroupSpec::central(acc, GroupSpec::Atom(Atom::D8))
            })
        };
        match self.id {
            TheoremId::Usmd => dihedral_tail(m2(n + 1, m + 1), k - 1),
            TheoremId::Usdq => dihedral_tail(
                GroupSpec::central(m2(n + 1, m + 1), GroupSpec::Atom(Atom::Q8)),
                k - 2,
            ),
            TheoremId::Usmd2 => {
                dihedral_tail(GroupSpec::central(m2(m + 1, n + 1), variant()), k - 2)
            }
            TheoremId::Ummd => dihedral_tail(
                GroupSpec::central(GroupSpec::central(m2(n + 1, 1), m2s(m + 1, 1)), variant()),
                k - 3,
            ),
            TheoremId::Ummd2 => dihedral_tail(
                GroupSpec::central(GroupSpec::central(m2(m + 1, 1), m2s(n + 1, 1)), variant()),
                k - 3,
            ),
            TheoremId::Um1d => GroupSpec::direct(
                dihedral_tail(GroupSpec::central(m2(n + 1, 1), variant()), k - 2),
                z(m),
            ),
            TheoremId::Um1dc => GroupSpec::direct(
                dihedral_tail(GroupSpec::central(m2(n + 1, 1), variant()), k - 2),
                z(m + 1),
            ),
            TheoremId::Um1d2 => GroupSpec::direct(
                dihedral_tail(GroupSpec::central(m2(m + 1, 1), variant()), k - 2),
                z(n),
            ),
            TheoremId::M11dq => {
                let chain = if l == 1 {
                    dihedral_tail(m2s(m + 1, 1), k - 1)
                } else {
                    dihedral_tail(GroupSpec::central(m2s(m + 1, 1), variant()), k - 2)
                };
                GroupSpec::central(chain, z(n))
            }
            TheoremId::M11dq2 => {
                let chain = if l == 1 {
                    dihedral_tail(m2s(n + 1, 1), k - 1)
                } else {
                    dihedral_tail(GroupSpec::central(m2s(n + 1, 1), variant()), k - 2)
                };
                GroupSpec::central(chain, z(m))
            }
            TheoremId::M11dq3 => GroupSpec::central(
                dihedral_tail(GroupSpec::central(m2s(n + 1, 1), variant()), k - 2),
                z(m + 1),
            ),
            TheoremId::Dqzz => GroupSpec::direct(
                GroupSpec::central(dihedral_tail(variant(), k - 1), z(n)),
                z(m),
            ),
        }
    }
}

impl fmt::Display for TheoremCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.id == TheoremId::Dqzz {
            write!(f, "{}(l={}, n1={}, m1={}, k={})", self.id, self.l, self.n, self.m, self.k)
        } else if self.id.has_variant() {
            write!(f, "{}(l={}, n={}, m={}, k={})", self.id, self.l, self.n, self.m, self.k)
        } else {
            write!(f, "{}(n={}, m={}, k={})", self.id, self.n, self.m, self.k)
        }
    }
}

/// Closed-form |V_*(FG)| = ell * q^((|G| + |Omega_1|)/2 - 1) of a case.
pub fn vstar_closed(case: &TheoremCase, field_k: u8) -> Result<OrderValue> {
    case.validate()?;
    let size = 1u128 << case.group_log2();
    let (o1, _) = case.omega_closed();
    let exponent = i64::try_from((size + o1) / 2 - 1)
        .map_err(|_| Error::Domain("exponent exceeds the exact arithmetic range".into()))?;
    Ok(OrderValue::new(case.ell_log2(), exponent, field_k))
}

/// Checks that the closed form agrees with the symbolic recursion and has
/// the shape ell * q^((|G| + |Omega_1|)/2 - 1) with ell a positive integer.
pub fn conjecture_divisibility(case: &TheoremCase, field_k: u8) -> Result<bool> {
    let closed = vstar_closed(case, field_k)?;
    let flat = flatten(&case.to_spec())?;
    let recursion = vstar_recursion_symbolic(&flat, field_k)?;
    if closed != recursion {
        return Err(Error::Domain(format!(
            "{case}: closed form {closed} disagrees with the recursion {recursion}"
        )));
    }
    let size = 1u128 << case.group_log2();
    let (o1, _) = case.omega_closed();
    let exponent = i64::try_from((size + o1) / 2 - 1)
        .map_err(|_| Error::Domain("exponent exceeds the exact arithmetic range".into()))?;
    let ell_log2 = closed.total_log2() - i64::from(field_k) * exponent;
    Ok(ell_log2 >= 0 && closed.is_integer())
}

/// Every valid case with n, m <= max_nm and k <= max_k.
pub fn enumerate_cases(max_nm: u32, max_k: u32) -> Vec<TheoremCase> {
    let mut cases = Vec::new();
    for id in TheoremId::ALL {
        let variants: &[u8] = if id.has_variant() { &[1, 2] } else { &[1] };
        for &l in variants {
            for n in 1..=max_nm {
                for m in 1..=max_nm {
                    for k in 1..=max_k {
                        if let Ok(case) = TheoremCase::new(id, l, n, m, k) {
                            cases.push(case);
                        }
                    }
                }
            }
        }
    }
    cases
}
