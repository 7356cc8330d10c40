//! Constructors for the supported 2-groups and the group-spec DSL.
//!
//! Atoms (D8, Q8, M2(u,v), M2(n,m,1), cyclic 2-groups) are materialized from
//! small power-commutator presentations with a central involution c. Larger
//! groups are assembled by central products (amalgamating designated c's)
//! and direct products, driven either by a parsed spec string or by the
//! classification-family constructors. The spec grammar:
//!
//! ```text
//! spec   := dterm ( "x" dterm )*
//! dterm  := cterm ( "." cterm )*
//! cterm  := atom | "(" spec ")"
//! atom   := "D8" | "Q8" | "Z" int | "M2(" int "," int ")" | "M2(" int "," int ",1)"
//! ```
//!
//! '.' (central product) binds tighter than 'x' (direct product); both are
//! left-associative.

use std::fmt;

use super::{Elem, Group, Subgroup, MAX_ORDER};
use crate::{Error, Result};

/// An indecomposable building block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    D8,
    Q8,
    /// Cyclic group of the given order (a power of 2, at least 2).
    Z(u64),
    /// The modular group M2(u, v) of order 2^(u+v), u >= 2.
    M2(u32, u32),
    /// The group M2(n, m, 1) of order 2^(n+m+1), n >= m >= 1.
    M2Star(u32, u32),
}

impl Atom {
    /// Order of the atom.
    pub fn order(&self) -> u64 {
        match *self {
            Atom::D8 | Atom::Q8 => 8,
            Atom::Z(o) => o,
            Atom::M2(u, v) => 1u64 << (u + v),
            Atom::M2Star(n, m) => 1u64 << (n + m + 1),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Atom::D8 | Atom::Q8 => {}
            Atom::Z(o) => {
                if o < 2 || !o.is_power_of_two() {
                    return Err(Error::Spec(format!(
                        "Z argument must be a power of 2 and at least 2, got {o}"
                    )));
                }
            }
            Atom::M2(u, v) => {
                if u < 2 {
                    return Err(Error::Spec(format!("M2(u,v) requires u >= 2, got u={u}")));
                }
                if v < 1 {
                    return Err(Error::Spec("M2(u,v) requires v >= 1".into()));
                }
            }
            Atom::M2Star(n, m) => {
                if m < 1 || n < m {
                    return Err(Error::Spec(format!(
                        "M2(n,m,1) requires n >= m >= 1, got n={n}, m={m}"
                    )));
                }
            }
        }
        if self.order() > MAX_ORDER as u64 {
            return Err(Error::Unsupported(format!(
                "atom order {} exceeds the cap {MAX_ORDER}",
                self.order()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::D8 => write!(f, "D8"),
            Atom::Q8 => write!(f, "Q8"),
            Atom::Z(o) => write!(f, "Z{o}"),
            Atom::M2(u, v) => write!(f, "M2({u},{v})"),
            Atom::M2Star(n, m) => write!(f, "M2({n},{m},1)"),
        }
    }
}

/// A group specification: atoms combined by central and direct products.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Atom(Atom),
    Central(Box<GroupSpec>, Box<GroupSpec>),
    Direct(Box<GroupSpec>, Box<GroupSpec>),
}

impl GroupSpec {
    fn precedence(&self) -> u8 {
        match self {
            GroupSpec::Direct(..) => 0,
            GroupSpec::Central(..) => 1,
            GroupSpec::Atom(_) => 2,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        let me = self.precedence();
        if me < parent {
            write!(f, "(")?;
        }
        match self {
            GroupSpec::Atom(a) => write!(f, "{a}")?,
            GroupSpec::Central(l, r) => {
                l.fmt_prec(f, 1)?;
                write!(f, " . ")?;
                r.fmt_prec(f, 2)?;
            }
            GroupSpec::Direct(l, r) => {
                l.fmt_prec(f, 0)?;
                write!(f, " x ")?;
                r.fmt_prec(f, 1)?;
            }
        }
        if me < parent {
            write!(f, ")")?;
        }
        Ok(())
    }

    /// Central product of two specs.
    pub fn central(l: GroupSpec, r: GroupSpec) -> GroupSpec {
        GroupSpec::Central(Box::new(l), Box::new(r))
    }

    /// Direct product of two specs.
    pub fn direct(l: GroupSpec, r: GroupSpec) -> GroupSpec {
        GroupSpec::Direct(Box::new(l), Box::new(r))
    }

    /// Order of the group this spec builds.
    pub fn order(&self) -> u64 {
        match self {
            GroupSpec::Atom(a) => a.order(),
            GroupSpec::Central(l, r) => l.order() * r.order() / 2,
            GroupSpec::Direct(l, r) => l.order() * r.order(),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A power-commutator presentation with an optional central involution c.
///
/// Generators g_1..g_d have schedule orders m_i with g_i^(m_i) = c^(eps_i),
/// c is central of order 2, and [g_j, g_i] = c^(comm[j][i]) for j > i.
/// Elements are exponent vectors (e_1, ..., e_d, e_c) ordered
/// lexicographically, identity first, c least significant.
struct PcPresentation {
    orders: Vec<u64>,
    power_c: Vec<u8>,
    comm: Vec<Vec<u8>>,
    has_c: bool,
    names: Vec<String>,
}

impl PcPresentation {
    fn materialize(&self) -> Result<Group> {
        let d = self.orders.len();
        let mut radices: Vec<u64> = self.orders.clone();
        if self.has_c {
            radices.push(2);
        }
        let n: u64 = radices.iter().product();
        if n > MAX_ORDER as u64 {
            return Err(Error::Unsupported(format!(
                "presentation order {n} exceeds the cap {MAX_ORDER}"
            )));
        }
        let n = n as usize;
        let decode = |mut idx: usize| -> Vec<u64> {
            let mut v = vec![0u64; radices.len()];
            for i in (0..radices.len()).rev() {
                v[i] = (idx as u64) % radices[i];
                idx /= radices[i] as usize;
            }
            v
        };
        let encode = |v: &[u64]| -> usize {
            v.iter()
                .zip(radices.iter())
                .fold(0usize, |acc, (&e, &r)| acc * r as usize + e as usize)
        };
        let mut table = vec![0 as Elem; n * n];
        for a in 0..n {
            let av = decode(a);
            for b in 0..n {
                let bv = decode(b);
                let mut out = vec![0u64; radices.len()];
                let mut c_exp: u64 = if self.has_c {
                    av[d] + bv[d]
                } else {
                    0
                };
                for i in 0..d {
                    let s = av[i] + bv[i];
                    out[i] = s % self.orders[i];
                    let carry = s / self.orders[i];
                    c_exp += self.power_c[i] as u64 * carry;
                }
                for j in 1..d {
                    for i in 0..j {
                        c_exp += self.comm[j][i] as u64 * av[j] * bv[i];
                    }
                }
                if self.has_c {
                    out[d] = c_exp % 2;
                } else if c_exp % 2 != 0 {
                    return Err(Error::Domain(
                        "presentation produces c without a c generator".into(),
                    ));
                }
                table[a * n + b] = encode(&out) as Elem;
            }
        }
        let c = if self.has_c {
            let mut cv = vec![0u64; radices.len()];
            cv[d] = 1;
            Some(encode(&cv) as Elem)
        } else {
            None
        };
        let mut g = Group::from_table(table, n, c)?;
        let exps: Vec<Vec<u8>> = (0..n)
            .map(|i| decode(i).iter().map(|&e| e as u8).collect())
            .collect();
        g.set_names(self.names.clone(), Some(exps));
        Ok(g)
    }
}

/// Builds a single atom with its designated central involution.
pub fn build_atom(atom: &Atom) -> Result<Group> {
    atom.validate()?;
    let pres = match *atom {
        Atom::D8 => PcPresentation {
            orders: vec![2, 2],
            power_c: vec![0, 0],
            comm: vec![vec![], vec![1]],
            has_c: true,
            names: vec!["x".into(), "y".into(), "c".into()],
        },
        Atom::Q8 => PcPresentation {
            orders: vec![2, 2],
            power_c: vec![1, 1],
            comm: vec![vec![], vec![1]],
            has_c: true,
            names: vec!["x".into(), "y".into(), "c".into()],
        },
        Atom::M2(u, v) => PcPresentation {
            orders: vec![1u64 << (u - 1), 1u64 << v],
            power_c: vec![1, 0],
            comm: vec![vec![], vec![1]],
            has_c: true,
            names: vec!["x".into(), "y".into(), "c".into()],
        },
        Atom::M2Star(n, m) => PcPresentation {
            orders: vec![1u64 << n, 1u64 << m],
            power_c: vec![0, 0],
            comm: vec![vec![], vec![1]],
            has_c: true,
            names: vec!["x".into(), "y".into(), "c".into()],
        },
        Atom::Z(o) => {
            if o == 2 {
                PcPresentation {
                    orders: vec![],
                    power_c: vec![],
                    comm: vec![],
                    has_c: true,
                    names: vec!["c".into()],
                }
            } else {
                PcPresentation {
                    orders: vec![o / 2],
                    power_c: vec![1],
                    comm: vec![vec![]],
                    has_c: true,
                    names: vec!["z".into(), "c".into()],
                }
            }
        }
    };
    let mut g = pres.materialize()?;
    g.set_provenance(GroupSpec::Atom(atom.clone()));
    Ok(g)
}

/// Builds the dihedral (or quaternion) group of order 2^(n+1), n >= 2, with
/// c = r^(2^(n-1)). These live outside the spec DSL; the dihedral groups of
/// order >= 16 have |G'| > 2 and serve as out-of-scope probes.
pub fn dihedral_like(quaternion: bool, n: u32) -> Result<Group> {
    if n < 2 {
        return Err(Error::Spec(format!(
            "dihedral/quaternion parameter n must be >= 2, got {n}"
        )));
    }
    let half = 1usize << n;
    let size = 2 * half;
    if size > MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "group order {size} exceeds the cap {MAX_ORDER}"
        )));
    }
    // Element r^i s^j at index i*2 + j.
    let mut table = vec![0 as Elem; size * size];
    for i1 in 0..half {
        for j1 in 0..2usize {
            for i2 in 0..half {
                for j2 in 0..2usize {
                    let mut i = if j1 == 0 { i1 + i2 } else { i1 + half - i2 };
                    if quaternion && j1 == 1 && j2 == 1 {
                        i += half / 2;
                    }
                    let i = i % half;
                    let j = j1 ^ j2;
                    table[(i1 * 2 + j1) * size + (i2 * 2 + j2)] = (i * 2 + j) as Elem;
                }
            }
        }
    }
    let c = (half / 2 * 2) as Elem;
    let mut g = Group::from_table(table, size, Some(c))?;
    g.set_names(vec!["r".into(), "s".into()], None);
    Ok(g)
}

/// Quotient of G x H by a central subgroup given as explicit pairs.
///
/// Orbit representatives are chosen by minimal pair rank a*|H| + b, which
/// keeps the identity at index 0 and makes layouts reproducible. Also
/// returns the pair-rank-to-class map.
pub(crate) fn product_quotient(
    g: &Group,
    h: &Group,
    u_pairs: &[(Elem, Elem)],
) -> Result<(Group, Vec<Elem>)> {
    let (gn, hn) = (g.order(), h.order());
    let un = u_pairs.len();
    if un == 0 || !u_pairs.contains(&(0, 0)) {
        return Err(Error::Domain("quotient subgroup must contain (1,1)".into()));
    }
    for &(u1, u2) in u_pairs {
        for a in 0..gn as Elem {
            if g.mul(u1, a) != g.mul(a, u1) {
                return Err(Error::Domain("quotient subgroup is not central".into()));
            }
        }
        for b in 0..hn as Elem {
            if h.mul(u2, b) != h.mul(b, u2) {
                return Err(Error::Domain("quotient subgroup is not central".into()));
            }
        }
        for &(v1, v2) in u_pairs {
            let prod = (g.mul(u1, v1), h.mul(u2, v2));
            if !u_pairs.contains(&prod) {
                return Err(Error::Domain("quotient pairs do not form a subgroup".into()));
            }
        }
    }
    if gn * hn % un != 0 {
        return Err(Error::Domain("quotient subgroup order does not divide".into()));
    }
    let n = gn * hn / un;
    if n > MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "product order {n} exceeds the cap {MAX_ORDER}"
        )));
    }
    let rank = |a: Elem, b: Elem| a as usize * hn + b as usize;
    let mut classes = vec![Elem::MAX; gn * hn];
    let mut reps: Vec<(Elem, Elem)> = Vec::with_capacity(n);
    for a in 0..gn as Elem {
        for b in 0..hn as Elem {
            if classes[rank(a, b)] == Elem::MAX {
                let id = reps.len() as Elem;
                for &(u1, u2) in u_pairs {
                    classes[rank(g.mul(a, u1), h.mul(b, u2))] = id;
                }
                reps.push((a, b));
            }
        }
    }
    if reps.len() != n {
        return Err(Error::Domain("quotient orbit count mismatch".into()));
    }
    let mut table = vec![0 as Elem; n * n];
    for (i, &(a1, b1)) in reps.iter().enumerate() {
        for (j, &(a2, b2)) in reps.iter().enumerate() {
            table[i * n + j] = classes[rank(g.mul(a1, a2), h.mul(b1, b2))];
        }
    }
    let q = Group::from_table(table, n, None)?;
    Ok((q, classes))
}

fn merged_names(g: &Group, h: &Group) -> Vec<String> {
    let mut names: Vec<String> = g.gen_names().to_vec();
    for name in h.gen_names() {
        let mut candidate = name.clone();
        while names.contains(&candidate) {
            candidate.push('\'');
        }
        names.push(candidate);
    }
    names
}

/// Central product amalgamating the designated involutions of both factors.
pub fn central_product(g: &Group, h: &Group) -> Result<Group> {
    let cg = g.designated_c().ok_or_else(|| {
        Error::Spec("central product requires a designated involution in the left factor".into())
    })?;
    let ch = h.designated_c().ok_or_else(|| {
        Error::Spec("central product requires a designated involution in the right factor".into())
    })?;
    let (q, classes) = product_quotient(g, h, &[(0, 0), (cg, ch)])?;
    let c_index = classes[cg as usize * h.order()];
    let mut q = q.with_designated_c(c_index)?;
    q.set_names(merged_names(g, h), None);
    Ok(q)
}

/// Direct product. The designated involution is inherited from the
/// nonabelian factor if there is one, else from the left factor.
pub fn direct_product(g: &Group, h: &Group) -> Result<Group> {
    let g_ab = g.is_abelian();
    let h_ab = h.is_abelian();
    if !g_ab && !h_ab {
        return Err(Error::Unsupported(
            "direct product of two nonabelian factors has |G'| > 2".into(),
        ));
    }
    let (q, classes) = product_quotient(g, h, &[(0, 0)])?;
    let c_pair = if !g_ab {
        g.designated_c().map(|c| (c, 0))
    } else if !h_ab {
        h.designated_c().map(|c| (0, c))
    } else {
        g.designated_c()
            .map(|c| (c, 0))
            .or_else(|| h.designated_c().map(|c| (0, c)))
    };
    let mut q = match c_pair {
        Some((a, b)) => q.with_designated_c(classes[a as usize * h.order() + b as usize])?,
        None => q,
    };
    q.set_names(merged_names(g, h), None);
    Ok(q)
}

/// Builds the group described by a spec tree and records it as provenance.
pub fn build(spec: &GroupSpec) -> Result<Group> {
    let mut g = match spec {
        GroupSpec::Atom(a) => build_atom(a)?,
        GroupSpec::Central(l, r) => central_product(&build(l)?, &build(r)?)?,
        GroupSpec::Direct(l, r) => direct_product(&build(l)?, &build(r)?)?,
    };
    g.set_provenance(spec.clone());
    Ok(g)
}

/// Extracts a subgroup as a standalone group plus the new-to-old index map.
pub(crate) fn subgroup_as_group(g: &Group, sub: &Subgroup) -> Result<(Group, Vec<Elem>)> {
    let n = sub.order();
    let mut old_to_new = vec![Elem::MAX; g.order()];
    for (i, &e) in sub.elements.iter().enumerate() {
        old_to_new[e as usize] = i as Elem;
    }
    let mut table = vec![0 as Elem; n * n];
    for (i, &a) in sub.elements.iter().enumerate() {
        for (j, &b) in sub.elements.iter().enumerate() {
            let p = old_to_new[g.mul(a, b) as usize];
            if p == Elem::MAX {
                return Err(Error::Domain("subgroup is not closed".into()));
            }
            table[i * n + j] = p;
        }
    }
    Ok((Group::from_table(table, n, None)?, sub.elements.clone()))
}

// ---------------------------------------------------------------------------
// Spec parsing
// ---------------------------------------------------------------------------

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn error<T>(&self, offset: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> Result<()> {
        match self.peek() {
            Some(f) if f == b => {
                self.pos += 1;
                Ok(())
            }
            _ => self.error(self.pos, format!("expected '{}'", b as char)),
        }
    }

    fn int(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.error(start, "expected an integer");
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| Error::Parse {
                offset: start,
                message: "integer out of range".into(),
            })
    }

    fn atom(&mut self) -> Result<GroupSpec> {
        self.skip_ws();
        let start = self.pos;
        if self.bytes[self.pos..].starts_with(b"D8") {
            self.pos += 2;
            return Ok(GroupSpec::Atom(Atom::D8));
        }
        if self.bytes[self.pos..].starts_with(b"Q8") {
            self.pos += 2;
            return Ok(GroupSpec::Atom(Atom::Q8));
        }
        if self.bytes[self.pos..].starts_with(b"Z") {
            self.pos += 1;
            let arg_at = self.pos;
            let o = self.int()?;
            if o < 2 || !o.is_power_of_two() {
                return self.error(arg_at, format!("Z argument must be a power of 2 and at least 2, got {o}"));
            }
            return Ok(GroupSpec::Atom(Atom::Z(o)));
        }
        if self.bytes[self.pos..].starts_with(b"M2(") {
            self.pos += 3;
            let u_at = self.pos;
            let u = self.int()?;
            self.eat(b',')?;
            let v = self.int()?;
            let atom = if self.peek() == Some(b',') {
                self.pos += 1;
                let one_at = self.pos;
                if self.int()? != 1 {
                    return self.error(one_at, "third M2 argument must be 1");
                }
                Atom::M2Star(u as u32, v as u32)
            } else {
                Atom::M2(u as u32, v as u32)
            };
            self.eat(b')')?;
            if u > 12 || v > 12 {
                return self.error(u_at, "M2 exponents exceed the order cap");
            }
            if let Err(Error::Spec(msg)) = atom.validate() {
                return self.error(start, msg);
            }
            return Ok(GroupSpec::Atom(atom));
        }
        self.error(start, "expected an atom: D8, Q8, Z<2^j> or M2(...)")
    }

    fn cterm(&mut self) -> Result<GroupSpec> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let inner = self.spec()?;
            self.eat(b')')?;
            Ok(inner)
        } else {
            self.atom()
        }
    }

    fn dterm(&mut self) -> Result<GroupSpec> {
        let mut acc = self.cterm()?;
        while self.peek() == Some(b'.') {
            self.pos += 1;
            let rhs = self.cterm()?;
            acc = GroupSpec::central(acc, rhs);
        }
        Ok(acc)
    }

    fn spec(&mut self) -> Result<GroupSpec> {
        let mut acc = self.dterm()?;
        while self.peek() == Some(b'x') {
            self.pos += 1;
            let rhs = self.dterm()?;
            acc = GroupSpec::direct(acc, rhs);
        }
        Ok(acc)
    }
}

/// Parses a group spec string; errors carry the byte offset of the problem.
pub fn parse_spec(text: &str) -> Result<GroupSpec> {
    let mut p = Parser::new(text);
    let spec = p.spec()?;
    if p.peek().is_some() {
        return p.error(p.pos, "unexpected trailing input");
    }
    Ok(spec)
}

// ---------------------------------------------------------------------------
// Flattened view for the symbolic pipelines
// ---------------------------------------------------------------------------

/// A spec reduced to its canonical layered shape: nonabelian central-chain
/// atoms, cyclic central legs Z_(2^u) sharing the common c (as exponents u),
/// and cyclic direct factors (as orders).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flat {
    pub chain: Vec<Atom>,
    pub legs: Vec<u32>,
    pub directs: Vec<u64>,
}

impl Flat {
    /// True when the flattened group is abelian.
    pub fn is_abelian(&self) -> bool {
        self.chain.is_empty()
    }

    /// Cyclic orders of the abelian part formed by the legs and directs:
    /// the legs amalgamate to Z_(2^umax) x prod Z_(2^(u_i - 1)).
    pub fn abelian_orders(&self) -> Vec<u64> {
        let mut orders = Vec::new();
        if !self.legs.is_empty() {
            let max = *self.legs.iter().max().unwrap();
            let mut seen_max = false;
            for &u in &self.legs {
                if u == max && !seen_max {
                    seen_max = true;
                    orders.push(1u64 << u);
                } else if u >= 2 {
                    orders.push(1u64 << (u - 1));
                }
            }
        }
        orders.extend_from_slice(&self.directs);
        orders.sort_unstable_by(|a, b| b.cmp(a));
        orders
    }

    /// Group order.
    pub fn order(&self) -> u64 {
        let chain: u64 = self.chain.iter().map(Atom::order).product();
        let joins = 1u64 << self.chain.len().saturating_sub(1);
        let legs: u64 = self.legs.iter().map(|&u| 1u64 << (u - 1)).product();
        let chain_part = if self.chain.is_empty() {
            // Purely abelian: the legs amalgamate over a shared involution.
            let max = self.legs.iter().max().copied().unwrap_or(0);
            (1u64 << max) * legs / (1u64 << max.saturating_sub(1)).max(1)
        } else {
            chain / joins * legs
        };
        chain_part * self.directs.iter().product::<u64>()
    }
}

fn demote_to_directs(flat: &Flat) -> Result<Vec<u64>> {
    if !flat.chain.is_empty() {
        return Err(Error::Unsupported(
            "direct product of two nonabelian factors has |G'| > 2".into(),
        ));
    }
    Ok(flat.abelian_orders())
}

/// Flattens a spec into chain/legs/directs form, normalizing: trivial Z2
/// legs are absorbed (unless the whole group is Z2) and Q8-pairs in the
/// chain are rewritten as D8-pairs (Q8 central Q8 = D8 central D8).
pub fn flatten(spec: &GroupSpec) -> Result<Flat> {
    let mut flat = flatten_raw(spec)?;
    if !flat.chain.is_empty() || flat.legs.iter().any(|&u| u >= 2) || !flat.directs.is_empty() {
        flat.legs.retain(|&u| u >= 2);
    } else {
        flat.legs.truncate(1);
    }
    let q8s = flat.chain.iter().filter(|a| **a == Atom::Q8).count();
    if q8s >= 2 {
        let replaced = q8s - q8s % 2;
        flat.chain.retain(|a| *a != Atom::Q8);
        for _ in 0..q8s - replaced {
            flat.chain.push(Atom::Q8);
        }
        for _ in 0..replaced {
            flat.chain.push(Atom::D8);
        }
    }
    flat.legs.sort_unstable_by(|a, b| b.cmp(a));
    flat.directs.sort_unstable_by(|a, b| b.cmp(a));
    Ok(flat)
}

fn flatten_raw(spec: &GroupSpec) -> Result<Flat> {
    match spec {
        GroupSpec::Atom(a) => {
            a.validate()?;
            Ok(match a {
                Atom::Z(o) => Flat {
                    chain: vec![],
                    legs: vec![o.trailing_zeros()],
                    directs: vec![],
                },
                other => Flat {
                    chain: vec![other.clone()],
                    legs: vec![],
                    directs: vec![],
                },
            })
        }
        GroupSpec::Central(l, r) => {
            let mut fl = flatten_raw(l)?;
            let fr = flatten_raw(r)?;
            fl.chain.extend(fr.chain);
            fl.legs.extend(fr.legs);
            fl.directs.extend(fr.directs);
            Ok(fl)
        }
        GroupSpec::Direct(l, r) => {
            let fl = flatten_raw(l)?;
            let fr = flatten_raw(r)?;
            let (mut keep, demoted) = if !fl.chain.is_empty() || fr.chain.is_empty() {
                (fl.clone(), demote_to_directs(&fr)?)
            } else {
                (fr.clone(), demote_to_directs(&fl)?)
            };
            keep.directs.extend(demoted);
            Ok(keep)
        }
    }
}

// ---------------------------------------------------------------------------
// Classification families
// ---------------------------------------------------------------------------

/// The classification theorem a family instance belongs to. `St5`/`St6`
/// accept the corollary spellings "ST5c"/"ST6c" as aliases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTheorem {
    St1,
    St2,
    St3,
    St4,
    St5,
    St6,
    St7,
}

impl std::str::FromStr for FamilyTheorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ST1" => Ok(FamilyTheorem::St1),
            "ST2" => Ok(FamilyTheorem::St2),
            "ST3" => Ok(FamilyTheorem::St3),
            "ST4" => Ok(FamilyTheorem::St4),
            "ST5" | "ST5C" => Ok(FamilyTheorem::St5),
            "ST6" | "ST6C" => Ok(FamilyTheorem::St6),
            "ST7" => Ok(FamilyTheorem::St7),
            other => Err(Error::Spec(format!("unknown family theorem {other}"))),
        }
    }
}

impl fmt::Display for FamilyTheorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyTheorem::St1 => "ST1",
            FamilyTheorem::St2 => "ST2",
            FamilyTheorem::St3 => "ST3",
            FamilyTheorem::St4 => "ST4",
            FamilyTheorem::St5 => "ST5",
            FamilyTheorem::St6 => "ST6",
            FamilyTheorem::St7 => "ST7",
        };
        write!(f, "{s}")
    }
}

/// Selects one isomorphism-class family from the classification.
#[derive(Debug, Clone, Copy)]
pub struct FamilyDescriptor {
    pub theorem: FamilyTheorem,
    /// Case number: 1 for (i) through 10 for (x).
    pub case: u8,
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub r: u32,
}

/// Parses a roman-numeral case label (i)-(x).
pub fn parse_case(label: &str) -> Result<u8> {
    const ROMANS: [&str; 10] = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"];
    let cleaned = label.trim().trim_matches(|c| c == '(' || c == ')').to_ascii_lowercase();
    if let Ok(v) = cleaned.parse::<u8>() {
        if (1..=10).contains(&v) {
            return Ok(v);
        }
    }
    ROMANS
        .iter()
        .position(|&r| r == cleaned)
        .map(|p| p as u8 + 1)
        .ok_or_else(|| Error::Spec(format!("unknown case label {label}")))
}

fn chain_spec(atoms: Vec<Atom>) -> GroupSpec {
    let mut it = atoms.into_iter();
    let first = GroupSpec::Atom(it.next().expect("chain is nonempty"));
    it.fold(first, |acc, a| GroupSpec::central(acc, GroupSpec::Atom(a)))
}

fn d8s(k: u32) -> Vec<Atom> {
    (0..k).map(|_| Atom::D8).collect()
}

struct FamilyShape {
    head: Vec<Atom>,
    d8_count: u32,
    central_leg: Option<u64>,
    direct_factor: Option<u64>,
    /// ST7 glues the chain centrally onto a direct product of two cyclics.
    paired_legs: Option<(u64, u64)>,
}

impl FamilyShape {
    fn to_spec(&self, r: u32) -> GroupSpec {
        let mut atoms = self.head.clone();
        atoms.extend(d8s(self.d8_count));
        let mut spec = chain_spec(atoms);
        if let Some((o1, o2)) = self.paired_legs {
            let pair = GroupSpec::direct(
                GroupSpec::Atom(Atom::Z(o1)),
                GroupSpec::Atom(Atom::Z(o2)),
            );
            spec = GroupSpec::central(spec, pair);
        }
        if let Some(o) = self.central_leg {
            spec = GroupSpec::central(spec, GroupSpec::Atom(Atom::Z(o)));
        }
        if let Some(o) = self.direct_factor {
            spec = GroupSpec::direct(spec, GroupSpec::Atom(Atom::Z(o)));
        }
        for _ in 2..=r.saturating_sub(1) {
            spec = GroupSpec::direct(spec, GroupSpec::Atom(Atom::Z(2)));
        }
        spec
    }
}

fn require(cond: bool, desc: &FamilyDescriptor, constraint: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Spec(format!(
            "{}({}) violates constraint: {constraint}",
            desc.theorem,
            ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"]
                [(desc.case.max(1).min(10) - 1) as usize],
        )))
    }
}

/// Emits the group spec for one classification family instance.
pub fn build_family(desc: &FamilyDescriptor) -> Result<GroupSpec> {
    let FamilyDescriptor {
        theorem,
        case,
        n,
        m,
        k,
        r,
    } = *desc;
    require(r >= 2, desc, "r >= 2")?;
    require(m >= 1, desc, "m >= 1")?;
    let pw = |e: u32| 1u64 << e;
    use FamilyTheorem::*;
    let shape = match theorem {
        St1 | St2 => {
            if theorem == St1 {
                require(n >= m, desc, "n >= m")?;
            } else {
                require(n > m, desc, "n > m")?;
            }
            // ST2 is the c-in-<z2> mirror: swap which modular atom leads and
            // which cyclic goes central versus direct.
            let big = if theorem == St1 {
                Atom::M2(n + 1, m + 1)
            } else {
                Atom::M2(m + 1, n + 1)
            };
            let pair = if theorem == St1 {
                vec![Atom::M2(n + 1, 1), Atom::M2Star(m + 1, 1)]
            } else {
                vec![Atom::M2Star(n + 1, 1), Atom::M2(m + 1, 1)]
            };
            let single = if theorem == St1 {
                Atom::M2(n + 1, 1)
            } else {
                Atom::M2Star(n + 1, 1)
            };
            let seven = if theorem == St1 {
                Atom::M2Star(m + 1, 1)
            } else {
                Atom::M2(m + 1, 1)
            };
            match case {
                1 => {
                    require(k >= 1, desc, "k >= 1")?;
                    FamilyShape { head: vec![big], d8_count: k - 1, central_leg: None, direct_factor: None, paired_legs: None }
                }
                2 => {
                    require(k >= 2, desc, "k >= 2")?;
                    FamilyShape { head: vec![big, Atom::Q8], d8_count: k - 2, central_leg: None, direct_factor: None, paired_legs: None }
                }
                3 => {
                    require(k >= 2, desc, "k >= 2")?;
                    FamilyShape { head: pair, d8_count: k - 2, central_leg: None, direct_factor: None, paired_legs: None }
                }
                4 => {
                    require(k >= 3, desc, "k >= 3")?;
                    let mut head = pair;
                    head.push(Atom::Q8);
                    FamilyShape { head, d8_count: k - 3, central_leg: None, direct_factor: None, paired_legs: None }
                }
                5 | 6 => {
                    require(k >= case as u32 - 4, desc, if case == 5 { "k >= 1" } else { "k >= 2" })?;
                    let mut head = vec![single];
                    if case == 6 {
                        head.push(Atom::Q8);
                    }
                    // ST1 takes the Z_{2^m} directly; ST2 takes it centrally.
                    let (leg, fac) = if theorem == St1 {
                        (None, Some(pw(m)))
                    } else {
                        (Some(pw(m)), None)
                    };
                    FamilyShape { head, d8_count: k - (case as u32 - 4), central_leg: leg, direct_factor: fac, paired_legs: None }
                }
                7 | 8 => {
                    require(k >= case as u32 - 6, desc, if case == 7 { "k >= 1" } else { "k >= 2" })?;
                    let mut head = vec![seven];
                    if case == 8 {
                        head.push(Atom::Q8);
                    }
                    let (leg, fac) = if theorem == St1 {
                        (Some(pw(n)), None)
                    } else {
                        (None, Some(pw(n)))
                    };
                    FamilyShape { head, d8_count: k - (case as u32 - 6), central_leg: leg, direct_factor: fac, paired_legs: None }
                }
                9 | 10 => {
                    require(k >= 1, desc, "k >= 1")?;
                    let head = if case == 9 { vec![] } else { vec![Atom::Q8] };
                    let d8_count = if case == 9 { k } else { k - 1 };
                    require(!head.is_empty() || d8_count >= 1, desc, "k >= 1")?;
                    // ST1 legs Z_{2^n} centrally, Z_{2^m} directly; ST2 swaps.
                    let (leg, fac) = if theorem == St1 {
                        (Some(pw(n)), Some(pw(m)))
                    } else {
                        (Some(pw(m)), Some(pw(n)))
                    };
                    FamilyShape { head, d8_count, central_leg: leg, direct_factor: fac, paired_legs: None }
                }
                _ => return Err(Error::Spec(format!("{theorem} has cases (i)-(x), got {case}"))),
            }
        }
        St3 | St4 | St5 | St6 => {
            require(n >= m, desc, "n >= m")?;
            // Each of these has four cases: a modular head over D8s with a
            // cyclic leg/factor, then the D8-only and Q8-variant chains.
            let (head_atom, leg, fac): (Atom, Option<u64>, Option<u64>) = match theorem {
                St3 => (Atom::M2Star(m + 1, 1), Some(pw(n + 1)), None),
                St4 => (Atom::M2(m + 1, 1), None, Some(pw(n + 1))),
                St5 => (Atom::M2(n + 1, 1), None, Some(pw(m + 1))),
                St6 => (Atom::M2Star(n + 1, 1), Some(pw(m + 1)), None),
                _ => unreachable!(),
            };
            let (tail_leg, tail_fac): (u64, u64) = match theorem {
                St3 => (pw(n + 1), pw(m)),
                St4 => (pw(m), pw(n + 1)),
                St5 => (pw(n), pw(m + 1)),
                St6 => (pw(m + 1), pw(n)),
                _ => unreachable!(),
            };
            match case {
                1 => {
                    require(k >= 1, desc, "k >= 1")?;
                    FamilyShape { head: vec![head_atom], d8_count: k - 1, central_leg: leg, direct_factor: fac, paired_legs: None }
                }
                2 => {
                    require(k >= 2, desc, "k >= 2")?;
                    FamilyShape { head: vec![head_atom, Atom::Q8], d8_count: k - 2, central_leg: leg, direct_factor: fac, paired_legs: None }
                }
                3 | 4 => {
                    require(k >= 1, desc, "k >= 1")?;
                    let head = if case == 3 { vec![] } else { vec![Atom::Q8] };
                    let d8_count = if case == 3 { k } else { k - 1 };
                    require(!head.is_empty() || d8_count >= 1, desc, "k >= 1")?;
                    FamilyShape { head, d8_count, central_leg: Some(tail_leg), direct_factor: Some(tail_fac), paired_legs: None }
                }
                _ => return Err(Error::Spec(format!("{theorem} has cases (i)-(iv), got {case}"))),
            }
        }
        St7 => {
            require(n >= m, desc, "n >= m")?;
            require(k >= 1, desc, "k >= 1")?;
            match case {
                1 | 2 => {
                    let head = if case == 1 { vec![] } else { vec![Atom::Q8] };
                    let d8_count = if case == 1 { k } else { k - 1 };
                    require(!head.is_empty() || d8_count >= 1, desc, "k >= 1")?;
                    FamilyShape {
                        head,
                        d8_count,
                        central_leg: None,
                        direct_factor: None,
                        paired_legs: Some((pw(n + 1), pw(m + 1))),
                    }
                }
                _ => return Err(Error::Spec(format!("{theorem} has cases (i)-(ii), got {case}"))),
            }
        }
    };
    Ok(shape.to_spec(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_orders_and_validation() {
        assert_eq!(build_atom(&Atom::D8).unwrap().order(), 8);
        assert_eq!(build_atom(&Atom::Q8).unwrap().order(), 8);
        assert_eq!(build_atom(&Atom::M2(3, 2)).unwrap().order(), 32);
        assert_eq!(build_atom(&Atom::M2Star(2, 1)).unwrap().order(), 16);
        assert_eq!(build_atom(&Atom::Z(8)).unwrap().order(), 8);
        assert!(matches!(build_atom(&Atom::M2(1, 2)), Err(Error::Spec(_))));
        assert!(matches!(build_atom(&Atom::Z(6)), Err(Error::Spec(_))));
        assert!(matches!(build_atom(&Atom::M2Star(1, 2)), Err(Error::Spec(_))));
    }

    #[test]
    fn m2_presentation_relations() {
        // M2(3,2): x of order 8, y of order 4, [x,y] = x^4 = c.
        let g = build_atom(&Atom::M2(3, 2)).unwrap();
        let c = g.designated_c().unwrap();
        let x = (0..g.order() as Elem)
            .find(|&e| g.element_order(e) == 8 && g.pow(e, 4) == c)
            .unwrap();
        let y = (0..g.order() as Elem)
            .find(|&e| g.element_order(e) == 4 && g.commutator(x, e) == c)
            .unwrap();
        // x^y = x^(1+4).
        let conj = g.mul(g.mul(g.inverse(y), x), y);
        assert_eq!(conj, g.pow(x, 5));
        assert_eq!(g.center().order(), 8);
    }

    #[test]
    fn cyclic_atom_designates_unique_involution() {
        let z8 = build_atom(&Atom::Z(8)).unwrap();
        let c = z8.designated_c().unwrap();
        assert_eq!(z8.element_order(c), 2);
        let z = (0..8).find(|&e| z8.element_order(e) == 8).unwrap();
        assert_eq!(z8.pow(z, 4), c);
        let z2 = build_atom(&Atom::Z(2)).unwrap();
        assert_eq!(z2.designated_c(), Some(1));
    }

    #[test]
    fn dihedral_and_quaternion_tables() {
        let d8 = dihedral_like(false, 2).unwrap();
        let om = d8.omega_sets();
        assert_eq!((om.count1(), om.count_c()), (6, 2));
        let q8 = dihedral_like(true, 2).unwrap();
        let om = q8.omega_sets();
        assert_eq!((om.count1(), om.count_c()), (2, 6));
        let d16 = dihedral_like(false, 3).unwrap();
        assert_eq!(d16.order(), 16);
        assert_eq!(d16.derived().order(), 4);
        let q16 = dihedral_like(true, 3).unwrap();
        assert_eq!(q16.order(), 16);
        assert_eq!(q16.omega_sets().count1(), 2);
    }

    #[test]
    fn central_product_order_law() {
        let d8 = build_atom(&Atom::D8).unwrap();
        let q8 = build_atom(&Atom::Q8).unwrap();
        let p = central_product(&d8, &q8).unwrap();
        assert_eq!(p.order(), 32);
        assert_eq!(p.derived().order(), 2);
        assert_eq!(p.center().order(), 2);
        let z4 = build_atom(&Atom::Z(4)).unwrap();
        let p2 = central_product(&d8, &z4).unwrap();
        assert_eq!(p2.order(), 16);
        assert_eq!(p2.center().order(), 4);
    }

    #[test]
    fn direct_product_rules() {
        let d8 = build_atom(&Atom::D8).unwrap();
        let z4 = build_atom(&Atom::Z(4)).unwrap();
        let p = direct_product(&d8, &z4).unwrap();
        assert_eq!(p.order(), 32);
        // c comes from the nonabelian factor.
        let c = p.designated_c().unwrap();
        assert_eq!(p.derived().elements, vec![0, c]);
        assert!(matches!(
            direct_product(&d8, &d8),
            Err(Error::Unsupported(_))
        ));
        let swapped = direct_product(&z4, &d8).unwrap();
        assert_eq!(swapped.designated_c(), swapped.derived().elements.get(1).copied());
    }

    #[test]
    fn central_product_absorbs_z2() {
        let d8 = build_atom(&Atom::D8).unwrap();
        let z2 = build_atom(&Atom::Z(2)).unwrap();
        let p = central_product(&d8, &z2).unwrap();
        assert_eq!(p.order(), 8);
        assert_eq!(p.omega_sets().count1(), 6);
    }

    #[test]
    fn parser_round_trips() {
        for text in [
            "D8",
            "M2(2,2)",
            "M2(3,1,1)",
            "Z16",
            "D8 . Q8",
            "D8 . Z4 x Z2",
            "D8 . (Z4 x Z4)",
            "(D8 x Z4) . Q8",
            "M2(2,1) . M2(2,1,1) . Z8 x Z2 x Z2",
        ] {
            let spec = parse_spec(text).unwrap();
            let printed = spec.to_string();
            assert_eq!(parse_spec(&printed).unwrap(), spec, "round trip {text}");
            assert_eq!(printed, text.replace("  ", " "));
        }
    }

    #[test]
    fn parser_precedence() {
        // '.' binds tighter than 'x'.
        let spec = parse_spec("D8 . Z4 x Q8 . Z2").unwrap();
        match spec {
            GroupSpec::Direct(l, r) => {
                assert!(matches!(*l, GroupSpec::Central(..)));
                assert!(matches!(*r, GroupSpec::Central(..)));
            }
            other => panic!("expected direct at top level, got {other:?}"),
        }
    }

    #[test]
    fn parser_errors_carry_offsets() {
        match parse_spec("D8 . Z6") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_spec("M2(1,2)") {
            Err(Error::Parse { offset, message }) => {
                assert_eq!(offset, 0);
                assert!(message.contains("u >= 2"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_spec("D8 . ") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_spec("D8 D8") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn build_matches_spec_order() {
        for text in ["D8 . Q8", "D8 . (Z4 x Z4)", "(D8 x Z4) . Q8", "Z4 . Z8"] {
            let spec = parse_spec(text).unwrap();
            let g = build(&spec).unwrap();
            assert_eq!(g.order() as u64, spec.order(), "{text}");
            assert_eq!(g.provenance(), Some(&spec));
        }
    }

    #[test]
    fn flatten_examples() {
        let f = flatten(&parse_spec("(D8 x Z4) . Q8").unwrap()).unwrap();
        assert_eq!(f.chain, vec![Atom::D8, Atom::Q8]);
        assert!(f.legs.is_empty());
        assert_eq!(f.directs, vec![4]);

        let f = flatten(&parse_spec("(Z4 x Z8) . D8").unwrap()).unwrap();
        assert_eq!(f.chain, vec![Atom::D8]);
        assert_eq!(f.legs, vec![2]);
        assert_eq!(f.directs, vec![8]);

        let f = flatten(&parse_spec("Z4 . Z8").unwrap()).unwrap();
        assert!(f.chain.is_empty());
        assert_eq!(f.legs, vec![3, 2]);
        assert_eq!(f.abelian_orders(), vec![8, 2]);

        let f = flatten(&parse_spec("D8 . Z2").unwrap()).unwrap();
        assert_eq!(f.chain, vec![Atom::D8]);
        assert!(f.legs.is_empty());

        let f = flatten(&parse_spec("Z2").unwrap()).unwrap();
        assert_eq!(f.legs, vec![1]);

        // Q8 pairs canonicalize to D8 pairs.
        let f = flatten(&parse_spec("Q8 . Q8 . Q8").unwrap()).unwrap();
        assert_eq!(
            f.chain.iter().filter(|a| **a == Atom::Q8).count(),
            1
        );
        assert_eq!(f.chain.len(), 3);
    }

    #[test]
    fn flatten_order_matches_build() {
        for text in [
            "(D8 x Z4) . Q8",
            "(Z4 x Z8) . D8",
            "Z4 . Z8",
            "D8 . Z2",
            "M2(2,2) . Z4 x Z2",
            "Q8 . Q8",
        ] {
            let spec = parse_spec(text).unwrap();
            let f = flatten(&spec).unwrap();
            assert_eq!(f.order(), spec.order(), "{text}");
        }
    }

    #[test]
    fn family_examples_from_classification() {
        let d = FamilyDescriptor { theorem: FamilyTheorem::St1, case: 1, n: 1, m: 1, k: 1, r: 2 };
        let spec = build_family(&d).unwrap();
        assert_eq!(spec.to_string(), "M2(2,2)");
        assert_eq!(build(&spec).unwrap().order(), 16);

        let d = FamilyDescriptor { theorem: FamilyTheorem::St7, case: 1, n: 1, m: 1, k: 1, r: 2 };
        let spec = build_family(&d).unwrap();
        assert_eq!(spec.to_string(), "D8 . (Z4 x Z4)");
        // The printed spec's real order (the classification text also counts
        // the two amalgamated cyclics).
        assert_eq!(build(&spec).unwrap().order(), 64);

        let d = FamilyDescriptor { theorem: FamilyTheorem::St2, case: 9, n: 2, m: 1, k: 1, r: 2 };
        let spec = build_family(&d).unwrap();
        assert_eq!(spec.to_string(), "D8 . Z2 x Z4");
        let g = build(&spec).unwrap();
        assert_eq!(g.order(), 32);
    }

    #[test]
    fn family_constraint_errors_name_the_constraint() {
        let d = FamilyDescriptor { theorem: FamilyTheorem::St1, case: 4, n: 1, m: 1, k: 2, r: 2 };
        match build_family(&d) {
            Err(Error::Spec(msg)) => assert!(msg.contains("k >= 3"), "{msg}"),
            other => panic!("expected spec error, got {other:?}"),
        }
        let d = FamilyDescriptor { theorem: FamilyTheorem::St2, case: 1, n: 1, m: 1, k: 1, r: 2 };
        match build_family(&d) {
            Err(Error::Spec(msg)) => assert!(msg.contains("n > m"), "{msg}"),
            other => panic!("expected spec error, got {other:?}"),
        }
    }

    #[test]
    fn st1_order_law() {
        for (case, n, m, k, r) in [
            (1u8, 2u32, 1u32, 1u32, 2u32),
            (3, 1, 1, 2, 3),
            (5, 2, 1, 1, 2),
            (7, 1, 1, 1, 2),
            (9, 1, 1, 1, 4),
            (10, 2, 2, 1, 2),
        ] {
            let d = FamilyDescriptor { theorem: FamilyTheorem::St1, case, n, m, k, r };
            let spec = build_family(&d).unwrap();
            let g = build(&spec).unwrap();
            assert_eq!(
                g.order() as u64,
                1u64 << (n + m + 2 * k + r - 2),
                "ST1({case}) n={n} m={m} k={k} r={r} -> {spec}"
            );
            assert_eq!(g.derived().order(), 2, "{spec}");
        }
    }

    #[test]
    fn family_centers_match_the_a_types() {
        // ST1: centre A1 = Z_{2^n} x Z_{2^m} x Z2^{r-2}.
        let d = FamilyDescriptor { theorem: FamilyTheorem::St1, case: 9, n: 2, m: 1, k: 1, r: 3 };
        let g = build(&build_family(&d).unwrap()).unwrap();
        let (centre, _) = subgroup_as_group(&g, &g.center()).unwrap();
        assert_eq!(centre.abelian_decomposition().unwrap(), vec![4, 2, 2]);

        // ST7: centre A4 = Z_{2^(n+1)} x Z_{2^(m+1)} x Z2^(r-2).
        let d = FamilyDescriptor { theorem: FamilyTheorem::St7, case: 2, n: 1, m: 1, k: 1, r: 2 };
        let g = build(&build_family(&d).unwrap()).unwrap();
        let (centre, _) = subgroup_as_group(&g, &g.center()).unwrap();
        assert_eq!(centre.abelian_decomposition().unwrap(), vec![4, 4]);
    }

    #[test]
    fn st_family_structure_invariants() {
        for (theorem, case, n, m, k, r) in [
            (FamilyTheorem::St1, 1u8, 1u32, 1u32, 1u32, 2u32),
            (FamilyTheorem::St1, 9, 2, 1, 1, 2),
            (FamilyTheorem::St2, 7, 2, 1, 1, 2),
            (FamilyTheorem::St4, 3, 1, 1, 1, 2),
            (FamilyTheorem::St7, 1, 1, 1, 1, 2),
        ] {
            let d = FamilyDescriptor { theorem, case, n, m, k, r };
            let g = build(&build_family(&d).unwrap()).unwrap();
            assert!(g.order() <= 128);
            assert_eq!(g.derived().order(), 2);
            assert_eq!(g.derived().elements[1], g.designated_c().unwrap());
            // Squares land in the centre, so the Frattini subgroup does too.
            let frat = g.frattini();
            let centre = g.center();
            assert!(frat.elements.iter().all(|&e| centre.contains(e)));
        }
    }
}
