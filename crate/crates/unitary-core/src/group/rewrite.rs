//! Verification of the central-product rewrite lemmas.
//!
//! Each lemma fixes an abelian group K with a distinguished subgroup N
//! (the allowed landing zone for centers) and a central involution c in N,
//! then asserts that amalgamating a factor's center into N - or the centers
//! of two factors against each other inside N - always lands in a short
//! list of isomorphism classes. The engine enumerates every c-preserving
//! embedding of the relevant centers, builds each amalgam concretely, and
//! checks it against the asserted classes; cases the lemma declares
//! impossible are checked to admit no embedding at all.

use std::collections::BTreeSet;
use std::fmt;

use super::builders::{build, product_quotient, subgroup_as_group, Atom, GroupSpec};
use super::iso::{enumerate_embeddings, is_isomorphic};
use super::{Elem, Group};
use crate::{Error, Result};

/// The rewrite lemmas covered by the verification engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteLemma {
    Cpc1,
    Cpc2,
    Cpc3,
    Cpc4,
    Cpc7,
    Ggc1,
    Ggc2,
}

impl fmt::Display for RewriteLemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RewriteLemma::Cpc1 => "CPC1",
            RewriteLemma::Cpc2 => "CPC2",
            RewriteLemma::Cpc3 => "CPC3",
            RewriteLemma::Cpc4 => "CPC4",
            RewriteLemma::Cpc7 => "CPC7",
            RewriteLemma::Ggc1 => "GGC1",
            RewriteLemma::Ggc2 => "GGC2",
        };
        write!(f, "{s}")
    }
}

/// Result of checking one lemma case against one factor instance.
#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub lemma: RewriteLemma,
    pub case: u8,
    pub setting: String,
    pub factors: String,
    pub embeddings: usize,
    /// Distinct asserted classes the amalgams matched.
    pub matched: Vec<String>,
    pub expect_impossible: bool,
}

struct Setting {
    label: String,
    k: Group,
    allowed: Vec<bool>,
    c: Elem,
}

enum Job {
    /// Amalgamate one factor's center into K (landing in N).
    Factor {
        case: u8,
        factor: GroupSpec,
        rhs: Vec<GroupSpec>,
    },
    /// Amalgamate two factors' centers against each other inside N.
    Pair {
        case: u8,
        f1: GroupSpec,
        f2: GroupSpec,
        rhs: Vec<GroupSpec>,
    },
}

/// Builds K = Z_o1 x Z_o2 and locates the two distinguished generators.
fn cyclic_pair(o1: u64, o2: u64) -> Result<(Group, Elem, Elem)> {
    let a = build(&GroupSpec::Atom(Atom::Z(o1)))?;
    let b = build(&GroupSpec::Atom(Atom::Z(o2)))?;
    let ga = (0..a.order() as Elem)
        .find(|&e| a.element_order(e) == o1)
        .expect("cyclic group has a generator");
    let gb = (0..b.order() as Elem)
        .find(|&e| b.element_order(e) == o2)
        .expect("cyclic group has a generator");
    let (k, classes) = product_quotient(&a, &b, &[(0, 0)])?;
    let z1 = classes[ga as usize * b.order()];
    let z2 = classes[gb as usize];
    Ok((k, z1, z2))
}

fn mark(k: &Group, gens: &[Elem]) -> Vec<bool> {
    let sub = k.closure(gens);
    let mut allowed = vec![false; k.order()];
    for &e in &sub.elements {
        allowed[e as usize] = true;
    }
    allowed
}

fn settings(lemma: RewriteLemma, n: u32, m: u32) -> Result<Vec<Setting>> {
    use RewriteLemma::*;
    let mut out = Vec::new();
    match lemma {
        Cpc1 | Ggc1 => {
            let (k, z1, _) = cyclic_pair(1 << n, 1 << m)?;
            let c = k.pow(z1, 1 << (n - 1));
            let allowed = vec![true; k.order()];
            out.push(Setting { label: format!("N=Z{}xZ{}, c in <z1>", 1u64 << n, 1u64 << m), k, allowed, c });
        }
        Cpc2 | Ggc2 => {
            let (k, _, z2) = cyclic_pair(1 << n, 1 << m)?;
            let c = k.pow(z2, 1 << (m - 1));
            let allowed = vec![true; k.order()];
            out.push(Setting { label: format!("N=Z{}xZ{}, c in <z2>", 1u64 << n, 1u64 << m), k, allowed, c });
        }
        Cpc3 | Cpc4 => {
            let (k, z1, z2) = cyclic_pair(1 << (n + 1), 1 << m)?;
            let allowed = mark(&k, &[k.mul(z1, z1), z2]);
            let c = if lemma == Cpc3 {
                k.pow(z1, 1 << n)
            } else {
                k.pow(z2, 1 << (m - 1))
            };
            out.push(Setting {
                label: format!(
                    "K=Z{}xZ{}, N=<z1^2>x<z2>, c in <{}>",
                    1u64 << (n + 1),
                    1u64 << m,
                    if lemma == Cpc3 { "z1" } else { "z2" }
                ),
                k,
                allowed,
                c,
            });
        }
        Cpc7 => {
            for first in [true, false] {
                let (k, z1, z2) = cyclic_pair(1 << (n + 1), 1 << (m + 1))?;
                let allowed = mark(&k, &[k.mul(z1, z1), k.mul(z2, z2)]);
                let c = if first { k.pow(z1, 1 << n) } else { k.pow(z2, 1 << m) };
                out.push(Setting {
                    label: format!(
                        "K=Z{}xZ{}, N=<z1^2>x<z2^2>, c={}",
                        1u64 << (n + 1),
                        1u64 << (m + 1),
                        if first { "z1-involution" } else { "z2-involution" }
                    ),
                    k,
                    allowed,
                    c,
                });
            }
        }
    }
    Ok(out)
}

fn jobs(lemma: RewriteLemma, n: u32, m: u32, setting_idx: usize) -> Result<Vec<Job>> {
    use RewriteLemma::*;
    let m2 = |u: u32, v: u32| GroupSpec::Atom(Atom::M2(u, v));
    let m2s = |a: u32, b: u32| GroupSpec::Atom(Atom::M2Star(a, b));
    let z = |o: u64| GroupSpec::Atom(Atom::Z(o));
    let d8 = || GroupSpec::Atom(Atom::D8);
    let q8 = || GroupSpec::Atom(Atom::Q8);
    let cp = GroupSpec::central;
    let dp = GroupSpec::direct;
    let pw = |e: u32| 1u64 << e;
    let mut out = Vec::new();
    let mut factor = |case: u8, factor: GroupSpec, rhs: Vec<GroupSpec>| {
        out.push(Job::Factor { case, factor, rhs });
    };
    match lemma {
        Cpc1 => {
            factor(1, m2(n + 1, m + 1), vec![m2(n + 1, m + 1)]);
            if n > m {
                factor(1, m2(m + 1, n + 1), vec![]);
            }
            for v in 1..=m {
                factor(2, m2(n + 1, v), vec![dp(m2(n + 1, 1), z(pw(m)))]);
            }
            factor(2, m2(n + 1, m + 2), vec![]);
            if n == m {
                for u in 2..=m {
                    factor(3, m2(u, m + 1), vec![cp(m2s(m + 1, 1), z(pw(m)))]);
                }
            } else {
                for u in 2..=m + 1 {
                    factor(3, m2(u, n + 1), vec![]);
                }
            }
            let rhs4 = vec![
                cp(m2s(m + 1, 1), z(pw(n))),
                dp(cp(d8(), z(pw(n))), z(pw(m))),
            ];
            for u in 2..=n {
                for v in 1..=n {
                    factor(4, m2(u, v), rhs4.clone());
                }
            }
            if n == m {
                factor(5, m2s(n + 1, 1), vec![cp(m2s(m + 1, 1), z(pw(m)))]);
            } else {
                factor(5, m2s(n + 1, 1), vec![]);
            }
            for w in 1..=n {
                factor(6, m2s(w, 1), rhs4.clone());
            }
        }
        Cpc2 => {
            factor(1, m2(m + 1, n + 1), vec![m2(m + 1, n + 1)]);
            if n > m {
                factor(1, m2(n + 1, m + 1), vec![]);
            }
            if n == m {
                for v in 1..=m {
                    factor(2, m2(m + 1, v), vec![dp(m2(m + 1, 1), z(pw(m)))]);
                }
            } else {
                for v in 1..=m + 1 {
                    factor(2, m2(n + 1, v), vec![]);
                }
            }
            for u in 2..=m {
                factor(3, m2(u, n + 1), vec![cp(m2s(n + 1, 1), z(pw(m)))]);
            }
            let rhs4 = if m == 1 {
                vec![dp(d8(), z(pw(n))), dp(q8(), z(pw(n)))]
            } else {
                vec![
                    dp(m2(m + 1, 1), z(pw(n))),
                    dp(cp(d8(), z(pw(m))), z(pw(n))),
                ]
            };
            for u in 2..=n {
                for v in 1..=n {
                    factor(4, m2(u, v), rhs4.clone());
                }
            }
            factor(5, m2s(n + 1, 1), vec![cp(m2s(n + 1, 1), z(pw(m)))]);
            let rhs6 = vec![
                dp(m2(m + 1, 1), z(pw(n))),
                dp(cp(d8(), z(pw(m))), z(pw(n))),
            ];
            for w in 1..=n {
                factor(6, m2s(w, 1), rhs6.clone());
            }
        }
        Cpc3 => {
            let rhs1 = vec![
                cp(m2s(m + 1, 1), z(pw(n + 1))),
                dp(cp(d8(), z(pw(n + 1))), z(pw(m))),
            ];
            for v in 1..=m + 1 {
                factor(1, m2(n + 1, v), rhs1.clone());
            }
            factor(1, m2(n + 1, m + 2), vec![]);
            if n == m {
                for u in 2..=m {
                    factor(2, m2(u, m + 1), vec![cp(m2s(m + 1, 1), z(pw(m + 1)))]);
                }
            } else {
                for u in 2..=m + 1 {
                    factor(2, m2(u, n + 1), vec![]);
                }
            }
            for u in 2..=n {
                for v in 1..=n {
                    factor(3, m2(u, v), rhs1.clone());
                }
            }
            let w_top = if n > m { n } else { m + 1 };
            for w in 1..=w_top {
                factor(4, m2s(w, 1), rhs1.clone());
            }
            if n > m {
                factor(4, m2s(n + 1, 1), vec![]);
            }
        }
        Cpc4 => {
            let rhs1 = if m == 1 {
                vec![dp(d8(), z(pw(n + 1))), dp(q8(), z(pw(n + 1)))]
            } else {
                vec![
                    dp(m2(m + 1, 1), z(pw(n + 1))),
                    dp(cp(d8(), z(pw(m))), z(pw(n + 1))),
                ]
            };
            for u in 2..=m + 1 {
                factor(1, m2(u, n + 1), rhs1.clone());
            }
            factor(1, m2(m + 2, n + 1), vec![]);
            if n == m {
                for v in 1..=m {
                    factor(2, m2(m + 1, v), vec![dp(m2(m + 1, 1), z(pw(m + 1)))]);
                }
            } else {
                for v in 1..=m + 1 {
                    factor(2, m2(n + 1, v), vec![]);
                }
            }
            for u in 2..=n {
                for v in 1..=n {
                    factor(3, m2(u, v), rhs1.clone());
                }
            }
            let rhs4 = vec![
                dp(m2(m + 1, 1), z(pw(n + 1))),
                dp(cp(d8(), z(pw(m))), z(pw(n + 1))),
            ];
            for w in 1..=n + 1 {
                factor(4, m2s(w, 1), rhs4.clone());
            }
            factor(4, m2s(n + 2, 1), vec![]);
        }
        Cpc7 => {
            // The asserted class glues the dihedral involution to c, which
            // lives in the first or second cyclic leg depending on setting.
            let legs = if setting_idx == 0 {
                dp(z(pw(n + 1)), z(pw(m + 1)))
            } else {
                dp(z(pw(m + 1)), z(pw(n + 1)))
            };
            let rhs = vec![cp(d8(), legs)];
            for u in 2..=n + 1 {
                for v in 1..=n + 1 {
                    factor(1, m2(u, v), rhs.clone());
                }
            }
            factor(1, m2(n + 2, 1), vec![]);
            for w in 1..=n + 1 {
                factor(2, m2s(w, 1), rhs.clone());
            }
            factor(2, m2s(n + 2, 1), vec![]);
        }
        Ggc1 => {
            let a = || m2(n + 1, m + 1);
            let b = || m2(n + 1, 1);
            let c_ = || m2s(m + 1, 1);
            let rhs1 = if n == 1 {
                vec![cp(m2s(2, 1), d8()), cp(m2s(2, 1), q8())]
            } else {
                vec![cp(m2s(m + 1, 1), m2(n + 1, 1))]
            };
            out.push(Job::Pair { case: 1, f1: a(), f2: a(), rhs: rhs1 });
            out.push(Job::Pair { case: 2, f1: a(), f2: b(), rhs: vec![cp(m2(n + 1, m + 1), d8())] });
            out.push(Job::Pair { case: 3, f1: a(), f2: c_(), rhs: vec![cp(m2(n + 1, m + 1), d8())] });
            out.push(Job::Pair {
                case: 4,
                f1: c_(),
                f2: c_(),
                rhs: vec![cp(m2s(m + 1, 1), d8()), cp(m2s(m + 1, 1), m2(m + 1, 1))],
            });
            out.push(Job::Pair {
                case: 5,
                f1: b(),
                f2: b(),
                rhs: vec![cp(m2(n + 1, 1), d8()), cp(m2(n + 1, 1), m2s(m + 1, 1))],
            });
        }
        Ggc2 => {
            let a = || m2(m + 1, n + 1);
            let b = || m2(m + 1, 1);
            let c_ = || m2s(n + 1, 1);
            let rhs1 = if m == 1 {
                vec![cp(m2s(n + 1, 1), d8()), cp(m2s(n + 1, 1), q8())]
            } else {
                vec![cp(m2s(n + 1, 1), m2(m + 1, 1))]
            };
            out.push(Job::Pair { case: 1, f1: a(), f2: a(), rhs: rhs1 });
            out.push(Job::Pair { case: 2, f1: a(), f2: b(), rhs: vec![cp(m2(m + 1, n + 1), d8())] });
            out.push(Job::Pair { case: 3, f1: a(), f2: c_(), rhs: vec![cp(m2(m + 1, n + 1), d8())] });
            out.push(Job::Pair {
                case: 4,
                f1: c_(),
                f2: c_(),
                rhs: vec![cp(m2s(n + 1, 1), d8()), cp(m2s(n + 1, 1), m2(m + 1, 1))],
            });
            out.push(Job::Pair { case: 5, f1: b(), f2: b(), rhs: vec![cp(m2(m + 1, 1), d8())] });
        }
    }
    Ok(out)
}

/// The extracted center of a factor: the standalone group, the new-to-old
/// index map, and the position of the factor's designated c inside it.
fn center_piece(g: &Group) -> Result<(Group, Vec<Elem>, Elem)> {
    let center = g.center();
    let (zgrp, new_to_old) = subgroup_as_group(g, &center)?;
    let c = g
        .designated_c()
        .ok_or_else(|| Error::Domain("factor lacks a designated involution".into()))?;
    let c_new = new_to_old
        .iter()
        .position(|&e| e == c)
        .ok_or_else(|| Error::Domain("designated involution is not central".into()))?;
    Ok((zgrp, new_to_old, c_new as Elem))
}

/// Matches an amalgam against the asserted classes, with a cache of
/// previously classified representatives to avoid repeated searches.
fn classify(
    amalgam: Group,
    rhs: &[(Group, String)],
    reps: &mut Vec<(Group, Option<usize>)>,
) -> Result<Option<String>> {
    for (rep, verdict) in reps.iter() {
        if is_isomorphic(&amalgam, rep)? {
            return Ok(verdict.map(|j| rhs[j].1.clone()));
        }
    }
    let mut verdict = None;
    for (j, (rg, _)) in rhs.iter().enumerate() {
        if is_isomorphic(&amalgam, rg)? {
            verdict = Some(j);
            break;
        }
    }
    let name = verdict.map(|j| rhs[j].1.clone());
    reps.push((amalgam, verdict));
    Ok(name)
}

fn run_job(lemma: RewriteLemma, n: u32, m: u32, setting: &Setting, job: &Job) -> Result<CaseOutcome> {
    let (case, rhs_specs, factors_label) = match job {
        Job::Factor { case, factor, rhs } => (*case, rhs, factor.to_string()),
        Job::Pair { case, f1, f2, rhs } => (*case, rhs, format!("{f1} | {f2}")),
    };
    let rhs: Vec<(Group, String)> = rhs_specs
        .iter()
        .map(|s| Ok((build(s)?, s.to_string())))
        .collect::<Result<_>>()?;
    let context = |detail: String| {
        Error::Domain(format!(
            "{lemma} case {case} at n={n}, m={m} [{}] with {factors_label}: {detail}",
            setting.label
        ))
    };
    let mut matched = BTreeSet::new();
    let mut reps: Vec<(Group, Option<usize>)> = Vec::new();
    let embeddings = match job {
        Job::Factor { factor, .. } => {
            let gi = build(factor)?;
            let (zgrp, new_to_old, c_new) = center_piece(&gi)?;
            let embeddings =
                enumerate_embeddings(&zgrp, &setting.k, &setting.allowed, &[(c_new, setting.c)]);
            if rhs.is_empty() && !embeddings.is_empty() {
                return Err(context(format!(
                    "expected no c-preserving embeddings, found {}",
                    embeddings.len()
                )));
            }
            for phi in &embeddings {
                let u: Vec<(Elem, Elem)> = (0..zgrp.order())
                    .map(|i| (new_to_old[i], setting.k.inverse(phi[i])))
                    .collect();
                let (amalgam, _) = product_quotient(&gi, &setting.k, &u)?;
                match classify(amalgam, &rhs, &mut reps)? {
                    Some(name) => {
                        matched.insert(name);
                    }
                    None => return Err(context("amalgam matches no asserted class".into())),
                }
            }
            embeddings.len()
        }
        Job::Pair { f1, f2, .. } => {
            let g1 = build(f1)?;
            let g2 = build(f2)?;
            let (z1grp, old1, c1) = center_piece(&g1)?;
            let (z2grp, old2, c2) = center_piece(&g2)?;
            let e1 = enumerate_embeddings(&z1grp, &setting.k, &setting.allowed, &[(c1, setting.c)]);
            let e2 = enumerate_embeddings(&z2grp, &setting.k, &setting.allowed, &[(c2, setting.c)]);
            for phi1 in &e1 {
                let mut pre1 = vec![Elem::MAX; setting.k.order()];
                for i in 0..z1grp.order() {
                    pre1[phi1[i] as usize] = old1[i];
                }
                for phi2 in &e2 {
                    let mut u = Vec::new();
                    for i in 0..z2grp.order() {
                        let v = setting.k.inverse(phi2[i]);
                        if pre1[v as usize] != Elem::MAX {
                            u.push((pre1[v as usize], old2[i]));
                        }
                    }
                    let (amalgam, _) = product_quotient(&g1, &g2, &u)?;
                    match classify(amalgam, &rhs, &mut reps)? {
                        Some(name) => {
                            matched.insert(name);
                        }
                        None => {
                            return Err(context("amalgam matches no asserted class".into()));
                        }
                    }
                }
            }
            e1.len() * e2.len()
        }
    };
    Ok(CaseOutcome {
        lemma,
        case,
        setting: setting.label.clone(),
        factors: factors_label,
        embeddings,
        matched: matched.into_iter().collect(),
        expect_impossible: rhs.is_empty(),
    })
}

/// Checks every case of a rewrite lemma at parameters (n, m). Returns the
/// per-case outcomes, or an error describing the first violation.
pub fn verify_rewrite_lemma(lemma: RewriteLemma, n: u32, m: u32) -> Result<Vec<CaseOutcome>> {
    if m < 1 {
        return Err(Error::Spec(format!("{lemma} requires m >= 1")));
    }
    if lemma == RewriteLemma::Ggc2 {
        if n <= m {
            return Err(Error::Spec(format!("{lemma} requires n > m")));
        }
    } else if n < m {
        return Err(Error::Spec(format!("{lemma} requires n >= m")));
    }
    let sets = settings(lemma, n, m)?;
    let mut out = Vec::new();
    for (idx, s) in sets.iter().enumerate() {
        for j in &jobs(lemma, n, m, idx)? {
            out.push(run_job(lemma, n, m, s, j)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cpc1_holds_at_the_base_tuple() {
        let outcomes = verify_rewrite_lemma(RewriteLemma::Cpc1, 1, 1).unwrap();
        assert!(outcomes.iter().any(|o| o.embeddings > 0 && !o.matched.is_empty()));
        // Case (i): M2(2,2) amalgamated with its own center is itself.
        let self_case = outcomes
            .iter()
            .find(|o| o.case == 1 && o.factors == "M2(2,2)")
            .unwrap();
        assert_eq!(self_case.matched, vec!["M2(2,2)".to_string()]);
    }

    #[test]
    fn cpc1_impossibility_probes_fire() {
        let outcomes = verify_rewrite_lemma(RewriteLemma::Cpc1, 2, 1).unwrap();
        let probes: Vec<_> = outcomes.iter().filter(|o| o.expect_impossible).collect();
        assert!(!probes.is_empty());
        assert!(probes.iter().all(|o| o.embeddings == 0));
        // n > m: M2(m+1, n+1) admits no c-preserving center embedding.
        assert!(probes.iter().any(|o| o.factors == "M2(2,3)"));
    }

    #[test]
    fn ggc1_base_tuple_realizes_both_classes() {
        let outcomes = verify_rewrite_lemma(RewriteLemma::Ggc1, 1, 1).unwrap();
        let case1 = outcomes.iter().find(|o| o.case == 1).unwrap();
        assert_eq!(case1.embeddings, 4);
        // Both the D8 and the Q8 variants occur among the four amalgams.
        assert_eq!(
            case1.matched,
            vec!["M2(2,1,1) . D8".to_string(), "M2(2,1,1) . Q8".to_string()]
        );
    }

    #[test]
    fn ggc2_rejects_degenerate_parameters() {
        assert!(matches!(
            verify_rewrite_lemma(RewriteLemma::Ggc2, 1, 1),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn cpc7_checks_both_involution_settings() {
        let outcomes = verify_rewrite_lemma(RewriteLemma::Cpc7, 1, 1).unwrap();
        let labels: BTreeSet<_> = outcomes.iter().map(|o| o.setting.clone()).collect();
        assert_eq!(labels.len(), 2);
        assert!(outcomes.iter().any(|o| o.embeddings > 0));
    }
}
