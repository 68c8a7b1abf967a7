//! Substitution closures: enumeration, membership and minimal obstructions.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::{
    is_prime, modular_decomposition, prime_substructures, substitute_conservative,
    substitutions_all, Family, NodeKind,
};
use crate::canon::{canonical_form, canonize_unchecked, orbits, CanonicalCode, MAX_CANON_SIZE};
use crate::embed::embeds;
use crate::enumerate::{graphs_of_order, structures_of_size};
use crate::error::{Error, Result};
use crate::structure::{Graph, Language, Structure};

/// Default cap on the number of members produced by an enumeration.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Every induced substructure of `s` with at most `n_max` vertices, up to
/// isomorphism, obtained by deleting vertices one at a time.
fn substructures_into(s: &Structure, n_max: usize, out: &mut Family) -> Result<()> {
    if s.size() > MAX_CANON_SIZE {
        return Err(Error::TooLarge {
            what: "family member",
            size: s.size(),
            limit: MAX_CANON_SIZE,
        });
    }
    let mut level: BTreeMap<CanonicalCode, Structure> = BTreeMap::new();
    level.insert(canonical_form(s)?, s.clone());
    while !level.is_empty() {
        let mut next = BTreeMap::new();
        for (code, m) in level {
            if m.size() <= n_max {
                out.insert_coded(code, m.clone());
            }
            for v in 0..m.size() {
                let sub = m.remove_vertex(v);
                next.entry(canonize_unchecked(&sub).code).or_insert(sub);
            }
        }
        level = next;
    }
    Ok(())
}

/// Members of size at most `n_max` of the smallest family containing `p` that
/// is closed under substitutions and induced substructures.
pub fn closure_enumerate(p: &Family, n_max: usize, budget: usize) -> Result<Family> {
    let mut all = Family::new(p.language().clone());
    for s in p.iter() {
        substructures_into(s, n_max, &mut all)?;
    }
    if all.len() > budget {
        return Err(Error::Budget(budget));
    }
    let binary = p.language().is_binary();
    let mut by_size: Vec<Vec<Structure>> = vec![Vec::new(); n_max + 1];
    for s in all.iter() {
        by_size[s.size()].push(s.clone());
    }
    for k in 3..=n_max {
        let mut fresh = Vec::new();
        for a in 2..k {
            let b = k + 1 - a;
            for f1 in &by_size[a] {
                let orb = orbits(f1)?;
                for v in (0..a).filter(|&v| orb[v] == v) {
                    for f2 in &by_size[b] {
                        let results: Vec<Structure> = if binary {
                            vec![substitute_conservative(f1, v, f2)?]
                        } else {
                            substitutions_all(f1, v, f2)?.into_iter().collect()
                        };
                        for s in results {
                            let code = canonical_form(&s)?;
                            if all.insert_coded(code, s.clone()) {
                                fresh.push(s);
                                if all.len() > budget {
                                    return Err(Error::Budget(budget));
                                }
                            }
                        }
                    }
                }
            }
        }
        by_size[k].extend(fresh);
    }
    Ok(all)
}

fn describe(s: &Structure) -> String {
    match s.to_graph() {
        Ok(g) => crate::graph6::encode(&g),
        Err(_) => s.to_json(),
    }
}

/// Checks that every prime substructure of every member of `p` is a member.
fn check_prime_closed(p: &Family) -> Result<()> {
    for s in p.iter() {
        for q in prime_substructures(s, true)?.iter() {
            if !p.contains(q)? {
                return Err(Error::NotPrimeClosed(describe(q)));
            }
        }
    }
    Ok(())
}

fn graph_member(g: &Graph, p: &Family) -> Result<bool> {
    let lang = Language::graph();
    if g.order() == 0 {
        return p.contains(&Structure::empty(lang, 0));
    }
    if g.order() == 1 {
        return p.contains(&Graph::new(1).to_structure());
    }
    let tree = modular_decomposition(g)?;
    let mut verdict: Result<bool> = Ok(true);
    let max = p.max_size();
    tree.for_each_node(&mut |kind, quotient, _| {
        if !matches!(verdict, Ok(true)) {
            return;
        }
        verdict = match kind {
            NodeKind::Series => p.contains(&Graph::complete(2).to_structure()),
            NodeKind::Parallel => p.contains(&Graph::new(2).to_structure()),
            NodeKind::Prime if quotient.order() > max => Ok(false),
            NodeKind::Prime => p.contains(&quotient.to_structure()),
        };
    });
    verdict
}

/// Membership of `m` in the substitution closure of `p`, decided from the
/// prime pieces of `m`. `p` must be closed under prime substructures and the
/// language binary.
pub fn closure_member(m: &Structure, p: &Family) -> Result<bool> {
    if **m.language() != **p.language() {
        return Err(Error::LanguageMismatch);
    }
    if !p.language().is_binary() {
        return Err(Error::BadParameter(
            "closure membership is decided for binary languages only".into(),
        ));
    }
    check_prime_closed(p)?;
    if m.is_graph() {
        return graph_member(&m.to_graph()?, p);
    }
    Ok(prime_substructures(m, true)?.is_subset(p))
}

/// Minimal structures outside a family, with the primality verdict that
/// decides substitution closure.
#[derive(Debug, Clone)]
pub struct Obstructions {
    pub family: Family,
    /// Every obstruction is prime, so the family is substitution-closed up to the scanned size.
    pub all_prime: bool,
    pub scanned: usize,
}

/// Scans all structures of size at most `n_max` and returns those outside the
/// family whose one-vertex-deleted substructures all lie in its hereditary
/// part. For the graph language only simple graphs are scanned.
pub fn minimal_obstructions(
    language: &Arc<Language>,
    member: &dyn Fn(&Structure) -> bool,
    n_max: usize,
    budget: usize,
) -> Result<Obstructions> {
    let graphs = **language == *Language::graph();
    let mut family = Family::new(language.clone());
    let mut prev: HashMap<CanonicalCode, bool> = HashMap::new();
    let mut scanned = 0;
    for k in 0..=n_max {
        let universe: Vec<Structure> = if graphs {
            graphs_of_order(k)?.iter().map(Graph::to_structure).collect()
        } else {
            structures_of_size(language, k, budget)?
        };
        scanned += universe.len();
        if scanned > budget {
            return Err(Error::Budget(budget));
        }
        let mut level = HashMap::new();
        for s in universe {
            let subs_ok = (0..k).all(|v| {
                let code = canonize_unchecked(&s.remove_vertex(v)).code;
                prev.get(&code).copied().unwrap_or(false)
            });
            let inside = member(&s);
            let code = canonical_form(&s)?;
            level.insert(code.clone(), inside && subs_ok);
            if !inside && subs_ok {
                family.insert_coded(code, s);
            }
        }
        prev = level;
    }
    let mut all_prime = true;
    for s in family.iter() {
        all_prime &= is_prime(s)?;
    }
    Ok(Obstructions {
        family,
        all_prime,
        scanned,
    })
}

/// Number of subsets of `primes` closed under taking members that embed
/// (a finite count of prime-closed subfamilies).
pub fn count_prime_closed_subfamilies(primes: &Family) -> Result<u64> {
    const LIMIT: usize = 20;
    let members: Vec<&Structure> = primes.iter().collect();
    let m = members.len();
    if m > LIMIT {
        return Err(Error::TooLarge {
            what: "prime family for subfamily count",
            size: m,
            limit: LIMIT,
        });
    }
    let mut below = vec![0u32; m];
    for i in 0..m {
        for j in 0..m {
            if i != j && embeds(members[j], members[i])? {
                below[i] |= 1 << j;
            }
        }
    }
    let count = (0u32..(1 << m))
        .filter(|&s| (0..m).all(|i| s >> i & 1 == 0 || below[i] & !s == 0))
        .count();
    Ok(count as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::graphs_up_to;

    fn fam(gs: &[Graph]) -> Family {
        Family::from_structures(Language::graph(), gs.iter().map(Graph::to_structure)).unwrap()
    }

    fn base() -> Family {
        fam(&[Graph::new(0), Graph::new(1), Graph::complete(2), Graph::new(2)])
    }

    fn has_induced_p4(g: &Graph) -> bool {
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).to_structure();
        embeds(&p4, &g.to_structure()).unwrap()
    }

    #[test]
    fn cographs_up_to_four() {
        let got = closure_enumerate(&base(), 4, DEFAULT_BUDGET).unwrap();
        let oracle = fam(&graphs_up_to(4)
            .unwrap()
            .into_iter()
            .filter(|g| !has_induced_p4(g))
            .collect::<Vec<_>>());
        assert_eq!(got, oracle);
        assert_eq!(got.len(), 1 + 1 + 2 + 4 + 10);
    }

    #[test]
    fn clique_closure() {
        let p = fam(&[Graph::new(0), Graph::new(1), Graph::complete(2)]);
        let got = closure_enumerate(&p, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(got, fam(&(0..=5).map(Graph::complete).collect::<Vec<_>>()));
        let trivial = fam(&[Graph::new(0), Graph::new(1)]);
        assert_eq!(closure_enumerate(&trivial, 6, DEFAULT_BUDGET).unwrap(), trivial);
        assert!(matches!(
            closure_enumerate(&base(), 6, 10),
            Err(Error::Budget(10))
        ));
    }

    #[test]
    fn membership() {
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).to_structure();
        assert!(!closure_member(&p4, &base()).unwrap());
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).to_structure();
        let blocks = [&c4, &c4, &c4, &c4];
        let r2 = super::super::compose(&c4, &blocks).unwrap();
        assert!(closure_member(&r2, &base()).unwrap());
        assert!(closure_member(&c4, &base()).unwrap());
        let bad = fam(&[Graph::new(1), Graph::complete(2)]);
        assert!(matches!(closure_member(&c4, &bad), Err(Error::NotPrimeClosed(_))));
    }

    #[test]
    fn membership_agrees_with_enumeration() {
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let mut p = base();
        p.insert(c5.to_structure()).unwrap();
        p.insert(p4.to_structure()).unwrap();
        let closed = closure_enumerate(&p, 6, DEFAULT_BUDGET).unwrap();
        for g in graphs_up_to(6).unwrap() {
            let s = g.to_structure();
            assert_eq!(closure_member(&s, &p).unwrap(), closed.contains(&s).unwrap(), "{g:?}");
        }
    }

    #[test]
    fn obstructions() {
        let cograph = |s: &Structure| !has_induced_p4(&s.to_graph().unwrap());
        let o = minimal_obstructions(&Language::graph(), &cograph, 5, DEFAULT_BUDGET).unwrap();
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(o.family, fam(&[p4]));
        assert!(o.all_prime);

        let k3 = Graph::complete(3).to_structure();
        let triangle_free = |s: &Structure| !embeds(&k3, s).unwrap();
        let o = minimal_obstructions(&Language::graph(), &triangle_free, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(o.family, fam(&[Graph::complete(3)]));
        assert!(!o.all_prime);

        let o = minimal_obstructions(&Language::graph(), &|_| true, 5, DEFAULT_BUDGET).unwrap();
        assert!(o.family.is_empty());
    }

    #[test]
    fn subfamily_count() {
        // K_0 < K_1 < {K_2, co-K_2}: downsets are {}, {K0}, {K0,K1}, plus any
        // nonempty subset of the two edges on top.
        assert_eq!(count_prime_closed_subfamilies(&base()).unwrap(), 6);
    }
}
