//! Modules of relational structures and primality.

use fixedbitset::FixedBitSet;

use super::{modular_decomposition, DecompositionTree, Family, NodeKind};
use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::structure::{for_each_injective, Structure};

/// Largest structure for which modules are found by subset search.
pub const MAX_MODULE_SEARCH: usize = 12;

fn too_large(n: usize) -> Error {
    Error::TooLarge {
        what: "structure for module search",
        size: n,
        limit: MAX_MODULE_SEARCH,
    }
}

/// Whether `u` (a bitmask over the vertices) is a module: every tuple with
/// exactly one coordinate in `u` keeps its truth value while that coordinate
/// ranges over `u`.
fn is_module(m: &Structure, u: u32) -> bool {
    let n = m.size();
    let members: Vec<usize> = (0..n).filter(|&x| u >> x & 1 == 1).collect();
    let outside: Vec<usize> = (0..n).filter(|&x| u >> x & 1 == 0).collect();
    let first = members[0];
    for p in 0..m.language().len() {
        let k = m.language().arity(p);
        let mut ok = true;
        for_each_injective(outside.len(), k - 1, |rest| {
            if !ok {
                return;
            }
            let others: Vec<usize> = rest.iter().map(|&i| outside[i]).collect();
            for pos in 0..k {
                let mut t = Vec::with_capacity(k);
                t.extend_from_slice(&others[..pos]);
                t.push(first);
                t.extend_from_slice(&others[pos..]);
                let want = m.holds(p, &t);
                for &w in &members[1..] {
                    t[pos] = w;
                    if m.holds(p, &t) != want {
                        ok = false;
                        return;
                    }
                }
            }
        });
        if !ok {
            return false;
        }
    }
    true
}

/// All modules `U` with `2 <= |U| < |M|`, as sorted vertex lists.
pub fn find_modules(m: &Structure) -> Result<Vec<Vec<usize>>> {
    let n = m.size();
    if n > MAX_MODULE_SEARCH {
        return Err(too_large(n));
    }
    let mut out = Vec::new();
    for u in 1u32..(1 << n) {
        let c = u.count_ones() as usize;
        if c >= 2 && c < n && is_module(m, u) {
            out.push((0..n).filter(|&x| u >> x & 1 == 1).collect());
        }
    }
    Ok(out)
}

/// Smallest module of a structure with only binary (or unary) relations that
/// contains `seed`, by repeatedly absorbing splitters.
pub(crate) fn binary_module_closure(m: &Structure, seed: &FixedBitSet) -> FixedBitSet {
    let n = m.size();
    let mut set = seed.clone();
    loop {
        let rep = set.ones().next().expect("nonempty seed");
        let mut grew = false;
        for z in 0..n {
            if set.contains(z) {
                continue;
            }
            let splits = set.ones().any(|x| {
                (0..m.language().len()).any(|p| match m.language().arity(p) {
                    1 => m.holds(p, &[x]) != m.holds(p, &[rep]),
                    _ => {
                        m.holds(p, &[x, z]) != m.holds(p, &[rep, z])
                            || m.holds(p, &[z, x]) != m.holds(p, &[z, rep])
                    }
                })
            });
            if splits {
                set.insert(z);
                grew = true;
            }
        }
        if !grew {
            return set;
        }
    }
}

/// Prime: size at most 2, or no module of size `2..|M|`.
pub fn is_prime(m: &Structure) -> Result<bool> {
    let n = m.size();
    if n <= 2 {
        return Ok(true);
    }
    if m.is_graph() {
        let tree = modular_decomposition(&m.to_graph()?)?;
        return Ok(match &tree {
            DecompositionTree::Node { kind, children, .. } => {
                *kind == NodeKind::Prime && children.len() == n
            }
            DecompositionTree::Leaf(_) => true,
        });
    }
    if m.language().max_arity() <= 2 {
        for a in 0..n {
            for b in a + 1..n {
                let mut seed = FixedBitSet::with_capacity(n);
                seed.insert(a);
                seed.insert(b);
                if binary_module_closure(m, &seed).count_ones(..) < n {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    if n > MAX_MODULE_SEARCH {
        return Err(too_large(n));
    }
    Ok((1u32..(1 << n)).all(|u| {
        let c = u.count_ones() as usize;
        !(c >= 2 && c < n && is_module(m, u))
    }))
}

/// Prime induced substructures up to isomorphism; sizes at most 2 only when
/// `include_small`.
pub fn prime_substructures(m: &Structure, include_small: bool) -> Result<Family> {
    let n = m.size();
    if n > MAX_MODULE_SEARCH {
        return Err(too_large(n));
    }
    let mut fam = Family::new(m.language().clone());
    let mut seen = std::collections::BTreeSet::new();
    for u in 0u32..(1 << n) {
        let c = u.count_ones() as usize;
        if c <= 2 && !include_small {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|&x| u >> x & 1 == 1).collect();
        let s = m.restrict(&verts);
        let code = canonical_form(&s)?;
        if seen.insert(code.clone()) && is_prime(&s)? {
            fam.insert_coded(code, s);
        }
    }
    Ok(fam)
}
