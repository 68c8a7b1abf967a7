//! Substitution calculus: conservative and general substitutions, modules and
//! primality, modular decomposition of graphs and substitution closures.

mod closure;
mod decompose;
mod modules;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use closure::{
    closure_enumerate, closure_member, count_prime_closed_subfamilies, minimal_obstructions,
    Obstructions, DEFAULT_BUDGET,
};
pub use decompose::{modular_decomposition, DecompositionTree, NodeKind};
pub use modules::{find_modules, is_prime, prime_substructures, MAX_MODULE_SEARCH};

use crate::canon::{canonical_form, CanonicalCode};
use crate::error::{Error, Result};
use crate::structure::{for_each_injective, Language, Structure};

/// Structures up to isomorphism, keyed by canonical code.
#[derive(Debug, Clone)]
pub struct Family {
    language: Arc<Language>,
    members: BTreeMap<CanonicalCode, Structure>,
}

impl Family {
    pub fn new(language: Arc<Language>) -> Self {
        Family {
            language,
            members: BTreeMap::new(),
        }
    }

    pub fn from_structures(
        language: Arc<Language>,
        items: impl IntoIterator<Item = Structure>,
    ) -> Result<Self> {
        let mut f = Family::new(language);
        for s in items {
            f.insert(s)?;
        }
        Ok(f)
    }

    fn check(&self, s: &Structure) -> Result<()> {
        if **s.language() != *self.language {
            return Err(Error::LanguageMismatch);
        }
        Ok(())
    }

    /// Adds `s` unless an isomorphic member exists; returns whether it was new.
    pub fn insert(&mut self, s: Structure) -> Result<bool> {
        self.check(&s)?;
        let code = canonical_form(&s)?;
        Ok(self.insert_coded(code, s))
    }

    pub(crate) fn insert_coded(&mut self, code: CanonicalCode, s: Structure) -> bool {
        use std::collections::btree_map::Entry;
        match self.members.entry(code) {
            Entry::Vacant(e) => {
                e.insert(s);
                true
            }
            Entry::Occupied(_) => false,
        }
    }

    pub fn contains(&self, s: &Structure) -> Result<bool> {
        self.check(s)?;
        Ok(self.members.contains_key(&canonical_form(s)?))
    }

    pub fn contains_code(&self, code: &CanonicalCode) -> bool {
        self.members.contains_key(code)
    }

    pub fn language(&self) -> &Arc<Language> {
        &self.language
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Structure> {
        self.members.values()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&CanonicalCode, &Structure)> {
        self.members.iter()
    }

    pub fn codes(&self) -> impl Iterator<Item = &CanonicalCode> {
        self.members.keys()
    }

    pub fn max_size(&self) -> usize {
        self.iter().map(Structure::size).max().unwrap_or(0)
    }

    /// Members ordered by size, then by code.
    pub fn sorted(&self) -> Vec<&Structure> {
        let mut v: Vec<(&CanonicalCode, &Structure)> = self.members.iter().collect();
        v.sort_by(|a, b| a.1.size().cmp(&b.1.size()).then(a.0.cmp(b.0)));
        v.into_iter().map(|(_, s)| s).collect()
    }

    pub fn union(&mut self, other: &Family) -> Result<()> {
        if *other.language != *self.language {
            return Err(Error::LanguageMismatch);
        }
        for (c, s) in &other.members {
            self.members.entry(c.clone()).or_insert_with(|| s.clone());
        }
        Ok(())
    }

    pub fn is_subset(&self, other: &Family) -> bool {
        self.codes().all(|c| other.contains_code(c))
    }
}

impl PartialEq for Family {
    fn eq(&self, other: &Self) -> bool {
        *self.language == *other.language && self.members.keys().eq(other.members.keys())
    }
}

impl Eq for Family {}

impl IntoIterator for Family {
    type Item = Structure;
    type IntoIter = std::collections::btree_map::IntoValues<CanonicalCode, Structure>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.into_values()
    }
}

fn check_vertex(f: &Structure, v: usize) -> Result<()> {
    if v >= f.size() {
        return Err(Error::OutOfRangeVertex {
            vertex: v + 1,
            size: f.size(),
        });
    }
    Ok(())
}

/// Position of each vertex of `f1` (other than `v`) and of the block in the
/// result of substituting a block of size `m` at `v`.
fn layout(n1: usize, v: usize, m: usize) -> (Vec<usize>, usize) {
    let outer = (0..n1)
        .map(|u| match u.cmp(&v) {
            std::cmp::Ordering::Less => u,
            std::cmp::Ordering::Equal => usize::MAX,
            std::cmp::Ordering::Greater => u + m - 1,
        })
        .collect();
    (outer, v)
}

/// `F1^{v -> F2}` with the smallest relation sets. The block of `f2` takes the
/// positions `v..v+|F2|`; the other vertices keep their relative order.
pub fn substitute_conservative(f1: &Structure, v: usize, f2: &Structure) -> Result<Structure> {
    if !f1.same_language(f2) {
        return Err(Error::LanguageMismatch);
    }
    check_vertex(f1, v)?;
    let m = f2.size();
    let (outer, start) = layout(f1.size(), v, m);
    let mut out = Structure::empty(f1.language().clone(), f1.size() + m - 1);
    for p in 0..f1.language().len() {
        for t in f2.tuples(p) {
            let img: Vec<usize> = t.iter().map(|&x| start + x).collect();
            out.insert_unchecked(p, &img);
        }
        for t in f1.tuples(p) {
            match t.iter().position(|&x| x == v) {
                None => {
                    let img: Vec<usize> = t.iter().map(|&x| outer[x]).collect();
                    out.insert_unchecked(p, &img);
                }
                Some(i) => {
                    let mut img: Vec<usize> = t.iter().map(|&x| outer[x]).collect();
                    for u in 0..m {
                        img[i] = start + u;
                        out.insert_unchecked(p, &img);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Lexicographic composition `Q[B_0, ..., B_{q-1}]`: vertex `i` of `q` is
/// replaced by the block `blocks[i]`, blocks laid out consecutively. Tuples
/// inside one block come from that block, tuples across pairwise distinct
/// blocks from `q`, and all other tuples are false.
pub fn compose(q: &Structure, blocks: &[&Structure]) -> Result<Structure> {
    if blocks.len() != q.size() {
        return Err(Error::BadParameter(format!(
            "{} blocks for a quotient of size {}",
            blocks.len(),
            q.size()
        )));
    }
    if blocks.iter().any(|b| !b.same_language(q)) {
        return Err(Error::LanguageMismatch);
    }
    let mut offset = Vec::with_capacity(blocks.len());
    let mut total = 0;
    for b in blocks {
        offset.push(total);
        total += b.size();
    }
    let mut out = Structure::empty(q.language().clone(), total);
    for p in 0..q.language().len() {
        for (i, b) in blocks.iter().enumerate() {
            for t in b.tuples(p) {
                let img: Vec<usize> = t.iter().map(|&x| offset[i] + x).collect();
                out.insert_unchecked(p, &img);
            }
        }
        for t in q.tuples(p) {
            let mut img = vec![0; t.len()];
            product(&t, 0, blocks, &offset, &mut img, &mut |tuple| {
                out.insert_unchecked(p, tuple)
            });
        }
    }
    Ok(out)
}

fn product(
    t: &[usize],
    i: usize,
    blocks: &[&Structure],
    offset: &[usize],
    img: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if i == t.len() {
        f(img);
        return;
    }
    for x in 0..blocks[t[i]].size() {
        img[i] = offset[t[i]] + x;
        product(t, i + 1, blocks, offset, img, f);
    }
}

/// Largest number of free tuples enumerated by [`substitutions_all`].
pub const MAX_FREE_TUPLES: usize = 20;

/// Every substitution of `v` in `f1` by `f2`, up to isomorphism. Tuples with
/// at least two block vertices and at least one outside vertex are free.
pub fn substitutions_all(f1: &Structure, v: usize, f2: &Structure) -> Result<Family> {
    let base = substitute_conservative(f1, v, f2)?;
    let m = f2.size();
    let in_block = |x: usize| x >= v && x < v + m;
    let mut free: Vec<(usize, Vec<usize>)> = Vec::new();
    for p in 0..base.language().len() {
        let k = base.language().arity(p);
        if k < 3 {
            continue;
        }
        for_each_injective(base.size(), k, |t| {
            let inside = t.iter().filter(|&&x| in_block(x)).count();
            if inside >= 2 && inside < k {
                free.push((p, t.to_vec()));
            }
        });
    }
    if free.len() > MAX_FREE_TUPLES {
        return Err(Error::TooManyFreeTuples { count: free.len() });
    }
    let mut family = Family::new(base.language().clone());
    for mask in 0u32..(1 << free.len()) {
        let mut s = base.clone();
        for (i, (p, t)) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s.insert_unchecked(*p, t);
            }
        }
        family.insert(s)?;
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::are_isomorphic;
    use crate::structure::{Graph, Predicate};
    use proptest::prelude::*;

    fn cycle(n: usize) -> Structure {
        Graph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).to_structure()
    }

    #[test]
    fn clique_substitution() {
        let k2 = Graph::complete(2).to_structure();
        let k3 = substitute_conservative(&k2, 0, &k2).unwrap();
        assert_eq!(k3, Graph::complete(3).to_structure());
    }

    #[test]
    fn trivial_blocks() {
        let c5 = cycle(5);
        let k1 = Graph::new(1).to_structure();
        let k0 = Graph::new(0).to_structure();
        for v in 0..5 {
            assert!(are_isomorphic(&substitute_conservative(&c5, v, &k1).unwrap(), &c5).unwrap());
            let minus = substitute_conservative(&c5, v, &k0).unwrap();
            assert_eq!(minus, c5.remove_vertex(v));
        }
        assert!(substitute_conservative(&c5, 5, &k1).is_err());
    }

    #[test]
    fn c4_with_independent_pair() {
        let c4 = cycle(4);
        let k2bar = Graph::new(2).to_structure();
        let s = substitute_conservative(&c4, 1, &k2bar).unwrap().to_graph().unwrap();
        // Block {1, 2} replaces vertex 1; 0 and old 2 (now 3) see both copies.
        assert_eq!(s.edges(), vec![(0, 1), (0, 2), (0, 4), (1, 3), (2, 3), (3, 4)]);
        let blocks = [&k2bar, &Graph::new(1).to_structure(), &Graph::new(1).to_structure(), &Graph::new(1).to_structure()];
        let c = compose(&c4, &blocks).unwrap();
        assert!(are_isomorphic(&c, &s.to_structure()).unwrap());
    }

    #[test]
    fn binary_substitutions_are_unique() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).to_structure();
        let fam = substitutions_all(&cycle(4), 2, &p3).unwrap();
        assert_eq!(fam.len(), 1);
        let k1 = Graph::new(1).to_structure();
        assert_eq!(substitutions_all(&p3, 0, &k1).unwrap().len(), 1);
    }

    #[test]
    fn ternary_substitutions_branch() {
        let lang = Arc::new(Language::new(vec![Predicate::new("R", 3)]).unwrap());
        let f = Structure::empty(lang.clone(), 2);
        // Result has 3 vertices, two in the block: free triples are the six
        // orderings of the whole vertex set.
        let fam = substitutions_all(&f, 0, &f).unwrap();
        let brute = {
            let mut b = Family::new(lang.clone());
            for mask in 0u32..64 {
                let mut s = Structure::empty(lang.clone(), 3);
                let mut i = 0;
                for_each_injective(3, 3, |t| {
                    if mask >> i & 1 == 1 {
                        s.insert(0, t).unwrap();
                    }
                    i += 1;
                });
                b.insert(s).unwrap();
            }
            b
        };
        assert!(fam.len() >= 2);
        assert_eq!(fam, brute);
    }

    #[test]
    fn too_many_free_tuples() {
        let lang = Arc::new(Language::new(vec![Predicate::new("R", 3)]).unwrap());
        let f = Structure::empty(lang, 3);
        assert!(matches!(
            substitutions_all(&f, 0, &f),
            Err(Error::TooManyFreeTuples { .. })
        ));
    }

    fn arb_graph(max: usize) -> impl Strategy<Value = Graph> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut g = Graph::new(n);
                let mut k = 0;
                for j in 1..n {
                    for i in 0..j {
                        if bits[k] {
                            g.add_edge(i, j);
                        }
                        k += 1;
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn size_is_additive(a in arb_graph(5), b in arb_graph(4), v in 0usize..5) {
            let v = v % a.order();
            let s = substitute_conservative(&a.to_structure(), v, &b.to_structure()).unwrap();
            prop_assert_eq!(s.size(), a.order() + b.order() - 1);
            prop_assert!(s.is_graph());
        }

        #[test]
        fn restriction_property(a in arb_graph(4), b in arb_graph(4), v in 0usize..4, keep in any::<u8>()) {
            let v = v % a.order();
            let (fa, fb) = (a.to_structure(), b.to_structure());
            let s = substitute_conservative(&fa, v, &fb).unwrap();
            let u: Vec<usize> = (0..s.size()).filter(|&x| keep >> x & 1 == 1).collect();
            let u2: Vec<usize> = u.iter().filter(|&&x| x >= v && x < v + b.order()).map(|&x| x - v).collect();
            // U1 keeps v when the block part is nonempty.
            let mut u1: Vec<usize> = u.iter().filter(|&&x| x < v || x >= v + b.order())
                .map(|&x| if x < v { x } else { x + 1 - b.order() }).collect();
            let block_nonempty = !u2.is_empty();
            if block_nonempty { u1.push(v); }
            u1.sort_unstable();
            let restricted = s.induced(&u).unwrap();
            let f1 = fa.induced(&u1).unwrap();
            let f2 = fb.induced(&u2).unwrap();
            if block_nonempty {
                let pos = u1.iter().position(|&x| x == v).unwrap();
                let fam = substitutions_all(&f1, pos, &f2).unwrap();
                prop_assert!(fam.contains(&restricted).unwrap());
            } else {
                prop_assert!(are_isomorphic(&restricted, &f1).unwrap());
            }
        }
    }
}
