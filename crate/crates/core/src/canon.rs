//! Canonical labelling by colour refinement and individualisation search.
//!
//! Exactness, not speed, is the contract: the search visits every leaf of the
//! individualisation tree except those pruned by automorphisms already found,
//! so two structures receive the same code iff they are isomorphic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::embed;
use crate::error::{Error, Result};
use crate::structure::Structure;

/// Largest structure accepted by [`canonical_form`].
pub const MAX_CANON_SIZE: usize = 16;

/// Text encoding of a canonically relabelled structure.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalCode(String);

type Incidence = (usize, usize, Vec<u32>);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code({})", self.0)
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Result of a canonical labelling run.
#[derive(Debug, Clone)]
pub struct Canonization {
    pub code: CanonicalCode,
    /// `labeling[v]` is the canonical position of vertex `v`.
    pub labeling: Vec<usize>,
    /// Automorphisms discovered during the search (as vertex maps).
    pub generators: Vec<Vec<usize>>,
}

impl Canonization {
    /// The structure relabelled into canonical order.
    pub fn apply(&self, m: &Structure) -> Structure {
        let mut order = vec![0; self.labeling.len()];
        for (v, &p) in self.labeling.iter().enumerate() {
            order[p] = v;
        }
        m.restrict(&order)
    }
}

pub fn canonical_form(m: &Structure) -> Result<CanonicalCode> {
    Ok(canonize(m)?.code)
}

pub fn canonize(m: &Structure) -> Result<Canonization> {
    if m.size() > MAX_CANON_SIZE {
        return Err(Error::TooLarge {
            what: "structure for canonical form",
            size: m.size(),
            limit: MAX_CANON_SIZE,
        });
    }
    Ok(canonize_unchecked(m))
}

/// Same as [`canonize`] without the size cap; may be slow on large symmetric inputs.
pub(crate) fn canonize_unchecked(m: &Structure) -> Canonization {
    let mut search = Search::new(m);
    let n = m.size();
    let mut prefix = Vec::new();
    search.descend(vec![0; n], &mut prefix);
    let (key, labeling) = search.best.expect("search reaches a leaf");
    Canonization {
        code: CanonicalCode(render(&key, m)),
        labeling,
        generators: search.generators,
    }
}

/// Isomorphism test; uses canonical codes up to [`MAX_CANON_SIZE`] vertices and
/// an embedding search beyond.
pub fn are_isomorphic(a: &Structure, b: &Structure) -> Result<bool> {
    if !a.same_language(b) {
        return Err(Error::LanguageMismatch);
    }
    if a.size() != b.size() {
        return Ok(false);
    }
    for p in 0..a.language().len() {
        if a.relation_len(p) != b.relation_len(p) {
            return Ok(false);
        }
    }
    if a.size() <= MAX_CANON_SIZE {
        Ok(canonical_form(a)? == canonical_form(b)?)
    } else {
        embed::embeds(a, b)
    }
}

/// Orbit representative (smallest vertex) of every vertex under `Aut(m)`.
pub fn orbits(m: &Structure) -> Result<Vec<usize>> {
    let c = canonize(m)?;
    let mut uf = UnionFind::new(m.size());
    for g in &c.generators {
        for (v, &w) in g.iter().enumerate() {
            uf.union(v, w);
        }
    }
    Ok((0..m.size()).map(|v| uf.min_of(v)).collect())
}

fn render(key: &[u32], m: &Structure) -> String {
    let mut s = String::new();
    let mut it = key.iter();
    let n = it.next().copied().unwrap_or(0);
    s.push_str(&n.to_string());
    for pred in m.language().predicates() {
        let count = *it.next().unwrap_or(&0);
        s.push('|');
        for t in 0..count {
            if t > 0 {
                s.push(',');
            }
            for a in 0..pred.arity {
                if a > 0 {
                    s.push('.');
                }
                s.push_str(&it.next().unwrap().to_string());
            }
        }
    }
    s
}

struct Search<'a> {
    m: &'a Structure,
    /// All tuples, as (predicate, vertices).
    tuples: Vec<(usize, Vec<usize>)>,
    /// Per vertex: (tuple index, position in tuple).
    incidence: Vec<Vec<(usize, usize)>>,
    first: Option<(Vec<u32>, Vec<usize>)>,
    best: Option<(Vec<u32>, Vec<usize>)>,
    generators: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(m: &'a Structure) -> Self {
        let mut tuples = Vec::new();
        for p in 0..m.language().len() {
            for t in m.tuples(p) {
                tuples.push((p, t));
            }
        }
        let mut incidence = vec![Vec::new(); m.size()];
        for (i, (_, t)) in tuples.iter().enumerate() {
            for (pos, &v) in t.iter().enumerate() {
                incidence[v].push((i, pos));
            }
        }
        Search {
            m,
            tuples,
            incidence,
            first: None,
            best: None,
            generators: Vec::new(),
        }
    }

    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let n = colors.len();
        let mut classes = count_classes(&colors);
        loop {
            let mut sigs: Vec<(u32, Vec<Incidence>, usize)> = (0..n)
                .map(|v| {
                    let mut s: Vec<(usize, usize, Vec<u32>)> = self.incidence[v]
                        .iter()
                        .map(|&(ti, pos)| {
                            let (p, t) = &self.tuples[ti];
                            (*p, pos, t.iter().map(|&u| colors[u]).collect())
                        })
                        .collect();
                    s.sort_unstable();
                    (colors[v], s, v)
                })
                .collect();
            sigs.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
            let mut next = vec![0u32; n];
            let mut rank = 0u32;
            for i in 0..n {
                if i > 0 && (sigs[i].0, &sigs[i].1) != (sigs[i - 1].0, &sigs[i - 1].1) {
                    rank += 1;
                }
                next[sigs[i].2] = rank;
            }
            colors = next;
            let c = count_classes(&colors);
            if c == classes {
                return colors;
            }
            classes = c;
        }
    }

    fn descend(&mut self, colors: Vec<u32>, prefix: &mut Vec<usize>) {
        let colors = self.refine(colors);
        let n = colors.len();
        if count_classes(&colors) == n {
            self.leaf(&colors);
            return;
        }
        // Smallest non-singleton cell, ties broken by colour.
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let target = (0..n)
            .filter(|&c| sizes[c] > 1)
            .min_by_key(|&c| (sizes[c], c))
            .unwrap() as u32;
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if !tried.is_empty() {
                let mut uf = UnionFind::new(n);
                for g in &self.generators {
                    if prefix.iter().all(|&u| g[u] == u) {
                        for (a, &b) in g.iter().enumerate() {
                            uf.union(a, b);
                        }
                    }
                }
                if tried.iter().any(|&t| uf.find(t) == uf.find(v)) {
                    continue;
                }
            }
            tried.push(v);
            let ind: Vec<u32> = (0..n)
                .map(|u| 2 * colors[u] + u32::from(colors[u] == target && u != v))
                .collect();
            prefix.push(v);
            self.descend(ind, prefix);
            prefix.pop();
        }
    }

    fn leaf(&mut self, colors: &[u32]) {
        let pos: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let key = self.key(&pos);
        for (k, p) in [&self.first, &self.best].into_iter().flatten() {
            if *k == key {
                let mut inv = vec![0; pos.len()];
                for (v, &q) in p.iter().enumerate() {
                    inv[q] = v;
                }
                let g: Vec<usize> = pos.iter().map(|&q| inv[q]).collect();
                if g.iter().enumerate().any(|(a, &b)| a != b) {
                    self.generators.push(g);
                }
                break;
            }
        }
        if self.first.is_none() {
            self.first = Some((key.clone(), pos.clone()));
        }
        match &self.best {
            Some((b, _)) if *b <= key => {}
            _ => self.best = Some((key, pos)),
        }
    }

    fn key(&self, pos: &[usize]) -> Vec<u32> {
        let mut key = vec![pos.len() as u32];
        let mut per_pred: Vec<Vec<Vec<u32>>> = vec![Vec::new(); self.m.language().len()];
        for (p, t) in &self.tuples {
            per_pred[*p].push(t.iter().map(|&v| pos[v] as u32).collect());
        }
        for mut list in per_pred {
            list.sort_unstable();
            key.push(list.len() as u32);
            for t in list {
                key.extend(t);
            }
        }
        key
    }
}

fn count_classes(colors: &[u32]) -> usize {
    let mut seen: Vec<u32> = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn min_of(&mut self, x: usize) -> usize {
        self.find(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Graph;

    fn p3(order: [usize; 3]) -> Structure {
        Graph::from_edges(3, &[(order[0], order[1]), (order[1], order[2])]).to_structure()
    }

    #[test]
    fn relabeling_invariance() {
        assert_eq!(
            canonical_form(&p3([0, 1, 2])).unwrap(),
            canonical_form(&p3([1, 0, 2])).unwrap()
        );
        assert_ne!(
            canonical_form(&p3([0, 1, 2])).unwrap(),
            canonical_form(&Graph::complete(3).to_structure()).unwrap()
        );
    }

    #[test]
    fn eleven_graphs_on_four_vertices() {
        // Brute force over all 2^6 labelled graphs, dedupe by explicit permutation orbits.
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
        let perms = all_perms(4);
        let mut orbit_reps = std::collections::BTreeSet::new();
        let mut codes = std::collections::BTreeSet::new();
        for mask in 0u32..64 {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let min_mask = perms
                .iter()
                .map(|p| {
                    edges.iter().fold(0u32, |acc, &(a, b)| {
                        let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
                        acc | 1 << pairs.iter().position(|&e| e == (x, y)).unwrap()
                    })
                })
                .min()
                .unwrap();
            orbit_reps.insert(min_mask);
            codes.insert(canonical_form(&Graph::from_edges(4, &edges).to_structure()).unwrap());
        }
        assert_eq!(orbit_reps.len(), 11);
        assert_eq!(codes.len(), 11);
    }

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn symmetric_structures_finish() {
        let e16 = Graph::new(16).to_structure();
        assert_eq!(orbits(&e16).unwrap(), vec![0; 16]);
        let k16 = Graph::complete(16).to_structure();
        let c = canonize(&k16).unwrap();
        assert_eq!(c.apply(&k16), k16);
        assert!(canonical_form(&Graph::new(17).to_structure()).is_err());
    }

    #[test]
    fn complement_of_c5_is_c5() {
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(are_isomorphic(&c5.to_structure(), &c5.complement().to_structure()).unwrap());
    }
}
