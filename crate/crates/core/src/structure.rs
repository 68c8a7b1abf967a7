//! Finite canonical relational structures and simple graphs.
//!
//! Vertices are indexed `0..n` inside the library. The JSON format and the
//! command line use the 1-based numbering `1..=n`; [`RawStructure`] performs
//! the translation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Predicate {
            name: name.into(),
            arity,
        }
    }
}

/// An ordered list of predicate symbols with their arities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Language {
    predicates: Vec<Predicate>,
}

impl Language {
    pub fn new(predicates: Vec<Predicate>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &predicates {
            if p.arity == 0 {
                return Err(Error::InvalidLanguage(format!(
                    "predicate `{}` has arity 0",
                    p.name
                )));
            }
            if p.name.is_empty() || !p.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::InvalidLanguage(format!(
                    "bad predicate name `{}`",
                    p.name
                )));
            }
            if !seen.insert(p.name.clone()) {
                return Err(Error::InvalidLanguage(format!(
                    "duplicate predicate `{}`",
                    p.name
                )));
            }
        }
        Ok(Language { predicates })
    }

    /// The language of graphs: one binary predicate `E`.
    pub fn graph() -> Arc<Language> {
        static GRAPH: OnceLock<Arc<Language>> = OnceLock::new();
        GRAPH
            .get_or_init(|| {
                Arc::new(Language {
                    predicates: vec![Predicate::new("E", 2)],
                })
            })
            .clone()
    }

    /// Two binary orders `L1`, `L2`, the language of permutations.
    pub fn permutation() -> Arc<Language> {
        static PERM: OnceLock<Arc<Language>> = OnceLock::new();
        PERM.get_or_init(|| {
            Arc::new(Language {
                predicates: vec![Predicate::new("L1", 2), Predicate::new("L2", 2)],
            })
        })
        .clone()
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }

    pub fn arity(&self, p: usize) -> usize {
        self.predicates[p].arity
    }

    pub fn max_arity(&self) -> usize {
        self.predicates.iter().map(|p| p.arity).max().unwrap_or(0)
    }

    /// All arities at most two, where every substitution is conservative.
    pub fn is_binary(&self) -> bool {
        self.max_arity() <= 2
    }
}

/// Calls `f` on every injective `k`-tuple over `0..n` in lexicographic order.
pub fn for_each_injective(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(n: usize, k: usize, buf: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(&[usize])) {
        if buf.len() == k {
            f(buf);
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                buf.push(v);
                rec(n, k, buf, used, f);
                buf.pop();
                used[v] = false;
            }
        }
    }
    if k > n {
        return;
    }
    let mut used = vec![false; n];
    rec(n, k, &mut Vec::with_capacity(k), &mut used, &mut f);
}

pub(crate) fn is_injective(t: &[usize]) -> bool {
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            if t[i] == t[j] {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Relation {
    /// Dense storage for arity two, kept as out- and in-rows.
    Binary {
        out: Vec<FixedBitSet>,
        inn: Vec<FixedBitSet>,
    },
    General {
        arity: usize,
        tuples: BTreeSet<Vec<usize>>,
    },
}

impl Relation {
    fn empty(arity: usize, n: usize) -> Self {
        if arity == 2 {
            Relation::Binary {
                out: vec![FixedBitSet::with_capacity(n); n],
                inn: vec![FixedBitSet::with_capacity(n); n],
            }
        } else {
            Relation::General {
                arity,
                tuples: BTreeSet::new(),
            }
        }
    }

    fn contains(&self, t: &[usize]) -> bool {
        match self {
            Relation::Binary { out, .. } => t[0] != t[1] && out[t[0]].contains(t[1]),
            Relation::General { tuples, .. } => tuples.contains(t),
        }
    }

    fn insert(&mut self, t: &[usize]) {
        match self {
            Relation::Binary { out, inn } => {
                out[t[0]].insert(t[1]);
                inn[t[1]].insert(t[0]);
            }
            Relation::General { tuples, .. } => {
                tuples.insert(t.to_vec());
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            Relation::Binary { out, .. } => out.iter().map(|r| r.count_ones(..)).sum(),
            Relation::General { tuples, .. } => tuples.len(),
        }
    }

    fn tuples(&self) -> Vec<Vec<usize>> {
        match self {
            Relation::Binary { out, .. } => {
                let mut v = Vec::new();
                for (i, row) in out.iter().enumerate() {
                    for j in row.ones() {
                        v.push(vec![i, j]);
                    }
                }
                v
            }
            Relation::General { tuples, .. } => tuples.iter().cloned().collect(),
        }
    }
}

/// A finite canonical structure: every relation holds only on injective tuples.
#[derive(Clone)]
pub struct Structure {
    language: Arc<Language>,
    size: usize,
    relations: Vec<Relation>,
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && *self.language == *other.language
            && self.relations == other.relations
    }
}

impl Eq for Structure {}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Structure");
        d.field("size", &self.size);
        for (i, p) in self.language.predicates().iter().enumerate() {
            d.field(&p.name, &self.relations[i].tuples());
        }
        d.finish()
    }
}

impl Structure {
    pub fn empty(language: Arc<Language>, size: usize) -> Self {
        let relations = language
            .predicates()
            .iter()
            .map(|p| Relation::empty(p.arity, size))
            .collect();
        Structure {
            language,
            size,
            relations,
        }
    }

    /// Builds a structure from 0-based tuples, one list per predicate.
    pub fn from_tuples(
        language: Arc<Language>,
        size: usize,
        tuples: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if tuples.len() != language.len() {
            return Err(Error::InvalidLanguage(format!(
                "expected {} relations, got {}",
                language.len(),
                tuples.len()
            )));
        }
        let mut s = Structure::empty(language, size);
        for (p, list) in tuples.into_iter().enumerate() {
            for t in list {
                s.check_tuple(p, &t)?;
                s.relations[p].insert(&t);
            }
        }
        Ok(s)
    }

    fn check_tuple(&self, p: usize, t: &[usize]) -> Result<()> {
        let pred = &self.language.predicates()[p];
        if t.len() != pred.arity {
            return Err(Error::Arity {
                predicate: pred.name.clone(),
                expected: pred.arity,
                found: t.len(),
            });
        }
        if let Some(&v) = t.iter().find(|&&v| v >= self.size) {
            return Err(Error::OutOfRangeVertex {
                vertex: v + 1,
                size: self.size,
            });
        }
        if !is_injective(t) {
            return Err(Error::NonInjectiveTuple {
                predicate: pred.name.clone(),
                tuple: t.iter().map(|v| v + 1).collect(),
            });
        }
        Ok(())
    }

    /// Inserts a tuple that the caller guarantees is injective and in range.
    pub(crate) fn insert_unchecked(&mut self, p: usize, t: &[usize]) {
        debug_assert!(self.check_tuple(p, t).is_ok(), "bad tuple {t:?}");
        self.relations[p].insert(t);
    }

    pub fn insert(&mut self, p: usize, t: &[usize]) -> Result<()> {
        self.check_tuple(p, t)?;
        self.relations[p].insert(t);
        Ok(())
    }

    pub fn language(&self) -> &Arc<Language> {
        &self.language
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn same_language(&self, other: &Structure) -> bool {
        Arc::ptr_eq(&self.language, &other.language) || *self.language == *other.language
    }

    /// Truth of `P(t)`; false on non-injective tuples.
    pub fn holds(&self, p: usize, t: &[usize]) -> bool {
        self.relations[p].contains(t)
    }

    pub fn tuples(&self, p: usize) -> Vec<Vec<usize>> {
        self.relations[p].tuples()
    }

    pub fn relation_len(&self, p: usize) -> usize {
        self.relations[p].len()
    }

    /// Out-neighbourhood row of a binary predicate.
    pub(crate) fn binary_rows(&self, p: usize) -> Option<(&[FixedBitSet], &[FixedBitSet])> {
        match &self.relations[p] {
            Relation::Binary { out, inn } => Some((out, inn)),
            Relation::General { .. } => None,
        }
    }

    /// Substructure on `vertices`, relabelled in the given order.
    pub fn restrict(&self, vertices: &[usize]) -> Structure {
        let mut pos = vec![usize::MAX; self.size];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let mut s = Structure::empty(self.language.clone(), vertices.len());
        for (p, rel) in self.relations.iter().enumerate() {
            match rel {
                Relation::Binary { out, .. } => {
                    for (i, &v) in vertices.iter().enumerate() {
                        for (j, &w) in vertices.iter().enumerate() {
                            if out[v].contains(w) {
                                s.relations[p].insert(&[i, j]);
                            }
                        }
                    }
                }
                Relation::General { tuples, .. } => {
                    for t in tuples {
                        if t.iter().all(|&v| pos[v] != usize::MAX) {
                            let m: Vec<usize> = t.iter().map(|&v| pos[v]).collect();
                            s.relations[p].insert(&m);
                        }
                    }
                }
            }
        }
        s
    }

    /// Induced substructure on the set `vertices`, relabelled order-preservingly.
    pub fn induced(&self, vertices: &[usize]) -> Result<Structure> {
        let mut u: Vec<usize> = vertices.to_vec();
        u.sort_unstable();
        u.dedup();
        if let Some(&v) = u.iter().find(|&&v| v >= self.size) {
            return Err(Error::OutOfRangeVertex {
                vertex: v + 1,
                size: self.size,
            });
        }
        Ok(self.restrict(&u))
    }

    pub fn remove_vertex(&self, v: usize) -> Structure {
        let keep: Vec<usize> = (0..self.size).filter(|&u| u != v).collect();
        self.restrict(&keep)
    }

    /// Complementary canonical structure: every predicate flipped on injective tuples.
    pub fn complement(&self) -> Structure {
        let mut s = Structure::empty(self.language.clone(), self.size);
        for (p, pred) in self.language.predicates().iter().enumerate() {
            for_each_injective(self.size, pred.arity, |t| {
                if !self.holds(p, t) {
                    s.relations[p].insert(t);
                }
            });
        }
        s
    }

    /// Graph view when the language is a single symmetric binary predicate.
    pub fn is_graph(&self) -> bool {
        self.language.len() == 1
            && self.language.arity(0) == 2
            && match &self.relations[0] {
                Relation::Binary { out, inn } => out == inn,
                Relation::General { .. } => false,
            }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        Graph::from_structure(self)
    }

    pub fn to_raw(&self) -> RawStructure {
        RawStructure {
            language: self.language.predicates().to_vec(),
            size: self.size,
            relations: self
                .language
                .predicates()
                .iter()
                .enumerate()
                .map(|(p, pred)| {
                    let ts = self
                        .tuples(p)
                        .into_iter()
                        .map(|t| t.into_iter().map(|v| v + 1).collect())
                        .collect();
                    (pred.name.clone(), ts)
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("structure serializes")
    }
}

/// The JSON shape of a structure, with 1-based vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawStructure {
    pub language: Vec<Predicate>,
    pub size: usize,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
}

/// Checks a candidate structure and converts it to 0-based storage.
pub fn validate_structure(raw: &RawStructure) -> Result<Structure> {
    let language = Arc::new(Language::new(raw.language.clone())?);
    let language = if *language == *Language::graph() {
        Language::graph()
    } else if *language == *Language::permutation() {
        Language::permutation()
    } else {
        language
    };
    let mut s = Structure::empty(language.clone(), raw.size);
    for (name, tuples) in &raw.relations {
        let p = language
            .index_of(name)
            .ok_or_else(|| Error::UnknownPredicate(name.clone()))?;
        for t in tuples {
            if let Some(&v) = t.iter().find(|&&v| v == 0 || v > raw.size) {
                return Err(Error::OutOfRangeVertex {
                    vertex: v,
                    size: raw.size,
                });
            }
            let t0: Vec<usize> = t.iter().map(|v| v - 1).collect();
            s.check_tuple(p, &t0)?;
            s.relations[p].insert(&t0);
        }
    }
    Ok(s)
}

pub fn structure_from_json(text: &str) -> Result<Structure> {
    let raw: RawStructure = serde_json::from_str(text)?;
    validate_structure(&raw)
}

/// A simple undirected graph with bitset adjacency rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<FixedBitSet>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}; {:?})", self.n, self.edges())
    }
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            adj: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n).complement()
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "bad edge ({u},{v})");
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].set(v, false);
        self.adj[v].set(u, false);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for u in 0..self.n {
            for v in self.adj[u].ones() {
                if u < v {
                    e.push((u, v));
                }
            }
        }
        e
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for u in 0..self.n {
            let mut row = self.adj[u].clone();
            row.toggle_range(..);
            row.set(u, false);
            g.adj[u] = row;
        }
        g
    }

    /// Induced subgraph on `vertices` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.adj[u].contains(v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn to_structure(&self) -> Structure {
        let mut s = Structure::empty(Language::graph(), self.n);
        s.relations[0] = Relation::Binary {
            out: self.adj.clone(),
            inn: self.adj.clone(),
        };
        s
    }

    pub fn from_structure(s: &Structure) -> Result<Graph> {
        if !s.is_graph() {
            return Err(Error::NotAGraph(
                "expected one symmetric binary predicate".into(),
            ));
        }
        match &s.relations[0] {
            Relation::Binary { out, .. } => Ok(Graph {
                n: s.size,
                adj: out.clone(),
            }),
            Relation::General { .. } => unreachable!(),
        }
    }
}

impl From<&Graph> for Structure {
    fn from(g: &Graph) -> Self {
        g.to_structure()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3_raw() -> RawStructure {
        serde_json::from_str(
            r#"{"language":[{"name":"E","arity":2}],"size":3,"relations":{"E":[[1,2],[2,1],[2,3],[3,2]]}}"#,
        )
        .unwrap()
    }

    #[test]
    fn validates_path() {
        let s = validate_structure(&p3_raw()).unwrap();
        let g = s.to_graph().unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(s.to_raw(), p3_raw());
    }

    #[test]
    fn rejects_loops_and_range() {
        let mut raw = p3_raw();
        raw.relations.get_mut("E").unwrap().push(vec![1, 1]);
        assert!(matches!(
            validate_structure(&raw),
            Err(Error::NonInjectiveTuple { .. })
        ));

        let raw: RawStructure = serde_json::from_str(
            r#"{"language":[{"name":"R","arity":3}],"size":3,"relations":{"R":[[1,2,4]]}}"#,
        )
        .unwrap();
        assert!(matches!(
            validate_structure(&raw),
            Err(Error::OutOfRangeVertex { vertex: 4, .. })
        ));

        let mut raw = p3_raw();
        raw.relations.insert("F".into(), vec![]);
        assert_eq!(
            validate_structure(&raw),
            Err(Error::UnknownPredicate("F".into()))
        );
    }

    #[test]
    fn induced_and_complement() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let s = p3.to_structure().induced(&[2, 0]).unwrap();
        assert_eq!(s.to_graph().unwrap(), Graph::new(2));
        assert_eq!(Graph::complete(4).complement(), Graph::new(4));
        assert!(matches!(
            p3.to_structure().induced(&[5]),
            Err(Error::OutOfRangeVertex { .. })
        ));
    }

    #[test]
    fn general_complement_is_involution() {
        let lang = Arc::new(Language::new(vec![Predicate::new("R", 3), Predicate::new("U", 1)]).unwrap());
        let s = Structure::from_tuples(lang, 4, vec![vec![vec![0, 1, 2], vec![3, 1, 0]], vec![vec![2]]]).unwrap();
        let c = s.complement();
        assert_eq!(c.relation_len(0), 24 - 2);
        assert_eq!(c.complement(), s);
    }
}
