//! Isomorphism-class inventories of small graphs and structures, built by
//! one-vertex augmentation.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::canon::{canonize_unchecked, CanonicalCode};
use crate::error::{Error, Result};
use crate::structure::{for_each_injective, Graph, Language, Structure};

/// Largest order served from the graph inventory.
pub const MAX_GRAPH_ORDER: usize = 9;

fn graph_cache() -> &'static Mutex<Vec<Arc<Vec<Graph>>>> {
    static CACHE: OnceLock<Mutex<Vec<Arc<Vec<Graph>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![Arc::new(vec![Graph::new(0)])]))
}

fn canonical_graph(g: &Graph) -> (CanonicalCode, Graph) {
    let c = canonize_unchecked(&g.to_structure());
    let s = c.apply(&g.to_structure());
    (c.code, s.to_graph().expect("relabelled graph"))
}

/// One canonical representative per isomorphism class of graphs on `n` vertices.
pub fn graphs_of_order(n: usize) -> Result<Arc<Vec<Graph>>> {
    if n > MAX_GRAPH_ORDER {
        return Err(Error::TooLarge {
            what: "graph order",
            size: n,
            limit: MAX_GRAPH_ORDER,
        });
    }
    let mut cache = graph_cache().lock().unwrap_or_else(|e| e.into_inner());
    while cache.len() <= n {
        let prev = cache.last().unwrap().clone();
        let m = cache.len() - 1;
        let mut next = BTreeMap::new();
        for g in prev.iter() {
            for mask in 0u32..(1 << m) {
                let mut h = Graph::new(m + 1);
                for (u, v) in g.edges() {
                    h.add_edge(u, v);
                }
                for u in 0..m {
                    if mask >> u & 1 == 1 {
                        h.add_edge(u, m);
                    }
                }
                let (code, rep) = canonical_graph(&h);
                next.entry(code).or_insert(rep);
            }
        }
        cache.push(Arc::new(next.into_values().collect()));
    }
    Ok(cache[n].clone())
}

/// All graph classes on at most `n` vertices, by increasing order.
pub fn graphs_up_to(n: usize) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(graphs_of_order(k)?.iter().cloned());
    }
    Ok(out)
}

/// One representative per isomorphism class of structures of size `n` over
/// `language`, aborting once more than `limit` classes are produced at any size.
pub fn structures_of_size(language: &Arc<Language>, n: usize, limit: usize) -> Result<Vec<Structure>> {
    let mut layer = vec![Structure::empty(language.clone(), 0)];
    for m in 0..n {
        // Tuples over 0..=m that use the new vertex m.
        let mut fresh: Vec<(usize, Vec<usize>)> = Vec::new();
        for p in 0..language.len() {
            for_each_injective(m + 1, language.arity(p), |t| {
                if t.contains(&m) {
                    fresh.push((p, t.to_vec()));
                }
            });
        }
        if fresh.len() > 24 {
            return Err(Error::TooLarge {
                what: "tuples through a new vertex",
                size: fresh.len(),
                limit: 24,
            });
        }
        let mut next = BTreeMap::new();
        for s in &layer {
            let base = s.restrict(&(0..m).collect::<Vec<_>>());
            let mut grown = Structure::empty(language.clone(), m + 1);
            for p in 0..language.len() {
                for t in base.tuples(p) {
                    grown.insert_unchecked(p, &t);
                }
            }
            for mask in 0u64..(1 << fresh.len()) {
                let mut h = grown.clone();
                for (i, (p, t)) in fresh.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        h.insert_unchecked(*p, t);
                    }
                }
                let c = canonize_unchecked(&h);
                if let std::collections::btree_map::Entry::Vacant(slot) = next.entry(c.code.clone()) {
                    slot.insert(c.apply(&h));
                    if next.len() > limit {
                        return Err(Error::Budget(limit));
                    }
                }
            }
        }
        layer = next.into_values().collect();
    }
    Ok(layer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Predicate;

    #[test]
    fn graph_counts_match_known_sequence() {
        let counts: Vec<usize> = (0..=7).map(|n| graphs_of_order(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11, 34, 156, 1044]);
    }

    #[test]
    fn general_language_counts() {
        // One binary relation: loopless digraphs.
        let lang = Arc::new(Language::new(vec![Predicate::new("R", 2)]).unwrap());
        let counts: Vec<usize> = (0..=3)
            .map(|n| structures_of_size(&lang, n, 1000).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 3, 16]);
        assert_eq!(structures_of_size(&lang, 4, 1000).unwrap().len(), 218);
    }
}
