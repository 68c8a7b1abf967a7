//! Named graph constructions, permutation agreement graphs, hereditary
//! recognisers and substructure-order reports.

mod classes;
mod perm;
mod poset;

pub use classes::{has_odd_hole, hereditary_tests, is_cograph, is_perfect, HereditaryReport, MAX_PERFECT_ORDER};
pub use perm::{agreement_graph, gen_pi, perm_structures, perm_substitute, Permutation};
pub use poset::{poset_report, PosetReport, MAX_POSET_MEMBERS, MAX_POSET_ORDER};

use num::{BigInt, BigRational, One};

use crate::error::{Error, Result};
use crate::structure::Graph;

pub fn path(n: usize) -> Graph {
    let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &e)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::BadParameter(format!("cycle needs at least 3 vertices, got {n}")));
    }
    let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ok(Graph::from_edges(n, &e))
}

/// Path `0..n` with pendant edges `a b`, `c d` bridging the second/third and
/// the antepenultimate/penultimate path vertices; `a..d` are `n..n+4`.
pub fn g_n(n: usize) -> Result<Graph> {
    if n < 6 {
        return Err(Error::BadParameter(format!("G_n needs n >= 6, got {n}")));
    }
    let mut g = Graph::new(n + 4);
    for i in 1..n {
        g.add_edge(i - 1, i);
    }
    let (a, b, c, d) = (n, n + 1, n + 2, n + 3);
    for (u, v) in [(a, b), (c, d), (a, 1), (b, 2), (c, n - 3), (d, n - 2)] {
        g.add_edge(u, v);
    }
    Ok(g)
}

/// Disjoint `G_6, ..., G_n` (in that order) with their first path vertices joined in a clique.
pub fn h_n(n: usize) -> Result<Graph> {
    if n < 6 {
        return Err(Error::BadParameter(format!("H_n needs n >= 6, got {n}")));
    }
    let total: usize = (6..=n).map(|k| k + 4).sum();
    let mut h = Graph::new(total);
    let mut firsts = Vec::new();
    let mut off = 0;
    for k in 6..=n {
        let g = g_n(k)?;
        for (u, v) in g.edges() {
            h.add_edge(off + u, off + v);
        }
        firsts.push(off);
        off += k + 4;
    }
    for (i, &u) in firsts.iter().enumerate() {
        for &v in &firsts[i + 1..] {
            h.add_edge(u, v);
        }
    }
    Ok(h)
}

/// Path `0..n` whose odd-indexed vertices (even in 1-based numbering) form a
/// clique, plus `a = n` on the fourth and `b = n + 1` on the fourth-from-last vertex.
pub fn g_prime_n(n: usize) -> Result<Graph> {
    if n < 9 || n.is_multiple_of(2) {
        return Err(Error::BadParameter(format!("G'_n needs odd n >= 9, got {n}")));
    }
    let mut g = Graph::new(n + 2);
    for i in 1..n {
        g.add_edge(i - 1, i);
    }
    g.add_edge(n, 3);
    g.add_edge(n + 1, n - 4);
    let evens: Vec<usize> = (1..n).step_by(2).collect();
    for (i, &u) in evens.iter().enumerate() {
        for &v in &evens[i + 1..] {
            g.add_edge(u, v);
        }
    }
    Ok(g)
}

/// Generator names understood by [`generate`].
pub const GENERATORS: [&str; 7] = ["path", "cycle", "complete", "empty", "Gn", "Hn", "Gprime"];

pub fn generate(kind: &str, n: usize) -> Result<Graph> {
    match kind {
        "path" => Ok(path(n)),
        "cycle" => cycle(n),
        "complete" => Ok(Graph::complete(n)),
        "empty" => Ok(Graph::new(n)),
        "Gn" => g_n(n),
        "Hn" => h_n(n),
        "Gprime" => g_prime_n(n),
        other => Err(Error::BadParameter(format!("unknown generator `{other}`"))),
    }
}

/// `∏_{i<n} (1 - 1/size(i))`.
pub fn product_tail(size: impl Fn(usize) -> usize, n: usize) -> Result<BigRational> {
    let mut acc = BigRational::one();
    for i in 0..n {
        let s = size(i);
        if s == 0 {
            return Err(Error::BadParameter(format!("level {i} has size 0")));
        }
        acc *= BigRational::new(BigInt::from(s - 1), BigInt::from(s));
    }
    Ok(acc)
}

/// Least `r` with `(1 - 1/s)^r <= 1/2`.
pub fn repetitions(s: usize) -> Result<usize> {
    if s < 2 {
        return Err(Error::BadParameter("size must be at least 2".into()));
    }
    let q = BigRational::new(BigInt::from(s - 1), BigInt::from(s));
    let half = BigRational::new(1.into(), 2.into());
    let mut acc = BigRational::one();
    let mut r = 0;
    while acc > half {
        acc *= &q;
        r += 1;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::embeds;
    use crate::substitution::is_prime;

    #[test]
    fn named_graphs() {
        let g6 = g_n(6).unwrap();
        assert_eq!((g6.order(), g6.edge_count()), (10, 11));
        assert!(is_prime(&g6.to_structure()).unwrap());
        let h6 = h_n(6).unwrap().to_structure();
        let h7 = h_n(7).unwrap().to_structure();
        assert!(embeds(&h6, &h7).unwrap());
        let gp = g_prime_n(9).unwrap();
        assert_eq!(gp.order(), 11);
        for u in [1, 3, 5, 7] {
            for v in [1, 3, 5, 7] {
                assert_eq!(gp.has_edge(u, v), u != v);
            }
        }
        assert!(g_n(5).is_err() && g_prime_n(10).is_err() && generate("nope", 3).is_err());
        assert_eq!(generate("cycle", 5).unwrap(), cycle(5).unwrap());
    }

    #[test]
    fn primes_and_non_primes() {
        for n in 5..=12 {
            assert!(is_prime(&cycle(n).unwrap().to_structure()).unwrap());
        }
        for n in 6..=12 {
            assert!(is_prime(&g_n(n).unwrap().to_structure()).unwrap());
        }
        for n in 6..=9 {
            assert!(is_prime(&h_n(n).unwrap().to_structure()).unwrap());
        }
        for n in [9, 11, 13] {
            assert!(is_prime(&g_prime_n(n).unwrap().to_structure()).unwrap());
        }
        for g in [cycle(3).unwrap(), cycle(4).unwrap(), path(3), Graph::complete(4)] {
            assert!(!is_prime(&g.to_structure()).unwrap());
        }
    }

    #[test]
    fn tails() {
        let t = product_tail(|_| 5, 10).unwrap();
        assert_eq!(t, BigRational::new(BigInt::from(4).pow(10), BigInt::from(5).pow(10)));
        assert_eq!(repetitions(10).unwrap(), 7);
        assert!(product_tail(|_| 0, 1).is_err());
    }
}
