//! VC and VC′ dimension of graph neighbourhood systems.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::Graph;

/// Largest graph accepted by the dimension searches.
pub const MAX_DIM_ORDER: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimReport {
    pub vc: usize,
    pub vc_prime: usize,
    /// A shattered set of size `vc`.
    pub vc_witness: Vec<usize>,
    /// An almost shattered set of size `vc_prime`.
    pub vc_prime_witness: Vec<usize>,
}

fn masks(g: &Graph) -> Result<Vec<u32>> {
    if g.order() > MAX_DIM_ORDER {
        return Err(Error::TooLarge {
            what: "graph order",
            size: g.order(),
            limit: MAX_DIM_ORDER,
        });
    }
    Ok((0..g.order())
        .map(|v| g.neighbors(v).ones().fold(0u32, |m, w| m | 1 << w))
        .collect())
}

fn shattered(nbr: &[u32], u: u32) -> bool {
    if u == 0 {
        return true;
    }
    let mut seen = vec![false; 1 << u.count_ones()];
    let mut hit = 0;
    for &n in nbr {
        let t = compress(n & u, u);
        if !seen[t] {
            seen[t] = true;
            hit += 1;
        }
    }
    hit == seen.len()
}

fn almost_shattered(nbr: &[u32], u: u32) -> bool {
    let k = u.count_ones();
    if k <= 1 {
        return true;
    }
    let mut seen = vec![false; 1 << k];
    for (v, &n) in nbr.iter().enumerate() {
        let t = n & u;
        seen[compress(t, u)] = true;
        if u >> v & 1 == 1 {
            seen[compress(t | 1 << v, u)] = true;
        }
    }
    let full = (1usize << k) - 1;
    (1..full).all(|a| seen[a])
}

/// Packs the bits of `x` selected by `u` into the low bits.
fn compress(x: u32, u: u32) -> usize {
    let mut out = 0;
    let mut bit = 0;
    let mut rest = u;
    while rest != 0 {
        let low = rest.trailing_zeros();
        if x >> low & 1 == 1 {
            out |= 1 << bit;
        }
        bit += 1;
        rest &= rest - 1;
    }
    out
}

/// Largest set passing a hereditary test, grown one vertex at a time.
fn largest(n: usize, ok: impl Fn(u32) -> bool) -> Vec<usize> {
    let mut layer: Vec<u32> = vec![0];
    let mut best = 0u32;
    while !layer.is_empty() {
        best = layer[0];
        let mut next = Vec::new();
        for &u in &layer {
            let start = if u == 0 { 0 } else { 32 - u.leading_zeros() as usize };
            for v in start..n {
                let w = u | 1 << v;
                if ok(w) {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    (0..n).filter(|&v| best >> v & 1 == 1).collect()
}

/// Largest vertex set shattered by neighbourhoods, with a witness.
pub fn vc_dim(g: &Graph) -> Result<(usize, Vec<usize>)> {
    let nbr = masks(g)?;
    let w = largest(g.order(), |u| shattered(&nbr, u));
    Ok((w.len(), w))
}

/// Largest vertex set almost shattered by the edge relation, with a witness.
pub fn vc_prime_dim(g: &Graph) -> Result<(usize, Vec<usize>)> {
    let nbr = masks(g)?;
    let w = largest(g.order(), |u| almost_shattered(&nbr, u));
    Ok((w.len(), w))
}

pub fn dim_report(g: &Graph) -> Result<DimReport> {
    let (vc, vc_witness) = vc_dim(g)?;
    let (vc_prime, vc_prime_witness) = vc_prime_dim(g)?;
    Ok(DimReport {
        vc,
        vc_prime,
        vc_witness,
        vc_prime_witness,
    })
}

/// Checks that `u` is shattered by neighbourhoods in `g`.
pub fn is_shattered(g: &Graph, u: &[usize]) -> Result<bool> {
    Ok(shattered(&masks(g)?, to_mask(g, u)?))
}

pub fn is_almost_shattered(g: &Graph, u: &[usize]) -> Result<bool> {
    Ok(almost_shattered(&masks(g)?, to_mask(g, u)?))
}

fn to_mask(g: &Graph, u: &[usize]) -> Result<u32> {
    u.iter().try_fold(0u32, |m, &v| {
        if v >= g.order() {
            Err(Error::OutOfRangeVertex {
                vertex: v,
                size: g.order(),
            })
        } else {
            Ok(m | 1 << v)
        }
    })
}

/// Lower bound on VC forced by an almost shattered set of size `n`.
pub fn f_bound(n: usize) -> Result<usize> {
    if n > 30 {
        return Err(Error::TooLarge {
            what: "bound argument",
            size: n,
            limit: 30,
        });
    }
    if n <= 2 {
        return Ok(0);
    }
    let target = (1u128 << n) - 2;
    let mut binom = 1u128;
    let mut sum = 0u128;
    let mut t = 0;
    // Invariant: sum is the binomial sum over i < t and binom is C(n, t).
    while (sum + binom) * (n as u128) < target {
        sum += binom;
        binom = binom * (n - t) as u128 / (t + 1) as u128;
        t += 1;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::graphs_up_to;

    fn naive(g: &Graph, almost: bool) -> usize {
        let n = g.order();
        let nb: Vec<Vec<bool>> = (0..n).map(|v| (0..n).map(|w| g.has_edge(v, w)).collect()).collect();
        let mut best = 0;
        for u in 0u32..1 << n {
            let set: Vec<usize> = (0..n).filter(|&v| u >> v & 1 == 1).collect();
            let k = set.len();
            let ok = (0u32..1 << k).all(|a| {
                let in_a = |i: usize| a >> i & 1 == 1;
                if almost && (a == 0 || a == (1 << k) - 1) {
                    return true;
                }
                (0..n).any(|v| {
                    set.iter().enumerate().all(|(i, &w)| {
                        let want = in_a(i) && !(almost && w == v);
                        nb[v][w] == want
                    })
                })
            });
            if ok {
                best = best.max(k);
            }
        }
        best
    }

    fn cycle(n: usize) -> Graph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &e)
    }

    #[test]
    fn examples() {
        assert_eq!(vc_dim(&Graph::new(5)).unwrap().0, 0);
        let (d, w) = vc_dim(&cycle(5)).unwrap();
        assert_eq!(d, 2);
        assert!(is_shattered(&cycle(5), &w).unwrap());
        for n in 2..7 {
            assert_eq!(vc_dim(&Graph::complete(n)).unwrap().0, 1);
        }
        assert_eq!(vc_prime_dim(&Graph::complete(2)).unwrap().0, 2);
        assert_eq!(vc_prime_dim(&Graph::new(2)).unwrap().0, 2);
        assert_eq!(vc_prime_dim(&Graph::new(0)).unwrap().0, 0);
        assert_eq!(vc_dim(&Graph::new(0)).unwrap().0, 0);
        assert_eq!(vc_prime_dim(&Graph::new(1)).unwrap().0, 1);
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(vc_prime_dim(&p4).unwrap().0, naive(&p4, true));
        assert!(vc_dim(&Graph::new(21)).is_err());
    }

    #[test]
    fn agrees_with_naive_search() {
        for g in graphs_up_to(6).unwrap() {
            let r = dim_report(&g).unwrap();
            assert_eq!(r.vc, naive(&g, false), "{g:?}");
            assert_eq!(r.vc_prime, naive(&g, true), "{g:?}");
            assert!(is_shattered(&g, &r.vc_witness).unwrap());
            assert!(is_almost_shattered(&g, &r.vc_prime_witness).unwrap());
        }
    }

    #[test]
    fn f_values() {
        let naive_f = |n: usize| -> usize {
            if n <= 2 {
                return 0;
            }
            let c = |n: u128, k: u128| (0..k).fold(1u128, |a, i| a * (n - i) / (i + 1));
            (0..=n)
                .filter(|&t| (0..t).map(|i| c(n as u128, i as u128)).sum::<u128>() * (n as u128) < (1u128 << n) - 2)
                .max()
                .unwrap()
        };
        for n in 0..=30 {
            assert_eq!(f_bound(n).unwrap(), naive_f(n), "n={n}");
        }
        assert_eq!(f_bound(2).unwrap(), 0);
        assert_eq!(f_bound(3).unwrap(), 1);
        assert!((0..=30).any(|n| f_bound(n).unwrap() >= 3));
    }
}
