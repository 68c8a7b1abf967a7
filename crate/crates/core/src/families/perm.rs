use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{apply_interpretation, Interpretation};
use crate::structure::{Graph, Language, Structure};

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            if v == 0 || v > n || std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::BadParameter(format!("{values:?} is not a permutation of 1..={n}")));
            }
        }
        Ok(Permutation(values))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation(inv)
    }

    /// Every permutation of `1..=n`, lexicographically.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation(cur.clone()));
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    cur.push(v + 1);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `M_σ` over two orders (`L1` natural, `L2(i, j)` iff `σ⁻¹(i) < σ⁻¹(j)`),
/// and its agreement graph relabelled onto positions: `{i, j}` is an edge
/// iff `i < j` and `σ(i) < σ(j)` agree.
pub fn perm_structures(sigma: &Permutation) -> Result<(Structure, Graph)> {
    let n = sigma.len();
    let inv = sigma.inverse();
    let mut m = Structure::empty(Language::permutation(), n);
    for i in 0..n {
        for j in 0..n {
            if i < j {
                m.insert(0, &[i, j])?;
            }
            if i != j && inv.0[i] < inv.0[j] {
                m.insert(1, &[i, j])?;
            }
        }
    }
    let by_value = apply_interpretation(Interpretation::agreement(), &m)?.to_graph()?;
    let mut g = Graph::new(n);
    for (a, b) in by_value.edges() {
        g.add_edge(inv.0[a] - 1, inv.0[b] - 1);
    }
    Ok((m, g))
}

pub fn agreement_graph(sigma: &Permutation) -> Graph {
    let s = &sigma.0;
    let mut g = Graph::new(s.len());
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s[i] < s[j] {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// The permutation of length `n + 4` whose agreement graph is `G_n`, for even `n >= 6`.
pub fn gen_pi(n: usize) -> Result<Permutation> {
    if n < 6 || n % 2 == 1 {
        return Err(Error::BadParameter(format!("needs even n >= 6, got {n}")));
    }
    let v = (1..=n + 4)
        .map(|i| match i {
            1 => n + 3,
            2 => n + 1,
            3 => n - 1,
            4 => n + 4,
            i if i <= n && i % 2 == 0 => n + 3 - i,
            i if i < n => n + 7 - i,
            i => [1, 6, 4, 2][i - n - 1],
        })
        .collect();
    Permutation::new(v)
}

/// Substitutes `tau` at position `v` (0-based), so the agreement graph of
/// the result is the agreement graph of `sigma` with vertex `v` replaced by
/// that of `tau`, placed at positions `v..v + |tau|`.
pub fn perm_substitute(sigma: &Permutation, v: usize, tau: &Permutation) -> Result<Permutation> {
    let n = sigma.len();
    let m = tau.len();
    if v >= n || m == 0 {
        return Err(Error::BadParameter(format!(
            "position {v} outside a permutation of length {n}, or empty insert"
        )));
    }
    let s = &sigma.0;
    let sv = s[v];
    let lift = |x: usize| if x < sv { x } else { x + m - 1 };
    let out = (0..n + m - 1)
        .map(|i| {
            if i < v {
                lift(s[i])
            } else if i < v + m {
                sv + tau.0[i - v] - 1
            } else {
                lift(s[i + 1 - m])
            }
        })
        .collect();
    Permutation::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::are_isomorphic;
    use crate::families::g_n;
    use crate::substitution::substitute_conservative;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn agreement_examples() {
        assert_eq!(agreement_graph(&Permutation::identity(4)), Graph::complete(4));
        assert_eq!(agreement_graph(&p(&[4, 3, 2, 1])), Graph::new(4));
        let g = agreement_graph(&p(&[2, 1, 3]));
        assert_eq!(g.edges(), vec![(0, 2), (1, 2)]);
        for n in 1..=5 {
            for s in Permutation::all(n) {
                assert_eq!(perm_structures(&s).unwrap().1, agreement_graph(&s));
            }
        }
        assert!(Permutation::new(vec![1, 1]).is_err());
    }

    #[test]
    fn pi_values() {
        let pi = gen_pi(14).unwrap();
        assert_eq!(
            pi.values(),
            &[17, 15, 13, 18, 16, 11, 14, 9, 12, 7, 10, 5, 8, 3, 1, 6, 4, 2]
        );
        for n in [6, 8, 10, 12, 14] {
            let a = agreement_graph(&gen_pi(n).unwrap()).to_structure();
            assert!(are_isomorphic(&a, &g_n(n).unwrap().to_structure()).unwrap());
        }
        assert!(gen_pi(7).is_err());
    }

    #[test]
    fn substitution_is_functorial() {
        assert_eq!(perm_substitute(&p(&[3, 1, 2]), 1, &p(&[1])).unwrap(), p(&[3, 1, 2]));
        let r = perm_substitute(&p(&[1, 2]), 1, &p(&[2, 1])).unwrap();
        assert_eq!(r, p(&[1, 3, 2]));
        for n in 1..=3 {
            for m in 1..=3 {
                for s in Permutation::all(n) {
                    for t in Permutation::all(m) {
                        for v in 0..n {
                            let lhs = agreement_graph(&perm_substitute(&s, v, &t).unwrap());
                            let rhs = substitute_conservative(
                                &agreement_graph(&s).to_structure(),
                                v,
                                &agreement_graph(&t).to_structure(),
                            )
                            .unwrap();
                            assert_eq!(lhs.to_structure(), rhs);
                        }
                    }
                }
            }
        }
    }
}
