//! Embedding search, automorphism counting and exact induced densities.

use fixedbitset::FixedBitSet;
use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::Structure;

/// A relation check performed when the vertex at a given step is placed.
struct Check {
    predicate: usize,
    /// Positions into the placement order.
    tuple: Vec<usize>,
    expected: bool,
}

/// Backtracking matcher for induced embeddings of `pattern` into `host`.
struct Matcher<'a> {
    pattern: &'a Structure,
    host: &'a Structure,
    order: Vec<usize>,
    binary: Vec<usize>,
    checks: Vec<Vec<Check>>,
    fixed: Vec<Option<usize>>,
}

impl<'a> Matcher<'a> {
    #[allow(clippy::needless_range_loop)]
    fn new(pattern: &'a Structure, host: &'a Structure, fixed_pairs: &[(usize, usize)]) -> Self {
        let n = pattern.size();
        let lang = pattern.language();
        let binary: Vec<usize> = (0..lang.len()).filter(|&p| lang.arity(p) == 2).collect();

        // Weight of the link between two pattern vertices, for ordering.
        let mut link = vec![vec![0usize; n]; n];
        for p in 0..lang.len() {
            for t in pattern.tuples(p) {
                for &a in &t {
                    for &b in &t {
                        if a != b {
                            link[a][b] += 1;
                        }
                    }
                }
            }
        }
        let mut order: Vec<usize> = fixed_pairs.iter().map(|&(a, _)| a).collect();
        let mut placed = vec![false; n];
        for &a in &order {
            placed[a] = true;
        }
        while order.len() < n {
            let next = (0..n)
                .filter(|&v| !placed[v])
                .max_by_key(|&v| {
                    let to_placed: usize = order.iter().map(|&u| link[v][u]).sum();
                    let total: usize = link[v].iter().sum();
                    (to_placed, total, usize::MAX - v)
                })
                .unwrap();
            placed[next] = true;
            order.push(next);
        }

        let mut checks: Vec<Vec<Check>> = (0..n).map(|_| Vec::new()).collect();
        for p in 0..lang.len() {
            let k = lang.arity(p);
            if k == 2 {
                continue;
            }
            for step in 0..n {
                // Tuples over order[0..=step] that contain order[step].
                crate::structure::for_each_injective(step + 1, k, |t| {
                    if t.contains(&step) {
                        let verts: Vec<usize> = t.iter().map(|&i| order[i]).collect();
                        checks[step].push(Check {
                            predicate: p,
                            tuple: t.to_vec(),
                            expected: pattern.holds(p, &verts),
                        });
                    }
                });
            }
        }
        let mut fixed = vec![None; n];
        for (i, &(_, b)) in fixed_pairs.iter().enumerate() {
            fixed[i] = Some(b);
        }
        Matcher {
            pattern,
            host,
            order,
            binary,
            checks,
            fixed,
        }
    }

    fn candidates(&self, step: usize, image: &[usize], used: &FixedBitSet) -> FixedBitSet {
        let hn = self.host.size();
        let mut cand = FixedBitSet::with_capacity(hn);
        if let Some(b) = self.fixed[step] {
            if b < hn && !used.contains(b) {
                cand.insert(b);
            }
        } else {
            cand.insert_range(..);
            cand.difference_with(used);
        }
        let a = self.order[step];
        for &p in &self.binary {
            let (out, inn) = self.host.binary_rows(p).expect("binary relation");
            for (j, &fb) in image.iter().enumerate().take(step) {
                let b = self.order[j];
                // P(a, b): candidate x needs x -> fb.
                if self.pattern.holds(p, &[a, b]) {
                    cand.intersect_with(&inn[fb]);
                } else {
                    cand.difference_with(&inn[fb]);
                }
                if self.pattern.holds(p, &[b, a]) {
                    cand.intersect_with(&out[fb]);
                } else {
                    cand.difference_with(&out[fb]);
                }
            }
        }
        cand
    }

    fn passes(&self, step: usize, image: &[usize]) -> bool {
        let mut buf = Vec::new();
        self.checks[step].iter().all(|c| {
            buf.clear();
            buf.extend(c.tuple.iter().map(|&i| image[i]));
            self.host.holds(c.predicate, &buf) == c.expected
        })
    }

    /// Visits embeddings; `visit` returns false to stop. Returns false if stopped.
    fn run(&self, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let n = self.pattern.size();
        let mut image = vec![0usize; n];
        let mut used = FixedBitSet::with_capacity(self.host.size());
        self.rec(0, &mut image, &mut used, visit)
    }

    fn rec(
        &self,
        step: usize,
        image: &mut [usize],
        used: &mut FixedBitSet,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let n = self.pattern.size();
        if step == n {
            let mut emb = vec![0; n];
            for (i, &v) in self.order.iter().enumerate() {
                emb[v] = image[i];
            }
            return visit(&emb);
        }
        let cand = self.candidates(step, image, used);
        for x in cand.ones() {
            image[step] = x;
            if !self.passes(step, image) {
                continue;
            }
            used.insert(x);
            let go_on = self.rec(step + 1, image, used, visit);
            used.set(x, false);
            if !go_on {
                return false;
            }
        }
        true
    }

    fn count(&self) -> u128 {
        let n = self.pattern.size();
        if n == 0 {
            return 1;
        }
        let mut image = vec![0usize; n];
        let mut used = FixedBitSet::with_capacity(self.host.size());
        self.count_rec(0, &mut image, &mut used)
    }

    fn count_rec(&self, step: usize, image: &mut [usize], used: &mut FixedBitSet) -> u128 {
        let n = self.pattern.size();
        let cand = self.candidates(step, image, used);
        if step + 1 == n && self.checks[step].is_empty() {
            return cand.count_ones(..) as u128;
        }
        let mut total = 0;
        for x in cand.ones() {
            image[step] = x;
            if !self.passes(step, image) {
                continue;
            }
            if step + 1 == n {
                total += 1;
                continue;
            }
            used.insert(x);
            total += self.count_rec(step + 1, image, used);
            used.set(x, false);
        }
        total
    }
}

fn check_lang(m: &Structure, n: &Structure) -> Result<()> {
    if m.same_language(n) {
        Ok(())
    } else {
        Err(Error::LanguageMismatch)
    }
}

/// Number of embeddings (injective maps preserving relations and their negations).
pub fn count_embeddings(m: &Structure, n: &Structure) -> Result<u128> {
    check_lang(m, n)?;
    if m.size() > n.size() {
        return Ok(0);
    }
    Ok(Matcher::new(m, n, &[]).count())
}

pub fn embeds(m: &Structure, n: &Structure) -> Result<bool> {
    Ok(find_embedding(m, n)?.is_some())
}

/// Some embedding of `m` into `n`, as the image of each vertex of `m`.
pub fn find_embedding(m: &Structure, n: &Structure) -> Result<Option<Vec<usize>>> {
    check_lang(m, n)?;
    if m.size() > n.size() {
        return Ok(None);
    }
    let mut found = None;
    Matcher::new(m, n, &[]).run(&mut |e| {
        found = Some(e.to_vec());
        false
    });
    Ok(found)
}

/// Calls `visit` for every embedding until it returns false.
pub fn for_each_embedding(
    m: &Structure,
    n: &Structure,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> Result<()> {
    check_lang(m, n)?;
    if m.size() <= n.size() {
        Matcher::new(m, n, &[]).run(&mut visit);
    }
    Ok(())
}

/// `|Aut(m)|` via a stabiliser chain: product of orbit sizes of successive
/// vertices under the pointwise stabiliser of the earlier ones.
pub fn automorphism_count(m: &Structure) -> u128 {
    let n = m.size();
    let mut total: u128 = 1;
    let mut fixed: Vec<(usize, usize)> = Vec::new();
    for v in 0..n {
        let mut orbit = 0u128;
        for w in 0..n {
            if fixed.iter().any(|&(_, b)| b == w) {
                continue;
            }
            let mut pairs = fixed.clone();
            pairs.push((v, w));
            let mut hit = false;
            Matcher::new(m, m, &pairs).run(&mut |_| {
                hit = true;
                false
            });
            if hit {
                orbit += 1;
            }
        }
        total *= orbit;
        fixed.push((v, v));
    }
    total
}

/// Exact induced density data of `m` in `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub embeddings: u128,
    #[serde(serialize_with = "crate::ser_rational")]
    pub tind: BigRational,
    #[serde(serialize_with = "crate::ser_rational")]
    pub p: BigRational,
    pub aut: u128,
}

pub fn falling_factorial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

pub fn densities(m: &Structure, n: &Structure) -> Result<DensityReport> {
    let embeddings = count_embeddings(m, n)?;
    let aut = automorphism_count(m);
    let (tind, p) = if m.size() > n.size() {
        (BigRational::zero(), BigRational::zero())
    } else {
        let tind = BigRational::new(
            BigInt::from(embeddings),
            falling_factorial(n.size(), m.size()),
        );
        let fact = falling_factorial(m.size(), m.size());
        let p = &tind * BigRational::new(fact, BigInt::from(aut));
        (tind, p)
    };
    Ok(DensityReport {
        embeddings,
        tind,
        p,
        aut,
    })
}
