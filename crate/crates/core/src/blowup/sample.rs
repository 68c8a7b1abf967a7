//! Seeded sampling of finite structures from blow-up limits and step graphons.
//!
//! Randomness is the splitmix64 stream seeded with the user seed. A uniform
//! choice among `n` options uses one 64-bit output `x` and takes
//! `floor(x * n / 2^64)`. A choice with rational probabilities `w_0, w_1, ...`
//! takes the least `i` with `x < (w_0 + ... + w_i) * 2^64`, and a coin with
//! bias `p` lands heads iff `x < p * 2^64`, both compared exactly.

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::mask::{Child, PrunedSpec};
use super::spec::BlowupSpec;
use crate::error::{Error, Result};
use crate::structure::{for_each_injective, Graph, Structure};

/// Multiply-shift reduction of a 64-bit draw to `0..n`.
pub fn uniform_index(x: u64, n: usize) -> usize {
    ((x as u128 * n as u128) >> 64) as usize
}

fn two64() -> BigInt {
    BigInt::one() << 64
}

/// `x < p * 2^64`, exactly.
pub fn below(x: u64, p: &BigRational) -> bool {
    BigInt::from(x) * p.denom() < p.numer() * two64()
}

/// Least index whose cumulative weight exceeds `x / 2^64`.
pub fn pick_weighted(x: u64, weights: &[BigRational]) -> usize {
    let mut acc = BigRational::zero();
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if below(x, &acc) {
            return i;
        }
    }
    weights.len() - 1
}

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Largest number of levels drawn before giving up on separating vertices.
const MAX_SAMPLE_LEVELS: usize = 4096;

/// Samples `n` vertices of a (possibly masked) blow-up limit.
///
/// Coordinates are drawn lazily level by level. At each level the groups of
/// vertices that still share all earlier coordinates are visited in order of
/// their smallest vertex, and each vertex of a group with at least two
/// members draws one coordinate, in increasing vertex order. Sampling stops
/// once every pair of vertices differs somewhere. A tuple then holds iff its
/// coordinates first disagree at a level where they are pairwise distinct and
/// the level structure holds on them.
pub fn sample_pruned(p: &PrunedSpec, n: usize, seed: u64) -> Result<Structure> {
    let spec = p.spec();
    let mut rng = rng(seed);
    let mut coords: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut groups: Vec<(Vec<usize>, Child)> = Vec::new();
    if n >= 2 {
        groups.push(((0..n).collect(), p.root().clone()));
    }
    let mut level = 0;
    while !groups.is_empty() {
        if level >= MAX_SAMPLE_LEVELS {
            return Err(Error::DegenerateSource(format!(
                "vertices still unseparated after {MAX_SAMPLE_LEVELS} levels"
            )));
        }
        let g = spec.level_size(level);
        let mut next: Vec<(Vec<usize>, Child)> = Vec::new();
        for (verts, state) in groups {
            let mut cells: Vec<(usize, Vec<usize>, Child)> = Vec::new();
            let weights = match &state {
                Child::Node(node) => Some(p.weights(node, level)),
                Child::Full => None,
            };
            for &v in &verts {
                let x = rng.next_u64();
                let (coord, below) = match (&state, &weights) {
                    (Child::Node(node), Some(w)) => {
                        let (c, ch) = &node.survivors()[pick_weighted(x, w)];
                        (*c, ch.clone())
                    }
                    _ => (uniform_index(x, g), Child::Full),
                };
                coords[v].push(coord);
                match cells.iter_mut().find(|(c, _, _)| *c == coord) {
                    Some(cell) => cell.1.push(v),
                    None => cells.push((coord, vec![v], below)),
                }
            }
            next.extend(
                cells
                    .into_iter()
                    .filter(|(_, vs, _)| vs.len() >= 2)
                    .map(|(_, vs, ch)| (vs, ch)),
            );
        }
        next.sort_by_key(|(vs, _)| vs[0]);
        groups = next;
        level += 1;
    }
    Ok(read_relations(spec, &coords))
}

fn read_relations(spec: &BlowupSpec, coords: &[Vec<usize>]) -> Structure {
    let n = coords.len();
    let mut split = vec![vec![0usize; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let d = (0..)
                .find(|&l| coords[u][l] != coords[v][l])
                .expect("sampled vertices are separated");
            split[u][v] = d;
            split[v][u] = d;
        }
    }
    let mut levels = std::collections::HashMap::new();
    let mut out = Structure::empty(spec.language().clone(), n);
    for p in 0..spec.language().len() {
        let k = spec.language().arity(p);
        for_each_injective(n, k, |t| {
            let l = split[t[0]][t[1]];
            for i in 0..k {
                for j in i + 1..k {
                    if split[t[i]][t[j]] != l {
                        return;
                    }
                }
            }
            let g = levels
                .entry(l)
                .or_insert_with(|| spec.level_structure(l))
                .clone();
            let img: Vec<usize> = t.iter().map(|&v| coords[v][l]).collect();
            if g.holds(p, &img) {
                out.insert_unchecked(p, t);
            }
        });
    }
    out
}

/// A block-constant graphon with rational block measures and edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepGraphon {
    measures: Vec<BigRational>,
    weights: Vec<Vec<BigRational>>,
}

impl StepGraphon {
    pub fn new(measures: Vec<BigRational>, weights: Vec<Vec<BigRational>>) -> Result<Self> {
        let k = measures.len();
        if k == 0 {
            return Err(Error::BadParameter("step graphon needs a block".into()));
        }
        if measures.iter().any(|m| !m.is_positive()) {
            return Err(Error::BadParameter("block measures must be positive".into()));
        }
        if measures.iter().fold(BigRational::zero(), |a, b| a + b) != BigRational::one() {
            return Err(Error::BadParameter("block measures must sum to 1".into()));
        }
        if weights.len() != k || weights.iter().any(|r| r.len() != k) {
            return Err(Error::BadParameter("weight matrix must be k x k".into()));
        }
        for (i, row) in weights.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                if w.is_negative() || *w > BigRational::one() {
                    return Err(Error::BadParameter("weights must lie in [0, 1]".into()));
                }
                if *w != weights[j][i] {
                    return Err(Error::BadParameter("weights must be symmetric".into()));
                }
            }
        }
        Ok(StepGraphon { measures, weights })
    }

    /// The single-block graphon of constant weight `p`.
    pub fn constant(p: BigRational) -> Result<Self> {
        StepGraphon::new(vec![BigRational::one()], vec![vec![p]])
    }

    pub fn blocks(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[BigRational] {
        &self.measures
    }

    pub fn weight(&self, i: usize, j: usize) -> &BigRational {
        &self.weights[i][j]
    }

    /// Draws each vertex's block (vertex order), then one coin per pair in
    /// lexicographic order.
    pub fn sample(&self, n: usize, seed: u64) -> Graph {
        let mut rng = rng(seed);
        let blocks: Vec<usize> = (0..n)
            .map(|_| pick_weighted(rng.next_u64(), &self.measures))
            .collect();
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if below(rng.next_u64(), &self.weights[blocks[u]][blocks[v]]) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }
}

/// Largest motif accepted by [`tind_step`].
pub const MAX_STEP_MOTIF: usize = 7;

/// Induced density of `h` in a step graphon, summed over block assignments.
pub fn tind_step(h: &Graph, w: &StepGraphon) -> Result<BigRational> {
    let n = h.order();
    if n > MAX_STEP_MOTIF {
        return Err(Error::MotifTooLarge {
            size: n,
            limit: MAX_STEP_MOTIF,
        });
    }
    let k = w.blocks();
    let one = BigRational::one();
    let mut total = BigRational::zero();
    let mut assign = vec![0usize; n];
    loop {
        let mut term = assign
            .iter()
            .fold(one.clone(), |acc, &b| acc * &w.measures[b]);
        'pairs: for u in 0..n {
            for v in u + 1..n {
                if term.is_zero() {
                    break 'pairs;
                }
                let p = &w.weights[assign[u]][assign[v]];
                term *= if h.has_edge(u, v) { p.clone() } else { &one - p };
            }
        }
        total += term;
        let mut i = 0;
        loop {
            if i == n {
                return Ok(total);
            }
            assign[i] += 1;
            if assign[i] < k {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}
