//! Cylinder masks: finite prefix trees of surviving cells.

use std::collections::HashMap;
use std::sync::Arc;

use num::{BigRational, One, Zero};
use rand::RngCore;
use serde_json::Value;

use super::spec::BlowupSpec;
use crate::error::{Error, Result};

/// Largest mask depth accepted by [`prune_spec`].
pub const MAX_MASK_DEPTH: usize = 32;

/// What lies below a surviving cell.
#[derive(Debug, Clone)]
pub enum Child {
    /// The full tail: no further restriction.
    Full,
    Node(Arc<MaskNode>),
}

/// Surviving vertices of the level structure at this depth, each with the
/// restriction applied below it. Subtrees may be shared.
#[derive(Debug)]
pub struct MaskNode {
    survivors: Vec<(usize, Child)>,
}

impl MaskNode {
    pub fn new(mut survivors: Vec<(usize, Child)>) -> Result<Arc<MaskNode>> {
        if survivors.is_empty() {
            return Err(Error::EmptyMask("a node has no surviving cell".into()));
        }
        survivors.sort_by_key(|(v, _)| *v);
        if survivors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::BadParameter("repeated survivor in mask node".into()));
        }
        Ok(Arc::new(MaskNode { survivors }))
    }

    pub fn survivors(&self) -> &[(usize, Child)] {
        &self.survivors
    }

    /// Whether every survivor carries the same restriction below it.
    pub fn uniform_child(&self) -> Option<&Child> {
        let first = &self.survivors[0].1;
        self.survivors
            .iter()
            .all(|(_, c)| c.same_as(first))
            .then_some(first)
    }
}

impl Child {
    pub fn same_as(&self, other: &Child) -> bool {
        match (self, other) {
            (Child::Full, Child::Full) => true,
            (Child::Node(a), Child::Node(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    pub(crate) fn key(&self) -> usize {
        match self {
            Child::Full => 0,
            Child::Node(n) => Arc::as_ptr(n) as usize,
        }
    }

    pub fn depth(&self) -> usize {
        fn rec(c: &Child, memo: &mut HashMap<usize, usize>) -> usize {
            match c {
                Child::Full => 0,
                Child::Node(n) => {
                    if let Some(&d) = memo.get(&c.key()) {
                        return d;
                    }
                    let d = 1 + n.survivors.iter().map(|(_, ch)| rec(ch, memo)).max().unwrap_or(0);
                    memo.insert(c.key(), d);
                    d
                }
            }
        }
        rec(self, &mut HashMap::new())
    }

    /// Levels `0..survivors.len()` keep the given vertices, sharing one subtree per level.
    pub fn chain(levels: &[Vec<usize>]) -> Result<Child> {
        let mut below = Child::Full;
        for keep in levels.iter().rev() {
            below = Child::Node(MaskNode::new(
                keep.iter().map(|&v| (v, below.clone())).collect(),
            )?);
        }
        Ok(below)
    }

    /// JSON form: an array of entries, each a 1-based vertex (full tail
    /// below) or a pair `[vertex, node]`.
    pub fn to_json(&self) -> Value {
        match self {
            Child::Full => Value::Null,
            Child::Node(n) => Value::Array(
                n.survivors
                    .iter()
                    .map(|(v, c)| match c {
                        Child::Full => Value::from(v + 1),
                        Child::Node(_) => Value::Array(vec![Value::from(v + 1), c.to_json()]),
                    })
                    .collect(),
            ),
        }
    }

    pub fn from_json(v: &Value) -> Result<Child> {
        match v {
            Value::Null => Ok(Child::Full),
            Value::Array(entries) => {
                let mut survivors = Vec::with_capacity(entries.len());
                for e in entries {
                    survivors.push(match e {
                        Value::Number(_) => (vertex(e)?, Child::Full),
                        Value::Array(pair) if pair.len() == 2 => {
                            (vertex(&pair[0])?, Child::from_json(&pair[1])?)
                        }
                        _ => return Err(Error::Json(format!("bad mask entry {e}"))),
                    });
                }
                Ok(Child::Node(MaskNode::new(survivors)?))
            }
            _ => Err(Error::Json(format!("bad mask node {v}"))),
        }
    }
}

fn vertex(v: &Value) -> Result<usize> {
    match v.as_u64() {
        Some(x) if x >= 1 => Ok(x as usize - 1),
        _ => Err(Error::Json(format!("mask vertices are 1-based integers, got {v}"))),
    }
}

/// A blow-up restricted to a finite union of cylinder sets, with the vertex
/// distribution conditioned on the surviving paths.
#[derive(Debug, Clone)]
pub struct PrunedSpec {
    spec: BlowupSpec,
    root: Child,
    measures: Arc<HashMap<(usize, usize), BigRational>>,
}

impl PrunedSpec {
    pub fn full(spec: BlowupSpec) -> PrunedSpec {
        PrunedSpec {
            spec,
            root: Child::Full,
            measures: Arc::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &BlowupSpec {
        &self.spec
    }

    pub fn root(&self) -> &Child {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Measure of the cylinder union below `c` placed at `level`.
    pub fn measure_of(&self, c: &Child, level: usize) -> BigRational {
        match c {
            Child::Full => BigRational::one(),
            Child::Node(_) => self.measures[&(c.key(), level)].clone(),
        }
    }

    /// Conditional probability of each survivor of `node` at `level`.
    pub fn weights(&self, node: &MaskNode, level: usize) -> Vec<BigRational> {
        let ms: Vec<BigRational> = node
            .survivors
            .iter()
            .map(|(_, c)| self.measure_of(c, level + 1))
            .collect();
        let total = ms.iter().fold(BigRational::zero(), |a, b| a + b);
        ms.into_iter().map(|m| m / &total).collect()
    }
}

fn measure_rec(
    spec: &BlowupSpec,
    c: &Child,
    level: usize,
    memo: &mut HashMap<(usize, usize), BigRational>,
) -> Result<BigRational> {
    let Child::Node(n) = c else {
        return Ok(BigRational::one());
    };
    if let Some(m) = memo.get(&(c.key(), level)) {
        return Ok(m.clone());
    }
    if level >= MAX_MASK_DEPTH {
        return Err(Error::TooLarge {
            what: "mask depth",
            size: level + 1,
            limit: MAX_MASK_DEPTH,
        });
    }
    let g = spec.level_size(level);
    let mut total = BigRational::zero();
    for (v, ch) in &n.survivors {
        if *v >= g {
            return Err(Error::OutOfRangeVertex {
                vertex: v + 1,
                size: g,
            });
        }
        total += measure_rec(spec, ch, level + 1, memo)?;
    }
    let m = total / BigRational::from_integer(g.into());
    memo.insert((c.key(), level), m.clone());
    Ok(m)
}

/// Restricts `spec` to the cylinder union described by `mask`.
pub fn prune_spec(spec: &BlowupSpec, mask: Child) -> Result<PrunedSpec> {
    let mut memo = HashMap::new();
    measure_rec(spec, &mask, 0, &mut memo)?;
    Ok(PrunedSpec {
        spec: spec.clone(),
        root: mask,
        measures: Arc::new(memo),
    })
}

pub fn mask_measure(p: &PrunedSpec) -> BigRational {
    p.measure_of(&p.root, 0)
}

/// A random mask of the given depth: each vertex survives with probability
/// one half, and an empty draw keeps one uniformly chosen vertex.
pub fn random_mask(spec: &BlowupSpec, depth: usize, rng: &mut impl RngCore) -> Result<Child> {
    fn node(spec: &BlowupSpec, level: usize, depth: usize, rng: &mut dyn RngCore) -> Result<Child> {
        if level == depth {
            return Ok(Child::Full);
        }
        let g = spec.level_size(level);
        let mut keep: Vec<usize> = (0..g).filter(|_| rng.next_u64() >> 63 == 1).collect();
        if keep.is_empty() {
            keep.push(super::sample::uniform_index(rng.next_u64(), g));
        }
        let mut survivors = Vec::with_capacity(keep.len());
        for v in keep {
            survivors.push((v, node(spec, level + 1, depth, rng)?));
        }
        Ok(Child::Node(MaskNode::new(survivors)?))
    }
    node(spec, 0, depth, rng)
}
