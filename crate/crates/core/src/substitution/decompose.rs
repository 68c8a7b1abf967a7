//! Modular decomposition of graphs.

use fixedbitset::FixedBitSet;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::structure::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Series,
    Parallel,
    Prime,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Series => "SERIES",
            NodeKind::Parallel => "PARALLEL",
            NodeKind::Prime => "PRIME",
        }
    }
}

/// The tree of strong modules. Children of a node are its maximal strong
/// submodules; the quotient has one vertex per child, in child order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionTree {
    Leaf(usize),
    Node {
        kind: NodeKind,
        vertices: Vec<usize>,
        quotient: Graph,
        children: Vec<DecompositionTree>,
    },
}

impl DecompositionTree {
    pub fn vertices(&self) -> Vec<usize> {
        match self {
            DecompositionTree::Leaf(v) => vec![*v],
            DecompositionTree::Node { vertices, .. } => vertices.clone(),
        }
    }

    /// Visits every internal node.
    pub fn for_each_node(&self, f: &mut dyn FnMut(NodeKind, &Graph, &[DecompositionTree])) {
        if let DecompositionTree::Node {
            kind,
            quotient,
            children,
            ..
        } = self
        {
            f(*kind, quotient, children);
            for c in children {
                c.for_each_node(f);
            }
        }
    }

    pub fn has_prime_node(&self) -> bool {
        let mut found = false;
        self.for_each_node(&mut |k, _, _| found |= k == NodeKind::Prime);
        found
    }

    /// JSON rendering with 1-based leaves.
    pub fn to_json(&self) -> Value {
        match self {
            DecompositionTree::Leaf(v) => json!(v + 1),
            DecompositionTree::Node {
                kind,
                quotient,
                children,
                ..
            } => json!({
                "kind": kind.name(),
                "quotient": crate::graph6::encode(quotient),
                "children": children.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            }),
        }
    }
}

fn components(g: &Graph, set: &FixedBitSet, complement: bool) -> Vec<FixedBitSet> {
    let mut left = set.clone();
    let mut out = Vec::new();
    while let Some(start) = left.ones().next() {
        let mut comp = FixedBitSet::with_capacity(g.order());
        comp.insert(start);
        left.set(start, false);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            let mut nb = g.neighbors(u).clone();
            if complement {
                nb.toggle_range(..);
                nb.set(u, false);
            }
            nb.intersect_with(&left);
            for w in nb.ones().collect::<Vec<_>>() {
                left.set(w, false);
                comp.insert(w);
                stack.push(w);
            }
        }
        out.push(comp);
    }
    out
}

/// Smallest module of `g[within]` containing `seed`.
fn module_closure(g: &Graph, within: &FixedBitSet, seed: &FixedBitSet) -> FixedBitSet {
    let mut set = seed.clone();
    loop {
        let size = set.count_ones(..);
        let splitters: Vec<usize> = within
            .difference(&set)
            .filter(|&z| {
                let seen = g.neighbors(z).intersection(&set).count();
                seen != 0 && seen != size
            })
            .collect();
        if splitters.is_empty() {
            return set;
        }
        for z in splitters {
            set.insert(z);
        }
    }
}

fn build(g: &Graph, set: &FixedBitSet) -> DecompositionTree {
    let verts: Vec<usize> = set.ones().collect();
    if verts.len() == 1 {
        return DecompositionTree::Leaf(verts[0]);
    }
    let (kind, parts) = {
        let comps = components(g, set, false);
        if comps.len() > 1 {
            (NodeKind::Parallel, comps)
        } else {
            let co = components(g, set, true);
            if co.len() > 1 {
                (NodeKind::Series, co)
            } else {
                (NodeKind::Prime, maximal_modules(g, set, &verts))
            }
        }
    };
    let reps: Vec<usize> = parts.iter().map(|p| p.ones().next().unwrap()).collect();
    let quotient = g.induced(&reps);
    let children = parts.iter().map(|p| build(g, p)).collect();
    DecompositionTree::Node {
        kind,
        vertices: verts,
        quotient,
        children,
    }
}

/// Partition of a set inducing a connected, co-connected graph into its
/// maximal proper modules.
fn maximal_modules(g: &Graph, set: &FixedBitSet, verts: &[usize]) -> Vec<FixedBitSet> {
    let total = verts.len();
    let mut assigned = FixedBitSet::with_capacity(g.order());
    let mut parts = Vec::new();
    for &v in verts {
        if assigned.contains(v) {
            continue;
        }
        let mut part = FixedBitSet::with_capacity(g.order());
        part.insert(v);
        for &w in verts {
            if w == v || part.contains(w) {
                continue;
            }
            let mut seed = FixedBitSet::with_capacity(g.order());
            seed.insert(v);
            seed.insert(w);
            let c = module_closure(g, set, &seed);
            if c.count_ones(..) < total {
                part.union_with(&c);
            }
        }
        assigned.union_with(&part);
        parts.push(part);
    }
    parts
}

pub fn modular_decomposition(g: &Graph) -> Result<DecompositionTree> {
    if g.order() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut all = FixedBitSet::with_capacity(g.order());
    all.insert_range(..);
    Ok(build(g, &all))
}
