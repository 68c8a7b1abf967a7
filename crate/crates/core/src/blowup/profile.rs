//! Positive profiles: which small structures occur with positive density.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde_json::{json, Value};

use super::mask::{prune_spec, random_mask, Child, MaskNode, PrunedSpec};
use super::sample::{rng, uniform_index};
use super::spec::BlowupSpec;
use crate::canon::{canonize_unchecked, CanonicalCode};
use crate::embed::{embeds, for_each_embedding};
use crate::enumerate::{graphs_of_order, structures_of_size};
use crate::error::{Error, Result};
use crate::substitution::{compose, Family, DEFAULT_BUDGET};
use crate::structure::Structure;
use rand::RngCore;

/// Largest structure size a profile may ask for.
pub const MAX_PROFILE_SIZE: usize = 5;

/// Subset enumeration is used below this many subsets, a universe scan above.
const SUBSET_LIMIT: u128 = 20_000;

#[derive(Debug, Clone)]
pub struct ProfileReport {
    pub family: Family,
    pub k_max: usize,
    pub depth: usize,
    /// The profile at depth `depth - 1` already agrees.
    pub stable: bool,
}

impl ProfileReport {
    pub fn warning(&self) -> Option<String> {
        (!self.stable).then(|| {
            format!(
                "profile still growing at depth {}; a larger depth may add structures",
                self.depth
            )
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k_max": self.k_max,
            "depth": self.depth,
            "stable": self.stable,
            "warning": self.warning(),
            "members": family_json(&self.family),
        })
    }
}

/// Members sorted by size, as graph6 strings for graphs and JSON otherwise.
pub fn family_json(f: &Family) -> Value {
    Value::Array(f.sorted().into_iter().map(structure_json).collect())
}

pub(crate) fn structure_json(s: &Structure) -> Value {
    match s.to_graph() {
        Ok(g) => Value::String(crate::graph6::encode(&g)),
        Err(_) => serde_json::from_str(&s.to_json()).expect("structure JSON"),
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for v in start..=n - (k - cur.len()) {
            cur.push(v);
            rec(v + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Induced substructures of `g` with between 2 and `k_max` vertices, up to isomorphism.
pub(crate) fn age(g: &Structure, k_max: usize) -> Result<Vec<Structure>> {
    let mut out = Vec::new();
    for k in 2..=k_max.min(g.size()) {
        if binomial(g.size(), k) <= SUBSET_LIMIT {
            let mut seen = HashSet::new();
            for_each_subset(g.size(), k, &mut |set| {
                let s = g.restrict(set);
                if seen.insert(canonize_unchecked(&s).code) {
                    out.push(s);
                }
            });
        } else {
            let universe = if g.is_graph() {
                graphs_of_order(k)?.iter().map(|h| h.to_structure()).collect()
            } else {
                structures_of_size(g.language(), k, DEFAULT_BUDGET)?
            };
            for s in universe {
                if embeds(&s, g)? {
                    out.push(s);
                }
            }
        }
    }
    Ok(out)
}

type Profile = Arc<Vec<(CanonicalCode, Structure)>>;

struct Builder<'a> {
    src: &'a PrunedSpec,
    k_max: usize,
    depth: usize,
    base: Profile,
    memo: HashMap<(usize, usize), Profile>,
}

impl<'a> Builder<'a> {
    fn new(src: &'a PrunedSpec, k_max: usize, depth: usize) -> Self {
        let lang = src.spec().language().clone();
        let base = [0, 1]
            .into_iter()
            .filter(|&n| n <= k_max)
            .map(|n| {
                let s = Structure::empty(lang.clone(), n);
                (canonize_unchecked(&s).code, s)
            })
            .collect();
        Builder {
            src,
            k_max,
            depth,
            base: Arc::new(base),
            memo: HashMap::new(),
        }
    }

    fn profile(&mut self, state: &Child, level: usize) -> Result<Profile> {
        if level >= self.depth {
            return Ok(self.base.clone());
        }
        let key = (level, state.key());
        if let Some(p) = self.memo.get(&key) {
            return Ok(p.clone());
        }
        let g = self.src.spec().level_structure(level);
        let mut family = Family::new(self.src.spec().language().clone());
        match state {
            Child::Full => {
                let child = self.profile(&Child::Full, level + 1)?;
                self.uniform(&mut family, &g, &child)?;
            }
            Child::Node(node) => self.masked(&mut family, &g, node, level)?,
        }
        let p: Profile = Arc::new(
            family
                .entries()
                .map(|(c, s)| (c.clone(), s.clone()))
                .collect(),
        );
        self.memo.insert(key, p.clone());
        Ok(p)
    }

    fn add_all(&self, family: &mut Family, p: &Profile) {
        for (c, s) in p.iter() {
            family.insert_coded(c.clone(), s.clone());
        }
    }

    /// Every vertex of `g` has the same child profile.
    fn uniform(&self, family: &mut Family, g: &Structure, child: &Profile) -> Result<()> {
        self.add_all(family, child);
        let blocks: Vec<&Structure> = child.iter().map(|(_, s)| s).filter(|s| s.size() > 0).collect();
        for q in age(g, self.k_max)? {
            let choices = vec![blocks.clone(); q.size()];
            self.compose_all(family, &q, &choices)?;
        }
        Ok(())
    }

    fn masked(&mut self, family: &mut Family, g: &Structure, node: &Arc<MaskNode>, level: usize) -> Result<()> {
        let keep: Vec<usize> = node.survivors().iter().map(|(v, _)| *v).collect();
        let gs = g.restrict(&keep);
        if let Some(child) = node.uniform_child() {
            let child = child.clone();
            let p = self.profile(&child, level + 1)?;
            return self.uniform(family, &gs, &p);
        }
        let mut children = Vec::with_capacity(keep.len());
        for (_, c) in node.survivors() {
            let p = self.profile(c, level + 1)?;
            self.add_all(family, &p);
            children.push((c.key(), p));
        }
        for q in age(&gs, self.k_max)? {
            let mut maps = Vec::new();
            let mut seen = HashSet::new();
            for_each_embedding(&q, &gs, |f| {
                let keys: Vec<usize> = f.iter().map(|&s| children[s].0).collect();
                if seen.insert(keys) {
                    maps.push(f.to_vec());
                }
                true
            })?;
            for f in maps {
                let choices: Vec<Vec<&Structure>> = f
                    .iter()
                    .map(|&s| children[s].1.iter().map(|(_, b)| b).filter(|b| b.size() > 0).collect())
                    .collect();
                self.compose_all(family, &q, &choices)?;
            }
        }
        Ok(())
    }

    /// Adds `q[b_1, ..., b_q]` for every choice of blocks with total size at most `k_max`.
    fn compose_all(&self, family: &mut Family, q: &Structure, choices: &[Vec<&Structure>]) -> Result<()> {
        fn rec<'s>(
            i: usize,
            budget: usize,
            choices: &[Vec<&'s Structure>],
            picked: &mut Vec<&'s Structure>,
            q: &Structure,
            family: &mut Family,
        ) -> Result<()> {
            if i == choices.len() {
                let s = compose(q, picked)?;
                let code = canonize_unchecked(&s).code;
                family.insert_coded(code, s);
                return Ok(());
            }
            let rest = choices.len() - i - 1;
            for b in &choices[i] {
                if b.size() + rest <= budget {
                    picked.push(b);
                    rec(i + 1, budget - b.size(), choices, picked, q, family)?;
                    picked.pop();
                }
            }
            Ok(())
        }
        rec(0, self.k_max, choices, &mut Vec::new(), q, family)
    }
}

fn profile_at(src: &PrunedSpec, k_max: usize, depth: usize) -> Result<Family> {
    let mut b = Builder::new(src, k_max, depth);
    let p = b.profile(src.root(), 0)?;
    let mut f = Family::new(src.spec().language().clone());
    b.add_all(&mut f, &p);
    Ok(f)
}

/// Structures on at most `k_max` vertices realised by some assignment of
/// their vertices to cells resolved within `depth` levels.
pub fn positive_profile(src: &PrunedSpec, k_max: usize, depth: usize) -> Result<ProfileReport> {
    if k_max > MAX_PROFILE_SIZE {
        return Err(Error::TooLarge {
            what: "profile size",
            size: k_max,
            limit: MAX_PROFILE_SIZE,
        });
    }
    let family = profile_at(src, k_max, depth)?;
    let stable = depth > src.depth() && profile_at(src, k_max, depth - 1)? == family;
    Ok(ProfileReport {
        family,
        k_max,
        depth,
        stable,
    })
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Persistent,
    Witness {
        trial: usize,
        mask: Child,
        structure: Structure,
    },
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub verdict: Verdict,
    pub k_max: usize,
    pub trials: usize,
    pub depth: usize,
}

impl ProbeReport {
    pub fn to_json(&self) -> Value {
        let verdict = match &self.verdict {
            Verdict::Persistent => json!({ "kind": "persistent", "up_to": self.k_max }),
            Verdict::Witness {
                trial,
                mask,
                structure,
            } => json!({
                "kind": "witness",
                "trial": trial,
                "mask": mask.to_json(),
                "structure": structure_json(structure),
            }),
        };
        json!({ "k_max": self.k_max, "trials": self.trials, "depth": self.depth, "verdict": verdict })
    }
}

/// Profile depth used by [`persistence_probe`].
pub const PROBE_DEPTH: usize = 12;

/// Compares the profile under random masks of depth 1 to 4 with the unmasked one.
pub fn persistence_probe(spec: &BlowupSpec, k_max: usize, trials: usize, seed: u64) -> Result<ProbeReport> {
    let depth = PROBE_DEPTH;
    let full = positive_profile(&PrunedSpec::full(spec.clone()), k_max, depth)?.family;
    let mut r = rng(seed);
    for trial in 0..trials {
        let d = 1 + uniform_index(r.next_u64(), 4);
        let mask = random_mask(spec, d, &mut r)?;
        let pruned = prune_spec(spec, mask.clone())?;
        let masked = profile_at(&pruned, k_max, depth + d)?;
        if let Some(s) = full.sorted().into_iter().find(|s| {
            !masked.contains_code(&canonize_unchecked(s).code)
        }) {
            return Ok(ProbeReport {
                verdict: Verdict::Witness {
                    trial,
                    mask,
                    structure: s.clone(),
                },
                k_max,
                trials: trial + 1,
                depth,
            });
        }
    }
    Ok(ProbeReport {
        verdict: Verdict::Persistent,
        k_max,
        trials,
        depth,
    })
}
