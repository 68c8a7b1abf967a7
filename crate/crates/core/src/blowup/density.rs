//! Induced motif densities in blow-up limits.
//!
//! With `h = |H|` and level structure `G` of size `g`, the density satisfies
//! `θ_l(H) = g^{-h} Σ_π emb(Q_π, G) Π_B θ_{l+1}(H|B)`, where `π` ranges over
//! set partitions of `V(H)` whose quotient `Q_π` is well defined (tuples
//! across distinct blocks agree, tuples touching a block twice without lying
//! inside it are false). The one-block partition gives the self term
//! `g^{1-h} θ_{l+1}(H)`; every other term involves strictly smaller motifs.

use std::collections::HashMap;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

use super::mask::{Child, MaskNode, PrunedSpec};
use crate::canon::{canonize_unchecked, CanonicalCode};
use crate::embed::{count_embeddings, for_each_embedding};
use crate::error::{Error, Result};
use crate::structure::{for_each_injective, Structure};

/// Largest motif accepted by [`tind_blowup`].
pub const MAX_MOTIF: usize = 6;

/// Levels explored before interval refinement gives up.
const MAX_INTERVAL_DEPTH: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Exact,
    /// Bracket of width at most the given tolerance.
    Interval(BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityInterval {
    #[serde(serialize_with = "crate::ser_rational")]
    pub lower: BigRational,
    #[serde(serialize_with = "crate::ser_rational")]
    pub upper: BigRational,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityValue {
    Exact(BigRational),
    Interval(DensityInterval),
}

impl DensityValue {
    pub fn lower(&self) -> &BigRational {
        match self {
            DensityValue::Exact(v) => v,
            DensityValue::Interval(i) => &i.lower,
        }
    }

    pub fn upper(&self) -> &BigRational {
        match self {
            DensityValue::Exact(v) => v,
            DensityValue::Interval(i) => &i.upper,
        }
    }
}

/// A partition of a motif with at least two blocks and a consistent quotient.
struct Term {
    quotient: Structure,
    quotient_code: CanonicalCode,
    blocks: Vec<CanonicalCode>,
    sizes: Vec<usize>,
}

struct Motif {
    size: usize,
    terms: Vec<Term>,
}

/// Calls `f` with the block label of each vertex, for every set partition of `0..n`.
pub(crate) fn for_each_partition(n: usize, f: &mut dyn FnMut(&[usize], usize)) {
    fn rec(i: usize, n: usize, labels: &mut Vec<usize>, blocks: usize, f: &mut dyn FnMut(&[usize], usize)) {
        if i == n {
            f(labels, blocks);
            return;
        }
        for b in 0..=blocks {
            labels.push(b);
            rec(i + 1, n, labels, blocks.max(b + 1), f);
            labels.pop();
        }
    }
    rec(0, n, &mut Vec::with_capacity(n), 0, f);
}

/// The quotient of `h` by a partition, or `None` when it is not well defined.
pub(crate) fn quotient(h: &Structure, labels: &[usize], blocks: usize) -> Option<Structure> {
    let mut q = Structure::empty(h.language().clone(), blocks);
    let mut seen: HashMap<(usize, Vec<usize>), bool> = HashMap::new();
    for p in 0..h.language().len() {
        let k = h.language().arity(p);
        let mut ok = true;
        for_each_injective(h.size(), k, |t| {
            if !ok {
                return;
            }
            let c: Vec<usize> = t.iter().map(|&v| labels[v]).collect();
            let distinct = crate::structure::is_injective(&c);
            let same = c.iter().all(|&x| x == c[0]);
            let truth = h.holds(p, t);
            if distinct {
                match seen.insert((p, c.clone()), truth) {
                    Some(prev) if prev != truth => ok = false,
                    _ => {
                        if truth {
                            q.insert_unchecked(p, &c);
                        }
                    }
                }
            } else if !same && truth {
                ok = false;
            }
        });
        if !ok {
            return None;
        }
    }
    Some(q)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct StateKey {
    level: usize,
    node: usize,
}

struct Engine<'a> {
    src: &'a PrunedSpec,
    exact: bool,
    cutoff: usize,
    motifs: HashMap<CanonicalCode, Arc<Motif>>,
    structures: HashMap<CanonicalCode, Structure>,
    levels: HashMap<StateKey, Arc<Structure>>,
    embeddings: HashMap<(StateKey, CanonicalCode), BigInt>,
    memo: HashMap<(StateKey, CanonicalCode), (BigRational, BigRational)>,
}

type Pair = (BigRational, BigRational);

fn ratio(a: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(a))
}

fn pow(x: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

impl<'a> Engine<'a> {
    fn new(src: &'a PrunedSpec, exact: bool, cutoff: usize) -> Self {
        Engine {
            src,
            exact,
            cutoff,
            motifs: HashMap::new(),
            structures: HashMap::new(),
            levels: HashMap::new(),
            embeddings: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn register(&mut self, s: Structure) -> CanonicalCode {
        let code = canonize_unchecked(&s).code;
        self.structures.entry(code.clone()).or_insert(s);
        code
    }

    fn motif(&mut self, code: &CanonicalCode) -> Arc<Motif> {
        if let Some(m) = self.motifs.get(code) {
            return m.clone();
        }
        let h = self.structures[code].clone();
        let mut raw = Vec::new();
        for_each_partition(h.size(), &mut |labels, blocks| {
            if blocks >= 2 {
                if let Some(q) = quotient(&h, labels, blocks) {
                    let parts: Vec<Vec<usize>> = (0..blocks)
                        .map(|b| (0..h.size()).filter(|&v| labels[v] == b).collect())
                        .collect();
                    raw.push((q, parts));
                }
            }
        });
        let terms = raw
            .into_iter()
            .map(|(q, parts)| {
                let sizes = parts.iter().map(Vec::len).collect();
                let blocks = parts.iter().map(|b| self.register(h.restrict(b))).collect();
                let quotient_code = canonize_unchecked(&q).code;
                Term {
                    quotient: q,
                    quotient_code,
                    blocks,
                    sizes,
                }
            })
            .collect();
        let m = Arc::new(Motif {
            size: h.size(),
            terms,
        });
        self.motifs.insert(code.clone(), m.clone());
        m
    }

    /// Level index used for caching a full state at `level`.
    fn normalize(&self, level: usize) -> usize {
        let spec = self.src.spec();
        match (self.exact, spec.period()) {
            (true, Some(p)) if level >= spec.prefix_len() => {
                spec.prefix_len() + (level - spec.prefix_len()) % p
            }
            _ => level,
        }
    }

    fn level_structure(&mut self, key: StateKey, node: Option<&MaskNode>) -> Arc<Structure> {
        if let Some(s) = self.levels.get(&key) {
            return s.clone();
        }
        let g = self.src.spec().level_structure(key.level);
        let s = match node {
            None => g,
            Some(n) => {
                let keep: Vec<usize> = n.survivors().iter().map(|(v, _)| *v).collect();
                Arc::new(g.restrict(&keep))
            }
        };
        self.levels.insert(key, s.clone());
        s
    }

    fn emb(&mut self, key: StateKey, g: &Structure, term: &Term) -> Result<BigInt> {
        let k = (key, term.quotient_code.clone());
        if let Some(c) = self.embeddings.get(&k) {
            return Ok(c.clone());
        }
        let c = BigInt::from(count_embeddings(&term.quotient, g)?);
        self.embeddings.insert(k, c.clone());
        Ok(c)
    }

    fn value(&mut self, code: &CanonicalCode, state: &Child, level: usize) -> Result<Pair> {
        let motif = self.motif(code);
        if motif.size <= 1 {
            return Ok((BigRational::one(), BigRational::one()));
        }
        match state {
            Child::Full => self.full(code, &motif, level),
            Child::Node(node) => self.masked(code, &motif, node, state.key(), level),
        }
    }

    fn full(&mut self, code: &CanonicalCode, motif: &Motif, level: usize) -> Result<Pair> {
        if !self.exact && level >= self.cutoff {
            return Ok((BigRational::zero(), BigRational::one()));
        }
        let level = self.normalize(level);
        let key = StateKey { level, node: 0 };
        if let Some(v) = self.memo.get(&(key, code.clone())) {
            return Ok(v.clone());
        }
        let spec = self.src.spec();
        if self.exact && level >= spec.prefix_len() {
            let p = spec.period().ok_or_else(|| {
                Error::UnsupportedMode("exact densities need a constant or periodic tail".into())
            })?;
            return self.solve_cycle(code, motif, level, p);
        }
        let (a, b) = self.affine(code, motif, level)?;
        let below = self.full(code, motif, level + 1)?;
        let v = (&a.0 + &b * &below.0, &a.1 + &b * &below.1);
        self.memo.insert((key, code.clone()), v.clone());
        Ok(v)
    }

    /// `(a, b)` with `θ_l = a + b θ_{l+1}` at a full level.
    fn affine(&mut self, _code: &CanonicalCode, motif: &Motif, level: usize) -> Result<(Pair, BigRational)> {
        let key = StateKey { level, node: 0 };
        let g = self.level_structure(key, None);
        let size = g.size();
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for term in &motif.terms {
            let e = self.emb(key, &g, term)?;
            if e.is_zero() {
                continue;
            }
            let (mut plo, mut phi) = (BigRational::from_integer(e.clone()), BigRational::from_integer(e));
            for b in &term.blocks {
                let (l, h) = self.value(b, &Child::Full, level + 1)?;
                plo *= l;
                phi *= h;
            }
            lo += plo;
            hi += phi;
        }
        let scale = pow(&ratio(size), motif.size).recip();
        let b = pow(&ratio(size), motif.size - 1).recip();
        Ok(((lo * &scale, hi * &scale), b))
    }

    fn solve_cycle(&mut self, code: &CanonicalCode, motif: &Motif, level: usize, p: usize) -> Result<Pair> {
        let start = self.src.spec().prefix_len();
        let mut coeffs = Vec::with_capacity(p);
        for r in 0..p {
            let (a, b) = self.affine(code, motif, start + r)?;
            coeffs.push((a.0, b));
        }
        let prod_b = coeffs.iter().fold(BigRational::one(), |acc, (_, b)| acc * b);
        let denom = BigRational::one() - &prod_b;
        let mut result = None;
        for r in 0..p {
            let mut acc = BigRational::zero();
            let mut factor = BigRational::one();
            for i in 0..p {
                let (a, b) = &coeffs[(r + i) % p];
                acc += &factor * a;
                factor *= b;
            }
            let theta = acc / &denom;
            let key = StateKey {
                level: start + r,
                node: 0,
            };
            self.memo
                .insert((key, code.clone()), (theta.clone(), theta.clone()));
            if start + r == level {
                result = Some((theta.clone(), theta));
            }
        }
        Ok(result.expect("level lies on the cycle"))
    }

    fn masked(
        &mut self,
        code: &CanonicalCode,
        motif: &Motif,
        node: &Arc<MaskNode>,
        ptr: usize,
        level: usize,
    ) -> Result<Pair> {
        let key = StateKey { level, node: ptr };
        if let Some(v) = self.memo.get(&(key, code.clone())) {
            return Ok(v.clone());
        }
        let g = self.level_structure(key, Some(node));
        let survivors = node.survivors();
        let weights = self.src.weights(node, level);
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for ((_, child), w) in survivors.iter().zip(&weights) {
            let (l, h) = self.value(code, child, level + 1)?;
            let wh = pow(w, motif.size);
            lo += &wh * l;
            hi += &wh * h;
        }
        if let Some(child) = node.uniform_child() {
            let child = child.clone();
            let w = &weights[0];
            for term in &motif.terms {
                let e = self.emb(key, &g, term)?;
                if e.is_zero() {
                    continue;
                }
                let mut plo = BigRational::from_integer(e) * pow(w, motif.size);
                let mut phi = plo.clone();
                for b in &term.blocks {
                    let (l, h) = self.value(b, &child, level + 1)?;
                    plo *= l;
                    phi *= h;
                }
                lo += plo;
                hi += phi;
            }
        } else {
            for term in &motif.terms {
                let mut maps = Vec::new();
                for_each_embedding(&term.quotient, &g, |f| {
                    maps.push(f.to_vec());
                    true
                })?;
                for f in maps {
                    let mut plo = BigRational::one();
                    let mut phi = BigRational::one();
                    for (i, b) in term.blocks.iter().enumerate() {
                        let s = f[i];
                        let factor = pow(&weights[s], term.sizes[i]);
                        let (l, h) = self.value(b, &survivors[s].1, level + 1)?;
                        plo *= &factor * l;
                        phi *= factor * h;
                    }
                    lo += plo;
                    hi += phi;
                }
            }
        }
        let v = (lo, hi);
        self.memo.insert((key, code.clone()), v.clone());
        Ok(v)
    }
}

fn binom2(h: usize) -> BigRational {
    ratio(h * h.saturating_sub(1) / 2)
}

/// Induced density `tind(H, ·)` of a motif in a (masked) blow-up limit.
pub fn tind_blowup(h: &Structure, src: &PrunedSpec, mode: &Mode) -> Result<DensityValue> {
    if h.size() > MAX_MOTIF {
        return Err(Error::MotifTooLarge {
            size: h.size(),
            limit: MAX_MOTIF,
        });
    }
    if **h.language() != **src.spec().language() {
        return Err(Error::LanguageMismatch);
    }
    match mode {
        Mode::Exact => {
            if src.spec().period().is_none() {
                return Err(Error::UnsupportedMode(
                    "exact densities need a constant or periodic tail".into(),
                ));
            }
            let mut e = Engine::new(src, true, 0);
            let code = e.register(h.clone());
            let (v, _) = e.value(&code, src.root(), 0)?;
            Ok(DensityValue::Exact(v))
        }
        Mode::Interval(eps) => {
            if *eps <= BigRational::zero() {
                return Err(Error::BadParameter("tolerance must be positive".into()));
            }
            let start = src.depth();
            let mut cutoff = start;
            let mut mass = binom2(h.size());
            while mass > *eps && cutoff < MAX_INTERVAL_DEPTH {
                mass /= ratio(src.spec().level_size(cutoff));
                cutoff += 1;
            }
            loop {
                let mut e = Engine::new(src, false, cutoff);
                let code = e.register(h.clone());
                let (lower, upper) = e.value(&code, src.root(), 0)?;
                if &upper - &lower <= *eps || cutoff >= MAX_INTERVAL_DEPTH {
                    return Ok(DensityValue::Interval(DensityInterval {
                        lower,
                        upper,
                        depth: cutoff,
                    }));
                }
                cutoff += 4;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::mask::prune_spec;
    use crate::blowup::spec::BlowupSpec;
    use crate::embed::densities;
    use crate::enumerate::graphs_up_to;
    use crate::structure::Graph;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn c4() -> Structure {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).to_structure()
    }

    fn exact(h: &Structure, spec: &BlowupSpec) -> BigRational {
        match tind_blowup(h, &PrunedSpec::full(spec.clone()), &Mode::Exact).unwrap() {
            DensityValue::Exact(v) => v,
            _ => unreachable!(),
        }
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..=6)
            .map(|n| {
                let mut c = 0;
                for_each_partition(n, &mut |_, _| c += 1);
                c
            })
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn exact_examples() {
        let spec = BlowupSpec::constant(c4()).unwrap();
        let k2 = Graph::complete(2).to_structure();
        // t = 1/2 + t/4.
        assert_eq!(exact(&k2, &spec), q(2, 3));
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).to_structure();
        assert_eq!(exact(&p4, &spec), q(0, 1));
        let clique = BlowupSpec::constant(k2.clone()).unwrap();
        assert_eq!(exact(&k2, &clique), q(1, 1));
        assert_eq!(exact(&Graph::complete(5).to_structure(), &clique), q(1, 1));
    }

    #[test]
    fn densities_sum_to_one() {
        let spec = BlowupSpec::periodic(vec![c4(), Graph::new(2).to_structure()]).unwrap();
        for k in 2..=4 {
            let mut total = BigRational::zero();
            for g in graphs_up_to(k).unwrap().into_iter().filter(|g| g.order() == k) {
                let s = g.to_structure();
                let d = densities(&s, &s).unwrap();
                let scale = &d.p / &d.tind;
                total += exact(&s, &spec) * scale;
            }
            assert_eq!(total, q(1, 1), "k={k}");
        }
    }

    #[test]
    fn interval_brackets_exact() {
        let spec = BlowupSpec::constant(c4()).unwrap();
        let src = PrunedSpec::full(spec.clone());
        let eps = q(1, 1_000_000_000);
        for h in graphs_up_to(4).unwrap().into_iter().filter(|g| g.order() >= 2) {
            let s = h.to_structure();
            let ex = exact(&s, &spec);
            let DensityValue::Interval(iv) = tind_blowup(&s, &src, &Mode::Interval(eps.clone())).unwrap() else {
                unreachable!()
            };
            assert!(iv.lower <= ex && ex <= iv.upper);
            assert!(&iv.upper - &iv.lower <= eps);
            assert!(iv.depth <= 40);
        }
    }

    #[test]
    fn masked_exact_matches_interval() {
        let spec = BlowupSpec::constant(c4()).unwrap();
        let mask = Child::from_json(&serde_json::json!([[1, [2, 3]], 2, 3])).unwrap();
        let src = prune_spec(&spec, mask).unwrap();
        let k2 = Graph::complete(2).to_structure();
        let DensityValue::Exact(ex) = tind_blowup(&k2, &src, &Mode::Exact).unwrap() else {
            unreachable!()
        };
        let iv = tind_blowup(&k2, &src, &Mode::Interval(q(1, 1 << 30))).unwrap();
        assert!(iv.lower() <= &ex && &ex <= iv.upper());
        // Uniform mask keeping the non-adjacent cells 1 and 3: the top level
        // contributes no edges, so density is the C_4 value scaled by 1/2.
        let m = Child::from_json(&serde_json::json!([1, 3])).unwrap();
        let src = prune_spec(&spec, m).unwrap();
        assert_eq!(
            tind_blowup(&k2, &src, &Mode::Exact).unwrap(),
            DensityValue::Exact(q(1, 3))
        );
    }

    #[test]
    fn unsupported_and_too_large() {
        let rep = BlowupSpec::repeating(vec![c4()]).unwrap();
        let k2 = Graph::complete(2).to_structure();
        assert!(matches!(
            tind_blowup(&k2, &PrunedSpec::full(rep), &Mode::Exact),
            Err(Error::UnsupportedMode(_))
        ));
        let spec = PrunedSpec::full(BlowupSpec::constant(c4()).unwrap());
        assert!(matches!(
            tind_blowup(&Graph::new(7).to_structure(), &spec, &Mode::Exact),
            Err(Error::MotifTooLarge { .. })
        ));
    }
}
