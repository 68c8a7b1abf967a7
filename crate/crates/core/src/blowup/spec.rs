//! Level sequences of recursive blow-ups.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph6;
use crate::structure::{validate_structure, Graph, Language, RawStructure, Structure};
use crate::substitution::compose;

/// `max{m : 2^m divides l + 1}`, the ruler sequence scheduling repeated bases.
pub fn mell(l: usize) -> usize {
    (l + 1).trailing_zeros() as usize
}

/// A computable rule producing the level structure at each index.
pub trait LevelRule: Send + Sync {
    fn name(&self) -> &str;
    fn language(&self) -> Arc<Language>;
    fn level(&self, index: usize) -> Structure;

    fn size(&self, index: usize) -> usize {
        self.level(index).size()
    }
}

/// Cycles `C_{l^2 + 5}`.
pub struct CycleQuadratic;

impl LevelRule for CycleQuadratic {
    fn name(&self) -> &str {
        "cycle-quadratic"
    }

    fn language(&self) -> Arc<Language> {
        Language::graph()
    }

    fn level(&self, index: usize) -> Structure {
        let n = index * index + 5;
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).to_structure()
    }

    fn size(&self, index: usize) -> usize {
        index * index + 5
    }
}

#[derive(Clone)]
pub enum Tail {
    Constant(Arc<Structure>),
    Periodic(Vec<Arc<Structure>>),
    /// Index `j` uses base `min(mell(j), t - 1)`.
    Repeating(Vec<Arc<Structure>>),
    Rule(Arc<dyn LevelRule>),
}

impl fmt::Debug for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::Constant(g) => f.debug_tuple("Constant").field(&g.size()).finish(),
            Tail::Periodic(v) => f.debug_tuple("Periodic").field(&v.len()).finish(),
            Tail::Repeating(v) => f.debug_tuple("Repeating").field(&v.len()).finish(),
            Tail::Rule(r) => f.debug_tuple("Rule").field(&r.name()).finish(),
        }
    }
}

/// Level structures `G_0, G_1, ...`: an explicit prefix followed by a tail.
#[derive(Clone, Debug)]
pub struct BlowupSpec {
    prefix: Vec<Arc<Structure>>,
    tail: Tail,
    /// Tail index of the first level after the prefix.
    offset: usize,
    language: Arc<Language>,
}

fn check_level(s: &Structure, lang: &Arc<Language>) -> Result<()> {
    if s.size() < 2 {
        return Err(Error::BadParameter(format!(
            "level structures need at least 2 vertices, got {}",
            s.size()
        )));
    }
    if **s.language() != **lang {
        return Err(Error::LanguageMismatch);
    }
    Ok(())
}

impl BlowupSpec {
    pub fn new(prefix: Vec<Structure>, tail: Tail) -> Result<Self> {
        let language = match &tail {
            Tail::Constant(g) => g.language().clone(),
            Tail::Periodic(v) | Tail::Repeating(v) => v
                .first()
                .ok_or_else(|| Error::BadParameter("empty tail base".into()))?
                .language()
                .clone(),
            Tail::Rule(r) => r.language(),
        };
        if language.predicates().iter().any(|p| p.arity < 2) {
            return Err(Error::InvalidLanguage(
                "blow-ups need predicates of arity at least 2".into(),
            ));
        }
        match &tail {
            Tail::Constant(g) => check_level(g, &language)?,
            Tail::Periodic(v) | Tail::Repeating(v) => {
                for g in v {
                    check_level(g, &language)?;
                }
            }
            Tail::Rule(r) => check_level(&r.level(0), &language)?,
        }
        for g in &prefix {
            check_level(g, &language)?;
        }
        Ok(BlowupSpec {
            prefix: prefix.into_iter().map(Arc::new).collect(),
            tail,
            offset: 0,
            language,
        })
    }

    pub fn constant(g: Structure) -> Result<Self> {
        BlowupSpec::new(vec![], Tail::Constant(Arc::new(g)))
    }

    pub fn periodic(base: Vec<Structure>) -> Result<Self> {
        BlowupSpec::new(vec![], Tail::Periodic(base.into_iter().map(Arc::new).collect()))
    }

    pub fn repeating(base: Vec<Structure>) -> Result<Self> {
        BlowupSpec::new(vec![], Tail::Repeating(base.into_iter().map(Arc::new).collect()))
    }

    pub fn rule(rule: Arc<dyn LevelRule>) -> Result<Self> {
        BlowupSpec::new(vec![], Tail::Rule(rule))
    }

    pub fn language(&self) -> &Arc<Language> {
        &self.language
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn level_structure(&self, l: usize) -> Arc<Structure> {
        if l < self.prefix.len() {
            return self.prefix[l].clone();
        }
        let j = l - self.prefix.len() + self.offset;
        match &self.tail {
            Tail::Constant(g) => g.clone(),
            Tail::Periodic(v) => v[j % v.len()].clone(),
            Tail::Repeating(v) => v[mell(j).min(v.len() - 1)].clone(),
            Tail::Rule(r) => Arc::new(r.level(j)),
        }
    }

    pub fn level_size(&self, l: usize) -> usize {
        match &self.tail {
            Tail::Rule(r) if l >= self.prefix.len() => r.size(l - self.prefix.len() + self.offset),
            _ => self.level_structure(l).size(),
        }
    }

    /// The sequence with its first `t` levels removed.
    pub fn shift(&self, t: usize) -> BlowupSpec {
        let mut s = self.clone();
        let dropped = t.min(s.prefix.len());
        s.prefix.drain(..dropped);
        s.offset += t - dropped;
        s
    }

    /// For constant and periodic tails, the period `p` such that level `l`
    /// equals level `l + p` for every `l` past the prefix.
    pub fn period(&self) -> Option<usize> {
        match &self.tail {
            Tail::Constant(_) => Some(1),
            Tail::Periodic(v) => Some(v.len()),
            Tail::Repeating(_) | Tail::Rule(_) => None,
        }
    }

    /// The finite conservative blow-up over levels `0..d`.
    pub fn finite_blowup(&self, d: usize) -> Result<Structure> {
        let mut total: usize = 1;
        for l in 0..d {
            total = total.saturating_mul(self.level_size(l));
            if total > MAX_FINITE_BLOWUP {
                return Err(Error::TooLarge {
                    what: "finite blow-up",
                    size: total,
                    limit: MAX_FINITE_BLOWUP,
                });
            }
        }
        let mut r = Structure::empty(self.language.clone(), 1);
        for l in (0..d).rev() {
            let g = self.level_structure(l);
            let blocks = vec![&r; g.size()];
            r = compose(&g, &blocks)?;
        }
        Ok(r)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let enc = |s: &Arc<Structure>| level_json(s);
        let tail = match &self.tail {
            Tail::Constant(g) => serde_json::json!({"kind": "constant", "base": [enc(g)]}),
            Tail::Periodic(v) => {
                serde_json::json!({"kind": "periodic", "base": v.iter().map(enc).collect::<Vec<_>>()})
            }
            Tail::Repeating(v) => {
                serde_json::json!({"kind": "repeating", "base": v.iter().map(enc).collect::<Vec<_>>()})
            }
            Tail::Rule(r) => serde_json::json!({"kind": "rule", "name": r.name()}),
        };
        serde_json::json!({
            "prefix": self.prefix.iter().map(enc).collect::<Vec<_>>(),
            "tail": tail,
            "offset": self.offset,
        })
    }
}

/// Vertex cap for [`BlowupSpec::finite_blowup`].
pub const MAX_FINITE_BLOWUP: usize = 1 << 14;

fn level_json(s: &Structure) -> serde_json::Value {
    match s.to_graph() {
        Ok(g) => serde_json::Value::String(graph6::encode(&g)),
        Err(_) => serde_json::to_value(s.to_raw()).expect("structure serializes"),
    }
}

#[derive(Deserialize, Serialize)]
#[serde(untagged)]
enum RawLevel {
    Graph6(String),
    Structure(RawStructure),
}

#[derive(Deserialize)]
struct RawTail {
    kind: String,
    #[serde(default)]
    base: Vec<RawLevel>,
    #[serde(default)]
    name: Option<String>,
}

#[derive(Deserialize)]
struct RawSpec {
    #[serde(default)]
    prefix: Vec<RawLevel>,
    tail: RawTail,
    #[serde(default)]
    offset: usize,
}

fn level_from_raw(r: &RawLevel) -> Result<Structure> {
    match r {
        RawLevel::Graph6(s) => Ok(graph6::decode(s)?.to_structure()),
        RawLevel::Structure(raw) => validate_structure(raw),
    }
}

/// Parses a spec file; `rules` resolves rule names.
pub fn spec_from_json(
    text: &str,
    rules: &dyn Fn(&str) -> Option<Arc<dyn LevelRule>>,
) -> Result<BlowupSpec> {
    let raw: RawSpec = serde_json::from_str(text)?;
    let base = raw
        .tail
        .base
        .iter()
        .map(|b| level_from_raw(b).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    let tail = match raw.tail.kind.as_str() {
        "constant" => {
            if base.len() != 1 {
                return Err(Error::BadParameter("constant tail takes one base level".into()));
            }
            Tail::Constant(base[0].clone())
        }
        "periodic" => Tail::Periodic(base),
        "repeating" => Tail::Repeating(base),
        "rule" => {
            let name = raw
                .tail
                .name
                .ok_or_else(|| Error::BadParameter("rule tail needs a name".into()))?;
            Tail::Rule(rules(&name).ok_or_else(|| Error::BadParameter(format!("unknown rule `{name}`")))?)
        }
        other => return Err(Error::BadParameter(format!("unknown tail kind `{other}`"))),
    };
    let prefix = raw
        .prefix
        .iter()
        .map(level_from_raw)
        .collect::<Result<Vec<_>>>()?;
    let mut spec = BlowupSpec::new(prefix, tail)?;
    spec.offset = raw.offset;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::are_isomorphic;

    fn c4() -> Structure {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).to_structure()
    }

    #[test]
    fn ruler_sequence() {
        assert_eq!(mell(0), 0);
        assert_eq!(mell(3), 2);
        assert_eq!((0..8).map(mell).collect::<Vec<_>>(), vec![0, 1, 0, 2, 0, 1, 0, 3]);
        for m in 0..=10 {
            for l in 0..=1000 {
                assert!((l + 1..=l + (2 << m)).any(|x| mell(x) == m), "m={m} l={l}");
            }
        }
        for m in 0..=10 {
            let l = (1 << m) - 1;
            assert_eq!(mell(l), m);
            assert!((l + 1..=l + (1 << m)).all(|x| mell(x) != m));
        }
    }

    #[test]
    fn scheduling() {
        let k2 = Graph::complete(2).to_structure();
        let e2 = Graph::new(2).to_structure();
        let rep = BlowupSpec::repeating(vec![k2.clone(), e2.clone()]).unwrap();
        assert_eq!(*rep.level_structure(0), k2);
        assert_eq!(*rep.level_structure(1), e2);
        assert_eq!(*rep.level_structure(2), k2);
        assert_eq!(*rep.level_structure(3), e2);
        let c = BlowupSpec::constant(c4()).unwrap();
        assert_eq!(*c.level_structure(17), c4());
        let per = BlowupSpec::periodic(vec![k2.clone(), e2.clone()]).unwrap();
        assert_eq!(*per.shift(1).level_structure(0), e2);
        let ex = BlowupSpec::new(vec![c4()], Tail::Constant(Arc::new(e2.clone()))).unwrap();
        assert_eq!(*ex.shift(1).level_structure(0), e2);
        assert_eq!(*rep.shift(2).level_structure(1), e2);
        assert!(BlowupSpec::constant(Graph::new(1).to_structure()).is_err());
    }

    #[test]
    fn finite_blowups() {
        let c = BlowupSpec::constant(c4()).unwrap();
        assert_eq!(c.finite_blowup(1).unwrap(), c4());
        let r2 = c.finite_blowup(2).unwrap().to_graph().unwrap();
        assert_eq!(r2.order(), 16);
        assert_eq!(r2.edge_count(), 80);
        let k = BlowupSpec::constant(Graph::complete(2).to_structure()).unwrap();
        assert!(are_isomorphic(&k.finite_blowup(3).unwrap(), &Graph::complete(8).to_structure()).unwrap());
        assert!(c.finite_blowup(8).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"tail":{"kind":"repeating","base":["A_","A?"]},"prefix":["Dhc"]}"#;
        let spec = spec_from_json(text, &|_| None).unwrap();
        assert_eq!(spec.level_structure(0).size(), 5);
        assert_eq!(*spec.level_structure(1), Graph::complete(2).to_structure());
        let back = spec_from_json(&spec.to_json().to_string(), &|_| None).unwrap();
        assert_eq!(*back.level_structure(2), *spec.level_structure(2));
        let rule = spec_from_json(r#"{"tail":{"kind":"rule","name":"cycle-quadratic"}}"#, &|n| {
            (n == "cycle-quadratic").then(|| Arc::new(CycleQuadratic) as Arc<dyn LevelRule>)
        })
        .unwrap();
        assert_eq!(rule.level_size(3), 14);
        assert_eq!(rule.shift(2).level_structure(0).size(), 9);
    }
}
