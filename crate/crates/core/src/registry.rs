//! Named strategies looked up at runtime: hereditary graph classes, graph
//! generators, blow-up level rules and verification suites.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::blowup::{CycleQuadratic, LevelRule};
use crate::embed::embeds;
use crate::error::{Error, Result};
use crate::families::{self, is_cograph, is_perfect};
use crate::structure::Graph;
use crate::verify::{self, VerifySuite};

/// A string-keyed table of trait objects.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<String, Arc<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Adds or replaces the entry under `name`.
    pub fn register(&mut self, name: &str, item: Arc<T>) -> &mut Self {
        self.entries.insert(name.to_string(), item);
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries.get(name).cloned().ok_or_else(|| {
            Error::BadParameter(format!(
                "unknown {} `{name}` (known: {})",
                self.kind,
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Arc<T>)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }
}

pub trait GraphClass: Send + Sync {
    fn contains(&self, g: &Graph) -> Result<bool>;
}

pub trait GraphGenerator: Send + Sync {
    fn generate(&self, n: usize) -> Result<Graph>;
}

impl<F: Fn(&Graph) -> Result<bool> + Send + Sync> GraphClass for F {
    fn contains(&self, g: &Graph) -> Result<bool> {
        self(g)
    }
}

struct Named(&'static str);

impl GraphGenerator for Named {
    fn generate(&self, n: usize) -> Result<Graph> {
        families::generate(self.0, n)
    }
}

fn free_of(h: Graph) -> impl Fn(&Graph) -> Result<bool> + Send + Sync {
    let h = h.to_structure();
    move |g: &Graph| Ok(!embeds(&h, &g.to_structure())?)
}

pub fn graph_classes() -> Registry<dyn GraphClass> {
    let mut r: Registry<dyn GraphClass> = Registry::new("graph class");
    r.register("cograph", Arc::new(is_cograph))
        .register("perfect", Arc::new(is_perfect))
        .register("p4-free", Arc::new(free_of(families::path(4))))
        .register("triangle-free", Arc::new(free_of(Graph::complete(3))));
    r
}

pub fn generators() -> Registry<dyn GraphGenerator> {
    let mut r: Registry<dyn GraphGenerator> = Registry::new("generator");
    for name in families::GENERATORS {
        r.register(name, Arc::new(Named(name)));
    }
    r
}

pub fn level_rules() -> Registry<dyn LevelRule> {
    let mut r: Registry<dyn LevelRule> = Registry::new("level rule");
    let c: Arc<dyn LevelRule> = Arc::new(CycleQuadratic);
    r.register(c.name(), c.clone());
    r
}

pub fn suites() -> Registry<dyn VerifySuite> {
    let mut r: Registry<dyn VerifySuite> = Registry::new("suite");
    for s in verify::builtin_suites() {
        r.register(s.name(), s.clone());
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::cycle;

    #[test]
    fn lookups() {
        let classes = graph_classes();
        let c5 = cycle(5).unwrap();
        assert!(!classes.get("cograph").unwrap().contains(&c5).unwrap());
        assert!(classes.get("triangle-free").unwrap().contains(&c5).unwrap());
        assert!(classes.get("nope").is_err());
        let g = generators().get("Gn").unwrap().generate(6).unwrap();
        assert_eq!(g.order(), 10);
        assert_eq!(level_rules().get("cycle-quadratic").unwrap().size(2), 9);
        let mut custom = generators();
        custom.register("star", Arc::new(Star));
        assert_eq!(custom.get("star").unwrap().generate(4).unwrap().edge_count(), 3);
    }

    struct Star;

    impl GraphGenerator for Star {
        fn generate(&self, n: usize) -> Result<Graph> {
            let e: Vec<_> = (1..n).map(|i| (0, i)).collect();
            Ok(Graph::from_edges(n, &e))
        }
    }
}
