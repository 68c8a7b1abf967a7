//! Quantifier-free formulas over a relational language and open
//! interpretations between languages.

mod parser;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

pub use parser::parse_formula;

use crate::error::{Error, Result};
use crate::structure::{for_each_injective, is_injective, Language, Predicate, Structure};

/// Formula syntax tree. Variables are 0-based (`x1` is `0`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    True,
    Eq(usize, usize),
    Pred(usize, Vec<usize>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Iff(..) => 1,
            Expr::Implies(..) => 2,
            Expr::Or(..) => 3,
            Expr::And(..) => 4,
            Expr::Not(inner) if !matches!(**inner, Expr::Eq(..)) => 5,
            _ => 6,
        }
    }

    fn eval(&self, m: &Structure, a: &[usize]) -> bool {
        match self {
            Expr::True => true,
            Expr::Eq(i, j) => a[*i] == a[*j],
            Expr::Pred(p, vars) => {
                let t: Vec<usize> = vars.iter().map(|&v| a[v]).collect();
                is_injective(&t) && m.holds(*p, &t)
            }
            Expr::Not(e) => !e.eval(m, a),
            Expr::And(l, r) => l.eval(m, a) && r.eval(m, a),
            Expr::Or(l, r) => l.eval(m, a) || r.eval(m, a),
            Expr::Implies(l, r) => !l.eval(m, a) || r.eval(m, a),
            Expr::Iff(l, r) => l.eval(m, a) == r.eval(m, a),
        }
    }

    fn write(&self, lang: &Language, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| {
            if e.precedence() < min {
                write!(f, "(")?;
                e.write(lang, f)?;
                write!(f, ")")
            } else {
                e.write(lang, f)
            }
        };
        match self {
            Expr::True => write!(f, "T"),
            Expr::Eq(i, j) => write!(f, "x{}=x{}", i + 1, j + 1),
            Expr::Pred(p, vars) => {
                write!(f, "{}(", lang.predicates()[*p].name)?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "x{}", v + 1)?;
                }
                write!(f, ")")
            }
            Expr::Not(inner) => match **inner {
                Expr::Eq(i, j) => write!(f, "x{}!=x{}", i + 1, j + 1),
                _ => {
                    write!(f, "!")?;
                    child(inner, 5, f)
                }
            },
            Expr::And(l, r) => {
                child(l, 4, f)?;
                write!(f, " & ")?;
                child(r, 5, f)
            }
            Expr::Or(l, r) => {
                child(l, 3, f)?;
                write!(f, " | ")?;
                child(r, 4, f)
            }
            Expr::Implies(l, r) => {
                child(l, 3, f)?;
                write!(f, " -> ")?;
                child(r, 2, f)
            }
            Expr::Iff(l, r) => {
                child(l, 1, f)?;
                write!(f, " <-> ")?;
                child(r, 2, f)
            }
        }
    }
}

/// A formula together with its language and number of free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub language: Arc<Language>,
    pub k: usize,
    pub expr: Expr,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(&self.language, f)
    }
}

impl Formula {
    /// Conjunction of `parts`, or `T` when empty.
    pub fn conjunction(language: Arc<Language>, k: usize, parts: Vec<Expr>) -> Formula {
        let expr = parts
            .into_iter()
            .reduce(|l, r| Expr::And(Box::new(l), Box::new(r)))
            .unwrap_or(Expr::True);
        Formula { language, k, expr }
    }
}

/// Truth of `f` in `m` under `assignment` (1 value per free variable, 0-based
/// vertices, repeats allowed).
pub fn evaluate_formula(f: &Formula, m: &Structure, assignment: &[usize]) -> Result<bool> {
    if assignment.len() != f.k {
        return Err(Error::Arity {
            predicate: "assignment".into(),
            expected: f.k,
            found: assignment.len(),
        });
    }
    if !m.same_language(&Structure::empty(f.language.clone(), 0)) {
        return Err(Error::LanguageMismatch);
    }
    if let Some(&v) = assignment.iter().find(|&&v| v >= m.size()) {
        return Err(Error::OutOfRangeVertex {
            vertex: v + 1,
            size: m.size(),
        });
    }
    Ok(f.expr.eval(m, assignment))
}

/// The open diagram: pairwise inequalities followed by every injective tuple
/// of every predicate, positive or negated.
pub fn open_diagram(m: &Structure) -> Formula {
    let n = m.size();
    let mut parts = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            parts.push(Expr::Not(Box::new(Expr::Eq(i, j))));
        }
    }
    for p in 0..m.language().len() {
        for_each_injective(n, m.language().arity(p), |t| {
            let atom = Expr::Pred(p, t.to_vec());
            parts.push(if m.holds(p, t) {
                atom
            } else {
                Expr::Not(Box::new(atom))
            });
        });
    }
    Formula::conjunction(m.language().clone(), n, parts)
}

/// An open interpretation: each source predicate defined by a formula over
/// the target language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    source: Arc<Language>,
    target: Arc<Language>,
    defs: Vec<Formula>,
}

#[derive(Serialize, Deserialize)]
struct RawInterpretation {
    source: Vec<Predicate>,
    target: Vec<Predicate>,
    defs: BTreeMap<String, String>,
}

fn shared_language(preds: Vec<Predicate>) -> Result<Arc<Language>> {
    let lang = Language::new(preds)?;
    Ok(if lang == *Language::graph() {
        Language::graph()
    } else if lang == *Language::permutation() {
        Language::permutation()
    } else {
        Arc::new(lang)
    })
}

impl Interpretation {
    pub fn new(source: Arc<Language>, target: Arc<Language>, defs: Vec<Formula>) -> Result<Self> {
        if defs.len() != source.len() {
            return Err(Error::InvalidLanguage(format!(
                "{} definitions for {} source predicates",
                defs.len(),
                source.len()
            )));
        }
        for (p, d) in defs.iter().enumerate() {
            if *d.language != *target {
                return Err(Error::LanguageMismatch);
            }
            if d.k != source.arity(p) {
                return Err(Error::Arity {
                    predicate: source.predicates()[p].name.clone(),
                    expected: source.arity(p),
                    found: d.k,
                });
            }
        }
        Ok(Interpretation {
            source,
            target,
            defs,
        })
    }

    /// Parses definitions given as `name -> formula text`.
    pub fn from_texts(
        source: Arc<Language>,
        target: Arc<Language>,
        texts: &BTreeMap<String, String>,
    ) -> Result<Self> {
        for name in texts.keys() {
            if source.index_of(name).is_none() {
                return Err(Error::UnknownPredicate(name.clone()));
            }
        }
        let defs = source
            .predicates()
            .iter()
            .map(|p| {
                let text = texts.get(&p.name).ok_or_else(|| {
                    Error::InvalidLanguage(format!("no definition for `{}`", p.name))
                })?;
                parse_formula(text, &target, p.arity)
            })
            .collect::<Result<Vec<_>>>()?;
        Interpretation::new(source, target, defs)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawInterpretation = serde_json::from_str(text)?;
        Interpretation::from_texts(
            shared_language(raw.source)?,
            shared_language(raw.target)?,
            &raw.defs,
        )
    }

    pub fn to_json(&self) -> String {
        let raw = RawInterpretation {
            source: self.source.predicates().to_vec(),
            target: self.target.predicates().to_vec(),
            defs: self
                .source
                .predicates()
                .iter()
                .zip(&self.defs)
                .map(|(p, d)| (p.name.clone(), d.to_string()))
                .collect(),
        };
        serde_json::to_string(&raw).expect("interpretation serializes")
    }

    /// Every predicate interpreted by itself.
    pub fn identity(language: Arc<Language>) -> Self {
        let defs = (0..language.len())
            .map(|p| Formula {
                language: language.clone(),
                k: language.arity(p),
                expr: Expr::Pred(p, (0..language.arity(p)).collect()),
            })
            .collect();
        Interpretation {
            source: language.clone(),
            target: language,
            defs,
        }
    }

    /// Graph of agreements of two linear orders: an edge where `L1` and `L2` agree.
    pub fn agreement() -> &'static Interpretation {
        static AGREE: OnceLock<Interpretation> = OnceLock::new();
        AGREE.get_or_init(|| {
            let mut texts = BTreeMap::new();
            texts.insert(
                "E".to_string(),
                "x1!=x2 & (L1(x1,x2) <-> L2(x1,x2))".to_string(),
            );
            Interpretation::from_texts(Language::graph(), Language::permutation(), &texts)
                .expect("agreement formula parses")
        })
    }

    pub fn source(&self) -> &Arc<Language> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Language> {
        &self.target
    }

    pub fn defs(&self) -> &[Formula] {
        &self.defs
    }

    /// `I(M)`: same vertices, each source relation the injective tuples where
    /// its defining formula holds in `m`.
    pub fn apply(&self, m: &Structure) -> Result<Structure> {
        if **m.language() != *self.target {
            return Err(Error::LanguageMismatch);
        }
        let mut out = Structure::empty(self.source.clone(), m.size());
        for (p, d) in self.defs.iter().enumerate() {
            for_each_injective(m.size(), self.source.arity(p), |t| {
                if d.expr.eval(m, t) {
                    out.insert_unchecked(p, t);
                }
            });
        }
        Ok(out)
    }
}

pub fn apply_interpretation(i: &Interpretation, m: &Structure) -> Result<Structure> {
    i.apply(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::are_isomorphic;
    use crate::embed::for_each_embedding;
    use crate::enumerate::graphs_up_to;
    use crate::structure::Graph;
    use proptest::prelude::*;

    fn perm(sigma: &[usize]) -> Structure {
        // L1 natural order; L2(i, j) iff sigma^{-1}(i) < sigma^{-1}(j).
        let n = sigma.len();
        let mut inv = vec![0; n];
        for (pos, &v) in sigma.iter().enumerate() {
            inv[v - 1] = pos;
        }
        let mut m = Structure::empty(Language::permutation(), n);
        for i in 0..n {
            for j in 0..n {
                if i < j {
                    m.insert(0, &[i, j]).unwrap();
                }
                if i != j && inv[i] < inv[j] {
                    m.insert(1, &[i, j]).unwrap();
                }
            }
        }
        m
    }

    #[test]
    fn parses_and_prints() {
        let f = parse_formula("x1!=x2 & (L1(x1,x2) <-> L2(x1,x2))", &Language::permutation(), 2)
            .unwrap();
        assert_eq!(f.to_string(), "x1!=x2 & (L1(x1,x2) <-> L2(x1,x2))");
        let t = parse_formula("T", &Language::graph(), 0).unwrap();
        assert_eq!(t.expr, Expr::True);
        let g = parse_formula("!E(x1,x2) -> x1=x2 -> T | E(x2,x1)", &Language::graph(), 2).unwrap();
        assert_eq!(parse_formula(&g.to_string(), &Language::graph(), 2).unwrap(), g);
        assert!(matches!(g.expr, Expr::Implies(_, ref r) if matches!(**r, Expr::Implies(..))));
    }

    #[test]
    fn parse_errors() {
        let g = Language::graph();
        assert!(matches!(parse_formula("E(x1)", &g, 2), Err(Error::Arity { .. })));
        assert!(matches!(parse_formula("F(x1,x2)", &g, 2), Err(Error::UnknownPredicate(_))));
        assert!(matches!(
            parse_formula("x1=x3", &g, 2),
            Err(Error::VariableOutOfRange { index: 3, k: 2 })
        ));
        assert!(matches!(parse_formula("x1=x2 &", &g, 2), Err(Error::Syntax { pos: 7, .. })));
        assert!(matches!(parse_formula("(T", &g, 0), Err(Error::Syntax { .. })));
    }

    #[test]
    fn evaluation_conventions() {
        let g = Language::graph();
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).to_structure();
        let loopy = parse_formula("E(x1,x1)", &g, 1).unwrap();
        for v in 0..3 {
            assert!(!evaluate_formula(&loopy, &p3, &[v]).unwrap());
        }
        let eq = parse_formula("x1=x2", &g, 2).unwrap();
        assert!(evaluate_formula(&eq, &p3, &[2, 2]).unwrap());
        let e = parse_formula("E(x1,x2)", &g, 2).unwrap();
        assert!(!evaluate_formula(&e, &p3, &[0, 2]).unwrap());
        assert!(evaluate_formula(&e, &p3, &[0]).is_err());

        let agree = &Interpretation::agreement().defs()[0];
        assert!(!evaluate_formula(agree, &perm(&[2, 1]), &[0, 1]).unwrap());
    }

    #[test]
    fn diagrams() {
        assert_eq!(open_diagram(&Graph::new(0).to_structure()).expr, Expr::True);
        let k2 = open_diagram(&Graph::complete(2).to_structure());
        assert_eq!(k2.to_string(), "x1!=x2 & E(x1,x2) & E(x2,x1)");
    }

    #[test]
    fn diagram_defines_embeddings() {
        let graphs = graphs_up_to(3).unwrap();
        for m in &graphs {
            let d = open_diagram(&m.to_structure());
            for n in &graphs {
                let (ms, ns) = (m.to_structure(), n.to_structure());
                let mut embs = std::collections::BTreeSet::new();
                for_each_embedding(&ms, &ns, |e| {
                    embs.insert(e.to_vec());
                    true
                })
                .unwrap();
                let mut truth = std::collections::BTreeSet::new();
                let k = ms.size();
                let total = ns.size().pow(k as u32);
                for code in 0..total {
                    let t: Vec<usize> = (0..k).map(|i| code / ns.size().pow(i as u32) % ns.size()).collect();
                    if evaluate_formula(&d, &ns, &t).unwrap() {
                        truth.insert(t);
                    }
                }
                if k == 0 {
                    truth.insert(vec![]);
                }
                assert_eq!(embs, truth, "{m:?} in {n:?}");
            }
        }
    }

    #[test]
    fn agreement_examples() {
        let i = Interpretation::agreement();
        let id = i.apply(&perm(&[1, 2, 3])).unwrap();
        assert_eq!(id.to_graph().unwrap(), Graph::complete(3));
        let g = i.apply(&perm(&[2, 1, 3])).unwrap().to_graph().unwrap();
        assert_eq!(g.edges(), vec![(0, 2), (1, 2)]);
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).to_structure();
        assert_eq!(Interpretation::identity(Language::graph()).apply(&p3).unwrap(), p3);
        assert_eq!(i.apply(&p3), Err(Error::LanguageMismatch));
        let round = Interpretation::from_json(&i.to_json()).unwrap();
        assert_eq!(&round, i);
    }

    fn arb_expr(k: usize) -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::True),
            (0..k, 0..k).prop_map(|(a, b)| Expr::Eq(a, b)),
            (0..k, 0..k).prop_map(|(a, b)| Expr::Pred(0, vec![a, b])),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Not(Box::new(e))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::And(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Or(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Implies(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::Iff(Box::new(a), Box::new(b))),
            ]
        })
    }

    proptest! {
        #[test]
        fn printer_round_trips(expr in arb_expr(3)) {
            let f = Formula { language: Language::graph(), k: 3, expr };
            let back = parse_formula(&f.to_string(), &Language::graph(), 3).unwrap();
            prop_assert_eq!(back, f);
        }

        #[test]
        fn interpretation_commutes_with_restriction(
            sigma in Just((1..=6usize).collect::<Vec<_>>()).prop_shuffle(),
            keep in proptest::collection::vec(any::<bool>(), 6),
        ) {
            let m = perm(&sigma);
            let u: Vec<usize> = (0..6).filter(|&i| keep[i]).collect();
            let i = Interpretation::agreement();
            let lhs = i.apply(&m).unwrap().induced(&u).unwrap();
            let rhs = i.apply(&m.induced(&u).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn diagram_holds_at_identity(edges in proptest::collection::vec((0..6usize, 0..6usize), 0..12)) {
            let mut g = Graph::new(6);
            for (a, b) in edges {
                if a != b { g.add_edge(a, b); }
            }
            let s = g.to_structure();
            let id: Vec<usize> = (0..6).collect();
            prop_assert!(evaluate_formula(&open_diagram(&s), &s, &id).unwrap());
            prop_assert!(are_isomorphic(&s, &s).unwrap());
        }
    }
}
