//! Self-checking suites run by `blowuplab verify`.

use std::sync::Arc;
use std::time::Instant;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::RngCore;
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::blowup::{
    mask_measure, persistence_probe, positive_profile, prune_spec, rng, sample_pruned, tind_blowup,
    tind_step, uniform_index, BlowupSpec, Child, CycleQuadratic, DensityValue, LevelRule, Mode,
    PrunedSpec, StepGraphon, Tail, Verdict,
};
use crate::canon::are_isomorphic;
use crate::dimension::{dim_report, f_bound, vc_prime_dim};
use crate::embed::{densities, embeds, falling_factorial};
use crate::enumerate::{graphs_of_order, graphs_up_to};
use crate::families::{
    agreement_graph, cycle, g_n, g_prime_n, gen_pi, h_n, is_cograph, is_perfect, path,
    perm_substitute, poset_report, product_tail, repetitions, Permutation,
};
use crate::logic::{evaluate_formula, open_diagram};
use crate::structure::{Graph, Structure};
use crate::substitution::{
    closure_enumerate, closure_member, find_modules, is_prime, prime_substructures,
    substitute_conservative, Family, DEFAULT_BUDGET,
};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone)]
pub struct Context {
    pub seed: u64,
    pub budget: usize,
}

impl Default for Context {
    fn default() -> Self {
        Context {
            seed: 7,
            budget: DEFAULT_BUDGET,
        }
    }
}

type Outcome = std::result::Result<String, String>;

#[derive(Clone, Copy)]
pub struct Check {
    pub id: &'static str,
    pub label: &'static str,
    pub run: fn(&Context) -> Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub label: String,
    pub status: Status,
    pub details: String,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
    pub ok: bool,
}

pub trait VerifySuite: Send + Sync {
    fn name(&self) -> &str;
    fn checks(&self) -> Vec<Check>;
}

struct Builtin {
    name: &'static str,
    checks: fn() -> Vec<Check>,
}

impl VerifySuite for Builtin {
    fn name(&self) -> &str {
        self.name
    }

    fn checks(&self) -> Vec<Check> {
        (self.checks)()
    }
}

pub fn builtin_suites() -> Vec<Arc<dyn VerifySuite>> {
    vec![
        Arc::new(Builtin {
            name: "substitution",
            checks: substitution_checks,
        }),
        Arc::new(Builtin {
            name: "blowup",
            checks: blowup_checks,
        }),
        Arc::new(Builtin {
            name: "dimension",
            checks: dimension_checks,
        }),
        Arc::new(Builtin {
            name: "families",
            checks: family_checks,
        }),
    ]
}

/// Every built-in check, in suite order.
pub fn all_checks() -> Vec<Check> {
    builtin_suites().iter().flat_map(|s| s.checks()).collect()
}

pub fn find_check(id: &str) -> Option<Check> {
    all_checks().into_iter().find(|c| c.id == id)
}

pub fn run_check(check: &Check, ctx: &Context) -> CheckResult {
    let start = Instant::now();
    let out = std::panic::catch_unwind(|| (check.run)(ctx))
        .unwrap_or_else(|_| Err("check panicked".to_string()));
    let (status, details) = match out {
        Ok(d) => (Status::Pass, d),
        Err(d) => (Status::Fail, d),
    };
    CheckResult {
        id: check.id.into(),
        label: check.label.into(),
        status,
        details,
        millis: start.elapsed().as_millis(),
    }
}

pub fn run_checks(suite: &str, checks: &[Check], ctx: &Context) -> VerifyReport {
    let mut results: Vec<CheckResult> = checks.iter().map(|c| run_check(c, ctx)).collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    let failed = results.iter().filter(|r| r.status == Status::Fail).count();
    let passed = results.iter().filter(|r| r.status == Status::Pass).count();
    VerifyReport {
        schema: REPORT_SCHEMA,
        suite: suite.into(),
        seed: ctx.seed,
        checks: results,
        passed,
        failed,
        ok: failed == 0,
    }
}

pub fn run_suite(suite: &dyn VerifySuite, ctx: &Context) -> VerifyReport {
    run_checks(suite.name(), &suite.checks(), ctx)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::error::Error) -> String {
    e.to_string()
}

struct Draws(SplitMix64);

impl Draws {
    fn new(seed: u64, salt: u64) -> Self {
        Draws(rng(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }

    fn below(&mut self, n: usize) -> usize {
        uniform_index(self.0.next_u64(), n)
    }

    fn coin(&mut self) -> bool {
        self.0.next_u64() >> 63 == 1
    }

    /// Random graph with `lo + below(span)` vertices.
    fn sized_graph(&mut self, lo: usize, span: usize) -> Graph {
        let n = lo + self.below(span);
        self.graph(n)
    }

    fn graph(&mut self, n: usize) -> Graph {
        let mut g = Graph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if self.coin() {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn exact(h: &Structure, src: &PrunedSpec) -> std::result::Result<BigRational, String> {
    match tind_blowup(h, src, &Mode::Exact).map_err(err)? {
        DensityValue::Exact(v) => Ok(v),
        DensityValue::Interval(_) => Err("exact mode returned an interval".into()),
    }
}

fn c4_spec() -> BlowupSpec {
    BlowupSpec::constant(cycle(4).expect("C4").to_structure()).expect("C4 spec")
}

fn c5_prefix_spec() -> BlowupSpec {
    BlowupSpec::new(
        vec![cycle(5).expect("C5").to_structure()],
        Tail::Constant(Arc::new(Graph::new(2).to_structure())),
    )
    .expect("prefix spec")
}

fn p4_free(g: &Graph) -> bool {
    !embeds(&path(4).to_structure(), &g.to_structure()).expect("small embedding")
}

fn small_base() -> Vec<Structure> {
    vec![
        Graph::new(0).to_structure(),
        Graph::new(1).to_structure(),
        Graph::complete(2).to_structure(),
        Graph::new(2).to_structure(),
    ]
}

// Substitution suite.

fn substitution_checks() -> Vec<Check> {
    vec![
        Check {
            id: "substitution.primality",
            label: "decomposition-based primality agrees with brute-force module search (graphs up to 6 vertices)",
            run: check_primality,
        },
        Check {
            id: "substitution.closure-oracle",
            label: "closure membership agrees with closure enumeration for random prime families; cograph case is P4-free",
            run: check_closure_oracle,
        },
        Check {
            id: "substitution.non-prime",
            label: "substituting a structure of size at least 2 into one of size at least 2 is never prime",
            run: check_substitution_non_prime,
        },
        Check {
            id: "logic.open-diagram",
            label: "the open diagram of M holds at exactly the embeddings of M",
            run: check_open_diagram,
        },
    ]
}

fn check_primality(_: &Context) -> Outcome {
    let mut n = 0;
    for g in graphs_up_to(6).map_err(err)? {
        let s = g.to_structure();
        let brute = find_modules(&s)
            .map_err(err)?
            .iter()
            .all(|m| m.len() < 2 || m.len() >= s.size());
        ensure(is_prime(&s).map_err(err)? == brute, || format!("disagreement on {g:?}"))?;
        n += 1;
    }
    Ok(format!("{n} graphs"))
}

fn check_closure_oracle(ctx: &Context) -> Outcome {
    let all = graphs_up_to(6).map_err(err)?;
    let base = small_base();
    let lang = base[0].language().clone();
    let cographs = Family::from_structures(lang.clone(), base.clone()).map_err(err)?;
    let enumerated = closure_enumerate(&cographs, 6, ctx.budget).map_err(err)?;
    for g in &all {
        let s = g.to_structure();
        let want = p4_free(g);
        ensure(enumerated.contains(&s).map_err(err)? == want, || format!("cograph enumeration wrong on {g:?}"))?;
        ensure(closure_member(&s, &cographs).map_err(err)? == want, || format!("cograph membership wrong on {g:?}"))?;
    }
    let primes: Vec<Structure> = graphs_up_to(5)
        .map_err(err)?
        .into_iter()
        .map(|g| g.to_structure())
        .filter(|s| s.size() >= 3 && is_prime(s).unwrap_or(false))
        .collect();
    let mut d = Draws::new(ctx.seed, 4);
    let mut sizes = Vec::new();
    for trial in 0..50 {
        let mut fam = Family::from_structures(lang.clone(), base.clone()).map_err(err)?;
        for p in &primes {
            if d.coin() {
                for sub in prime_substructures(p, true).map_err(err)?.iter() {
                    fam.insert(sub.clone()).map_err(err)?;
                }
            }
        }
        let closure = closure_enumerate(&fam, 6, ctx.budget).map_err(err)?;
        sizes.push(closure.len());
        for g in &all {
            let s = g.to_structure();
            let a = closure.contains(&s).map_err(err)?;
            let b = closure_member(&s, &fam).map_err(err)?;
            ensure(a == b, || format!("trial {trial}: enumerate={a} member={b} on {g:?}"))?;
        }
    }
    Ok(format!(
        "50 families x {} graphs; closure sizes {}..{}",
        all.len(),
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap()
    ))
}

fn check_substitution_non_prime(ctx: &Context) -> Outcome {
    let mut d = Draws::new(ctx.seed, 5);
    for _ in 0..200 {
        let (a, b) = (2 + d.below(4), 2 + d.below(4));
        let f1 = d.graph(a).to_structure();
        let f2 = d.graph(b).to_structure();
        let v = d.below(a);
        let s = substitute_conservative(&f1, v, &f2).map_err(err)?;
        ensure(!is_prime(&s).map_err(err)?, || "substitution produced a prime graph".into())?;
        ensure(
            are_isomorphic(&s.restrict(&(v..v + b).collect::<Vec<_>>()), &f2).map_err(err)?,
            || "block is not a copy of the inserted graph".into(),
        )?;
    }
    Ok("200 random substitutions".into())
}

fn check_open_diagram(ctx: &Context) -> Outcome {
    let mut d = Draws::new(ctx.seed, 6);
    for _ in 0..40 {
        let m = d.sized_graph(1, 3).to_structure();
        let n = d.sized_graph(2, 4).to_structure();
        let f = open_diagram(&m);
        let mut count = 0u128;
        let mut bad = None;
        crate::structure::for_each_injective(n.size(), m.size(), |t| {
            let holds = evaluate_formula(&f, &n, t).unwrap_or(false);
            let is_emb = (0..m.size()).all(|i| (0..m.size()).all(|j| i == j || m.holds(0, &[i, j]) == n.holds(0, &[t[i], t[j]])));
            if holds != is_emb {
                bad = Some(t.to_vec());
            }
            count += holds as u128;
        });
        ensure(bad.is_none(), || format!("diagram disagrees at {bad:?}"))?;
        let c = crate::embed::count_embeddings(&m, &n).map_err(err)?;
        ensure(c == count, || format!("count {c} vs diagram {count}"))?;
    }
    Ok("40 random pairs".into())
}

// Blow-up suite.

fn blowup_checks() -> Vec<Check> {
    vec![
        Check {
            id: "blowup.exact-densities",
            label: "exact limit densities of small motifs (K2 in C4 is 2/3, P4 in C4 is 0, K2 in K2 is 1) and they sum to 1",
            run: check_exact_densities,
        },
        Check {
            id: "blowup.interval-brackets",
            label: "interval mode brackets exact mode within 1e-9 at depth at most 40",
            run: check_interval_brackets,
        },
        Check {
            id: "blowup.sampling",
            label: "empirical edge frequency of seeded samples lies within 4 standard errors; golden sample stable",
            run: check_sampling,
        },
        Check {
            id: "blowup.profile",
            label: "positive profile of the C4 limit is the cographs on at most 4 vertices; C4 persistent; C5 prefix separated",
            run: check_profile,
        },
        Check {
            id: "blowup.mask-measure",
            label: "depth-32 single-deletion mask over quadratic cycles has the product measure",
            run: check_mask_measure,
        },
        Check {
            id: "blowup.ramsey",
            label: "step graphons: p(K_n) + p(co-K_n) >= 1/binom(R(n,n), n) for n = 2, 3",
            run: check_ramsey,
        },
        Check {
            id: "blowup.convergence",
            label: "finite blow-up densities approach the exact limit within the two-term bound",
            run: check_convergence,
        },
    ]
}

fn check_exact_densities(_: &Context) -> Outcome {
    let c4 = PrunedSpec::full(c4_spec());
    let k2 = Graph::complete(2).to_structure();
    let v = exact(&k2, &c4)?;
    ensure(v == q(2, 3), || format!("K2 in C4 limit: {v}"))?;
    let v = exact(&path(4).to_structure(), &c4)?;
    ensure(v.is_zero(), || format!("P4 in C4 limit: {v}"))?;
    let clique = PrunedSpec::full(BlowupSpec::constant(k2.clone()).map_err(err)?);
    let v = exact(&k2, &clique)?;
    ensure(v.is_one(), || format!("K2 in K2 limit: {v}"))?;
    let periodic = PrunedSpec::full(
        BlowupSpec::periodic(vec![cycle(4).unwrap().to_structure(), Graph::new(2).to_structure()]).map_err(err)?,
    );
    for src in [&c4, &periodic] {
        for k in 2..=4 {
            let mut total = BigRational::zero();
            for g in graphs_of_order(k).map_err(err)?.iter() {
                let s = g.to_structure();
                let d = densities(&s, &s).map_err(err)?;
                total += exact(&s, src)? * (&d.p / &d.tind);
            }
            ensure(total.is_one(), || format!("densities of order {k} sum to {total}"))?;
        }
    }
    Ok("K2/C4 = 2/3, P4/C4 = 0, K2/K2 = 1".into())
}

fn check_interval_brackets(_: &Context) -> Outcome {
    let eps = q(1, 1_000_000_000);
    let mut max_depth = 0;
    let specs = [
        c4_spec(),
        BlowupSpec::periodic(vec![cycle(4).unwrap().to_structure(), Graph::new(2).to_structure()]).map_err(err)?,
    ];
    for spec in specs {
        let src = PrunedSpec::full(spec);
        for g in graphs_up_to(4).map_err(err)?.into_iter().filter(|g| g.order() >= 2) {
            let s = g.to_structure();
            let ex = exact(&s, &src)?;
            let DensityValue::Interval(iv) = tind_blowup(&s, &src, &Mode::Interval(eps.clone())).map_err(err)? else {
                return Err("interval mode returned an exact value".into());
            };
            ensure(iv.lower <= ex && ex <= iv.upper, || format!("{ex} outside [{}, {}]", iv.lower, iv.upper))?;
            ensure(&iv.upper - &iv.lower <= eps, || "interval too wide".into())?;
            max_depth = max_depth.max(iv.depth);
        }
    }
    ensure(max_depth <= 40, || format!("depth {max_depth} exceeds 40"))?;
    Ok(format!("max depth {max_depth}"))
}

/// Edges of the 3-vertex sample of the C4 limit at seed 42.
pub const GOLDEN_C4_N3_SEED42: [(usize, usize); 2] = [(0, 2), (1, 2)];

fn check_sampling(ctx: &Context) -> Outcome {
    let src = PrunedSpec::full(c4_spec());
    let trials = 10_000u64;
    let mut hits = 0u64;
    for i in 0..trials {
        let seed = ctx.seed.wrapping_mul(1_000_003).wrapping_add(i);
        let s = sample_pruned(&src, 2, seed).map_err(err)?;
        hits += s.holds(0, &[0, 1]) as u64;
    }
    let freq = hits as f64 / trials as f64;
    let p = 2.0 / 3.0;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    ensure((freq - p).abs() <= 4.0 * se, || format!("frequency {freq} vs 2/3, se {se}"))?;
    let g = sample_pruned(&src, 3, 42).map_err(err)?.to_graph().map_err(err)?;
    ensure(g.edges() == GOLDEN_C4_N3_SEED42, || format!("golden sample changed: {:?}", g.edges()))?;
    let again = sample_pruned(&src, 3, 42).map_err(err)?.to_graph().map_err(err)?;
    ensure(g == again, || "sampling is not deterministic".into())?;
    Ok(format!("frequency {freq:.4} (se {se:.4})"))
}

fn check_profile(ctx: &Context) -> Outcome {
    let r = positive_profile(&PrunedSpec::full(c4_spec()), 4, 16).map_err(err)?;
    let cographs = Family::from_structures(
        r.family.language().clone(),
        graphs_up_to(4).map_err(err)?.into_iter().filter(p4_free).map(|g| g.to_structure()),
    )
    .map_err(err)?;
    ensure(r.family == cographs, || format!("profile has {} members, expected {}", r.family.len(), cographs.len()))?;
    let probe = persistence_probe(&c4_spec(), 4, 50, ctx.seed).map_err(err)?;
    ensure(matches!(probe.verdict, Verdict::Persistent), || "C4 limit not persistent".into())?;
    let spec = c5_prefix_spec();
    let c5 = cycle(5).unwrap().to_structure();
    let full = positive_profile(&PrunedSpec::full(spec.clone()), 5, 8).map_err(err)?;
    let shifted = positive_profile(&PrunedSpec::full(spec.shift(1)), 5, 8).map_err(err)?;
    ensure(
        full.family.contains(&c5).map_err(err)? && !shifted.family.contains(&c5).map_err(err)?,
        || "shift does not remove C5".into(),
    )?;
    let probe = persistence_probe(&spec, 5, 50, ctx.seed).map_err(err)?;
    let Verdict::Witness { structure, mask, trial } = probe.verdict else {
        return Err("C5 prefix reported persistent".into());
    };
    let masked = positive_profile(&prune_spec(&spec, mask).map_err(err)?, 5, 12).map_err(err)?;
    ensure(
        !masked.family.contains(&structure).map_err(err)? && !masked.family.contains(&c5).map_err(err)?,
        || "witness not separating".into(),
    )?;
    Ok(format!("{} cographs; C5 witness at trial {trial}", cographs.len()))
}

fn check_mask_measure(_: &Context) -> Outcome {
    let spec = BlowupSpec::rule(Arc::new(CycleQuadratic)).map_err(err)?;
    let levels: Vec<Vec<usize>> = (0..32).map(|l| (1..CycleQuadratic.size(l)).collect()).collect();
    let p = prune_spec(&spec, Child::chain(&levels).map_err(err)?).map_err(err)?;
    let m = mask_measure(&p);
    let expect = product_tail(|l| l * l + 5, 32).map_err(err)?;
    ensure(m == expect, || format!("measure {m} vs {expect}"))?;
    ensure(m.is_positive(), || "measure not positive".into())?;
    Ok(format!("measure ~ {:.6}", to_f64(&m)))
}

fn to_f64(x: &BigRational) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[allow(clippy::needless_range_loop)]
fn random_step_graphon(d: &mut Draws) -> std::result::Result<StepGraphon, String> {
    let k = 1 + d.below(3);
    let raw: Vec<i64> = (0..k).map(|_| 1 + d.below(9) as i64).collect();
    let total: i64 = raw.iter().sum();
    let measures = raw.iter().map(|&r| q(r, total)).collect();
    let mut w = vec![vec![BigRational::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            let v = q(d.below(11) as i64, 10);
            w[i][j] = v.clone();
            w[j][i] = v;
        }
    }
    StepGraphon::new(measures, w).map_err(err)
}

fn check_ramsey(ctx: &Context) -> Outcome {
    let mut d = Draws::new(ctx.seed, 10);
    let mut worst = BigRational::one();
    for _ in 0..200 {
        let w = random_step_graphon(&mut d)?;
        for (n, bound) in [(2, q(1, 1)), (3, q(1, 20))] {
            let kn = Graph::complete(n);
            let en = Graph::new(n);
            // Cliques and their complements have n! automorphisms, so p equals tind.
            let s = tind_step(&kn, &w).map_err(err)? + tind_step(&en, &w).map_err(err)?;
            ensure(s >= bound, || format!("n={n}: {s} below {bound}"))?;
            if n == 3 && s < worst {
                worst = s;
            }
        }
    }
    Ok(format!("200 graphons; smallest n=3 sum {worst}"))
}

fn check_convergence(_: &Context) -> Outcome {
    let spec = BlowupSpec::periodic(vec![cycle(4).unwrap().to_structure(), Graph::new(2).to_structure()]).map_err(err)?;
    let src = PrunedSpec::full(spec.clone());
    let motifs = [Graph::complete(2), path(3), Graph::complete(3)];
    let mut slack = f64::INFINITY;
    for h in &motifs {
        let s = h.to_structure();
        let theta = exact(&s, &src)?;
        for depth in 2..=5 {
            let r = spec.finite_blowup(depth).map_err(err)?;
            let n = r.size();
            let k = s.size();
            let dens = densities(&s, &r).map_err(err)?;
            let nk = BigInt::from(n).pow(k as u32);
            let injective = BigRational::new(falling_factorial(n, k), nk);
            let bound = q((k * (k - 1) / 2) as i64, n as i64) + q(2, 1) * (BigRational::one() - injective);
            let gap = (&dens.tind - &theta).abs();
            ensure(gap <= bound, || format!("|H|={k} d={depth}: gap {gap} exceeds {bound}"))?;
            slack = slack.min(to_f64(&(bound - gap)));
        }
    }
    Ok(format!("3 motifs x depths 2..5; min slack {slack:.5}"))
}

// Dimension suite.

fn dimension_checks() -> Vec<Check> {
    vec![
        Check {
            id: "dimension.examples",
            label: "VC(C5) = 2, VC'(K2) = VC'(co-K2) = 2, F matches direct evaluation and is at least 3 somewhere below 31",
            run: check_dim_examples,
        },
        Check {
            id: "dimension.sandwich",
            label: "max F(n) over n <= VC' is at most VC, which is at most VC' (all graphs up to 7 vertices)",
            run: check_sandwich,
        },
        Check {
            id: "dimension.substitution",
            label: "VC' of a substitution is the larger VC' of the two parts (500 random triples)",
            run: check_dim_substitution,
        },
        Check {
            id: "dimension.cographs",
            label: "VC' of each cograph up to 8 vertices equals the largest VC' among its prime substructures",
            run: check_dim_cographs,
        },
    ]
}

fn direct_f(n: usize) -> usize {
    if n <= 2 {
        return 0;
    }
    let binom = |k: usize| -> BigInt { falling_factorial(n, k) / falling_factorial(k, k) };
    let threshold = BigRational::new(BigInt::from(2).pow(n as u32) - 2, BigInt::from(n));
    (0..=n)
        .filter(|&t| BigRational::from_integer((0..t).map(binom).sum::<BigInt>()) < threshold)
        .max()
        .unwrap_or(0)
}

fn check_dim_examples(_: &Context) -> Outcome {
    let vc5 = dim_report(&cycle(5).unwrap()).map_err(err)?.vc;
    ensure(vc5 == 2, || format!("VC(C5) = {vc5}"))?;
    for g in [Graph::complete(2), Graph::new(2)] {
        let v = vc_prime_dim(&g).map_err(err)?.0;
        ensure(v == 2, || format!("VC' of order-2 graph = {v}"))?;
    }
    let mut table = Vec::new();
    for n in 0..=30 {
        let f = f_bound(n).map_err(err)?;
        ensure(f == direct_f(n), || format!("F({n}) = {f}, direct {}", direct_f(n)))?;
        table.push(f);
    }
    ensure(table[3] == 1, || "F(3) != 1".into())?;
    let first3 = table.iter().position(|&f| f >= 3).ok_or("F stays below 3 up to 30")?;
    let last2 = table.iter().rposition(|&f| f <= 2).unwrap();
    Ok(format!("F <= 2 up to n={last2}; F(n) >= 3 first at n={first3}"))
}

fn check_sandwich(_: &Context) -> Outcome {
    let mut count = 0;
    for g in graphs_up_to(7).map_err(err)?.into_iter().filter(|g| g.order() > 0) {
        let r = dim_report(&g).map_err(err)?;
        let lower = (0..=r.vc_prime).map(|n| f_bound(n).unwrap_or(0)).max().unwrap_or(0);
        ensure(lower <= r.vc && r.vc <= r.vc_prime, || format!("sandwich fails on {g:?}: {r:?}"))?;
        count += 1;
    }
    Ok(format!("{count} graphs"))
}

fn check_dim_substitution(ctx: &Context) -> Outcome {
    let mut d = Draws::new(ctx.seed, 8);
    for _ in 0..500 {
        let f1 = d.sized_graph(1, 6);
        let f2 = d.sized_graph(1, 5);
        let v = d.below(f1.order());
        let s = substitute_conservative(&f1.to_structure(), v, &f2.to_structure())
            .map_err(err)?
            .to_graph()
            .map_err(err)?;
        let lhs = vc_prime_dim(&s).map_err(err)?.0;
        let rhs = vc_prime_dim(&f1).map_err(err)?.0.max(vc_prime_dim(&f2).map_err(err)?.0);
        ensure(lhs == rhs, || format!("VC' {lhs} vs {rhs} for {f1:?} at {v} with {f2:?}"))?;
    }
    Ok("500 triples".into())
}

fn check_dim_cographs(ctx: &Context) -> Outcome {
    let base = small_base();
    let fam = Family::from_structures(base[0].language().clone(), base).map_err(err)?;
    let cographs = closure_enumerate(&fam, 8, ctx.budget).map_err(err)?;
    let mut n = 0;
    for s in cographs.iter().filter(|s| s.size() > 0) {
        let g = s.to_graph().map_err(err)?;
        let lhs = vc_prime_dim(&g).map_err(err)?.0;
        let mut rhs = 0;
        for p in prime_substructures(s, true).map_err(err)?.iter().filter(|p| p.size() > 0) {
            rhs = rhs.max(vc_prime_dim(&p.to_graph().map_err(err)?).map_err(err)?.0);
        }
        ensure(lhs == rhs, || format!("{g:?}: VC' {lhs} vs prime max {rhs}"))?;
        n += 1;
    }
    Ok(format!("{n} cographs"))
}

// Families suite.

fn family_checks() -> Vec<Check> {
    vec![
        Check {
            id: "families.pi14",
            label: "pi_14 matches its printed values and its agreement graph is G_14",
            run: check_pi14,
        },
        Check {
            id: "families.primes",
            label: "C5..C12, G6..G12, G'9/11/13 and H6..H9 are prime; C3, C4, P3, K4 are not",
            run: check_primes,
        },
        Check {
            id: "families.antichains",
            label: "{G6..G12} and {G'9, G'11, G'13} are antichains; {H6, H7, H8} is a chain",
            run: check_antichains,
        },
        Check {
            id: "families.perfect-closure",
            label: "conservative substitutions of perfect graphs stay perfect (300 random pairs)",
            run: check_perfect_closure,
        },
        Check {
            id: "families.perm-closure",
            label: "agreement graph of a substituted permutation is the substituted agreement graph (lengths up to 4)",
            run: check_perm_closure,
        },
        Check {
            id: "families.cographs",
            label: "closure of {K0, K1, K2, co-K2}, P4-free graphs and decomposition cographs coincide up to 7 vertices",
            run: check_cographs,
        },
        Check {
            id: "families.tails",
            label: "partial products and repetition counts",
            run: check_tails,
        },
    ]
}

fn check_pi14(_: &Context) -> Outcome {
    let pi = gen_pi(14).map_err(err)?;
    let printed = [17, 15, 13, 18, 16, 11, 14, 9, 12, 7, 10, 5, 8, 3, 1, 6, 4, 2];
    ensure(pi.values() == printed, || format!("got {pi}"))?;
    for n in [6, 8, 10, 12, 14] {
        let a = agreement_graph(&gen_pi(n).map_err(err)?).to_structure();
        ensure(are_isomorphic(&a, &g_n(n).map_err(err)?.to_structure()).map_err(err)?, || {
            format!("agreement graph of pi_{n} is not G_{n}")
        })?;
    }
    Ok(format!("pi_14 = {pi}"))
}

fn check_primes(_: &Context) -> Outcome {
    let mut yes: Vec<(String, Graph)> = Vec::new();
    for n in 5..=12 {
        yes.push((format!("C{n}"), cycle(n).map_err(err)?));
    }
    for n in 6..=12 {
        yes.push((format!("G{n}"), g_n(n).map_err(err)?));
    }
    for n in [9, 11, 13] {
        yes.push((format!("G'{n}"), g_prime_n(n).map_err(err)?));
    }
    for n in 6..=9 {
        yes.push((format!("H{n}"), h_n(n).map_err(err)?));
    }
    for (name, g) in &yes {
        ensure(is_prime(&g.to_structure()).map_err(err)?, || format!("{name} not prime"))?;
    }
    let no = [
        ("C3", cycle(3).map_err(err)?),
        ("C4", cycle(4).map_err(err)?),
        ("P3", path(3)),
        ("K4", Graph::complete(4)),
    ];
    for (name, g) in &no {
        ensure(!is_prime(&g.to_structure()).map_err(err)?, || format!("{name} reported prime"))?;
    }
    Ok(format!("{} prime, {} non-prime", yes.len(), no.len()))
}

fn check_antichains(_: &Context) -> Outcome {
    let gs: Vec<_> = (6..=12).map(|n| g_n(n).map(|g| g.to_structure())).collect::<Result<_, _>>().map_err(err)?;
    ensure(poset_report(&gs).map_err(err)?.antichain, || "G_n not an antichain".into())?;
    let gp: Vec<_> = [9, 11, 13].iter().map(|&n| g_prime_n(n).map(|g| g.to_structure())).collect::<Result<_, _>>().map_err(err)?;
    ensure(poset_report(&gp).map_err(err)?.antichain, || "G'_n not an antichain".into())?;
    let hs: Vec<_> = (6..=8).map(|n| h_n(n).map(|g| g.to_structure())).collect::<Result<_, _>>().map_err(err)?;
    let r = poset_report(&hs).map_err(err)?;
    ensure(r.chain && r.covers == vec![(0, 1), (1, 2)], || "H_n not a chain".into())?;
    Ok("2 antichains, 1 chain".into())
}

fn check_perfect_closure(ctx: &Context) -> Outcome {
    let mut d = Draws::new(ctx.seed, 9);
    let perfect = |d: &mut Draws| loop {
        let g = d.sized_graph(1, 6);
        if is_perfect(&g).unwrap_or(false) {
            return g;
        }
    };
    let mut subs = 0;
    for _ in 0..300 {
        let f1 = perfect(&mut d);
        let f2 = perfect(&mut d);
        for v in 0..f1.order() {
            let s = substitute_conservative(&f1.to_structure(), v, &f2.to_structure())
                .map_err(err)?
                .to_graph()
                .map_err(err)?;
            ensure(is_perfect(&s).map_err(err)?, || format!("{f1:?} at {v} with {f2:?} not perfect"))?;
            subs += 1;
        }
    }
    Ok(format!("300 pairs, {subs} substitutions"))
}

fn check_perm_closure(_: &Context) -> Outcome {
    let mut count = 0;
    for n in 1..=4 {
        for m in 1..=4 {
            for s in Permutation::all(n) {
                for t in Permutation::all(m) {
                    for v in 0..n {
                        let lhs = agreement_graph(&perm_substitute(&s, v, &t).map_err(err)?).to_structure();
                        let rhs = substitute_conservative(
                            &agreement_graph(&s).to_structure(),
                            v,
                            &agreement_graph(&t).to_structure(),
                        )
                        .map_err(err)?;
                        ensure(are_isomorphic(&lhs, &rhs).map_err(err)?, || format!("{s} at {v} with {t}"))?;
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} cases"))
}

fn check_cographs(ctx: &Context) -> Outcome {
    let base = small_base();
    let fam = Family::from_structures(base[0].language().clone(), base).map_err(err)?;
    let closure = closure_enumerate(&fam, 7, ctx.budget).map_err(err)?;
    let mut count = 0;
    for g in graphs_up_to(7).map_err(err)? {
        let a = closure.contains(&g.to_structure()).map_err(err)?;
        let b = p4_free(&g);
        let c = is_cograph(&g).map_err(err)?;
        ensure(a == b && b == c, || format!("{g:?}: closure {a}, P4-free {b}, cograph {c}"))?;
        count += a as usize;
    }
    Ok(format!("{count} cographs up to 7 vertices"))
}

fn check_tails(_: &Context) -> Outcome {
    let t = product_tail(|_| 5, 10).map_err(err)?;
    ensure(t == BigRational::new(BigInt::from(4).pow(10), BigInt::from(5).pow(10)), || format!("got {t}"))?;
    let r = repetitions(10).map_err(err)?;
    ensure(r == 7, || format!("r(10) = {r}"))?;
    let c = product_tail(|l| l * l + 5, 32).map_err(err)?;
    ensure(c.is_positive() && c < q(1, 2), || format!("quadratic tail {c}"))?;
    Ok(format!("quadratic cycle tail over 32 levels ~ {:.6}", to_f64(&c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_prefixed() {
        let checks = all_checks();
        let mut ids: Vec<_> = checks.iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), checks.len());
        for s in builtin_suites() {
            let prefix = if s.name() == "substitution" { "" } else { s.name() };
            assert!(s.checks().iter().all(|c| c.id.starts_with(prefix)));
        }
    }

    #[test]
    fn quick_checks_pass() {
        let ctx = Context::default();
        for id in ["families.pi14", "dimension.examples", "blowup.exact-densities", "families.tails"] {
            let r = run_check(&find_check(id).unwrap(), &ctx);
            assert_eq!(r.status, Status::Pass, "{id}: {}", r.details);
        }
    }
}
