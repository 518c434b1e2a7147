//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero if any fails.
//!
//! Every check compares library output against an oracle written here from the definitions,
//! on seeded random instances.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use omega_core::algebra::build_modular_linear_family;
use omega_core::convexity::{
    convex_hull, extreme_hull, is_convex_set, is_extreme_set, omega_boundary, omega_interior,
};
use omega_core::functions::{
    check_nondecreasing, check_order_automorphism, is_affine_map, is_convex_map, pointwise_inf_chain, pointwise_sup,
    FiniteRange, FunctionTable, LinearRange,
};
use omega_core::order::{
    bidual_member, controllability_functional, is_salient_cone, is_sharp, Salience, Sharpness,
};
use omega_core::rational::{int, ratio};
use omega_core::support::{
    delta_support, ri_certificate, support_extend, verify_delta_certificate, verify_ri_chain,
    verify_support_certificate, DeltaInstance, Polytope, RiInstance, SupportInstance, SupportOptions,
};
use omega_core::{
    Carrier, FinitePoset, Limits, Norm, Operation, OperationFamily, QMatrix, QVec, Rational, RationalCone, Subset,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Verdict + 'a>);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn zero() -> Rational {
    int(0)
}

fn abs(r: &Rational) -> Rational {
    if *r < zero() {
        zero() - r
    } else {
        r.clone()
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(zero(), |acc, (x, y)| acc + x * y)
}

fn combo(weights: &[Rational], vectors: &[QVec]) -> QVec {
    let dim = vectors[0].len();
    (0..dim).map(|i| weights.iter().zip(vectors).fold(zero(), |acc, (w, v)| acc + w * &v[i])).collect()
}

fn l1(v: &[Rational]) -> Rational {
    v.iter().fold(zero(), |acc, x| acc + abs(x))
}

fn linf(v: &[Rational]) -> Rational {
    v.iter().map(abs).max().unwrap_or_else(zero)
}

fn norm_of(norm: Norm, v: &[Rational]) -> Rational {
    match norm {
        Norm::L1 => l1(v),
        Norm::Linf => linf(v),
        Norm::L2 => unreachable!("only polyhedral norms are sampled"),
    }
}

/// Every tuple of `arity` elements from `0..size`, first slot most significant.
fn tuples(size: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|t| (0..size).map(move |x| [t.clone(), vec![x]].concat())).collect();
    }
    out
}

fn mask_of(s: &Subset) -> u64 {
    s.iter().fold(0, |m, x| m | (1 << x))
}

fn inside(mask: u64, x: usize) -> bool {
    mask & (1 << x) != 0
}

// ---------------------------------------------------------------------------------------------
// Criteria 1 and 2: hulls on random finite families

/// Operations as `(arity, table)` with the table indexed first-slot-major.
struct RawFamily {
    size: usize,
    ops: Vec<(usize, Vec<usize>)>,
}

impl RawFamily {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let size: usize = rng.gen_range(1..=5);
        let count = rng.gen_range(1..=3);
        let ops = (0..count)
            .map(|_| {
                let arity = rng.gen_range(1..=2);
                (arity, (0..size.pow(arity as u32)).map(|_| rng.gen_range(0..size)).collect())
            })
            .collect();
        RawFamily { size, ops }
    }

    fn omega(&self) -> OperationFamily {
        let mut family = OperationFamily::new(Carrier::new(self.size).unwrap());
        for (i, (arity, table)) in self.ops.iter().enumerate() {
            family.push(format!("op{i}"), Operation::new(self.size, *arity, table.clone()).unwrap()).unwrap();
        }
        family
    }

    fn cells(&self) -> impl Iterator<Item = (Vec<usize>, usize)> + '_ {
        self.ops.iter().flat_map(move |(arity, table)| tuples(self.size, *arity).into_iter().zip(table.iter().copied()))
    }

    fn convex(&self, mask: u64) -> bool {
        self.cells().all(|(args, out)| !args.iter().all(|&a| inside(mask, a)) || inside(mask, out))
    }

    fn extreme(&self, mask: u64) -> bool {
        self.cells().all(|(args, out)| !inside(mask, out) || args.iter().all(|&a| inside(mask, a)))
    }

    /// Intersection of every superset of `h` satisfying `pred`, by enumerating all subsets.
    fn minimal_superset(&self, h: u64, pred: &[bool]) -> u64 {
        let full = (1u64 << self.size) - 1;
        (0..=full).filter(|&m| m & h == h && pred[m as usize]).fold(full, |acc, m| acc & m)
    }
}

fn hull_corpus() -> Vec<RawFamily> {
    let mut r = rng(1);
    (0..1000).map(|_| RawFamily::random(&mut r)).collect()
}

fn criterion_1(corpus: &[RawFamily]) -> Verdict {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut subsets = 0usize;
    for (i, fam) in corpus.iter().enumerate() {
        let omega = fam.omega();
        let n = 1u64 << fam.size;
        let convex: Vec<bool> = (0..n).map(|m| fam.convex(m)).collect();
        let extreme: Vec<bool> = (0..n).map(|m| fam.extreme(m)).collect();
        for h in 0..n {
            subsets += 1;
            let set = Subset::from_mask(fam.size, h);
            let (cv, ex) = (fam.minimal_superset(h, &convex), fam.minimal_superset(h, &extreme));
            if !convex[cv as usize] || !extreme[ex as usize] {
                mismatches.push(format!("family {i}: intersection of supersets of {h:#b} not closed"));
            }
            if mask_of(&convex_hull(&omega, &set)) != cv {
                mismatches.push(format!("family {i}: convex hull of {h:#b}"));
            }
            if mask_of(&extreme_hull(&omega, &set)) != ex {
                mismatches.push(format!("family {i}: extreme hull of {h:#b}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let summary = format!("{} families, {subsets} subsets, {} mismatches, {:.1?}", corpus.len(), mismatches.len(), elapsed);
    if mismatches.is_empty() && elapsed < Duration::from_secs(60) {
        Ok(summary)
    } else {
        Err(format!("{summary}; first: {:?}", mismatches.first()))
    }
}

fn criterion_2(corpus: &[RawFamily]) -> Verdict {
    let mut violations: BTreeMap<&str, usize> = BTreeMap::new();
    let mut bump = |law: &'static str, ok: bool| {
        if !ok {
            *violations.entry(law).or_default() += 1;
        }
    };
    let mut checks = 0u64;
    for fam in corpus {
        let omega = fam.omega();
        let n = 1u64 << fam.size;
        let full = n - 1;
        let set = |m: u64| Subset::from_mask(fam.size, m);
        let ch: Vec<u64> = (0..n).map(|m| mask_of(&convex_hull(&omega, &set(m)))).collect();
        let eh: Vec<u64> = (0..n).map(|m| mask_of(&extreme_hull(&omega, &set(m)))).collect();
        let cv: Vec<bool> = (0..n).map(|m| is_convex_set(&omega, &set(m)).is_none()).collect();
        let ex: Vec<bool> = (0..n).map(|m| is_extreme_set(&omega, &set(m)).is_none()).collect();
        bump("trivial sets closed", cv[0] && cv[full as usize] && ex[0] && ex[full as usize]);
        for hull in [&ch, &eh] {
            for a in 0..n {
                bump("idempotence", hull[hull[a as usize] as usize] == hull[a as usize]);
                bump("extensive", hull[a as usize] & a == a);
                for b in 0..n {
                    let (ha, hb) = (hull[a as usize], hull[b as usize]);
                    if a & b == a {
                        bump("monotonicity", ha & !hb == 0);
                    }
                    bump("union", (ha | hb) & !hull[(a | b) as usize] == 0);
                    bump("intersection", hull[(a & b) as usize] & !(ha & hb) == 0);
                    checks += 3;
                }
            }
        }
        for a in 0..n as usize {
            if ex[a] {
                bump("complement of extreme is convex", cv[full as usize & !a]);
            }
            for b in 0..n as usize {
                if cv[a] && cv[b] {
                    bump("convex sets closed under intersection", cv[a & b]);
                    if a & b == a {
                        bump("nested union of convex sets", cv[a | b]);
                    }
                }
                if ex[a] && ex[b] {
                    bump("extreme sets closed under intersection", ex[a & b]);
                    bump("extreme sets closed under union", ex[a | b]);
                }
                checks += 4;
            }
        }
        let interior = mask_of(&omega_interior(&omega));
        let boundary = mask_of(&omega_boundary(&omega));
        let oracle_interior = (0..fam.size).filter(|&p| eh[1 << p] == full).fold(0, |m, p| m | (1 << p));
        bump("interior definition", interior == oracle_interior);
        bump("boundary is the complement", boundary == full & !interior);
        if interior != 0 {
            for e in 0..n {
                if ex[e as usize] && e != full {
                    bump("boundary maximality", e & !boundary == 0);
                    checks += 1;
                }
            }
        }
    }
    let total: usize = violations.values().sum();
    if total == 0 {
        Ok(format!("{} families, {checks} law instances, 0 violations", corpus.len()))
    } else {
        Err(format!("{total} violations: {violations:?}"))
    }
}

// ---------------------------------------------------------------------------------------------
// Criteria 3 and 4: cones

fn random_generators(rng: &mut ChaCha8Rng) -> Vec<QVec> {
    let k = rng.gen_range(1..=5);
    let mut gens = Vec::new();
    while gens.len() < k {
        let g: QVec = (0..3).map(|_| int(rng.gen_range(-5..=5))).collect();
        if g.iter().any(|x| *x != zero()) {
            gens.push(g);
        }
    }
    gens
}

fn conic_combination(rng: &mut ChaCha8Rng, gens: &[QVec]) -> QVec {
    let weights: Vec<Rational> = gens.iter().map(|_| ratio(rng.gen_range(0..=6), rng.gen_range(1..=4))).collect();
    combo(&weights, gens)
}

fn criterion_3() -> Verdict {
    let mut r = rng(3);
    let mut problems = Vec::new();
    let (mut salient_count, mut points) = (0, 0usize);
    for c in 0..200 {
        let gens = random_generators(&mut r);
        let cone = RationalCone::polyhedral(3, gens.clone()).unwrap();
        let salience = is_salient_cone(&cone).unwrap();
        let sharpness = is_sharp(&cone).unwrap();
        match &salience {
            Salience::Salient => salient_count += 1,
            Salience::Line { y } => {
                let neg: QVec = y.iter().map(|v| zero() - v).collect();
                if y.iter().all(|v| *v == zero()) || !cone.contains(y).unwrap() || !cone.contains(&neg).unwrap() {
                    problems.push(format!("cone {c}: bad line witness"));
                }
            }
        }
        match &sharpness {
            Sharpness::Sharp { phi } => {
                if !gens.iter().all(|g| dot(phi, g) >= int(1)) {
                    problems.push(format!("cone {c}: sharpness functional fails"));
                }
            }
            Sharpness::NotSharp { weights } => {
                let sum = combo(weights, &gens);
                let nonneg = weights.iter().all(|w| *w >= zero()) && weights.iter().any(|w| *w > zero());
                if !nonneg || sum.iter().any(|v| *v != zero()) {
                    problems.push(format!("cone {c}: bad non-sharpness weights"));
                }
            }
        }
        let salient = salience == Salience::Salient;
        let sharp = matches!(sharpness, Sharpness::Sharp { .. });
        if salient != sharp {
            problems.push(format!("cone {c}: salient = {salient}, sharp = {sharp}"));
        }
        let mut sample: Vec<QVec> = (0..30).map(|_| (0..3).map(|_| int(r.gen_range(-5..=5))).collect()).collect();
        for _ in 0..30 {
            let y = conic_combination(&mut r, &gens);
            if !cone.contains(&y).unwrap() {
                problems.push(format!("cone {c}: conic combination reported outside"));
            }
            sample.push(y);
        }
        for y in &sample {
            points += 1;
            if bidual_member(&cone, y).unwrap() != cone.contains(y).unwrap() {
                problems.push(format!("cone {c}: bidual disagrees at {y:?}"));
            }
        }
    }
    if problems.is_empty() {
        Ok(format!("200 cones ({salient_count} salient, all sharp), {points} bidual points, 0 violations"))
    } else {
        Err(format!("{} violations; first: {}", problems.len(), problems[0]))
    }
}

fn criterion_4() -> Verdict {
    let mut r = rng(4);
    let mut cones = Vec::new();
    while cones.len() < 50 {
        let gens = random_generators(&mut r);
        let cone = RationalCone::polyhedral(3, gens.clone()).unwrap();
        if matches!(is_sharp(&cone).unwrap(), Sharpness::Sharp { .. }) {
            cones.push(cone);
        }
    }
    for norm in [Norm::L1, Norm::Linf] {
        for dim in 1..=3 {
            for eps in [ratio(1, 2), int(1), ratio(3, 2), int(2)] {
                cones.push(RationalCone::lorenz(eps, dim, norm).unwrap());
            }
        }
    }
    let (mut certificates, mut samples, mut violations) = (0, 0usize, Vec::new());
    for (c, cone) in cones.iter().enumerate() {
        for norm in [Norm::L1, Norm::Linf] {
            let cert = controllability_functional(cone, norm).map_err(|e| format!("cone {c}: {e}"))?;
            certificates += 1;
            for _ in 0..100 {
                let y = match cone {
                    RationalCone::Polyhedral { generators, .. } => conic_combination(&mut r, generators),
                    RationalCone::Lorenz { epsilon, dim, norm: own } => {
                        let mut x: QVec = (0..*dim).map(|_| ratio(r.gen_range(-8..=8), 2)).collect();
                        let t = epsilon * norm_of(*own, &x) + ratio(r.gen_range(0..=3), 3);
                        x.push(t);
                        x
                    }
                };
                if !cone.contains(&y).unwrap() {
                    return Err(format!("cone {c}: sampler left the cone"));
                }
                samples += 1;
                if norm_of(norm, &y) > &cert.scale * dot(&cert.phi, &y) {
                    violations.push(format!("cone {c}, {norm:?}, y = {y:?}"));
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(format!("{} cones, {certificates} certificates, {samples} conic samples, 0 violations", cones.len()))
    } else {
        Err(format!("{} violations; first: {}", violations.len(), violations[0]))
    }
}

// ---------------------------------------------------------------------------------------------
// Criterion 5: support certificates on modular families

fn random_weights(rng: &mut ChaCha8Rng, arity: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..arity).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = raw.iter().sum();
    raw.iter().map(|&w| ratio(w, total)).collect()
}

fn criterion_5() -> Verdict {
    let mut r = rng(5);
    let limits = Limits::default();
    let options = SupportOptions { limits, override_preconditions: false };
    let (mut passing, mut generated, mut perturbed_generated, mut perturbed_passing) = (0, 0, 0, 0);
    let mut rejected: BTreeMap<String, usize> = BTreeMap::new();
    while passing < 100 {
        generated += 1;
        if generated > 50_000 {
            return Err(format!("only {passing} precondition-passing instances in 50000 draws"));
        }
        let m = r.gen_range(2..=5u64);
        let coefficient_lists: Vec<Vec<i64>> = (0..r.gen_range(1..=2))
            .map(|_| {
                let arity = r.gen_range(1..=3);
                let mut c: Vec<i64> = (0..arity - 1).map(|_| r.gen_range(0..m as i64)).collect();
                c.push((1 - c.iter().sum::<i64>()).rem_euclid(m as i64));
                c
            })
            .collect();
        let omega = build_modular_linear_family(m, &coefficient_lists, &limits).unwrap();
        let n = omega.size();
        let orthant = r.gen_bool(0.5);
        let (cone, d) = if orthant {
            let d = r.gen_range(1..=2);
            (RationalCone::orthant(d), d)
        } else {
            let k = r.gen_range(1..=2);
            let norm = if r.gen_bool(0.5) { Norm::L1 } else { Norm::Linf };
            (RationalCone::lorenz(ratio(r.gen_range(1..=4), 2), k, norm).unwrap(), k + 1)
        };
        let ops = coefficient_lists
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mats = if orthant && r.gen_bool(0.5) {
                    let per_coord: Vec<Vec<Rational>> = (0..d).map(|_| random_weights(&mut r, c.len())).collect();
                    (0..c.len())
                        .map(|s| {
                            let mut mat = QMatrix::zeros(d, d).to_rows();
                            for j in 0..d {
                                mat[j][j] = per_coord[j][s].clone();
                            }
                            QMatrix::from_rows(mat).unwrap()
                        })
                        .collect()
                } else {
                    random_weights(&mut r, c.len()).into_iter().map(|w| QMatrix::scalar(d, w)).collect()
                };
                (format!("lin{i}"), mats)
            })
            .collect();
        let range = LinearRange::new(cone.clone(), ops).unwrap();
        let seeds = (0..r.gen_range(1..=2)).map(|_| r.gen_range(0..n));
        let anchor = convex_hull(&omega, &Subset::from_elements(n, seeds));
        let constant = |r: &mut ChaCha8Rng| -> QVec { (0..d).map(|_| ratio(r.gen_range(-6..=6), 2)).collect() };
        let pieces: Vec<FunctionTable<QVec>> = (0..if orthant { r.gen_range(1..=3) } else { 1 })
            .map(|_| FunctionTable::constant(n, constant(&mut r)))
            .collect();
        if let Some(bad) = pieces.iter().find(|g| is_affine_map(g, &omega, &range).unwrap().is_some()) {
            return Err(format!("generated affine piece is not affine: {bad:?}"));
        }
        // Lorenz orders have no pointwise suprema; there f is a single affine piece.
        let mut f = if orthant { pointwise_sup(&pieces, &range).unwrap() } else { pieces[0].clone() }.into_values();
        let mut perturbed = false;
        if r.gen_bool(0.5) {
            for (x, v) in f.iter_mut().enumerate() {
                if !anchor.contains(x) && r.gen_bool(0.5) {
                    let bump: QVec = if orthant {
                        (0..d).map(|_| int(r.gen_range(0..=2))).collect()
                    } else {
                        (0..d).map(|j| if j + 1 == d { int(r.gen_range(1..=2)) } else { zero() }).collect()
                    };
                    perturbed |= bump.iter().any(|b| *b != zero());
                    *v = v.iter().zip(&bump).map(|(a, b)| a + b).collect();
                }
            }
        }
        perturbed_generated += perturbed as usize;
        let inst = SupportInstance::new(omega, range, FunctionTable::new(f), anchor);
        if let Err(e) = inst.validate(&limits) {
            let key = match e {
                omega_core::support::SupportError::HypothesisFailure { name, .. } => name.to_string(),
                other => other.to_string(),
            };
            *rejected.entry(key).or_default() += 1;
            continue;
        }
        passing += 1;
        perturbed_passing += perturbed as usize;
        match support_extend(&inst, &options) {
            Ok(cert) => {
                let checks = verify_support_certificate(&inst, &cert.g).unwrap();
                if !checks.passed() {
                    return Err(format!("certificate fails verification: {:?}", checks.failures()));
                }
            }
            Err(e) => return Err(format!("instance {passing}: {e}")),
        }
    }
    Ok(format!(
        "{passing} precondition-passing instances of {generated} drawn, all certified, 0 Infeasible; \
         perturbed: {perturbed_passing} passing of {perturbed_generated} drawn; rejections {rejected:?}"
    ))
}

// ---------------------------------------------------------------------------------------------
// Criterion 6: LP certificates against exhaustive enumeration on a value grid

struct GridInstance {
    size: usize,
    op: Box<dyn Fn(usize, usize) -> usize>,
    t: Rational,
    f: Vec<Rational>,
    anchor: u64,
}

impl GridInstance {
    fn oracle(&self, g: &[Rational]) -> bool {
        let one_minus_t = int(1) - &self.t;
        let affine = (0..self.size)
            .all(|x| (0..self.size).all(|y| g[(self.op)(x, y)] == &self.t * &g[x] + &one_minus_t * &g[y]));
        let dominated = g.iter().zip(&self.f).all(|(a, b)| a <= b);
        let anchored = (0..self.size).filter(|&x| inside(self.anchor, x)).all(|x| g[x] == self.f[x]);
        affine && dominated && anchored
    }

    fn support_instance(&self) -> SupportInstance<LinearRange> {
        let table = tuples(self.size, 2).iter().map(|a| (self.op)(a[0], a[1])).collect();
        let omega = OperationFamily::new(Carrier::new(self.size).unwrap())
            .with("op", Operation::new(self.size, 2, table).unwrap())
            .unwrap();
        let range = LinearRange::scalar(vec![("op".into(), vec![self.t.clone(), int(1) - &self.t])]).unwrap();
        let f = FunctionTable::new(self.f.iter().map(|v| vec![v.clone()]).collect());
        SupportInstance::new(omega, range, f, Subset::from_mask(self.size, self.anchor))
    }
}

fn criterion_6() -> Verdict {
    let mut r = rng(6);
    let grid: Vec<Rational> = (0..=8).map(|i| ratio(i, 2)).collect();
    let weights = [ratio(1, 4), ratio(1, 3), ratio(1, 2), ratio(2, 3), ratio(3, 4)];
    let options = SupportOptions::default();
    let (mut validated, mut drawn, mut tables, mut in_set) = (0, 0, 0usize, 0usize);
    while validated < 50 {
        drawn += 1;
        if drawn > 5000 {
            return Err(format!("only {validated} valid instances in 5000 draws"));
        }
        let t = weights.choose(&mut r).unwrap().clone();
        let inst = if r.gen_bool(0.6) {
            let size = r.gen_range(2..=4);
            let mut f: Vec<Rational> = (0..size).map(|_| grid.choose(&mut r).unwrap().clone()).collect();
            f.sort();
            let flat = f.iter().take_while(|v| **v == f[0]).count();
            let top = r.gen_range(1..=flat);
            GridInstance { size, op: Box::new(|x: usize, y: usize| x.min(y)), t, f, anchor: (1 << top) - 1 }
        } else {
            let m = r.gen_range(2..=4usize);
            let c = r.gen_range(0..m);
            let op = move |x: usize, y: usize| (c * x + (m + 1 - c) * y) % m;
            let f = if r.gen_bool(0.5) {
                vec![grid.choose(&mut r).unwrap().clone(); m]
            } else {
                (0..m).map(|_| grid.choose(&mut r).unwrap().clone()).collect()
            };
            GridInstance { size: m, op: Box::new(op), t, f, anchor: r.gen_range(1..(1u64 << m)) }
        };
        let support = inst.support_instance();
        for idx in tuples(grid.len(), inst.size) {
            let g: Vec<Rational> = idx.iter().map(|&i| grid[i].clone()).collect();
            let table = FunctionTable::new(g.iter().map(|v| vec![v.clone()]).collect());
            let library = verify_support_certificate(&support, &table).unwrap().passed();
            tables += 1;
            if library != inst.oracle(&g) {
                return Err(format!("verifier disagrees with the oracle on {g:?} for f = {:?}", inst.f));
            }
        }
        if support.validate(&options.limits).is_err() {
            continue;
        }
        validated += 1;
        let cert = support_extend(&support, &options).map_err(|e| format!("valid instance without certificate: {e}"))?;
        let g: Vec<Rational> = cert.g.values().iter().map(|v| v[0].clone()).collect();
        if !g.iter().all(|v| grid.contains(v)) || !inst.oracle(&g) {
            return Err(format!("LP certificate {g:?} is outside the enumerated set"));
        }
        in_set += 1;
    }
    Ok(format!(
        "{validated} valid instances ({drawn} drawn), {in_set} LP certificates in the enumerated set, \
         {tables} grid tables with identical verdicts"
    ))
}

// ---------------------------------------------------------------------------------------------
// Criterion 7: dyadic chains

fn contains(rows: &[(QVec, Rational)], v: &[Rational]) -> bool {
    rows.iter().all(|(h, c)| dot(h, v) <= *c)
}

/// Independent re-check of a chain for a scalar `a`.
fn check_chain(rows: &[(QVec, Rational)], a: &Rational, p: &[Rational], x: &[Rational], n: u32, chain: &[QVec]) -> bool {
    let top = 1i64 << n;
    let at = |i: i64| &chain[(i + 2) as usize];
    let lerp = |k: i64| -> QVec {
        let w = ratio(k, top);
        p.iter().zip(x).map(|(pi, xi)| &w * xi + (int(1) - &w) * pi).collect()
    };
    let omega = |u: &QVec, v: &QVec| -> QVec { u.iter().zip(v).map(|(ui, vi)| a * ui + vi - a * vi).collect() };
    let minimal = (0..n).all(|m| {
        let w = ratio(1, 1i64 << m);
        let probe: QVec = p.iter().zip(x).map(|(pi, xi)| pi + &w * (pi - xi)).collect();
        !contains(rows, &probe)
    });
    chain.len() as i64 == 2 * top + 3
        && minimal
        && chain.iter().all(|v| contains(rows, v))
        && (-1..=top).all(|k| *at(2 * k) == lerp(k))
        && (0..=top).all(|k| *at(2 * k - 1) == omega(at(2 * k - 2), at(2 * k)))
        && (0..top).all(|k| *at(2 * k) == omega(at(2 * k + 1), at(2 * k - 1)))
}

fn criterion_7() -> Verdict {
    let limits = Limits::default();
    let rows = vec![(vec![int(1)], int(1)), (vec![int(-1)], int(0))];
    let golden = RiInstance {
        polytope: Polytope::new(1, rows.clone()).unwrap(),
        a: QMatrix::scalar(1, ratio(1, 2)),
        p: vec![ratio(1, 2)],
        x: vec![int(1)],
        n_max: 64,
    };
    let cert = ri_certificate(&golden, &limits).map_err(|e| e.to_string())?;
    let expected: Vec<QVec> = [ratio(0, 1), ratio(1, 4), ratio(1, 2), ratio(3, 4), int(1)].into_iter().map(|v| vec![v]).collect();
    if cert.n != 0 || cert.chain != expected || !cert.checks.passed() {
        return Err(format!("golden chain n = {} {:?}", cert.n, cert.chain));
    }
    if !check_chain(&rows, &ratio(1, 2), &golden.p, &golden.x, cert.n, &cert.chain) {
        return Err("golden chain fails the independent check".into());
    }

    let mut r = rng(7);
    let mut max_n = 0;
    for i in 0..100 {
        let lo: Vec<i64> = (0..2).map(|_| -r.gen_range(1..=3)).collect();
        let hi: Vec<i64> = (0..2).map(|_| r.gen_range(1..=3)).collect();
        let p: QVec = (0..2).map(|j| int(lo[j]) + ratio((hi[j] - lo[j]) * r.gen_range(1..=7), 8)).collect();
        let x: QVec = (0..2).map(|j| int(lo[j]) + ratio((hi[j] - lo[j]) * r.gen_range(0..=4), 4)).collect();
        let mut rows: Vec<(QVec, Rational)> = Vec::new();
        for j in 0..2 {
            let e: QVec = (0..2).map(|k| int((k == j) as i64)).collect();
            rows.push((e.clone(), int(hi[j])));
            rows.push((e.iter().map(|v| zero() - v).collect(), int(-lo[j])));
        }
        for _ in 0..r.gen_range(0..=3) {
            let h: QVec = loop {
                let h: QVec = (0..2).map(|_| int(r.gen_range(-3..=3))).collect();
                if h.iter().any(|v| *v != zero()) {
                    break h;
                }
            };
            let bound = dot(&h, &p).max(dot(&h, &x)) + ratio(r.gen_range(1..=4), 4);
            rows.push((h, bound));
        }
        let a = ratio(r.gen_range(1..=7), 8);
        let inst = RiInstance { polytope: Polytope::new(2, rows.clone()).unwrap(), a: QMatrix::scalar(2, a.clone()), p, x, n_max: 64 };
        let cert = ri_certificate(&inst, &limits).map_err(|e| format!("polytope {i}: {e}"))?;
        max_n = max_n.max(cert.n);
        let recheck = verify_ri_chain(&inst, cert.n, &cert.chain);
        if !cert.checks.passed() || !recheck.passed() || !check_chain(&rows, &a, &inst.p, &inst.x, cert.n, &cert.chain) {
            return Err(format!("polytope {i}: chain fails verification"));
        }
    }
    Ok(format!("golden chain exact with n = 0; 100 random polytopes verified (largest n = {max_n})"))
}

// ---------------------------------------------------------------------------------------------
// Criterion 8: the squared grid

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let xs: Vec<Rational> = (0..=4).map(|k| ratio(k, 4)).collect();
    let squares: Vec<Rational> = xs.iter().map(|x| x * x).collect();
    let inst = DeltaInstance {
        sample: xs.iter().map(|x| vec![x.clone()]).collect(),
        s: ratio(1, 2),
        t: ratio(1, 2),
        big_f: squares.iter().map(|v| vec![v.clone()]).collect(),
        f: squares.clone(),
        p: 2,
        norm: Norm::L1,
    };
    let lp = delta_support(&inst, &Limits::default()).map_err(|e| format!("LP: {e}"))?;
    if !lp.checks.passed() {
        return Err("LP certificate fails verification".into());
    }
    let a: Vec<Rational> = xs.iter().map(|x| x - ratio(1, 4)).collect();
    let big_a: Vec<QVec> = a.iter().map(|v| vec![v.clone()]).collect();
    let checks = verify_delta_certificate(&inst, &big_a, &a).map_err(|e| e.to_string())?;
    let tight = (0..xs.len()).all(|i| abs(&(&squares[i] - &a[i])) == &squares[i] - &a[i]);
    let elapsed = start.elapsed();
    if checks.passed() && tight && elapsed < Duration::from_secs(1) {
        Ok(format!("LP feasible, candidate x - 1/4 verified with equality at all 5 points, {elapsed:.1?}"))
    } else {
        Err(format!("checks {checks:?}, tight {tight}, {elapsed:.1?}"))
    }
}

// ---------------------------------------------------------------------------------------------
// Criterion 9: suprema of affine maps and infima of convex chains

struct Domain {
    size: usize,
    op: Vec<usize>,
}

impl Domain {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        match rng.gen_range(0..3) {
            0 => {
                let size = rng.gen_range(2..=5);
                Domain { size, op: tuples(size, 2).iter().map(|a| a[0].min(a[1])).collect() }
            }
            1 => {
                let divisors = [1u64, 2, 3, 4, 6, 12];
                let gcd = |mut a: u64, mut b: u64| {
                    while b != 0 {
                        (a, b) = (b, a % b);
                    }
                    a
                };
                let op = tuples(6, 2)
                    .iter()
                    .map(|a| divisors.iter().position(|&d| d == gcd(divisors[a[0]], divisors[a[1]])).unwrap())
                    .collect();
                Domain { size: 6, op }
            }
            _ => {
                let size = rng.gen_range(2..=4);
                Domain { size, op: (0..size * size).map(|_| rng.gen_range(0..size)).collect() }
            }
        }
    }

    fn at(&self, x: usize, y: usize) -> usize {
        self.op[x * self.size + y]
    }

    fn omega(&self) -> OperationFamily {
        OperationFamily::new(Carrier::new(self.size).unwrap())
            .with("op", Operation::new(self.size, 2, self.op.clone()).unwrap())
            .unwrap()
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size).flat_map(move |x| (0..self.size).map(move |y| (x, y)))
    }
}

fn criterion_9() -> Verdict {
    let mut r = rng(9);
    let mut sup_affine_total = 0usize;
    for i in 0..100 {
        let dom = Domain::random(&mut r);
        let k = r.gen_range(2..=4);
        let use_max = r.gen_bool(0.5);
        let join = move |a: usize, b: usize| if use_max { a.max(b) } else { a.min(b) };
        let range_table = tuples(k, 2).iter().map(|a| join(a[0], a[1])).collect();
        let range = FiniteRange::new(
            FinitePoset::chain(k),
            OperationFamily::new(Carrier::new(k).unwrap()).with("op", Operation::new(k, 2, range_table).unwrap()).unwrap(),
        )
        .unwrap();
        if check_nondecreasing(&range, "op").unwrap().is_some() {
            return Err(format!("sup instance {i}: chain operation reported decreasing"));
        }
        let affine: Vec<Vec<usize>> = tuples(k, dom.size)
            .into_iter()
            .filter(|f| dom.pairs().all(|(x, y)| f[dom.at(x, y)] == join(f[x], f[y])))
            .collect();
        sup_affine_total += affine.len();
        let picks: Vec<Vec<usize>> = (0..r.gen_range(1..=5)).map(|_| affine.choose(&mut r).unwrap().clone()).collect();
        let tables: Vec<FunctionTable<usize>> = picks.iter().map(|f| FunctionTable::new(f.clone())).collect();
        let sup = pointwise_sup(&tables, &range).map_err(|e| e.to_string())?;
        let oracle: Vec<usize> = (0..dom.size).map(|x| picks.iter().map(|f| f[x]).max().unwrap()).collect();
        let oracle_convex = dom.pairs().all(|(x, y)| oracle[dom.at(x, y)] <= join(oracle[x], oracle[y]));
        if sup.values() != oracle.as_slice() || !oracle_convex || is_convex_map(&sup, &dom.omega(), &range).unwrap().is_some() {
            return Err(format!("sup instance {i}: supremum {:?} of {picks:?} is not convex", sup.values()));
        }
    }

    let grid: Vec<Rational> = (0..=4).map(|v| ratio(v, 2)).collect();
    let mut chain_lengths = 0usize;
    for i in 0..100 {
        let dom = Domain::random(&mut r);
        let t = ratio(r.gen_range(1..=3), 4);
        let one_minus_t = int(1) - &t;
        let range = LinearRange::scalar(vec![("op".into(), vec![t.clone(), one_minus_t.clone()])]).unwrap();
        if (1..=2).any(|slot| check_order_automorphism(&range, "op", slot).unwrap().is_some()) {
            return Err(format!("inf instance {i}: sections are not order automorphisms"));
        }
        let convex: Vec<Vec<Rational>> = tuples(grid.len(), dom.size)
            .into_iter()
            .map(|idx| idx.iter().map(|&j| grid[j].clone()).collect::<Vec<_>>())
            .filter(|f| dom.pairs().all(|(x, y)| f[dom.at(x, y)] <= &t * &f[x] + &one_minus_t * &f[y]))
            .collect();
        let mut chain = vec![convex.choose(&mut r).unwrap().clone()];
        for _ in 1..r.gen_range(1..=5) {
            let last = chain.last().unwrap();
            let below: Vec<&Vec<Rational>> = convex.iter().filter(|g| g.iter().zip(last).all(|(a, b)| a <= b)).collect();
            chain.push((*below.choose(&mut r).unwrap()).clone());
        }
        chain.shuffle(&mut r);
        chain_lengths += chain.len();
        let tables: Vec<FunctionTable<QVec>> =
            chain.iter().map(|f| FunctionTable::new(f.iter().map(|v| vec![v.clone()]).collect())).collect();
        let inf = pointwise_inf_chain(&tables, &range).map_err(|e| e.to_string())?;
        let oracle: Vec<QVec> = (0..dom.size).map(|x| vec![chain.iter().map(|f| f[x].clone()).min().unwrap()]).collect();
        if inf.values() != oracle.as_slice() || is_convex_map(&inf, &dom.omega(), &range).unwrap().is_some() {
            return Err(format!("inf instance {i}: infimum is not convex"));
        }
    }
    Ok(format!(
        "100 suprema (from {sup_affine_total} enumerated affine tables) and 100 chain infima \
         ({chain_lengths} members) convex, 0 violations"
    ))
}

// ---------------------------------------------------------------------------------------------
// Criterion 10: CLI determinism

fn criterion_10() -> Verdict {
    let cases = common::manifest();
    let mut problems = Vec::new();
    for case in &cases {
        let first = common::run_binary(case);
        let second = common::run_binary(case);
        if first.code != case.exit {
            problems.push(format!("{}: exit {} (documented {})", case.name, first.code, case.exit));
        }
        if first.code != second.code || first.stdout != second.stdout {
            problems.push(format!("{}: runs differ", case.name));
        }
    }
    if problems.is_empty() {
        Ok(format!("{} golden cases, documented exit codes, byte-identical across two runs", cases.len()))
    } else {
        Err(problems.join("; "))
    }
}

fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let corpus = hull_corpus();
    let criteria: Vec<Criterion> = vec![
        ("hull oracle equivalence", Box::new(|| criterion_1(&corpus))),
        ("hull and closure laws", Box::new(|| criterion_2(&corpus))),
        ("cone duality and sharpness", Box::new(criterion_3)),
        ("controllability soundness", Box::new(criterion_4)),
        ("support certificates on modular families", Box::new(criterion_5)),
        ("LP certificates versus enumeration", Box::new(criterion_6)),
        ("dyadic interior chains", Box::new(criterion_7)),
        ("delta-convex squared grid", Box::new(criterion_8)),
        ("suprema and chain infima", Box::new(criterion_9)),
        ("CLI contract", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let verdict = guarded(run);
        let elapsed = start.elapsed();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{elapsed:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail} [{elapsed:.1?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
