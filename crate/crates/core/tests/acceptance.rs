//! Acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the report is always printed; the
//! process exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{dense_transport, inner, lifted, line, map_cost, r, rows, sq_dist};
use num_traits::Zero;
use otclass::cost::CostSpec;
use otclass::disintegration::{classes_equal, disintegrate, recombine, second_marginal, DisintegrationMap};
use otclass::kantorovich::{solve_mk, solve_monge_maps, TransportPlan};
use otclass::matrix::Matrix;
use otclass::measure::{DiscreteMeasure, IndexMap};
use otclass::oracle::{enumerate_basic_feasible, enumerate_feasible_maps, exhaustive_cycle_search, min_objective, EnumerationBudget};
use otclass::random;
use otclass::scalar::Rational;
use otclass::solver::{solve_transportation, TransportationInstance};
use otclass::transport_class::{class_of_map, compare_with_kantorovich, diagnose_existence, generalized_barycenter, meta_wasserstein, solve_class_problem, MetaMeasure};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

/// Uniform μ on x = 0, 1, 2; ν = ⅙δ₀ + ⅚δ₁; the four split-mass plans.
fn split_mass_classes() -> Outcome {
    let mu = ok(DiscreteMeasure::uniform(line(&[0, 1, 2])))?;
    let nu = ok(DiscreteMeasure::new(line(&[0, 1]), vec![r(1, 6), r(5, 6)]))?;
    let (a, b) = (1, 6);
    let plan = |m: Vec<Vec<Rational>>| ok(TransportPlan::new(mu.clone(), nu.clone(), ok(Matrix::from_rows(m))?));
    let f = plan(rows(&[&[(a, b), (a, b)], &[(0, 1), (1, 3)], &[(0, 1), (1, 3)]]))?;
    let g = plan(rows(&[&[(0, 1), (1, 3)], &[(a, b), (a, b)], &[(0, 1), (1, 3)]]))?;
    let h = plan(rows(&[&[(3, 30), (7, 30)], &[(2, 30), (8, 30)], &[(0, 1), (1, 3)]]))?;
    let k = plan(rows(&[&[(1, 30), (9, 30)], &[(4, 30), (6, 30)], &[(0, 1), (1, 3)]]))?;
    ensure(ok(classes_equal(&f, &g))?, || "f and g should share a class".into())?;
    ensure(!ok(classes_equal(&f, &h))?, || "f and h should differ".into())?;
    ensure(!ok(classes_equal(&h, &k))?, || "h and k should differ".into())?;
    for (name, p) in [("f", &f), ("g", &g), ("h", &h), ("k", &k)] {
        ensure(ok(second_marginal(p))? == nu, || format!("second marginal of {name} is not ν"))?;
    }
    Ok("f≈g, f≉h, h≉k, all second marginals = ν (exact)".into())
}

fn solver_matches_vertex_enumeration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let budget = EnumerationBudget::default();
    for trial in 0..500 {
        let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let supply: Vec<Rational> = random::weights(&mut rng, m);
        let demand: Vec<Rational> = random::weights(&mut rng, n);
        let cost = Matrix::from_fn(m, n, |_, _| r(rng.gen_range(-5..=9), rng.gen_range(1..=3)));
        let inst = ok(TransportationInstance::new(supply, demand, cost))?;
        let solved = ok(solve_transportation(&inst))?.objective;
        let oracle = min_objective(&ok(enumerate_basic_feasible(&inst, &budget))?).ok_or("no vertex")?;
        ensure(solved == oracle, || format!("trial {trial}: solver {solved} vs oracle {oracle}"))?;
    }
    Ok("500/500 exact matches".into())
}

fn strong_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let (m, n) = (rng.gen_range(1..=50), rng.gen_range(1..=50));
        let mut pts = |k: usize| -> Vec<Vec<f64>> { (0..k).map(|_| vec![rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)]).collect() };
        let (xs, ys) = (pts(m), pts(n));
        let mu = ok(DiscreteMeasure::normalized(xs, random::weights(&mut rng, m)))?;
        let nu = ok(DiscreteMeasure::normalized(ys, random::weights(&mut rng, n)))?;
        let c: CostSpec<f64> = if trial % 2 == 0 {
            ok(CostSpec::euclidean(1.0))?
        } else {
            ok(CostSpec::matrix((0..mu.len()).map(|_| (0..nu.len()).map(|_| rng.gen_range(0.0..10.0)).collect()).collect()))?
        };
        let sol = ok(solve_mk(&c, &mu, &nu))?;
        let primal: f64 = sol.plan.matrix().iter().map(|(i, j, w)| {
            let cost = match &c {
                CostSpec::Matrix(t) => t[(i, j)],
                _ => sq_dist_f(mu.atom(i), nu.atom(j)).sqrt(),
            };
            w * cost
        }).sum();
        let dual: f64 = mu.weights().iter().zip(sol.dual_source.values()).map(|(a, b)| a * b).sum::<f64>()
            + nu.weights().iter().zip(sol.dual_target.values()).map(|(a, b)| a * b).sum::<f64>();
        let gap = (primal - dual).abs();
        worst = worst.max(gap / (mu.len() + nu.len()) as f64);
        ensure(gap <= 1e-7 * (mu.len() + nu.len()) as f64, || format!("trial {trial}: gap {gap:e} at {m}x{n}"))?;
        ensure((primal - sol.value).abs() <= 1e-9 * (1.0 + primal.abs()), || format!("trial {trial}: reported value disagrees"))?;
    }
    Ok(format!("200 instances, max gap/(m+n) = {worst:.2e}"))
}

fn sq_dist_f(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn optimal_supports_are_monotone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let budget = EnumerationBudget::default();
    let c = CostSpec::SquaredEuclidean;
    for trial in 0..100 {
        let (m, n) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
        let mu: DiscreteMeasure<Rational> = random::measure(&mut rng, m, 2, 5);
        let nu: DiscreteMeasure<Rational> = random::measure(&mut rng, n, 2, 5);
        let support = ok(solve_mk(&c, &mu, &nu))?.plan.support();
        let witnesses = ok(exhaustive_cycle_search(&c, mu.atoms(), nu.atoms(), &support, 3, &budget))?;
        ensure(witnesses.is_empty(), || format!("trial {trial}: {} improving cycles", witnesses.len()))?;
    }
    Ok("100 supports, 0 witnesses".into())
}

/// Random μ and Λ where `Λ` is the class of a random assignment.
fn random_feasible_class<R: Rng>(rng: &mut R) -> (DiscreteMeasure<Rational>, MetaMeasure<Rational>) {
    let m = rng.gen_range(1..=6);
    let k = rng.gen_range(1..=4.min(m));
    let mu: DiscreteMeasure<Rational> = random::measure(rng, m, 1, 5);
    let lambdas: Vec<DiscreteMeasure<Rational>> = (0..k).map(|_| { let s = rng.gen_range(1..=3); random::measure(rng, s, 1, 4) }).collect();
    let t = random::index_map(rng, mu.len(), k);
    let mut mass = vec![Rational::zero(); k];
    for (i, &j) in t.as_slice().iter().enumerate() {
        mass[j] += mu.weight(i);
    }
    let (atoms, weights): (Vec<_>, Vec<_>) = lambdas.into_iter().zip(mass).filter(|(_, w)| !w.is_zero()).unzip();
    (mu, MetaMeasure::new(atoms, weights).expect("fibre masses sum to one"))
}

fn plan_integral_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let budget = EnumerationBudget::default();
    for trial in 0..100 {
        let (mu, lambda) = random_feasible_class(&mut rng);
        let report = ok(solve_class_problem(&CostSpec::SquaredEuclidean, &mu, &lambda))?;
        let (Some(abstract_sum), Some(integral)) = (report.map_value.clone(), report.plan_integral_value.clone()) else {
            return Err(format!("trial {trial}: no map value reported"));
        };
        ensure(abstract_sum == integral, || format!("trial {trial}: {abstract_sum} vs {integral}"))?;
        let table: Vec<Vec<Rational>> = mu.atoms().iter().map(|x| lambda.atoms().iter().map(|l| lifted(sq_dist, x, l)).collect()).collect();
        let oracle = ok(enumerate_feasible_maps(&mu, lambda.weights(), &budget))?
            .iter()
            .map(|t| map_cost(mu.weights(), t.as_slice(), &table))
            .min()
            .ok_or(format!("trial {trial}: oracle found no map"))?;
        ensure(oracle == abstract_sum, || format!("trial {trial}: oracle {oracle} vs {abstract_sum}"))?;
    }
    Ok("100 instances, abstract sum = plan integral = oracle (exact)".into())
}

fn class_value_dominates_kantorovich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let c = CostSpec::SquaredEuclidean;
    let mut min_slack = f64::INFINITY;
    for trial in 0..100 {
        let k = rng.gen_range(1..=4);
        let lambda: MetaMeasure<f64> = random::meta_measure(&mut rng, k, 4, 2, 5);
        let m = rng.gen_range(1..=6);
        let mu: DiscreteMeasure<f64> = random::measure(&mut rng, m, 2, 5);
        let cmp = ok(compare_with_kantorovich(&c, &mu, &lambda))?;
        let nu = ok(generalized_barycenter(&lambda))?;
        let mk_table: Vec<Vec<f64>> = mu.atoms().iter().map(|x| nu.atoms().iter().map(|y| sq_dist_f(x, y)).collect()).collect();
        let lifted_table: Vec<Vec<f64>> = mu
            .atoms()
            .iter()
            .map(|x| lambda.atoms().iter().map(|l| l.atoms().iter().zip(l.weights()).map(|(y, w)| w * sq_dist_f(x, y)).sum()).collect())
            .collect();
        let mk = dense_transport(mu.weights(), nu.weights(), &mk_table);
        let class = dense_transport(mu.weights(), lambda.weights(), &lifted_table);
        ensure((mk - cmp.mk_value).abs() <= 1e-7 && (class - cmp.class_value).abs() <= 1e-7, || {
            format!("trial {trial}: library ({}, {}) vs dense LP ({mk}, {class})", cmp.mk_value, cmp.class_value)
        })?;
        ensure(cmp.inequality_holds && mk <= class + 1e-7, || format!("trial {trial}: {mk} > {class}"))?;
        min_slack = min_slack.min(class - mk);
    }
    Ok(format!("100 instances, min slack {min_slack:.3e}"))
}

fn barycenter_is_lipschitz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut min_slack = f64::INFINITY;
    for trial in 0..100 {
        let (k1, k2) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let n1: MetaMeasure<f64> = random::meta_measure(&mut rng, k1, 5, 2, 5);
        let n2: MetaMeasure<f64> = random::meta_measure(&mut rng, k2, 5, 2, 5);
        let outer = ok(meta_wasserstein(&n1, &n2))?;
        let (b1, b2) = (ok(generalized_barycenter(&n1))?, ok(generalized_barycenter(&n2))?);
        let w1 = |a: &DiscreteMeasure<f64>, b: &DiscreteMeasure<f64>| {
            let t: Vec<Vec<f64>> = a.atoms().iter().map(|x| b.atoms().iter().map(|y| sq_dist_f(x, y).sqrt()).collect()).collect();
            dense_transport(a.weights(), b.weights(), &t)
        };
        let ground: Vec<Vec<f64>> = n1.atoms().iter().map(|a| n2.atoms().iter().map(|b| w1(a, b)).collect()).collect();
        let oracle_outer = dense_transport(n1.weights(), n2.weights(), &ground);
        ensure((oracle_outer - outer).abs() <= 1e-7, || format!("trial {trial}: meta distance {outer} vs dense LP {oracle_outer}"))?;
        let inner = w1(&b1, &b2);
        ensure(inner <= outer + 1e-7, || format!("trial {trial}: W1 of barycenters {inner} > {outer}"))?;
        min_slack = min_slack.min(outer - inner);
    }
    Ok(format!("100 pairs, min slack {min_slack:.3e}"))
}

fn push_lemma_and_converse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..200 {
        let m = rng.gen_range(2..=5);
        let n = rng.gen_range(1..=4);
        let mu: DiscreteMeasure<Rational> = random::uniform(&mut rng, m, 1, 6);
        let targets = random::points::<Rational, _>(&mut rng, n, 1, 6);
        let gamma = random::plan(&mut rng, &mu, &targets);
        let f = ok(disintegrate(&gamma))?;
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut rng);
        let g = ok(DisintegrationMap::new(mu.clone(), order.iter().map(|&k| f.conditional(k).clone()).collect()))?;
        let eta = ok(recombine(&g, &mu))?;
        ensure(ok(classes_equal(&gamma, &eta))?, || format!("trial {trial}: permuted conditionals changed the class"))?;
        ensure(ok(second_marginal(&gamma))? == ok(second_marginal(&eta))?, || format!("trial {trial}: second marginals differ"))?;
    }
    let mu = ok(DiscreteMeasure::uniform(line(&[0, 1])))?;
    let product = ok(TransportPlan::new(mu.clone(), mu.clone(), Matrix::from_fn(2, 2, |_, _| r(1, 4))))?;
    let swap = ok(TransportPlan::from_map(mu.clone(), mu.clone(), &IndexMap(vec![1, 0])))?;
    ensure(ok(second_marginal(&product))? == ok(second_marginal(&swap))?, || "counterexample marginals differ".into())?;
    ensure(!ok(classes_equal(&product, &swap))?, || "product and map plans share a class".into())?;
    Ok("200 same-class pairs hold; μ⊗ν vs swap map certifies converse failure".into())
}

fn equal_barycenter_degeneracy() -> Outcome {
    let p = |x: i64, y: i64| vec![r(x, 1), r(y, 1)];
    let mu = ok(DiscreteMeasure::uniform(vec![p(0, 0), p(1, 0), p(0, 1), p(2, 3)]))?;
    let l1 = ok(DiscreteMeasure::uniform(vec![p(1, 0), p(-1, 0)]))?;
    let l2 = ok(DiscreteMeasure::dirac(p(0, 0)))?;
    let lambda = ok(MetaMeasure::new(vec![l1, l2], vec![r(1, 2), r(1, 2)]))?;
    let d = ok(diagnose_existence(&CostSpec::InnerProduct, &mu, &lambda))?;
    ensure(d.pairs.len() == 1 && d.pairs[0].degenerate, || "pair not flagged degenerate".into())?;
    let table: Vec<Vec<Rational>> = mu.atoms().iter().map(|x| lambda.atoms().iter().map(|l| lifted(inner, x, l)).collect()).collect();
    let maps = ok(enumerate_feasible_maps(&mu, lambda.weights(), &EnumerationBudget::default()))?;
    let costs: Vec<Rational> = maps.iter().map(|t| map_cost(mu.weights(), t.as_slice(), &table)).collect();
    ensure(!costs.is_empty() && costs.iter().all(|c| *c == costs[0]), || format!("costs not tied: {costs:?}"))?;
    ensure(d.ties.all_tied && d.ties.feasible_maps == maps.len(), || "library tie report disagrees with oracle".into())?;
    Ok(format!("flagged degenerate; {} feasible maps all cost {}", maps.len(), costs[0]))
}

fn monge_equals_dirac_class_problem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let budget = EnumerationBudget::default();
    let c = CostSpec::SquaredEuclidean;
    for trial in 0..50 {
        let (m, n) = (rng.gen_range(1..=7), rng.gen_range(1..=4));
        let mu: DiscreteMeasure<Rational> = random::measure(&mut rng, m, 2, 4);
        let ys = random::points::<Rational, _>(&mut rng, n, 2, 4);
        let t = random::index_map(&mut rng, m, n);
        let nu = ok(mu.pushforward(&t, &ys))?;
        let monge = ok(solve_monge_maps(&c, &mu, &nu))?.value.ok_or(format!("trial {trial}: no Monge map"))?;
        let lambda = ok(class_of_map(&t, &mu, &ys))?;
        let class = ok(solve_class_problem(&c, &mu, &lambda))?.map_value.ok_or(format!("trial {trial}: no class map"))?;
        ensure(monge == class, || format!("trial {trial}: Monge {monge} vs class {class}"))?;
        let table: Vec<Vec<Rational>> = mu.atoms().iter().map(|x| nu.atoms().iter().map(|y| sq_dist(x, y)).collect()).collect();
        let oracle = ok(enumerate_feasible_maps(&mu, nu.weights(), &budget))?
            .iter()
            .map(|s| map_cost(mu.weights(), s.as_slice(), &table))
            .min()
            .ok_or("oracle found no map")?;
        ensure(oracle == monge, || format!("trial {trial}: oracle {oracle} vs {monge}"))?;
    }
    Ok("50 instances, Monge value = Dirac-class map value = oracle (exact)".into())
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "split_mass_classes", limit: Some(Duration::from_secs(1)), run: split_mass_classes },
        Criterion { id: 2, name: "solver_matches_vertex_enumeration", limit: Some(Duration::from_secs(30)), run: solver_matches_vertex_enumeration },
        Criterion { id: 3, name: "strong_duality", limit: Some(Duration::from_secs(60)), run: strong_duality },
        Criterion { id: 4, name: "optimal_supports_are_monotone", limit: None, run: optimal_supports_are_monotone },
        Criterion { id: 5, name: "plan_integral_identity", limit: None, run: plan_integral_identity },
        Criterion { id: 6, name: "class_value_dominates_kantorovich", limit: None, run: class_value_dominates_kantorovich },
        Criterion { id: 7, name: "barycenter_is_lipschitz", limit: Some(Duration::from_secs(120)), run: barycenter_is_lipschitz },
        Criterion { id: 8, name: "push_lemma_and_converse", limit: None, run: push_lemma_and_converse },
        Criterion { id: 9, name: "equal_barycenter_degeneracy", limit: None, run: equal_barycenter_degeneracy },
        Criterion { id: 10, name: "monge_equals_dirac_class_problem", limit: None, run: monge_equals_dirac_class_problem },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("[{tag}] {:>2} {:<36} {:>9.3?}  {detail}", c.id, c.name, elapsed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
