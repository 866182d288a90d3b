mod common;

use proptest::prelude::*;

use frustration_core::bounds::{
    basic_bound, cantelli_tail, cantelli_vk, sharpened_bound, BoundReport, Target, Verdict,
};
use frustration_core::cnf::{emit_dimacs, parse_dimacs, JsonFormula};
use frustration_core::frustration::{
    eval_u_direct, eval_u_poly, moments, moments_are_consistent, poly_coefficients, second_moment_all_pairs,
};
use frustration_core::generate::{generate, GenSpec, Width};
use frustration_core::oracle::{enumerate, OracleConfig, UDistribution};
use frustration_core::rational::{rat, Rational};
use frustration_core::slim::{flip_to_canonical, normalize, slim_stats};
use frustration_core::{Assignment, Clause, CnfFormula, Literal};
use num_traits::Zero;

/// Formulas over up to `max_n` variables with clause widths in `1..=max_k`.
fn formula(max_n: usize, max_k: usize, max_m: usize) -> impl Strategy<Value = CnfFormula> {
    (1..=max_n).prop_flat_map(move |n| {
        let clause = prop::collection::vec((1..=n, any::<bool>()), 1..=max_k.min(n));
        prop::collection::vec(clause, 0..=max_m).prop_map(move |raw| {
            let clauses = raw
                .into_iter()
                .map(|lits| {
                    let mut seen = Vec::new();
                    let lits: Vec<Literal> = lits
                        .into_iter()
                        .filter(|(v, _)| {
                            let fresh = !seen.contains(v);
                            seen.push(*v);
                            fresh
                        })
                        .map(|(v, p)| Literal::new(v, p))
                        .collect();
                    Clause::new(lits).expect("distinct variables")
                })
                .collect();
            CnfFormula::new(n, clauses).expect("in range")
        })
    })
}

fn dist(f: &CnfFormula) -> UDistribution {
    enumerate(f, OracleConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dimacs_round_trip(f in formula(10, 5, 20)) {
        let parsed = parse_dimacs(&emit_dimacs(&f)).unwrap();
        prop_assert_eq!(&parsed.formula, &f);
        prop_assert!(parsed.warnings.is_empty());
        let json = JsonFormula::from(&f);
        prop_assert_eq!(CnfFormula::try_from(json).unwrap(), f);
    }

    #[test]
    fn adjacency_matches_clauses(f in formula(8, 4, 12)) {
        let adj = f.adjacency_matrix();
        for (j, c) in f.clauses().iter().enumerate() {
            let row_weight: usize = adj[j].iter().map(|x| x.unsigned_abs() as usize).sum();
            prop_assert_eq!(row_weight, c.width());
            for s in 1..=f.num_vars() {
                prop_assert_eq!(adj[j][s - 1], c.sign_of(s));
                prop_assert_eq!(f.adjacency(j, s), c.sign_of(s));
            }
        }
        // An empty matrix carries no column count.
        if f.num_clauses() > 0 {
            let rows: Vec<&[i8]> = adj.iter().map(|r| r.as_slice()).collect();
            prop_assert_eq!(CnfFormula::from_adjacency(&rows).unwrap(), f);
        }
    }

    #[test]
    fn flipping_preserves_count(f in formula(8, 3, 14), s in 1usize..=8) {
        prop_assume!(s <= f.num_vars());
        let flipped = f.flip_variable(s).unwrap();
        prop_assert_eq!(dist(&flipped).counts, dist(&f).counts);
        let (canonical, _) = flip_to_canonical(&f);
        prop_assert_eq!(dist(&canonical).model_count(), dist(&f).model_count());
    }

    #[test]
    fn polynomial_matches_direct_count(f in formula(7, 3, 12)) {
        let p = poly_coefficients(&f).unwrap();
        for idx in 0..1u64 << f.num_vars() {
            let x = Assignment::from_index(idx, f.num_vars());
            let direct = eval_u_direct(&f, &x).unwrap();
            prop_assert_eq!(eval_u_poly(&p, &x).unwrap(), Rational::from_integer(direct.into()));
        }
    }

    #[test]
    fn moment_routes_agree(f in formula(8, 3, 14)) {
        let mom = moments(&f);
        let d = dist(&f);
        let p = poly_coefficients(&f).unwrap();
        prop_assert_eq!(&p.variance(), &mom.variance);
        prop_assert_eq!(second_moment_all_pairs(&f), mom.second_moment.clone());
        prop_assert_eq!(d.mean(), mom.mean.clone());
        prop_assert_eq!(d.second_moment(), mom.second_moment.clone());
        prop_assert!(moments_are_consistent(&f, &mom));
        prop_assert_eq!(mom.mean.is_zero(), f.num_clauses() == 0);
    }

    #[test]
    fn wide_clause_moments_match_oracle(f in formula(8, 6, 10)) {
        let mom = moments(&f);
        let d = dist(&f);
        prop_assert_eq!(d.mean(), mom.mean);
        prop_assert_eq!(d.second_moment(), mom.second_moment);
        prop_assert!(d.is_consistent());
    }

    #[test]
    fn scaled_low_mass_is_monotone(f in formula(8, 3, 16), steps in prop::collection::vec(1i64..40, 2..8)) {
        let d = dist(&f);
        let mut cutoffs: Vec<Rational> = steps.iter().map(|&s| rat(s, 4)).collect();
        cutoffs.sort();
        let scaled: Vec<Rational> = cutoffs.iter().map(|a| d.a2_delta_leq(&(a * a))).collect();
        prop_assert!(scaled.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn cantelli_chain(f in formula(8, 3, 16)) {
        let mom = moments(&f);
        let d = dist(&f);
        for k in 0..=f.num_clauses() {
            let vk = d.probability(k);
            prop_assert!(vk <= cantelli_vk(&mom, k as u64));
            if Rational::from_integer(k.into()) > mom.mean {
                let tail = d.tail_prob(k).unwrap();
                prop_assert!(vk <= tail);
                prop_assert!(tail <= cantelli_tail(&mom, k as u64).unwrap());
            }
        }
    }

    #[test]
    fn sound_bounds_hold(f in formula(9, 3, 20)) {
        let mom = moments(&f);
        prop_assume!(!mom.mean.is_zero());
        let d = dist(&f);
        let report = BoundReport::with_distribution(f.num_vars(), f.num_clauses(), &mom, &d).unwrap();
        let v0 = d.probability(0);
        for e in report.entries.iter().filter(|e| e.is_sound()) {
            let actual = match e.target {
                Target::Solutions => v0.clone(),
                Target::Exactly(k) => d.probability(k as usize),
                Target::AtLeast(k) => d.tail_prob(k as usize).unwrap_or_default(),
            };
            prop_assert!(actual <= e.value, "{} = {} below {}", e.name, e.value, actual);
        }
        if report.verdict == Verdict::UnsatCertified {
            prop_assert_eq!(d.model_count(), 0);
        }
        for j in 1..=20 {
            let a = rat(j, 4);
            let delta = d.delta_leq(&a).unwrap();
            prop_assert!(sharpened_bound(&mom, &delta, &a).unwrap() <= basic_bound(&mom));
        }
    }

    #[test]
    fn ratio_sandwich(f in formula(10, 3, 24)) {
        let mom = moments(&f);
        prop_assume!(!mom.mean.is_zero());
        let r = &mom.variance / (&mom.mean * &mom.mean);
        let basic = basic_bound(&mom);
        prop_assert!(&r - &r * &r <= basic);
        prop_assert!(basic <= r);
    }

    #[test]
    fn normalization_preserves_satisfiability(f in formula(8, 5, 16)) {
        let out = normalize(&f);
        let sat = dist(&f).model_count() > 0;
        prop_assert_eq!(common::is_satisfiable(&out.formula), sat);
        if let Some(decided) = out.verdict() {
            prop_assert_eq!(decided, sat);
        } else {
            let stats = slim_stats(&out.formula).unwrap();
            prop_assert!(stats.is_canonical());
            prop_assert_eq!(moments(&out.formula).mean, stats.expected_mean());
        }
        if out.count_preserving && out.formula.num_vars() <= 20 {
            prop_assert_eq!(dist(&out.formula).model_count(), dist(&f).model_count());
        }
    }

    #[test]
    fn generator_is_deterministic(n in 3usize..30, m in 0usize..60, seed in any::<u64>(), mixed in any::<bool>()) {
        let width = if mixed { Width::Range(2, 3) } else { Width::Fixed(3) };
        let spec = GenSpec { n, m, width, seed };
        let f = generate(&spec).unwrap();
        prop_assert_eq!(&f, &generate(&spec).unwrap());
        prop_assert_eq!(f.num_clauses(), m);
        for c in f.clauses() {
            let mut vars: Vec<usize> = c.literals().iter().map(|l| l.var()).collect();
            vars.dedup();
            prop_assert_eq!(vars.len(), c.width());
        }
    }
}

#[test]
fn normalization_on_larger_generated_instances() {
    for seed in 0..20 {
        let f = generate(&GenSpec { n: 40, m: 170, width: Width::Range(2, 6), seed }).unwrap();
        let out = normalize(&f);
        if out.verdict().is_none() {
            let stats = slim_stats(&out.formula).unwrap();
            assert!(stats.relations_hold());
            assert!(stats.is_canonical());
        }
        assert_eq!(common::is_satisfiable(&out.formula), common::is_satisfiable(&f));
    }
}
