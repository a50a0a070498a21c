use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::exact::{int, rat, IntMatrix};
use crate::picard::{dp1_family, exceptional_curves};
use crate::toric::Fan;

fn dp6_class(lambda: &Rational, a: &Rational) -> ToricDivisor {
    let fan = Arc::new(Fan::dp6());
    let c = (0..6).map(|i| if i % 2 == 0 { a.clone() } else { a * lambda }).collect();
    ToricDivisor::new(fan, c).unwrap()
}

fn full() -> AlphaSource {
    AlphaSource::Formula(GroupMode::Full)
}

fn supplied(v: Rational) -> AlphaSource {
    AlphaSource::Supplied { value: v, provenance: "test".into() }
}

/// Hand-derived scale interval for the hexagonal family at `eps = 1`:
/// walls pair to `2 lambda - 1` (odd rays) and `2 - lambda` (even rays),
/// every `K.D_i = -1`, and alpha of the unscaled class is `min{1, 1/lambda}`.
fn dp6_oracle(lambda: &Rational) -> (Rational, Rational) {
    let one = int(1);
    let odd = lambda * 2 - 1;
    let even = int(2) - lambda;
    let mu1 = (&one + lambda) / (lambda * 4 - 1 - lambda * lambda);
    let s = &mu1 * 2;
    let lo = [
        int(0),
        odd.recip().unwrap(),
        even.recip().unwrap(),
        &s - odd.recip().unwrap(),
        &s - even.recip().unwrap(),
    ]
    .into_iter()
    .reduce(Rational::max)
    .unwrap();
    let hi = rat(3, 2).min(rat(3, 2) / lambda);
    (lo, hi)
}

#[test]
fn three_condition_examples() {
    let r = check_three_conditions(&KClassSetup::new(Backend::Toric(dp6_class(&int(1), &rat(5, 4))), int(1), full()).unwrap())
        .unwrap();
    assert!(r.holds());
    assert_eq!(r.scope, Scope::GInvariant);
    assert_eq!(r.alpha.as_ref().unwrap().value, rat(4, 5));
    assert_eq!(r.alpha.as_ref().unwrap().stabilizer_order, Some(12));
    assert_eq!(r.condition(CONDITION_1).unwrap().statement, "1 < 6/5");

    let setup = ParametricFamily::dp1().setup(&int(1), &rat(5, 4), &int(1)).unwrap();
    let r = check_three_conditions(&setup).unwrap();
    assert!(r.holds());
    assert_eq!(r.scope, Scope::AllPotentials);
    assert_eq!(r.alpha.as_ref().unwrap().provenance, DERVAN_PROVENANCE);

    let r = check_three_conditions(&KClassSetup::new(Backend::Toric(dp6_class(&int(1), &int(2))), int(1), full()).unwrap())
        .unwrap();
    assert_eq!(r.verdict, Verdict::CriterionNotSatisfied);
    assert_eq!(r.failing(), vec![CONDITION_1]);
    assert_eq!(r.alpha.unwrap().value, rat(1, 2));
}

#[test]
fn three_condition_errors() {
    let bad = Backend::Toric(dp6_class(&int(2), &int(1)));
    assert_eq!(check_three_conditions(&KClassSetup::new(bad, int(1), full()).unwrap()), Err(Error::ClassNotKahler));
    let slice = Backend::Slice(AbstractSlice::canonical_polarization(2, int(1)).unwrap());
    assert!(matches!(
        check_three_conditions(&KClassSetup::new(slice, int(1), full()).unwrap()),
        Err(Error::AlphaUnavailable(_))
    ));
    assert!(KClassSetup::new(Backend::Toric(dp6_class(&int(1), &int(1))), int(-1), full()).is_err());
}

#[test]
fn zero_epsilon_routes_to_negative_c1() {
    let toric = KClassSetup::new(Backend::Toric(dp6_class(&int(1), &int(1))), int(0), full()).unwrap();
    assert_eq!(check_three_conditions(&toric), Err(Error::Precondition("criterion requires c1 < 0".into())));
    let slice = Backend::Slice(AbstractSlice::canonical_polarization(2, int(3)).unwrap());
    let r = check_three_conditions(&KClassSetup::new(slice, int(0), supplied(int(1))).unwrap()).unwrap();
    assert_eq!(r.mode, CheckMode::NegativeC1);
    assert!(r.holds());
}

#[test]
fn negative_c1_examples() {
    for n in [2, 3] {
        let s = Backend::Slice(AbstractSlice::canonical_polarization(n, int(5)).unwrap());
        let r = check_negative_c1(&s).unwrap();
        assert!(r.holds());
        assert_eq!(r.mu, int(-1));
        assert_eq!(r.scope, Scope::AllPotentials);
        let c = r.conditions[0].class.as_ref().unwrap();
        // n K - (n-1) K = K
        assert_eq!((&c.l + &c.k), int(1));
    }
    let curve = TestCurve { name: "C".into(), l: int(1), k: int(1) };
    let s = AbstractSlice::new(2, int(5), int(2), int(1), vec![curve]).unwrap();
    let r = check_negative_c1(&Backend::Slice(s)).unwrap();
    assert!(!r.holds());
    assert_eq!(r.conditions[0].binding.as_ref().unwrap().value, rat(-1, 5));

    let err = Err(Error::Precondition("criterion requires c1 < 0".into()));
    assert_eq!(check_negative_c1(&Backend::Toric(dp6_class(&int(1), &int(1)))), err);
    assert_eq!(check_negative_c1(&Backend::Picard(dp1_family(&int(1)))), err);
}

#[test]
fn fano_examples() {
    let dp6 = Backend::Toric(ToricDivisor::anticanonical(Arc::new(Fan::dp6())));
    let r = check_fano(&dp6, &full()).unwrap();
    assert!(r.holds());
    assert_eq!(r.alpha.as_ref().unwrap().value, int(1));
    assert_eq!(r.scope, Scope::GInvariant);

    let p2 = Backend::Toric(ToricDivisor::anticanonical(Arc::new(Fan::p2())));
    let r = check_fano(&p2, &AlphaSource::Formula(GroupMode::Torus)).unwrap();
    assert_eq!(r.verdict, Verdict::CriterionNotSatisfied);
    assert_eq!(r.alpha.unwrap().value, rat(1, 3));

    let dp1 = Backend::Picard(dp1_family(&int(1)));
    let r = check_fano(&dp1, &supplied(int(1))).unwrap();
    assert!(r.holds());
    assert_eq!(r.scope, Scope::AllPotentials);
}

#[test]
fn fano_agrees_with_slack_slightly_above_one() {
    let anti = Backend::Toric(ToricDivisor::anticanonical(Arc::new(Fan::dp6())));
    let r = check_three_conditions(&KClassSetup::new(anti, rat(101, 100), full()).unwrap()).unwrap();
    assert!(r.holds());
}

#[test]
fn jflow_examples() {
    let fan = Arc::new(Fan::dp6());
    let anti = ToricDivisor::anticanonical(fan.clone());
    let d = Backend::Toric(anti.clone());
    assert!(jflow_condition_surface(&d, &d).unwrap());
    let w = Backend::Toric(dp6_class(&rat(3, 2), &int(1)));
    assert!(jflow_condition_surface(&d, &w).unwrap());

    // boundary: 2cD - W is nef but not ample, yet the criterion applies to D
    let d = Backend::Toric(anti.scale(&rat(5, 4)));
    let mut wc = vec![int(1); 6];
    wc[0] = int(4);
    wc[1] = int(4);
    let w = Backend::Toric(ToricDivisor::new(fan.clone(), wc).unwrap());
    assert!(w.is_ample().unwrap());
    assert!(!jflow_condition_surface(&d, &w).unwrap());
    let c = w.surface_pairing(&d).unwrap() / d.surface_pairing(&d).unwrap();
    let class = d.combine(&(c * 2), &w, &int(-1)).unwrap();
    let Backend::Toric(class) = class else { unreachable!() };
    assert!(class.is_nef().unwrap());
    let r = check_three_conditions(&KClassSetup::new(d, int(1), full()).unwrap()).unwrap();
    assert!(r.holds());

    let three = ToricDivisor::anticanonical(Arc::new(
        Fan::new(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap(),
    ));
    let b = Backend::Toric(three);
    assert!(jflow_condition_surface(&b, &b).is_err());
}

#[test]
fn interval_examples() {
    let dp6 = ParametricFamily::dp6();
    let i = feasible_a_interval(&dp6, &int(1), &int(1)).unwrap();
    assert_eq!((i.lo.clone(), i.hi.clone()), (int(1), rat(3, 2)));
    assert!(!i.is_empty());

    let right = feasible_a_interval(&dp6, &rat(6, 5), &int(1)).unwrap();
    assert_eq!((right.lo.clone(), right.hi.clone()), (rat(5, 4), rat(5, 4)));
    assert!(right.is_empty());
    assert!(right.lower_binding.starts_with(CONDITION_2));
    assert_eq!(right.upper_binding, CONDITION_1);

    let left = feasible_a_interval(&dp6, &rat(5, 6), &int(1)).unwrap();
    assert_eq!((left.lo.clone(), left.hi.clone()), (rat(3, 2), rat(3, 2)));

    let dp1 = ParametricFamily::dp1();
    let i = feasible_a_interval(&dp1, &int(1), &int(1)).unwrap();
    assert_eq!((i.lo, i.hi), (int(1), rat(3, 2)));
    for l in [rat(4, 5), rat(10, 9)] {
        assert!(feasible_a_interval(&dp1, &l, &int(1)).unwrap().is_empty());
    }

    assert_eq!(feasible_a_interval(&dp6, &int(2), &int(1)), Err(Error::ClassNotKahler));
    assert_eq!(feasible_a_interval(&dp1, &rat(4, 3), &int(1)), Err(Error::ClassNotKahler));
}

/// Pairings of `L_lambda` with all 240 curves, straight from the types.
fn dp1_oracle(lambda: &Rational) -> (Rational, Rational) {
    let l: Vec<Rational> = exceptional_curves(8)
        .unwrap()
        .iter()
        .map(|c| {
            let m = c.coords();
            &m[0] * 3 - m[1..8].iter().cloned().sum::<Rational>() - lambda * &m[8]
        })
        .collect();
    let min = l.iter().cloned().reduce(Rational::min).unwrap();
    let max = l.iter().cloned().reduce(Rational::max).unwrap();
    let mu1 = (int(2) - lambda) / (int(2) - lambda * lambda);
    let lo = min.recip().unwrap().max(&mu1 * 2 - max.recip().unwrap());
    let hi = rat(3, 2) * int(1).min((int(2) - lambda).recip().unwrap());
    (lo, hi)
}

#[test]
fn sweep_small_dp6() {
    let cfg = SweepConfig { step: rat(1, 10), refine_tol: rat(1, 1000), ..SweepConfig::dp6() };
    let fam = ParametricFamily::dp6();
    let seq = sweep_lambda(&fam, &cfg, false).unwrap();
    let par = sweep_lambda(&fam, &cfg, true).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq.intervals.len(), 1);
    let iv = &seq.intervals[0];
    assert!(iv.lo_bracket[0] <= rat(5, 6) && rat(5, 6) <= iv.lo_bracket[1]);
    assert!(iv.hi_bracket[0] <= rat(6, 5) && rat(6, 5) <= iv.hi_bracket[1]);
    assert_eq!(iv.witness, Witness { lambda: int(1), a: rat(5, 4), certified: true });
    assert!(seq.endpoint_checks.iter().all(|c| c.confirmed));
}

#[test]
fn sweep_outside_ample_range_is_empty() {
    let cfg = SweepConfig {
        lambda_min: rat(2, 1),
        lambda_max: int(3),
        step: rat(1, 4),
        conjectured_endpoints: vec![],
        ..SweepConfig::dp6()
    };
    let r = sweep_lambda(&ParametricFamily::dp6(), &cfg, false).unwrap();
    assert!(r.intervals.is_empty());
    assert_eq!(r.grid_points, 5);
    let bad = SweepConfig { lambda_min: int(3), lambda_max: int(2), ..cfg.clone() };
    assert!(sweep_lambda(&ParametricFamily::dp6(), &bad, false).is_err());
    let bad = SweepConfig { step: int(0), ..cfg };
    assert!(sweep_lambda(&ParametricFamily::dp6(), &bad, false).is_err());
}

#[test]
fn report_json_round_trip() {
    let r = check_three_conditions(&KClassSetup::new(Backend::Toric(dp6_class(&int(1), &int(2))), int(1), full()).unwrap())
        .unwrap();
    let s = serde_json::to_string(&r).unwrap();
    assert!(s.contains("\"criterion not satisfied\""));
    assert_eq!(serde_json::from_str::<PropernessReport>(&s).unwrap(), r);
    let cfg: SweepConfig = serde_json::from_str(
        r#"{"family": "dp6", "lambda_min": "1/2", "lambda_max": "2", "step": "1/100", "refine_tol": "1/1000000"}"#,
    )
    .unwrap();
    assert_eq!(cfg.epsilon, int(1));
    assert!(serde_json::from_str::<SweepConfig>(r#"{"family": "dp6", "lambda_min": "2/4", "lambda_max": "2", "step": "1/100", "refine_tol": "1/10"}"#).is_err());
}

fn arb_lambda() -> impl Strategy<Value = Rational> {
    (1i64..60, 1i64..40).prop_map(|(p, q)| rat(p, q)).prop_filter("ample range", |l| *l > rat(1, 2) && *l < int(2))
}

fn unimodular() -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec((0usize..4, -2i64..3), 1..5).prop_map(|ops| {
        ops.into_iter().fold(IntMatrix::identity(2), |acc, (kind, k)| {
            let e = match kind {
                0 => IntMatrix(vec![vec![1, k], vec![0, 1]]),
                1 => IntMatrix(vec![vec![1, 0], vec![k, 1]]),
                2 => IntMatrix(vec![vec![0, 1], vec![1, 0]]),
                _ => IntMatrix(vec![vec![-1, 0], vec![0, 1]]),
            };
            acc.mul(&e)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dp6_interval_matches_hand_derivation(l in arb_lambda()) {
        let i = feasible_a_interval(&ParametricFamily::dp6(), &l, &int(1)).unwrap();
        let (lo, hi) = dp6_oracle(&l);
        prop_assert_eq!(i.lo, lo);
        prop_assert_eq!(i.hi, hi);
    }

    #[test]
    fn dp1_interval_matches_curve_oracle(p in 1i64..133) {
        let l = rat(p, 100);
        let i = feasible_a_interval(&ParametricFamily::dp1(), &l, &int(1)).unwrap();
        let (lo, hi) = dp1_oracle(&l);
        prop_assert_eq!(i.lo, lo);
        prop_assert_eq!(i.hi, hi);
    }

    #[test]
    fn reciprocity(l in arb_lambda()) {
        let fam = ParametricFamily::dp6();
        let a = feasible_a_interval(&fam, &l, &int(1)).unwrap();
        let b = feasible_a_interval(&fam, &l.recip().unwrap(), &int(1)).unwrap();
        prop_assert_eq!(a.is_empty(), b.is_empty());
        prop_assert_eq!(&a.lo * &l, b.lo);
        prop_assert_eq!(&a.hi * &l, b.hi);
    }

    #[test]
    fn checker_agrees_with_interval(l in arb_lambda(), p in 1i64..40, q in 1i64..20) {
        let fam = ParametricFamily::dp6();
        let a = rat(p, q);
        let i = feasible_a_interval(&fam, &l, &int(1)).unwrap();
        prop_assert_eq!(certify(&fam, &l, &a, &int(1)).unwrap(), i.contains(&a));
        if !i.is_empty() {
            prop_assert!(certify(&fam, &l, &i.midpoint(), &int(1)).unwrap());
        }
    }

    #[test]
    fn larger_slack_moves_bounds(l in arb_lambda(), e in 1i64..8) {
        let fam = ParametricFamily::dp6();
        let e1 = rat(e, 4);
        let e2 = rat(e + 1, 4);
        let (c1, _, _) = constraints(&fam, &l, &e1).unwrap();
        let (c2, _, _) = constraints(&fam, &l, &e2).unwrap();
        let root = |c: &Constraint| -(&c.q / &c.p);
        for (x, y) in c1.iter().zip(&c2) {
            prop_assert_eq!(&x.label, &y.label);
            if x.label == CONDITION_1 {
                prop_assert!(root(y) < root(x));
            } else if x.label.starts_with(CONDITION_2) {
                prop_assert!(root(y) < root(x));
            }
        }
        let i1 = feasible_a_interval(&fam, &l, &e1).unwrap();
        let i2 = feasible_a_interval(&fam, &l, &e2).unwrap();
        prop_assert!(i2.hi < i1.hi);
        prop_assert_eq!(&i1.upper_binding, CONDITION_1);
    }

    #[test]
    fn lattice_change_equivariance(l in arb_lambda(), g in unimodular()) {
        let fam = ParametricFamily::dp6();
        let moved = fam.transformed(&g).unwrap();
        prop_assert_eq!(
            feasible_a_interval(&fam, &l, &int(1)).unwrap(),
            feasible_a_interval(&moved, &l, &int(1)).unwrap()
        );
        let a = rat(5, 4);
        let r1 = check_three_conditions(&fam.setup(&l, &a, &int(1)).unwrap()).unwrap();
        let r2 = check_three_conditions(&moved.setup(&l, &a, &int(1)).unwrap()).unwrap();
        prop_assert_eq!(r1.verdict, r2.verdict);
        prop_assert_eq!(r1.alpha, r2.alpha);
        prop_assert_eq!(r1.mu, r2.mu);
    }
}
