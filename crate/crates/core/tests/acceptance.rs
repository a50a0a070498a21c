//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kproper::alpha::{alpha_invariant, alpha_oracle, alpha_oracle_with, GroupMode, SymmetryContext};
use kproper::exact::{int, rat, IntMatrix, Rational};
use kproper::picard::{census, dp1_family, exceptional_curves, is_ample_picard, is_nef_picard, PicardClass};
use kproper::properness::{
    check_fano, check_negative_c1, check_three_conditions, feasible_a_interval, sweep_lambda, AbstractSlice, AlphaSource,
    Backend, FeasibilityReport, KClassSetup, ParametricFamily, SweepConfig, Verdict,
};
use kproper::toric::{mixed_volume_intersection, Fan, ToricDivisor};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ok<T>(r: kproper::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn dp6_member(lambda: &Rational, a: &Rational) -> ToricDivisor {
    let fan = Arc::new(Fan::dp6());
    let c = (0..6).map(|i| if i % 2 == 0 { a.clone() } else { a * lambda }).collect();
    ToricDivisor::new(fan, c).expect("six coefficients")
}

fn c1_ampleness_boundary() -> Outcome {
    for l in [rat(13, 24), int(1), rat(19, 10)] {
        ensure(ok(dp6_member(&l, &int(1)).is_ample())?, format!("L_{l} should be ample"))?;
    }
    for l in [rat(1, 2), int(2), rat(5, 2)] {
        ensure(!ok(dp6_member(&l, &int(1)).is_ample())?, format!("L_{l} should not be ample"))?;
    }
    for l in [rat(1, 2), int(2)] {
        ensure(ok(dp6_member(&l, &int(1)).is_nef())?, format!("L_{l} should be nef"))?;
    }
    Ok("ample exactly on (1/2, 2); both ends nef".into())
}

fn c2_alpha_formula() -> Outcome {
    for (a, l) in [(int(1), int(1)), (rat(5, 4), rat(6, 5)), (int(3), rat(3, 5))] {
        let ctx = ok(SymmetryContext::new(dp6_member(&l, &a), GroupMode::Full))?;
        let got = ok(alpha_invariant(&ctx))?;
        let want = a.recip().unwrap().min((&a * &l).recip().unwrap());
        ensure(got == want, format!("(a, lambda) = ({a}, {l}): got {got}, want {want}"))?;
    }
    Ok("alpha = min{1/a, 1/(a lambda)} at three points".into())
}

fn bracket_contains(b: &[Rational; 2], x: &Rational, tol: &Rational) -> bool {
    &b[0] <= x && x <= &b[1] && &(&b[1] - &b[0]) <= tol
}

fn single_interval(report: &FeasibilityReport, lo: &Rational, hi: &Rational) -> Result<(), String> {
    ensure(report.intervals.len() == 1, format!("{} intervals", report.intervals.len()))?;
    let iv = &report.intervals[0];
    ensure(bracket_contains(&iv.lo_bracket, lo, &report.refine_tol), format!("lower bracket {:?} misses {lo}", iv.lo_bracket))?;
    ensure(bracket_contains(&iv.hi_bracket, hi, &report.refine_tol), format!("upper bracket {:?} misses {hi}", iv.hi_bracket))?;
    ensure(iv.witness.certified, "witness not certified")?;
    ensure(report.endpoint_checks.iter().all(|c| c.confirmed), "conjectured endpoint not confirmed")
}

fn c3_dp6_sweep() -> Outcome {
    let fam = ParametricFamily::dp6();
    let start = Instant::now();
    let report = ok(sweep_lambda(&fam, &SweepConfig::dp6(), true))?;
    let elapsed = start.elapsed();
    single_interval(&report, &rat(5, 6), &rat(6, 5))?;
    for l in [rat(5, 6), rat(6, 5)] {
        ensure(ok(feasible_a_interval(&fam, &l, &int(1)))?.is_empty(), format!("interval at {l} not empty"))?;
    }
    let i = ok(feasible_a_interval(&fam, &int(1), &int(1)))?;
    ensure((i.lo.clone(), i.hi.clone()) == (int(1), rat(3, 2)), format!("interval at 1 is ({}, {})", i.lo, i.hi))?;
    ensure(elapsed < Duration::from_secs(60), format!("sweep took {elapsed:?}"))?;
    let iv = &report.intervals[0];
    Ok(format!(
        "brackets [{}, {}] and [{}, {}] in {:.1?}",
        iv.lo_bracket[0], iv.lo_bracket[1], iv.hi_bracket[0], iv.hi_bracket[1], elapsed
    ))
}

fn c4_dp1() -> Outcome {
    let curves = ok(exceptional_curves(8))?;
    ensure(curves.len() == 240, format!("{} curves", curves.len()))?;
    let c = ok(census(8))?;
    ensure(c == [8, 28, 56, 56, 56, 28, 8], format!("census {c:?}"))?;
    for l in [rat(1, 100), int(1), rat(133, 100)] {
        ensure(is_ample_picard(&dp1_family(&l)), format!("L_{l} should be ample"))?;
    }
    for l in [int(0), rat(4, 3), rat(3, 2)] {
        ensure(!is_ample_picard(&dp1_family(&l)), format!("L_{l} should not be ample"))?;
    }
    let sextic = ok(PicardClass::from_integers(6, &[2, 2, 2, 2, 2, 2, 2, 3]))?;
    ensure(ok(dp1_family(&rat(4, 3)).pairing(&sextic))?.is_zero(), "sextic does not bind at 4/3")?;
    ensure(is_nef_picard(&dp1_family(&rat(4, 3))), "L_{4/3} should be nef")?;
    let report = ok(sweep_lambda(&ParametricFamily::dp1(), &SweepConfig::dp1(), true))?;
    single_interval(&report, &rat(4, 5), &rat(10, 9))?;
    Ok("240 curves, ample on (0, 4/3), interval brackets 4/5 and 10/9".into())
}

fn c5_cross_checks() -> Outcome {
    let anti = ToricDivisor::anticanonical(Arc::new(Fan::dp6()));
    for l in [rat(3, 4), int(1), rat(7, 6)] {
        let d = dp6_member(&l, &int(1));
        let p = ok(d.moment_polytope())?;
        let d2 = ok(d.self_intersection())?;
        ensure(d2 == ok(p.volume())? * 2, format!("D^2 != 2 vol at {l}"))?;
        ensure(ok(anti.intersection_number(&d))? == ok(p.boundary_measure())?, format!("-K.D != boundary at {l}"))?;
        ensure(ok(mixed_volume_intersection(&[d.clone(), d.clone()]))? == d2, format!("mixed volume differs at {l}"))?;
    }
    let rbar = ok(dp6_member(&int(1), &int(1)).slope_quantities())?.rbar;
    // 2(1 + lambda) / (a (4 lambda - 1 - lambda^2)) at lambda = a = 1
    ensure(rbar == Some(int(2)), format!("rbar = {rbar:?}"))?;
    Ok("intersections match volumes and boundary measures; rbar = 2".into())
}

fn random_ample(rng: &mut ChaCha8Rng) -> ToricDivisor {
    let fan = Arc::new(Fan::dp6());
    let k = rng.gen_range(2..4);
    let (x, y) = (rng.gen_range(-2..3), rng.gen_range(-2..3));
    let c = fan
        .rays()
        .iter()
        .map(|u| int(k) + rat(rng.gen_range(-5..6), 12) + int(x * u[0] + y * u[1]))
        .collect();
    ToricDivisor::new(fan, c).expect("six coefficients")
}

fn c6_oracle() -> Outcome {
    let ctx = ok(SymmetryContext::new(ToricDivisor::anticanonical(Arc::new(Fan::dp6())), GroupMode::Full))?;
    let o = ok(alpha_oracle(&ctx, 12))?;
    ensure(o == int(1) && ok(alpha_invariant(&ctx))? == int(1), format!("dp6 oracle {o}"))?;
    let p2 = ok(SymmetryContext::new(ToricDivisor::anticanonical(Arc::new(Fan::p2())), GroupMode::Torus))?;
    let o = ok(alpha_oracle(&p2, 1))?;
    ensure(o == rat(1, 3) && ok(alpha_invariant(&p2))? == rat(1, 3), format!("P2 oracle {o}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for t in 0..50 {
        let d = random_ample(&mut rng);
        ensure(ok(d.is_ample())?, format!("sample {t} not ample"))?;
        let ctx = ok(SymmetryContext::new(d, GroupMode::Full))?;
        let alpha = ok(alpha_invariant(&ctx))?;
        let mut prev: Option<Rational> = None;
        for k in 1..=4 {
            let o = ok(alpha_oracle_with(&ctx, k, true))?;
            ensure(o >= alpha, format!("sample {t}: oracle {o} below formula {alpha}"))?;
            ensure(prev.as_ref().is_none_or(|p| &o <= p), format!("sample {t}: oracle increased at k = {k}"))?;
            prev = Some(o);
        }
    }
    Ok("oracle = formula on both examples; 50 random classes sandwiched".into())
}

fn random_unimodular(rng: &mut ChaCha8Rng) -> IntMatrix {
    (0..rng.gen_range(1..6)).fold(IntMatrix::identity(2), |acc, _| {
        let k = rng.gen_range(-2..3);
        let e = match rng.gen_range(0..4) {
            0 => IntMatrix(vec![vec![1, k], vec![0, 1]]),
            1 => IntMatrix(vec![vec![1, 0], vec![k, 1]]),
            2 => IntMatrix(vec![vec![0, 1], vec![1, 0]]),
            _ => IntMatrix(vec![vec![-1, 0], vec![0, 1]]),
        };
        acc.mul(&e)
    })
}

fn c7_equivariance() -> Outcome {
    let fam = ParametricFamily::dp6();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lambdas = [rat(1, 2), rat(7, 8), int(1), rat(6, 5), rat(3, 2)];
    for t in 0..20 {
        let g = random_unimodular(&mut rng);
        let moved = ok(fam.transformed(&g))?;
        for l in &lambdas {
            let (Backend::Toric(a), Backend::Toric(b)) = (ok(fam.class(l))?, ok(moved.class(l))?) else {
                return Err("toric family expected".into());
            };
            let amp = ok(a.is_ample())?;
            ensure(amp == ok(b.is_ample())?, format!("matrix {t}: ampleness differs at {l}"))?;
            if !amp {
                continue;
            }
            let alpha = |d: ToricDivisor| ok(SymmetryContext::new(d, GroupMode::Full)).and_then(|c| ok(alpha_invariant(&c)));
            ensure(alpha(a.clone())? == alpha(b.clone())?, format!("matrix {t}: alpha differs at {l}"))?;
            ensure(ok(a.slope_quantities())? == ok(b.slope_quantities())?, format!("matrix {t}: mu differs at {l}"))?;
            let a5 = rat(5, 4);
            let r1 = ok(check_three_conditions(&ok(fam.setup(l, &a5, &int(1)))?))?;
            let r2 = ok(check_three_conditions(&ok(moved.setup(l, &a5, &int(1)))?))?;
            ensure(r1 == r2, format!("matrix {t}: report differs at {l}"))?;
            ensure(
                ok(feasible_a_interval(&fam, l, &int(1)))? == ok(feasible_a_interval(&moved, l, &int(1)))?,
                format!("matrix {t}: interval differs at {l}"),
            )?;
        }
    }
    Ok("20 lattice changes leave every output unchanged".into())
}

fn c8_reciprocity() -> Outcome {
    let fam = ParametricFamily::dp6();
    let mut checked = 0;
    for k in 11..40 {
        let l = rat(k, 20);
        let a = ok(feasible_a_interval(&fam, &l, &int(1)))?;
        let b = ok(feasible_a_interval(&fam, &l.recip().unwrap(), &int(1)))?;
        ensure(a.is_empty() == b.is_empty(), format!("emptiness differs at {l}"))?;
        ensure(&a.lo * &l == b.lo && &a.hi * &l == b.hi, format!("a -> a lambda fails at {l}"))?;
        checked += 1;
    }
    Ok(format!("{checked} grid points"))
}

fn c9_auxiliary_modes() -> Outcome {
    let dp6 = Backend::Toric(ToricDivisor::anticanonical(Arc::new(Fan::dp6())));
    let r = ok(check_fano(&dp6, &AlphaSource::Formula(GroupMode::Full)))?;
    ensure(r.holds() && r.alpha.as_ref().map(|a| &a.value) == Some(&int(1)), "dp6 Fano check failed")?;
    let mut reports = Vec::new();
    for n in [2, 3] {
        let s = Backend::Slice(ok(AbstractSlice::canonical_polarization(n, int(1)))?);
        let r = ok(check_negative_c1(&s))?;
        ensure(r.verdict == Verdict::Proper, format!("canonical slice fails for n = {n}"))?;
        reports.push((r.verdict, r.mu, r.conditions[0].holds));
    }
    ensure(reports[0] == reports[1], "n = 2 and n = 3 differ")?;
    let rational = [
        dp6,
        Backend::Toric(ToricDivisor::anticanonical(Arc::new(Fan::p2()))),
        Backend::Picard(dp1_family(&int(1))),
    ];
    for b in &rational {
        ensure(check_negative_c1(b).is_err(), format!("{} backend accepted", b.kind()))?;
    }
    let setup = ok(KClassSetup::new(rational[0].clone(), int(0), AlphaSource::Formula(GroupMode::Full)))?;
    ensure(check_three_conditions(&setup).is_err(), "eps = 0 on a rational surface accepted")?;
    Ok("Fano passes (1 > 2/3); canonical slices pass; rational surfaces rejected".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("dp6 ampleness boundary", c1_ampleness_boundary),
        ("toric alpha formula", c2_alpha_formula),
        ("dp6 sweep", c3_dp6_sweep),
        ("dp1 backend", c4_dp1),
        ("cross-checks", c5_cross_checks),
        ("oracle agreement", c6_oracle),
        ("metamorphic equivariance", c7_equivariance),
        ("reciprocity", c8_reciprocity),
        ("auxiliary modes", c9_auxiliary_modes),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail} [{:.2?}]", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{:.2?}]", i + 1, start.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
