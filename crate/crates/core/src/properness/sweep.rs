//! Certified sweeps over the family parameter.
//!
//! Every grid point is decided exactly. Each feasible/infeasible neighbour
//! pair is bisected with exact probes down to `refine_tol`, so a bracket is
//! a pair `[lambda_out, lambda_in]` of exactly decided parameters.

use serde::{Deserialize, Serialize};

use super::family::{certify, feasible_a_interval, AInterval, ParametricFamily};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::par;

/// Grids larger than this are rejected rather than silently truncated.
pub const MAX_GRID: usize = 1_000_000;

fn default_epsilon() -> Rational {
    Rational::one()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: String,
    #[serde(default = "default_epsilon")]
    pub epsilon: Rational,
    pub lambda_min: Rational,
    pub lambda_max: Rational,
    pub step: Rational,
    pub refine_tol: Rational,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conjectured_endpoints: Vec<Rational>,
}

impl SweepConfig {
    pub fn dp6() -> Self {
        SweepConfig {
            family: "dp6".into(),
            epsilon: Rational::one(),
            lambda_min: Rational::new(1, 2),
            lambda_max: Rational::from(2),
            step: Rational::new(1, 100),
            refine_tol: Rational::new(1, 1_000_000),
            conjectured_endpoints: vec![Rational::new(5, 6), Rational::new(6, 5)],
        }
    }

    pub fn dp1() -> Self {
        SweepConfig {
            family: "dp1".into(),
            epsilon: Rational::one(),
            lambda_min: Rational::zero(),
            lambda_max: Rational::new(4, 3),
            step: Rational::new(1, 100),
            refine_tol: Rational::new(1, 1_000_000),
            conjectured_endpoints: vec![Rational::new(4, 5), Rational::new(10, 9)],
        }
    }
}

/// `[low, high]` in increasing order.
pub type Bracket = [Rational; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub lambda: Rational,
    pub a: Rational,
    /// The full checker passed at `(lambda, a)`.
    pub certified: bool,
}

/// Scale interval and binding constraints at one parameter value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDiagnostics {
    pub lambda: Rational,
    pub a_interval: Bracket,
    pub lower_binding: String,
    pub upper_binding: String,
}

impl EdgeDiagnostics {
    fn new(lambda: &Rational, i: &AInterval) -> Self {
        EdgeDiagnostics {
            lambda: lambda.clone(),
            a_interval: [i.lo.clone(), i.hi.clone()],
            lower_binding: i.lower_binding.clone(),
            upper_binding: i.upper_binding.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibleInterval {
    pub lo_bracket: Bracket,
    pub hi_bracket: Bracket,
    /// The run reaches the end of the range, so that bracket is degenerate.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub lo_clipped: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub hi_clipped: bool,
    pub witness: Witness,
    pub at_witness: EdgeDiagnostics,
    pub near_lo: EdgeDiagnostics,
    pub near_hi: EdgeDiagnostics,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointCheck {
    pub endpoint: Rational,
    pub below: bool,
    pub at: bool,
    pub above: bool,
    /// Feasibility flips across the endpoint and fails at it.
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub family: String,
    pub epsilon: Rational,
    pub lambda_min: Rational,
    pub lambda_max: Rational,
    pub step: Rational,
    pub refine_tol: Rational,
    pub grid_points: usize,
    pub feasible_grid_points: usize,
    pub intervals: Vec<FeasibleInterval>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub endpoint_checks: Vec<EndpointCheck>,
}

/// Feasible interval at `lambda`, or `None` outside the ample range.
fn probe(family: &ParametricFamily, lambda: &Rational, eps: &Rational) -> Result<Option<AInterval>> {
    match feasible_a_interval(family, lambda, eps) {
        Ok(i) => Ok(Some(i)),
        Err(Error::ClassNotKahler) | Err(Error::NotAmple) => Ok(None),
        Err(e) => Err(e),
    }
}

fn is_feasible(family: &ParametricFamily, lambda: &Rational, eps: &Rational) -> Result<bool> {
    Ok(probe(family, lambda, eps)?.is_some_and(|i| !i.is_empty()))
}

/// Shrink `[inside, outside]` to width `tol`; returns the final pair.
fn bisect(
    family: &ParametricFamily,
    eps: &Rational,
    mut inside: Rational,
    mut outside: Rational,
    tol: &Rational,
) -> Result<(Rational, Rational)> {
    while (&inside - &outside).abs() > *tol {
        let mid = (&inside + &outside) / 2;
        if is_feasible(family, &mid, eps)? {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok((inside, outside))
}

fn grid(cfg: &SweepConfig) -> Result<Vec<Rational>> {
    if !cfg.step.is_positive() || !cfg.refine_tol.is_positive() {
        return Err(Error::InvalidInput("step and refine_tol must be positive".into()));
    }
    if cfg.lambda_min > cfg.lambda_max {
        return Err(Error::InvalidInput("empty grid: lambda_min exceeds lambda_max".into()));
    }
    let count = ((&cfg.lambda_max - &cfg.lambda_min) / &cfg.step).floor();
    let count: usize = count
        .try_into()
        .ok()
        .filter(|c: &usize| *c < MAX_GRID)
        .ok_or_else(|| Error::InvalidInput(format!("grid exceeds {MAX_GRID} points")))?;
    Ok((0..=count).map(|k| &cfg.lambda_min + &cfg.step * Rational::from(k as i64)).collect())
}

/// Grid point with the smallest denominator, ties broken towards the
/// middle of the run and then towards smaller values.
fn pick_witness(run: &[Rational]) -> &Rational {
    let center = (&run[0] + &run[run.len() - 1]) / 2;
    run.iter()
        .min_by(|x, y| {
            x.denom()
                .cmp(y.denom())
                .then_with(|| (*x - &center).abs().cmp(&(*y - &center).abs()))
                .then_with(|| x.cmp(y))
        })
        .expect("nonempty run")
}

pub fn sweep_lambda(family: &ParametricFamily, cfg: &SweepConfig, parallel: bool) -> Result<FeasibilityReport> {
    let eps = &cfg.epsilon;
    let tol = &cfg.refine_tol;
    let points = grid(cfg)?;
    let probes = par::try_map(&points, parallel, |l| probe(family, l, eps))?;
    let feasible: Vec<bool> = probes.iter().map(|p| p.as_ref().is_some_and(|i| !i.is_empty())).collect();

    // maximal runs of feasible grid points
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < points.len() {
        if feasible[i] {
            let start = i;
            while i + 1 < points.len() && feasible[i + 1] {
                i += 1;
            }
            runs.push((start, i));
        }
        i += 1;
    }

    // every feasible/infeasible edge, refined independently
    let mut edges: Vec<(Rational, Rational)> = Vec::new();
    for &(s, e) in &runs {
        if s > 0 {
            edges.push((points[s].clone(), points[s - 1].clone()));
        }
        if e + 1 < points.len() {
            edges.push((points[e].clone(), points[e + 1].clone()));
        }
    }
    let refined = par::try_map(&edges, parallel, |(inside, outside)| {
        bisect(family, eps, inside.clone(), outside.clone(), tol)
    })?;
    let mut refined = refined.into_iter();

    let mut intervals = Vec::with_capacity(runs.len());
    for &(s, e) in &runs {
        let diag = |l: &Rational| -> Result<EdgeDiagnostics> {
            let i = feasible_a_interval(family, l, eps)?;
            Ok(EdgeDiagnostics::new(l, &i))
        };
        let (lo_bracket, lo_in, lo_clipped) = if s > 0 {
            let (inside, outside) = refined.next().expect("edge refined");
            ([outside, inside.clone()], inside, false)
        } else {
            ([points[s].clone(), points[s].clone()], points[s].clone(), true)
        };
        let (hi_bracket, hi_in, hi_clipped) = if e + 1 < points.len() {
            let (inside, outside) = refined.next().expect("edge refined");
            ([inside.clone(), outside], inside, false)
        } else {
            ([points[e].clone(), points[e].clone()], points[e].clone(), true)
        };
        let wl = pick_witness(&points[s..=e]).clone();
        let wi = probes[points.iter().position(|p| *p == wl).expect("grid point")]
            .clone()
            .expect("feasible point");
        let a = wi.midpoint();
        let certified = certify(family, &wl, &a, eps)?;
        intervals.push(FeasibleInterval {
            lo_bracket,
            hi_bracket,
            lo_clipped,
            hi_clipped,
            witness: Witness { lambda: wl.clone(), a, certified },
            at_witness: EdgeDiagnostics::new(&wl, &wi),
            near_lo: diag(&lo_in)?,
            near_hi: diag(&hi_in)?,
        });
    }

    let endpoint_checks = cfg
        .conjectured_endpoints
        .iter()
        .map(|x| {
            let below = is_feasible(family, &(x - tol), eps)?;
            let at = is_feasible(family, x, eps)?;
            let above = is_feasible(family, &(x + tol), eps)?;
            Ok(EndpointCheck { endpoint: x.clone(), below, at, above, confirmed: below != above && !at })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(FeasibilityReport {
        family: family.name.clone(),
        epsilon: eps.clone(),
        lambda_min: cfg.lambda_min.clone(),
        lambda_max: cfg.lambda_max.clone(),
        step: cfg.step.clone(),
        refine_tol: tol.clone(),
        grid_points: points.len(),
        feasible_grid_points: feasible.iter().filter(|f| **f).count(),
        intervals,
        endpoint_checks,
    })
}
