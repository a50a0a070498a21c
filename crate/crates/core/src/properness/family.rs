//! One-parameter families `a (B + lambda V)` and their exact feasible
//! scale intervals.
//!
//! For fixed `lambda` write `L = a L_1`. Alpha scales as `1/a` and `mu` as
//! `1/a`, so each condition becomes finitely many inequalities `p a + q > 0`:
//!
//! * (1) `a < (n+1) alpha_1 / (n eps)`
//! * (2) `eps a (L_1.C) + K.C > 0` for every test curve `C`
//! * (3) `(eps a - n mu_1)(L_1.C) - (n-1) K.C > 0` for every test curve `C`

use serde::{Deserialize, Serialize};

use super::{check_three_conditions, AlphaSource, Backend, KClassSetup, CONDITION_1, CONDITION_2, CONDITION_3};
use crate::alpha::{alpha_invariant, GroupMode, SymmetryContext};
use crate::error::{Error, Result};
use crate::exact::{IntMatrix, Rational};
use crate::picard::{self, BlowupSurface};
use crate::toric::{Fan, ToricDivisor};

use std::sync::Arc;

/// Alpha of the unscaled member `L_lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyAlpha {
    /// Recomputed by the toric formula at every `lambda`.
    Formula(GroupMode),
    /// `min{1, 1/(2 - lambda)}`, the bound for the degree one del Pezzo family.
    Dervan,
    Constant { value: Rational, provenance: String },
}

pub const DERVAN_PROVENANCE: &str = "supplied bound (Dervan)";

#[derive(Clone, Debug, PartialEq)]
pub struct ParametricFamily {
    pub name: String,
    base: Backend,
    direction: Backend,
    alpha: FamilyAlpha,
}

impl ParametricFamily {
    pub fn new(name: impl Into<String>, base: Backend, direction: Backend, alpha: FamilyAlpha) -> Result<Self> {
        base.combine(&Rational::one(), &direction, &Rational::one())?;
        if matches!(alpha, FamilyAlpha::Formula(_)) && !matches!(base, Backend::Toric(_)) {
            return Err(Error::AlphaUnavailable("the toric formula needs a toric family".into()));
        }
        Ok(ParametricFamily { name: name.into(), base, direction, alpha })
    }

    /// `L_lambda = (D_1 + D_3 + D_5) + lambda (D_2 + D_4 + D_6)` on the
    /// hexagonal fan, alpha from the formula with the full group.
    pub fn dp6() -> Self {
        let fan = Arc::new(Fan::dp6());
        let pick = |parity: usize| {
            let c = (0..6).map(|i| if i % 2 == parity { Rational::one() } else { Rational::zero() }).collect();
            Backend::Toric(ToricDivisor::new(fan.clone(), c).expect("six rays"))
        };
        ParametricFamily::new("dp6", pick(0), pick(1), FamilyAlpha::Formula(GroupMode::Full)).expect("builtin family")
    }

    /// `L_lambda = 3H - E_1 - ... - E_7 - lambda E_8`, alpha from Dervan's bound.
    pub fn dp1() -> Self {
        let s = BlowupSurface::new(8).expect("r = 8");
        let base = picard::dp1_family(&Rational::zero());
        let direction = s.exceptional(8).expect("E_8").scale(&Rational::from(-1));
        ParametricFamily::new("dp1", Backend::Picard(base), Backend::Picard(direction), FamilyAlpha::Dervan)
            .expect("builtin family")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "dp6" => Some(ParametricFamily::dp6()),
            "dp1" => Some(ParametricFamily::dp1()),
            _ => None,
        }
    }

    pub fn base(&self) -> &Backend {
        &self.base
    }

    pub fn direction(&self) -> &Backend {
        &self.direction
    }

    pub fn alpha_kind(&self) -> &FamilyAlpha {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// The unscaled member `L_lambda`.
    pub fn class(&self, lambda: &Rational) -> Result<Backend> {
        self.base.combine(&Rational::one(), &self.direction, lambda)
    }

    /// The same family after a lattice change of basis (toric families).
    pub fn transformed(&self, g: &IntMatrix) -> Result<Self> {
        let (Backend::Toric(b), Backend::Toric(d)) = (&self.base, &self.direction) else {
            return Err(Error::Unsupported("lattice changes apply to toric families".into()));
        };
        let fan = Arc::new(b.fan().transformed(g)?);
        let b = ToricDivisor::new(fan.clone(), b.coeffs().to_vec())?;
        let d = ToricDivisor::new(fan, d.coeffs().to_vec())?;
        let alpha = match &self.alpha {
            FamilyAlpha::Formula(GroupMode::Explicit(gs)) => {
                let inv = g.inverse_unimodular().expect("unimodular");
                FamilyAlpha::Formula(GroupMode::Explicit(gs.iter().map(|h| g.mul(h).mul(&inv)).collect()))
            }
            a => a.clone(),
        };
        ParametricFamily::new(self.name.clone(), Backend::Toric(b), Backend::Toric(d), alpha)
    }

    /// Alpha of `L_lambda` and its provenance.
    pub fn unscaled_alpha(&self, lambda: &Rational, class: &Backend) -> Result<(Rational, String)> {
        match &self.alpha {
            FamilyAlpha::Formula(mode) => {
                let Backend::Toric(d) = class else {
                    return Err(Error::AlphaUnavailable("the toric formula needs a toric family".into()));
                };
                let ctx = SymmetryContext::new(d.clone(), mode.clone())?;
                Ok((alpha_invariant(&ctx)?, format!("toric formula, {} group", mode.label())))
            }
            FamilyAlpha::Dervan => {
                let two_minus = Rational::from(2) - lambda;
                if !two_minus.is_positive() {
                    return Err(Error::AlphaUnavailable("bound needs lambda < 2".into()));
                }
                Ok((Rational::one().min(two_minus.recip()?), DERVAN_PROVENANCE.into()))
            }
            FamilyAlpha::Constant { value, provenance } => Ok((value.clone(), provenance.clone())),
        }
    }

    /// Setup for the member `a L_lambda`.
    pub fn setup(&self, lambda: &Rational, a: &Rational, epsilon: &Rational) -> Result<KClassSetup> {
        if !a.is_positive() {
            return Err(Error::InvalidInput("scale must be positive".into()));
        }
        let class = self.class(lambda)?;
        let alpha = match &self.alpha {
            FamilyAlpha::Formula(mode) => AlphaSource::Formula(mode.clone()),
            _ => {
                let (value, provenance) = self.unscaled_alpha(lambda, &class)?;
                AlphaSource::Supplied { value: value / a, provenance }
            }
        };
        KClassSetup::new(class.scale(a)?, epsilon.clone(), alpha)
    }
}

/// `p a + q > 0`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub label: String,
    pub p: Rational,
    pub q: Rational,
}

impl Constraint {
    pub fn holds(&self, a: &Rational) -> bool {
        (&self.p * a + &self.q).is_positive()
    }
}

/// Open interval `(lo, hi)` of admissible scales; empty when `lo >= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub lower_binding: String,
    pub upper_binding: String,
    /// Alpha and slope of the unscaled member.
    pub alpha: Rational,
    pub mu: Rational,
}

impl AInterval {
    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, a: &Rational) -> bool {
        &self.lo < a && a < &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / 2
    }
}

/// All constraints on the scale `a` at a fixed `lambda`.
pub fn constraints(family: &ParametricFamily, lambda: &Rational, epsilon: &Rational) -> Result<(Vec<Constraint>, Rational, Rational)> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidInput("family sweeps need eps > 0".into()));
    }
    let class = family.class(lambda)?;
    if !class.is_ample()? {
        return Err(Error::ClassNotKahler);
    }
    let n = Rational::from(family.dim() as i64);
    let (alpha, _) = family.unscaled_alpha(lambda, &class)?;
    let mu = class.mu()?;
    let mut out = vec![
        Constraint { label: "a > 0".into(), p: Rational::one(), q: Rational::zero() },
        Constraint {
            label: CONDITION_1.into(),
            p: Rational::from(-1),
            q: (&n + 1) * &alpha / (&n * epsilon),
        },
    ];
    let tests = class.tests()?;
    for t in &tests {
        out.push(Constraint {
            label: format!("{CONDITION_2} at {}", t.name),
            p: epsilon * &t.l,
            q: t.k.clone(),
        });
    }
    for t in &tests {
        out.push(Constraint {
            label: format!("{CONDITION_3} at {}", t.name),
            p: epsilon * &t.l,
            q: -(&n * &mu * &t.l) - (&n - 1) * &t.k,
        });
    }
    Ok((out, alpha, mu))
}

/// The exact open interval of scales `a` for which `a L_lambda` passes the
/// criterion with slack `epsilon`.
pub fn feasible_a_interval(family: &ParametricFamily, lambda: &Rational, epsilon: &Rational) -> Result<AInterval> {
    let (cs, alpha, mu) = constraints(family, lambda, epsilon)?;
    let mut lo: Option<(Rational, &str)> = None;
    let mut hi: Option<(Rational, &str)> = None;
    let mut infeasible: Option<&str> = None;
    for c in &cs {
        if c.p.is_zero() {
            if !c.q.is_positive() && infeasible.is_none() {
                infeasible = Some(&c.label);
            }
            continue;
        }
        let root = -(&c.q / &c.p);
        if c.p.is_positive() {
            if lo.as_ref().is_none_or(|(r, _)| root > *r) {
                lo = Some((root, &c.label));
            }
        } else if hi.as_ref().is_none_or(|(r, _)| root < *r) {
            hi = Some((root, &c.label));
        }
    }
    let (lo, lower) = lo.expect("a > 0 is always present");
    let (hi, upper) = hi.expect("condition (1) bounds a from above");
    let mut out = AInterval { lo, hi, lower_binding: lower.into(), upper_binding: upper.into(), alpha, mu };
    if let Some(label) = infeasible {
        // a constant constraint fails: empty regardless of a
        out.hi = out.lo.clone();
        out.upper_binding = label.into();
    }
    // the solution set of affine constraints is convex; check it
    if !out.is_empty() {
        let mid = out.midpoint();
        assert!(cs.iter().all(|c| c.holds(&mid)), "feasible set is not an interval");
        assert!(!cs.iter().all(|c| c.holds(&out.lo)) && !cs.iter().all(|c| c.holds(&out.hi)));
    }
    Ok(out)
}

/// Run the full checker at `(lambda, a)`.
pub fn certify(family: &ParametricFamily, lambda: &Rational, a: &Rational, epsilon: &Rational) -> Result<bool> {
    Ok(check_three_conditions(&family.setup(lambda, a, epsilon)?)?.holds())
}
