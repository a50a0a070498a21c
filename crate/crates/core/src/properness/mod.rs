//! Sufficient criteria for properness of the K-energy, in divisor form.
//!
//! For a polarization `L` on an `n`-dimensional manifold with canonical
//! class `K`, slack `eps >= 0` and `mu = -K.L^{n-1} / L^n`, the criterion
//! asks for
//!
//! 1. `eps < (n+1)/n * alpha(L)`
//! 2. `eps L + K` ample
//! 3. `F = (eps - n mu) L - (n-1) K` ample
//!
//! A failed condition means the criterion says nothing; it is never
//! reported as "not proper".

mod family;
mod sweep;

pub use family::{
    certify, constraints, feasible_a_interval, AInterval, Constraint, FamilyAlpha, ParametricFamily,
    DERVAN_PROVENANCE,
};
pub use sweep::{
    sweep_lambda, Bracket, EdgeDiagnostics, EndpointCheck, FeasibilityReport, FeasibleInterval, SweepConfig,
    Witness, MAX_GRID,
};

use serde::{Deserialize, Serialize};

use crate::alpha::{alpha_invariant, GroupMode, SymmetryContext};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::picard::{self, PicardClass};
use crate::toric::ToricDivisor;

pub const CONDITION_1: &str = "condition (1)";
pub const CONDITION_2: &str = "condition (2)";
pub const CONDITION_3: &str = "condition (3)";

/// A curve (or boundary divisor) and its pairings with `L` and `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCurve {
    pub name: String,
    pub l: Rational,
    pub k: Rational,
}

/// Intersection data of a polarization known only through the slice
/// spanned by `L` and `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractSlice {
    pub n: usize,
    /// `L^n`
    pub l_top: Rational,
    /// `K . L^{n-1}`
    pub k_l: Rational,
    /// `K^n`
    pub k_top: Rational,
    pub test_curves: Vec<TestCurve>,
}

impl AbstractSlice {
    pub fn new(n: usize, l_top: Rational, k_l: Rational, k_top: Rational, test_curves: Vec<TestCurve>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if !l_top.is_positive() {
            return Err(Error::InvalidInput("L^n must be positive".into()));
        }
        Ok(AbstractSlice { n, l_top, k_l, k_top, test_curves })
    }

    /// `L = K` on a manifold with ample canonical class of volume `k_top`.
    pub fn canonical_polarization(n: usize, k_top: Rational) -> Result<Self> {
        let curve = TestCurve { name: "C".into(), l: Rational::one(), k: Rational::one() };
        AbstractSlice::new(n, k_top.clone(), k_top.clone(), k_top, vec![curve])
    }
}

/// Where the polarization lives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    Toric(ToricDivisor),
    Picard(PicardClass),
    Slice(AbstractSlice),
}

/// Outcome of testing a class `x L + y K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPositivity {
    pub ample: bool,
    pub nef: bool,
    /// The test with the smallest pairing, when tests are available.
    pub binding: Option<Binding>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub nakai_binds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub name: String,
    pub value: Rational,
}

fn picard_label(c: &PicardClass) -> String {
    let m: Vec<String> = c.coords()[1..].iter().map(ToString::to_string).collect();
    format!("({}; {})", c.coords()[0], m.join(","))
}

fn argmin(tests: &[TestCurve], x: &Rational, y: &Rational) -> Option<Binding> {
    tests
        .iter()
        .map(|t| Binding { name: t.name.clone(), value: x * &t.l + y * &t.k })
        .reduce(|a, b| if b.value < a.value { b } else { a })
}

impl Backend {
    pub fn dim(&self) -> usize {
        match self {
            Backend::Toric(d) => d.fan().dim(),
            Backend::Picard(_) => 2,
            Backend::Slice(s) => s.n,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Backend::Toric(_) => "toric",
            Backend::Picard(_) => "picard",
            Backend::Slice(_) => "slice",
        }
    }

    /// Coordinates of `x L + y K` in the backend's basis.
    pub fn class_coords(&self, x: &Rational, y: &Rational) -> Option<Vec<Rational>> {
        match self {
            Backend::Toric(d) => Some(self.toric_class(d, x, y).coeffs().to_vec()),
            Backend::Picard(c) => Some(self.picard_class(c, x, y).coords().to_vec()),
            Backend::Slice(_) => None,
        }
    }

    fn toric_class(&self, d: &ToricDivisor, x: &Rational, y: &Rational) -> ToricDivisor {
        let k = ToricDivisor::canonical(d.fan().clone());
        d.combine(x, &k, y).expect("same fan")
    }

    fn picard_class(&self, c: &PicardClass, x: &Rational, y: &Rational) -> PicardClass {
        let k = picard::BlowupSurface::new(c.r()).expect("valid r").canonical();
        c.combine(x, &k, y).expect("same r")
    }

    /// Pairings of `L` and `K` with a set of curves whose positivity decides
    /// ampleness of classes in the span of `L` and `K`.
    pub fn tests(&self) -> Result<Vec<TestCurve>> {
        match self {
            Backend::Toric(d) => {
                let l = d.wall_values()?;
                let k = ToricDivisor::canonical(d.fan().clone()).wall_values()?;
                Ok(l
                    .into_iter()
                    .zip(k)
                    .enumerate()
                    .map(|(i, (l, k))| TestCurve { name: format!("D_{}", i + 1), l, k })
                    .collect())
            }
            Backend::Picard(c) => {
                let k = picard::BlowupSurface::new(c.r())?.canonical();
                picard::test_curves(c.r())?
                    .iter()
                    .map(|e| {
                        Ok(TestCurve { name: picard_label(e), l: c.pairing(e)?, k: k.pairing(e)? })
                    })
                    .collect()
            }
            Backend::Slice(s) => Ok(s.test_curves.clone()),
        }
    }

    /// Ampleness and nefness of `x L + y K`.
    pub fn class_positivity(&self, x: &Rational, y: &Rational) -> Result<ClassPositivity> {
        match self {
            Backend::Toric(d) if d.fan().dim() == 2 => {
                let tests = self.tests()?;
                let binding = argmin(&tests, x, y);
                let min = binding.as_ref().map(|b| b.value.clone());
                let ample = min.as_ref().is_none_or(|m| m.is_positive());
                let nef = min.as_ref().is_none_or(|m| !m.is_negative());
                debug_assert_eq!(ample, self.toric_class(d, x, y).is_ample()?);
                Ok(ClassPositivity { ample, nef, binding, nakai_binds: false })
            }
            Backend::Toric(d) => {
                let c = self.toric_class(d, x, y);
                Ok(ClassPositivity { ample: c.is_ample()?, nef: c.is_nef()?, binding: None, nakai_binds: false })
            }
            Backend::Picard(c) => {
                let p = picard::positivity(&self.picard_class(c, x, y));
                let binding = argmin(&self.tests()?, x, y);
                Ok(ClassPositivity { ample: p.ample, nef: p.nef, binding, nakai_binds: p.nakai_binds })
            }
            Backend::Slice(s) => {
                let binding = argmin(&s.test_curves, x, y);
                let min = binding.as_ref().map(|b| b.value.clone());
                Ok(ClassPositivity {
                    ample: min.as_ref().is_none_or(|m| m.is_positive()),
                    nef: min.as_ref().is_none_or(|m| !m.is_negative()),
                    binding,
                    nakai_binds: false,
                })
            }
        }
    }

    /// Whether the polarization itself is ample.
    pub fn is_ample(&self) -> Result<bool> {
        match self {
            Backend::Toric(d) => d.is_ample(),
            Backend::Picard(c) => Ok(picard::is_ample_picard(c)),
            Backend::Slice(s) => Ok(s.l_top.is_positive() && s.test_curves.iter().all(|t| t.l.is_positive())),
        }
    }

    /// Whether `K` is ample.
    pub fn canonical_is_ample(&self) -> Result<bool> {
        match self {
            Backend::Toric(d) => ToricDivisor::canonical(d.fan().clone()).is_ample(),
            Backend::Picard(c) => Ok(picard::is_ample_picard(&picard::BlowupSurface::new(c.r())?.canonical())),
            Backend::Slice(s) => Ok(s.k_top.is_positive() && s.test_curves.iter().all(|t| t.k.is_positive())),
        }
    }

    /// `-K.L^{n-1} / L^n` for an ample polarization.
    pub fn mu(&self) -> Result<Rational> {
        match self {
            Backend::Toric(d) => Ok(d.slope_quantities()?.mu),
            Backend::Picard(c) => {
                let k = picard::BlowupSurface::new(c.r())?.canonical();
                (-k.pairing(c)?).checked_div(&c.self_intersection())
            }
            Backend::Slice(s) => (-&s.k_l).checked_div(&s.l_top),
        }
    }

    pub fn scale(&self, t: &Rational) -> Result<Backend> {
        match self {
            Backend::Toric(d) => Ok(Backend::Toric(d.scale(t))),
            Backend::Picard(c) => Ok(Backend::Picard(c.scale(t))),
            Backend::Slice(_) => Err(Error::Unsupported("scaling an abstract slice".into())),
        }
    }

    /// `x self + y other`, on the same variety.
    pub fn combine(&self, x: &Rational, other: &Backend, y: &Rational) -> Result<Backend> {
        match (self, other) {
            (Backend::Toric(a), Backend::Toric(b)) => Ok(Backend::Toric(a.combine(x, b, y)?)),
            (Backend::Picard(a), Backend::Picard(b)) => Ok(Backend::Picard(a.combine(x, b, y)?)),
            _ => Err(Error::Unsupported("linear combinations need two toric or two Picard classes".into())),
        }
    }

    /// The anticanonical class on the same variety.
    pub fn anticanonical(&self) -> Result<Backend> {
        match self {
            Backend::Toric(d) => Ok(Backend::Toric(ToricDivisor::anticanonical(d.fan().clone()))),
            Backend::Picard(c) => Ok(Backend::Picard(picard::BlowupSurface::new(c.r())?.anticanonical())),
            Backend::Slice(_) => Err(Error::Unsupported("anticanonical class of an abstract slice".into())),
        }
    }

    /// Intersection number of two classes on the same surface.
    pub fn surface_pairing(&self, other: &Backend) -> Result<Rational> {
        match (self, other) {
            (Backend::Toric(a), Backend::Toric(b)) => a.intersection_number(b),
            (Backend::Picard(a), Backend::Picard(b)) => a.pairing(b),
            _ => Err(Error::Unsupported("pairing needs two toric or two Picard classes".into())),
        }
    }
}

/// Where the alpha invariant of the polarization comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaSource {
    /// Closed-form toric formula with the given symmetry group.
    Formula(GroupMode),
    /// A value known from elsewhere, valid for all potentials.
    Supplied { value: Rational, provenance: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct KClassSetup {
    pub backend: Backend,
    pub epsilon: Rational,
    pub alpha: AlphaSource,
}

impl KClassSetup {
    pub fn new(backend: Backend, epsilon: Rational, alpha: AlphaSource) -> Result<Self> {
        if epsilon.is_negative() {
            return Err(Error::InvalidInput("epsilon must be nonnegative".into()));
        }
        Ok(KClassSetup { backend, epsilon, alpha })
    }

    pub fn n(&self) -> usize {
        self.backend.dim()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "proper")]
    Proper,
    #[serde(rename = "criterion not satisfied")]
    CriterionNotSatisfied,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    #[serde(rename = "all potentials")]
    AllPotentials,
    #[serde(rename = "G-invariant potentials")]
    GInvariant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    ThreeConditions,
    NegativeC1,
    Fano,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaWitness {
    pub value: Rational,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizer_order: Option<usize>,
}

/// `l L + k K`, with coordinates when the backend has a basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassWitness {
    pub l: Rational,
    pub k: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub label: String,
    pub statement: String,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binding: Option<Binding>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropernessReport {
    pub mode: CheckMode,
    pub backend: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaWitness>,
    pub mu: Rational,
    pub conditions: Vec<ConditionResult>,
    pub verdict: Verdict,
    pub scope: Scope,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl PropernessReport {
    fn conclude(mut self) -> Self {
        self.verdict = if self.conditions.iter().all(|c| c.holds) {
            Verdict::Proper
        } else {
            Verdict::CriterionNotSatisfied
        };
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Proper
    }

    pub fn condition(&self, label: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.label == label)
    }

    /// Labels of the conditions that fail.
    pub fn failing(&self) -> Vec<&str> {
        self.conditions.iter().filter(|c| !c.holds).map(|c| c.label.as_str()).collect()
    }
}

/// Alpha of the polarization, its provenance and the scope it licenses.
pub fn resolve_alpha(backend: &Backend, source: &AlphaSource) -> Result<(AlphaWitness, Scope)> {
    match source {
        AlphaSource::Supplied { value, provenance } => {
            if !value.is_positive() {
                return Err(Error::InvalidInput("supplied alpha must be positive".into()));
            }
            Ok((AlphaWitness { value: value.clone(), provenance: provenance.clone(), stabilizer_order: None }, Scope::AllPotentials))
        }
        AlphaSource::Formula(mode) => {
            let Backend::Toric(d) = backend else {
                return Err(Error::AlphaUnavailable(format!(
                    "the toric formula needs a toric backend, got {}; supply a value",
                    backend.kind()
                )));
            };
            let ctx = SymmetryContext::new(d.clone(), mode.clone())?;
            let value = alpha_invariant(&ctx)?;
            let witness = AlphaWitness {
                value,
                provenance: format!("toric formula, {} group", mode.label()),
                stabilizer_order: Some(ctx.stabilizer().len()),
            };
            Ok((witness, Scope::GInvariant))
        }
    }
}

fn positivity_condition(
    backend: &Backend,
    label: &str,
    x: &Rational,
    y: &Rational,
    strict: bool,
) -> Result<ConditionResult> {
    let p = backend.class_positivity(x, y)?;
    let (holds, word) = if strict { (p.ample, "ample") } else { (p.nef, "nef") };
    Ok(ConditionResult {
        label: label.into(),
        statement: format!("({x}) L + ({y}) K {word}"),
        holds,
        binding: p.binding,
        class: Some(ClassWitness { l: x.clone(), k: y.clone(), coords: backend.class_coords(x, y) }),
    })
}

/// The three-condition criterion. `eps = 0` is routed to
/// [`check_negative_c1`], the only way condition (2) can hold there.
pub fn check_three_conditions(setup: &KClassSetup) -> Result<PropernessReport> {
    if setup.epsilon.is_zero() {
        let mut r = check_negative_c1(&setup.backend)?;
        r.notes.push("eps = 0 handled by the negative first Chern class criterion".into());
        return Ok(r);
    }
    let backend = &setup.backend;
    if !backend.is_ample()? {
        return Err(Error::ClassNotKahler);
    }
    let n = setup.n();
    let nn = Rational::from(n as i64);
    let eps = &setup.epsilon;
    let (alpha, scope) = resolve_alpha(backend, &setup.alpha)?;
    let mu = backend.mu()?;

    let bound = (&nn + 1) / &nn * &alpha.value;
    let c1 = ConditionResult {
        label: CONDITION_1.into(),
        statement: format!("{eps} < {bound}"),
        holds: eps < &bound,
        binding: Some(Binding { name: "alpha".into(), value: &bound - eps }),
        class: None,
    };
    let c2 = positivity_condition(backend, CONDITION_2, eps, &Rational::one(), true)?;
    let x3 = eps - &nn * &mu;
    let y3 = -(&nn - 1);
    let c3 = positivity_condition(backend, CONDITION_3, &x3, &y3, true)?;
    let mut notes = Vec::new();
    if backend.class_positivity(&x3, &y3)?.nakai_binds || backend.class_positivity(eps, &Rational::one())?.nakai_binds {
        notes.push("self-intersection test decided a condition".into());
    }
    Ok(PropernessReport {
        mode: CheckMode::ThreeConditions,
        backend: backend.kind().into(),
        n,
        epsilon: Some(eps.clone()),
        alpha: Some(alpha),
        mu,
        conditions: vec![c1, c2, c3],
        verdict: Verdict::CriterionNotSatisfied,
        scope,
        notes,
    }
    .conclude())
}

/// Negative first Chern class: `(-n mu) L - (n-1) K` nef suffices, for all
/// potentials.
pub fn check_negative_c1(backend: &Backend) -> Result<PropernessReport> {
    if !backend.canonical_is_ample()? {
        return Err(Error::Precondition("criterion requires c1 < 0".into()));
    }
    if !backend.is_ample()? {
        return Err(Error::ClassNotKahler);
    }
    let n = backend.dim();
    let nn = Rational::from(n as i64);
    let mu = backend.mu()?;
    let x = -(&nn * &mu);
    let y = -(&nn - 1);
    let c = positivity_condition(backend, CONDITION_3, &x, &y, false)?;
    Ok(PropernessReport {
        mode: CheckMode::NegativeC1,
        backend: backend.kind().into(),
        n,
        epsilon: None,
        alpha: None,
        mu,
        conditions: vec![c],
        verdict: Verdict::CriterionNotSatisfied,
        scope: Scope::AllPotentials,
        notes: Vec::new(),
    }
    .conclude())
}

/// Fano case: `alpha(-K) > n/(n+1)`. Only the variety of the backend
/// matters; its polarization is replaced by `-K`.
pub fn check_fano(backend: &Backend, alpha: &AlphaSource) -> Result<PropernessReport> {
    let anti = match backend {
        Backend::Slice(s) => {
            if !s.test_curves.iter().all(|t| t.k.is_negative()) {
                return Err(Error::Precondition("-K is not ample".into()));
            }
            if s.k_l != -&s.l_top {
                return Err(Error::InvalidInput("slice polarization must be -K".into()));
            }
            backend.clone()
        }
        _ => backend.anticanonical()?,
    };
    if !anti.is_ample()? {
        return Err(Error::Precondition("-K is not ample".into()));
    }
    let n = anti.dim();
    let (witness, scope) = resolve_alpha(&anti, alpha)?;
    let threshold = Rational::new(n as i64, n as i64 + 1);
    let c = ConditionResult {
        label: "alpha condition".into(),
        statement: format!("{} > {threshold}", witness.value),
        holds: witness.value > threshold,
        binding: Some(Binding { name: "alpha".into(), value: &witness.value - &threshold }),
        class: None,
    };
    Ok(PropernessReport {
        mode: CheckMode::Fano,
        backend: anti.kind().into(),
        n,
        epsilon: None,
        alpha: Some(witness),
        mu: anti.mu()?,
        conditions: vec![c],
        verdict: Verdict::CriterionNotSatisfied,
        scope,
        notes: Vec::new(),
    }
    .conclude())
}

/// On a surface, whether `2 c D - W` is ample for `c = W.D / D^2`.
pub fn jflow_condition_surface(d: &Backend, w: &Backend) -> Result<bool> {
    if d.dim() != 2 || w.dim() != 2 {
        return Err(Error::Unsupported("surface formula only".into()));
    }
    let d2 = d.surface_pairing(d)?;
    if !d2.is_positive() {
        return Err(Error::Precondition("D^2 must be positive".into()));
    }
    if !d.is_ample()? || !w.is_ample()? {
        return Err(Error::NotAmple);
    }
    let c = w.surface_pairing(d)? / d2;
    let class = d.combine(&(c * 2), w, &Rational::from(-1))?;
    class.is_ample()
}

#[cfg(test)]
mod tests;
