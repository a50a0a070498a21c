//! Command-line front end: input parsing, subcommands and report rendering.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use kproper::alpha::{alpha_invariant, alpha_oracle_with, GroupMode, SymmetryContext};
use kproper::exact::{IntMatrix, Point, Rational};
use kproper::par;
use kproper::picard::{self, BlowupSurface, PicardClass};
use kproper::polytope::Polytope;
use kproper::properness::{
    check_fano, check_negative_c1, check_three_conditions, sweep_lambda, AbstractSlice, AlphaSource, Backend,
    FeasibilityReport, KClassSetup, ParametricFamily, PropernessReport, SweepConfig, Verdict,
};
use kproper::toric::{Fan, FanJson, ToricDivisor};

pub const PARALLEL_ENV: &str = "KPROPER_PARALLEL";

#[derive(Parser, Debug)]
#[command(name = "kproper", version, about = "Exact K-energy properness criteria")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Add decimal approximations to text output (display only).
    #[arg(long, global = true)]
    pub approx: bool,

    /// Evaluate sweep grids and oracle depths concurrently.
    #[arg(long, global = true)]
    pub parallel: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Group {
    Full,
    Torus,
}

impl From<Group> for GroupMode {
    fn from(g: Group) -> Self {
        match g {
            Group::Full => GroupMode::Full,
            Group::Torus => GroupMode::Torus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ThreeConditions,
    Fano,
    NegativeC1,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fan validation and symmetries.
    #[command(subcommand)]
    Fan(FanCommand),
    /// Divisor positivity.
    #[command(subcommand)]
    Divisor(DivisorCommand),
    /// Polytope vertices, volume, boundary measure and barycenter.
    #[command(subcommand)]
    Polytope(PolytopeCommand),
    /// Symmetric alpha invariant of an ample toric class.
    Alpha(AlphaArgs),
    /// D^2, -K.D, mu and mean scalar curvature.
    Intersect(ClassArgs),
    /// Run a properness criterion on one class.
    Check(CheckArgs),
    /// Certified sweep over a family parameter.
    Sweep(SweepArgs),
    /// Picard lattice of blowups of the plane.
    #[command(subcommand)]
    Picard(PicardCommand),
}

#[derive(Subcommand, Debug)]
pub enum FanCommand {
    Validate { input: String },
    Autos { input: String },
}

#[derive(Subcommand, Debug)]
pub enum DivisorCommand {
    Ample(ClassArgs),
}

#[derive(Subcommand, Debug)]
pub enum PolytopeCommand {
    Info {
        /// Polytope JSON file, or a fan together with --coeffs.
        input: String,
        #[arg(long)]
        coeffs: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum PicardCommand {
    Curves {
        #[arg(long)]
        r: usize,
    },
}

#[derive(Args, Debug)]
pub struct ClassArgs {
    /// Builtin name (p2, dp6, dp1) or JSON file.
    pub input: String,
    /// Comma-separated rationals or a JSON file; defaults to -K.
    #[arg(long)]
    pub coeffs: Option<String>,
}

#[derive(Args, Debug)]
pub struct AlphaArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, value_enum, default_value_t = Group::Full)]
    pub group: Group,
    /// Also run the brute-force oracle up to this depth.
    #[arg(long)]
    pub oracle_depth: Option<u32>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Builtin variety (p2, dp6, dp1).
    #[arg(long, conflicts_with = "input")]
    pub builtin: Option<String>,
    /// Fan, Picard surface or slice JSON file.
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub coeffs: Option<String>,
    #[arg(long, default_value = "1")]
    pub epsilon: String,
    #[arg(long, value_enum, default_value_t = Mode::ThreeConditions)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Group::Full)]
    pub group: Group,
    /// Use this alpha value instead of the toric formula.
    #[arg(long)]
    pub alpha: Option<String>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Sweep config JSON file, or a builtin family name.
    #[arg(long)]
    pub config: String,
}

/// A parsed input file or builtin.
#[derive(Clone, Debug)]
pub enum Input {
    Fan(Fan),
    Picard(BlowupSurface),
    Polytope(Polytope),
    Slice(AbstractSlice),
}

#[derive(Deserialize)]
struct SurfaceJson {
    r: usize,
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|e| anyhow!("{e}"))
}

/// Builtin names, or a JSON file whose keys decide what it holds.
pub fn parse_input(spec: &str) -> Result<Input> {
    match spec {
        "p2" => return Ok(Input::Fan(Fan::p2())),
        "dp6" => return Ok(Input::Fan(Fan::dp6())),
        "dp1" => return Ok(Input::Picard(BlowupSurface::new(8)?)),
        _ => {}
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!("unknown builtin or missing file {spec:?} (builtins: p2, dp6, dp1)");
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {spec}"))?;
    let has = |k: &str| value.get(k).is_some();
    let ctx = || format!("parsing {spec}");
    if has("rays") {
        Ok(Input::Fan(serde_json::from_str::<Fan>(&text).with_context(ctx)?))
    } else if has("hrep") {
        Ok(Input::Polytope(serde_json::from_str::<Polytope>(&text).with_context(ctx)?))
    } else if has("l_top") {
        Ok(Input::Slice(serde_json::from_str::<AbstractSlice>(&text).with_context(ctx)?))
    } else if has("r") {
        let s: SurfaceJson = serde_json::from_str(&text).with_context(ctx)?;
        Ok(Input::Picard(BlowupSurface::new(s.r)?))
    } else {
        bail!("{spec}: expected a fan, polytope, Picard surface or slice")
    }
}

#[derive(Deserialize)]
struct CoeffFile {
    coeffs: Vec<Rational>,
}

/// Inline `1,6/5,...` or a JSON file holding a list or `{"coeffs": [...]}`.
pub fn parse_coeffs(spec: &str) -> Result<Vec<Rational>> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        let ctx = || format!("parsing {spec}");
        // parse into the shape the file claims so errors keep their position
        return if text.trim_start().starts_with('[') {
            serde_json::from_str::<Vec<Rational>>(&text).with_context(ctx)
        } else {
            Ok(serde_json::from_str::<CoeffFile>(&text).with_context(ctx)?.coeffs)
        };
    }
    spec.split(',')
        .enumerate()
        .map(|(i, s)| parse_rational(s).with_context(|| format!("coefficient {} ({:?})", i + 1, s.trim())))
        .collect()
}

/// Whether to run concurrently: the environment variable wins over the flag.
pub fn parallel_enabled(flag: bool) -> Result<bool> {
    let wanted = match std::env::var(PARALLEL_ENV) {
        Ok(v) => match v.trim().to_ascii_lowercase().as_str() {
            "1" | "true" | "yes" | "on" => true,
            "0" | "false" | "no" | "off" | "" => false,
            other => bail!("{PARALLEL_ENV}={other:?} is not a boolean"),
        },
        Err(_) => flag,
    };
    Ok(wanted && par::available())
}

fn toric_class(fan: Fan, coeffs: Option<&str>) -> Result<ToricDivisor> {
    let fan = Arc::new(fan);
    match coeffs {
        Some(c) => Ok(ToricDivisor::new(fan, parse_coeffs(c)?)?),
        None => Ok(ToricDivisor::anticanonical(fan)),
    }
}

fn picard_class(s: BlowupSurface, coeffs: Option<&str>) -> Result<PicardClass> {
    match coeffs {
        Some(c) => Ok(s.class(parse_coeffs(c)?)?),
        None => Ok(s.anticanonical()),
    }
}

fn backend(input: Input, coeffs: Option<&str>) -> Result<Backend> {
    match input {
        Input::Fan(f) => Ok(Backend::Toric(toric_class(f, coeffs)?)),
        Input::Picard(s) => Ok(Backend::Picard(picard_class(s, coeffs)?)),
        Input::Slice(s) => {
            if coeffs.is_some() {
                bail!("a slice carries its own polarization; drop --coeffs");
            }
            Ok(Backend::Slice(s))
        }
        Input::Polytope(_) => bail!("expected a fan, Picard surface or slice, got a polytope"),
    }
}

// ---------- reports ----------

/// Text rendering; `approx` appends decimal values marked as such.
pub trait TextReport {
    fn text(&self, approx: bool) -> String;
}

fn q(x: &Rational, approx: bool) -> String {
    if approx && !x.is_integer() {
        format!("{x} (approx {:.6})", x.to_f64())
    } else {
        x.to_string()
    }
}

fn qs(xs: &[Rational]) -> String {
    let v: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("({})", v.join(", "))
}

pub fn render<T: Serialize + TextReport>(x: &T, format: Format, approx: bool) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(x)? + "\n"),
        Format::Text => Ok(x.text(approx)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanReport {
    #[serde(flatten)]
    pub fan: FanJson,
    pub smooth: bool,
    pub complete: bool,
}

impl TextReport for FanReport {
    fn text(&self, _: bool) -> String {
        let mut s = format!("dimension {}, {} rays, {} maximal cones\n", self.fan.dim, self.fan.rays.len(), self.fan.max_cones.len());
        let _ = writeln!(s, "smooth: {}", self.smooth);
        let _ = writeln!(s, "complete: {}", self.complete);
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutosReport {
    pub order: usize,
    pub matrices: Vec<IntMatrix>,
}

impl TextReport for AutosReport {
    fn text(&self, _: bool) -> String {
        let mut s = format!("automorphism group of order {}\n", self.order);
        for m in &self.matrices {
            let _ = writeln!(s, "  {:?}", m.0);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmpleReport {
    pub coeffs: Vec<Rational>,
    pub ample: bool,
    pub nef: bool,
    /// `D.C` for the boundary divisors or (-1)-curves, whichever applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_pairing: Option<Rational>,
}

impl TextReport for AmpleReport {
    fn text(&self, approx: bool) -> String {
        let mut s = format!("class {}\nample: {}\nnef: {}\n", qs(&self.coeffs), self.ample, self.nef);
        if let Some(m) = &self.min_pairing {
            let _ = writeln!(s, "smallest test pairing: {}", q(m, approx));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeReport {
    pub dim: usize,
    pub vertices: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_measure: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barycenter: Option<Point>,
}

impl TextReport for PolytopeReport {
    fn text(&self, approx: bool) -> String {
        let mut s = format!("{} vertices in dimension {}\n", self.vertices.len(), self.dim);
        for v in &self.vertices {
            let _ = writeln!(s, "  {}", qs(v));
        }
        if let Some(v) = &self.volume {
            let _ = writeln!(s, "volume: {}", q(v, approx));
        }
        if let Some(b) = &self.boundary_measure {
            let _ = writeln!(s, "boundary measure: {}", q(b, approx));
        }
        if let Some(b) = &self.barycenter {
            let _ = writeln!(s, "barycenter: {}", qs(b));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleValue {
    pub depth: u32,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub group: String,
    pub alpha: Rational,
    pub stabilizer_order: usize,
    pub barycenter: Point,
    pub fixed_vertices: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleValue>,
}

impl TextReport for AlphaReport {
    fn text(&self, approx: bool) -> String {
        let mut s = format!("alpha ({} group): {}\n", self.group, q(&self.alpha, approx));
        let _ = writeln!(s, "stabilizer order: {}", self.stabilizer_order);
        let _ = writeln!(s, "barycenter: {}", qs(&self.barycenter));
        let v: Vec<String> = self.fixed_vertices.iter().map(|p| qs(p)).collect();
        let _ = writeln!(s, "fixed polytope vertices: {}", v.join(" "));
        if let Some(o) = &self.oracle {
            let _ = writeln!(s, "oracle bound (depth {}): {}", o.depth, q(&o.value, approx));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectReport {
    pub self_intersection: Rational,
    pub anticanonical_degree: Rational,
    pub mu: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rbar: Option<Rational>,
}

impl TextReport for IntersectReport {
    fn text(&self, approx: bool) -> String {
        let mut s = format!("D^2 = {}\n-K.D = {}\nmu = {}\n", q(&self.self_intersection, approx), q(&self.anticanonical_degree, approx), q(&self.mu, approx));
        if let Some(r) = &self.rbar {
            let _ = writeln!(s, "rbar = {}", q(r, approx));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvesReport {
    pub r: usize,
    pub count: usize,
    /// Number of curves of degree 0 through 6.
    pub census: [usize; 7],
    pub curves: Vec<PicardClass>,
}

impl TextReport for CurvesReport {
    fn text(&self, _: bool) -> String {
        let mut s = format!("{} exceptional curves on the blowup at {} points\n", self.count, self.r);
        for (d, c) in self.census.iter().enumerate().filter(|(_, c)| **c > 0) {
            let _ = writeln!(s, "  degree {d}: {c}");
        }
        for c in &self.curves {
            let _ = writeln!(s, "  {}", qs(c.coords()));
        }
        s
    }
}

impl TextReport for PropernessReport {
    fn text(&self, approx: bool) -> String {
        let mode = match self.mode {
            kproper::properness::CheckMode::ThreeConditions => "three-condition criterion",
            kproper::properness::CheckMode::NegativeC1 => "negative first Chern class criterion",
            kproper::properness::CheckMode::Fano => "Fano alpha criterion",
        };
        let mut s = format!("{mode} ({} backend, n = {})\n", self.backend, self.n);
        if let Some(e) = &self.epsilon {
            let _ = writeln!(s, "eps = {}", q(e, approx));
        }
        if let Some(a) = &self.alpha {
            let order = a.stabilizer_order.map(|o| format!(", stabilizer order {o}")).unwrap_or_default();
            let _ = writeln!(s, "alpha = {} [{}{order}]", q(&a.value, approx), a.provenance);
        }
        let _ = writeln!(s, "mu = {}", q(&self.mu, approx));
        for c in &self.conditions {
            let status = if c.holds { "holds" } else { "fails" };
            let _ = write!(s, "{}: {status}: {}", c.label, c.statement);
            if let Some(b) = &c.binding {
                let _ = write!(s, " [binding {} = {}]", b.name, q(&b.value, approx));
            }
            s.push('\n');
            if let Some(coords) = c.class.as_ref().and_then(|w| w.coords.as_ref()) {
                let _ = writeln!(s, "  class {}", qs(coords));
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let verdict = match self.verdict {
            Verdict::Proper => "proper",
            Verdict::CriterionNotSatisfied => "criterion not satisfied",
        };
        let scope = match self.scope {
            kproper::properness::Scope::AllPotentials => "all potentials",
            kproper::properness::Scope::GInvariant => "G-invariant potentials",
        };
        let _ = writeln!(s, "verdict: {verdict}");
        let _ = writeln!(s, "scope: {scope}");
        s
    }
}

impl TextReport for FeasibilityReport {
    fn text(&self, approx: bool) -> String {
        let mut s = format!(
            "family {}, eps = {}, lambda in [{}, {}], step {}, tolerance {}\n",
            self.family, self.epsilon, self.lambda_min, self.lambda_max, self.step, self.refine_tol
        );
        let _ = writeln!(s, "grid points: {} ({} feasible)", self.grid_points, self.feasible_grid_points);
        if self.intervals.is_empty() {
            s.push_str("no feasible interval\n");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            let _ = writeln!(s, "interval {}:", i + 1);
            let edge = |b: &[Rational; 2], clipped: bool| {
                if clipped {
                    format!("{} (end of range)", b[0])
                } else {
                    format!("in [{}, {}]", q(&b[0], approx), q(&b[1], approx))
                }
            };
            let _ = writeln!(s, "  lower end {}", edge(&iv.lo_bracket, iv.lo_clipped));
            let _ = writeln!(s, "  upper end {}", edge(&iv.hi_bracket, iv.hi_clipped));
            let cert = if iv.witness.certified { "certified" } else { "NOT certified" };
            let _ = writeln!(s, "  witness lambda = {}, a = {} ({cert})", iv.witness.lambda, iv.witness.a);
            for (name, d) in [("at witness", &iv.at_witness), ("near lower end", &iv.near_lo), ("near upper end", &iv.near_hi)] {
                let _ = writeln!(
                    s,
                    "  {name}: lambda = {}, a in ({}, {}), lower bound from {}, upper bound from {}",
                    q(&d.lambda, approx),
                    d.a_interval[0],
                    d.a_interval[1],
                    d.lower_binding,
                    d.upper_binding
                );
            }
        }
        for c in &self.endpoint_checks {
            let _ = writeln!(
                s,
                "endpoint {}: below {}, at {}, above {} -> {}",
                c.endpoint,
                c.below,
                c.at,
                c.above,
                if c.confirmed { "confirmed" } else { "not confirmed" }
            );
        }
        s
    }
}

// ---------- commands ----------

pub fn fan_validate(input: &str) -> Result<FanReport> {
    let Input::Fan(fan) = parse_input(input)? else { bail!("{input} is not a fan") };
    let v = fan.validate();
    Ok(FanReport { fan: fan.into(), smooth: v.smooth, complete: v.complete })
}

pub fn fan_autos(input: &str) -> Result<AutosReport> {
    let Input::Fan(fan) = parse_input(input)? else { bail!("{input} is not a fan") };
    let matrices = fan.automorphisms().to_vec();
    Ok(AutosReport { order: matrices.len(), matrices })
}

pub fn divisor_ample(args: &ClassArgs) -> Result<AmpleReport> {
    match backend(parse_input(&args.input)?, args.coeffs.as_deref())? {
        Backend::Toric(d) => {
            let min_pairing = if d.fan().dim() == 2 { d.wall_values()?.into_iter().reduce(Rational::min) } else { None };
            Ok(AmpleReport { coeffs: d.coeffs().to_vec(), ample: d.is_ample()?, nef: d.is_nef()?, min_pairing })
        }
        Backend::Picard(c) => {
            let p = picard::positivity(&c);
            Ok(AmpleReport { coeffs: c.coords().to_vec(), ample: p.ample, nef: p.nef, min_pairing: Some(p.min_curve_pairing) })
        }
        Backend::Slice(_) => bail!("divisor ample needs a fan or Picard surface"),
    }
}

pub fn polytope_info(input: &str, coeffs: Option<&str>) -> Result<PolytopeReport> {
    let p = match parse_input(input)? {
        Input::Polytope(p) => p,
        Input::Fan(f) => toric_class(f, coeffs)?.moment_polytope()?,
        _ => bail!("polytope info needs a polytope file or a fan"),
    };
    let vertices = p.vertices()?.to_vec();
    let full = p.affine_dim()? == Some(p.dim());
    let (volume, barycenter) = if full { (Some(p.volume()?), Some(p.barycenter()?)) } else { (None, None) };
    let boundary_measure = if full && p.dim() == 2 { Some(p.boundary_measure()?) } else { None };
    Ok(PolytopeReport { dim: p.dim(), vertices, volume, boundary_measure, barycenter })
}

pub fn alpha(args: &AlphaArgs, parallel: bool) -> Result<AlphaReport> {
    let Input::Fan(fan) = parse_input(&args.class.input)? else { bail!("alpha needs a fan") };
    let d = toric_class(fan, args.class.coeffs.as_deref())?;
    let mode: GroupMode = args.group.into();
    let ctx = SymmetryContext::new(d, mode.clone())?;
    let oracle = match args.oracle_depth {
        Some(k) => Some(OracleValue { depth: k, value: alpha_oracle_with(&ctx, k, parallel)? }),
        None => None,
    };
    Ok(AlphaReport {
        group: mode.label().into(),
        alpha: alpha_invariant(&ctx)?,
        stabilizer_order: ctx.stabilizer().len(),
        barycenter: ctx.barycenter().to_vec(),
        fixed_vertices: ctx.fixed_polytope()?.vertices()?.to_vec(),
        oracle,
    })
}

pub fn intersect(args: &ClassArgs) -> Result<IntersectReport> {
    match backend(parse_input(&args.input)?, args.coeffs.as_deref())? {
        Backend::Toric(d) if d.fan().dim() == 2 => {
            let anti = ToricDivisor::anticanonical(d.fan().clone());
            let d2 = d.self_intersection()?;
            let kd = anti.intersection_number(&d)?;
            let mu = kd.checked_div(&d2)?;
            let rbar = Some(&mu * 2);
            Ok(IntersectReport { self_intersection: d2, anticanonical_degree: kd, mu, rbar })
        }
        Backend::Toric(_) => bail!("intersect uses the surface formula; dimension 2 only"),
        Backend::Picard(c) => {
            let anti = BlowupSurface::new(c.r())?.anticanonical();
            let d2 = c.self_intersection();
            let kd = anti.pairing(&c)?;
            let mu = kd.checked_div(&d2)?;
            Ok(IntersectReport { self_intersection: d2, anticanonical_degree: kd, rbar: Some(&mu * 2), mu })
        }
        Backend::Slice(s) => {
            let mu = (-&s.k_l).checked_div(&s.l_top)?;
            let rbar = (s.n == 2).then(|| &mu * 2);
            Ok(IntersectReport { self_intersection: s.l_top, anticanonical_degree: -s.k_l, mu, rbar })
        }
    }
}

pub fn check(args: &CheckArgs) -> Result<PropernessReport> {
    let input = match (&args.builtin, &args.input) {
        (Some(b), None) => {
            if !["p2", "dp6", "dp1"].contains(&b.as_str()) {
                bail!("unknown builtin {b:?} (builtins: p2, dp6, dp1)");
            }
            parse_input(b)?
        }
        (None, Some(path)) => parse_input(path)?,
        _ => bail!("give exactly one of --builtin or --input"),
    };
    let b = backend(input, args.coeffs.as_deref())?;
    let alpha = match &args.alpha {
        Some(v) => AlphaSource::Supplied {
            value: parse_rational(v).context("--alpha")?,
            provenance: "supplied on the command line".into(),
        },
        None => AlphaSource::Formula(args.group.into()),
    };
    let report = match args.mode {
        Mode::ThreeConditions => {
            let eps = parse_rational(&args.epsilon).context("--epsilon")?;
            check_three_conditions(&KClassSetup::new(b, eps, alpha)?)?
        }
        Mode::Fano => check_fano(&b, &alpha)?,
        Mode::NegativeC1 => check_negative_c1(&b)?,
    };
    Ok(report)
}

pub fn load_sweep_config(spec: &str) -> Result<SweepConfig> {
    match spec {
        "dp6" => Ok(SweepConfig::dp6()),
        "dp1" => Ok(SweepConfig::dp1()),
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {path}"))
        }
    }
}

pub fn sweep(args: &SweepArgs, parallel: bool) -> Result<FeasibilityReport> {
    let cfg = load_sweep_config(&args.config)?;
    let family = ParametricFamily::builtin(&cfg.family)
        .ok_or_else(|| anyhow!("unknown family {:?} (builtins: dp6, dp1)", cfg.family))?;
    Ok(sweep_lambda(&family, &cfg, parallel)?)
}

pub fn picard_curves(r: usize) -> Result<CurvesReport> {
    let curves = picard::exceptional_curves(r)?.to_vec();
    Ok(CurvesReport { r, count: curves.len(), census: picard::census(r)?, curves })
}

/// Run one invocation and return what should be printed.
pub fn run(cli: &Cli) -> Result<String> {
    let parallel = parallel_enabled(cli.parallel)?;
    let (f, a) = (cli.format, cli.approx);
    match &cli.command {
        Command::Fan(FanCommand::Validate { input }) => render(&fan_validate(input)?, f, a),
        Command::Fan(FanCommand::Autos { input }) => render(&fan_autos(input)?, f, a),
        Command::Divisor(DivisorCommand::Ample(args)) => render(&divisor_ample(args)?, f, a),
        Command::Polytope(PolytopeCommand::Info { input, coeffs }) => render(&polytope_info(input, coeffs.as_deref())?, f, a),
        Command::Alpha(args) => render(&alpha(args, parallel)?, f, a),
        Command::Intersect(args) => render(&intersect(args)?, f, a),
        Command::Check(args) => render(&check(args)?, f, a),
        Command::Sweep(args) => render(&sweep(args, parallel)?, f, a),
        Command::Picard(PicardCommand::Curves { r }) => render(&picard_curves(*r)?, f, a),
    }
}
