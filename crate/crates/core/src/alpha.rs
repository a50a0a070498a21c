//! Symmetric alpha invariants of ample toric classes.
//!
//! The moment polytope is translated so that its barycenter is the origin;
//! the offsets `a_i' = a_i + <beta, u_i>` describe the centered polytope as
//! `{y : <y, u_i> + a_i' >= 0}`. For a group `K` of fan automorphisms
//! preserving it,
//!
//! ```text
//! alpha_G = 1 / max_{i, y in P^K} (<y, u_i> + a_i')
//! ```
//!
//! where `P^K` is the fixed subpolytope. The oracle bounds the same number
//! from above by log canonical thresholds of invariant products of monomials.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{dot_int, pair, IntMatrix, IntVector, Point, Rational};
use crate::par;
use crate::polytope::Polytope;
use crate::toric::ToricDivisor;

/// Which symmetry group accompanies the real torus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupMode {
    /// The class stabilizer inside the fan automorphisms.
    Full,
    /// The torus alone.
    Torus,
    /// Caller-supplied matrices acting on `N`.
    Explicit(Vec<IntMatrix>),
}

impl GroupMode {
    pub fn label(&self) -> &'static str {
        match self {
            GroupMode::Full => "full",
            GroupMode::Torus => "torus",
            GroupMode::Explicit(_) => "explicit",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SymmetryContext {
    divisor: ToricDivisor,
    group_mode: GroupMode,
    stabilizer: Vec<IntMatrix>,
    barycenter: Point,
    centered_polytope: Polytope,
    centered_coeffs: Vec<Rational>,
}

fn centered(divisor: &ToricDivisor) -> Result<(Point, Polytope, Vec<Rational>)> {
    if !divisor.is_ample()? {
        return Err(Error::NotAmple);
    }
    let p = divisor.moment_polytope()?;
    let beta = p.barycenter()?;
    let shift: Point = beta.iter().map(|x| -x).collect();
    let centered = p.translate(&shift);
    let coeffs = divisor
        .coeffs()
        .iter()
        .zip(divisor.fan().rays())
        .map(|(a, u)| a + pair(&beta, u))
        .collect();
    Ok((beta, centered, coeffs))
}

/// Whether `g^T` maps the vertex set onto itself.
fn preserves(vertices: &BTreeSet<Point>, g: &IntMatrix) -> bool {
    let gt = g.transpose();
    vertices.iter().all(|v| vertices.contains(&gt.apply_rational(v)))
}

/// Fan automorphisms whose transpose maps the barycenter-centered moment
/// polytope onto itself.
pub fn class_stabilizer(divisor: &ToricDivisor) -> Result<Vec<IntMatrix>> {
    let (_, poly, _) = centered(divisor)?;
    let verts: BTreeSet<Point> = poly.vertices()?.iter().cloned().collect();
    Ok(divisor
        .fan()
        .automorphisms()
        .iter()
        .filter(|g| preserves(&verts, g))
        .cloned()
        .collect())
}

impl SymmetryContext {
    pub fn new(divisor: ToricDivisor, group_mode: GroupMode) -> Result<Self> {
        let (barycenter, centered_polytope, centered_coeffs) = centered(&divisor)?;
        let n = divisor.fan().dim();
        let stabilizer = match &group_mode {
            GroupMode::Full => {
                let verts: BTreeSet<Point> = centered_polytope.vertices()?.iter().cloned().collect();
                divisor
                    .fan()
                    .automorphisms()
                    .iter()
                    .filter(|g| preserves(&verts, g))
                    .cloned()
                    .collect()
            }
            GroupMode::Torus => vec![IntMatrix::identity(n)],
            GroupMode::Explicit(gs) => {
                if gs.iter().any(|g| g.dim() != n || !g.is_square()) {
                    return Err(Error::InvalidInput(format!("group matrices must be {n}x{n}")));
                }
                let verts: BTreeSet<Point> = centered_polytope.vertices()?.iter().cloned().collect();
                if !gs.iter().all(|g| preserves(&verts, g)) {
                    return Err(Error::GroupDoesNotPreserve);
                }
                gs.clone()
            }
        };
        Ok(SymmetryContext { divisor, group_mode, stabilizer, barycenter, centered_polytope, centered_coeffs })
    }

    pub fn divisor(&self) -> &ToricDivisor {
        &self.divisor
    }

    pub fn group_mode(&self) -> &GroupMode {
        &self.group_mode
    }

    pub fn stabilizer(&self) -> &[IntMatrix] {
        &self.stabilizer
    }

    pub fn barycenter(&self) -> &[Rational] {
        &self.barycenter
    }

    pub fn centered_polytope(&self) -> &Polytope {
        &self.centered_polytope
    }

    pub fn centered_coeffs(&self) -> &[Rational] {
        &self.centered_coeffs
    }

    /// The polytope the inner maximization ranges over.
    pub fn fixed_polytope(&self) -> Result<Polytope> {
        match self.group_mode {
            GroupMode::Torus => Ok(self.centered_polytope.clone()),
            _ => self.centered_polytope.fixed_subpolytope(&self.stabilizer),
        }
    }

    /// `max_i (<y, u_i> + a_i')` over the rays.
    fn height(&self, y: &[Rational]) -> Rational {
        self.divisor
            .fan()
            .rays()
            .iter()
            .zip(&self.centered_coeffs)
            .map(|(u, a)| pair(y, u) + a)
            .reduce(Rational::max)
            .expect("fan has rays")
    }
}

/// Closed-form alpha: the inner maximum of a linear function is attained at
/// a vertex of the fixed subpolytope.
pub fn alpha_invariant(ctx: &SymmetryContext) -> Result<Rational> {
    let fixed = ctx.fixed_polytope()?;
    let verts = fixed.vertices()?;
    if verts.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    let max = verts
        .iter()
        .map(|y| ctx.height(y))
        .reduce(Rational::max)
        .expect("nonempty");
    max.recip()
}

/// Default oracle depth.
pub const DEFAULT_ORACLE_DEPTH: u32 = 12;

/// Brute-force upper bound for alpha, parallel over `k` when available.
pub fn alpha_oracle(ctx: &SymmetryContext, k_max: u32) -> Result<Rational> {
    alpha_oracle_with(ctx, k_max, par::available())
}

pub fn alpha_oracle_with(ctx: &SymmetryContext, k_max: u32, parallel: bool) -> Result<Rational> {
    if k_max == 0 {
        return Err(Error::InvalidInput("oracle depth must be positive".into()));
    }
    let ks: Vec<u32> = (1..=k_max).collect();
    let per_k = par::try_map(&ks, parallel, |&k| oracle_at(ctx, k))?;
    per_k
        .into_iter()
        .flatten()
        .reduce(Rational::min)
        .ok_or(Error::EmptyPolytope)
}

/// Minimum over orbits `Gamma` of lattice points `m` of the centered `kP` of
/// `k N / max_i (sum_{m in Gamma} <m, u_i> + N k a_i')`, or `None` when `kP`
/// has no lattice points.
fn oracle_at(ctx: &SymmetryContext, k: u32) -> Result<Option<Rational>> {
    let points: BTreeSet<IntVector> = ctx.centered_polytope.scaled_lattice_points(k)?.into_iter().collect();
    let transposes: Vec<IntMatrix> = ctx.stabilizer.iter().map(IntMatrix::transpose).collect();
    let rays = ctx.divisor.fan().rays();
    let kk = Rational::from(k as i64);
    let mut seen = BTreeSet::new();
    let mut best: Option<Rational> = None;
    for m in &points {
        if seen.contains(m) {
            continue;
        }
        let orbit: BTreeSet<IntVector> = transposes.iter().map(|gt| gt.apply(m)).collect();
        debug_assert!(orbit.iter().all(|p| points.contains(p)));
        let count = Rational::from(orbit.len() as i64);
        let denom = rays
            .iter()
            .zip(&ctx.centered_coeffs)
            .map(|(u, a)| {
                let s: i64 = orbit.iter().map(|p| dot_int(p, u)).sum();
                Rational::from(s) + &count * &kk * a
            })
            .reduce(Rational::max)
            .expect("fan has rays");
        let value = (&kk * &count).checked_div(&denom)?;
        best = Some(match best {
            Some(b) => b.min(value),
            None => value,
        });
        seen.extend(orbit);
    }
    Ok(best)
}
