//! Smooth complete fans and torus-invariant divisors.
//!
//! A divisor `D = sum a_i D_i` is stored by its coefficients; the support
//! function is `phi_D(u_i) = -a_i`, extended linearly on each maximal cone.
//! Coefficients are rational throughout, so `R`-divisors produced by the
//! properness conditions are handled by the same code.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    dot_int, is_primitive, is_unimodular, pair, rat_inverse, solve_exact, to_rational_vec,
    IntMatrix, IntVector, Point, RatMatrix, Rational,
};
use crate::polytope::{combinations, Halfspace, Polytope};

/// Wire form: `{"dim": n, "rays": [[..]..], "max_cones": [[..]..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanJson {
    pub dim: usize,
    pub rays: Vec<IntVector>,
    pub max_cones: Vec<Vec<usize>>,
}

/// A simplicial fan given by primitive rays and maximal cones.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "FanJson", into = "FanJson")]
pub struct Fan {
    dim: usize,
    rays: Vec<IntVector>,
    max_cones: Vec<Vec<usize>>,
    autos: OnceLock<Vec<IntMatrix>>,
    checked: OnceLock<FanValidation>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

impl Eq for Fan {}

impl TryFrom<FanJson> for Fan {
    type Error = Error;
    fn try_from(j: FanJson) -> Result<Self> {
        Fan::new(j.dim, j.rays, j.max_cones)
    }
}

impl From<Fan> for FanJson {
    fn from(f: Fan) -> Self {
        FanJson { dim: f.dim, rays: f.rays, max_cones: f.max_cones }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanValidation {
    pub smooth: bool,
    pub complete: bool,
}

impl Fan {
    pub fn new(dim: usize, rays: Vec<IntVector>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidFan("dimension must be positive".into()));
        }
        if rays.is_empty() {
            return Err(Error::InvalidFan("no rays".into()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::InvalidFan(format!("ray {i} has length {} (expected {dim})", r.len())));
            }
            if !is_primitive(r) {
                return Err(Error::InvalidFan(format!("ray {i} {r:?} is not primitive")));
            }
            if rays[..i].contains(r) {
                return Err(Error::InvalidFan(format!("duplicate ray {r:?}")));
            }
        }
        for (c, cone) in max_cones.iter().enumerate() {
            if cone.len() != dim {
                return Err(Error::InvalidFan(format!("cone {c} has {} rays (expected {dim})", cone.len())));
            }
            if let Some(&bad) = cone.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("cone {c} references missing ray {bad}")));
            }
            if cone.iter().collect::<BTreeSet<_>>().len() != dim {
                return Err(Error::InvalidFan(format!("cone {c} repeats a ray")));
            }
        }
        Ok(Fan { dim, rays, max_cones, autos: OnceLock::new(), checked: OnceLock::new() })
    }

    /// Projective plane: rays `(1,0), (0,1), (-1,-1)`.
    pub fn p2() -> Self {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 0]])
            .expect("builtin fan")
    }

    /// Blowup of the projective plane at three torus-fixed points: the
    /// hexagonal fan with `u_4 = (-1, 0)`.
    pub fn dp6() -> Self {
        let rays = vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, 0], vec![-1, -1], vec![0, -1]];
        let cones = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
        Fan::new(2, rays, cones).expect("builtin fan")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "p2" => Some(Fan::p2()),
            "dp6" => Some(Fan::dp6()),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    fn cone_matrix(&self, cone: &[usize]) -> IntMatrix {
        let cols: Vec<&[i64]> = cone.iter().map(|&i| self.rays[i].as_slice()).collect();
        IntMatrix::from_columns(&cols)
    }

    /// Coordinates of `v` in the basis of the cone's rays, if independent.
    fn cone_coords(&self, cone: &[usize], v: &[Rational]) -> Option<Point> {
        let b = self.cone_matrix(cone).to_rational();
        solve_exact(&b, v).ok().flatten()
    }

    pub fn validate(&self) -> FanValidation {
        *self.checked.get_or_init(|| self.compute_validation())
    }

    fn compute_validation(&self) -> FanValidation {
        let smooth = self
            .max_cones
            .iter()
            .all(|c| is_unimodular(&self.cone_matrix(c)));
        FanValidation { smooth, complete: self.is_complete() }
    }

    /// Every facet of every maximal cone is shared by exactly two maximal
    /// cones lying on opposite sides of it, and a generic vector lies in
    /// exactly one maximal cone.
    fn is_complete(&self) -> bool {
        if self.max_cones.iter().any(|c| self.cone_matrix(c).det() == 0) {
            return false;
        }
        let mut facets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for cone in &self.max_cones {
            for skip in 0..self.dim {
                let mut facet: Vec<usize> =
                    cone.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &i)| i).collect();
                facet.sort_unstable();
                facets.entry(facet).or_default().push(cone[skip]);
            }
        }
        for (facet, apexes) in &facets {
            if apexes.len() != 2 {
                return false;
            }
            let rows: RatMatrix = facet.iter().map(|&i| to_rational_vec(&self.rays[i])).collect();
            let ns = crate::exact::nullspace(&rows, self.dim);
            if ns.len() != 1 {
                return false;
            }
            let s0 = pair(&ns[0], &self.rays[apexes[0]]);
            let s1 = pair(&ns[0], &self.rays[apexes[1]]);
            if (&s0 * &s1).is_positive() || s0.is_zero() || s1.is_zero() {
                return false;
            }
        }
        // covering degree at a generic point
        for salt in 1..50i64 {
            let v: Point = (0..self.dim)
                .map(|k| Rational::new(1_000_003 * (k as i64 + 1) + salt * salt, 997 + 31 * k as i64 + salt))
                .map(|x| if salt % 2 == 0 { -x } else { x })
                .collect();
            let mut count = 0;
            let mut degenerate = false;
            for cone in &self.max_cones {
                let coords = self.cone_coords(cone, &v).expect("nonsingular cone");
                if coords.iter().any(|x| x.is_zero()) {
                    degenerate = true;
                    break;
                }
                if coords.iter().all(|x| x.is_positive()) {
                    count += 1;
                }
            }
            if !degenerate {
                return count == 1;
            }
        }
        false
    }

    fn require_complete(&self) -> Result<()> {
        if self.validate().complete {
            Ok(())
        } else {
            Err(Error::InvalidFan("fan is not complete".into()))
        }
    }

    /// Lattice automorphisms preserving the fan, sorted.
    ///
    /// Candidates send the rays of the first maximal cone to every ordered
    /// tuple of rays; those that are integral, unimodular, permute the rays
    /// and map maximal cones to maximal cones are kept.
    pub fn automorphisms(&self) -> &[IntMatrix] {
        self.autos.get_or_init(|| self.compute_automorphisms())
    }

    fn compute_automorphisms(&self) -> Vec<IntMatrix> {
        let Some(anchor) = self.max_cones.first() else {
            return vec![IntMatrix::identity(self.dim)];
        };
        let Some(binv) = rat_inverse(&self.cone_matrix(anchor).to_rational()) else {
            return vec![IntMatrix::identity(self.dim)];
        };
        let index: HashMap<&IntVector, usize> =
            self.rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let cones: BTreeSet<Vec<usize>> = self
            .max_cones
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        let mut found = BTreeSet::new();
        for targets in tuples(self.rays.len(), self.dim) {
            let cols: Vec<&[i64]> = targets.iter().map(|&i| self.rays[i].as_slice()).collect();
            let t = IntMatrix::from_columns(&cols).to_rational();
            // g = T B^-1
            let mut rows = Vec::with_capacity(self.dim);
            let mut integral = true;
            for i in 0..self.dim {
                let mut row = Vec::with_capacity(self.dim);
                for j in 0..self.dim {
                    let x: Rational = (0..self.dim).map(|k| &t[i][k] * &binv[k][j]).sum();
                    match x.to_i64() {
                        Some(v) => row.push(v),
                        None => integral = false,
                    }
                }
                rows.push(row);
            }
            if !integral {
                continue;
            }
            let g = IntMatrix(rows);
            if !is_unimodular(&g) {
                continue;
            }
            let Some(perm) = self
                .rays
                .iter()
                .map(|r| index.get(&g.apply(r)).copied())
                .collect::<Option<Vec<usize>>>()
            else {
                continue;
            };
            let preserves = cones.iter().all(|c| {
                let mut img: Vec<usize> = c.iter().map(|&i| perm[i]).collect();
                img.sort_unstable();
                cones.contains(&img)
            });
            if preserves {
                found.insert(g);
            }
        }
        found.into_iter().collect()
    }

    /// Permutation of ray indices induced by an automorphism.
    pub fn ray_permutation(&self, g: &IntMatrix) -> Option<Vec<usize>> {
        self.rays
            .iter()
            .map(|r| {
                let img = g.apply(r);
                self.rays.iter().position(|s| *s == img)
            })
            .collect()
    }

    /// The fan with every ray replaced by `g u_i`; ray order and cones kept.
    pub fn transformed(&self, g: &IntMatrix) -> Result<Fan> {
        if g.dim() != self.dim || !is_unimodular(g) {
            return Err(Error::InvalidInput("transformation is not unimodular".into()));
        }
        Fan::new(self.dim, self.rays.iter().map(|r| g.apply(r)).collect(), self.max_cones.clone())
    }

    /// Cyclic neighbours and self-intersection numbers of the boundary
    /// curves of a smooth complete surface fan.
    pub fn surface_data(&self) -> Result<SurfaceData> {
        if self.dim != 2 {
            return Err(Error::Unsupported("surface formula only".into()));
        }
        let v = self.validate();
        if !v.smooth || !v.complete {
            return Err(Error::InvalidFan("surface formula needs a smooth complete fan".into()));
        }
        let mut neighbors = vec![Vec::new(); self.rays.len()];
        for c in &self.max_cones {
            neighbors[c[0]].push(c[1]);
            neighbors[c[1]].push(c[0]);
        }
        let mut out = Vec::with_capacity(self.rays.len());
        for (i, nb) in neighbors.iter().enumerate() {
            let [p, q] = nb[..] else {
                return Err(Error::InvalidFan(format!("ray {i} is not in exactly two cones")));
            };
            let u = &self.rays[i];
            let s = [self.rays[p][0] + self.rays[q][0], self.rays[p][1] + self.rays[q][1]];
            // u_p + u_q = c u_i
            let c = if u[0] != 0 { s[0] / u[0] } else { s[1] / u[1] };
            if s[0] != c * u[0] || s[1] != c * u[1] {
                return Err(Error::InvalidFan(format!("neighbours of ray {i} violate the wall relation")));
            }
            out.push(Wall { prev: p, next: q, self_intersection: -c });
        }
        Ok(SurfaceData { walls: out })
    }
}

/// Ordered `k`-tuples of distinct indices below `n`.
fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

/// The boundary curve `D_i` of a toric surface with its two neighbours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub prev: usize,
    pub next: usize,
    pub self_intersection: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceData {
    pub walls: Vec<Wall>,
}

/// Torus-invariant `Q`-divisor `sum a_i D_i` on a fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricDivisor {
    fan: Arc<Fan>,
    coeffs: Vec<Rational>,
}

/// Wire form: `{"coeffs": ["p/q", ...]}` with an optional fan reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<String>,
    pub coeffs: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slopes {
    /// `-K . D^{n-1} / D^n`
    pub mu: Rational,
    /// Mean scalar curvature `2 mu` (surfaces only).
    pub rbar: Option<Rational>,
}

impl ToricDivisor {
    pub fn new(fan: Arc<Fan>, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != fan.num_rays() {
            return Err(Error::DimensionMismatch { expected: fan.num_rays(), got: coeffs.len() });
        }
        Ok(ToricDivisor { fan, coeffs })
    }

    pub fn zero(fan: Arc<Fan>) -> Self {
        let n = fan.num_rays();
        ToricDivisor { fan, coeffs: vec![Rational::zero(); n] }
    }

    /// `K = -sum D_i`
    pub fn canonical(fan: Arc<Fan>) -> Self {
        let n = fan.num_rays();
        ToricDivisor { fan, coeffs: vec![Rational::from(-1); n] }
    }

    pub fn anticanonical(fan: Arc<Fan>) -> Self {
        let n = fan.num_rays();
        ToricDivisor { fan, coeffs: vec![Rational::one(); n] }
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn same_fan(&self, other: &ToricDivisor) -> Result<()> {
        if Arc::ptr_eq(&self.fan, &other.fan) || self.fan == other.fan {
            Ok(())
        } else {
            Err(Error::InvalidInput("divisors live on different fans".into()))
        }
    }

    /// `x self + y other`
    pub fn combine(&self, x: &Rational, other: &ToricDivisor, y: &Rational) -> Result<ToricDivisor> {
        self.same_fan(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| x * a + y * b)
            .collect();
        Ok(ToricDivisor { fan: self.fan.clone(), coeffs })
    }

    pub fn scale(&self, t: &Rational) -> ToricDivisor {
        ToricDivisor { fan: self.fan.clone(), coeffs: self.coeffs.iter().map(|a| a * t).collect() }
    }

    /// `D + div(chi^m)`: shifts `a_i` by `<m, u_i>`.
    pub fn shift(&self, m: &[Rational]) -> ToricDivisor {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.fan.rays())
            .map(|(a, u)| a + pair(m, u))
            .collect();
        ToricDivisor { fan: self.fan.clone(), coeffs }
    }

    /// Same coefficients on the fan transformed by `g`.
    pub fn transformed(&self, g: &IntMatrix) -> Result<ToricDivisor> {
        Ok(ToricDivisor { fan: Arc::new(self.fan.transformed(g)?), coeffs: self.coeffs.clone() })
    }

    /// Pull-back along a fan automorphism: the divisor whose support
    /// function is `phi_D o g`.
    pub fn pullback(&self, g: &IntMatrix) -> Result<ToricDivisor> {
        let perm = self
            .fan
            .ray_permutation(g)
            .ok_or_else(|| Error::InvalidInput("matrix does not permute the rays".into()))?;
        let coeffs = perm.iter().map(|&j| self.coeffs[j].clone()).collect();
        Ok(ToricDivisor { fan: self.fan.clone(), coeffs })
    }

    /// The linear functional `m_sigma` with `<m_sigma, u_i> = -a_i` on the
    /// rays of cone `sigma`.
    pub fn cone_functional(&self, cone: &[usize]) -> Result<Point> {
        let rows: RatMatrix = cone.iter().map(|&i| to_rational_vec(&self.fan.rays()[i])).collect();
        let rhs: Vec<Rational> = cone.iter().map(|&i| -&self.coeffs[i]).collect();
        solve_exact(&rows, &rhs)?.ok_or_else(|| Error::InvalidFan("singular maximal cone".into()))
    }

    /// `phi_D(v)`, evaluated on a maximal cone containing `v`.
    pub fn support_value(&self, v: &[i64]) -> Result<Rational> {
        if v.len() != self.fan.dim() {
            return Err(Error::DimensionMismatch { expected: self.fan.dim(), got: v.len() });
        }
        self.fan.require_complete()?;
        let vr = to_rational_vec(v);
        for cone in self.fan.max_cones() {
            if let Some(coords) = self.fan.cone_coords(cone, &vr) {
                if coords.iter().all(|x| !x.is_negative()) {
                    return Ok(cone
                        .iter()
                        .zip(&coords)
                        .map(|(&i, x)| -(x * &self.coeffs[i]))
                        .sum());
                }
            }
        }
        Err(Error::InvalidFan("no maximal cone contains the vector".into()))
    }

    /// Minimum over cones `sigma` and rays `j` outside `sigma` of
    /// `<m_sigma, u_j> + a_j`; positive iff strictly concave.
    fn concavity_margin(&self) -> Result<Option<Rational>> {
        let mut margin: Option<Rational> = None;
        for cone in self.fan.max_cones() {
            let m = self.cone_functional(cone)?;
            for (j, u) in self.fan.rays().iter().enumerate() {
                if cone.contains(&j) {
                    continue;
                }
                let gap = pair(&m, u) + &self.coeffs[j];
                margin = Some(match margin {
                    Some(g) if g <= gap => g,
                    _ => gap,
                });
            }
        }
        Ok(margin)
    }

    /// Ample iff the support function is strictly concave.
    pub fn is_ample(&self) -> Result<bool> {
        Ok(self.concavity_margin()?.is_none_or(|g| g.is_positive()))
    }

    pub fn is_nef(&self) -> Result<bool> {
        Ok(self.concavity_margin()?.is_none_or(|g| !g.is_negative()))
    }

    /// `P_D = {m : <m, u_i> >= -a_i}`
    pub fn moment_polytope(&self) -> Result<Polytope> {
        self.fan.require_complete()?;
        let hrep = self
            .fan
            .rays()
            .iter()
            .zip(&self.coeffs)
            .map(|(u, a)| Halfspace { normal: u.clone(), offset: -a })
            .collect();
        Polytope::new(self.fan.dim(), hrep)
    }

    /// `D . D_i` for every ray, via `D . D_i = a_{i-1} + a_{i+1} + D_i^2 a_i`.
    pub fn wall_values(&self) -> Result<Vec<Rational>> {
        let data = self.fan.surface_data()?;
        Ok(data
            .walls
            .iter()
            .enumerate()
            .map(|(i, w)| {
                &self.coeffs[w.prev] + &self.coeffs[w.next] + &self.coeffs[i] * w.self_intersection
            })
            .collect())
    }

    /// Intersection number on a smooth complete toric surface.
    pub fn intersection_number(&self, other: &ToricDivisor) -> Result<Rational> {
        self.same_fan(other)?;
        let walls = self.wall_values()?;
        Ok(walls.iter().zip(&other.coeffs).map(|(w, b)| w * b).sum())
    }

    pub fn self_intersection(&self) -> Result<Rational> {
        self.intersection_number(self)
    }

    /// `mu = -K . D^{n-1} / D^n` and, for surfaces, `rbar = 2 mu`.
    pub fn slope_quantities(&self) -> Result<Slopes> {
        if !self.is_ample()? {
            return Err(Error::NotAmple);
        }
        let anti = ToricDivisor::anticanonical(self.fan.clone());
        match self.fan.dim() {
            2 => {
                let d2 = self.self_intersection()?;
                let mu = anti.intersection_number(self)?.checked_div(&d2)?;
                let rbar = &mu * 2;
                let p = self.moment_polytope()?;
                debug_assert_eq!(rbar, p.boundary_measure()? / p.volume()?);
                Ok(Slopes { mu, rbar: Some(rbar) })
            }
            3 => {
                if !anti.is_nef()? {
                    return Err(Error::Unsupported(
                        "slope in dimension 3 needs a nef anticanonical class".into(),
                    ));
                }
                let top = mixed_volume_intersection(&[self.clone(), self.clone(), self.clone()])?;
                let kd = mixed_volume_intersection(&[anti, self.clone(), self.clone()])?;
                Ok(Slopes { mu: kd.checked_div(&top)?, rbar: None })
            }
            n => Err(Error::Unsupported(format!("slope quantities in dimension {n}"))),
        }
    }
}

/// `D_1 ... D_n = sum_{S} (-1)^{n-|S|} Vol(sum_{i in S} P_i)` for nef
/// divisors, normalized so that `D^n = n! Vol(P_D)`.
pub fn mixed_volume_intersection(divisors: &[ToricDivisor]) -> Result<Rational> {
    let first = divisors
        .first()
        .ok_or_else(|| Error::InvalidInput("no divisors".into()))?;
    let n = first.fan.dim();
    if n > 3 {
        return Err(Error::Unsupported(format!("mixed volumes in dimension {n}")));
    }
    if divisors.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: divisors.len() });
    }
    for d in divisors {
        first.same_fan(d)?;
        if !d.is_nef()? {
            return Err(Error::NotNef);
        }
    }
    let mut total = Rational::zero();
    for size in 1..=n {
        for subset in combinations(n, size) {
            let mut sum = ToricDivisor::zero(first.fan.clone());
            for &i in &subset {
                sum = sum.combine(&Rational::one(), &divisors[i], &Rational::one())?;
            }
            let vol = sum.moment_polytope()?.volume()?;
            if (n - size) % 2 == 0 {
                total += vol;
            } else {
                total -= &vol;
            }
        }
    }
    Ok(total)
}

/// Integer dot product, re-exported for callers working with raw rays.
pub fn ray_pairing(m: &[i64], u: &[i64]) -> i64 {
    dot_int(m, u)
}
