//! Exact convex polytopes in `M_R` for dimension at most three.
//!
//! A polytope is kept in H-representation (`<m, normal> >= offset`, plus
//! optional equalities for lower-dimensional pieces such as fixed-point
//! sets). The V-representation is computed on first use and cached.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    angle_cmp, is_unimodular, lcm_denominators, nullspace, pair, primitive, rank, solve_system,
    to_rational_vec, IntMatrix, IntVector, Point, RatMatrix, Rational,
};

const MAX_DIM: usize = 3;

/// Closed halfspace `<m, normal> >= offset` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: IntVector,
    pub offset: Rational,
}

/// Hyperplane `<m, normal> = offset` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: IntVector,
    pub offset: Rational,
}

/// Scales a constraint so that its normal is primitive.
fn normalize(normal: &[i64], offset: &Rational) -> Result<(IntVector, Rational)> {
    let p = primitive(normal)
        .map_err(|_| Error::InvalidInput("constraint with zero normal".into()))?;
    let g = normal
        .iter()
        .zip(&p)
        .find(|(_, &q)| q != 0)
        .map(|(&a, &q)| a / q)
        .expect("nonzero normal");
    Ok((p, offset / g))
}

/// Wire form of a polytope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub hrep: Vec<Halfspace>,
    #[serde(default)]
    pub equalities: Vec<Hyperplane>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vrep: Option<Vec<Point>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PolytopeJson", into = "PolytopeJson")]
pub struct Polytope {
    dim: usize,
    hrep: Vec<Halfspace>,
    equalities: Vec<Hyperplane>,
    vrep: OnceLock<Result<Vec<Point>>>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.hrep == other.hrep && self.equalities == other.equalities
    }
}

impl TryFrom<PolytopeJson> for Polytope {
    type Error = Error;

    fn try_from(j: PolytopeJson) -> Result<Self> {
        let dim = j
            .dim
            .or_else(|| j.hrep.first().map(|h| h.normal.len()))
            .or_else(|| j.equalities.first().map(|h| h.normal.len()))
            .ok_or_else(|| Error::InvalidInput("cannot infer polytope dimension".into()))?;
        let p = Polytope::with_equalities(dim, j.hrep, j.equalities)?;
        if let Some(vrep) = j.vrep {
            if vrep.iter().any(|v| v.len() != dim || !p.contains(v)) {
                return Err(Error::InvalidInput("vrep point violates hrep".into()));
            }
            if dim <= MAX_DIM {
                let given: BTreeSet<Point> = vrep.into_iter().collect();
                let computed: BTreeSet<Point> = p.vertices()?.iter().cloned().collect();
                if given != computed {
                    return Err(Error::InvalidInput("vrep does not match hrep".into()));
                }
            }
        }
        Ok(p)
    }
}

impl From<Polytope> for PolytopeJson {
    fn from(p: Polytope) -> Self {
        let vrep = match p.vrep.get() {
            Some(Ok(v)) => Some(v.clone()),
            _ => None,
        };
        PolytopeJson {
            dim: Some(p.dim),
            hrep: p.hrep,
            equalities: p.equalities,
            vrep,
        }
    }
}

impl Polytope {
    pub fn new(dim: usize, hrep: Vec<Halfspace>) -> Result<Self> {
        Self::with_equalities(dim, hrep, Vec::new())
    }

    pub fn with_equalities(
        dim: usize,
        hrep: Vec<Halfspace>,
        equalities: Vec<Hyperplane>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("polytope dimension must be positive".into()));
        }
        let mut hs = Vec::with_capacity(hrep.len());
        for h in hrep {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: h.normal.len() });
            }
            let (normal, offset) = normalize(&h.normal, &h.offset)?;
            hs.push(Halfspace { normal, offset });
        }
        let mut eqs: Vec<Hyperplane> = Vec::with_capacity(equalities.len());
        for e in equalities {
            if e.normal.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: e.normal.len() });
            }
            let (mut normal, mut offset) = normalize(&e.normal, &e.offset)?;
            // fix the sign so that duplicates collapse
            if normal.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                normal.iter_mut().for_each(|x| *x = -*x);
                offset = -offset;
            }
            let e = Hyperplane { normal, offset };
            if !eqs.contains(&e) {
                eqs.push(e);
            }
        }
        Ok(Polytope { dim, hrep: hs, equalities: eqs, vrep: OnceLock::new() })
    }

    /// Builds the polytope and computes its vertices immediately, so the
    /// value can be shared without racing on the cache.
    pub fn eager(self) -> Result<Self> {
        if self.dim <= MAX_DIM {
            self.vertices()?;
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hrep(&self) -> &[Halfspace] {
        &self.hrep
    }

    pub fn equalities(&self) -> &[Hyperplane] {
        &self.equalities
    }

    pub fn contains(&self, m: &[Rational]) -> bool {
        self.hrep.iter().all(|h| pair(m, &h.normal) >= h.offset)
            && self.equalities.iter().all(|e| pair(m, &e.normal) == e.offset)
    }

    fn rows(&self) -> (Vec<(Point, Rational)>, Vec<(Point, Rational)>) {
        let ineq = self
            .hrep
            .iter()
            .map(|h| (to_rational_vec(&h.normal), h.offset.clone()))
            .collect();
        let eq = self
            .equalities
            .iter()
            .map(|e| (to_rational_vec(&e.normal), e.offset.clone()))
            .collect();
        (ineq, eq)
    }

    /// Exact vertex set, sorted lexicographically. Empty for the empty
    /// polytope; an error for unbounded nonempty regions.
    pub fn vertices(&self) -> Result<&[Point]> {
        match self.vrep.get_or_init(|| self.compute_vertices()) {
            Ok(v) => Ok(v),
            Err(e) => Err(e.clone()),
        }
    }

    fn compute_vertices(&self) -> Result<Vec<Point>> {
        if self.dim > MAX_DIM {
            return Err(Error::Unsupported(format!(
                "vertex enumeration in dimension {} (at most {MAX_DIM})",
                self.dim
            )));
        }
        let (ineq, mut eq) = self.rows();
        let all_normals: RatMatrix = ineq.iter().chain(&eq).map(|(n, _)| n.clone()).collect();
        let lineality = nullspace(&all_normals, self.dim);
        if !lineality.is_empty() {
            // Nonempty iff the slice orthogonal to the lineality space has a vertex.
            eq.extend(lineality.into_iter().map(|d| (d, Rational::zero())));
            return if basic_points(self.dim, &ineq, &eq).is_empty() {
                Ok(Vec::new())
            } else {
                Err(Error::Unbounded)
            };
        }
        let verts = basic_points(self.dim, &ineq, &eq);
        if verts.is_empty() {
            return Ok(verts);
        }
        if has_recession_ray(self.dim, &ineq, &eq) {
            return Err(Error::Unbounded);
        }
        Ok(verts)
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.vertices()?.is_empty())
    }

    /// Affine dimension of the polytope; `None` when empty.
    pub fn affine_dim(&self) -> Result<Option<usize>> {
        Ok(affine_dim(self.vertices()?))
    }

    /// Vertices of a full-dimensional polygon in counterclockwise order.
    pub fn polygon(&self) -> Result<Vec<Point>> {
        if self.dim != 2 {
            return Err(Error::Unsupported("polygon ordering needs dimension 2".into()));
        }
        let verts = self.vertices()?;
        if affine_dim(verts) != Some(2) {
            return Err(Error::NotFullDimensional);
        }
        Ok(ccw_order(verts))
    }

    /// Euclidean volume; zero for empty or lower-dimensional polytopes.
    pub fn volume(&self) -> Result<Rational> {
        Ok(self
            .simplices()?
            .iter()
            .map(|(vol, _)| vol.clone())
            .sum())
    }

    /// Centroid of the polytope.
    pub fn barycenter(&self) -> Result<Point> {
        let simplices = self.simplices()?;
        let total: Rational = simplices.iter().map(|(v, _)| v.clone()).sum();
        if total.is_zero() {
            return Err(Error::NotFullDimensional);
        }
        let mut acc = vec![Rational::zero(); self.dim];
        for (vol, c) in &simplices {
            for (a, x) in acc.iter_mut().zip(c) {
                *a += vol * x;
            }
        }
        Ok(acc.into_iter().map(|a| a / &total).collect())
    }

    /// Fan triangulation from one vertex: `(volume, centroid)` per simplex.
    fn simplices(&self) -> Result<Vec<(Rational, Point)>> {
        let verts = self.vertices()?;
        if affine_dim(verts) != Some(self.dim) {
            return Ok(Vec::new());
        }
        let out = match self.dim {
            1 => {
                let lo = verts.iter().min().expect("nonempty").clone();
                let hi = verts.iter().max().expect("nonempty").clone();
                let mid = vec![(&lo[0] + &hi[0]) / 2];
                vec![(&hi[0] - &lo[0], mid)]
            }
            2 => {
                let poly = ccw_order(verts);
                (1..poly.len() - 1)
                    .map(|i| simplex(&[&poly[0], &poly[i], &poly[i + 1]]))
                    .collect()
            }
            3 => {
                let apex = &verts[0];
                let mut out = Vec::new();
                for facet in self.facets3(verts) {
                    if facet.contains(&0) {
                        continue;
                    }
                    let pts: Vec<&Point> = facet.iter().map(|&i| &verts[i]).collect();
                    for i in 1..pts.len() - 1 {
                        out.push(simplex(&[apex, pts[0], pts[i], pts[i + 1]]));
                    }
                }
                out
            }
            _ => unreachable!("dimension checked by vertices()"),
        };
        Ok(out)
    }

    /// Facets of a full-dimensional 3-polytope as cyclically ordered vertex
    /// index lists.
    fn facets3(&self, verts: &[Point]) -> Vec<Vec<usize>> {
        let mut seen = BTreeSet::new();
        let mut facets = Vec::new();
        for h in &self.hrep {
            let idx: Vec<usize> = (0..verts.len())
                .filter(|&i| pair(&verts[i], &h.normal) == h.offset)
                .collect();
            let pts: Vec<Point> = idx.iter().map(|&i| verts[i].clone()).collect();
            if affine_dim(&pts) != Some(2) || !seen.insert(idx.clone()) {
                continue;
            }
            // project away a coordinate the normal depends on
            let drop = h.normal.iter().position(|&x| x != 0).expect("primitive normal");
            let proj: Vec<Point> = pts
                .iter()
                .map(|p| {
                    p.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != drop)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let order = ccw_indices(&proj);
            facets.push(order.into_iter().map(|k| idx[k]).collect());
        }
        facets
    }

    /// Sum of lattice lengths of the edges of a polygon: the boundary
    /// measure `d sigma` with `d sigma ^ d l = dVol` for each primitive edge
    /// functional `l`.
    pub fn boundary_measure(&self) -> Result<Rational> {
        if self.dim != 2 {
            return Err(Error::Unsupported("boundary measure needs dimension 2".into()));
        }
        let poly = self.polygon()?;
        Ok((0..poly.len())
            .map(|i| lattice_length(&poly[i], &poly[(i + 1) % poly.len()]))
            .sum())
    }

    pub fn translate(&self, t: &[Rational]) -> Polytope {
        assert_eq!(t.len(), self.dim, "translation dimension");
        let hrep = self
            .hrep
            .iter()
            .map(|h| Halfspace { normal: h.normal.clone(), offset: &h.offset + pair(t, &h.normal) })
            .collect();
        let equalities = self
            .equalities
            .iter()
            .map(|e| Hyperplane { normal: e.normal.clone(), offset: &e.offset + pair(t, &e.normal) })
            .collect();
        let vrep = OnceLock::new();
        if let Some(Ok(vs)) = self.vrep.get() {
            let moved = vs
                .iter()
                .map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect())
                .collect::<BTreeSet<Point>>()
                .into_iter()
                .collect();
            let _ = vrep.set(Ok(moved));
        }
        Polytope { dim: self.dim, hrep, equalities, vrep }
    }

    /// Dilation `t P` for positive `t`.
    pub fn scale(&self, t: &Rational) -> Result<Polytope> {
        if !t.is_positive() {
            return Err(Error::InvalidInput("scale factor must be positive".into()));
        }
        let hrep = self
            .hrep
            .iter()
            .map(|h| Halfspace { normal: h.normal.clone(), offset: &h.offset * t })
            .collect();
        let eqs = self
            .equalities
            .iter()
            .map(|e| Hyperplane { normal: e.normal.clone(), offset: &e.offset * t })
            .collect();
        Polytope::with_equalities(self.dim, hrep, eqs)
    }

    /// Image `g P` under a unimodular map of `M`.
    pub fn linear_image(&self, g: &IntMatrix) -> Result<Polytope> {
        let inv = g
            .inverse_unimodular()
            .ok_or_else(|| Error::InvalidInput("map is not unimodular".into()))?;
        // <g^-1 y, n> = <y, g^-T n>
        let inv_t = inv.transpose();
        let hrep = self
            .hrep
            .iter()
            .map(|h| Halfspace { normal: inv_t.apply(&h.normal), offset: h.offset.clone() })
            .collect();
        let eqs = self
            .equalities
            .iter()
            .map(|e| Hyperplane { normal: inv_t.apply(&e.normal), offset: e.offset.clone() })
            .collect();
        Polytope::with_equalities(self.dim, hrep, eqs)
    }

    /// Points of `P` fixed by every `g` in `group`, where `g` acts on `M`
    /// through its transpose (the dual of an action on `N`).
    ///
    /// Every `g` must map the vertex set of `P` onto itself.
    pub fn fixed_subpolytope(&self, group: &[IntMatrix]) -> Result<Polytope> {
        let verts: BTreeSet<Point> = self.vertices()?.iter().cloned().collect();
        let mut eqs = self.equalities.clone();
        for g in group {
            if g.dim() != self.dim || !is_unimodular(g) {
                return Err(Error::InvalidInput("group element is not unimodular".into()));
            }
            let gt = g.transpose();
            let image: BTreeSet<Point> = verts.iter().map(|v| gt.apply_rational(v)).collect();
            if image != verts {
                return Err(Error::GroupDoesNotPreserve);
            }
            for (i, row) in gt.0.iter().enumerate() {
                let mut normal = row.clone();
                normal[i] -= 1;
                if normal.iter().any(|&x| x != 0) {
                    eqs.push(Hyperplane { normal, offset: Rational::zero() });
                }
            }
        }
        Polytope::with_equalities(self.dim, self.hrep.clone(), eqs)
    }

    /// Integer points of `k P`, i.e. the numerators of `P ∩ (1/k) M`.
    pub fn scaled_lattice_points(&self, k: u32) -> Result<Vec<IntVector>> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be positive".into()));
        }
        let verts = self.vertices()?;
        if verts.is_empty() {
            return Ok(Vec::new());
        }
        let kr = Rational::from(i64::from(k));
        let to_i64 = |b: BigInt| {
            b.to_i64()
                .ok_or_else(|| Error::Unsupported("lattice box exceeds i64".into()))
        };
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for c in 0..self.dim {
            let min = verts.iter().map(|v| &v[c]).min().expect("nonempty");
            let max = verts.iter().map(|v| &v[c]).max().expect("nonempty");
            lo.push(to_i64((min * &kr).ceil())?);
            hi.push(to_i64((max * &kr).floor())?);
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Ok(Vec::new());
        }
        let scaled_h: Vec<(&IntVector, Rational)> =
            self.hrep.iter().map(|h| (&h.normal, &h.offset * &kr)).collect();
        let scaled_e: Vec<(&IntVector, Rational)> =
            self.equalities.iter().map(|e| (&e.normal, &e.offset * &kr)).collect();
        let mut out = Vec::new();
        let mut m = lo.clone();
        loop {
            let ok = scaled_h
                .iter()
                .all(|(n, off)| Rational::from(crate::exact::dot_int(&m, n)) >= *off)
                && scaled_e
                    .iter()
                    .all(|(n, off)| Rational::from(crate::exact::dot_int(&m, n)) == *off);
            if ok {
                out.push(m.clone());
            }
            // odometer, last coordinate fastest
            let mut c = self.dim;
            loop {
                if c == 0 {
                    return Ok(out);
                }
                c -= 1;
                if m[c] < hi[c] {
                    m[c] += 1;
                    break;
                }
                m[c] = lo[c];
            }
        }
    }

    /// Points of `P ∩ (1/k) M`, sorted lexicographically.
    pub fn lattice_points(&self, k: u32) -> Result<Vec<Point>> {
        let kr = Rational::from(i64::from(k));
        Ok(self
            .scaled_lattice_points(k)?
            .into_iter()
            .map(|m| m.iter().map(|&x| Rational::from(x) / &kr).collect())
            .collect())
    }
}

/// Feasible basic solutions: points where the equalities plus some
/// inequalities determine a unique point.
fn basic_points(dim: usize, ineq: &[(Point, Rational)], eq: &[(Point, Rational)]) -> Vec<Point> {
    let mut found = BTreeSet::new();
    for size in 0..=dim.min(ineq.len()) {
        for comb in combinations(ineq.len(), size) {
            let (a, b): (RatMatrix, Vec<Rational>) = eq
                .iter()
                .chain(comb.iter().map(|&i| &ineq[i]))
                .map(|(n, o)| (n.clone(), o.clone()))
                .unzip();
            if a.is_empty() {
                continue;
            }
            let Some(x) = solve_system(&a, &b, dim) else { continue };
            let feasible = ineq.iter().all(|(n, o)| crate::exact::dot(n, &x) >= *o)
                && eq.iter().all(|(n, o)| crate::exact::dot(n, &x) == *o);
            if feasible {
                found.insert(x);
            }
        }
    }
    found.into_iter().collect()
}

/// Whether the recession cone `{d : A d >= 0, E d = 0}` of a pointed
/// polyhedron contains an extreme ray.
fn has_recession_ray(dim: usize, ineq: &[(Point, Rational)], eq: &[(Point, Rational)]) -> bool {
    for size in 0..dim.min(ineq.len() + 1) {
        for comb in combinations(ineq.len(), size) {
            let rows: RatMatrix = eq
                .iter()
                .chain(comb.iter().map(|&i| &ineq[i]))
                .map(|(n, _)| n.clone())
                .collect();
            let ns = nullspace(&rows, dim);
            if ns.len() != 1 {
                continue;
            }
            let d = &ns[0];
            let neg: Point = d.iter().map(|x| -x).collect();
            for dir in [d, &neg] {
                if ineq.iter().all(|(n, _)| !crate::exact::dot(n, dir).is_negative()) {
                    return true;
                }
            }
        }
    }
    false
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Affine dimension of a point set; `None` when empty.
pub fn affine_dim(points: &[Point]) -> Option<usize> {
    let first = points.first()?;
    let diffs: RatMatrix = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    Some(if diffs.is_empty() { 0 } else { rank(&diffs) })
}

fn centroid(points: &[&Point]) -> Point {
    let n = Rational::from(points.len() as i64);
    (0..points[0].len())
        .map(|c| points.iter().map(|p| &p[c]).sum::<Rational>() / &n)
        .collect()
}

fn ccw_indices(points: &[Point]) -> Vec<usize> {
    let refs: Vec<&Point> = points.iter().collect();
    let c = centroid(&refs);
    let rel: Vec<Point> = points
        .iter()
        .map(|p| p.iter().zip(&c).map(|(a, b)| a - b).collect())
        .collect();
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| angle_cmp(&rel[i], &rel[j]));
    idx
}

fn ccw_order(points: &[Point]) -> Vec<Point> {
    ccw_indices(points).into_iter().map(|i| points[i].clone()).collect()
}

/// Volume and centroid of a simplex given by its vertices.
fn simplex(vs: &[&Point]) -> (Rational, Point) {
    let d = vs.len() - 1;
    let rows: RatMatrix = vs[1..]
        .iter()
        .map(|v| v.iter().zip(vs[0]).map(|(a, b)| a - b).collect())
        .collect();
    let det = rat_det(&rows).abs();
    let fact: i64 = (1..=d as i64).product();
    (det / fact, centroid(vs))
}

fn rat_det(m: &RatMatrix) -> Rational {
    match m.len() {
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        3 => {
            &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
                - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
                + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
        }
        n => unreachable!("simplex dimension {n}"),
    }
}

/// Length of the segment `v -> w` measured in units of the primitive
/// lattice vector along it.
pub fn lattice_length(v: &[Rational], w: &[Rational]) -> Rational {
    let d: Point = w.iter().zip(v).map(|(a, b)| a - b).collect();
    let l = lcm_denominators(d.iter());
    let ints: Vec<BigInt> = d
        .iter()
        .map(|x| x.numer() * (&l / x.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Rational::zero();
    }
    Rational::new(g.abs(), l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn hs(normal: &[i64], offset: Rational) -> Halfspace {
        Halfspace { normal: normal.to_vec(), offset }
    }

    fn pt(c: &[(i64, i64)]) -> Point {
        c.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    fn ipts(ps: &[(i64, i64)]) -> Vec<Point> {
        let mut v: Vec<Point> = ps.iter().map(|&(x, y)| vec![int(x), int(y)]).collect();
        v.sort();
        v
    }

    fn hexagon() -> Polytope {
        let rays = [[1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1]];
        Polytope::new(2, rays.iter().map(|r| hs(r, int(-1))).collect()).unwrap()
    }

    fn unit_square() -> Polytope {
        Polytope::new(
            2,
            vec![hs(&[1, 0], int(0)), hs(&[-1, 0], int(-1)), hs(&[0, 1], int(0)), hs(&[0, -1], int(-1))],
        )
        .unwrap()
    }

    fn p2_triangle() -> Polytope {
        Polytope::new(2, vec![hs(&[1, 0], int(-1)), hs(&[0, 1], int(-1)), hs(&[-1, -1], int(-1))])
            .unwrap()
    }

    #[test]
    fn hexagon_vertices() {
        let v = hexagon().vertices().unwrap().to_vec();
        assert_eq!(v, ipts(&[(-1, 0), (0, -1), (1, -1), (1, 0), (0, 1), (-1, 1)]));
    }

    #[test]
    fn empty_interval() {
        let p = Polytope::new(1, vec![hs(&[1], int(1)), hs(&[-1], int(0))]).unwrap();
        assert!(p.vertices().unwrap().is_empty());
        assert_eq!(p.volume().unwrap(), int(0));
        assert!(p.lattice_points(1).unwrap().is_empty());
    }

    #[test]
    fn square_queries() {
        let sq = unit_square();
        assert_eq!(sq.vertices().unwrap(), &ipts(&[(0, 0), (1, 0), (0, 1), (1, 1)])[..]);
        assert_eq!(sq.volume().unwrap(), int(1));
        assert_eq!(sq.boundary_measure().unwrap(), int(4));
        assert_eq!(sq.barycenter().unwrap(), pt(&[(1, 2), (1, 2)]));
        assert_eq!(sq.lattice_points(1).unwrap().len(), 4);
    }

    #[test]
    fn hexagon_and_triangle_measures() {
        let h = hexagon();
        assert_eq!(h.volume().unwrap(), int(3));
        assert_eq!(h.boundary_measure().unwrap(), int(6));
        assert_eq!(h.barycenter().unwrap(), vec![int(0), int(0)]);
        assert_eq!(h.lattice_points(1).unwrap().len(), 7);

        let t = p2_triangle();
        assert_eq!(t.vertices().unwrap(), &ipts(&[(-1, -1), (2, -1), (-1, 2)])[..]);
        assert_eq!(t.volume().unwrap(), rat(9, 2));
        assert_eq!(t.boundary_measure().unwrap(), int(9));
        assert_eq!(t.barycenter().unwrap(), vec![int(0), int(0)]);
    }

    #[test]
    fn unbounded_is_reported() {
        let p = Polytope::new(2, vec![hs(&[1, 0], int(0)), hs(&[0, 1], int(0))]).unwrap();
        assert_eq!(p.vertices(), Err(Error::Unbounded));
        let strip = Polytope::new(2, vec![hs(&[1, 0], int(0)), hs(&[-1, 0], int(-1))]).unwrap();
        assert_eq!(strip.vertices(), Err(Error::Unbounded));
        assert_eq!(strip.lattice_points(1), Err(Error::Unbounded));
        let empty_strip =
            Polytope::new(2, vec![hs(&[1, 0], int(1)), hs(&[-1, 0], int(0))]).unwrap();
        assert!(empty_strip.vertices().unwrap().is_empty());
    }

    #[test]
    fn point_polytope() {
        let p = Polytope::new(
            2,
            vec![hs(&[1, 0], int(0)), hs(&[-1, 0], int(0)), hs(&[0, 1], int(0)), hs(&[0, -1], int(0))],
        )
        .unwrap();
        assert_eq!(p.vertices().unwrap(), &[vec![int(0), int(0)]][..]);
        assert_eq!(p.volume().unwrap(), int(0));
        assert_eq!(p.barycenter(), Err(Error::NotFullDimensional));
        assert_eq!(p.boundary_measure(), Err(Error::NotFullDimensional));
        for k in 1..4 {
            assert_eq!(p.lattice_points(k).unwrap(), vec![vec![int(0), int(0)]]);
        }
    }

    #[test]
    fn fixed_subpolytope_examples() {
        let sq = Polytope::new(
            2,
            vec![hs(&[1, 0], int(-1)), hs(&[-1, 0], int(-1)), hs(&[0, 1], int(-1)), hs(&[0, -1], int(-1))],
        )
        .unwrap();
        let minus = IntMatrix(vec![vec![-1, 0], vec![0, -1]]);
        let fixed = sq.fixed_subpolytope(&[minus]).unwrap();
        assert_eq!(fixed.vertices().unwrap(), &[vec![int(0), int(0)]][..]);

        let trivial = sq.fixed_subpolytope(&[IntMatrix::identity(2)]).unwrap();
        assert_eq!(trivial.vertices().unwrap(), sq.vertices().unwrap());

        let swap = IntMatrix(vec![vec![0, 1], vec![1, 0]]);
        let diag = sq.fixed_subpolytope(&[swap]).unwrap();
        assert_eq!(diag.vertices().unwrap(), &ipts(&[(-1, -1), (1, 1)])[..]);
        assert_eq!(diag.affine_dim().unwrap(), Some(1));
        assert_eq!(diag.volume().unwrap(), int(0));

        let rot = IntMatrix(vec![vec![0, -1], vec![1, -1]]);
        assert_eq!(unit_square().fixed_subpolytope(&[rot]), Err(Error::GroupDoesNotPreserve));
    }

    #[test]
    fn hexagon_rotation_fixes_origin_only() {
        let rot = IntMatrix(vec![vec![0, -1], vec![1, -1]]);
        let fixed = hexagon().fixed_subpolytope(&[rot]).unwrap();
        assert_eq!(fixed.vertices().unwrap(), &[vec![int(0), int(0)]][..]);
    }

    #[test]
    fn cube_volume_and_barycenter() {
        let mut h = Vec::new();
        for i in 0..3 {
            let mut e = vec![0; 3];
            e[i] = 1;
            h.push(hs(&e, int(0)));
            e[i] = -1;
            h.push(hs(&e, int(-2)));
        }
        let cube = Polytope::new(3, h).unwrap();
        assert_eq!(cube.vertices().unwrap().len(), 8);
        assert_eq!(cube.volume().unwrap(), int(8));
        assert_eq!(cube.barycenter().unwrap(), vec![int(1), int(1), int(1)]);
        assert_eq!(cube.lattice_points(1).unwrap().len(), 27);
    }

    #[test]
    fn simplex_3d() {
        let s = Polytope::new(
            3,
            vec![
                hs(&[1, 0, 0], int(0)),
                hs(&[0, 1, 0], int(0)),
                hs(&[0, 0, 1], int(0)),
                hs(&[-1, -1, -1], int(-1)),
            ],
        )
        .unwrap();
        assert_eq!(s.volume().unwrap(), rat(1, 6));
        assert_eq!(s.barycenter().unwrap(), vec![rat(1, 4); 3]);
    }

    #[test]
    fn non_primitive_normals_are_normalized() {
        let p = Polytope::new(1, vec![hs(&[2], int(1)), hs(&[-3], int(-3))]).unwrap();
        assert_eq!(p.hrep()[0], hs(&[1], rat(1, 2)));
        assert_eq!(p.hrep()[1], hs(&[-1], int(-1)));
        assert_eq!(p.volume().unwrap(), rat(1, 2));
        assert!(Polytope::new(1, vec![hs(&[0], int(1))]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let h = hexagon().eager().unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains("\"offset\":\"-1\""));
        let back: Polytope = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
        let bad = r#"{"hrep":[{"normal":[1],"offset":"0"},{"normal":[-1],"offset":"-1"}],"vrep":[["0"],["1/2"]]}"#;
        assert!(serde_json::from_str::<Polytope>(bad).is_err());
    }

    #[test]
    fn lattice_length_examples() {
        assert_eq!(lattice_length(&pt(&[(0, 1), (0, 1)]), &pt(&[(3, 1), (0, 1)])), int(3));
        assert_eq!(lattice_length(&pt(&[(0, 1), (0, 1)]), &pt(&[(2, 1), (4, 1)])), int(2));
        assert_eq!(lattice_length(&pt(&[(0, 1), (0, 1)]), &pt(&[(1, 2), (1, 3)])), rat(1, 6));
    }

    /// Random polygon from a few halfspaces around a box.
    fn arb_polygon() -> impl Strategy<Value = Polytope> {
        proptest::collection::vec(((-3i64..4, -3i64..4), (-6i64..1, 1i64..4)), 0..4).prop_map(
            |extra| {
                let mut h = vec![
                    hs(&[1, 0], int(-3)),
                    hs(&[-1, 0], int(-3)),
                    hs(&[0, 1], int(-3)),
                    hs(&[0, -1], int(-3)),
                ];
                for ((a, b), (p, q)) in extra {
                    if a != 0 || b != 0 {
                        h.push(hs(&[a, b], rat(p, q)));
                    }
                }
                Polytope::new(2, h).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn vertex_hrep_round_trip(p in arb_polygon()) {
            let verts = p.vertices().unwrap().to_vec();
            prop_assume!(affine_dim(&verts) == Some(2));
            let poly = p.polygon().unwrap();
            // rebuild from edges of the polygon
            let mut h = Vec::new();
            for i in 0..poly.len() {
                let (v, w) = (&poly[i], &poly[(i + 1) % poly.len()]);
                let d: Point = w.iter().zip(v).map(|(a, b)| a - b).collect();
                let l = lcm_denominators(d.iter());
                let ints: Vec<i64> = d.iter().map(|x| (x.numer() * (&l / x.denom())).to_i64().unwrap()).collect();
                // inward normal of a counterclockwise edge
                let normal = vec![-ints[1], ints[0]];
                h.push(Halfspace { offset: pair(v, &normal), normal });
            }
            let rebuilt = Polytope::new(2, h).unwrap();
            prop_assert_eq!(rebuilt.vertices().unwrap(), &verts[..]);
        }

        #[test]
        fn volume_translation_and_scaling(p in arb_polygon(), tx in -5i64..5, ty in 1i64..4, s in 1i64..5, q in 1i64..4) {
            let vol = p.volume().unwrap();
            let t = vec![rat(tx, ty), rat(ty, 3)];
            prop_assert_eq!(p.translate(&t).volume().unwrap(), vol.clone());
            let f = rat(s, q);
            prop_assert_eq!(p.scale(&f).unwrap().volume().unwrap(), &vol * &f * &f);
        }

        #[test]
        fn unimodular_invariance(p in arb_polygon(), a in -2i64..3, b in -2i64..3) {
            prop_assume!(p.affine_dim().unwrap() == Some(2));
            // shear then swap: always unimodular
            let g = IntMatrix(vec![vec![1, a], vec![0, 1]])
                .mul(&IntMatrix(vec![vec![0, 1], vec![1, 0]]))
                .mul(&IntMatrix(vec![vec![1, 0], vec![b, 1]]));
            let img = p.linear_image(&g).unwrap();
            prop_assert_eq!(img.volume().unwrap(), p.volume().unwrap());
            prop_assert_eq!(img.boundary_measure().unwrap(), p.boundary_measure().unwrap());
            let mapped: BTreeSet<Point> = p.vertices().unwrap().iter().map(|v| g.apply_rational(v)).collect();
            let got: BTreeSet<Point> = img.vertices().unwrap().iter().cloned().collect();
            prop_assert_eq!(got, mapped);
        }

        #[test]
        fn lattice_count_monotone_when_containing_origin(p in arb_polygon()) {
            prop_assume!(p.contains(&[int(0), int(0)]));
            let counts: Vec<usize> = (1..4).map(|k| p.lattice_points(k).unwrap().len()).collect();
            prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn fixed_by_trivial_group_is_identity(p in arb_polygon()) {
            let f = p.fixed_subpolytope(&[IntMatrix::identity(2)]).unwrap();
            prop_assert_eq!(f.vertices().unwrap(), p.vertices().unwrap());
        }
    }
}
