//! Picard lattice of the plane blown up at `r <= 8` general points.
//!
//! Classes are written `d H - sum m_i E_i` and stored as `(d; m_1..m_r)`.
//! Ampleness is tested against the (-1)-curves, which generate the cone of
//! curves for `r >= 2`; for `r = 1` the ruling `H - E_1` is added.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;

pub const MAX_POINTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PicardJson {
    pub r: usize,
    pub coords: Vec<Rational>,
}

/// `d H - sum m_i E_i` on the blowup at `r` points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "PicardJson", into = "PicardJson")]
pub struct PicardClass {
    r: usize,
    coords: Vec<Rational>,
}

impl TryFrom<PicardJson> for PicardClass {
    type Error = Error;
    fn try_from(j: PicardJson) -> Result<Self> {
        PicardClass::new(j.r, j.coords)
    }
}

impl From<PicardClass> for PicardJson {
    fn from(c: PicardClass) -> Self {
        PicardJson { r: c.r, coords: c.coords }
    }
}

fn check_r(r: usize) -> Result<()> {
    if (1..=MAX_POINTS).contains(&r) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("number of points must be in 1..=8, got {r}")))
    }
}

/// The blowup of the plane at `r` general points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupSurface {
    r: usize,
}

impl BlowupSurface {
    pub fn new(r: usize) -> Result<Self> {
        check_r(r)?;
        Ok(BlowupSurface { r })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn class(&self, coords: Vec<Rational>) -> Result<PicardClass> {
        PicardClass::new(self.r, coords)
    }

    pub fn hyperplane(&self) -> PicardClass {
        let mut c = vec![Rational::zero(); self.r + 1];
        c[0] = Rational::one();
        PicardClass { r: self.r, coords: c }
    }

    /// `E_i`, indexed from 1.
    pub fn exceptional(&self, i: usize) -> Result<PicardClass> {
        if i == 0 || i > self.r {
            return Err(Error::InvalidInput(format!("no exceptional divisor E_{i}")));
        }
        let mut c = vec![Rational::zero(); self.r + 1];
        c[i] = Rational::from(-1);
        Ok(PicardClass { r: self.r, coords: c })
    }

    /// `K = -3H + sum E_i`
    pub fn canonical(&self) -> PicardClass {
        let mut c = vec![Rational::from(-1); self.r + 1];
        c[0] = Rational::from(-3);
        PicardClass { r: self.r, coords: c }
    }

    pub fn anticanonical(&self) -> PicardClass {
        self.canonical().scale(&Rational::from(-1))
    }
}

impl PicardClass {
    pub fn new(r: usize, coords: Vec<Rational>) -> Result<Self> {
        check_r(r)?;
        if coords.len() != r + 1 {
            return Err(Error::DimensionMismatch { expected: r + 1, got: coords.len() });
        }
        Ok(PicardClass { r, coords })
    }

    pub fn from_integers(d: i64, m: &[i64]) -> Result<Self> {
        let mut coords = vec![Rational::from(d)];
        coords.extend(m.iter().map(|&x| Rational::from(x)));
        PicardClass::new(m.len(), coords)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn degree(&self) -> &Rational {
        &self.coords[0]
    }

    pub fn pairing(&self, other: &PicardClass) -> Result<Rational> {
        if self.r != other.r {
            return Err(Error::DimensionMismatch { expected: self.coords.len(), got: other.coords.len() });
        }
        let mut s = &self.coords[0] * &other.coords[0];
        for (a, b) in self.coords[1..].iter().zip(&other.coords[1..]) {
            s -= &(a * b);
        }
        Ok(s)
    }

    pub fn self_intersection(&self) -> Rational {
        self.pairing(self).expect("same surface")
    }

    pub fn scale(&self, t: &Rational) -> PicardClass {
        PicardClass { r: self.r, coords: self.coords.iter().map(|x| x * t).collect() }
    }

    /// `x self + y other`
    pub fn combine(&self, x: &Rational, other: &PicardClass, y: &Rational) -> Result<PicardClass> {
        if self.r != other.r {
            return Err(Error::DimensionMismatch { expected: self.coords.len(), got: other.coords.len() });
        }
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| x * a + y * b).collect();
        Ok(PicardClass { r: self.r, coords })
    }

    /// Apply a permutation of the points: `E_i -> E_{perm[i]}` (0-based).
    pub fn permute_points(&self, perm: &[usize]) -> Result<PicardClass> {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.r).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("not a permutation of the points".into()));
        }
        let mut coords = self.coords.clone();
        for (i, &j) in perm.iter().enumerate() {
            coords[j + 1] = self.coords[i + 1].clone();
        }
        Ok(PicardClass { r: self.r, coords })
    }
}

/// Nonincreasing multiplicity vectors of length `r` with the given sum and
/// sum of squares.
fn sorted_multiplicities(r: usize, sum: i64, squares: i64, cap: i64) -> Vec<Vec<i64>> {
    fn rec(left: usize, sum: i64, squares: i64, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            if sum == 0 && squares == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if sum < 0 || squares < 0 || sum > cap * left as i64 {
            return;
        }
        for m in (0..=cap.min(sum)).rev() {
            if m * m > squares {
                continue;
            }
            cur.push(m);
            rec(left - 1, sum - m, squares - m * m, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(r, sum, squares, cap, &mut Vec::new(), &mut out);
    out
}

fn distinct_permutations(v: &[i64]) -> BTreeSet<Vec<i64>> {
    fn rec(rest: &mut Vec<i64>, cur: &mut Vec<i64>, out: &mut BTreeSet<Vec<i64>>) {
        if rest.is_empty() {
            out.insert(cur.clone());
            return;
        }
        let mut tried = BTreeSet::new();
        for i in 0..rest.len() {
            if !tried.insert(rest[i]) {
                continue;
            }
            let x = rest.remove(i);
            cur.push(x);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = BTreeSet::new();
    rec(&mut v.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Integral classes with `C.C = -1` and `C.K = -1` of degree `d >= 1`.
fn curves_of_degree(r: usize, d: i64) -> Vec<PicardClass> {
    let mut out = Vec::new();
    for sorted in sorted_multiplicities(r, 3 * d - 1, d * d + 1, d) {
        for m in distinct_permutations(&sorted) {
            out.push(PicardClass::from_integers(d, &m).expect("valid r"));
        }
    }
    out
}

fn enumerate(r: usize) -> Vec<PicardClass> {
    let s = BlowupSurface { r };
    let mut out: Vec<PicardClass> = (1..=r).map(|i| s.exceptional(i).expect("in range")).collect();
    for d in 1..=6 {
        out.extend(curves_of_degree(r, d));
    }
    assert!(curves_of_degree(r, 7).is_empty(), "exceptional class of degree 7");
    out.sort();
    out
}

static CURVES: [OnceLock<Vec<PicardClass>>; MAX_POINTS] = [const { OnceLock::new() }; MAX_POINTS];

/// All (-1)-curves, sorted; computed once per `r`.
pub fn exceptional_curves(r: usize) -> Result<&'static [PicardClass]> {
    check_r(r)?;
    Ok(CURVES[r - 1].get_or_init(|| enumerate(r)))
}

/// Number of (-1)-curves of each degree `0..=6`.
pub fn census(r: usize) -> Result<[usize; 7]> {
    let mut counts = [0; 7];
    for c in exceptional_curves(r)? {
        let d = c.degree().to_i64().expect("integral degree") as usize;
        counts[d] += 1;
    }
    Ok(counts)
}

/// Curves whose classes span the cone of curves.
pub fn test_curves(r: usize) -> Result<Vec<PicardClass>> {
    let mut out = exceptional_curves(r)?.to_vec();
    if r == 1 {
        out.push(PicardClass::from_integers(1, &[1]).expect("valid"));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Positivity {
    pub ample: bool,
    pub nef: bool,
    /// Smallest pairing with a test curve.
    pub min_curve_pairing: Rational,
    pub self_intersection: Rational,
    /// The curve pairings alone would have decided differently.
    pub nakai_binds: bool,
}

pub fn positivity(d: &PicardClass) -> Positivity {
    let curves = test_curves(d.r()).expect("class has valid r");
    let min = curves
        .iter()
        .map(|c| d.pairing(c).expect("same r"))
        .reduce(Rational::min)
        .expect("at least one curve");
    let sq = d.self_intersection();
    let curves_ample = min.is_positive();
    let curves_nef = !min.is_negative();
    let ample = curves_ample && sq.is_positive();
    let nef = curves_nef && !sq.is_negative();
    Positivity {
        nakai_binds: ample != curves_ample || nef != curves_nef,
        ample,
        nef,
        min_curve_pairing: min,
        self_intersection: sq,
    }
}

pub fn is_ample_picard(d: &PicardClass) -> bool {
    positivity(d).ample
}

pub fn is_nef_picard(d: &PicardClass) -> bool {
    positivity(d).nef
}

/// `L_lambda = 3H - E_1 - ... - E_7 - lambda E_8` on the blowup at 8 points.
pub fn dp1_family(lambda: &Rational) -> PicardClass {
    let mut coords = vec![Rational::from(3)];
    coords.extend((0..7).map(|_| Rational::one()));
    coords.push(lambda.clone());
    PicardClass { r: 8, coords }
}
