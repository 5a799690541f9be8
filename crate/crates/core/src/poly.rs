//! Univariate polynomials over `F_q` with an explicit degree bound, the
//! evaluation map, and Lagrange interpolation.

use std::fmt;

use thiserror::Error;

use crate::gf::{Field, FieldElement, GfError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("evaluation points are not pairwise distinct (value {0} repeats)")]
    DuplicatePoint(u32),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("polynomial of degree {degree} does not fit degree bound {bound}")]
    BoundTooSmall { degree: usize, bound: usize },
}

pub type Result<T> = std::result::Result<T, PolyError>;

/// `c_1 + c_2 x + ... + c_k x^{k-1}` with a fixed coefficient count `k`.
///
/// Coefficients are stored ascending; `coeffs()[0]` is `c_1`.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    coeffs: Vec<u32>,
}

impl Polynomial {
    pub fn new(field: &Field, coeffs: Vec<u32>) -> Result<Polynomial> {
        for &c in &coeffs {
            field.check(c)?;
        }
        Ok(Polynomial { field: field.clone(), coeffs })
    }

    pub fn from_elements(field: &Field, coeffs: &[FieldElement]) -> Result<Polynomial> {
        let mut out = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            field.same_field(c.field())?;
            out.push(c.value());
        }
        Ok(Polynomial { field: field.clone(), coeffs: out })
    }

    pub(crate) fn from_raw(field: &Field, coeffs: Vec<u32>) -> Polynomial {
        Polynomial { field: field.clone(), coeffs }
    }

    pub fn zero(field: &Field, bound: usize) -> Polynomial {
        Polynomial { field: field.clone(), coeffs: vec![0; bound] }
    }

    pub fn constant(field: &Field, value: u32, bound: usize) -> Result<Polynomial> {
        field.check(value)?;
        let mut coeffs = vec![0; bound.max(1)];
        coeffs[0] = value;
        Ok(Polynomial { field: field.clone(), coeffs })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u32> {
        self.coeffs
    }

    /// One-based coefficient access: `c(1)` is the constant term.
    pub fn c(&self, i: usize) -> u32 {
        self.coeffs[i - 1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Pads with zeros or drops trailing zeros to reach `bound` coefficients.
    pub fn with_bound(mut self, bound: usize) -> Result<Polynomial> {
        if let Some(d) = self.degree() {
            if d >= bound {
                return Err(PolyError::BoundTooSmall { degree: d, bound });
            }
        }
        self.coeffs.resize(bound, 0);
        Ok(self)
    }

    /// Horner evaluation at a raw field value.
    #[inline]
    pub fn eval(&self, x: u32) -> u32 {
        let f = &self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn evaluate(&self, x: &FieldElement) -> Result<FieldElement> {
        self.field.same_field(x.field())?;
        Ok(self.field.element(self.eval(x.value()))?)
    }

    /// `(f(a_1), ..., f(a_n))` over the given points.
    pub fn ev_map(&self, pts: &PointSet) -> Result<Vec<u32>> {
        self.field.same_field(pts.field())?;
        Ok(pts.values().iter().map(|&x| self.eval(x)).collect())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.field.same_field(&other.field)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                self.field.add(a, b)
            })
            .collect();
        Ok(Polynomial { field: self.field.clone(), coeffs })
    }

    pub fn scale(&self, a: u32) -> Polynomial {
        let coeffs = self.coeffs.iter().map(|&c| self.field.mul(a, c)).collect();
        Polynomial { field: self.field.clone(), coeffs }
    }

    /// Product with degree bound `self.bound + other.bound - 1`.
    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.field.same_field(&other.field)?;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(Polynomial::zero(&self.field, 0));
        }
        let f = &self.field;
        let mut coeffs = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Ok(Polynomial { field: f.clone(), coeffs })
    }

    /// `x^shift * f(x)`, degree bound grows by `shift`.
    pub fn shift(&self, shift: usize) -> Polynomial {
        let mut coeffs = vec![0; shift];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial { field: self.field.clone(), coeffs }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.field, self)
    }
}

/// Comma-separated ascending coefficients.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Ordered, pairwise-distinct evaluation points.
#[derive(Clone, PartialEq, Eq)]
pub struct PointSet {
    field: Field,
    points: Vec<u32>,
}

impl PointSet {
    pub fn new(field: &Field, points: Vec<u32>) -> Result<PointSet> {
        let mut seen = vec![false; field.order() as usize];
        for &x in &points {
            field.check(x)?;
            if std::mem::replace(&mut seen[x as usize], true) {
                return Err(PolyError::DuplicatePoint(x));
            }
        }
        Ok(PointSet { field: field.clone(), points })
    }

    pub fn from_elements(field: &Field, points: &[FieldElement]) -> Result<PointSet> {
        for p in points {
            field.same_field(p.field())?;
        }
        PointSet::new(field, points.iter().map(|p| p.value()).collect())
    }

    pub fn empty(field: &Field) -> PointSet {
        PointSet { field: field.clone(), points: Vec::new() }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn values(&self) -> &[u32] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in the given index order (indices must be distinct).
    pub fn select(&self, indices: &[usize]) -> Result<PointSet> {
        let mut pts = Vec::with_capacity(indices.len());
        for &i in indices {
            let x = *self
                .points
                .get(i)
                .ok_or(PolyError::IndexOutOfRange { index: i, len: self.points.len() })?;
            pts.push(x);
        }
        PointSet::new(&self.field, pts)
    }

    /// `self` followed by `other`; fails if the union has repeats.
    pub fn concat(&self, other: &PointSet) -> Result<PointSet> {
        self.field.same_field(&other.field)?;
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        PointSet::new(&self.field, pts)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.points)
    }
}

/// `ℓ_i(x) = ∏_{j≠i} (x - a_j) / (a_i - a_j)`, degree bound `|pts|`.
pub fn lagrange_basis(pts: &PointSet, i: usize) -> Result<Polynomial> {
    let n = pts.len();
    if i >= n {
        return Err(PolyError::IndexOutOfRange { index: i, len: n });
    }
    let f = pts.field();
    let a = pts.values();
    let mut num = vec![1u32];
    let mut denom = 1u32;
    for (j, &aj) in a.iter().enumerate() {
        if j == i {
            continue;
        }
        // num *= (x - a_j)
        let mut next = vec![0u32; num.len() + 1];
        for (d, &c) in num.iter().enumerate() {
            next[d + 1] = f.add(next[d + 1], c);
            next[d] = f.sub(next[d], f.mul(c, aj));
        }
        num = next;
        denom = f.mul(denom, f.sub(a[i], aj));
    }
    let scale = f.inv(denom)?;
    let coeffs = num.into_iter().map(|c| f.mul(c, scale)).collect();
    Ok(Polynomial::from_raw(f, coeffs))
}

/// Precomputed Lagrange basis for repeated interpolation over one point set.
#[derive(Clone)]
pub struct Interpolator {
    pts: PointSet,
    basis: Vec<Vec<u32>>,
}

impl Interpolator {
    pub fn new(pts: &PointSet) -> Result<Interpolator> {
        let basis = (0..pts.len())
            .map(|i| lagrange_basis(pts, i).map(Polynomial::into_coeffs))
            .collect::<Result<Vec<_>>>()?;
        Ok(Interpolator { pts: pts.clone(), basis })
    }

    pub fn points(&self) -> &PointSet {
        &self.pts
    }

    /// Unique polynomial of degree bound `|pts|` through the values.
    pub fn interpolate_raw(&self, values: &[u32]) -> Polynomial {
        debug_assert_eq!(values.len(), self.basis.len());
        let f = self.pts.field();
        let mut coeffs = vec![0u32; self.basis.len()];
        for (&v, ell) in values.iter().zip(&self.basis) {
            if v == 0 {
                continue;
            }
            for (c, &b) in coeffs.iter_mut().zip(ell) {
                *c = f.add(*c, f.mul(v, b));
            }
        }
        Polynomial::from_raw(f, coeffs)
    }

    pub fn interpolate(&self, values: &[u32]) -> Result<Polynomial> {
        if values.len() != self.basis.len() {
            return Err(PolyError::LengthMismatch { expected: self.basis.len(), got: values.len() });
        }
        for &v in values {
            self.pts.field().check(v)?;
        }
        Ok(self.interpolate_raw(values))
    }
}

pub fn lagrange_interpolate(pts: &PointSet, values: &[u32]) -> Result<Polynomial> {
    Interpolator::new(pts)?.interpolate(values)
}
