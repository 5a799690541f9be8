//! Reduced density matrices with exact entries.
//!
//! Storage is sparse (only nonzero entries) but the nominal shape is the
//! full `q^{|subset|} × q^{|subset|}`; reduced states of these encoders have
//! at most `q^{2(k-L)}` nonzero entries whatever the kept subset.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use super::amplitude::{self, ComplexRational, Rational};
use super::{Result, StateError};
use crate::gf::Field;

#[derive(Clone, PartialEq, Eq)]
pub struct DensityMatrix {
    field: Field,
    subset: Vec<usize>,
    dim: u64,
    entries: BTreeMap<(u64, u64), ComplexRational>,
}

impl DensityMatrix {
    pub(crate) fn from_sparse(field: &Field, subset: Vec<usize>, dim: u64, entries: BTreeMap<(u64, u64), ComplexRational>) -> DensityMatrix {
        DensityMatrix { field: field.clone(), subset, dim, entries }
    }

    /// `I / q^{|subset|}`.
    pub fn maximally_mixed(field: &Field, subset: Vec<usize>, cap: u64) -> Result<DensityMatrix> {
        let dim = (field.order() as u64).checked_pow(subset.len() as u32).unwrap_or(u64::MAX);
        if dim > cap {
            return Err(StateError::CapExceeded(format!("dimension {dim} (cap {cap})")));
        }
        let w = ComplexRational::new(Rational::new(1.into(), dim.into()), Rational::zero());
        let entries = (0..dim).map(|i| ((i, i), w.clone())).collect();
        Ok(DensityMatrix { field: field.clone(), subset, dim, entries })
    }

    /// Builds from a dense row-major entry list (zeros dropped).
    pub fn from_dense(field: &Field, subset: Vec<usize>, dim: u64, dense: Vec<ComplexRational>) -> Result<DensityMatrix> {
        if dense.len() as u64 != dim * dim {
            return Err(StateError::Shape(format!("{} entries for dimension {dim}", dense.len())));
        }
        let entries = dense
            .into_iter()
            .enumerate()
            .filter(|(_, z)| !amplitude::is_zero(z))
            .map(|(i, z)| ((i as u64 / dim, i as u64 % dim), z))
            .collect();
        Ok(DensityMatrix { field: field.clone(), subset, dim, entries })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (&(u64, u64), &ComplexRational)> {
        self.entries.iter()
    }

    pub fn get(&self, row: u64, col: u64) -> ComplexRational {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(ComplexRational::zero)
    }

    pub fn trace(&self) -> ComplexRational {
        self.entries
            .iter()
            .filter(|((i, j), _)| i == j)
            .fold(ComplexRational::zero(), |acc, (_, z)| acc + z)
    }

    pub fn is_hermitian(&self) -> bool {
        self.entries.iter().all(|(&(i, j), z)| self.get(j, i) == z.conj())
    }

    /// Necessary conditions for positive semidefiniteness: real
    /// non-negative diagonal and non-negative 2×2 principal minors.
    pub fn passes_psd_spot_check(&self) -> bool {
        let diag = |i: u64| self.get(i, i);
        for (&(i, j), z) in &self.entries {
            if i == j {
                if !z.im.is_zero() || z.re.is_negative() {
                    return false;
                }
            } else {
                let minor = diag(i).re * diag(j).re - amplitude::modulus_sq(z);
                if minor.is_negative() {
                    return false;
                }
            }
        }
        true
    }

    /// Exact equality; errors when the shapes differ.
    pub fn exact_eq(&self, other: &DensityMatrix) -> Result<bool> {
        if self.dim != other.dim || self.subset.len() != other.subset.len() {
            return Err(StateError::Shape(format!("dimension {} vs {}", self.dim, other.dim)));
        }
        self.field.same_field(&other.field)?;
        Ok(self.entries == other.entries)
    }

    /// `Tr(self · other)`; zero exactly when the supports are orthogonal
    /// (for positive semidefinite operands).
    pub fn trace_product(&self, other: &DensityMatrix) -> Result<ComplexRational> {
        if self.dim != other.dim {
            return Err(StateError::Shape(format!("dimension {} vs {}", self.dim, other.dim)));
        }
        Ok(self.entries.iter().fold(ComplexRational::zero(), |acc, (&(i, j), z)| match other.entries.get(&(j, i)) {
            Some(w) => acc + z * w,
            None => acc,
        }))
    }

    /// Uniform mixture `(ρ_1 + ... + ρ_m) / m`.
    pub fn mixture(parts: &[DensityMatrix]) -> Result<DensityMatrix> {
        let first = parts.first().ok_or_else(|| StateError::Shape("empty mixture".into()))?;
        let mut entries: BTreeMap<(u64, u64), ComplexRational> = BTreeMap::new();
        for p in parts {
            if p.dim != first.dim {
                return Err(StateError::Shape(format!("dimension {} vs {}", first.dim, p.dim)));
            }
            first.field.same_field(&p.field)?;
            for (k, z) in &p.entries {
                super::accumulate(&mut entries, *k, z.clone());
            }
        }
        let m = ComplexRational::new(Rational::from_integer((parts.len() as i64).into()), Rational::zero());
        let entries = entries.into_iter().map(|(k, z)| (k, z / &m)).collect();
        Ok(DensityMatrix { field: first.field.clone(), subset: first.subset.clone(), dim: first.dim, entries })
    }

    fn dense(&self, cap: u64) -> Result<Vec<Vec<ComplexRational>>> {
        if self.dim > cap {
            return Err(StateError::CapExceeded(format!("dense dimension {} (cap {cap})", self.dim)));
        }
        let n = self.dim as usize;
        let mut m = vec![vec![ComplexRational::zero(); n]; n];
        for (&(i, j), z) in &self.entries {
            m[i as usize][j as usize] = z.clone();
        }
        Ok(m)
    }

    /// Coefficients `[c_1, ..., c_d]` of `det(λI - ρ) = λ^d + c_1 λ^{d-1} + ... + c_d`
    /// via Faddeev–LeVerrier in exact arithmetic.
    pub fn characteristic_coefficients(&self, cap: u64) -> Result<Vec<ComplexRational>> {
        let a = self.dense(cap)?;
        let n = a.len();
        let identity_scaled = |m: &mut Vec<Vec<ComplexRational>>, c: &ComplexRational| {
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = &row[i] + c;
            }
        };
        let mut coeffs = Vec::with_capacity(n);
        // M_0 = 0, c_0 = 1; M_k = A·M_{k-1} + c_{k-1} I; c_k = -tr(A·M_k)/k
        let mut m: Vec<Vec<ComplexRational>> = vec![vec![ComplexRational::zero(); n]; n];
        let mut prev_c = ComplexRational::one();
        for k in 1..=n {
            let mut next = sparse_mul(&a, &m);
            identity_scaled(&mut next, &prev_c);
            let am = sparse_mul(&a, &next);
            let tr = (0..n).fold(ComplexRational::zero(), |acc, i| acc + &am[i][i]);
            let c = -tr / ComplexRational::new(Rational::from_integer((k as i64).into()), Rational::zero());
            coeffs.push(c.clone());
            prev_c = c;
            m = next;
        }
        Ok(coeffs)
    }

    /// Row-major text block: header `dm dim=<d>` then one line per row of
    /// space-separated `re im` pairs.
    pub fn to_text(&self) -> String {
        let mut out = format!("dm dim={}\n", self.dim);
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{} {}", amplitude::format_rational(&z.re), amplitude::format_rational(&z.im))
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn from_text(field: &Field, subset: Vec<usize>, text: &str) -> Result<DensityMatrix> {
        let bad = |m: &str| StateError::Parse(format!("density block: {m}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let dim: u64 = header
            .trim()
            .strip_prefix("dm dim=")
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| bad("bad header"))?;
        let mut dense = Vec::with_capacity((dim * dim) as usize);
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() as u64 != 2 * dim {
                return Err(bad("row width"));
            }
            for pair in parts.chunks(2) {
                let re = amplitude::parse_rational(pair[0]).ok_or_else(|| bad("entry"))?;
                let im = amplitude::parse_rational(pair[1]).ok_or_else(|| bad("entry"))?;
                dense.push(ComplexRational::new(re, im));
            }
        }
        DensityMatrix::from_dense(field, subset, dim, dense)
    }
}

impl std::fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DensityMatrix(subset={:?}, dim={}, nnz={})", self.subset, self.dim, self.entries.len())
    }
}

/// Dense product that skips zero entries of the left factor.
fn sparse_mul(a: &[Vec<ComplexRational>], b: &[Vec<ComplexRational>]) -> Vec<Vec<ComplexRational>> {
    let n = a.len();
    let mut out = vec![vec![ComplexRational::zero(); n]; n];
    for i in 0..n {
        for l in 0..n {
            let x = &a[i][l];
            if amplitude::is_zero(x) {
                continue;
            }
            for j in 0..n {
                let y = &b[l][j];
                if !amplitude::is_zero(y) {
                    out[i][j] = &out[i][j] + x * y;
                }
            }
        }
    }
    out
}
