//! Exact sparse pure states over qudit registers labeled by `F_q`.
//!
//! A state stores integer-free exact amplitudes together with a symbolic
//! normalization: the physical amplitude of ket `|v⟩` is
//! `amp(v) / sqrt(q^scale_exp · norm_div)`. Encoder outputs keep
//! `norm_div = 1` and put the whole `q^{-(k-L)/2}` factor in `scale_exp`;
//! superposed secrets with arbitrary rational weights use `norm_div`.

pub mod amplitude;
pub mod basis_map;
pub mod density;
pub mod format;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Deref;

use num_traits::{One, Zero};
use smallvec::SmallVec;
use thiserror::Error;

use crate::gf::{Field, FieldElement, GfError};
pub use amplitude::{ComplexRational, Rational};
pub use basis_map::{BasisMap, FnMap, PermutationMap, Tuple, Verification, VerifiedMap};
pub use density::DensityMatrix;

/// Default bound on enumerated tuples / kets.
pub const DEFAULT_KET_CAP: u64 = 1 << 22;
/// Default bound on the dimension `q^{|keep|}` of a reduced state.
pub const DEFAULT_DM_CAP: u64 = 6561;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("register count mismatch: {0} vs {1}")]
    RegisterMismatch(usize, usize),
    #[error("register index {index} out of range for {registers} registers")]
    RegisterOutOfRange { index: usize, registers: usize },
    #[error("register {0} selected twice")]
    DuplicateRegister(usize),
    #[error("the zero vector cannot be normalized")]
    ZeroState,
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(String),
    #[error("global scales differ by an irrational factor and cannot be combined exactly")]
    IncommensurateScales,
    #[error("basis map is not bijective: {0}")]
    NotBijective(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("malformed state text: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, StateError>;

/// Computational-basis label: one canonical field value per register.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BasisIndex(pub Tuple);

impl BasisIndex {
    pub fn from_slice(v: &[u32]) -> BasisIndex {
        BasisIndex(SmallVec::from_slice(v))
    }
}

impl Deref for BasisIndex {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Debug for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0[..])
    }
}

impl From<Vec<u32>> for BasisIndex {
    fn from(v: Vec<u32>) -> BasisIndex {
        BasisIndex(SmallVec::from_vec(v))
    }
}

#[derive(Clone)]
pub struct SparseState {
    field: Field,
    registers: usize,
    amps: BTreeMap<BasisIndex, ComplexRational>,
    scale_exp: u32,
    norm_div: Rational,
}

impl SparseState {
    /// Builds a state from raw parts, summing repeated kets and dropping
    /// zero amplitudes.
    pub fn from_parts<I>(field: &Field, registers: usize, kets: I, scale_exp: u32, norm_div: Rational) -> Result<SparseState>
    where
        I: IntoIterator<Item = (BasisIndex, ComplexRational)>,
    {
        if norm_div <= Rational::zero() {
            return Err(StateError::Parse("normalization divisor must be positive".into()));
        }
        let mut amps: BTreeMap<BasisIndex, ComplexRational> = BTreeMap::new();
        for (idx, a) in kets {
            if idx.len() != registers {
                return Err(StateError::RegisterMismatch(idx.len(), registers));
            }
            for &v in idx.iter() {
                field.check(v)?;
            }
            accumulate(&mut amps, idx, a);
        }
        Ok(SparseState { field: field.clone(), registers, amps, scale_exp, norm_div })
    }

    /// Trusted construction for encoder hot paths: kets distinct, values in range.
    pub(crate) fn from_distinct_unit_kets(field: &Field, registers: usize, kets: impl IntoIterator<Item = BasisIndex>, scale_exp: u32) -> SparseState {
        let amps = kets.into_iter().map(|k| (k, amplitude::one())).collect();
        SparseState { field: field.clone(), registers, amps, scale_exp, norm_div: Rational::one() }
    }

    /// `|v_1⟩ ⊗ ... ⊗ |v_n⟩` with amplitude 1.
    pub fn basis(field: &Field, values: &[u32]) -> Result<SparseState> {
        SparseState::from_parts(field, values.len(), [(BasisIndex::from_slice(values), amplitude::one())], 0, Rational::one())
    }

    pub fn basis_state(field: &Field, values: &[FieldElement]) -> Result<SparseState> {
        let mut raw = Vec::with_capacity(values.len());
        for v in values {
            field.same_field(v.field())?;
            raw.push(v.value());
        }
        SparseState::basis(field, &raw)
    }

    /// `q^{-count/2} Σ_r |r⟩ ⊗ |r⟩` over `r ∈ F_q^count`: `2·count` registers,
    /// the first `count` holding one half of every pair.
    pub fn uniform_resource(field: &Field, count: usize, cap: u64) -> Result<SparseState> {
        let kets = (field.order() as u64).checked_pow(count as u32).unwrap_or(u64::MAX);
        if kets > cap {
            return Err(StateError::CapExceeded(format!("resource state needs {kets} kets (cap {cap})")));
        }
        let iter = field.tuples(count).map(|r| {
            let mut idx = r.clone();
            idx.extend_from_slice(&r);
            BasisIndex(idx)
        });
        Ok(SparseState::from_distinct_unit_kets(field, 2 * count, iter, count as u32))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn registers(&self) -> usize {
        self.registers
    }

    pub fn scale_exp(&self) -> u32 {
        self.scale_exp
    }

    pub fn norm_div(&self) -> &Rational {
        &self.norm_div
    }

    /// Number of stored (nonzero) kets.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&BasisIndex, &ComplexRational)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, idx: &[u32]) -> Option<&ComplexRational> {
        self.amps.get(&BasisIndex::from_slice(idx))
    }

    /// Kets with nonzero amplitude, sorted.
    pub fn support(&self) -> impl Iterator<Item = &BasisIndex> {
        self.amps.keys()
    }

    /// `q^scale_exp · norm_div`: the squared reciprocal of the global factor.
    pub fn global_divisor(&self) -> Rational {
        amplitude::power_of(self.field.order(), self.scale_exp) * &self.norm_div
    }

    pub fn squared_norm(&self) -> Rational {
        total_weight(self.amps.values()) / self.global_divisor()
    }

    /// Encoded basis states have `q^scale_exp` unit kets; recognizing them
    /// avoids big-rational arithmetic on hot paths.
    fn is_uniform_unit(&self) -> bool {
        let one = amplitude::one();
        self.norm_div.is_one()
            && (self.field.order() as u128).checked_pow(self.scale_exp) == Some(self.amps.len() as u128)
            && self.amps.values().all(|a| *a == one)
    }

    pub fn is_normalized(&self) -> bool {
        self.is_uniform_unit() || self.squared_norm().is_one()
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.is_uniform_unit() {
            return Ok(());
        }
        let n = self.squared_norm();
        if n.is_one() {
            Ok(())
        } else {
            Err(StateError::NotNormalized(amplitude::format_rational(&n)))
        }
    }

    /// Rescales the global factor so the squared norm becomes 1. Amplitudes
    /// are untouched.
    pub fn normalized(&self) -> Result<SparseState> {
        if self.amps.is_empty() {
            return Err(StateError::ZeroState);
        }
        if self.is_normalized() {
            return Ok(self.clone());
        }
        let total = total_weight(self.amps.values());
        let (scale_exp, norm_div) = match amplitude::log_exact(&total, self.field.order()) {
            Some(e) => (e, Rational::one()),
            None => (0, total),
        };
        Ok(SparseState { scale_exp, norm_div, ..self.clone() })
    }

    /// Tensor product; registers of `other` follow those of `self`.
    pub fn tensor(&self, other: &SparseState) -> Result<SparseState> {
        self.field.same_field(&other.field)?;
        let one = amplitude::one();
        let mut amps = BTreeMap::new();
        for (a, x) in &self.amps {
            for (b, y) in &other.amps {
                let mut idx = a.0.clone();
                idx.extend_from_slice(b);
                let xy = if *x == one {
                    y.clone()
                } else if *y == one {
                    x.clone()
                } else {
                    x * y
                };
                amps.insert(BasisIndex(idx), xy);
            }
        }
        Ok(SparseState {
            field: self.field.clone(),
            registers: self.registers + other.registers,
            amps,
            scale_exp: self.scale_exp + other.scale_exp,
            norm_div: if other.norm_div.is_one() { self.norm_div.clone() } else { &self.norm_div * &other.norm_div },
        })
    }

    /// `Σ_t coeff_t · state_t` in exact arithmetic. The result carries the
    /// global factor of the first term; the others are rescaled onto it,
    /// which requires their factors to differ by a rational. The result is
    /// not renormalized.
    pub fn superpose(terms: &[(ComplexRational, &SparseState)]) -> Result<SparseState> {
        let (_, first) = terms.first().ok_or(StateError::ZeroState)?;
        let base = first.global_divisor();
        let mut amps = BTreeMap::new();
        for (coeff, state) in terms {
            first.field.same_field(&state.field)?;
            if state.registers != first.registers {
                return Err(StateError::RegisterMismatch(first.registers, state.registers));
            }
            let ratio = amplitude::rational_sqrt(&(&base / state.global_divisor()))
                .ok_or(StateError::IncommensurateScales)?;
            let c = coeff * ComplexRational::new(ratio, Rational::zero());
            for (idx, a) in &state.amps {
                accumulate(&mut amps, idx.clone(), &c * a);
            }
        }
        Ok(SparseState { amps, ..(*first).clone() })
    }

    fn check_registers(&self, regs: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.registers];
        for &r in regs {
            if r >= self.registers {
                return Err(StateError::RegisterOutOfRange { index: r, registers: self.registers });
            }
            if std::mem::replace(&mut seen[r], true) {
                return Err(StateError::DuplicateRegister(r));
            }
        }
        Ok(())
    }

    /// Relabels the registers `regs` of every ket through a verified map.
    ///
    /// Outputs are written back into `regs` in order. Extra outputs (when
    /// the map grows arity) are appended after the last register.
    pub fn apply_basis_map<M: BasisMap>(&self, regs: &[usize], map: &VerifiedMap<M>) -> Result<SparseState> {
        self.field.same_field(map.field())?;
        self.check_registers(regs)?;
        let m = map.map();
        if m.in_arity() != regs.len() {
            return Err(StateError::Shape(format!(
                "map takes {} registers, {} selected",
                m.in_arity(),
                regs.len()
            )));
        }
        let extra = m.out_arity() - m.in_arity();
        let mut amps = BTreeMap::new();
        let mut input: Tuple = SmallVec::with_capacity(regs.len());
        for (idx, a) in &self.amps {
            input.clear();
            input.extend(regs.iter().map(|&r| idx[r]));
            let out = m.apply(&input);
            let mut next = idx.0.clone();
            for (&r, &v) in regs.iter().zip(out.iter()) {
                next[r] = v;
            }
            next.extend_from_slice(&out[regs.len()..]);
            let prev = amps.insert(BasisIndex(next), a.clone());
            debug_assert!(prev.is_none(), "verified map collided");
        }
        Ok(SparseState { amps, registers: self.registers + extra, ..self.clone_header() })
    }

    /// New register `j` is old register `order[j]`.
    pub fn permute_registers(&self, order: &[usize]) -> Result<SparseState> {
        if order.len() != self.registers {
            return Err(StateError::RegisterMismatch(order.len(), self.registers));
        }
        self.check_registers(order)?;
        let amps = self
            .amps
            .iter()
            .map(|(idx, a)| (BasisIndex(order.iter().map(|&r| idx[r]).collect()), a.clone()))
            .collect();
        Ok(SparseState { amps, ..self.clone_header() })
    }

    fn clone_header(&self) -> SparseState {
        SparseState {
            field: self.field.clone(),
            registers: self.registers,
            amps: BTreeMap::new(),
            scale_exp: self.scale_exp,
            norm_div: self.norm_div.clone(),
        }
    }

    /// Reduced density matrix on `keep` (in the given register order).
    pub fn partial_trace(&self, keep: &[usize], dm_cap: u64) -> Result<DensityMatrix> {
        self.check_registers(keep)?;
        let q = self.field.order() as u64;
        let dim = q.checked_pow(keep.len() as u32).unwrap_or(u64::MAX);
        if dim > dm_cap {
            return Err(StateError::CapExceeded(format!(
                "reduced state on {} registers has dimension {dim} (cap {dm_cap})",
                keep.len()
            )));
        }
        let mut is_kept = vec![false; self.registers];
        for &r in keep {
            is_kept[r] = true;
        }
        // Group kets by the traced-out assignment w.
        let mut groups: HashMap<Tuple, Vec<(u64, &ComplexRational)>> = HashMap::new();
        for (idx, a) in &self.amps {
            let row = keep.iter().fold(0u64, |acc, &r| acc * q + idx[r] as u64);
            let w: Tuple = (0..self.registers).filter(|&r| !is_kept[r]).map(|r| idx[r]).collect();
            groups.entry(w).or_default().push((row, a));
        }
        let mut entries: BTreeMap<(u64, u64), ComplexRational> = BTreeMap::new();
        for members in groups.values() {
            for (u, a) in members {
                for (v, b) in members {
                    accumulate(&mut entries, (*u, *v), *a * b.conj());
                }
            }
        }
        let div = ComplexRational::new(self.global_divisor(), Rational::zero());
        let entries = entries.into_iter().map(|(k, v)| (k, v / &div)).collect();
        Ok(DensityMatrix::from_sparse(&self.field, keep.to_vec(), dim, entries))
    }

    /// `(Σ_v conj(a_v)·b_v, D_a·D_b)`: the exact inner product `⟨a|b⟩` is the
    /// first component divided by the square root of the second.
    pub fn overlap(&self, other: &SparseState) -> Result<(ComplexRational, Rational)> {
        self.field.same_field(&other.field)?;
        if self.registers != other.registers {
            return Err(StateError::RegisterMismatch(self.registers, other.registers));
        }
        let mut sum = ComplexRational::zero();
        for (idx, a) in &self.amps {
            if let Some(b) = other.amps.get(idx) {
                sum = sum + a.conj() * b;
            }
        }
        Ok((sum, self.global_divisor() * other.global_divisor()))
    }

    /// Splits into `|σ⟩ ⊗ |ρ⟩` with `σ` on `regs` (in the given order) and `ρ`
    /// on the remaining registers (ascending). Returns `None` when the state
    /// is entangled across the cut. Both factors come back normalized.
    pub fn split_product(&self, regs: &[usize]) -> Result<Option<(SparseState, SparseState)>> {
        self.check_registers(regs)?;
        if self.amps.is_empty() {
            return Err(StateError::ZeroState);
        }
        let mut inside = vec![false; self.registers];
        for &r in regs {
            inside[r] = true;
        }
        let rest: Vec<usize> = (0..self.registers).filter(|&r| !inside[r]).collect();
        let mut groups: BTreeMap<Tuple, BTreeMap<Tuple, &ComplexRational>> = BTreeMap::new();
        for (idx, a) in &self.amps {
            let x: Tuple = regs.iter().map(|&r| idx[r]).collect();
            let w: Tuple = rest.iter().map(|&r| idx[r]).collect();
            groups.entry(w).or_default().insert(x, a);
        }
        let sigma = groups.values().next().expect("nonempty").clone();
        let (x0, s0) = sigma.iter().next().map(|(x, a)| (x.clone(), (*a).clone())).expect("nonempty");
        let mut lambdas = Vec::with_capacity(groups.len());
        for (w, col) in &groups {
            if col.len() != sigma.len() {
                return Ok(None);
            }
            let Some(c0) = col.get(&x0) else { return Ok(None) };
            let lambda = *c0 / &s0;
            for (x, s) in &sigma {
                match col.get(x) {
                    Some(c) if **c == &lambda * *s => {}
                    _ => return Ok(None),
                }
            }
            lambdas.push((BasisIndex(w.clone()), lambda));
        }
        let first = SparseState::from_parts(
            &self.field,
            regs.len(),
            sigma.into_iter().map(|(x, a)| (BasisIndex(x), a.clone())),
            0,
            Rational::one(),
        )?
        .normalized()?;
        let second = SparseState::from_parts(&self.field, rest.len(), lambdas, 0, Rational::one())?.normalized()?;
        Ok(Some((first, second)))
    }
}

/// `a = λ·b` for some `|λ| = 1`, decided exactly.
pub fn states_equal(a: &SparseState, b: &SparseState) -> Result<bool> {
    a.field.same_field(&b.field)?;
    if a.registers != b.registers {
        return Err(StateError::RegisterMismatch(a.registers, b.registers));
    }
    if a.amps.len() != b.amps.len() {
        return Ok(false);
    }
    let Some((k0, a0)) = a.amps.iter().next() else {
        return Ok(b.amps.is_empty());
    };
    let Some(b0) = b.amps.get(k0) else {
        return Ok(false);
    };
    // λ = (a0/b0)·sqrt(D_b/D_a); |λ| = 1  ⇔  |a0|²·D_b = |b0|²·D_a.
    let da = a.global_divisor();
    let db = b.global_divisor();
    if amplitude::modulus_sq(a0) * &db != amplitude::modulus_sq(b0) * &da {
        return Ok(false);
    }
    // Every other ket must share the same ratio: a_v·b0 = b_v·a0.
    for (k, x) in &a.amps {
        match b.amps.get(k) {
            Some(y) => {
                if x * b0 != y * a0 {
                    return Ok(false);
                }
            }
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// Exact entrywise equality of two reduced states.
pub fn dm_equal(a: &DensityMatrix, b: &DensityMatrix) -> Result<bool> {
    a.exact_eq(b)
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, ComplexRational>, key: K, value: ComplexRational) {
    use std::collections::btree_map::Entry;
    if amplitude::is_zero(&value) {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(value);
        }
        Entry::Occupied(mut e) => {
            let sum = e.get() + value;
            if amplitude::is_zero(&sum) {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

impl fmt::Debug for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `Σ |a|²`, counting unit amplitudes without rational arithmetic.
fn total_weight<'a>(amps: impl Iterator<Item = &'a ComplexRational>) -> Rational {
    let one = amplitude::one();
    let (mut units, mut rest) = (0u64, Rational::zero());
    for a in amps {
        if *a == one {
            units += 1;
        } else {
            rest += amplitude::modulus_sq(a);
        }
    }
    rest + Rational::from_integer(units.into())
}

/// Structural equality: same field, kets, amplitudes, and normalization
/// bookkeeping. Use [`states_equal`] for physical equality.
impl PartialEq for SparseState {
    fn eq(&self, other: &SparseState) -> bool {
        self.field == other.field
            && self.registers == other.registers
            && self.scale_exp == other.scale_exp
            && self.norm_div == other.norm_div
            && self.amps == other.amps
    }
}
