//! The two highest-rate `(k, L, n)` ramp encoders, their advance-sharing
//! procedures, and qualified-set reconstruction.
//!
//! Both encoders map a basis secret `|s⟩` to the uniform superposition of
//! evaluation vectors `(f_c(α_1), ..., f_c(α_n))` over a coset of `q^{k-L}`
//! coefficient vectors:
//!
//! * Ogawa et al.: the low `L` coefficients of `f_c` are the secret.
//! * ZM: `f_c(β_i) = s_i` at `L` extra points.
//!
//! Advance sharing starts from `q^{-(k-L)/2} Σ_r |r⟩|r⟩`, hands out the left
//! halves, and later relabels `|r⟩|s⟩` to the evaluations of the unique
//! codeword polynomial that takes the values `r` at the advanced points.

use std::fmt;

use sha2::{Digest, Sha256};
use smallvec::SmallVec;
use thiserror::Error;

use crate::gf::{Field, GfError};
use crate::poly::{Interpolator, PointSet, PolyError, Polynomial};
use crate::qstate::{BasisIndex, BasisMap, SparseState, StateError, Tuple, VerifiedMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("need 1 ≤ L ≤ k ≤ n, got k={k}, L={l}, n={n}")]
    InvalidThresholds { k: usize, l: usize, n: usize },
    #[error("pure-state ramp schemes need n = 2k - L, got n={n}, k={k}, L={l}")]
    NotPureRamp { n: usize, k: usize, l: usize },
    #[error("{kind} scheme over GF({q}) supports at most {max} participants, got n={n}")]
    TooManyParticipants { kind: SchemeKind, q: u32, max: u32, n: usize },
    #[error("ogawa scheme requires nonzero alphas (alpha_{0} is zero)")]
    ZeroAlpha(usize),
    #[error("{0}")]
    DuplicatePoints(PolyError),
    #[error("{kind} scheme needs {expected} betas, got {got}")]
    BetaCount { kind: SchemeKind, expected: usize, got: usize },
    #[error("operation requires a {expected} scheme, got {got}")]
    WrongKind { expected: SchemeKind, got: SchemeKind },
    #[error("secret must have length L={expected}, got {got}")]
    SecretLength { expected: usize, got: usize },
    #[error(
        "at most k-L={max} shares can be advance shared; a set of {size} shares is not forbidden \
         and would depend on the secret"
    )]
    AdvanceTooLarge { size: usize, max: usize },
    #[error("share index {index} out of range 1..={n}")]
    ShareIndex { index: usize, n: usize },
    #[error("share {0} listed twice")]
    DuplicateShare(usize),
    #[error("need ≥ k={need} shares to reconstruct, got {got}")]
    NotEnoughShares { need: usize, got: usize },
    #[error("state is not a valid share state: {0}")]
    InconsistentSupport(String),
    #[error("secret registers do not factor out: {0}")]
    NotFactorizable(String),
    #[error("malformed scheme descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, SchemeError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Ogawa,
    Zm,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Ogawa => "ogawa",
            SchemeKind::Zm => "zm",
        })
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = SchemeError;
    fn from_str(s: &str) -> Result<SchemeKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ogawa" => Ok(SchemeKind::Ogawa),
            "zm" => Ok(SchemeKind::Zm),
            other => Err(SchemeError::Descriptor(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Validated `(q, n, k, L)` parameters with evaluation points.
#[derive(Clone)]
pub struct SchemeParams {
    kind: SchemeKind,
    field: Field,
    n: usize,
    k: usize,
    l: usize,
    alphas: PointSet,
    betas: PointSet,
    beta_interp: Option<Interpolator>,
}

impl SchemeParams {
    pub fn new(kind: SchemeKind, field: &Field, k: usize, l: usize, alphas: Vec<u32>, betas: Vec<u32>) -> Result<SchemeParams> {
        let n = alphas.len();
        if l == 0 || l > k || k > n {
            return Err(SchemeError::InvalidThresholds { k, l, n });
        }
        if n != 2 * k - l {
            return Err(SchemeError::NotPureRamp { n, k, l });
        }
        let q = field.order();
        let (max, expected_betas) = match kind {
            SchemeKind::Ogawa => (q.saturating_sub(1), 0),
            SchemeKind::Zm => (q.saturating_sub(l as u32), l),
        };
        if n as u64 > max as u64 {
            return Err(SchemeError::TooManyParticipants { kind, q, max, n });
        }
        let alphas = PointSet::new(field, alphas).map_err(points_error)?;
        if betas.len() != expected_betas {
            return Err(SchemeError::BetaCount { kind, expected: expected_betas, got: betas.len() });
        }
        let betas = PointSet::new(field, betas).map_err(points_error)?;
        let mut beta_interp = None;
        match kind {
            SchemeKind::Ogawa => {
                if let Some(i) = alphas.values().iter().position(|&a| a == 0) {
                    return Err(SchemeError::ZeroAlpha(i + 1));
                }
            }
            SchemeKind::Zm => {
                alphas.concat(&betas).map_err(points_error)?;
                beta_interp = Some(Interpolator::new(&betas)?);
            }
        }
        Ok(SchemeParams { kind, field: field.clone(), n, k, l, alphas, betas, beta_interp })
    }

    pub fn ogawa(field: &Field, k: usize, l: usize, alphas: Vec<u32>) -> Result<SchemeParams> {
        SchemeParams::new(SchemeKind::Ogawa, field, k, l, alphas, Vec::new())
    }

    pub fn zm(field: &Field, k: usize, l: usize, alphas: Vec<u32>, betas: Vec<u32>) -> Result<SchemeParams> {
        SchemeParams::new(SchemeKind::Zm, field, k, l, alphas, betas)
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// `k - L`: free coefficients per secret, and the largest forbidden size.
    pub fn free(&self) -> usize {
        self.k - self.l
    }

    pub fn alphas(&self) -> &PointSet {
        &self.alphas
    }

    pub fn betas(&self) -> &PointSet {
        &self.betas
    }

    pub fn require_kind(&self, expected: SchemeKind) -> Result<()> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(SchemeError::WrongKind { expected, got: self.kind })
        }
    }

    /// Same scheme with share `j` evaluated at the old `alphas[order[j]]`.
    pub(crate) fn reindexed(&self, order: &[usize]) -> Result<SchemeParams> {
        let alphas = order.iter().map(|&i| self.alphas.values()[i]).collect();
        SchemeParams::new(self.kind, &self.field, self.k, self.l, alphas, self.betas.values().to_vec())
    }

    /// `scheme=<kind> field=<descriptor> n=.. k=.. L=.. alphas=.. betas=..`
    pub fn descriptor(&self) -> String {
        format!(
            "scheme={} field={} n={} k={} L={} alphas={} betas={}",
            self.kind,
            self.field.descriptor(),
            self.n,
            self.k,
            self.l,
            join(self.alphas.values()),
            join(self.betas.values())
        )
    }

    pub fn from_descriptor(text: &str) -> Result<SchemeParams> {
        let bad = |m: &str| SchemeError::Descriptor(format!("{m} in '{text}'"));
        let (mut kind, mut field, mut n, mut k, mut l) = (None, None, None, None, None);
        let (mut alphas, mut betas) = (None, Vec::new());
        for token in text.split_whitespace() {
            let (key, value) = token.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match key {
                "scheme" => kind = Some(value.parse::<SchemeKind>()?),
                "field" => field = Some(Field::from_descriptor(value)?),
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad("bad n"))?),
                "k" => k = Some(value.parse::<usize>().map_err(|_| bad("bad k"))?),
                "L" => l = Some(value.parse::<usize>().map_err(|_| bad("bad L"))?),
                "alphas" => alphas = Some(parse_list(value).ok_or_else(|| bad("bad alphas"))?),
                "betas" => betas = parse_list(value).ok_or_else(|| bad("bad betas"))?,
                _ => return Err(bad("unknown key")),
            }
        }
        let alphas: Vec<u32> = alphas.ok_or_else(|| bad("missing alphas"))?;
        let field = field.ok_or_else(|| bad("missing field"))?;
        if let Some(n) = n {
            if n != alphas.len() {
                return Err(bad("n does not match the number of alphas"));
            }
        }
        SchemeParams::new(
            kind.ok_or_else(|| bad("missing scheme"))?,
            &field,
            k.ok_or_else(|| bad("missing k"))?,
            l.ok_or_else(|| bad("missing L"))?,
            alphas,
            betas,
        )
    }

    /// Short stable digest of the descriptor, used to tag reports.
    pub fn params_hash(&self) -> String {
        let digest = Sha256::digest(self.descriptor().as_bytes());
        hex::encode(&digest[..6])
    }

    pub fn secret(&self, values: &[u32]) -> Result<SecretVector> {
        SecretVector::new(self, values.to_vec())
    }

    /// All `q^L` basis secrets, lexicographically.
    pub fn basis_secrets(&self) -> impl Iterator<Item = SecretVector> {
        self.field.tuples(self.l).map(|t| SecretVector(t.to_vec()))
    }

    /// Low coefficients fixed, or the values at the betas, as appropriate.
    pub(crate) fn secret_of(&self, f: &Polynomial) -> Tuple {
        match self.kind {
            SchemeKind::Ogawa => SmallVec::from_slice(&f.coeffs()[..self.l]),
            SchemeKind::Zm => self.betas.values().iter().map(|&b| f.eval(b)).collect(),
        }
    }

    fn codeword_kets(&self, coeff_sets: Vec<Vec<u32>>) -> impl Iterator<Item = BasisIndex> + '_ {
        coeff_sets.into_iter().map(move |c| {
            let f = Polynomial::from_raw(&self.field, c);
            BasisIndex(self.alphas.values().iter().map(|&a| f.eval(a)).collect())
        })
    }
}

impl fmt::Debug for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl PartialEq for SchemeParams {
    fn eq(&self, other: &SchemeParams) -> bool {
        self.descriptor() == other.descriptor()
    }
}

fn points_error(e: PolyError) -> SchemeError {
    match e {
        PolyError::DuplicatePoint(_) => SchemeError::DuplicatePoints(e),
        other => SchemeError::Poly(other),
    }
}

fn join(v: &[u32]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_list(s: &str) -> Option<Vec<u32>> {
    if s.trim().is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

/// A classical secret `(s_1, ..., s_L) ∈ F_q^L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SecretVector(Vec<u32>);

impl SecretVector {
    pub fn new(params: &SchemeParams, values: Vec<u32>) -> Result<SecretVector> {
        if values.len() != params.l {
            return Err(SchemeError::SecretLength { expected: params.l, got: values.len() });
        }
        for &v in &values {
            params.field.check(v)?;
        }
        Ok(SecretVector(values))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn to_state(&self, params: &SchemeParams) -> SparseState {
        SparseState::from_distinct_unit_kets(&params.field, self.0.len(), [BasisIndex::from_slice(&self.0)], 0)
    }
}

/// `D(s)`: coefficient vectors whose first `L` entries equal the secret,
/// ordered by the free coefficients.
pub fn coeff_set_ogawa(params: &SchemeParams, s: &SecretVector) -> Result<Vec<Vec<u32>>> {
    params.require_kind(SchemeKind::Ogawa)?;
    Ok(params
        .field
        .tuples(params.free())
        .map(|free| {
            let mut c = s.values().to_vec();
            c.extend_from_slice(&free);
            c
        })
        .collect())
}

/// `D_ZM(s)`: coefficient vectors with `f_c(β_i) = s_i`. Parametrized by the
/// top `k - L` coefficients; the low `L` are interpolated through the betas.
pub fn coeff_set_zm(params: &SchemeParams, s: &SecretVector) -> Result<Vec<Vec<u32>>> {
    params.require_kind(SchemeKind::Zm)?;
    let f = &params.field;
    let interp = params.beta_interp.as_ref().expect("zm params carry a beta interpolator");
    let betas = params.betas.values();
    let l = params.l as u64;
    let beta_pow_l: Vec<u32> = betas.iter().map(|&b| f.pow(b, l)).collect();
    let mut out = Vec::new();
    let mut targets = vec![0u32; params.l];
    for top in f.tuples(params.free()) {
        let top_poly = Polynomial::from_raw(f, top.to_vec());
        for (i, &b) in betas.iter().enumerate() {
            let high = f.mul(beta_pow_l[i], top_poly.eval(b));
            targets[i] = f.sub(s.values()[i], high);
        }
        let mut c = interp.interpolate_raw(&targets).into_coeffs();
        c.extend_from_slice(&top);
        out.push(c);
    }
    Ok(out)
}

pub fn coeff_set(params: &SchemeParams, s: &SecretVector) -> Result<Vec<Vec<u32>>> {
    match params.kind {
        SchemeKind::Ogawa => coeff_set_ogawa(params, s),
        SchemeKind::Zm => coeff_set_zm(params, s),
    }
}

/// Encoded state of a basis secret: `q^{-(k-L)/2} Σ_{c∈D(s)} |ev(f_c)⟩`.
pub fn encode_basis(params: &SchemeParams, s: &SecretVector) -> Result<SparseState> {
    let kets = params.codeword_kets(coeff_set(params, s)?).collect::<Vec<_>>();
    Ok(SparseState::from_distinct_unit_kets(&params.field, params.n, kets, params.free() as u32))
}

fn encode_linear(params: &SchemeParams, secret: &SparseState) -> Result<SparseState> {
    params.field.same_field(secret.field())?;
    if secret.registers() != params.l {
        return Err(SchemeError::SecretLength { expected: params.l, got: secret.registers() });
    }
    secret.require_normalized()?;
    let mut kets = Vec::new();
    for (idx, a) in secret.amplitudes() {
        let s = SecretVector(idx.to_vec());
        for ket in params.codeword_kets(coeff_set(params, &s)?) {
            kets.push((ket, a.clone()));
        }
    }
    Ok(SparseState::from_parts(
        &params.field,
        params.n,
        kets,
        secret.scale_exp() + params.free() as u32,
        secret.norm_div().clone(),
    )?)
}

/// Ogawa et al. encoder, extended linearly to superposed secrets.
pub fn encode_ogawa(params: &SchemeParams, secret: &SparseState) -> Result<SparseState> {
    params.require_kind(SchemeKind::Ogawa)?;
    encode_linear(params, secret)
}

/// ZM encoder, extended linearly to superposed secrets.
pub fn encode_zm(params: &SchemeParams, secret: &SparseState) -> Result<SparseState> {
    params.require_kind(SchemeKind::Zm)?;
    encode_linear(params, secret)
}

pub fn encode(params: &SchemeParams, secret: &SparseState) -> Result<SparseState> {
    encode_linear(params, secret)
}

/// Finds the unique codeword polynomial (degree < k, consistent with the
/// secret) that takes prescribed values at `k - L` anchor points.
#[derive(Clone)]
struct CodewordSolver {
    params: SchemeParams,
    anchors: Vec<u32>,
    interp: Interpolator,
    // Ogawa: anchor powers a^0..a^{L-1} and 1/a^L.
    powers: Vec<Vec<u32>>,
    inv_pow_l: Vec<u32>,
}

impl CodewordSolver {
    fn new(params: &SchemeParams, anchors: Vec<u32>) -> Result<CodewordSolver> {
        let f = &params.field;
        let anchor_set = PointSet::new(f, anchors.clone())?;
        let (interp, powers, inv_pow_l) = match params.kind {
            SchemeKind::Ogawa => {
                let mut inv = Vec::with_capacity(anchors.len());
                for (i, &a) in anchors.iter().enumerate() {
                    if a == 0 {
                        return Err(SchemeError::ZeroAlpha(i + 1));
                    }
                    inv.push(f.inv(f.pow(a, params.l as u64))?);
                }
                let powers = anchors
                    .iter()
                    .map(|&a| (0..params.l).map(|j| f.pow(a, j as u64)).collect())
                    .collect();
                (Interpolator::new(&anchor_set)?, powers, inv)
            }
            SchemeKind::Zm => (Interpolator::new(&params.betas.concat(&anchor_set)?)?, Vec::new(), Vec::new()),
        };
        Ok(CodewordSolver { params: params.clone(), anchors, interp, powers, inv_pow_l })
    }

    fn solve(&self, r: &[u32], s: &[u32]) -> Polynomial {
        let f = &self.params.field;
        match self.params.kind {
            SchemeKind::Ogawa => {
                // b_i = (r_i - s_1 - s_2 a_i - ... - s_L a_i^{L-1}) / a_i^L
                let b: SmallVec<[u32; 8]> = (0..self.anchors.len())
                    .map(|i| {
                        let low = s.iter().zip(&self.powers[i]).fold(0, |acc, (&sj, &pj)| f.add(acc, f.mul(sj, pj)));
                        f.mul(f.sub(r[i], low), self.inv_pow_l[i])
                    })
                    .collect();
                // g = x^L·(Σ b_i ℓ_i) + Σ s_i x^{i-1}
                let mut coeffs = s.to_vec();
                coeffs.extend_from_slice(self.interp.interpolate_raw(&b).coeffs());
                Polynomial::from_raw(f, coeffs)
            }
            SchemeKind::Zm => {
                let mut values: SmallVec<[u32; 8]> = SmallVec::from_slice(s);
                values.extend_from_slice(r);
                self.interp.interpolate_raw(&values)
            }
        }
    }
}

fn check_free_tuple(params: &SchemeParams, r: &[u32]) -> Result<()> {
    if r.len() != params.free() {
        return Err(SchemeError::SecretLength { expected: params.free(), got: r.len() });
    }
    for &v in r {
        params.field.check(v)?;
    }
    Ok(())
}

/// The unique `f_c`, `c ∈ D(s)`, with `f_c(α_i) = r_i` for `i ≤ k - L`.
pub fn g_poly(params: &SchemeParams, r: &[u32], s: &SecretVector) -> Result<Polynomial> {
    params.require_kind(SchemeKind::Ogawa)?;
    check_free_tuple(params, r)?;
    let solver = CodewordSolver::new(params, params.alphas.values()[..params.free()].to_vec())?;
    Ok(solver.solve(r, s.values()))
}

/// The unique `f ∈ P_k` with `f(β_i) = s_i` and `f(α_i) = r_i` for `i ≤ k - L`.
pub fn h_poly(params: &SchemeParams, r: &[u32], s: &SecretVector) -> Result<Polynomial> {
    params.require_kind(SchemeKind::Zm)?;
    check_free_tuple(params, r)?;
    let solver = CodewordSolver::new(params, params.alphas.values()[..params.free()].to_vec())?;
    Ok(solver.solve(r, s.values()))
}

/// `U_enc` / `U_ZM,enc`: `|r⟩|s⟩ ↦ |f(α_{k-L+1})⟩ ⋯ |f(α_n)⟩` where `f` is
/// the codeword polynomial through `r` at the first `k - L` alphas.
#[derive(Clone)]
pub struct CompletionMap {
    solver: CodewordSolver,
    targets: Vec<u32>,
    target_interp: Interpolator,
}

impl CompletionMap {
    pub fn new(params: &SchemeParams) -> Result<CompletionMap> {
        let free = params.free();
        let targets = params.alphas.values()[free..].to_vec();
        let target_interp = Interpolator::new(&PointSet::new(&params.field, targets.clone())?)?;
        Ok(CompletionMap {
            solver: CodewordSolver::new(params, params.alphas.values()[..free].to_vec())?,
            targets,
            target_interp,
        })
    }

    /// The polynomial behind the image of `|r⟩|s⟩`.
    pub fn polynomial(&self, r: &[u32], s: &[u32]) -> Polynomial {
        self.solver.solve(r, s)
    }
}

impl BasisMap for CompletionMap {
    fn in_arity(&self) -> usize {
        self.solver.params.k
    }

    fn out_arity(&self) -> usize {
        self.targets.len()
    }

    fn apply(&self, input: &[u32]) -> Tuple {
        let free = self.solver.anchors.len();
        let g = self.solver.solve(&input[..free], &input[free..]);
        self.targets.iter().map(|&a| g.eval(a)).collect()
    }

    fn inverse(&self, output: &[u32]) -> Option<Tuple> {
        let f = self.target_interp.interpolate_raw(output);
        let mut back: Tuple = self.solver.anchors.iter().map(|&a| f.eval(a)).collect();
        back.extend_from_slice(&self.solver.params.secret_of(&f));
        Some(back)
    }
}

/// State of an advance-sharing run between distribution and completion.
///
/// Registers `0..k-L` of the resource are the distributed halves: the first
/// `|advanced|` went to the advanced participants, the rest stay with the
/// dealer. Registers `k-L..2(k-L)` are the dealer's halves.
pub struct AdvanceSession {
    params: SchemeParams,
    advanced: Vec<usize>,
    prefix: Vec<usize>,
    order: Vec<usize>,
    resource: SparseState,
    completion: VerifiedMap<CompletionMap>,
}

/// Prepares the resource state for advance sharing `advanced` (0-based share
/// indices). Fewer than `k - L` advanced shares are padded with
/// dealer-held shares of the smallest remaining indices.
pub fn advance_setup(params: &SchemeParams, advanced: &[usize], cap: u64) -> Result<AdvanceSession> {
    let free = params.free();
    check_shares(params, advanced)?;
    if advanced.len() > free {
        return Err(SchemeError::AdvanceTooLarge { size: advanced.len(), max: free });
    }
    let mut advanced = advanced.to_vec();
    advanced.sort_unstable();
    let mut prefix = advanced.clone();
    prefix.extend((0..params.n).filter(|i| !advanced.contains(i)).take(free - advanced.len()));
    let mut order = prefix.clone();
    order.extend((0..params.n).filter(|i| !prefix.contains(i)));
    let reindexed = params.reindexed(&order)?;
    let completion = VerifiedMap::verify(CompletionMap::new(&reindexed)?, &params.field, cap)?;
    let resource = SparseState::uniform_resource(&params.field, free, cap)?;
    Ok(AdvanceSession { params: params.clone(), advanced, prefix, order, resource, completion })
}

impl AdvanceSession {
    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    /// Shares handed out before the secret exists (0-based).
    pub fn advanced(&self) -> &[usize] {
        &self.advanced
    }

    /// Shares whose distributed half the dealer keeps back.
    pub fn dealer_held(&self) -> &[usize] {
        &self.prefix[self.advanced.len()..]
    }

    /// Share index carried by each distributed-half register.
    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    /// Share index at each register position right after the completion map.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn resource(&self) -> &SparseState {
        &self.resource
    }

    pub fn completion(&self) -> &VerifiedMap<CompletionMap> {
        &self.completion
    }

    /// Replaces the resource with one loaded from storage.
    pub fn with_resource(mut self, resource: SparseState) -> Result<AdvanceSession> {
        self.params.field.same_field(resource.field())?;
        let expected = 2 * self.params.free();
        if resource.registers() != expected {
            return Err(StateError::RegisterMismatch(expected, resource.registers()).into());
        }
        resource.require_normalized()?;
        self.resource = resource;
        Ok(self)
    }
}

/// Applies the completion map to the dealer's halves and the secret and
/// returns the `n`-share state in natural share order.
pub fn advance_complete(session: &AdvanceSession, secret: &SparseState) -> Result<SparseState> {
    advance_complete_with(session, &session.completion, secret)
}

/// As [`advance_complete`] with a caller-supplied completion map.
pub fn advance_complete_with<M: BasisMap>(session: &AdvanceSession, map: &VerifiedMap<M>, secret: &SparseState) -> Result<SparseState> {
    let params = &session.params;
    params.field.same_field(secret.field())?;
    if secret.registers() != params.l {
        return Err(SchemeError::SecretLength { expected: params.l, got: secret.registers() });
    }
    secret.require_normalized()?;
    let free = params.free();
    let joint = session.resource.tensor(secret)?;
    let regs: Vec<usize> = (free..2 * free + params.l).collect();
    let shares = joint.apply_basis_map(&regs, map)?;
    if shares.registers() != params.n {
        return Err(StateError::RegisterMismatch(params.n, shares.registers()).into());
    }
    let mut position = vec![0; params.n];
    for (pos, &share) in session.order.iter().enumerate() {
        position[share] = pos;
    }
    Ok(shares.permute_registers(&position)?)
}

fn check_shares(params: &SchemeParams, shares: &[usize]) -> Result<()> {
    let mut seen = vec![false; params.n];
    for &i in shares {
        if i >= params.n {
            return Err(SchemeError::ShareIndex { index: i + 1, n: params.n });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(SchemeError::DuplicateShare(i + 1));
        }
    }
    Ok(())
}

/// Decoding relabeling on `k` qualified registers:
/// `(v_1..v_k) ↦ (secret symbols, f(α_j) for the n - k shares outside)`,
/// where `f` interpolates the `v`. The outside values make the residual
/// `Σ_t |t⟩|t⟩`, independent of the secret.
#[derive(Clone)]
pub struct DecoderMap {
    params: SchemeParams,
    inside: Vec<u32>,
    inside_interp: Interpolator,
    outside: Vec<u32>,
    solver: CodewordSolver,
}

impl BasisMap for DecoderMap {
    fn in_arity(&self) -> usize {
        self.inside.len()
    }

    fn out_arity(&self) -> usize {
        self.inside.len()
    }

    fn apply(&self, input: &[u32]) -> Tuple {
        let f = self.inside_interp.interpolate_raw(input);
        let mut out = self.params.secret_of(&f);
        out.extend(self.outside.iter().map(|&a| f.eval(a)));
        out
    }

    fn inverse(&self, output: &[u32]) -> Option<Tuple> {
        let l = self.params.l;
        let f = self.solver.solve(&output[l..], &output[..l]);
        Some(self.inside.iter().map(|&a| f.eval(a)).collect())
    }
}

/// Reconstruction output: the recovered secret and the remaining registers.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub secret: SparseState,
    pub residual: SparseState,
    /// Original register index of each residual register.
    pub residual_registers: Vec<usize>,
}

/// Reconstruction procedure for one qualified set, with its decoding map
/// verified once.
pub struct Decoder {
    params: SchemeParams,
    inside: Vec<usize>,
    outside: Vec<usize>,
    map: VerifiedMap<DecoderMap>,
}

impl Decoder {
    /// Uses the first `k` shares of `qualified` (0-based, in the given order).
    pub fn new(params: &SchemeParams, qualified: &[usize], cap: u64) -> Result<Decoder> {
        check_shares(params, qualified)?;
        if qualified.len() < params.k {
            return Err(SchemeError::NotEnoughShares { need: params.k, got: qualified.len() });
        }
        let inside = qualified[..params.k].to_vec();
        let outside: Vec<usize> = (0..params.n).filter(|i| !inside.contains(i)).collect();
        let alpha = |i: &usize| params.alphas.values()[*i];
        let inside_pts: Vec<u32> = inside.iter().map(alpha).collect();
        let outside_pts: Vec<u32> = outside.iter().map(alpha).collect();
        let map = DecoderMap {
            params: params.clone(),
            inside_interp: Interpolator::new(&PointSet::new(&params.field, inside_pts.clone())?)?,
            inside: inside_pts,
            solver: CodewordSolver::new(params, outside_pts.clone())?,
            outside: outside_pts,
        };
        let map = VerifiedMap::verify(map, &params.field, cap)?;
        Ok(Decoder { params: params.clone(), inside, outside, map })
    }

    pub fn reconstruct(&self, state: &SparseState) -> Result<Reconstruction> {
        let params = &self.params;
        params.field.same_field(state.field())?;
        if state.registers() != params.n {
            return Err(StateError::RegisterMismatch(params.n, state.registers()).into());
        }
        let m = self.map.map();
        for ket in state.support() {
            let inside: Tuple = self.inside.iter().map(|&i| ket[i]).collect();
            let f = m.inside_interp.interpolate_raw(&inside);
            for (&j, &a) in self.outside.iter().zip(&m.outside) {
                if f.eval(a) != ket[j] {
                    return Err(SchemeError::InconsistentSupport(format!(
                        "ket {ket:?} is not an evaluation vector of a polynomial of degree < {}",
                        params.k
                    )));
                }
            }
        }
        let decoded = state.apply_basis_map(&self.inside, &self.map)?;
        let secret_regs = &self.inside[..params.l];
        let residual_registers: Vec<usize> = (0..params.n).filter(|r| !secret_regs.contains(r)).collect();
        let (secret, residual) = decoded
            .split_product(secret_regs)?
            .ok_or_else(|| SchemeError::NotFactorizable("decoded state is entangled with the rest".into()))?;
        Ok(Reconstruction { secret, residual, residual_registers })
    }
}

/// Recovers the secret from the first `k` shares of `qualified` (0-based).
pub fn reconstruct(params: &SchemeParams, state: &SparseState, qualified: &[usize], cap: u64) -> Result<Reconstruction> {
    Decoder::new(params, qualified, cap)?.reconstruct(state)
}
