//! Exact checks of the security and equivalence properties of the schemes.
//!
//! "Independent of the secret" is decided over a finite probe family whose
//! projectors span the whole operator space of secret density matrices;
//! encoding is linear, so invariance on the family is invariance for every
//! secret.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf::Field;
use crate::qstate::amplitude::{self, ComplexRational, Rational};
use crate::qstate::{
    states_equal, BasisIndex, BasisMap, DensityMatrix, SparseState, StateError, VerifiedMap, DEFAULT_DM_CAP,
    DEFAULT_KET_CAP,
};
use crate::schemes::{
    advance_complete_with, advance_setup, encode, AdvanceSession, Decoder, SchemeError, SchemeKind, SchemeParams,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("probe family spans dimension {rank}, expected {expected}")]
    ProbeRank { rank: usize, expected: usize },
    #[error("malformed witness: {0}")]
    Witness(String),
}

impl VerifyError {
    /// Whether the failure is a configured limit rather than a defect.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            VerifyError::State(StateError::CapExceeded(_)) | VerifyError::Scheme(SchemeError::State(StateError::CapExceeded(_)))
        )
    }
}

pub type Result<T> = std::result::Result<T, VerifyError>;

/// Enumeration limits: `kets` bounds exhaustive map verification and state
/// sizes, `dm` bounds reduced-state dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub kets: u64,
    pub dm: u64,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps { kets: DEFAULT_KET_CAP, dm: DEFAULT_DM_CAP }
    }
}

/// Basis secrets plus `(|s⟩+|s'⟩)/√2` and `(|s⟩+i|s'⟩)/√2` for every ordered
/// pair `s ≠ s'`.
pub struct ProbeFamily {
    width: usize,
    probes: Vec<SparseState>,
    rank: usize,
}

impl ProbeFamily {
    pub fn new(field: &Field, width: usize) -> Result<ProbeFamily> {
        let basis: Vec<SparseState> =
            field.tuples(width).map(|t| SparseState::basis(field, &t)).collect::<std::result::Result<_, _>>()?;
        let mut probes = basis.clone();
        let half = Rational::new(2.into(), 1.into());
        for (a, b) in basis.iter().cartesian_product(basis.iter()) {
            if a == b {
                continue;
            }
            for c in [amplitude::one(), amplitude::imag_unit()] {
                let kets = a
                    .amplitudes()
                    .map(|(k, _)| (k.clone(), amplitude::one()))
                    .chain(b.amplitudes().map(|(k, _)| (k.clone(), c.clone())));
                probes.push(SparseState::from_parts(field, width, kets, 0, half.clone())?);
            }
        }
        let rank = operator_rank(&probes);
        let expected = (field.order() as usize).pow(2 * width as u32);
        if rank != expected {
            return Err(VerifyError::ProbeRank { rank, expected });
        }
        Ok(ProbeFamily { width, probes, rank })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn states(&self) -> &[SparseState] {
        &self.probes
    }

    /// Dimension spanned by the probe projectors.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The first `q^width` probes are the basis secrets.
    pub fn basis_count(&self) -> usize {
        self.probes.iter().take_while(|p| p.len() == 1).count()
    }
}

/// Exact rank of `{vec(|ψ⟩⟨ψ|)}` by sparse elimination over `Q(i)`.
fn operator_rank(states: &[SparseState]) -> usize {
    let Some(first) = states.first() else { return 0 };
    let q = first.field().order() as u64;
    let index = |k: &BasisIndex| k.iter().fold(0u64, |acc, &v| acc * q + v as u64);
    let mut pivots: BTreeMap<(u64, u64), BTreeMap<(u64, u64), ComplexRational>> = BTreeMap::new();
    for st in states {
        let mut row: BTreeMap<(u64, u64), ComplexRational> = BTreeMap::new();
        for (x, a) in st.amplitudes() {
            for (y, b) in st.amplitudes() {
                row.insert((index(x), index(y)), a * b.conj());
            }
        }
        let mut cursor = None;
        loop {
            let next = match cursor {
                None => row.keys().next().copied(),
                Some(c) => row.range((std::ops::Bound::Excluded(c), std::ops::Bound::Unbounded)).next().map(|(k, _)| *k),
            };
            let Some(col) = next else { break };
            if let Some(p) = pivots.get(&col) {
                let factor = row[&col].clone();
                for (k, v) in p {
                    let updated = row.get(k).cloned().unwrap_or_else(ComplexRational::zero) - &factor * v;
                    if amplitude::is_zero(&updated) {
                        row.remove(k);
                    } else {
                        row.insert(*k, updated);
                    }
                }
            }
            cursor = Some(col);
        }
        if let Some((&lead, lead_val)) = row.iter().next() {
            let inv = ComplexRational::one() / lead_val;
            let normalized = row.into_iter().map(|(k, v)| (k, v * &inv)).collect();
            pivots.insert(lead, normalized);
        }
    }
    pivots.len()
}

/// What a witness asserts about its two reduced states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    /// The reduced states differ, so the subset is not forbidden.
    Distinct,
    /// Orthogonal secrets with non-orthogonal reduced states, so no
    /// recovery operation on the subset exists.
    NonOrthogonal,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Claim::Distinct => "distinct",
            Claim::NonOrthogonal => "non-orthogonal",
        })
    }
}

/// Two secrets and the reduced states they induce on a share subset.
///
/// With `coords` set, the secrets live on those secret coordinates only and
/// the remaining coordinates are maximally mixed.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub claim: Claim,
    pub subset: Vec<usize>,
    pub coords: Option<Vec<usize>>,
    pub secret_a: SparseState,
    pub secret_b: SparseState,
    pub rho_a: DensityMatrix,
    pub rho_b: DensityMatrix,
}

const WITNESS_MAGIC: &str = "qramp-witness v1";

impl Witness {
    /// Recomputes both reduced states from the secrets and re-decides the
    /// claim.
    pub fn recheck(&self, params: &SchemeParams, caps: Caps) -> Result<bool> {
        for rho in [&self.rho_a, &self.rho_b] {
            if !rho.trace().is_one() || !rho.is_hermitian() || !rho.passes_psd_spot_check() {
                return Ok(false);
            }
        }
        let ra = reduced_state(params, &self.secret_a, self.coords.as_deref(), &self.subset, caps)?;
        let rb = reduced_state(params, &self.secret_b, self.coords.as_deref(), &self.subset, caps)?;
        if !ra.exact_eq(&self.rho_a)? || !rb.exact_eq(&self.rho_b)? {
            return Ok(false);
        }
        Ok(match self.claim {
            Claim::Distinct => !ra.exact_eq(&rb)?,
            Claim::NonOrthogonal => {
                let (ip, _) = self.secret_a.overlap(&self.secret_b)?;
                amplitude::is_zero(&ip) && !amplitude::is_zero(&ra.trace_product(&rb)?)
            }
        })
    }

    pub fn to_text(&self) -> String {
        let list = |v: &[usize]| v.iter().map(|i| (i + 1).to_string()).join(",");
        let mut out = format!("{WITNESS_MAGIC}; claim={}; subset={}", self.claim, list(&self.subset));
        if let Some(c) = &self.coords {
            out.push_str(&format!("; coords={}", list(c)));
        }
        out.push('\n');
        for (name, body) in [
            ("secret_a", self.secret_a.to_text()),
            ("secret_b", self.secret_b.to_text()),
            ("rho_a", self.rho_a.to_text()),
            ("rho_b", self.rho_b.to_text()),
        ] {
            out.push_str(&format!("--- {name}\n{body}"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Witness> {
        let bad = |m: &str| VerifyError::Witness(m.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let mut fields = header.split(';').map(str::trim);
        if fields.next() != Some(WITNESS_MAGIC) {
            return Err(bad("bad header"));
        }
        let parse_list = |v: &str| -> Result<Vec<usize>> {
            if v.is_empty() {
                return Ok(Vec::new());
            }
            v.split(',')
                .map(|x| x.parse::<usize>().ok().filter(|&i| i > 0).map(|i| i - 1))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("bad index list"))
        };
        let (mut claim, mut subset, mut coords) = (None, None, None);
        for kv in fields {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("bad header field"))?;
            match k {
                "claim" => {
                    claim = Some(match v {
                        "distinct" => Claim::Distinct,
                        "non-orthogonal" => Claim::NonOrthogonal,
                        _ => return Err(bad("unknown claim")),
                    })
                }
                "subset" => subset = Some(parse_list(v)?),
                "coords" => coords = Some(parse_list(v)?),
                _ => return Err(bad("unknown header field")),
            }
        }
        let mut sections: BTreeMap<String, String> = BTreeMap::new();
        let mut current: Option<String> = None;
        for line in lines {
            if let Some(name) = line.strip_prefix("--- ") {
                current = Some(name.trim().to_string());
                sections.insert(name.trim().to_string(), String::new());
            } else if let Some(c) = &current {
                let s = sections.get_mut(c).expect("section exists");
                s.push_str(line);
                s.push('\n');
            } else if !line.trim().is_empty() {
                return Err(bad("content before first section"));
            }
        }
        let section = |n: &str| sections.get(n).ok_or_else(|| bad(&format!("missing section {n}")));
        let secret_a = SparseState::from_text(section("secret_a")?)?;
        let secret_b = SparseState::from_text(section("secret_b")?)?;
        let subset = subset.ok_or_else(|| bad("missing subset"))?;
        let field = secret_a.field().clone();
        Ok(Witness {
            claim: claim.ok_or_else(|| bad("missing claim"))?,
            rho_a: DensityMatrix::from_text(&field, subset.clone(), section("rho_a")?)?,
            rho_b: DensityMatrix::from_text(&field, subset.clone(), section("rho_b")?)?,
            subset,
            coords,
            secret_a,
            secret_b,
        })
    }
}

/// Reduced state on `subset` of the encoded `secret`. With `coords`, the
/// secret occupies those coordinates and the rest are maximally mixed.
pub fn reduced_state(
    params: &SchemeParams,
    secret: &SparseState,
    coords: Option<&[usize]>,
    subset: &[usize],
    caps: Caps,
) -> Result<DensityMatrix> {
    match coords {
        None => Ok(encode(params, secret)?.partial_trace(subset, caps.dm)?),
        Some(t) => {
            let parts = embeddings(params, secret, t)?
                .iter()
                .map(|s| Ok(encode(params, s)?.partial_trace(subset, caps.dm)?))
                .collect::<Result<Vec<_>>>()?;
            Ok(DensityMatrix::mixture(&parts)?)
        }
    }
}

/// `secret` placed on coordinates `t`, tensored with each basis assignment
/// of the other coordinates.
fn embeddings(params: &SchemeParams, secret: &SparseState, t: &[usize]) -> Result<Vec<SparseState>> {
    let l = params.l();
    if secret.registers() != t.len() || t.iter().any(|&i| i >= l) || t.iter().collect::<BTreeSet<_>>().len() != t.len() {
        return Err(VerifyError::Precondition(format!("coordinates {t:?} do not fit a secret of length {l}")));
    }
    let rest: Vec<usize> = (0..l).filter(|i| !t.contains(i)).collect();
    let mut order = vec![0; l];
    for (j, &i) in t.iter().chain(&rest).enumerate() {
        order[i] = j;
    }
    params
        .field()
        .tuples(rest.len())
        .map(|a| {
            let fixed = SparseState::basis(params.field(), &a)?;
            Ok(secret.tensor(&fixed)?.permute_registers(&order)?)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Qualified,
    Forbidden,
    Intermediate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Qualified => "qualified",
            Verdict::Forbidden => "forbidden",
            Verdict::Intermediate => "intermediate",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ForbiddenOutcome {
    pub forbidden: bool,
    pub witness: Option<Witness>,
}

/// Decoder used and number of probe secrets it recovered exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub decoder_shares: Vec<usize>,
    pub probes_recovered: usize,
}

#[derive(Debug, Clone)]
pub struct QualifiedOutcome {
    pub qualified: bool,
    pub transcript: Option<Transcript>,
    pub witness: Option<Witness>,
    /// Set when reconstruction ran but returned a wrong secret.
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SubsetClassification {
    pub subset: Vec<usize>,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub transcript: Option<Transcript>,
    /// `qualified(A) ⇔ forbidden(complement of A)`.
    pub duality_holds: bool,
}

#[derive(Debug, Clone)]
pub struct AccessReport {
    pub rows: Vec<SubsetClassification>,
    pub size_determined: bool,
    pub thresholds_match: bool,
    pub duality_holds: bool,
}

impl AccessReport {
    pub fn passed(&self) -> bool {
        self.size_determined && self.thresholds_match && self.duality_holds
    }
}

/// Expected verdict for a subset of `size` shares.
pub fn threshold_verdict(params: &SchemeParams, size: usize) -> Verdict {
    if size >= params.k() {
        Verdict::Qualified
    } else if size <= params.free() {
        Verdict::Forbidden
    } else {
        Verdict::Intermediate
    }
}

/// Encoded probe family for one scheme, shared by the subset checks.
pub struct Analyzer {
    params: SchemeParams,
    caps: Caps,
    probes: ProbeFamily,
    encoded: Vec<SparseState>,
}

impl Analyzer {
    pub fn new(params: &SchemeParams, caps: Caps) -> Result<Analyzer> {
        let probes = ProbeFamily::new(params.field(), params.l())?;
        let encoded = probes.states().iter().map(|p| encode(params, p)).collect::<std::result::Result<_, _>>()?;
        Ok(Analyzer { params: params.clone(), caps, probes, encoded })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn probes(&self) -> &ProbeFamily {
        &self.probes
    }

    fn check_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        let sorted: Vec<usize> = subset.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if sorted.len() != subset.len() || sorted.last().is_some_and(|&i| i >= self.params.n()) {
            return Err(VerifyError::Precondition(format!("{subset:?} is not a subset of the {} shares", self.params.n())));
        }
        Ok(sorted)
    }

    /// Reduced state on `subset` identical for every probe secret.
    pub fn is_forbidden(&self, subset: &[usize]) -> Result<ForbiddenOutcome> {
        let subset = self.check_subset(subset)?;
        let rho0 = self.encoded[0].partial_trace(&subset, self.caps.dm)?;
        for (i, enc) in self.encoded.iter().enumerate().skip(1) {
            let rho = enc.partial_trace(&subset, self.caps.dm)?;
            if !rho.exact_eq(&rho0)? {
                let witness = Witness {
                    claim: Claim::Distinct,
                    subset,
                    coords: None,
                    secret_a: self.probes.states()[0].clone(),
                    secret_b: self.probes.states()[i].clone(),
                    rho_a: rho0,
                    rho_b: rho,
                };
                return Ok(ForbiddenOutcome { forbidden: false, witness: Some(witness) });
            }
        }
        Ok(ForbiddenOutcome { forbidden: true, witness: None })
    }

    /// Runs reconstruction on every probe when `|subset| ≥ k`; otherwise
    /// searches for orthogonal probes whose reduced states overlap.
    pub fn is_qualified(&self, subset: &[usize]) -> Result<QualifiedOutcome> {
        let subset = self.check_subset(subset)?;
        if subset.len() >= self.params.k() {
            return self.reconstruct_all(&subset);
        }
        let basis = self.probes.basis_count();
        let states = self.probes.states();
        let rhos: Vec<DensityMatrix> =
            self.encoded[..basis].iter().map(|e| e.partial_trace(&subset, self.caps.dm)).collect::<std::result::Result<_, _>>()?;
        let mut found = None;
        'search: for i in 0..basis {
            for j in i + 1..basis {
                if !amplitude::is_zero(&rhos[i].trace_product(&rhos[j])?) {
                    found = Some((i, j, rhos[i].clone(), rhos[j].clone()));
                    break 'search;
                }
            }
        }
        if found.is_none() {
            // (|s⟩+i|s'⟩) is orthogonal to (|s'⟩+i|s⟩).
            let pairs: BTreeMap<(BasisIndex, BasisIndex), usize> = states[basis..]
                .iter()
                .enumerate()
                .filter(|(_, p)| p.amplitudes().any(|(_, a)| !a.im.is_zero()))
                .map(|(i, p)| {
                    let mut it = p.amplitudes();
                    let (x, ax) = it.next().expect("two kets");
                    let (y, _) = it.next().expect("two kets");
                    // ordered as (real-amplitude ket, imaginary-amplitude ket)
                    let key = if ax.im.is_zero() { (x.clone(), y.clone()) } else { (y.clone(), x.clone()) };
                    (key, basis + i)
                })
                .collect();
            for ((x, y), &i) in &pairs {
                let Some(&j) = pairs.get(&(y.clone(), x.clone())) else { continue };
                if j <= i {
                    continue;
                }
                let ri = self.encoded[i].partial_trace(&subset, self.caps.dm)?;
                let rj = self.encoded[j].partial_trace(&subset, self.caps.dm)?;
                if !amplitude::is_zero(&ri.trace_product(&rj)?) {
                    found = Some((i, j, ri, rj));
                    break;
                }
            }
        }
        let witness = found.map(|(i, j, rho_a, rho_b)| Witness {
            claim: Claim::NonOrthogonal,
            subset: subset.clone(),
            coords: None,
            secret_a: states[i].clone(),
            secret_b: states[j].clone(),
            rho_a,
            rho_b,
        });
        let failure = witness.is_none().then(|| format!("no obstruction to recovery found for {subset:?}"));
        Ok(QualifiedOutcome { qualified: false, transcript: None, witness, failure })
    }

    fn reconstruct_all(&self, subset: &[usize]) -> Result<QualifiedOutcome> {
        let decoder = Decoder::new(&self.params, subset, self.caps.kets)?;
        for (probe, enc) in self.probes.states().iter().zip(&self.encoded) {
            let out = decoder.reconstruct(enc);
            let ok = match &out {
                Ok(r) => states_equal(&r.secret, probe)?,
                Err(_) => false,
            };
            if !ok {
                let detail = match out {
                    Ok(r) => format!("recovered {:?} instead of {:?}", r.secret, probe),
                    Err(e) => format!("reconstruction of {probe:?} failed: {e}"),
                };
                return Ok(QualifiedOutcome { qualified: false, transcript: None, witness: None, failure: Some(detail) });
            }
        }
        let transcript = Transcript {
            decoder_shares: subset[..self.params.k()].to_vec(),
            probes_recovered: self.probes.states().len(),
        };
        Ok(QualifiedOutcome { qualified: true, transcript: Some(transcript), witness: None, failure: None })
    }

    /// Classifies every subset of the `n` shares.
    pub fn access_structure_report(&self) -> Result<AccessReport> {
        let n = self.params.n();
        if n > 12 {
            return Err(VerifyError::Precondition(format!("{n} shares give too many subsets to enumerate")));
        }
        let subsets: Vec<Vec<usize>> = (0..=n).flat_map(|size| (0..n).combinations(size)).collect();
        let mut forbidden: BTreeMap<Vec<usize>, ForbiddenOutcome> = BTreeMap::new();
        for s in &subsets {
            forbidden.insert(s.clone(), self.is_forbidden(s)?);
        }
        let mut rows = Vec::with_capacity(subsets.len());
        for s in &subsets {
            let f = &forbidden[s];
            let q = self.is_qualified(s)?;
            let complement: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
            let verdict = match (q.qualified, f.forbidden) {
                (true, false) => Verdict::Qualified,
                (false, true) => Verdict::Forbidden,
                (false, false) => Verdict::Intermediate,
                (true, true) => {
                    return Err(VerifyError::Precondition(format!("{s:?} is both qualified and forbidden")));
                }
            };
            rows.push(SubsetClassification {
                subset: s.clone(),
                verdict,
                witness: f.witness.clone().or(q.witness),
                transcript: q.transcript,
                duality_holds: q.qualified == forbidden[&complement].forbidden,
            });
        }
        let mut by_size: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
        for r in &rows {
            by_size.entry(r.subset.len()).or_default().insert(r.verdict.to_string());
        }
        Ok(AccessReport {
            size_determined: by_size.values().all(|v| v.len() == 1),
            thresholds_match: rows.iter().all(|r| r.verdict == threshold_verdict(&self.params, r.subset.len())),
            duality_holds: rows.iter().all(|r| r.duality_holds),
            rows,
        })
    }

    /// Every `(k-L)`-subset forbidden and every `(k-L+1)`-subset not, each
    /// negative backed by a witness re-checked from its serialized form.
    pub fn max_advance_check(&self) -> Result<MaxAdvanceReport> {
        let n = self.params.n();
        let free = self.params.free();
        let mut report = MaxAdvanceReport::default();
        for s in (0..n).combinations(free) {
            if self.is_forbidden(&s)?.forbidden {
                report.forbidden_at_max += 1;
            } else {
                report.failures.push(format!("{} is not forbidden", one_based(&s)));
            }
        }
        if free < n {
            for s in (0..n).combinations(free + 1) {
                match self.is_forbidden(&s)? {
                    ForbiddenOutcome { forbidden: false, witness: Some(w) } => {
                        let parsed = Witness::from_text(&w.to_text())?;
                        if parsed.recheck(&self.params, self.caps)? {
                            report.not_forbidden_above += 1;
                            report.witness.get_or_insert(w);
                        } else {
                            report.failures.push(format!("witness for {} fails its re-check", one_based(&s)));
                        }
                    }
                    _ => report.failures.push(format!("{} is forbidden", one_based(&s))),
                }
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Default)]
pub struct MaxAdvanceReport {
    pub forbidden_at_max: usize,
    pub not_forbidden_above: usize,
    pub witness: Option<Witness>,
    pub failures: Vec<String>,
}

impl MaxAdvanceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn one_based(s: &[usize]) -> String {
    format!("{{{}}}", s.iter().map(|i| i + 1).join(","))
}

pub fn is_forbidden(params: &SchemeParams, subset: &[usize], caps: Caps) -> Result<ForbiddenOutcome> {
    Analyzer::new(params, caps)?.is_forbidden(subset)
}

pub fn is_qualified(params: &SchemeParams, subset: &[usize], caps: Caps) -> Result<QualifiedOutcome> {
    Analyzer::new(params, caps)?.is_qualified(subset)
}

pub fn access_structure_report(params: &SchemeParams, caps: Caps) -> Result<AccessReport> {
    Analyzer::new(params, caps)?.access_structure_report()
}

pub fn max_advance_check(params: &SchemeParams, caps: Caps) -> Result<MaxAdvanceReport> {
    Analyzer::new(params, caps)?.max_advance_check()
}

/// Failure details of an equivalence run: the secret, both encodings, and
/// their supports `V1` (direct) and `V2` (advance).
#[derive(Debug, Clone)]
pub struct EquivalenceFailure {
    pub secret: SparseState,
    pub direct: SparseState,
    pub advanced: SparseState,
    pub v1: Vec<BasisIndex>,
    pub v2: Vec<BasisIndex>,
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub advanced_shares: Vec<usize>,
    pub basis_secrets: usize,
    pub superposed_secrets: usize,
    pub kets_per_basis_state: usize,
    pub failure: Option<EquivalenceFailure>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Random secret on `width` qudits: 2 to 4 distinct basis kets with complex
/// rational coefficients whose parts have numerators and denominators at
/// most 7 in absolute value, normalized exactly.
pub fn random_superposition(field: &Field, width: usize, rng: &mut ChaCha8Rng) -> Result<SparseState> {
    let total = (field.order() as u64).saturating_pow(width as u32);
    let terms = rng.gen_range(2..=4u64).min(total);
    let mut chosen: BTreeSet<BasisIndex> = BTreeSet::new();
    while (chosen.len() as u64) < terms {
        chosen.insert(BasisIndex((0..width).map(|_| rng.gen_range(0..field.order())).collect()));
    }
    let part = |rng: &mut ChaCha8Rng| Rational::new(rng.gen_range(-7i64..=7).into(), rng.gen_range(1i64..=7).into());
    let kets: Vec<(BasisIndex, ComplexRational)> = chosen
        .into_iter()
        .map(|k| loop {
            let a = ComplexRational::new(part(rng), part(rng));
            if !amplitude::is_zero(&a) {
                break (k.clone(), a);
            }
        })
        .collect();
    Ok(SparseState::from_parts(field, width, kets, 0, Rational::one())?.normalized()?)
}

/// Direct encoding against advance sharing of `advanced` (0-based) for every
/// basis secret and `superposed` seeded random secrets.
pub fn equivalence_check(params: &SchemeParams, advanced: &[usize], superposed: usize, seed: u64, caps: Caps) -> Result<EquivalenceReport> {
    let session = advance_setup(params, advanced, caps.kets)?;
    equivalence_check_with(&session, session.completion(), superposed, seed)
}

/// As [`equivalence_check`] with a caller-supplied completion map.
pub fn equivalence_check_with<M: BasisMap>(
    session: &AdvanceSession,
    map: &VerifiedMap<M>,
    superposed: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    let params = session.params();
    let mut report = EquivalenceReport {
        advanced_shares: session.advanced().to_vec(),
        basis_secrets: 0,
        superposed_secrets: 0,
        kets_per_basis_state: (params.field().order() as usize).pow(params.free() as u32),
        failure: None,
    };
    let mut compare = |secret: SparseState| -> Result<bool> {
        let direct = encode(params, &secret)?;
        let adv = advance_complete_with(session, map, &secret)?;
        if direct == adv || states_equal(&direct, &adv)? {
            return Ok(true);
        }
        report.failure = Some(EquivalenceFailure {
            v1: direct.support().cloned().collect(),
            v2: adv.support().cloned().collect(),
            secret,
            direct,
            advanced: adv,
        });
        Ok(false)
    };
    for s in params.basis_secrets() {
        if !compare(s.to_state(params))? {
            return Ok(report);
        }
        report.basis_secrets += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..superposed {
        let secret = random_superposition(params.field(), params.l(), &mut rng)?;
        if !compare(secret)? {
            return Ok(report);
        }
        report.superposed_secrets += 1;
    }
    Ok(report)
}

/// Whether shares `subset` learn nothing about secret coordinates `coords`
/// when the other coordinates are unknown (maximally mixed). Returns a
/// witness when they do.
pub fn strong_invariance(params: &SchemeParams, subset: &[usize], coords: &[usize], caps: Caps) -> Result<Option<Witness>> {
    if subset.len() + coords.len() > params.k() {
        return Err(VerifyError::Precondition(format!(
            "|S| + |T| = {} exceeds k = {}",
            subset.len() + coords.len(),
            params.k()
        )));
    }
    if coords.is_empty() {
        return Ok(None);
    }
    let family = ProbeFamily::new(params.field(), coords.len())?;
    let probes = family.states();
    let rho0 = reduced_state(params, &probes[0], Some(coords), subset, caps)?;
    for p in &probes[1..] {
        let rho = reduced_state(params, p, Some(coords), subset, caps)?;
        if !rho.exact_eq(&rho0)? {
            return Ok(Some(Witness {
                claim: Claim::Distinct,
                subset: subset.to_vec(),
                coords: Some(coords.to_vec()),
                secret_a: probes[0].clone(),
                secret_b: p.clone(),
                rho_a: rho0,
                rho_b: rho,
            }));
        }
    }
    Ok(None)
}

/// Strong security of the ZM scheme for one `(S, T)` pair.
pub fn strong_security_check(params: &SchemeParams, subset: &[usize], coords: &[usize], caps: Caps) -> Result<bool> {
    params.require_kind(SchemeKind::Zm)?;
    Ok(strong_invariance(params, subset, coords, caps)?.is_none())
}

#[derive(Debug, Clone)]
pub struct StrongSweep {
    pub pairs_checked: usize,
    pub witness: Option<Witness>,
}

/// Every `(S, T)` with `T` nonempty and `|S| + |T| ≤ k`, stopping at the
/// first leak.
pub fn strong_security_sweep(params: &SchemeParams, caps: Caps) -> Result<StrongSweep> {
    let mut pairs_checked = 0;
    for t_size in 1..=params.l() {
        for s_size in 0..=(params.k() - t_size).min(params.n()) {
            for s in (0..params.n()).combinations(s_size) {
                for t in (0..params.l()).combinations(t_size) {
                    pairs_checked += 1;
                    if let Some(w) = strong_invariance(params, &s, &t, caps)? {
                        return Ok(StrongSweep { pairs_checked, witness: Some(w) });
                    }
                }
            }
        }
    }
    Ok(StrongSweep { pairs_checked, witness: None })
}

#[derive(Debug, Clone)]
pub enum LeakageOutcome {
    Witness(Witness),
    Inconclusive { pairs_checked: usize },
    /// `L = 1`: no proper part of the secret to leak.
    Vacuous,
}

/// Searches an Ogawa configuration for a share set that learns part of the
/// secret although `|S| + |T| ≤ k`.
pub fn leakage_demo_ogawa(params: &SchemeParams, caps: Caps) -> Result<LeakageOutcome> {
    params.require_kind(SchemeKind::Ogawa)?;
    if params.l() < 2 {
        return Ok(LeakageOutcome::Vacuous);
    }
    let sweep = strong_security_sweep(params, caps)?;
    Ok(match sweep.witness {
        Some(w) => LeakageOutcome::Witness(w),
        None => LeakageOutcome::Inconclusive { pairs_checked: sweep.pairs_checked },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// One report line: `CHECK <name> <params-hash> <status> [witness-file]`.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub params_hash: String,
    pub status: CheckStatus,
    pub witness_file: Option<String>,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CHECK {} {} {}", self.name, self.params_hash, self.status)?;
        if let Some(w) = &self.witness_file {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> SchemeParams {
        SchemeParams::ogawa(&Field::new(2, 2).unwrap(), 2, 1, vec![2, 3, 1]).unwrap()
    }

    fn gf7_zm() -> SchemeParams {
        SchemeParams::zm(&Field::new(7, 1).unwrap(), 3, 2, vec![6, 2, 4, 5], vec![1, 3]).unwrap()
    }

    #[test]
    fn probe_family_spans_operator_space() {
        let f = Field::new(2, 2).unwrap();
        let p = ProbeFamily::new(&f, 1).unwrap();
        assert_eq!(p.states().len(), 4 + 2 * 12);
        assert_eq!(p.rank(), 16);
        assert_eq!(p.basis_count(), 4);
        assert!(p.states().iter().all(SparseState::is_normalized));
        // basis states alone span only the diagonal
        assert_eq!(operator_rank(&p.states()[..4]), 4);
    }

    #[test]
    fn forbidden_examples() {
        let a = Analyzer::new(&gf4(), Caps::default()).unwrap();
        assert!(a.is_forbidden(&[0]).unwrap().forbidden);
        assert!(a.is_forbidden(&[]).unwrap().forbidden);
        let out = a.is_forbidden(&[1, 2]).unwrap();
        assert!(!out.forbidden);
        assert!(out.witness.unwrap().recheck(&gf4(), Caps::default()).unwrap());
        assert!(a.is_forbidden(&[0, 0]).is_err());
        // reduced state of a single share is I/4
        let rho = reduced_state(&gf4(), &a.probes().states()[5], None, &[2], Caps::default()).unwrap();
        assert_eq!(rho, DensityMatrix::maximally_mixed(gf4().field(), vec![2], 100).unwrap());
    }

    #[test]
    fn qualified_examples() {
        let a = Analyzer::new(&gf4(), Caps::default()).unwrap();
        let full = a.is_qualified(&[0, 1, 2]).unwrap();
        assert!(full.qualified);
        assert_eq!(full.transcript.unwrap().probes_recovered, 28);
        let single = a.is_qualified(&[1]).unwrap();
        assert!(!single.qualified);
        let w = single.witness.unwrap();
        assert_eq!(w.claim, Claim::NonOrthogonal);
        assert!(w.recheck(&gf4(), Caps::default()).unwrap());
    }

    #[test]
    fn witness_text_round_trip_and_tamper_detection() {
        let a = Analyzer::new(&gf4(), Caps::default()).unwrap();
        let w = a.is_forbidden(&[0, 2]).unwrap().witness.unwrap();
        let back = Witness::from_text(&w.to_text()).unwrap();
        assert_eq!(back, w);
        let mut tampered = back.clone();
        tampered.rho_b = tampered.rho_a.clone();
        assert!(!tampered.recheck(&gf4(), Caps::default()).unwrap());
        assert!(Witness::from_text("nonsense").is_err());
    }

    #[test]
    fn zm_pair_leaks_when_other_coordinate_is_known() {
        // Fixing s_1 and varying s_2 is visible to two shares; with s_1
        // unknown it is not.
        let p = gf7_zm();
        let caps = Caps::default();
        assert!(strong_invariance(&p, &[0, 1], &[1], caps).unwrap().is_none());
        let f = p.field();
        let rho = |s2: u32| encode(&p, &SparseState::basis(f, &[0, s2]).unwrap()).unwrap().partial_trace(&[0, 1], 100).unwrap();
        assert!(!rho(0).exact_eq(&rho(1)).unwrap());
    }

    #[test]
    fn strong_security_preconditions() {
        let caps = Caps::default();
        assert!(strong_security_check(&gf7_zm(), &[0], &[], caps).unwrap());
        assert!(strong_security_check(&gf7_zm(), &[0], &[1], caps).unwrap());
        assert!(matches!(strong_security_check(&gf7_zm(), &[0, 1], &[0, 1], caps), Err(VerifyError::Precondition(_))));
        assert!(matches!(strong_security_check(&gf4(), &[0], &[0], caps), Err(VerifyError::Scheme(SchemeError::WrongKind { .. }))));
        assert!(matches!(leakage_demo_ogawa(&gf4(), caps), Ok(LeakageOutcome::Vacuous)));
    }

    #[test]
    fn random_superpositions_are_normalized_and_seeded() {
        let f = Field::new(3, 1).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = random_superposition(&f, 2, &mut r1).unwrap();
            assert!(a.is_normalized());
            assert!((2..=4).contains(&a.len()));
            assert_eq!(a, random_superposition(&f, 2, &mut r2).unwrap());
        }
    }

    #[test]
    fn check_line_format() {
        let line = CheckLine { name: "access".into(), params_hash: gf4().params_hash(), status: CheckStatus::Pass, witness_file: None };
        assert_eq!(line.to_string(), format!("CHECK access {} PASS", gf4().params_hash()));
        assert_eq!(gf4().params_hash().len(), 12);
    }
}
