//! Classical relabelings of computational-basis tuples. A bijective (or, for
//! growing arity, injective) relabeling acts as a unitary (isometry) on the
//! selected registers.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use super::StateError;
use crate::gf::Field;

pub type Tuple = SmallVec<[u32; 8]>;

/// Number of random probes used when a map's domain is too large to exhaust.
const SAMPLE_PROBES: usize = 4096;

pub trait BasisMap {
    fn in_arity(&self) -> usize;
    fn out_arity(&self) -> usize;
    fn apply(&self, input: &[u32]) -> Tuple;

    /// Preimage of `output`, if the map knows how to invert itself.
    fn inverse(&self, _output: &[u32]) -> Option<Tuple> {
        None
    }
}

impl<M: BasisMap + ?Sized> BasisMap for &M {
    fn in_arity(&self) -> usize {
        (**self).in_arity()
    }
    fn out_arity(&self) -> usize {
        (**self).out_arity()
    }
    fn apply(&self, input: &[u32]) -> Tuple {
        (**self).apply(input)
    }
    fn inverse(&self, output: &[u32]) -> Option<Tuple> {
        (**self).inverse(output)
    }
}

/// How a [`VerifiedMap`] was checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    /// Every domain tuple was mapped and images compared.
    Exhaustive,
    /// Seeded sample of round trips through the map's inverse.
    Sampled,
}

/// A basis map whose injectivity (bijectivity for equal arity) over
/// `F_q^in` has been checked.
pub struct VerifiedMap<M> {
    map: M,
    field: Field,
    how: Verification,
}

impl<M: BasisMap> VerifiedMap<M> {
    /// Exhausts the domain when `q^in ≤ cap`; otherwise round-trips a seeded
    /// sample through [`BasisMap::inverse`] in both directions.
    pub fn verify(map: M, field: &Field, cap: u64) -> Result<VerifiedMap<M>, StateError> {
        let (din, dout) = (map.in_arity(), map.out_arity());
        if dout < din {
            return Err(StateError::NotBijective(format!(
                "arity shrinks from {din} to {dout}"
            )));
        }
        let q = field.order();
        let domain = (q as u64).checked_pow(din as u32).unwrap_or(u64::MAX);
        let check_image = |img: &[u32], input: &[u32]| -> Result<(), StateError> {
            if img.len() != dout || img.iter().any(|&v| v >= q) {
                return Err(StateError::NotBijective(format!(
                    "image of {input:?} is not a tuple in F_q^{dout}: {img:?}"
                )));
            }
            Ok(())
        };
        let how = if domain <= cap {
            let mut seen: HashSet<Tuple> = HashSet::with_capacity(domain as usize);
            for input in field.tuples(din) {
                let img = map.apply(&input);
                check_image(&img, &input)?;
                if !seen.insert(img.clone()) {
                    return Err(StateError::NotBijective(format!(
                        "two inputs map to {img:?} (one of them {input:?})"
                    )));
                }
            }
            Verification::Exhaustive
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_b1ec);
            for _ in 0..SAMPLE_PROBES {
                let input: Tuple = (0..din).map(|_| rng.gen_range(0..q)).collect();
                let img = map.apply(&input);
                check_image(&img, &input)?;
                match map.inverse(&img) {
                    Some(back) if back == input => {}
                    Some(back) => {
                        return Err(StateError::NotBijective(format!(
                            "{input:?} -> {img:?} -> {back:?}"
                        )))
                    }
                    None => {
                        return Err(StateError::CapExceeded(format!(
                            "domain of {domain} tuples exceeds the cap {cap} and the map has no inverse to sample"
                        )))
                    }
                }
                if din == dout {
                    let target: Tuple = (0..dout).map(|_| rng.gen_range(0..q)).collect();
                    let pre = map.inverse(&target).ok_or_else(|| {
                        StateError::NotBijective(format!("{target:?} has no preimage"))
                    })?;
                    if map.apply(&pre)[..] != target[..] {
                        return Err(StateError::NotBijective(format!(
                            "{target:?} -> {pre:?} does not map back"
                        )));
                    }
                }
            }
            Verification::Sampled
        };
        Ok(VerifiedMap { map, field: field.clone(), how })
    }

    pub fn map(&self) -> &M {
        &self.map
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn verification(&self) -> Verification {
        self.how
    }
}

/// Register permutation within the selected registers: output `j` is input
/// `perm[j]`.
#[derive(Debug, Clone)]
pub struct PermutationMap {
    perm: Vec<usize>,
}

impl PermutationMap {
    pub fn new(perm: Vec<usize>) -> Result<PermutationMap, StateError> {
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        if sorted != (0..perm.len()).collect::<Vec<_>>() {
            return Err(StateError::NotBijective(format!("{perm:?} is not a permutation")));
        }
        Ok(PermutationMap { perm })
    }

    pub fn identity(arity: usize) -> PermutationMap {
        PermutationMap { perm: (0..arity).collect() }
    }
}

impl BasisMap for PermutationMap {
    fn in_arity(&self) -> usize {
        self.perm.len()
    }
    fn out_arity(&self) -> usize {
        self.perm.len()
    }
    fn apply(&self, input: &[u32]) -> Tuple {
        self.perm.iter().map(|&i| input[i]).collect()
    }
    fn inverse(&self, output: &[u32]) -> Option<Tuple> {
        let mut back: Tuple = SmallVec::from_elem(0, self.perm.len());
        for (j, &i) in self.perm.iter().enumerate() {
            back[i] = output[j];
        }
        Some(back)
    }
}

/// Adapter turning closures into a [`BasisMap`].
pub struct FnMap<F, G = fn(&[u32]) -> Option<Tuple>> {
    in_arity: usize,
    out_arity: usize,
    forward: F,
    backward: Option<G>,
}

impl<F: Fn(&[u32]) -> Tuple> FnMap<F> {
    pub fn new(in_arity: usize, out_arity: usize, forward: F) -> Self {
        FnMap { in_arity, out_arity, forward, backward: None }
    }
}

impl<F: Fn(&[u32]) -> Tuple, G: Fn(&[u32]) -> Option<Tuple>> FnMap<F, G> {
    pub fn with_inverse(in_arity: usize, out_arity: usize, forward: F, backward: G) -> Self {
        FnMap { in_arity, out_arity, forward, backward: Some(backward) }
    }
}

impl<F: Fn(&[u32]) -> Tuple, G: Fn(&[u32]) -> Option<Tuple>> BasisMap for FnMap<F, G> {
    fn in_arity(&self) -> usize {
        self.in_arity
    }
    fn out_arity(&self) -> usize {
        self.out_arity
    }
    fn apply(&self, input: &[u32]) -> Tuple {
        (self.forward)(input)
    }
    fn inverse(&self, output: &[u32]) -> Option<Tuple> {
        self.backward.as_ref().and_then(|g| g(output))
    }
}
