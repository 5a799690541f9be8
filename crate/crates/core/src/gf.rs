//! Arithmetic in prime-power fields GF(p^m).
//!
//! Elements are encoded as canonical integers in `[0, q)` whose base-`p`
//! digits are the polynomial-basis coordinates (digit `i` is the coefficient
//! of `x^i`). The reference arithmetic works on those digit vectors modulo a
//! monic irreducible polynomial; log/exp and addition tables built from it
//! serve the hot paths.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

/// Largest field order accepted by [`Field::new`].
pub const DEFAULT_FIELD_CAP: u32 = 1 << 16;

/// Full addition tables are precomputed up to this order.
const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{m} exceeds the cap of {cap}")]
    OverCap { p: u32, m: u32, cap: u32 },
    #[error("modulus [{0}] is not a monic irreducible polynomial of degree {1}")]
    BadModulus(String, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} vs {1})")]
    MixedFields(String, String),
    #[error("value {value} is not an element of GF({q})")]
    OutOfRange { value: u64, q: u32 },
    #[error("malformed field descriptor '{0}': {1}")]
    Descriptor(String, String),
}

pub type Result<T> = std::result::Result<T, GfError>;

struct FieldInner {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
    neg: Vec<u32>,
}

/// A finite field `GF(p^m)`. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl Field {
    /// Builds `GF(p^m)` with the canonical modulus: the monic irreducible
    /// polynomial of degree `m` whose ascending coefficient digits form the
    /// smallest integer. For `m = 1` the modulus is `x`.
    pub fn new(p: u32, m: u32) -> Result<Field> {
        Field::with_cap(p, m, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u32, m: u32, cap: u32) -> Result<Field> {
        let q = check_order(p, m, cap)?;
        let modulus = if m == 1 {
            vec![0, 1]
        } else {
            (0..q)
                .map(|low| monic_from_low(low, p, m))
                .find(|f| is_irreducible(f, p))
                .ok_or_else(|| GfError::BadModulus(String::new(), m))?
        };
        Field::build(p, m, q, modulus)
    }

    /// Builds `GF(p^m)` over an explicit modulus (ascending coefficients,
    /// length `m + 1`, monic). The modulus is checked for irreducibility.
    pub fn with_modulus(p: u32, m: u32, modulus: &[u32]) -> Result<Field> {
        let q = check_order(p, m, DEFAULT_FIELD_CAP)?;
        let bad = || GfError::BadModulus(join(modulus), m);
        if modulus.len() != m as usize + 1 || modulus[m as usize] != 1 {
            return Err(bad());
        }
        if modulus.iter().any(|&c| c >= p) || !is_irreducible(modulus, p) {
            return Err(bad());
        }
        Field::build(p, m, q, modulus.to_vec())
    }

    /// Parses `p^m` or `p^m/c0,c1,...,cm` (ascending modulus coefficients).
    pub fn from_descriptor(text: &str) -> Result<Field> {
        let err = |why: &str| GfError::Descriptor(text.to_string(), why.to_string());
        let (order, modulus) = match text.split_once('/') {
            Some((o, m)) => (o, Some(m)),
            None => (text, None),
        };
        let (p, m) = order.trim().split_once('^').ok_or_else(|| err("expected p^m"))?;
        let p: u32 = p.trim().parse().map_err(|_| err("bad characteristic"))?;
        let m: u32 = m.trim().parse().map_err(|_| err("bad extension degree"))?;
        match modulus {
            None => Field::new(p, m),
            Some(coeffs) => {
                let coeffs = coeffs
                    .split(',')
                    .map(|c| c.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| err("bad modulus coefficient"))?;
                Field::with_modulus(p, m, &coeffs)
            }
        }
    }

    /// `p^m` for prime fields, `p^m/c0,...,cm` otherwise.
    pub fn descriptor(&self) -> String {
        if self.0.m == 1 {
            format!("{}^1", self.0.p)
        } else {
            format!("{}^{}/{}", self.0.p, self.0.m, join(&self.0.modulus))
        }
    }

    fn build(p: u32, m: u32, q: u32, modulus: Vec<u32>) -> Result<Field> {
        let mut inner = FieldInner {
            p,
            m,
            q,
            modulus,
            primitive: 0,
            exp: Vec::new(),
            log: Vec::new(),
            add_table: None,
            neg: Vec::new(),
        };
        inner.neg = (0..q).map(|a| digit_map(a, p, m, |d| (p - d) % p)).collect();
        if q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = digit_add(a, b, p, m);
                }
            }
            inner.add_table = Some(table);
        }
        let order = q - 1;
        let factors = prime_factors(order);
        inner.primitive = (1..q)
            .find(|&g| {
                order == 1
                    || factors
                        .iter()
                        .all(|&f| pow_slow(&inner, g, (order / f) as u64) != 1)
            })
            .ok_or_else(|| GfError::BadModulus(join(&inner.modulus), m))?;
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut acc = 1u32;
        for i in 0..order {
            exp.push(acc);
            if log[acc as usize] != u32::MAX {
                return Err(GfError::BadModulus(join(&inner.modulus), m));
            }
            log[acc as usize] = i;
            acc = mul_slow(&inner, acc, inner.primitive);
        }
        inner.exp = exp;
        inner.log = log;
        Ok(Field(Arc::new(inner)))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.m
    }

    /// Field order `q = p^m`.
    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn primitive(&self) -> FieldElement {
        self.wrap(self.0.primitive)
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(1)
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        self.check(value)?;
        Ok(self.wrap(value))
    }

    /// All `q` elements in ascending canonical order.
    pub fn all_elements(&self) -> Vec<FieldElement> {
        (0..self.0.q).map(|v| self.wrap(v)).collect()
    }

    /// Every tuple in `F_q^len`, lexicographically ascending.
    pub fn tuples(&self, len: usize) -> TupleIter {
        TupleIter::new(self.0.q, len)
    }

    pub fn check(&self, value: u32) -> Result<()> {
        if value < self.0.q {
            Ok(())
        } else {
            Err(GfError::OutOfRange { value: value as u64, q: self.0.q })
        }
    }

    pub fn same_field(&self, other: &Field) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(GfError::MixedFields(self.descriptor(), other.descriptor()))
        }
    }

    fn wrap(&self, value: u32) -> FieldElement {
        FieldElement { field: self.clone(), value }
    }

    // Raw arithmetic on canonical integers. Callers guarantee range.

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let f = &*self.0;
        match &f.add_table {
            Some(t) => t[(a * f.q + b) as usize],
            None if f.p == 2 => a ^ b,
            None => digit_add(a, b, f.p, f.m),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let f = &*self.0;
        let s = f.log[a as usize] + f.log[b as usize];
        let order = f.q - 1;
        f.exp[if s >= order { s - order } else { s } as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        let f = &*self.0;
        let l = f.log[a as usize];
        Ok(f.exp[if l == 0 { 0 } else { (f.q - 1 - l) as usize }])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let f = &*self.0;
        let order = (f.q - 1) as u64;
        f.exp[((f.log[a as usize] as u64 * (e % order)) % order) as usize]
    }

    /// Reference multiplication: schoolbook product of digit polynomials
    /// reduced by the modulus. Independent of the log/exp tables.
    pub fn mul_reference(&self, a: u32, b: u32) -> u32 {
        mul_slow(&self.0, a, b)
    }

    /// Reference inverse via the extended Euclidean algorithm on
    /// polynomials over `F_p`.
    pub fn inv_reference(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        let f = &*self.0;
        let a_poly = trim(to_digits(a, f.p, f.m));
        // Invariant: s_i * a == r_i  (mod modulus)
        let (mut r0, mut r1) = (f.modulus.clone(), a_poly);
        let (mut s0, mut s1) = (vec![], vec![1u32]);
        while !r1.is_empty() {
            let (quot, rem) = poly_divrem(&r0, &r1, f.p);
            let s2 = poly_sub(&s0, &poly_mul(&quot, &s1, f.p), f.p);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since the modulus is irreducible.
        let c_inv = inv_mod_p(r0[0], f.p);
        let inv = s0.iter().map(|&c| (c * c_inv) % f.p).collect::<Vec<_>>();
        Ok(from_digits(&poly_rem(&inv, &f.modulus, f.p), f.p))
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.m.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.descriptor())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// An element of a specific [`Field`].
///
/// The `try_*` methods report mixed-field operands as errors. The operator
/// impls panic on mixed fields, like shape mismatches in matrix libraries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn binary(&self, other: &FieldElement, op: impl Fn(&Field, u32, u32) -> Result<u32>) -> Result<FieldElement> {
        self.field.same_field(&other.field)?;
        Ok(self.field.wrap(op(&self.field, self.value, other.value)?))
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.binary(other, |f, a, b| Ok(f.add(a, b)))
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.binary(other, |f, a, b| Ok(f.sub(a, b)))
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.binary(other, |f, a, b| Ok(f.mul(a, b)))
    }

    pub fn try_div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.binary(other, |f, a, b| f.div(a, b))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.field.wrap(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.field.wrap(self.field.pow(self.value, e))
    }

    /// Smallest `d ≥ 1` with `self^d = 1`; `None` for zero.
    pub fn multiplicative_order(&self) -> Option<u32> {
        if self.value == 0 {
            return None;
        }
        (1..self.field.order()).find(|&d| self.field.pow(self.value, d as u64) == 1)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$try(&rhs).expect("mixed-field arithmetic")
            }
        }
        impl<'a> $trait<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'a FieldElement) -> FieldElement {
                self.$try(rhs).expect("mixed-field arithmetic")
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let v = self.field.neg(self.value);
        self.field.wrap(v)
    }
}

impl<'a> Neg for &'a FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.wrap(self.field.neg(self.value))
    }
}

/// Lexicographic odometer over `F_q^len`.
pub struct TupleIter {
    q: u32,
    current: Option<SmallVec<[u32; 8]>>,
}

impl TupleIter {
    fn new(q: u32, len: usize) -> TupleIter {
        TupleIter { q, current: Some(SmallVec::from_elem(0, len)) }
    }
}

impl Iterator for TupleIter {
    type Item = SmallVec<[u32; 8]>;

    fn next(&mut self) -> Option<Self::Item> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < self.q {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_order(p: u32, m: u32, cap: u32) -> Result<u32> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    if m == 0 {
        return Err(GfError::ZeroDegree);
    }
    let q = (p as u64).checked_pow(m).filter(|&q| q <= cap as u64);
    q.map(|q| q as u32).ok_or(GfError::OverCap { p, m, cap })
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn join(v: &[u32]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn to_digits(mut a: u32, p: u32, m: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(m as usize);
    for _ in 0..m {
        d.push(a % p);
        a /= p;
    }
    d
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn digit_map(a: u32, p: u32, m: u32, f: impl Fn(u32) -> u32) -> u32 {
    let d: Vec<u32> = to_digits(a, p, m).into_iter().map(f).collect();
    from_digits(&d, p)
}

fn digit_add(a: u32, b: u32, p: u32, m: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let (mut out, mut place) = (0u32, 1u32);
    for _ in 0..m {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place = place.wrapping_mul(p);
    }
    out
}

fn monic_from_low(low: u32, p: u32, m: u32) -> Vec<u32> {
    let mut f = to_digits(low, p, m);
    f.push(1);
    f
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    // p is small; Fermat.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

// Polynomials over F_p as ascending coefficient vectors; trimmed means no
// trailing zeros (the zero polynomial is empty).

fn trim(mut f: Vec<u32>) -> Vec<u32> {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn poly_divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
    let b = trim(b.to_vec());
    let mut rem = trim(a.to_vec());
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let lead_inv = inv_mod_p(*b.last().unwrap(), p);
    let mut quot = vec![0u32; rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let factor = (*rem.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        quot[shift] = factor;
        for (i, &c) in b.iter().enumerate() {
            let sub = (factor as u64 * c as u64 % p as u64) as u32;
            rem[shift + i] = (rem[shift + i] + p - sub) % p;
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    poly_divrem(a, b, p).1
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let divisor = monic_from_low(low as u32, p, d as u32);
            if poly_rem(f, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn mul_slow(f: &FieldInner, a: u32, b: u32) -> u32 {
    let prod = poly_mul(&trim(to_digits(a, f.p, f.m)), &trim(to_digits(b, f.p, f.m)), f.p);
    from_digits(&poly_rem(&prod, &f.modulus, f.p), f.p)
}

fn pow_slow(f: &FieldInner, a: u32, mut e: u64) -> u32 {
    let (mut result, mut base) = (1u32, a);
    while e > 0 {
        if e & 1 == 1 {
            result = mul_slow(f, result, base);
        }
        base = mul_slow(f, base, base);
        e >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_canonical_modulus_and_alpha_squared() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // alpha = x = 2; x^2 = x + 1 = 3 (reference: schoolbook product mod x^2+x+1)
        assert_eq!(f.mul_reference(2, 2), 3);
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.primitive().value(), 2);
    }

    #[test]
    fn gf4_alpha_times_alpha_squared_is_one() {
        let f = Field::new(2, 2).unwrap();
        let a = f.element(2).unwrap();
        let a2 = &a * &a;
        assert_eq!((&a * &a2).value(), 1);
        assert_eq!(a.multiplicative_order(), Some(3));
    }

    #[test]
    fn prime_field_is_modular_arithmetic() {
        let f = Field::new(7, 1).unwrap();
        assert_eq!(f.descriptor(), "7^1");
        assert_eq!(f.mul(3, 5), 1);
        for a in 0..7 {
            for b in 0..7 {
                assert_eq!(f.add(a, b), (a + b) % 7);
                assert_eq!(f.mul(a, b), (a * b) % 7);
            }
        }
    }

    #[test]
    fn gf9_nonzero_elements_satisfy_fermat() {
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        for a in 1..9 {
            let mut acc = 1;
            for _ in 0..8 {
                acc = f.mul_reference(acc, a);
            }
            assert_eq!(acc, 1, "a = {a}");
        }
    }

    #[test]
    fn gf8_canonical_modulus() {
        let f = Field::new(2, 3).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn all_elements_ascending() {
        let f = Field::new(2, 2).unwrap();
        let v: Vec<u32> = f.all_elements().iter().map(|e| e.value()).collect();
        assert_eq!(v, vec![0, 1, 2, 3]);
        let f = Field::new(2, 1).unwrap();
        assert_eq!(f.all_elements().len(), 2);
        let f = Field::new(7, 1).unwrap();
        let v: Vec<u32> = f.all_elements().iter().map(|e| e.value()).collect();
        assert_eq!(v, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), GfError::NotPrime(4));
        assert_eq!(Field::new(2, 0).unwrap_err(), GfError::ZeroDegree);
        assert!(matches!(Field::with_cap(3, 5, 100), Err(GfError::OverCap { .. })));
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(matches!(Field::with_modulus(2, 2, &[1, 0, 1]), Err(GfError::BadModulus(..))));
        assert!(matches!(Field::with_modulus(2, 2, &[1, 1, 0]), Err(GfError::BadModulus(..))));
    }

    #[test]
    fn division_by_zero_and_mixed_fields() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.inv(0), Err(GfError::DivisionByZero));
        assert_eq!(f.inv_reference(0), Err(GfError::DivisionByZero));
        let g = Field::new(7, 1).unwrap();
        let a = f.element(2).unwrap();
        let b = g.element(2).unwrap();
        assert!(matches!(a.try_add(&b), Err(GfError::MixedFields(..))));
        assert!(matches!(a.try_div(&f.zero()), Err(GfError::DivisionByZero)));
        assert!(f.element(5).is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        for d in ["2^2/1,1,1", "7^1", "3^2/1,0,1", "2^3/1,1,0,1"] {
            let f = Field::from_descriptor(d).unwrap();
            assert_eq!(f.descriptor(), d);
        }
        // explicit alternative modulus for GF(8)
        let f = Field::from_descriptor("2^3/1,0,1,1").unwrap();
        assert_ne!(f, Field::new(2, 3).unwrap());
        assert!(Field::from_descriptor("2^x").is_err());
        assert!(Field::from_descriptor("2^2/1,1").is_err());
    }

    #[test]
    fn tuple_enumeration() {
        let f = Field::new(3, 1).unwrap();
        let all: Vec<_> = f.tuples(2).map(|t| t.to_vec()).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[8], vec![2, 2]);
        assert_eq!(f.tuples(0).count(), 1);
    }
}
