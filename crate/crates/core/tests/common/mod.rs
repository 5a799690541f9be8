//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use qramp::gf::Field;
use qramp::schemes::SchemeParams;

/// GF(4) = F_2[x]/(x²+x+1), α = x (canonical integer 2), α_i = α^i.
pub fn ogawa_q4() -> SchemeParams {
    let f = Field::from_descriptor("2^2/1,1,1").unwrap();
    SchemeParams::ogawa(&f, 2, 1, vec![2, 3, 1]).unwrap()
}

/// The GF(7) worked example: α = (6, 2, 4, 5), β = (1, 3).
pub fn zm_q7() -> SchemeParams {
    let f = Field::new(7, 1).unwrap();
    SchemeParams::zm(&f, 3, 2, vec![6, 2, 4, 5], vec![1, 3]).unwrap()
}

/// `(k, L)` with `n = 2k - L` for every `1 ≤ L ≤ n ≤ max_n`.
pub fn shapes(max_n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for l in 1..=n {
            if (n + l) % 2 == 0 {
                out.push((n, (n + l) / 2, l));
            }
        }
    }
    out
}

/// Ogawa schemes with `α_i = γ^i` for the primitive element `γ`.
pub fn ogawa_sweep(qs: &[(u32, u32)], max_n: usize) -> Vec<SchemeParams> {
    let mut out = Vec::new();
    for &(p, m) in qs {
        let f = Field::new(p, m).unwrap();
        let g = f.primitive().value();
        for (n, k, l) in shapes(max_n) {
            if n as u32 <= f.order() - 1 {
                let alphas = (1..=n as u64).map(|i| f.pow(g, i)).collect();
                out.push(SchemeParams::ogawa(&f, k, l, alphas).unwrap());
            }
        }
    }
    out
}

/// ZM schemes with `α_i = i - 1`, `β_j = n + j - 1`.
pub fn zm_sweep(qs: &[(u32, u32)], max_n: usize) -> Vec<SchemeParams> {
    let mut out = Vec::new();
    for &(p, m) in qs {
        let f = Field::new(p, m).unwrap();
        for (n, k, l) in shapes(max_n) {
            if n + l <= f.order() as usize {
                let alphas = (0..n as u32).collect();
                let betas = (n as u32..(n + l) as u32).collect();
                out.push(SchemeParams::zm(&f, k, l, alphas, betas).unwrap());
            }
        }
    }
    out
}

pub const ACCEPTANCE_FIELDS: [(u32, u32); 5] = [(2, 2), (5, 1), (7, 1), (2, 3), (3, 2)];
