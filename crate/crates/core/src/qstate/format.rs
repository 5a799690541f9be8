//! Text serialization of sparse states.
//!
//! ```text
//! qramp-state v1; field=2^2/1,1,1; registers=3; scale_exp=1
//! 0 0 0 1/1 0/1
//! 1 3 2 1/1 0/1
//! ```
//!
//! A `; norm=<num>/<den>` header field follows `scale_exp` only when the
//! extra normalization divisor differs from 1. Kets are sorted
//! lexicographically, so equal states serialize to identical bytes.

use std::fmt::Write as _;

use num_traits::One;

use super::amplitude::{self, ComplexRational, Rational};
use super::{BasisIndex, Result, SparseState, StateError};
use crate::gf::Field;

const MAGIC: &str = "qramp-state v1";

impl SparseState {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{MAGIC}; field={}; registers={}; scale_exp={}",
            self.field.descriptor(),
            self.registers,
            self.scale_exp
        );
        if !self.norm_div.is_one() {
            let _ = write!(out, "; norm={}", amplitude::format_rational(&self.norm_div));
        }
        out.push('\n');
        for (idx, a) in &self.amps {
            for v in idx.iter() {
                let _ = write!(out, "{v} ");
            }
            let _ = writeln!(out, "{} {}", amplitude::format_rational(&a.re), amplitude::format_rational(&a.im));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<SparseState> {
        let bad = |m: String| StateError::Parse(m);
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
        let mut fields = header.split(';').map(str::trim);
        if fields.next() != Some(MAGIC) {
            return Err(bad(format!("expected '{MAGIC}' header")));
        }
        let (mut field, mut registers, mut scale_exp) = (None, None, None);
        let mut norm_div = Rational::one();
        for kv in fields {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("bad header field '{kv}'")))?;
            match k.trim() {
                "field" => field = Some(Field::from_descriptor(v.trim())?),
                "registers" => registers = v.trim().parse::<usize>().ok(),
                "scale_exp" => scale_exp = v.trim().parse::<u32>().ok(),
                "norm" => {
                    norm_div = amplitude::parse_rational(v).ok_or_else(|| bad(format!("bad norm '{v}'")))?
                }
                other => return Err(bad(format!("unknown header field '{other}'"))),
            }
        }
        let field = field.ok_or_else(|| bad("missing field".into()))?;
        let registers = registers.ok_or_else(|| bad("missing or bad registers".into()))?;
        let scale_exp = scale_exp.ok_or_else(|| bad("missing or bad scale_exp".into()))?;
        let mut kets = Vec::new();
        let mut prev: Option<BasisIndex> = None;
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != registers + 2 {
                return Err(bad(format!("ket line {} has {} fields, expected {}", n + 2, parts.len(), registers + 2)));
            }
            let idx: Vec<u32> = parts[..registers]
                .iter()
                .map(|p| p.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(format!("bad index on ket line {}", n + 2)))?;
            let idx = BasisIndex::from(idx);
            if prev.as_ref().is_some_and(|p| p >= &idx) {
                return Err(bad(format!("kets not strictly sorted at line {}", n + 2)));
            }
            let re = amplitude::parse_rational(parts[registers]).ok_or_else(|| bad("bad real part".into()))?;
            let im = amplitude::parse_rational(parts[registers + 1]).ok_or_else(|| bad("bad imaginary part".into()))?;
            let a = ComplexRational::new(re, im);
            if amplitude::is_zero(&a) {
                return Err(bad(format!("zero amplitude on line {}", n + 2)));
            }
            prev = Some(idx.clone());
            kets.push((idx, a));
        }
        SparseState::from_parts(&field, registers, kets, scale_exp, norm_div)
    }
}
