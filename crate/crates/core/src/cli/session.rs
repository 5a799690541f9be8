//! On-disk form of an advance-sharing session between `advance` and
//! `complete`.
//!
//! ```text
//! qramp-session v1
//! params: scheme=ogawa field=2^2/1,1,1 n=3 k=2 L=1 alphas=2,3,1 betas=
//! advanced: 1
//! --- resource
//! qramp-state v1; field=2^2/1,1,1; registers=2; scale_exp=1
//! ...
//! ```

use itertools::Itertools;

use crate::qstate::SparseState;
use crate::schemes::{advance_setup, AdvanceSession, SchemeParams};

use super::CliError;

const MAGIC: &str = "qramp-session v1";

#[derive(Debug, Clone, PartialEq)]
pub struct SessionFile {
    pub params: SchemeParams,
    /// 0-based.
    pub advanced: Vec<usize>,
    pub resource: SparseState,
}

impl SessionFile {
    pub fn from_session(session: &AdvanceSession) -> SessionFile {
        SessionFile {
            params: session.params().clone(),
            advanced: session.advanced().to_vec(),
            resource: session.resource().clone(),
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "{MAGIC}\nparams: {}\nadvanced: {}\n--- resource\n{}",
            self.params.descriptor(),
            self.advanced.iter().map(|i| i + 1).join(","),
            self.resource.to_text()
        )
    }

    pub fn from_text(text: &str) -> Result<SessionFile, CliError> {
        let bad = |m: &str| CliError::Usage(format!("session file: {m}"));
        let (head, body) = text.split_once("--- resource\n").ok_or_else(|| bad("missing resource section"))?;
        let mut lines = head.lines();
        if lines.next() != Some(MAGIC) {
            return Err(bad("bad header"));
        }
        let params = lines
            .next()
            .and_then(|l| l.strip_prefix("params: "))
            .ok_or_else(|| bad("missing params line"))?;
        let params = SchemeParams::from_descriptor(params)?;
        let advanced = lines
            .next()
            .and_then(|l| l.strip_prefix("advanced:"))
            .ok_or_else(|| bad("missing advanced line"))?;
        let advanced = super::config::parse_csv::<usize>(advanced.trim())
            .map_err(|e| bad(&e))?
            .into_iter()
            .map(|i| super::config::to_zero_based(i, params.n()))
            .collect::<Result<_, _>>()?;
        Ok(SessionFile { params, advanced, resource: SparseState::from_text(body)? })
    }

    /// Rebuilds the session around the stored resource state.
    pub fn resume(&self, cap: u64) -> Result<AdvanceSession, CliError> {
        Ok(advance_setup(&self.params, &self.advanced, cap)?.with_resource(self.resource.clone())?)
    }
}
