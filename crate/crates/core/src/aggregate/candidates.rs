use std::fmt;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateSource {
    L1Cv,
    Marginal,
    All,
}

impl fmt::Display for CandidateSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            CandidateSource::L1Cv => "l1cv",
            CandidateSource::Marginal => "marginal",
            CandidateSource::All => "all",
        })
    }
}

/// Features the chain may toggle; every other coordinate stays zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    features: Vec<usize>,
    pub source: CandidateSource,
}

impl CandidateSet {
    /// Sorts and deduplicates `features`, which must index into `p`.
    pub fn new(mut features: Vec<usize>, p: usize, source: CandidateSource) -> Result<Self> {
        features.sort_unstable();
        features.dedup();
        if let Some(&j) = features.iter().find(|&&j| j >= p) {
            return invalid(format!("candidate feature {j} out of range for p={p}"));
        }
        Ok(Self { features, source })
    }

    pub fn all(p: usize) -> Self {
        Self {
            features: (0..p).collect(),
            source: CandidateSource::All,
        }
    }

    pub fn features(&self) -> &[usize] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}
