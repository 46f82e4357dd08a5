use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Innate opinions `s`, resistances `α` and the current expressed opinions.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionState {
    innate: Vec<f64>,
    resistance: Vec<f64>,
    /// Expressed opinions; starts equal to `innate`.
    pub expressed: Vec<f64>,
}

impl OpinionState {
    /// Requires `s_i ∈ [0, 1]` and `α_i ∈ (0, 1]` for every agent.
    pub fn new(innate: Vec<f64>, resistance: Vec<f64>) -> Result<Self> {
        if innate.len() != resistance.len() {
            return Err(Error::DimensionMismatch {
                expected: innate.len(),
                actual: resistance.len(),
            });
        }
        if innate.is_empty() {
            return Err(Error::InvalidOpinions("no agents"));
        }
        if !innate.iter().all(|s| (0.0..=1.0).contains(s)) {
            return Err(Error::InvalidOpinions("innate opinions must lie in [0, 1]"));
        }
        if !resistance.iter().all(|&a| a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidOpinions("resistances must lie in (0, 1]"));
        }
        Ok(Self {
            expressed: innate.clone(),
            innate,
            resistance,
        })
    }

    pub fn len(&self) -> usize {
        self.innate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.innate.is_empty()
    }

    pub fn innate(&self) -> &[f64] {
        &self.innate
    }

    pub fn resistance(&self) -> &[f64] {
        &self.resistance
    }

    pub fn alpha_min(&self) -> f64 {
        self.resistance.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The constant term `Α s` of the update.
    pub fn anchored(&self) -> Vec<f64> {
        self.innate
            .iter()
            .zip(&self.resistance)
            .map(|(s, a)| a * s)
            .collect()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validates_ranges() {
        assert!(OpinionState::new(vec![0.0, 1.0], vec![1.0, 0.5]).is_ok());
        assert!(OpinionState::new(vec![1.5], vec![0.5]).is_err());
        assert!(OpinionState::new(vec![0.5], vec![0.0]).is_err());
        assert!(OpinionState::new(vec![0.5], vec![1.1]).is_err());
        assert!(OpinionState::new(vec![0.5, 0.2], vec![0.5]).is_err());
    }

    #[test]
    fn expressed_starts_at_innate() {
        let st = OpinionState::new(vec![0.25, 0.75], vec![0.5, 0.25]).unwrap();
        assert_eq!(st.expressed, st.innate());
        assert_eq!(st.alpha_min(), 0.25);
        assert_eq!(st.anchored(), vec![0.125, 0.1875]);
    }
}
