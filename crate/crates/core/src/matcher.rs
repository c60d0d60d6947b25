//! Slot-wise embedding match between a predicted and a gold tuple.

use serde::Serialize;

use crate::embed::{cosine, EmbeddingTable};
use crate::error::{Error, Result};
use crate::extraction::Extraction;

pub const DEFAULT_THRESHOLD: f64 = 0.70;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchConfig {
    pub threshold: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl MatchConfig {
    pub fn new(threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidArgument(format!(
                "threshold must lie in [0, 1], got {}",
                threshold
            )));
        }
        Ok(MatchConfig { threshold })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlotSims {
    pub subject: f64,
    pub relation: f64,
    pub object: f64,
}

impl SlotSims {
    pub fn min(&self) -> f64 {
        self.subject.min(self.relation).min(self.object)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatchResult {
    pub matched: bool,
    pub sims: SlotSims,
    /// Out-of-vocabulary words across both tuples.
    pub oov: usize,
}

pub fn phrase_similarity(table: &EmbeddingTable, a: &str, b: &str) -> Result<(f64, usize)> {
    let u = table.bow_embed(a);
    let v = table.bow_embed(b);
    Ok((cosine(&u.vector, &v.vector)?, u.oov + v.oov))
}

/// A pair matches when every slot's similarity is strictly above the threshold.
pub fn tuple_match(pred: &Extraction, gold: &Extraction, table: &EmbeddingTable, config: &MatchConfig) -> Result<MatchResult> {
    let (subject, o1) = phrase_similarity(table, &pred.subject, &gold.subject)?;
    let (relation, o2) = phrase_similarity(table, &pred.relation, &gold.relation)?;
    let (object, o3) = phrase_similarity(table, &pred.object, &gold.object)?;
    let sims = SlotSims {
        subject,
        relation,
        object,
    };
    Ok(MatchResult {
        matched: sims.min() > config.threshold,
        sims,
        oov: o1 + o2 + o3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> EmbeddingTable {
        EmbeddingTable::read("a 1 0\nb 0 1\nc 1 1\n".as_bytes(), None).unwrap()
    }

    #[test]
    fn threshold_is_strict() {
        let t = table();
        let p = Extraction::new("a", "a", "a");
        let g = Extraction::new("a", "c", "a");
        // cos(a, c) = 1/sqrt(2)
        let r = tuple_match(&p, &g, &t, &MatchConfig::new(0.5).unwrap()).unwrap();
        assert!(r.matched);
        assert!((r.sims.relation - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let exact = MatchConfig::new(r.sims.relation).unwrap();
        assert!(!tuple_match(&p, &g, &t, &exact).unwrap().matched);
    }

    #[test]
    fn identical_tuple_at_one_does_not_match() {
        let t = table();
        let p = Extraction::new("a", "b", "c");
        let r = tuple_match(&p, &p, &t, &MatchConfig::new(1.0).unwrap()).unwrap();
        assert_eq!(r.sims.min(), 1.0);
        assert!(!r.matched);
    }

    #[test]
    fn config_range() {
        assert!(MatchConfig::new(-0.1).is_err());
        assert!(MatchConfig::new(1.1).is_err());
        assert!(MatchConfig::new(f64::NAN).is_err());
        assert_eq!(MatchConfig::default().threshold, 0.70);
    }
}
