use serde::{Deserialize, Serialize};

use crate::classify::QuestionType;
use crate::rules::RuleId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Subject,
    Relation,
    Object,
}

/// A (subject, relation, object) tuple with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub subject: String,
    pub relation: String,
    pub object: String,
    /// Set for rule output.
    pub rule_id: Option<RuleId>,
    pub qtype: Option<QuestionType>,
    /// Set for system predictions; higher is more confident.
    pub confidence: Option<f64>,
}

impl Extraction {
    pub fn new(subject: impl Into<String>, relation: impl Into<String>, object: impl Into<String>) -> Self {
        Extraction {
            subject: subject.into(),
            relation: relation.into(),
            object: object.into(),
            rule_id: None,
            qtype: None,
            confidence: None,
        }
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = Some(confidence);
        self
    }

    pub fn slot(&self, slot: Slot) -> &str {
        match slot {
            Slot::Subject => &self.subject,
            Slot::Relation => &self.relation,
            Slot::Object => &self.object,
        }
    }

    pub fn slots(&self) -> [&str; 3] {
        [&self.subject, &self.relation, &self.object]
    }

    pub fn has_empty_slot(&self) -> bool {
        self.slots().iter().any(|s| s.trim().is_empty())
    }

    /// `(subject; relation; object)`
    pub fn triple_text(&self) -> String {
        format!("({}; {}; {})", self.subject, self.relation, self.object)
    }
}
