//! The rule cascade that turns a parsed question and its answer into a tuple.
//!
//! The registry is data: fifteen [`RuleSpec`]s ordered by priority, from
//! narrow question shapes down to two generic fallbacks. Each rule id owns a
//! traversal over the question's dependency tree. The answer fills exactly
//! one slot; the other two are built from question tokens.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::classify::{is_subject, wh_token, AuxPattern, QuestionType, Wh};
use crate::conllu::{DepTree, Token};
use crate::error::{Error, Result};
use crate::extraction::{Extraction, Slot};

pub const REGISTRY_SIZE: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    WhoCopula,
    WhoVerb,
    WhoPassive,
    WhatCopulaNsubj,
    WhenDid,
    WhenWas,
    WhereDid,
    WhereCopula,
    WhatDid,
    HowManyNsubj,
    HowNoSubj,
    WhichNsubj,
    Whose,
    GenericNsubj,
    GenericNoSubj,
}

impl RuleId {
    pub const ALL: [RuleId; REGISTRY_SIZE] = [
        RuleId::WhoCopula,
        RuleId::WhoVerb,
        RuleId::WhoPassive,
        RuleId::WhatCopulaNsubj,
        RuleId::WhenDid,
        RuleId::WhenWas,
        RuleId::WhereDid,
        RuleId::WhereCopula,
        RuleId::WhatDid,
        RuleId::HowManyNsubj,
        RuleId::HowNoSubj,
        RuleId::WhichNsubj,
        RuleId::Whose,
        RuleId::GenericNsubj,
        RuleId::GenericNoSubj,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::WhoCopula => "R01-who-copula",
            RuleId::WhoVerb => "R02-who-verb",
            RuleId::WhoPassive => "R03-who-passive",
            RuleId::WhatCopulaNsubj => "R04-what-copula-nsubj",
            RuleId::WhenDid => "R05-when-did",
            RuleId::WhenWas => "R06-when-was",
            RuleId::WhereDid => "R07-where-did",
            RuleId::WhereCopula => "R08-where-copula",
            RuleId::WhatDid => "R09-what-did",
            RuleId::HowManyNsubj => "R10-how-many-nsubj",
            RuleId::HowNoSubj => "R11-how-no-subj",
            RuleId::WhichNsubj => "R12-which-nsubj",
            RuleId::Whose => "R13-whose",
            RuleId::GenericNsubj => "R14-generic-nsubj",
            RuleId::GenericNoSubj => "R15-generic-no-subj",
        }
    }

    /// The slot the answer text fills.
    pub fn answer_slot(self) -> Slot {
        match self {
            RuleId::WhoCopula
            | RuleId::WhoVerb
            | RuleId::HowNoSubj
            | RuleId::WhichNsubj
            | RuleId::Whose
            | RuleId::GenericNoSubj => Slot::Subject,
            _ => Slot::Object,
        }
    }

    /// Question shapes the rule is willing to try.
    pub fn guard(self) -> fn(&QuestionType) -> bool {
        match self {
            RuleId::WhoCopula => |q| q.wh == Wh::Who && q.aux_pattern == AuxPattern::Copula,
            RuleId::WhoVerb => |q| q.wh == Wh::Who && q.aux_pattern == AuxPattern::None && !q.has_nsubj,
            RuleId::WhoPassive => |q| q.wh == Wh::Who && q.aux_pattern == AuxPattern::WasParticiple,
            RuleId::WhatCopulaNsubj => |q| q.wh == Wh::What && q.aux_pattern == AuxPattern::Copula && q.has_nsubj,
            RuleId::WhenDid => |q| q.wh == Wh::When && q.aux_pattern == AuxPattern::DidDo && q.has_nsubj,
            RuleId::WhenWas => |q| q.wh == Wh::When && q.aux_pattern == AuxPattern::WasParticiple && q.has_nsubj,
            RuleId::WhereDid => |q| q.wh == Wh::Where && q.aux_pattern == AuxPattern::DidDo && q.has_nsubj,
            RuleId::WhereCopula => |q| q.wh == Wh::Where && q.aux_pattern == AuxPattern::Copula && q.has_nsubj,
            RuleId::WhatDid => {
                |q| q.wh == Wh::What && q.aux_pattern == AuxPattern::DidDo && q.has_nsubj && !q.wh_in_subject
            }
            RuleId::HowManyNsubj => |q| q.wh == Wh::How && q.quantity && q.has_nsubj && !q.wh_in_subject,
            RuleId::HowNoSubj => |q| q.wh == Wh::How && (!q.has_nsubj || q.wh_in_subject),
            RuleId::WhichNsubj => |q| q.wh == Wh::Which && q.wh_in_subject,
            RuleId::Whose => |q| q.wh == Wh::Whose,
            RuleId::GenericNsubj => |q| q.wh != Wh::Other && q.has_nsubj && !q.wh_in_subject,
            RuleId::GenericNoSubj => |q| q.wh != Wh::Other && (!q.has_nsubj || q.wh_in_subject),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleId {
    type Err = Error;

    /// Accepts the full id (`R05-when-did`) or just its number (`R05`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        RuleId::ALL
            .into_iter()
            .find(|r| r.as_str() == s || r.as_str().split('-').next() == Some(s))
            .ok_or_else(|| Error::Registry(format!("unknown rule id '{}'", s)))
    }
}

impl Serialize for RuleId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RuleId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RuleSpec {
    pub rule_id: RuleId,
    /// Lower is tried first.
    pub priority: u32,
    pub match_guard: fn(&QuestionType) -> bool,
    pub answer_slot: Slot,
}

impl RuleSpec {
    pub fn new(rule_id: RuleId, priority: u32) -> Self {
        RuleSpec {
            rule_id,
            priority,
            match_guard: rule_id.guard(),
            answer_slot: rule_id.answer_slot(),
        }
    }
}

/// A validated, priority-sorted set of all fifteen rules.
#[derive(Clone, Debug)]
pub struct Registry {
    rules: Vec<RuleSpec>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::from_order(&RuleId::ALL).expect("compiled-in order is valid")
    }
}

impl Registry {
    /// Builds a registry trying rules in the given order.
    pub fn from_order(order: &[RuleId]) -> Result<Self> {
        if order.len() != REGISTRY_SIZE {
            return Err(Error::Registry(format!(
                "expected {} rules, got {}",
                REGISTRY_SIZE,
                order.len()
            )));
        }
        let mut seen = HashSet::new();
        for id in order {
            if !seen.insert(*id) {
                return Err(Error::Registry(format!("rule {} listed twice", id)));
            }
        }
        let rules = order
            .iter()
            .enumerate()
            .map(|(i, id)| RuleSpec::new(*id, i as u32 + 1))
            .collect();
        Ok(Registry { rules })
    }

    /// Parses an ordering file: one rule id per line, `#` starts a comment.
    pub fn parse_order(text: &str) -> Result<Self> {
        let ids = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<RuleId>>>()?;
        Registry::from_order(&ids)
    }

    pub fn rules(&self) -> &[RuleSpec] {
        &self.rules
    }
}

/// Runs the cascade: guarded rules in priority order, first success wins.
pub fn apply_rules(tree: &DepTree, answer: &str, qtype: &QuestionType, rules: &[RuleSpec]) -> Option<Extraction> {
    if !qtype.length_ok {
        return None;
    }
    let mut ordered: Vec<&RuleSpec> = rules.iter().collect();
    ordered.sort_by_key(|r| r.priority);
    ordered
        .into_iter()
        .filter(|r| (r.match_guard)(qtype))
        .find_map(|r| run_rule(r, tree, answer, qtype))
}

/// Runs one rule's traversal without consulting its guard.
pub fn run_rule(rule: &RuleSpec, tree: &DepTree, answer: &str, qtype: &QuestionType) -> Option<Extraction> {
    let answer = normalize_slot(answer);
    if answer.is_empty() {
        return None;
    }
    let walk = Walk::new(tree);
    let (a, b) = match rule.rule_id {
        RuleId::WhoCopula => walk.copula_with_answer_subject()?,
        RuleId::WhoVerb => walk.verb_object()?,
        RuleId::WhoPassive => walk.passive_agent()?,
        RuleId::WhatCopulaNsubj => walk.copula_subject()?,
        RuleId::WhenDid
        | RuleId::WhenWas
        | RuleId::WhereDid
        | RuleId::WhatDid
        | RuleId::HowManyNsubj
        | RuleId::GenericNsubj => walk.question_minus_subject()?,
        RuleId::WhereCopula => {
            walk.copula()?;
            walk.question_minus_subject()?
        }
        RuleId::HowNoSubj | RuleId::GenericNoSubj => walk.split_at_root()?,
        RuleId::WhichNsubj => walk.which_subject()?,
        RuleId::Whose => walk.whose()?,
    };

    // a and b fill the two non-answer slots in subject, relation, object order
    let (subject, relation, object) = match rule.answer_slot {
        Slot::Subject => (answer.clone(), a, b),
        Slot::Relation => (a, answer.clone(), b),
        Slot::Object => (a, b, answer.clone()),
    };
    let ex = Extraction {
        subject,
        relation,
        object,
        rule_id: Some(rule.rule_id),
        qtype: Some(*qtype),
        confidence: None,
    };
    let answer_slots = ex.slots().iter().filter(|s| **s == answer).count();
    if ex.has_empty_slot() || answer_slots != 1 {
        return None;
    }
    Some(ex)
}

/// Collapses whitespace and strips a trailing question mark.
pub fn normalize_slot(text: &str) -> String {
    let joined = text.split_whitespace().collect::<Vec<_>>().join(" ");
    joined.trim_end_matches('?').trim_end().to_string()
}

fn is_terminal_punct(tok: &Token) -> bool {
    !tok.surface.is_empty() && tok.surface.chars().all(|c| matches!(c, '?' | '!' | '.'))
}

/// Tree walks shared by the rules.
struct Walk<'a> {
    tree: &'a DepTree,
    wh: Option<usize>,
    wh_phrase: HashSet<usize>,
}

impl<'a> Walk<'a> {
    fn new(tree: &'a DepTree) -> Self {
        let wh = wh_token(tree);
        let wh_phrase = match wh {
            // a predicative wh-word heads the whole question
            Some(t) if t.is_root() => HashSet::from([t.index]),
            Some(t) => tree.subtree(t.index).unwrap_or_default().into_iter().collect(),
            None => HashSet::new(),
        };
        Walk {
            tree,
            wh: wh.map(|t| t.index),
            wh_phrase,
        }
    }

    fn in_wh_phrase(&self, i: usize) -> bool {
        self.wh_phrase.contains(&i)
    }

    /// Slot text for a set of token indices, in sentence order.
    fn text(&self, indices: impl IntoIterator<Item = usize>) -> String {
        let mut idx: Vec<usize> = indices.into_iter().collect();
        idx.sort_unstable();
        idx.dedup();
        let words: Vec<String> = idx
            .iter()
            .filter_map(|&i| self.tree.token(i))
            .filter(|t| !is_terminal_punct(t))
            .map(|t| {
                // sentence-initial capital is not part of the word
                if t.index == 1 && t.upos != "PROPN" {
                    t.surface.to_lowercase()
                } else {
                    t.surface.clone()
                }
            })
            .collect();
        normalize_slot(&words.join(" "))
    }

    fn all(&self) -> impl Iterator<Item = usize> + '_ {
        self.tree.tokens.iter().map(|t| t.index)
    }

    /// First nominal subject that does not contain the wh-word.
    fn subject(&self) -> Option<usize> {
        self.tree
            .tokens
            .iter()
            .filter(|t| is_subject(t))
            .find(|t| self.wh.is_none_or(|w| !self.tree.dominates(t.index, w)))
            .map(|t| t.index)
    }

    /// Subject that contains the wh-word.
    fn wh_subject(&self) -> Option<usize> {
        let w = self.wh?;
        self.tree
            .tokens
            .iter()
            .filter(|t| is_subject(t))
            .find(|t| self.tree.dominates(t.index, w))
            .map(|t| t.index)
    }

    fn copula(&self) -> Option<usize> {
        if let Some(t) = self.tree.tokens.iter().find(|t| t.base_rel() == "cop") {
            return Some(t.index);
        }
        let root = self.tree.root();
        (root.lemma_lower() == "be").then_some(root.index)
    }

    fn subject_text(&self, subj: usize) -> Option<String> {
        let span = self.tree.subtree(subj).ok()?;
        let s = self.text(span.into_iter().filter(|&i| !self.in_wh_phrase(i)));
        (!s.is_empty()).then_some(s)
    }

    /// (copula, complement) for "Who is X?".
    fn copula_with_answer_subject(&self) -> Option<(String, String)> {
        let cop = self.copula()?;
        let x = match self.subject() {
            Some(s) => self.subject_text(s)?,
            None => {
                let head = self.tree.token(cop)?;
                let top = if head.is_root() { cop } else { head.head };
                let span = self.tree.subtree(top).ok()?;
                self.text(span.into_iter().filter(|&i| i != cop && !self.in_wh_phrase(i)))
            }
        };
        Some((self.text([cop]), x))
    }

    /// (subject, copula) for "What is X?".
    fn copula_subject(&self) -> Option<(String, String)> {
        let cop = self.copula()?;
        let x = self.subject_text(self.subject()?)?;
        Some((x, self.text([cop])))
    }

    /// (verb with its trailing dependents, direct object) for "Who V O?".
    fn verb_object(&self) -> Option<(String, String)> {
        let root = self.tree.root();
        if root.upos != "VERB" {
            return None;
        }
        let obj = self
            .tree
            .children(root.index)
            .find(|c| matches!(c.base_rel(), "obj" | "dobj"))?;
        let mut rel = vec![root.index];
        for c in self.tree.children(root.index) {
            if c.index == obj.index || self.in_wh_phrase(c.index) || is_terminal_punct(c) {
                continue;
            }
            let keep_before = matches!(c.base_rel(), "aux" | "neg" | "compound" | "prt" | "advmod")
                && c.deprel != "compound"
                || c.deprel == "compound:prt";
            if c.index > root.index || keep_before {
                rel.extend(self.tree.subtree(c.index).ok()?);
            }
        }
        let object = self.text(
            self.tree
                .subtree(obj.index)
                .ok()?
                .into_iter()
                .filter(|&i| !self.in_wh_phrase(i)),
        );
        Some((self.text(rel), object))
    }

    /// (passive subject, participle + "by") for "Who was X V-ed by?".
    fn passive_agent(&self) -> Option<(String, String)> {
        let x = self.subject_text(self.subject()?)?;
        let root = self.tree.root();
        if root.upos != "VERB" {
            return None;
        }
        Some((x, format!("{} by", self.text([root.index]))))
    }

    /// (subject, every other question token) for the question-prefixed
    /// relation style: "When did S V X" gives (S, "when did V X").
    fn question_minus_subject(&self) -> Option<(String, String)> {
        let subj = self.subject()?;
        let span: HashSet<usize> = self.tree.subtree(subj).ok()?.into_iter().collect();
        let x = self.subject_text(subj)?;
        let rel = self.text(self.all().filter(|i| !span.contains(i)));
        Some((x, rel))
    }

    /// (question up to the root, remainder) when the answer is the subject.
    fn split_at_root(&self) -> Option<(String, String)> {
        let root = self.tree.root().index;
        let rel = self.text(self.all().filter(|&i| i <= root));
        let obj = self.text(self.all().filter(|&i| i > root));
        Some((rel, obj))
    }

    /// "Which X V Y?": the wh-phrase is the subject and gets replaced.
    fn which_subject(&self) -> Option<(String, String)> {
        let subj = self.wh_subject()?;
        let span: HashSet<usize> = self.tree.subtree(subj).ok()?.into_iter().collect();
        let root = self.tree.root().index;
        let rel = self.text(self.all().filter(|&i| i <= root && !span.contains(&i)));
        let obj = self.text(self.all().filter(|&i| i > root && !span.contains(&i)));
        Some((rel, obj))
    }

    /// "Whose X ...?" gives ("has", X).
    fn whose(&self) -> Option<(String, String)> {
        let w = self.tree.token(self.wh?)?;
        if w.head == 0 {
            return None;
        }
        let head = w.head;
        let mut span = vec![head];
        for c in self.tree.children(head) {
            if c.index < head && c.index != w.index {
                span.extend(self.tree.subtree(c.index).ok()?);
            }
        }
        let x = self.text(span.into_iter().filter(|&i| !self.in_wh_phrase(i)));
        Some(("has".to_string(), x))
    }
}
