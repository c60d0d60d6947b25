//! Question typing: wh-word, subject presence, auxiliary shape and the
//! length filter that gates the rule cascade.

use serde::{Deserialize, Serialize};

use crate::conllu::{DepTree, Token};

pub const DEFAULT_MAX_QUESTION_CHARS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wh {
    Who,
    What,
    When,
    Where,
    Why,
    How,
    Which,
    Whose,
    Other,
}

impl Wh {
    pub fn from_word(word: &str) -> Option<Wh> {
        Some(match word.to_lowercase().as_str() {
            "who" | "whom" => Wh::Who,
            "whose" => Wh::Whose,
            "which" => Wh::Which,
            "what" => Wh::What,
            "when" => Wh::When,
            "where" => Wh::Where,
            "why" => Wh::Why,
            "how" => Wh::How,
            _ => return None,
        })
    }
}

/// Shape of the first auxiliary or copula after the wh-word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxPattern {
    Copula,
    DidDo,
    WasParticiple,
    Modal,
    None,
}

const MODALS: [&str; 7] = ["can", "could", "will", "would", "may", "might", "must"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuestionType {
    pub wh: Wh,
    /// Some token other than the wh-word is a (passive) nominal subject.
    pub has_nsubj: bool,
    /// The wh-word sits inside a nominal subject ("Who built", "Which company was").
    pub wh_in_subject: bool,
    /// "how many" / "how much".
    pub quantity: bool,
    pub aux_pattern: AuxPattern,
    pub length_ok: bool,
}

pub fn is_subject(tok: &Token) -> bool {
    tok.base_rel() == "nsubj" || tok.deprel == "nsubjpass"
}

fn is_aux_like(tok: &Token) -> bool {
    matches!(tok.base_rel(), "aux" | "auxpass" | "cop") || tok.upos == "AUX"
}

fn is_passive_be(tree: &DepTree, tok: &Token) -> bool {
    if tok.deprel == "aux:pass" || tok.deprel == "auxpass" {
        return true;
    }
    // be attached as aux to a head that has a passive subject
    tok.base_rel() == "aux"
        && tree
            .children(tok.head)
            .any(|c| c.deprel == "nsubj:pass" || c.deprel == "nsubjpass")
}

/// First wh-word in token order.
pub fn wh_token(tree: &DepTree) -> Option<&Token> {
    tree.tokens.iter().find(|t| Wh::from_word(&t.surface).is_some())
}

/// Classifies a question, measuring its length on the tree's sentence text.
pub fn classify(tree: &DepTree, max_question_chars: usize) -> QuestionType {
    classify_text(tree, &tree.sentence_text(), max_question_chars)
}

/// Classifies a question whose raw text is supplied separately from the parse.
pub fn classify_text(tree: &DepTree, question: &str, max_question_chars: usize) -> QuestionType {
    let wh_tok = wh_token(tree);
    let wh = wh_tok.and_then(|t| Wh::from_word(&t.surface)).unwrap_or(Wh::Other);
    let wh_index = wh_tok.map(|t| t.index);

    let has_nsubj = tree
        .tokens
        .iter()
        .any(|t| is_subject(t) && Some(t.index) != wh_index);
    let wh_in_subject = wh_index.is_some_and(|w| {
        tree.tokens
            .iter()
            .any(|t| is_subject(t) && tree.dominates(t.index, w))
    });
    let quantity = wh == Wh::How
        && wh_index
            .and_then(|w| tree.token(w + 1))
            .is_some_and(|t| matches!(t.surface.to_lowercase().as_str(), "many" | "much"));

    let start = wh_index.unwrap_or(0);
    let aux_pattern = tree
        .tokens
        .iter()
        .filter(|t| t.index > start)
        .find(|t| is_aux_like(t))
        .map(|t| match t.lemma_lower().as_str() {
            "be" | "is" | "was" | "are" | "were" | "am" | "been" => {
                if is_passive_be(tree, t) {
                    AuxPattern::WasParticiple
                } else {
                    AuxPattern::Copula
                }
            }
            "do" | "does" | "did" => AuxPattern::DidDo,
            m if MODALS.contains(&m) => AuxPattern::Modal,
            _ => AuxPattern::None,
        })
        .unwrap_or(AuxPattern::None);

    QuestionType {
        wh,
        has_nsubj,
        wh_in_subject,
        quantity,
        aux_pattern,
        length_ok: question.chars().count() <= max_question_chars,
    }
}
