//! CoNLL-U reading, writing and the dependency tree the rules walk over.
//!
//! Only the basic tree is kept: multiword token ranges (`3-4`) and empty
//! nodes (`3.1`) are skipped, and of the comment lines only `sent_id` and
//! `text` are interpreted.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single word of a parsed sentence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: String,
    /// 0 for the root, otherwise the 1-based index of the parent.
    pub head: usize,
    pub deprel: String,
    /// Byte offsets into the `# text` sentence, when it was given.
    pub char_span: Option<(usize, usize)>,
}

impl Token {
    /// The relation without its subtype, so `nsubj:pass` gives `nsubj`.
    pub fn base_rel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or(&self.deprel)
    }

    pub fn is_root(&self) -> bool {
        self.head == 0
    }

    /// Lowercased lemma, falling back to the surface form when the lemma
    /// column is empty.
    pub fn lemma_lower(&self) -> String {
        if self.lemma.is_empty() || self.lemma == "_" {
            self.surface.to_lowercase()
        } else {
            self.lemma.to_lowercase()
        }
    }
}

/// A validated dependency tree for one sentence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepTree {
    pub sent_id: String,
    /// The `# text` line, if present.
    pub text: Option<String>,
    pub tokens: Vec<Token>,
}

impl DepTree {
    /// Builds a tree and checks every structural invariant.
    pub fn new(sent_id: impl Into<String>, text: Option<String>, tokens: Vec<Token>) -> Result<Self> {
        let tree = DepTree {
            sent_id: sent_id.into(),
            text,
            tokens,
        };
        tree.validate()?;
        Ok(tree)
    }

    fn invalid(&self, message: impl Into<String>) -> Error {
        Error::Tree {
            sent_id: self.sent_id.clone(),
            message: message.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.tokens.len();
        if n == 0 {
            return Err(self.invalid("sentence has no tokens"));
        }
        for (pos, tok) in self.tokens.iter().enumerate() {
            if tok.index != pos + 1 {
                return Err(self.invalid(format!(
                    "token indices must be contiguous from 1, found {} at position {}",
                    tok.index,
                    pos + 1
                )));
            }
            if tok.head == tok.index {
                return Err(self.invalid(format!("token {} is its own head", tok.index)));
            }
            if tok.head > n {
                return Err(self.invalid(format!(
                    "token {} has head {} outside 0..={}",
                    tok.index, tok.head, n
                )));
            }
            if tok.deprel.is_empty() || tok.deprel.chars().any(char::is_whitespace) {
                return Err(self.invalid(format!("token {} has an invalid deprel", tok.index)));
            }
        }

        let roots: Vec<usize> = self.tokens.iter().filter(|t| t.is_root()).map(|t| t.index).collect();
        match roots.len() {
            1 => {}
            0 => return Err(self.invalid("no root token")),
            _ => return Err(self.invalid(format!("multiple roots: {:?}", roots))),
        }

        // Every token must reach the root without revisiting a node.
        for tok in &self.tokens {
            let mut seen = HashSet::new();
            let mut cur = tok.index;
            while cur != 0 {
                if !seen.insert(cur) {
                    return Err(self.invalid(format!("cycle through token {}", cur)));
                }
                cur = self.tokens[cur - 1].head;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based index.
    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn root(&self) -> &Token {
        self.tokens
            .iter()
            .find(|t| t.is_root())
            .expect("validated tree has a root")
    }

    /// The sentence text: `# text` when present, else the surfaces joined
    /// by single spaces.
    pub fn sentence_text(&self) -> String {
        match &self.text {
            Some(t) => t.clone(),
            None => self.surfaces(self.tokens.iter().map(|t| t.index)),
        }
    }

    /// Lowest-index token whose deprel equals `deprel` exactly.
    pub fn find_first(&self, deprel: &str) -> Option<&Token> {
        self.tokens.iter().find(|t| t.deprel == deprel)
    }

    pub fn children(&self, index: usize) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(move |t| t.head == index)
    }

    /// Indices of `index` and all its descendants, ascending.
    pub fn subtree(&self, index: usize) -> Result<Vec<usize>> {
        if self.token(index).is_none() {
            return Err(Error::TokenIndex {
                sent_id: self.sent_id.clone(),
                index,
            });
        }
        let mut out = vec![index];
        let mut stack = vec![index];
        while let Some(cur) = stack.pop() {
            for child in self.children(cur) {
                out.push(child.index);
                stack.push(child.index);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// True when `node` lies in the subtree rooted at `ancestor`.
    pub fn dominates(&self, ancestor: usize, node: usize) -> bool {
        let mut cur = node;
        while cur != 0 {
            if cur == ancestor {
                return true;
            }
            cur = match self.token(cur) {
                Some(t) => t.head,
                None => return false,
            };
        }
        false
    }

    /// Surface text of a token and its descendants in sentence order.
    pub fn subtree_text(&self, head_index: usize) -> Result<String> {
        Ok(self.surfaces(self.subtree(head_index)?))
    }

    /// Joins the surfaces of the given indices with single spaces.
    pub fn surfaces(&self, indices: impl IntoIterator<Item = usize>) -> String {
        let mut out = String::new();
        for i in indices {
            if let Some(t) = self.token(i) {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(&t.surface);
            }
        }
        out
    }
}

/// Reads every sentence block of a CoNLL-U stream.
pub fn parse_conllu<R: BufRead>(input: R) -> Result<Vec<DepTree>> {
    let mut trees = Vec::new();
    let mut ids = HashSet::new();
    let mut block = Block::default();

    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);

        if trimmed.trim().is_empty() {
            block.finish(&mut trees, &mut ids)?;
            continue;
        }
        if block.start_line == 0 {
            block.start_line = lineno;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "sent_id" => block.sent_id = Some(value.trim().to_string()),
                    "text" => block.text = Some(value.trim().to_string()),
                    _ => {}
                }
            }
            continue;
        }
        block.push_token(trimmed, lineno)?;
    }
    block.finish(&mut trees, &mut ids)?;
    Ok(trees)
}

#[derive(Default)]
struct Block {
    start_line: usize,
    sent_id: Option<String>,
    text: Option<String>,
    tokens: Vec<Token>,
}

impl Block {
    fn push_token(&mut self, line: &str, lineno: usize) -> Result<()> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::Conllu {
                line: lineno,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            return Ok(());
        }
        let bad = |what: &str| Error::Conllu {
            line: lineno,
            message: format!("invalid {} field", what),
        };
        let index: usize = id.parse().map_err(|_| bad("ID"))?;
        if index == 0 {
            return Err(bad("ID"));
        }
        let head: usize = cols[6].parse().map_err(|_| bad("HEAD"))?;
        let deprel = cols[7].to_string();
        if deprel.is_empty() || deprel == "_" {
            return Err(bad("DEPREL"));
        }
        self.tokens.push(Token {
            index,
            surface: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel,
            char_span: None,
        });
        Ok(())
    }

    fn finish(&mut self, trees: &mut Vec<DepTree>, ids: &mut HashSet<String>) -> Result<()> {
        let block = std::mem::take(self);
        if block.start_line == 0 {
            return Ok(());
        }
        if block.tokens.is_empty() {
            // A comment-only block carries nothing to build a tree from.
            return Ok(());
        }
        let sent_id = block.sent_id.ok_or_else(|| Error::Conllu {
            line: block.start_line,
            message: "sentence block has no '# sent_id' comment".into(),
        })?;
        if !ids.insert(sent_id.clone()) {
            return Err(Error::DuplicateSentId(sent_id));
        }
        let mut tokens = block.tokens;
        if let Some(text) = &block.text {
            locate_spans(text, &mut tokens);
        }
        trees.push(DepTree::new(sent_id, block.text, tokens)?);
        Ok(())
    }
}

/// Finds each surface form left to right in the sentence text.
fn locate_spans(text: &str, tokens: &mut [Token]) {
    let mut cursor = 0;
    for tok in tokens {
        if let Some(offset) = text[cursor..].find(tok.surface.as_str()) {
            let start = cursor + offset;
            let end = start + tok.surface.len();
            tok.char_span = Some((start, end));
            cursor = end;
        }
    }
}

fn field(value: &str) -> &str {
    if value.is_empty() {
        "_"
    } else {
        value
    }
}

/// Serializes one tree as a CoNLL-U block (including the trailing blank line).
pub fn to_conllu(tree: &DepTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sent_id = {}", tree.sent_id);
    if let Some(text) = &tree.text {
        let _ = writeln!(out, "# text = {}", text);
    }
    for t in &tree.tokens {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_",
            t.index,
            t.surface,
            field(&t.lemma),
            field(&t.upos),
            t.head,
            t.deprel
        );
    }
    out.push('\n');
    out
}

pub fn write_conllu<W: Write>(mut out: W, trees: &[DepTree]) -> io::Result<()> {
    for tree in trees {
        out.write_all(to_conllu(tree).as_bytes())?;
    }
    Ok(())
}
