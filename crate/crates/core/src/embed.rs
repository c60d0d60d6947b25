//! Word vectors in GloVe / word2vec text format and bag-of-words phrase embeddings.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    data: Vec<f32>,
}

/// Phrase vector plus the number of out-of-vocabulary words skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct PhraseVector {
    pub vector: Vec<f64>,
    pub oov: usize,
}

impl EmbeddingTable {
    pub fn load(path: &Path, limit: Option<usize>) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), limit)
    }

    /// Parses `word v1 ... vD` lines. An optional word2vec `N D` header is
    /// skipped. The first occurrence of a duplicated word wins.
    pub fn read<R: BufRead>(mut input: R, limit: Option<usize>) -> Result<Self> {
        let mut table = EmbeddingTable {
            dim: 0,
            index: HashMap::new(),
            data: Vec::new(),
        };
        let mut buf = Vec::new();
        let mut line_no = 0;
        loop {
            if limit.is_some_and(|l| table.index.len() >= l) {
                break;
            }
            buf.clear();
            if input.read_until(b'\n', &mut buf)? == 0 {
                break;
            }
            line_no += 1;
            let line = String::from_utf8_lossy(&buf);
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if line_no == 1 && fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok()) {
                continue;
            }
            if table.dim == 0 {
                if fields.len() < 2 {
                    return Err(Error::Vectors {
                        line: line_no,
                        message: "expected a word followed by its vector".into(),
                    });
                }
                table.dim = fields.len() - 1;
            }
            if fields.len() < table.dim + 1 {
                return Err(Error::Vectors {
                    line: line_no,
                    message: format!("expected {} values, found {}", table.dim, fields.len() - 1),
                });
            }
            let split = fields.len() - table.dim;
            let word = fields[..split].join(" ");
            let mut values = Vec::with_capacity(table.dim);
            for f in &fields[split..] {
                values.push(f.parse::<f32>().map_err(|_| Error::Vectors {
                    line: line_no,
                    message: format!("'{}' is not a number", f),
                })?);
            }
            if table.index.contains_key(&word) {
                continue;
            }
            table.index.insert(word, table.index.len());
            table.data.extend(values);
        }
        if table.index.is_empty() {
            return Err(Error::Vectors {
                line: line_no,
                message: "no vectors found".into(),
            });
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index
            .get(word)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// Case-folded lookup, then exact, then with surrounding punctuation removed.
    pub fn lookup(&self, token: &str) -> Option<&[f32]> {
        let lower = token.to_lowercase();
        self.get(&lower)
            .or_else(|| self.get(token))
            .or_else(|| self.get(lower.trim_matches(|c: char| c.is_ascii_punctuation())))
    }

    /// Mean of the in-vocabulary word vectors; the zero vector if none.
    pub fn bow_embed(&self, phrase: &str) -> PhraseVector {
        let mut sum = vec![0.0f64; self.dim];
        let mut found = 0usize;
        let mut oov = 0usize;
        for tok in phrase.split_whitespace() {
            if tok.chars().all(|c| c.is_ascii_punctuation()) {
                continue;
            }
            match self.lookup(tok) {
                Some(v) => {
                    for (s, x) in sum.iter_mut().zip(v) {
                        *s += *x as f64;
                    }
                    found += 1;
                }
                None => oov += 1,
            }
        }
        if found > 0 {
            let n = found as f64;
            sum.iter_mut().for_each(|s| *s /= n);
        }
        PhraseVector { vector: sum, oov }
    }
}

/// Cosine similarity in [-1, 1]; 0 when either vector has zero norm.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            left: u.len(),
            right: v.len(),
        });
    }
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    if u == v {
        return Ok(1.0);
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> EmbeddingTable {
        EmbeddingTable::read("2 2\nis 1 0\nfor 0 1\nIs 5 5\nis 9 9\n".as_bytes(), None).unwrap()
    }

    #[test]
    fn reads_header_and_keeps_first_duplicate() {
        let t = table();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.len(), 3);
        assert_eq!(t.get("is"), Some(&[1.0f32, 0.0][..]));
    }

    #[test]
    fn lookup_folds_case_first() {
        let t = table();
        assert_eq!(t.lookup("IS"), Some(&[1.0f32, 0.0][..]));
        assert_eq!(t.lookup("for,"), Some(&[0.0f32, 1.0][..]));
    }

    #[test]
    fn bow_averages_and_counts_oov() {
        let t = table();
        let p = t.bow_embed("is for zebra ?");
        assert_eq!(p.vector, vec![0.5, 0.5]);
        assert_eq!(p.oov, 1);
        assert_eq!(t.bow_embed("zebra").vector, vec![0.0, 0.0]);
    }

    #[test]
    fn cosine_edges() {
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(cosine(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 1.0);
        assert!((cosine(&[1.0, 0.0], &[-2.0, 0.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(cosine(&[1.0], &[1.0, 2.0]), Err(Error::Dimension { left: 1, right: 2 })));
    }

    #[test]
    fn ragged_and_bad_rows_error() {
        assert!(matches!(
            EmbeddingTable::read("a 1 2\nb 1\n".as_bytes(), None),
            Err(Error::Vectors { line: 2, .. })
        ));
        assert!(matches!(
            EmbeddingTable::read("a 1 x\n".as_bytes(), None),
            Err(Error::Vectors { line: 1, .. })
        ));
        assert_eq!(EmbeddingTable::read("a 1\nb 2\nc 3\n".as_bytes(), Some(2)).unwrap().len(), 2);
    }
}
