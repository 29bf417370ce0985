//! CoNLL-U treebank reading and writing.
//!
//! Sentences are blank-line separated blocks of 10 tab-separated columns.
//! Only columns 1 (id), 2 (form), 4 (upos), 7 (head) and 8 (deprel) are
//! interpreted; everything else is carried opaquely so that writing a parsed
//! file back out is byte-identical. Multiword-token ranges (`1-2`) and empty
//! nodes (`1.1`) are preserved verbatim but excluded from the token list.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line}: expected 10 tab-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: {what} is not a valid integer: {value:?}")]
    BadInteger {
        line: usize,
        what: &'static str,
        value: String,
    },
    #[error("sentence {sentence}: {message}")]
    Validation { sentence: usize, message: String },
    #[error("token has an empty form")]
    EmptyForm,
}

/// One syntactic word. `head` is the 1-based id of the governing token,
/// with 0 standing for the artificial root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

/// A raw line (multiword-token range or empty node) that sits between
/// ordinary token lines. `before_token` is the index of the token line it
/// precedes, counted over the token list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtraRow {
    pub before_token: usize,
    pub line: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sentence {
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
    pub extras: Vec<ExtraRow>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Gold head of the 1-based token `id` (0 = root).
    pub fn head(&self, id: usize) -> usize {
        self.tokens[id - 1].head
    }
}

/// The character string the model runs over, plus the position of each
/// token's final codepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharSequence {
    pub codepoints: Vec<char>,
    pub word_final: Vec<usize>,
}

/// Dense symbol tables for characters, POS tags and dependency labels.
/// Character id 0 is reserved for unknown codepoints; tag and label ids are
/// assigned in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    chars: Vec<char>,
    tags: Vec<String>,
    labels: Vec<String>,
}

impl Vocabulary {
    pub const UNKNOWN_CHAR: usize = 0;

    /// Number of character ids including the unknown id.
    pub fn char_count(&self) -> usize {
        self.chars.len() + 1
    }

    pub fn tag_count(&self) -> usize {
        self.tags.len()
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn char_id(&self, c: char) -> usize {
        match self.chars.binary_search(&c) {
            Ok(i) => i + 1,
            Err(_) => Self::UNKNOWN_CHAR,
        }
    }

    pub fn tag_id(&self, tag: &str) -> Option<usize> {
        self.tags.binary_search_by(|t| t.as_str().cmp(tag)).ok()
    }

    pub fn label_id(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn label_name(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn tag_name(&self, id: usize) -> &str {
        &self.tags[id]
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Rebuild from the serialized id-ordered listings.
    pub fn from_parts(chars: Vec<char>, tags: Vec<String>, labels: Vec<String>) -> Self {
        Vocabulary { chars, tags, labels }
    }
}

/// Parse a whole CoNLL-U document.
pub fn parse_conllu(text: &str) -> Result<Vec<Sentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut current = Sentence::default();
    let mut seen_token = false;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if line.is_empty() {
            if seen_token || !current.comments.is_empty() || !current.extras.is_empty() {
                validate(&current, sentences.len() + 1)?;
                sentences.push(std::mem::take(&mut current));
                seen_token = false;
            }
            continue;
        }
        if line.starts_with('#') {
            if seen_token {
                // Mid-block comment; keep its exact position.
                current.extras.push(ExtraRow {
                    before_token: current.tokens.len(),
                    line: line.to_string(),
                });
            } else {
                current.comments.push(line.to_string());
            }
            continue;
        }

        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 10 {
            return Err(ConlluError::FieldCount {
                line: lineno,
                found: fields.len(),
            });
        }
        if fields[0].contains('-') || fields[0].contains('.') {
            current.extras.push(ExtraRow {
                before_token: current.tokens.len(),
                line: line.to_string(),
            });
            continue;
        }

        let id = fields[0]
            .parse::<usize>()
            .map_err(|_| ConlluError::BadInteger {
                line: lineno,
                what: "token id",
                value: fields[0].to_string(),
            })?;
        let head = fields[6]
            .parse::<usize>()
            .map_err(|_| ConlluError::BadInteger {
                line: lineno,
                what: "head",
                value: fields[6].to_string(),
            })?;
        current.tokens.push(Token {
            id,
            form: fields[1].to_string(),
            lemma: fields[2].to_string(),
            upos: fields[3].to_string(),
            xpos: fields[4].to_string(),
            feats: fields[5].to_string(),
            head,
            deprel: fields[7].to_string(),
            deps: fields[8].to_string(),
            misc: fields[9].to_string(),
        });
        seen_token = true;
    }
    if seen_token || !current.comments.is_empty() || !current.extras.is_empty() {
        validate(&current, sentences.len() + 1)?;
        sentences.push(current);
    }
    Ok(sentences)
}

fn validate(sentence: &Sentence, index: usize) -> Result<(), ConlluError> {
    let n = sentence.tokens.len();
    let fail = |message: String| ConlluError::Validation {
        sentence: index,
        message,
    };
    if n == 0 {
        return Err(fail("sentence has no tokens".into()));
    }
    for (i, tok) in sentence.tokens.iter().enumerate() {
        if tok.id != i + 1 {
            return Err(fail(format!(
                "token ids must be contiguous from 1; found {} at position {}",
                tok.id,
                i + 1
            )));
        }
        if tok.head > n {
            return Err(fail(format!(
                "token {} has head {} beyond sentence length {}",
                tok.id, tok.head, n
            )));
        }
        if tok.head == tok.id {
            return Err(fail(format!("token {} is its own head", tok.id)));
        }
    }
    // Reachability from the artificial root covers both connectivity and
    // acyclicity once every token has exactly one head.
    let mut reached = vec![false; n + 1];
    reached[0] = true;
    let mut frontier = vec![0usize];
    while let Some(h) = frontier.pop() {
        for tok in &sentence.tokens {
            if tok.head == h && !reached[tok.id] {
                reached[tok.id] = true;
                frontier.push(tok.id);
            }
        }
    }
    if let Some(id) = (1..=n).find(|&id| !reached[id]) {
        return Err(fail(format!(
            "heads do not form a tree rooted at 0 (token {} unreachable)",
            id
        )));
    }
    Ok(())
}

/// Render sentences back to CoNLL-U text. Inverse of [`parse_conllu`] on its
/// image; the current `head`/`deprel` fields land in columns 7-8.
pub fn write_conllu(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        for comment in &sentence.comments {
            out.push_str(comment);
            out.push('\n');
        }
        let mut extras = sentence.extras.iter().peekable();
        for (i, tok) in sentence.tokens.iter().enumerate() {
            while let Some(e) = extras.peek() {
                if e.before_token <= i {
                    out.push_str(&extras.next().unwrap().line);
                    out.push('\n');
                } else {
                    break;
                }
            }
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                tok.id,
                tok.form,
                tok.lemma,
                tok.upos,
                tok.xpos,
                tok.feats,
                tok.head,
                tok.deprel,
                tok.deps,
                tok.misc
            );
        }
        for e in extras {
            out.push_str(&e.line);
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// True iff no two arcs cross, counting the root arc (0, d).
pub fn is_projective(sentence: &Sentence) -> bool {
    let spans: Vec<(usize, usize)> = sentence
        .tokens
        .iter()
        .map(|t| (t.head.min(t.id), t.head.max(t.id)))
        .collect();
    for (i, &(a1, b1)) in spans.iter().enumerate() {
        for &(a2, b2) in &spans[i + 1..] {
            let crossing =
                (a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1);
            if crossing {
                return false;
            }
        }
    }
    true
}

/// Concatenate token forms with a single separator codepoint between
/// consecutive tokens. The separator stands in for whitespace when the raw
/// text has none; there is no leading or trailing separator.
pub fn to_char_sequence(sentence: &Sentence, separator: char) -> Result<CharSequence, ConlluError> {
    let mut codepoints = Vec::new();
    let mut word_final = Vec::with_capacity(sentence.tokens.len());
    for (i, tok) in sentence.tokens.iter().enumerate() {
        if tok.form.is_empty() {
            return Err(ConlluError::EmptyForm);
        }
        if i > 0 {
            codepoints.push(separator);
        }
        codepoints.extend(tok.form.chars());
        word_final.push(codepoints.len() - 1);
    }
    Ok(CharSequence {
        codepoints,
        word_final,
    })
}

/// Collect the character, tag and label inventories of a training set.
/// Ids depend only on the symbol sets, not on sentence order.
pub fn build_vocabularies(train: &[Sentence], separator: char) -> Vocabulary {
    let mut chars = BTreeSet::new();
    let mut tags = BTreeSet::new();
    let mut labels = BTreeSet::new();
    for sentence in train {
        if sentence.tokens.len() > 1 {
            chars.insert(separator);
        }
        for tok in &sentence.tokens {
            chars.extend(tok.form.chars());
            tags.insert(tok.upos.clone());
            labels.insert(tok.deprel.clone());
        }
    }
    Vocabulary {
        chars: chars.into_iter().collect(),
        tags: tags.into_iter().collect(),
        labels: labels.into_iter().collect(),
    }
}
