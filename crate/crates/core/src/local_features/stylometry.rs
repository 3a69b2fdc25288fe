use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize, TokenizedText};

pub const STYLO_DIM: usize = 15;

pub const STYLO_NAMES: [&str; STYLO_DIM] = [
    "avg_word_length_title",
    "word_count_title",
    "char_count_title",
    "spec_char_count_title",
    "upper_char_count_title",
    "upper_word_count_title",
    "avg_word_length_text",
    "word_count_text",
    "char_count_text",
    "spec_char_count_text",
    "upper_char_count_text",
    "upper_word_count_text",
    "sentence_count_text",
    "avg_sentence_length_char_text",
    "avg_sentence_length_word_text",
];

/// Counts shared by title and body.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TextCounts {
    pub avg_word_length: f64,
    pub word_count: f64,
    pub char_count: f64,
    pub spec_char_count: f64,
    pub upper_char_count: f64,
    pub upper_word_count: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StyloVector {
    pub title: TextCounts,
    pub body: TextCounts,
    pub sentence_count_text: f64,
    pub avg_sentence_length_char_text: f64,
    pub avg_sentence_length_word_text: f64,
}

impl StyloVector {
    /// Values in [`STYLO_NAMES`] order.
    pub fn to_vec(&self) -> Vec<f64> {
        let t = &self.title;
        let b = &self.body;
        vec![
            t.avg_word_length,
            t.word_count,
            t.char_count,
            t.spec_char_count,
            t.upper_char_count,
            t.upper_word_count,
            b.avg_word_length,
            b.word_count,
            b.char_count,
            b.spec_char_count,
            b.upper_char_count,
            b.upper_word_count,
            self.sentence_count_text,
            self.avg_sentence_length_char_text,
            self.avg_sentence_length_word_text,
        ]
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn is_special(c: char) -> bool {
    !(c.is_alphabetic() || c.is_numeric() || c.is_whitespace())
}

fn text_counts(text: &str, tok: &TokenizedText) -> TextCounts {
    let token_chars: usize = tok.tokens.iter().map(|t| t.chars().count()).sum();
    TextCounts {
        avg_word_length: ratio(token_chars, tok.tokens.len()),
        word_count: tok.tokens.len() as f64,
        char_count: tok.char_count as f64,
        spec_char_count: text.chars().filter(|&c| is_special(c)).count() as f64,
        upper_char_count: text.chars().filter(|c| c.is_uppercase()).count() as f64,
        upper_word_count: tok
            .tokens
            .iter()
            .filter(|t| t.chars().next().is_some_and(char::is_uppercase))
            .count() as f64,
    }
}

pub fn stylometric_features(title: &str, body: &str) -> StyloVector {
    let title_tok = tokenize(title);
    let body_tok = tokenize(body);
    let sentences = body_tok.sentences.len();
    let sentence_chars: usize = body_tok
        .sentences
        .iter()
        .map(|s| body_tok.sentence_char_len(body, s))
        .sum();
    StyloVector {
        title: text_counts(title, &title_tok),
        body: text_counts(body, &body_tok),
        sentence_count_text: sentences as f64,
        avg_sentence_length_char_text: ratio(sentence_chars, sentences),
        avg_sentence_length_word_text: ratio(body_tok.tokens.len(), sentences),
    }
}
