use std::ops::Range;

/// Whitespace tokens of a text, grouped into sentences.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenizedText {
    pub tokens: Vec<String>,
    /// Byte range of each token in the source text.
    pub token_spans: Vec<Range<usize>>,
    /// Token-index ranges; disjoint, ordered, covering every token.
    pub sentences: Vec<Range<usize>>,
    /// Unicode scalar count of the raw text.
    pub char_count: usize,
}

impl TokenizedText {
    /// Scalar length of a sentence from its first token start to its last token end.
    pub fn sentence_char_len(&self, text: &str, sentence: &Range<usize>) -> usize {
        if sentence.is_empty() {
            return 0;
        }
        let start = self.token_spans[sentence.start].start;
        let end = self.token_spans[sentence.end - 1].end;
        text[start..end].chars().count()
    }
}

fn ends_sentence(token: &str) -> bool {
    matches!(token.chars().last(), Some('.' | '!' | '?'))
}

pub fn tokenize(text: &str) -> TokenizedText {
    let mut tokens = Vec::new();
    let mut token_spans = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                token_spans.push(s..i);
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        token_spans.push(s..text.len());
    }
    for span in &token_spans {
        tokens.push(text[span.clone()].to_string());
    }

    let mut sentences = Vec::new();
    let mut sentence_start = 0;
    for (i, tok) in tokens.iter().enumerate() {
        if ends_sentence(tok) {
            sentences.push(sentence_start..i + 1);
            sentence_start = i + 1;
        }
    }
    if sentence_start < tokens.len() {
        sentences.push(sentence_start..tokens.len());
    }

    TokenizedText {
        tokens,
        token_spans,
        sentences,
        char_count: text.chars().count(),
    }
}
