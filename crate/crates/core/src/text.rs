//! Text helpers shared by the pipeline stages: field normalization,
//! light stemming for relation matching, and a span-preserving tokenizer.

use std::ops::Range;

const DETERMINERS: [&str; 3] = ["a", "an", "the"];

/// Casefolds, collapses whitespace, strips punctuation at the field edges and
/// drops leading `a`/`an`/`the`. Idempotent.
pub fn normalize_field(raw: &str) -> String {
    let mut current = collapse(raw);
    loop {
        let next = strip_leading_determiner(trim_edge_punct(&current));
        if next == current {
            return current;
        }
        current = next;
    }
}

fn collapse(raw: &str) -> String {
    raw.split_whitespace()
        .map(|t| t.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

fn trim_edge_punct(s: &str) -> &str {
    s.trim_matches(|c: char| !c.is_alphanumeric())
}

fn strip_leading_determiner(s: &str) -> String {
    let mut tokens = s.split_whitespace().peekable();
    match tokens.peek() {
        Some(first) if DETERMINERS.contains(&trim_edge_punct(first)) => {
            tokens.next();
            tokens.collect::<Vec<_>>().join(" ")
        }
        _ => s.split_whitespace().collect::<Vec<_>>().join(" "),
    }
}

/// Whitespace token count of an already normalized field.
pub fn token_count(normalized: &str) -> usize {
    normalized.split_whitespace().count()
}

/// True when `needle` occurs in `haystack` as a contiguous run of whole tokens.
pub fn contains_token_sequence(haystack: &str, needle: &str) -> bool {
    let hay: Vec<&str> = haystack.split_whitespace().collect();
    let pin: Vec<&str> = needle.split_whitespace().collect();
    if pin.is_empty() || pin.len() > hay.len() {
        return false;
    }
    hay.windows(pin.len()).any(|w| w == pin.as_slice())
}

/// Suffix-stripping stemmer used for relation-type matching.
///
/// Strips `-ies`, `-es` (after sibilants), `-s`, `-ed` and `-ing`, then drops a
/// final silent `e` and collapses a doubled final consonant, so that
/// "travel", "traveled" and "travelling" share the stem "travel".
pub fn stem(word: &str) -> String {
    let w: String = word
        .to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric())
        .collect();
    if w.chars().count() <= 3 {
        return w;
    }
    let mut s = strip_suffix(&w);
    if s.len() > 3 && s.ends_with('e') {
        s.pop();
    }
    let b = s.as_bytes();
    let n = b.len();
    if n > 3 && b[n - 1] == b[n - 2] && is_consonant(b[n - 1]) {
        s.pop();
    }
    s
}

fn strip_suffix(w: &str) -> String {
    if let Some(base) = w.strip_suffix("ies") {
        if base.len() >= 2 {
            return format!("{base}y");
        }
    }
    for suffix in ["ing", "ed"] {
        if let Some(base) = w.strip_suffix(suffix) {
            if base.len() >= 3 {
                return base.to_string();
            }
        }
    }
    if let Some(base) = w.strip_suffix("es") {
        if ["sh", "ch", "x", "s", "z"]
            .iter()
            .any(|s| base.ends_with(s))
            && base.len() >= 3
        {
            return base.to_string();
        }
    }
    if let Some(base) = w.strip_suffix('s') {
        if !base.ends_with('s') && !base.ends_with('u') && !base.ends_with('i') && base.len() >= 3 {
            return base.to_string();
        }
    }
    w.to_string()
}

fn is_consonant(b: u8) -> bool {
    b.is_ascii_alphabetic() && !matches!(b, b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Stems every token of a normalized relation phrase.
pub fn stem_tokens(phrase: &str) -> Vec<String> {
    phrase
        .split_whitespace()
        .map(stem)
        .filter(|t| !t.is_empty())
        .collect()
}

/// A token with its byte span in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub span: Range<usize>,
}

impl Token<'_> {
    pub fn is_word(&self) -> bool {
        self.text
            .chars()
            .next()
            .is_some_and(|c| c.is_alphanumeric())
    }

    pub fn is_capitalized(&self) -> bool {
        self.text.chars().next().is_some_and(|c| c.is_uppercase())
    }
}

/// Splits text into words and punctuation. Internal apostrophes, hyphens and
/// periods stay inside a word ("al-Sadr", "U.S."), a possessive `'s` becomes its
/// own token, and a trailing sentence period is split off.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let end_of = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if !c.is_alphanumeric() {
            if is_apostrophe(c)
                && matches!(chars.get(i + 1), Some((_, 's' | 'S')))
                && !chars.get(i + 2).is_some_and(|&(_, n)| n.is_alphanumeric())
            {
                out.push(Token {
                    text: &text[start..end_of(i + 2)],
                    span: start..end_of(i + 2),
                });
                i += 2;
                continue;
            }
            out.push(Token {
                text: &text[start..end_of(i + 1)],
                span: start..end_of(i + 1),
            });
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < chars.len() {
            let ch = chars[j].1;
            if ch.is_alphanumeric() {
                j += 1;
                continue;
            }
            let next_alnum = chars.get(j + 1).is_some_and(|&(_, n)| n.is_alphanumeric());
            if ch == '-' && next_alnum {
                j += 1;
                continue;
            }
            if is_apostrophe(ch) && next_alnum {
                // Possessive 's is split off; contractions and names like O'Neil stay whole.
                let possessive = matches!(chars.get(j + 1), Some((_, 's' | 'S')))
                    && !chars.get(j + 2).is_some_and(|&(_, n)| n.is_alphanumeric());
                if possessive {
                    break;
                }
                j += 1;
                continue;
            }
            if ch == '.' && next_alnum && is_dotted_abbrev(&chars[i..]) {
                j += 1;
                continue;
            }
            break;
        }
        // Keep the final period of a dotted abbreviation like "U.S." attached.
        if j < chars.len() && chars[j].1 == '.' && is_dotted_abbrev(&chars[i..=j]) {
            j += 1;
        }
        out.push(Token {
            text: &text[start..end_of(j)],
            span: start..end_of(j),
        });
        i = j;
    }
    out
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Single letters separated by periods: "U.S", "U.N.".
fn is_dotted_abbrev(chars: &[(usize, char)]) -> bool {
    let mut letters = 0;
    let mut prev_letter = false;
    for &(_, c) in chars {
        if c.is_alphabetic() {
            if prev_letter {
                return false;
            }
            prev_letter = true;
            letters += 1;
        } else if c == '.' {
            if !prev_letter {
                return false;
            }
            prev_letter = false;
        } else {
            break;
        }
    }
    letters >= 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_field("The men"), "men");
        assert_eq!(normalize_field("spoke to"), "spoke to");
        assert_eq!(normalize_field("their leader"), "their leader");
        assert_eq!(normalize_field("  JOHN "), "john");
        assert_eq!(normalize_field("Traveled To"), "traveled to");
        assert_eq!(normalize_field("Baghdad."), "baghdad");
        assert_eq!(normalize_field("the"), "");
        assert_eq!(normalize_field("The \"the\" bunker"), "bunker");
    }

    #[test]
    fn token_sequence_containment_is_whole_token() {
        assert!(contains_token_sequence(
            "traveled to eastern baghdad in",
            "eastern baghdad"
        ));
        assert!(!contains_token_sequence("ran from", "ran from iran"));
        assert!(!contains_token_sequence("traveled to iran", "ran"));
        assert!(!contains_token_sequence("a b", ""));
    }

    #[test]
    fn stems_agree_across_inflections() {
        assert_eq!(stem("travel"), "travel");
        assert_eq!(stem("traveled"), "travel");
        assert_eq!(stem("travelled"), "travel");
        assert_eq!(stem("traveling"), "travel");
        assert_eq!(stem("travels"), "travel");
        assert_eq!(stem("preach"), "preach");
        assert_eq!(stem("preached"), "preach");
        assert_eq!(stem("preaches"), "preach");
        assert_eq!(stem("kill"), stem("killed"));
        assert_eq!(stem("move"), stem("moved"));
        assert_eq!(stem("planned"), stem("plan"));
        assert_eq!(stem("to"), "to");
    }

    #[test]
    fn tokenizer_keeps_spans() {
        let text = "The Israeli government's program, in the U.S. today.";
        let toks = tokenize(text);
        let words: Vec<&str> = toks.iter().map(|t| t.text).collect();
        assert_eq!(
            words,
            [
                "The",
                "Israeli",
                "government",
                "'s",
                "program",
                ",",
                "in",
                "the",
                "U.S.",
                "today",
                "."
            ]
        );
        for t in &toks {
            assert_eq!(&text[t.span.clone()], t.text);
        }
    }

    #[test]
    fn tokenizer_handles_hyphens_and_names() {
        let words: Vec<&str> = tokenize("Abu al-Masri met O'Neil.")
            .into_iter()
            .map(|t| t.text)
            .collect();
        assert_eq!(words, ["Abu", "al-Masri", "met", "O'Neil", "."]);
    }
}
