//! Turning the raw text of a code mention into identifier tokens.

use alloc::string::String;
use alloc::vec::Vec;

use crate::code::Profile;

/// Union of the shipped profiles' reserved words, sorted and deduplicated.
pub fn default_stoplist() -> Vec<String> {
    let mut words: Vec<String> = Profile::ALL
        .iter()
        .flat_map(|p| p.keywords().iter().map(|w| String::from(*w)))
        .collect();
    words.sort();
    words.dedup();
    words
}

/// Removes parenthesised argument lists, including the parentheses.
/// An unclosed `(` drops the rest of the text.
fn strip_arguments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut depth = 0usize;
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' if depth > 0 => depth -= 1,
            ')' => out.push(' '),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

fn is_token_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

/// Splits mention text into identifier tokens.
///
/// `::` and `->` become `.`, argument lists are removed, the rest is split
/// on anything outside `[A-Za-z0-9_.]`, and each piece loses leading and
/// trailing dots. Pieces shorter than `min_len`, purely numeric pieces and
/// stoplisted words are dropped.
pub fn tokenize_identifier(raw_text: &str, min_len: usize, stoplist: &[String]) -> Vec<String> {
    let normalized = raw_text.replace("::", ".").replace("->", ".");
    let stripped = strip_arguments(&normalized);
    stripped
        .split(|c: char| !is_token_char(c))
        .map(|t| t.trim_matches('.'))
        .filter(|t| t.chars().count() >= min_len)
        .filter(|t| !t.chars().all(|c| c.is_ascii_digit() || c == '.'))
        .filter(|t| !stoplist.iter().any(|s| s == t))
        .map(String::from)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tok(s: &str) -> Vec<String> {
        tokenize_identifier(s, 2, &default_stoplist())
    }

    #[test]
    fn strips_argument_lists() {
        assert_eq!(tok("parser.parse(input)"), ["parser.parse"]);
        assert_eq!(tok("f.compute()"), ["f.compute"]);
        assert_eq!(tok("run(a, g(b))"), ["run"]);
        assert_eq!(tok("open("), ["open"]);
    }

    #[test]
    fn separators() {
        assert_eq!(tok("Foo::bar()"), ["Foo.bar"]);
        assert_eq!(tok("node->next"), ["node.next"]);
        assert_eq!(tok("Parser#parse"), ["Parser", "parse"]);
        assert_eq!(tok("List<String>"), ["List", "String"]);
        assert_eq!(tok(".hidden."), ["hidden"]);
    }

    #[test]
    fn drops_short_numeric_and_reserved() {
        assert_eq!(tok("for"), Vec::<String>::new());
        assert_eq!(tok("x = 42"), Vec::<String>::new());
        assert_eq!(tok("return value"), ["value"]);
        assert_eq!(tok("3.14"), Vec::<String>::new());
        assert_eq!(tok("a b cd"), ["cd"]);
        assert_eq!(tok(""), Vec::<String>::new());
    }

    #[test]
    fn custom_parameters() {
        assert_eq!(tokenize_identifier("x.y z", 1, &[]), vec!["x.y", "z"]);
        assert_eq!(tokenize_identifier("keep drop", 2, &[String::from("drop")]), vec!["keep"]);
    }

    #[test]
    fn stoplist_is_sorted_union() {
        let s = default_stoplist();
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        for w in ["if", "for", "class", "def", "return", "public"] {
            assert!(s.iter().any(|x| x == w), "{w}");
        }
    }

    proptest::proptest! {
        #[test]
        fn tokens_are_clean(raw in "\\PC{0,40}") {
            for t in tok(&raw) {
                proptest::prop_assert!(t.chars().count() >= 2);
                proptest::prop_assert!(t.chars().all(is_token_char));
                proptest::prop_assert!(!t.starts_with('.') && !t.ends_with('.'));
            }
            proptest::prop_assert_eq!(tok(&raw), tok(&raw));
        }
    }
}
