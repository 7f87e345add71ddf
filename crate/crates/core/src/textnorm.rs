//! Transcript normalization: lowercase, spell out integers, strip punctuation.
//!
//! Standalone digit tokens in `0..=999_999_999` become English words without
//! hyphens or "and" (`21` -> `twenty one`). Tokens that contain digits but are
//! not plain integers in range (`7.5`, `1st`, `x2`, `1,000`) pass through
//! lowercased and are listed in the report. Other punctuation is removed,
//! except apostrophes between two alphanumerics; hyphens, dashes and slashes
//! separate words.

use serde::{Deserialize, Serialize};

pub const MAX_SPELLED: u64 = 999_999_999;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub tokens_lowercased: usize,
    pub numbers_converted: usize,
    pub tokens_left_unconverted: Vec<String>,
}

impl NormalizationReport {
    pub fn merge(&mut self, other: NormalizationReport) {
        self.tokens_lowercased += other.tokens_lowercased;
        self.numbers_converted += other.numbers_converted;
        self.tokens_left_unconverted
            .extend(other.tokens_left_unconverted);
    }
}

/// Normalized text only.
pub fn normalize(raw: &str) -> String {
    normalize_transcript(raw).0
}

pub fn normalize_transcript(raw: &str) -> (String, NormalizationReport) {
    let mut report = NormalizationReport::default();
    let mut words: Vec<String> = Vec::new();

    for token in raw.split_whitespace() {
        let lowered = token.to_lowercase();
        if lowered != token {
            report.tokens_lowercased += 1;
        }
        let core = lowered.trim_matches(|c: char| !c.is_alphanumeric());
        if core.is_empty() {
            continue;
        }
        if core.bytes().all(|b| b.is_ascii_digit()) {
            match core.parse::<u64>() {
                Ok(n) if n <= MAX_SPELLED => {
                    report.numbers_converted += 1;
                    words.push(number_to_words(n));
                }
                _ => {
                    report.tokens_left_unconverted.push(core.to_string());
                    words.push(core.to_string());
                }
            }
            continue;
        }
        if core.chars().any(|c| c.is_numeric()) {
            report.tokens_left_unconverted.push(core.to_string());
            words.push(core.to_string());
            continue;
        }
        words.extend(strip_punctuation(core));
    }

    (words.join(" "), report)
}

/// Splits on word separators and drops punctuation other than intra-word
/// apostrophes.
fn strip_punctuation(token: &str) -> Vec<String> {
    let chars: Vec<char> = token
        .chars()
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            cur.push(c);
        } else if c == '\'' {
            let prev = i > 0 && chars[i - 1].is_alphanumeric();
            let next = chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
            if prev && next {
                cur.push(c);
            }
        } else if matches!(c, '-' | '\u{2013}' | '\u{2014}' | '/' | '_') {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];
const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

/// English words for `n` in `0..=999_999_999`.
pub fn number_to_words(n: u64) -> String {
    assert!(n <= MAX_SPELLED, "{n} is out of the spelled range");
    if n == 0 {
        return ONES[0].to_string();
    }
    let mut parts: Vec<&str> = Vec::new();
    let millions = n / 1_000_000;
    let thousands = (n / 1_000) % 1_000;
    let rest = n % 1_000;
    if millions > 0 {
        below_thousand(millions, &mut parts);
        parts.push("million");
    }
    if thousands > 0 {
        below_thousand(thousands, &mut parts);
        parts.push("thousand");
    }
    if rest > 0 {
        below_thousand(rest, &mut parts);
    }
    parts.join(" ")
}

fn below_thousand(n: u64, parts: &mut Vec<&'static str>) {
    let hundreds = n / 100;
    let rem = n % 100;
    if hundreds > 0 {
        parts.push(ONES[hundreds as usize]);
        parts.push("hundred");
    }
    if rem >= 20 {
        parts.push(TENS[(rem / 10) as usize]);
        if rem % 10 > 0 {
            parts.push(ONES[(rem % 10) as usize]);
        }
    } else if rem > 0 {
        parts.push(ONES[rem as usize]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_digit() {
        assert_eq!(normalize("1"), "one");
    }

    #[test]
    fn empty_input() {
        let (s, r) = normalize_transcript("");
        assert_eq!(s, "");
        assert_eq!(r, NormalizationReport::default());
    }

    #[test]
    fn mixed_case_with_number() {
        let (s, r) = normalize_transcript("Y 1 ONE D X");
        assert_eq!(s, "y one one d x");
        assert_eq!(r.numbers_converted, 1);
        assert_eq!(r.tokens_lowercased, 4);
    }

    #[test]
    fn spelled_numbers() {
        let cases = [
            (0, "zero"),
            (13, "thirteen"),
            (21, "twenty one"),
            (40, "forty"),
            (105, "one hundred five"),
            (1_000, "one thousand"),
            (1_234, "one thousand two hundred thirty four"),
            (1_000_001, "one million one"),
            (
                999_999_999,
                "nine hundred ninety nine million nine hundred ninety nine thousand nine hundred ninety nine",
            ),
        ];
        for (n, w) in cases {
            assert_eq!(number_to_words(n), w, "{n}");
        }
    }

    #[test]
    fn unconvertible_tokens_pass_through() {
        let (s, r) = normalize_transcript("Take 7.5 mg on the 1st of x2 then 1000000000");
        assert_eq!(s, "take 7.5 mg on the 1st of x2 then 1000000000");
        assert_eq!(
            r.tokens_left_unconverted,
            vec!["7.5", "1st", "x2", "1000000000"]
        );
    }

    #[test]
    fn punctuation_policy() {
        assert_eq!(normalize("Hello, world!"), "hello world");
        assert_eq!(normalize("don't 'quote' it"), "don't quote it");
        assert_eq!(normalize("well-known (5) items"), "well known five items");
        assert_eq!(normalize("  a \t\n b  "), "a b");
        assert_eq!(normalize("-- ..."), "");
        assert_eq!(normalize("SEGMENT 1"), "segment one");
    }

    fn token() -> impl Strategy<Value = String> {
        prop_oneof![
            "[A-Za-z]{1,6}",
            (0u64..2_000_000_000).prop_map(|n| n.to_string()),
            "[a-z]{1,3}[0-9]{1,2}",
            "[0-9]{1,2}\\.[0-9]",
            "[A-Za-z]{1,4}[,.!?'-][A-Za-z]{0,3}",
        ]
    }

    proptest! {
        #[test]
        fn idempotent_and_case_free(tokens in prop::collection::vec(token(), 0..12)) {
            let raw = tokens.join(" ");
            let once = normalize(&raw);
            prop_assert_eq!(normalize(&once), once.clone());
            prop_assert_eq!(once.to_lowercase(), once.clone());
            prop_assert!(!once.starts_with(' ') && !once.ends_with(' ') && !once.contains("  "));
            for w in once.split(' ') {
                if !w.is_empty() && w.bytes().all(|b| b.is_ascii_digit()) {
                    prop_assert!(w.parse::<u64>().map_or(true, |n| n > MAX_SPELLED));
                }
            }
        }

        #[test]
        fn spelling_never_shrinks(n in 0u64..=MAX_SPELLED) {
            prop_assert!(normalize(&n.to_string()).split(' ').count() >= 1);
        }
    }
}
