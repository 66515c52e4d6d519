use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

static HTML_TAG: Lazy<Regex> = Lazy::new(|| Regex::new(r"<[^>]*>").unwrap());
static URL: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S*").unwrap());
static MENTION: Lazy<Regex> = Lazy::new(|| Regex::new(r"@\w+").unwrap());
static HASHTAG_WORD: Lazy<Regex> = Lazy::new(|| Regex::new(r"#\w+").unwrap());
static SPECIAL: Lazy<Regex> = Lazy::new(|| Regex::new(r"[^\p{L}\p{N}\s']").unwrap());
static WHITESPACE: Lazy<Regex> = Lazy::new(|| Regex::new(r"\s+").unwrap());

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleanOptions {
    /// Remove `#word` entirely instead of keeping `word`.
    pub drop_hashtags: bool,
}

/// [`clean_text_with`] under default options (hashtag words kept).
pub fn clean_text(raw: &str) -> String {
    clean_text_with(raw, &CleanOptions::default())
}

/// Strips HTML tags, URLs, @mentions and hashtag markers, then every character
/// that is not a letter, digit, whitespace or apostrophe. Whitespace runs
/// collapse to one space and the result is trimmed.
///
/// Idempotent: the output contains none of `<`, `@`, `#`, `.`, `/` or `:`,
/// so no pattern can match a second time.
pub fn clean_text_with(raw: &str, options: &CleanOptions) -> String {
    // Tags go first so "<a href=...>" doesn't leave URL fragments behind.
    let s = HTML_TAG.replace_all(raw, " ");
    let s = URL.replace_all(&s, " ");
    let s = MENTION.replace_all(&s, " ");
    let s = if options.drop_hashtags {
        HASHTAG_WORD.replace_all(&s, " ")
    } else {
        s
    };
    // The '#' marker itself falls to the special-character pass.
    let s = SPECIAL.replace_all(&s, "");
    WHITESPACE.replace_all(&s, " ").trim().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_social_media_noise() {
        assert_eq!(clean_text("I feel low https://t.co/abc @dr #sad!!"), "I feel low sad");
        assert_eq!(clean_text("<p>fine</p>"), "fine");
        assert_eq!(clean_text("hello"), "hello");
    }

    #[test]
    fn www_urls_and_apostrophes() {
        assert_eq!(clean_text("see www.example.com/x now"), "see now");
        assert_eq!(clean_text("I can't   sleep..."), "I can't sleep");
    }

    #[test]
    fn hashtag_drop_knob() {
        let opts = CleanOptions { drop_hashtags: true };
        assert_eq!(clean_text_with("so #tired of this", &opts), "so of this");
        assert_eq!(clean_text("so #tired of this"), "so tired of this");
    }

    #[test]
    fn empty_output_allowed() {
        assert_eq!(clean_text("@someone https://x.y !!!"), "");
        assert_eq!(clean_text(""), "");
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC{0,80}") {
            let once = clean_text(&s);
            prop_assert_eq!(clean_text(&once), once.clone());
            let opts = CleanOptions { drop_hashtags: true };
            let once = clean_text_with(&s, &opts);
            prop_assert_eq!(clean_text_with(&once, &opts), once);
        }

        #[test]
        fn idempotent_on_noisy_ascii(s in "[a-zA-Z0-9 <>@#/:.'!wht]{0,60}") {
            let once = clean_text(&s);
            prop_assert_eq!(clean_text(&once), once);
        }
    }
}
