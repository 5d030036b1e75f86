//! Text normalization: splitting, stop-word removal, stemming, and
//! part-of-speech filtering of query terms.

mod pos;
mod stopwords;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use pos::{LexiconTagger, PosTag, PosTagger, TaggerError};
pub use stopwords::{StopWordError, StopWordList, StopWordSource};

static STEMMER: LazyLock<Stemmer> = LazyLock::new(|| Stemmer::create(Algorithm::English));

// Porter2 converges in two or three rounds on real words.
const MAX_STEM_ROUNDS: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid keyword {0:?}: must be non-empty, alphanumeric and lowercase")]
pub struct InvalidKeyword(pub String);

/// A lowercase, stemmed, alphanumeric token from a title or query.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Keyword(String);

impl Keyword {
    /// Validates the lexical shape only; it does not stem.
    pub fn new(text: impl Into<String>) -> Result<Self, InvalidKeyword> {
        let text = text.into();
        if is_keyword_shaped(&text) {
            Ok(Self(text))
        } else {
            Err(InvalidKeyword(text))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

fn is_keyword_shaped(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() && !c.is_uppercase())
}

impl TryFrom<String> for Keyword {
    type Error = InvalidKeyword;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Keyword::new(s)
    }
}

impl From<Keyword> for String {
    fn from(k: Keyword) -> String {
        k.0
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Keyword {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Keyword {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Which query terms survive part-of-speech filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryTermMode {
    AllTerms,
    NounOnly,
    VerbOnly,
    #[default]
    NounAndVerb,
}

impl QueryTermMode {
    pub const ALL: [QueryTermMode; 4] = [
        QueryTermMode::AllTerms,
        QueryTermMode::NounOnly,
        QueryTermMode::VerbOnly,
        QueryTermMode::NounAndVerb,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QueryTermMode::AllTerms => "all-terms",
            QueryTermMode::NounOnly => "noun-only",
            QueryTermMode::VerbOnly => "verb-only",
            QueryTermMode::NounAndVerb => "noun-and-verb",
        }
    }

    fn keeps(self, tag: PosTag) -> bool {
        match self {
            QueryTermMode::AllTerms => true,
            QueryTermMode::NounOnly => tag == PosTag::Noun,
            QueryTermMode::VerbOnly => tag == PosTag::Verb,
            QueryTermMode::NounAndVerb => matches!(tag, PosTag::Noun | PosTag::Verb),
        }
    }
}

impl fmt::Display for QueryTermMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown query term mode {0:?} (expected all-terms, noun-only, verb-only or noun-and-verb)")]
pub struct ParseModeError(pub String);

impl FromStr for QueryTermMode {
    type Err = ParseModeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" | "all-terms" => Ok(QueryTermMode::AllTerms),
            "noun" | "nouns" | "noun-only" => Ok(QueryTermMode::NounOnly),
            "verb" | "verbs" | "verb-only" => Ok(QueryTermMode::VerbOnly),
            "noun-verb" | "noun-and-verb" | "nv" => Ok(QueryTermMode::NounAndVerb),
            _ => Err(ParseModeError(s.to_string())),
        }
    }
}

/// Lowercases and splits on every non-alphanumeric character, keeping order.
/// Letters with no lowercase form (mathematical capitals and the like) also
/// split.
pub fn normalize_and_split(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric() || c.is_uppercase())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn remove_stop_words(tokens: &[String], stops: &StopWordList) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stops.contains(t))
        .cloned()
        .collect()
}

/// Snowball English stem, iterated until it stops changing.
///
/// `token` must be a lowercase alphanumeric fragment as produced by
/// [`normalize_and_split`].
pub fn stem(token: &str) -> Keyword {
    debug_assert!(is_keyword_shaped(token), "stem() called on {token:?}");
    let mut current = token.to_string();
    for _ in 0..MAX_STEM_ROUNDS {
        let next = STEMMER.stem(&current);
        if next == current || next.is_empty() {
            break;
        }
        current = next.into_owned();
    }
    Keyword(current)
}

/// Keywords of a title: the unique set plus the stemmed sequence in title order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TitleKeywords {
    pub keywords: BTreeSet<Keyword>,
    pub sequence: Vec<Keyword>,
}

fn stem_and_filter(tokens: &[String], stops: &StopWordList) -> TitleKeywords {
    let sequence: Vec<Keyword> = remove_stop_words(tokens, stops)
        .iter()
        .map(|t| stem(t))
        .filter(|k| !stops.contains(k.as_str()))
        .collect();
    let keywords = sequence.iter().cloned().collect();
    TitleKeywords { keywords, sequence }
}

/// Split, remove stop words, stem, deduplicate.
pub fn preprocess_title(title: &str, stops: &StopWordList) -> TitleKeywords {
    stem_and_filter(&normalize_and_split(title), stops)
}

/// Query keywords plus whether the tagger failed and all terms were used.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryKeywords {
    pub keywords: BTreeSet<Keyword>,
    pub degraded: bool,
}

/// Tags the query first (the tagger wants the full sentence), drops terms the
/// mode rejects, then runs the title pipeline on what is left.
pub fn extract_query_keywords(
    query: &str,
    mode: QueryTermMode,
    stops: &StopWordList,
    tagger: &dyn PosTagger,
) -> QueryKeywords {
    let tokens = normalize_and_split(query);
    if mode == QueryTermMode::AllTerms {
        return QueryKeywords {
            keywords: stem_and_filter(&tokens, stops).keywords,
            degraded: false,
        };
    }
    let tags = match tagger.tag(&tokens) {
        Ok(tags) if tags.len() == tokens.len() => tags,
        Ok(tags) => {
            log::warn!(
                "tagger returned {} tags for {} tokens; using all query terms",
                tags.len(),
                tokens.len()
            );
            return degraded(&tokens, stops);
        }
        Err(e) => {
            log::warn!("{e}; using all query terms");
            return degraded(&tokens, stops);
        }
    };
    let kept: Vec<String> = tokens
        .into_iter()
        .zip(tags)
        .filter(|(_, tag)| mode.keeps(*tag))
        .map(|(t, _)| t)
        .collect();
    QueryKeywords {
        keywords: stem_and_filter(&kept, stops).keywords,
        degraded: false,
    }
}

fn degraded(tokens: &[String], stops: &StopWordList) -> QueryKeywords {
    QueryKeywords {
        keywords: stem_and_filter(tokens, stops).keywords,
        degraded: true,
    }
}
