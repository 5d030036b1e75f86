//! Part-of-speech tagging for query term selection.
//!
//! The bundled [`LexiconTagger`] is a small rule-based tagger: a closed-class
//! lexicon, a list of common programming verbs, a list of words that are
//! noun/verb ambiguous in programming questions, suffix rules for unknown
//! words, and a handful of left-context rules. Anything it cannot place is a
//! noun. External taggers plug in through [`PosTagger`].

use std::collections::HashMap;
use std::sync::LazyLock;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Pronoun,
    Determiner,
    Preposition,
    Conjunction,
    Auxiliary,
    Number,
    Other,
}

#[derive(Debug, Error)]
#[error("part-of-speech tagger unavailable: {0}")]
pub struct TaggerError(pub String);

/// Assigns one tag per token. Tokens arrive lowercased and split.
pub trait PosTagger: Send + Sync {
    fn tag(&self, tokens: &[String]) -> Result<Vec<PosTag>, TaggerError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entry {
    Fixed(PosTag),
    // Noun or verb depending on the left context.
    NounVerb,
}

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "each", "every", "some", "any", "no",
    "all", "both", "either", "neither", "another", "my", "your", "our", "their", "its", "his",
    "her",
];
const PRONOUNS: &[&str] = &[
    "i", "me", "you", "we", "us", "they", "them", "he", "him", "she", "it", "myself", "yourself",
    "itself", "themselves", "one", "something", "anything", "everything", "nothing", "someone",
];
const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "to", "from", "by", "with", "without", "of", "for", "into", "onto", "over",
    "under", "through", "between", "among", "about", "across", "after", "before", "during",
    "inside", "outside", "within", "via", "per", "than", "like", "against", "towards", "toward",
    "upon", "off", "out", "up", "down",
];
const CONJUNCTIONS: &[&str] = &[
    "and", "or", "but", "nor", "so", "yet", "if", "because", "while", "whereas", "unless",
    "whether", "although", "though",
];
const AUXILIARIES: &[&str] = &[
    "do", "does", "did", "done", "is", "are", "was", "were", "be", "been", "being", "am", "have",
    "has", "had", "can", "could", "should", "would", "will", "shall", "may", "might", "must",
    "cannot", "don", "doesn", "isn", "aren", "won", "can't",
];
const ADVERBS: &[&str] = &[
    "how", "why", "when", "where", "what", "which", "who", "whom", "whose", "not", "very", "too",
    "also", "just", "only", "then", "there", "here", "again", "always", "never", "often", "still",
    "already", "instead", "even", "quickly", "programmatically", "dynamically", "properly",
    "correctly", "efficiently", "now", "else", "rather",
];
const ADJECTIVES: &[&str] = &[
    "new", "old", "different", "same", "simple", "multiple", "empty", "large", "small", "big",
    "best", "better", "good", "bad", "specific", "particular", "certain", "possible", "current",
    "whole", "entire", "first", "last", "next", "previous", "unique", "easy", "fast", "slow",
    "efficient", "correct", "wrong", "custom", "own", "other", "many", "much", "several",
    "various", "proper", "right", "valid", "invalid", "single", "whole", "full", "random",
    "remote", "local", "given", "existing", "main", "default", "relative", "absolute", "simplest",
    "easiest", "fastest", "proper", "common", "same", "similar", "specified",
];
// Verbs that are rarely nouns in programming questions.
const VERBS: &[&str] = &[
    "get", "make", "send", "create", "convert", "generate", "read", "write", "compress",
    "decompress", "remove", "delete", "add", "insert", "find", "search", "check", "compare",
    "split", "join", "append", "iterate", "loop", "execute", "run", "invoke", "open", "close",
    "connect", "download", "upload", "encrypt", "decrypt", "encode", "decode", "serialize",
    "deserialize", "display", "show", "draw", "paint", "calculate", "compute", "count", "copy",
    "move", "rename", "extract", "load", "save", "store", "retrieve", "fetch", "receive",
    "listen", "handle", "catch", "throw", "throws", "use", "using", "implement", "override",
    "declare", "initialize", "initialise", "instantiate", "validate", "verify", "detect",
    "determine", "replace", "reverse", "trim", "format", "print", "sort", "filter", "merge",
    "wait", "sleep", "stop", "start", "kill", "avoid", "prevent", "keep", "need", "want", "know",
    "tell", "let", "allow", "return", "returns", "pass", "access", "modify", "change", "update",
    "resize", "scale", "rotate", "crop", "render", "play", "unzip", "zip", "parse", "hash",
    "set", "put", "list", "map", "call", "test", "debug", "log", "import", "export", "mock",
    "build", "deploy", "install", "configure", "schedule", "sign", "lock", "unlock", "shuffle",
    "clone", "group", "match", "scan", "click", "select", "bind", "submit", "redirect",
    "generating", "sending", "reading", "writing", "parsing", "converting", "creating",
];
// Of the above, the ones that are as often nouns ("a list", "the map").
const NOUN_VERB: &[&str] = &[
    "list", "map", "set", "sort", "hash", "test", "log", "call", "match", "loop", "zip", "lock",
    "group", "format", "count", "copy", "import", "export", "mock", "build", "filter", "play",
    "scan", "click", "update", "change", "access", "search", "check", "return", "sign", "run",
    "display", "show", "use", "need", "handle", "store", "load", "print", "split", "file",
    "parse", "debug", "catch", "start", "stop", "select", "bind", "schedule", "scale", "crop",
];
// Nouns that would otherwise trip a suffix rule.
const NOUNS: &[&str] = &[
    "string", "thing", "ping", "spring", "ring", "king", "padding", "encoding", "logging",
    "mapping", "binding", "setting", "settings", "heading", "thread", "date", "state", "template",
    "update", "private", "table", "variable", "runnable", "serializable", "iterable", "cable",
    "java", "class", "object", "method", "array", "image", "url", "http", "json", "xml", "html",
    "database", "server", "client", "socket", "stream", "byte", "bytes", "character", "integer",
    "number", "value", "key", "element", "node", "document", "text", "data", "time", "field",
    "exception", "error", "event", "window", "button", "frame", "panel", "code", "example",
    "program", "application", "app", "library", "jar", "interface", "type", "generic",
    "collection", "queue", "stack", "tree", "graph", "parser", "email", "mail", "message",
];

static LEXICON: LazyLock<HashMap<&'static str, Entry>> = LazyLock::new(|| {
    let mut m = HashMap::new();
    let groups: &[(&[&str], PosTag)] = &[
        (ADJECTIVES, PosTag::Adjective),
        (ADVERBS, PosTag::Adverb),
        (VERBS, PosTag::Verb),
        (NOUNS, PosTag::Noun),
        (CONJUNCTIONS, PosTag::Conjunction),
        (PREPOSITIONS, PosTag::Preposition),
        (PRONOUNS, PosTag::Pronoun),
        (DETERMINERS, PosTag::Determiner),
        (AUXILIARIES, PosTag::Auxiliary),
    ];
    // Later groups win, so closed-class words override open-class lists.
    for (words, tag) in groups {
        for w in *words {
            m.insert(*w, Entry::Fixed(*tag));
        }
    }
    for w in NOUN_VERB {
        m.insert(*w, Entry::NounVerb);
    }
    m
});

/// Rule-based default tagger.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexiconTagger;

impl LexiconTagger {
    pub fn new() -> Self {
        Self
    }

    fn suffix_tag(word: &str) -> PosTag {
        if word.chars().all(|c| c.is_ascii_digit()) {
            return PosTag::Number;
        }
        let n = word.chars().count();
        if n > 4 && word.ends_with("ly") {
            return PosTag::Adverb;
        }
        if n > 5 && (word.ends_with("ing") || word.ends_with("ize") || word.ends_with("ise") || word.ends_with("ify")) {
            return PosTag::Verb;
        }
        if n > 4 && word.ends_with("ed") && !word.ends_with("eed") {
            return PosTag::Verb;
        }
        if n > 5 && (word.ends_with("ous") || word.ends_with("ful") || word.ends_with("less")) {
            return PosTag::Adjective;
        }
        PosTag::Noun
    }

    fn verb_context(prev: Option<PosTag>, prev_word: Option<&str>) -> bool {
        match prev {
            None => true,
            Some(PosTag::Auxiliary) | Some(PosTag::Pronoun) | Some(PosTag::Adverb) | Some(PosTag::Conjunction) => true,
            Some(PosTag::Preposition) => prev_word == Some("to"),
            _ => false,
        }
    }
}

impl PosTagger for LexiconTagger {
    fn tag(&self, tokens: &[String]) -> Result<Vec<PosTag>, TaggerError> {
        let mut tags: Vec<PosTag> = Vec::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            let prev = tags.last().copied();
            let prev_word = i.checked_sub(1).map(|j| tokens[j].as_str());
            let tag = match LEXICON.get(tok.as_str()) {
                Some(Entry::Fixed(PosTag::Verb)) => {
                    // "the sort", "a new read" are nouns
                    if matches!(prev, Some(PosTag::Determiner) | Some(PosTag::Adjective)) {
                        PosTag::Noun
                    } else {
                        PosTag::Verb
                    }
                }
                Some(Entry::Fixed(t)) => *t,
                Some(Entry::NounVerb) => {
                    if Self::verb_context(prev, prev_word) {
                        PosTag::Verb
                    } else {
                        PosTag::Noun
                    }
                }
                None => Self::suffix_tag(tok),
            };
            tags.push(tag);
        }
        Ok(tags)
    }
}
