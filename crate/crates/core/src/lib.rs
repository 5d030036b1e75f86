//! Recommends API classes for natural-language code search queries.
//!
//! An index is mined from question/accepted-answer pairs: stemmed title
//! keywords are linked to the class names used in the answer's code, and
//! title keywords are linked to each other. A query is reduced to keywords,
//! each keyword nominates its most frequent APIs, coherent keyword pairs
//! reinforce the APIs they share, and the accumulated scores are ranked.
//!
//! ```
//! use apirec_core::{build_index, BuildConfig, CorpusDocument, QueryConfig, Recommender, StopWordList};
//!
//! let docs = vec![CorpusDocument::new(
//!     "1",
//!     "Generating MD5 hash",
//!     "<pre><code>MessageDigest md = MessageDigest.getInstance(\"MD5\");</code></pre>",
//! )];
//! let (indices, _report) = build_index(docs, &BuildConfig::default());
//! let engine = Recommender::new(indices, StopWordList::builtin());
//! let rec = engine.recommend("md5 hash in java", &QueryConfig::default()).unwrap();
//! assert_eq!(rec.apis[0].api.as_str(), "MessageDigest");
//! ```

pub mod code;
pub mod convert;
pub mod corpus;
pub mod eval;
pub mod index;
pub mod ranker;
pub mod recommend;
pub mod stats;
pub mod text;

pub use code::{extract_answer_apis, extract_code_blocks, parse_api_tokens, ApiClassName, ApiWhitelist, CodeBlock};
pub use corpus::CorpusDocument;
pub use index::{build_index, build_index_par, load_index, save_index, BuildConfig, Indices};
pub use ranker::{rank_apis, RankError, RankerConfig, ScoredApi};
pub use recommend::{recommend, QueryConfig, Recommendation, Recommender};
pub use text::{Keyword, LexiconTagger, PosTagger, QueryTermMode, StopWordList};
