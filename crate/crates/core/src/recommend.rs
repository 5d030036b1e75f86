//! Query-string entry point: keyword extraction followed by ranking.

use serde::{Deserialize, Serialize};

use crate::index::Indices;
use crate::ranker::{rank_apis, RankError, RankerConfig, ScoredApi};
use crate::text::{extract_query_keywords, Keyword, LexiconTagger, PosTagger, QueryTermMode, StopWordList};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QueryConfig {
    pub mode: QueryTermMode,
    pub ranker: RankerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub query: String,
    pub mode: QueryTermMode,
    pub keywords: Vec<Keyword>,
    /// The tagger failed and every query term was used.
    pub degraded: bool,
    pub apis: Vec<ScoredApi>,
}

pub fn recommend(
    indices: &Indices,
    query: &str,
    stops: &StopWordList,
    tagger: &dyn PosTagger,
    cfg: &QueryConfig,
) -> Result<Recommendation, RankError> {
    let extracted = extract_query_keywords(query, cfg.mode, stops, tagger);
    let apis = rank_apis(&indices.assoc, &indices.context, &extracted.keywords, &cfg.ranker)?;
    Ok(Recommendation {
        query: query.to_string(),
        mode: cfg.mode,
        keywords: extracted.keywords.into_iter().collect(),
        degraded: extracted.degraded,
        apis,
    })
}

/// A loaded index together with the text pipeline used to query it.
/// Shareable across threads; every query is read-only.
pub struct Recommender {
    indices: Indices,
    stops: StopWordList,
    tagger: Box<dyn PosTagger>,
}

impl Recommender {
    pub fn new(indices: Indices, stops: StopWordList) -> Self {
        Self::with_tagger(indices, stops, Box::new(LexiconTagger))
    }

    pub fn with_tagger(indices: Indices, stops: StopWordList, tagger: Box<dyn PosTagger>) -> Self {
        Self { indices, stops, tagger }
    }

    pub fn indices(&self) -> &Indices {
        &self.indices
    }

    pub fn stopwords(&self) -> &StopWordList {
        &self.stops
    }

    pub fn tagger(&self) -> &dyn PosTagger {
        self.tagger.as_ref()
    }

    pub fn recommend(&self, query: &str, cfg: &QueryConfig) -> Result<Recommendation, RankError> {
        recommend(&self.indices, query, &self.stops, self.tagger.as_ref(), cfg)
    }
}
