//! API relevance ranking.
//!
//! Every query keyword contributes its `delta` most frequent APIs, each
//! scored by rank (`1 - rank / len`, zero-based). Every keyword pair whose
//! title contexts have cosine similarity above `gamma` adds that similarity
//! to each API the two candidate lists share. Totals are sorted, APIs whose
//! names contain (or are contained in) a better-ranked name are dropped, and
//! the top `top_k` are returned.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::ApiClassName;
use crate::index::{AssociationIndex, ContextIndex};
use crate::text::Keyword;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankerConfig {
    /// Candidate list length per keyword.
    pub delta: usize,
    /// Coherence threshold; a pair contributes only when cosine > gamma.
    pub gamma: f64,
    pub top_k: usize,
}

impl Default for RankerConfig {
    fn default() -> Self {
        Self {
            delta: 5,
            gamma: 0.0,
            top_k: 10,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("query has no keywords after preprocessing")]
    EmptyQuery,
    #[error("invalid ranker configuration: {0}")]
    InvalidConfig(String),
}

impl RankerConfig {
    pub fn validate(&self) -> Result<(), RankError> {
        if self.delta < 1 {
            return Err(RankError::InvalidConfig("delta must be >= 1".into()));
        }
        if !(-1.0..=1.0).contains(&self.gamma) {
            return Err(RankError::InvalidConfig(format!("gamma {} outside [-1, 1]", self.gamma)));
        }
        if self.top_k < 1 {
            return Err(RankError::InvalidConfig("top_k must be >= 1".into()));
        }
        Ok(())
    }
}

/// One recommended API with its score breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredApi {
    pub api: ApiClassName,
    pub total: f64,
    pub kac_parts: Vec<(Keyword, f64)>,
    pub kkc_parts: Vec<((Keyword, Keyword), f64)>,
}

impl ScoredApi {
    fn new(api: ApiClassName) -> Self {
        Self {
            api,
            total: 0.0,
            kac_parts: Vec::new(),
            kkc_parts: Vec::new(),
        }
    }
}

/// Likelihood score of the API at zero-based `rank` in a list of `list_len`.
pub fn kac_score(rank: usize, list_len: usize) -> f64 {
    assert!(rank < list_len, "rank {rank} out of range for list of {list_len}");
    // One division, so the result is the correctly rounded ratio.
    (list_len - rank) as f64 / list_len as f64
}

/// Cosine similarity of two count vectors; 0 when either is all zeros.
///
/// Counts are integers, so the dot product and squared norms are summed
/// exactly in `u128` before the single floating-point division.
pub fn context_cosine(a: &BTreeMap<Keyword, u64>, b: &BTreeMap<Keyword, u64>) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: u128 = small
        .iter()
        .filter_map(|(k, x)| large.get(k).map(|y| *x as u128 * *y as u128))
        .sum();
    if dot == 0 {
        return 0.0;
    }
    let na: u128 = a.values().map(|x| *x as u128 * *x as u128).sum();
    let nb: u128 = b.values().map(|x| *x as u128 * *x as u128).sum();
    cosine_from_sums(dot, na, nb)
}

/// `dot / sqrt(na * nb)`, clamped to `[0, 1]`.
pub fn cosine_from_sums(dot: u128, na: u128, nb: u128) -> f64 {
    if dot == 0 || na == 0 || nb == 0 {
        return 0.0;
    }
    (dot as f64 / ((na as f64) * (nb as f64)).sqrt()).min(1.0)
}

/// APIs shared by two keywords' candidate lists, gated on their coherence.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentCandidates {
    pub apis: BTreeSet<ApiClassName>,
    pub coherence: f64,
}

pub fn coherent_candidates(
    assoc: &AssociationIndex,
    ctx: &ContextIndex,
    a: &Keyword,
    b: &Keyword,
    cfg: &RankerConfig,
) -> CoherentCandidates {
    debug_assert!(a != b, "coherence of a keyword with itself");
    let coherence = context_cosine(ctx.context_vector(a), ctx.context_vector(b));
    let apis = if coherence > cfg.gamma {
        let left: BTreeSet<&ApiClassName> = assoc.top_candidates(a, cfg.delta).iter().map(|(x, _)| x).collect();
        assoc
            .top_candidates(b, cfg.delta)
            .iter()
            .map(|(x, _)| x)
            .filter(|x| left.contains(x))
            .cloned()
            .collect()
    } else {
        BTreeSet::new()
    };
    CoherentCandidates { apis, coherence }
}

/// Accumulated scores for every candidate, sorted by descending total then
/// ascending name, before related-name removal and truncation.
///
/// Keywords and keyword pairs are visited in sorted order, so the
/// floating-point sums do not depend on how the caller ordered the set.
pub fn score_candidates(
    assoc: &AssociationIndex,
    ctx: &ContextIndex,
    keywords: &BTreeSet<Keyword>,
    cfg: &RankerConfig,
) -> Result<Vec<ScoredApi>, RankError> {
    cfg.validate()?;
    if keywords.is_empty() {
        return Err(RankError::EmptyQuery);
    }
    let mut scores: BTreeMap<ApiClassName, ScoredApi> = BTreeMap::new();

    for k in keywords {
        let list = assoc.top_candidates(k, cfg.delta);
        for (rank, (api, _)) in list.iter().enumerate() {
            let s = kac_score(rank, list.len());
            let entry = scores.entry(api.clone()).or_insert_with(|| ScoredApi::new(api.clone()));
            entry.total += s;
            entry.kac_parts.push((k.clone(), s));
        }
    }

    let kws: Vec<&Keyword> = keywords.iter().collect();
    for (i, a) in kws.iter().enumerate() {
        for b in &kws[i + 1..] {
            let coh = coherent_candidates(assoc, ctx, a, b, cfg);
            // A zero cosine can only pass a negative gamma; it adds nothing.
            if coh.coherence <= 0.0 {
                continue;
            }
            for api in coh.apis {
                let entry = scores.get_mut(&api).expect("coherent API is a KAC candidate");
                entry.total += coh.coherence;
                entry.kkc_parts.push((((*a).clone(), (*b).clone()), coh.coherence));
            }
        }
    }

    let mut ranked: Vec<ScoredApi> = scores.into_values().collect();
    sort_ranked(&mut ranked);
    Ok(ranked)
}

/// Descending total, ties by ascending API name.
pub fn sort_ranked(list: &mut [ScoredApi]) {
    list.sort_by(|x, y| y.total.total_cmp(&x.total).then_with(|| x.api.cmp(&y.api)));
}

/// Drops every API whose name contains, or is contained in, the name of an
/// API already kept further up the list.
pub fn dedup_related(scored: Vec<ScoredApi>) -> Vec<ScoredApi> {
    let mut kept: Vec<ScoredApi> = Vec::with_capacity(scored.len());
    for item in scored {
        let name = item.api.as_str();
        let related = kept.iter().any(|k| {
            let other = k.api.as_str();
            other != name && (other.contains(name) || name.contains(other))
        });
        if !related {
            kept.push(item);
        }
    }
    kept
}

/// Full ranking: score, remove related names, keep the top `top_k`.
pub fn rank_apis(
    assoc: &AssociationIndex,
    ctx: &ContextIndex,
    keywords: &BTreeSet<Keyword>,
    cfg: &RankerConfig,
) -> Result<Vec<ScoredApi>, RankError> {
    let mut ranked = dedup_related(score_candidates(assoc, ctx, keywords, cfg)?);
    ranked.truncate(cfg.top_k);
    Ok(ranked)
}
