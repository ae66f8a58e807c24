//! Cosine-similarity search over entity and relation embeddings.
//!
//! Stores are immutable after construction and searched by exhaustive linear
//! scan: workspace-scoped stores are small by design, and an exhaustive scan
//! keeps results exact and deterministic. Ties are broken by ascending item
//! id so repeated runs produce identical rankings.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{GraphIndex, Subgraph};

/// A fixed-length embedding vector. Always finite and non-zero-norm once
/// accepted into a store.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Arc<[f32]>,
}

impl Embedding {
    /// Rejects empty, non-finite, and zero-norm vectors.
    pub fn new(values: Vec<f32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::vector("embedding has zero length"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::vector("embedding contains a non-finite value"));
        }
        let norm: f64 = values.iter().map(|v| (*v as f64) * (*v as f64)).sum();
        if norm <= 0.0 {
            return Err(Error::vector("zero-norm embedding rejected"));
        }
        Ok(Embedding {
            values: values.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| (*v as f64) * (*v as f64))
            .sum::<f64>()
            .sqrt()
    }
}

/// Cosine similarity, clamped to [-1, 1] against float rounding.
pub fn cosine(a: &Embedding, b: &Embedding) -> f32 {
    debug_assert_eq!(a.dim(), b.dim());
    let dot: f64 = a
        .values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| (*x as f64) * (*y as f64))
        .sum();
    (dot / (a.norm() * b.norm())).clamp(-1.0, 1.0) as f32
}

/// One search result: an item id and its cosine similarity to the query.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredHit {
    pub item_id: String,
    pub score: f32,
}

/// An immutable id -> embedding store with a fixed dimension.
#[derive(Debug, Clone, Default)]
pub struct VectorStore {
    items: Vec<(String, Embedding)>,
    dim: Option<usize>,
}

impl VectorStore {
    pub fn new() -> Self {
        VectorStore::default()
    }

    /// Builds a store from (id, raw vector) pairs, validating each vector.
    pub fn from_raw(pairs: impl IntoIterator<Item = (String, Vec<f32>)>) -> Result<Self> {
        let mut store = VectorStore::new();
        for (id, values) in pairs {
            let emb = Embedding::new(values)
                .map_err(|e| Error::vector(format!("item '{id}': {e}")))?;
            store.insert(id, emb)?;
        }
        Ok(store)
    }

    pub fn insert(&mut self, id: String, embedding: Embedding) -> Result<()> {
        match self.dim {
            None => self.dim = Some(embedding.dim()),
            Some(d) if d != embedding.dim() => {
                return Err(Error::vector(format!(
                    "item '{id}' has dim {} but the store holds dim {d}",
                    embedding.dim()
                )))
            }
            _ => {}
        }
        if self.items.iter().any(|(existing, _)| existing == &id) {
            return Err(Error::vector(format!("duplicate item id '{id}'")));
        }
        self.items.push((id, embedding));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn get(&self, id: &str) -> Option<&Embedding> {
        self.items
            .iter()
            .find(|(item_id, _)| item_id == id)
            .map(|(_, e)| e)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|(id, _)| id.as_str())
    }

    fn check_dim(&self, query: &Embedding) -> Result<()> {
        if let Some(d) = self.dim {
            if d != query.dim() {
                return Err(Error::vector(format!(
                    "query dim {} does not match store dim {d}",
                    query.dim()
                )));
            }
        }
        Ok(())
    }

    fn scan(&self, query: &Embedding, exclude: Option<&BTreeSet<String>>) -> Vec<ScoredHit> {
        let mut hits: Vec<ScoredHit> = self
            .items
            .iter()
            .filter(|(id, _)| exclude.map_or(true, |ex| !ex.contains(id)))
            .map(|(id, emb)| ScoredHit {
                item_id: id.clone(),
                score: cosine(query, emb),
            })
            .collect();
        // Descending score, ties by ascending item id.
        hits.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.item_id.cmp(&b.item_id))
        });
        hits
    }

    /// The `k` highest-similarity items (fewer if the store is smaller),
    /// descending by score.
    pub fn top_k(&self, query: &Embedding, k: usize) -> Result<Vec<ScoredHit>> {
        self.check_dim(query)?;
        let mut hits = self.scan(query, None);
        hits.truncate(k);
        Ok(hits)
    }

    /// Like [`top_k`](VectorStore::top_k) but never returns an id in
    /// `exclude`.
    pub fn top_k_excluding(
        &self,
        query: &Embedding,
        k: usize,
        exclude: &BTreeSet<String>,
    ) -> Result<Vec<ScoredHit>> {
        self.check_dim(query)?;
        let mut hits = self.scan(query, Some(exclude));
        hits.truncate(k);
        Ok(hits)
    }

    /// All items with similarity >= `tau`, descending. An empty result is
    /// valid.
    pub fn above_threshold(&self, query: &Embedding, tau: f32) -> Result<Vec<ScoredHit>> {
        self.check_dim(query)?;
        let mut hits = self.scan(query, None);
        hits.retain(|h| h.score >= tau);
        Ok(hits)
    }
}

/// The global entity and relation stores built from a loaded index.
#[derive(Debug)]
pub struct GlobalStores {
    pub entities: VectorStore,
    pub relations: VectorStore,
}

impl GlobalStores {
    pub fn build(
        entity_embeddings: impl IntoIterator<Item = (String, Vec<f32>)>,
        relation_embeddings: impl IntoIterator<Item = (String, Vec<f32>)>,
    ) -> Result<Self> {
        Ok(GlobalStores {
            entities: VectorStore::from_raw(entity_embeddings)?,
            relations: VectorStore::from_raw(relation_embeddings)?,
        })
    }
}

/// Workspace-local stores holding exactly the subgraph's entity and relation
/// embeddings. Embedding data is shared with the global store, so
/// construction cost is proportional to the subgraph size.
#[derive(Debug, Clone)]
pub struct ScopedStores {
    pub entities: VectorStore,
    pub relations: VectorStore,
}

/// Builds the localized stores for a subgraph. Ids absent from the global
/// stores are skipped (an index loaded through [`crate::load_index`] always
/// has every id present).
pub fn scoped_store(_index: &GraphIndex, subgraph: &Subgraph, global: &GlobalStores) -> ScopedStores {
    let mut entities = VectorStore::new();
    for id in &subgraph.entities {
        if let Some(emb) = global.entities.get(id) {
            entities
                .insert(id.clone(), emb.clone())
                .expect("subgraph ids are unique and dims match the global store");
        }
    }
    let mut relations = VectorStore::new();
    for id in &subgraph.relations {
        if let Some(emb) = global.relations.get(id) {
            relations
                .insert(id.clone(), emb.clone())
                .expect("subgraph ids are unique and dims match the global store");
        }
    }
    ScopedStores {
        entities,
        relations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb(values: &[f32]) -> Embedding {
        Embedding::new(values.to_vec()).unwrap()
    }

    fn store3() -> VectorStore {
        VectorStore::from_raw(vec![
            ("a".into(), vec![1.0, 0.0, 0.0]),
            ("b".into(), vec![0.0, 1.0, 0.0]),
            ("c".into(), vec![0.0, 0.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn self_similarity_is_one() {
        let store = store3();
        let hits = store.top_k(&emb(&[1.0, 0.0, 0.0]), 1).unwrap();
        assert_eq!(hits[0].item_id, "a");
        assert!((hits[0].score - 1.0).abs() < 1e-6);
    }

    #[test]
    fn orthogonal_scores_zero() {
        let store = store3();
        let hits = store.top_k(&emb(&[1.0, 0.0, 0.0]), 3).unwrap();
        assert_eq!(hits.len(), 3);
        assert!((hits[1].score).abs() < 1e-6);
        assert!((hits[2].score).abs() < 1e-6);
        // ties broken by ascending id
        assert_eq!(hits[1].item_id, "b");
        assert_eq!(hits[2].item_id, "c");
    }

    #[test]
    fn tau_lower_bound_returns_everything() {
        let store = store3();
        let hits = store.above_threshold(&emb(&[1.0, 1.0, 1.0]), -1.0).unwrap();
        assert_eq!(hits.len(), 3);
    }

    #[test]
    fn tau_one_keeps_only_exact_direction() {
        let store = store3();
        let hits = store.above_threshold(&emb(&[2.0, 0.0, 0.0]), 1.0).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].item_id, "a");
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let store = store3();
        assert!(store.top_k(&emb(&[1.0, 0.0]), 1).is_err());
    }

    #[test]
    fn zero_vector_rejected_at_insert() {
        assert!(VectorStore::from_raw(vec![("z".into(), vec![0.0, 0.0])]).is_err());
    }

    #[test]
    fn duplicate_id_rejected() {
        let mut store = store3();
        assert!(store.insert("a".into(), emb(&[1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn excluding_removes_ids_from_results() {
        let store = store3();
        let exclude: BTreeSet<String> = ["a".to_string()].into();
        let hits = store
            .top_k_excluding(&emb(&[1.0, 0.0, 0.0]), 3, &exclude)
            .unwrap();
        assert_eq!(hits.len(), 2);
        assert!(hits.iter().all(|h| h.item_id != "a"));
    }
}
