//! The immutable knowledge-graph index: entities, relations, chunks, and
//! schema metadata, plus constrained h-hop expansion.
//!
//! An index is loaded once from a newline-delimited JSON file (see
//! [`load_index`]), validated, and never mutated afterwards. All retrieval
//! stages hold shared references to it; concurrent readers are safe.

mod load;

pub use load::{load_index, parse_index};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};

pub type EntityId = String;
pub type RelationId = String;
pub type ChunkId = String;

/// A graph node: one entity extracted from the corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub id: EntityId,
    pub name: String,
    /// Type label; must appear in the schema, or be the `unsure` label.
    pub entity_type: String,
    pub description: String,
    /// Chunks that mention this entity.
    pub chunk_ids: BTreeSet<ChunkId>,
    /// Key of this entity's embedding in the global entity vector store.
    pub embedding_id: String,
}

/// A directed edge between two entities. The stored direction is kept for
/// textualization; traversal treats edges as undirected.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub id: RelationId,
    pub src: EntityId,
    pub dst: EntityId,
    pub description: String,
    pub keywords: Vec<String>,
    /// Key of this relation's embedding in the global relation vector store.
    pub embedding_id: String,
}

/// A source-text passage linked to the entities it mentions.
#[derive(Debug, Clone, PartialEq)]
pub struct Chunk {
    pub id: ChunkId,
    pub text: String,
    pub entity_ids: BTreeSet<EntityId>,
}

/// Schema metadata: a natural-language description of the whole graph and
/// the set of entity type labels with their definitions.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub graph_description: String,
    /// (label, definition) pairs; labels are unique.
    pub entity_types: Vec<(String, String)>,
}

/// Entities whose type cannot be placed in the schema carry this label.
/// It is always accepted, whether or not the schema lists it.
pub const UNSURE_LABEL: &str = "unsure";

impl Schema {
    /// True if `label` is a defined type label or the designated
    /// [`UNSURE_LABEL`].
    pub fn allows(&self, label: &str) -> bool {
        label == UNSURE_LABEL || self.entity_types.iter().any(|(t, _)| t == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entity_types.iter().map(|(t, _)| t.as_str())
    }
}

/// The immutable graph index. Construct with [`GraphIndex::new`] (which
/// validates every invariant) or via [`load_index`].
#[derive(Debug)]
pub struct GraphIndex {
    entities: BTreeMap<EntityId, Entity>,
    relations: BTreeMap<RelationId, Relation>,
    chunks: BTreeMap<ChunkId, Chunk>,
    schema: Schema,
    /// entity id -> incident relation ids (both endpoints), sorted.
    adjacency: HashMap<EntityId, Vec<RelationId>>,
}

impl GraphIndex {
    /// Validates all referential and schema invariants and builds adjacency.
    pub fn new(
        entities: Vec<Entity>,
        relations: Vec<Relation>,
        chunks: Vec<Chunk>,
        schema: Schema,
    ) -> Result<Self> {
        if schema.graph_description.trim().is_empty() {
            return Err(Error::Schema {
                message: "schema graph_description is empty".into(),
            });
        }
        let mut seen_labels = HashSet::new();
        for (label, _) in &schema.entity_types {
            if !seen_labels.insert(label.clone()) {
                return Err(Error::Schema {
                    message: format!("duplicate schema type label '{label}'"),
                });
            }
        }

        let mut entity_map = BTreeMap::new();
        for e in entities {
            if e.description.trim().is_empty() {
                return Err(Error::Schema {
                    message: format!("entity '{}' has an empty description", e.id),
                });
            }
            if !schema.allows(&e.entity_type) {
                return Err(Error::Schema {
                    message: format!(
                        "entity '{}' has type '{}' not present in the schema",
                        e.id, e.entity_type
                    ),
                });
            }
            if entity_map.insert(e.id.clone(), e).is_some() {
                return Err(Error::Referential {
                    message: "duplicate entity id".into(),
                });
            }
        }

        let mut relation_map = BTreeMap::new();
        for r in relations {
            if r.src == r.dst {
                return Err(Error::Referential {
                    message: format!("relation '{}' is a self-loop on '{}'", r.id, r.src),
                });
            }
            for end in [&r.src, &r.dst] {
                if !entity_map.contains_key(end) {
                    return Err(Error::Referential {
                        message: format!("relation '{}' references unknown entity '{end}'", r.id),
                    });
                }
            }
            let id = r.id.clone();
            if relation_map.insert(id.clone(), r).is_some() {
                return Err(Error::Referential {
                    message: format!("duplicate relation id '{id}'"),
                });
            }
        }

        let mut chunk_map = BTreeMap::new();
        for c in chunks {
            for eid in &c.entity_ids {
                if !entity_map.contains_key(eid) {
                    return Err(Error::Referential {
                        message: format!("chunk '{}' references unknown entity '{eid}'", c.id),
                    });
                }
            }
            let id = c.id.clone();
            if chunk_map.insert(id.clone(), c).is_some() {
                return Err(Error::Referential {
                    message: format!("duplicate chunk id '{id}'"),
                });
            }
        }
        for e in entity_map.values() {
            for cid in &e.chunk_ids {
                if !chunk_map.contains_key(cid) {
                    return Err(Error::Referential {
                        message: format!("entity '{}' references unknown chunk '{cid}'", e.id),
                    });
                }
            }
        }

        let mut adjacency: HashMap<EntityId, Vec<RelationId>> = HashMap::new();
        for (rid, r) in &relation_map {
            adjacency.entry(r.src.clone()).or_default().push(rid.clone());
            adjacency.entry(r.dst.clone()).or_default().push(rid.clone());
        }
        for list in adjacency.values_mut() {
            list.sort();
        }

        Ok(GraphIndex {
            entities: entity_map,
            relations: relation_map,
            chunks: chunk_map,
            schema,
            adjacency,
        })
    }

    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn relation(&self, id: &str) -> Option<&Relation> {
        self.relations.get(id)
    }

    pub fn chunk(&self, id: &str) -> Option<&Chunk> {
        self.chunks.get(id)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.values()
    }

    pub fn chunks(&self) -> impl Iterator<Item = &Chunk> {
        self.chunks.values()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn chunk_count(&self) -> usize {
        self.chunks.len()
    }

    /// Relation ids incident to `id`, in ascending order.
    pub fn incident(&self, id: &str) -> &[RelationId] {
        self.adjacency.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Neighbor entity ids of `id` (both edge directions), deduplicated,
    /// ascending.
    pub fn neighbors(&self, id: &str) -> Vec<&EntityId> {
        let mut out: Vec<&EntityId> = self
            .incident(id)
            .iter()
            .filter_map(|rid| self.relations.get(rid))
            .map(|r| if r.src == id { &r.dst } else { &r.src })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// An induced subgraph of a [`GraphIndex`]: a set of retained entities plus
/// every relation whose endpoints are both retained.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgraph {
    pub entities: BTreeSet<EntityId>,
    pub relations: BTreeSet<RelationId>,
}

impl Subgraph {
    pub fn contains_entity(&self, id: &str) -> bool {
        self.entities.contains(id)
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// Relations of this subgraph connecting `a` and `b` (either stored
    /// direction), ascending by relation id.
    pub fn relations_between<'a>(
        &'a self,
        index: &'a GraphIndex,
        a: &str,
        b: &str,
    ) -> Vec<&'a Relation> {
        index
            .incident(a)
            .iter()
            .filter(|rid| self.relations.contains(*rid))
            .filter_map(|rid| index.relation(rid))
            .filter(|r| (r.src == a && r.dst == b) || (r.src == b && r.dst == a))
            .collect()
    }
}

/// Breadth-first expansion from `seeds` up to `h_max` hops, traversing edges
/// in both directions.
///
/// Type filtering happens during the walk: when `allowed_types` is non-empty,
/// a non-seed entity whose type is absent from the set is never visited and
/// therefore blocks every path through it. Seeds are always retained. The
/// result is the induced subgraph over the visited set.
pub fn expand_hops(
    index: &GraphIndex,
    seeds: &BTreeSet<EntityId>,
    h_max: usize,
    allowed_types: &BTreeSet<String>,
) -> Result<Subgraph> {
    if seeds.is_empty() {
        return Err(Error::graph("expand_hops requires at least one seed"));
    }
    if h_max == 0 {
        return Err(Error::graph("h_max must be at least 1"));
    }
    for seed in seeds {
        if index.entity(seed).is_none() {
            return Err(Error::graph(format!("unknown seed entity '{seed}'")));
        }
    }

    let admitted = |id: &str| -> bool {
        if allowed_types.is_empty() || seeds.contains(id) {
            return true;
        }
        index
            .entity(id)
            .map(|e| allowed_types.contains(&e.entity_type))
            .unwrap_or(false)
    };

    let mut visited: BTreeSet<EntityId> = seeds.clone();
    let mut queue: VecDeque<(EntityId, usize)> =
        seeds.iter().map(|s| (s.clone(), 0usize)).collect();

    while let Some((current, depth)) = queue.pop_front() {
        if depth == h_max {
            continue;
        }
        for next in index.neighbors(&current) {
            if visited.contains(next) || !admitted(next) {
                continue;
            }
            visited.insert(next.clone());
            queue.push_back((next.clone(), depth + 1));
        }
    }

    let mut relations = BTreeSet::new();
    for id in &visited {
        for rid in index.incident(id) {
            let r = index.relation(rid).expect("adjacency consistent");
            if visited.contains(&r.src) && visited.contains(&r.dst) {
                relations.insert(rid.clone());
            }
        }
    }

    Ok(Subgraph {
        entities: visited,
        relations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entity(id: &str, ty: &str) -> Entity {
        Entity {
            id: id.into(),
            name: id.to_uppercase(),
            entity_type: ty.into(),
            description: format!("entity {id}"),
            chunk_ids: BTreeSet::new(),
            embedding_id: id.into(),
        }
    }

    fn relation(id: &str, src: &str, dst: &str) -> Relation {
        Relation {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
            description: format!("{src} linked to {dst}"),
            keywords: vec![],
            embedding_id: id.into(),
        }
    }

    fn schema(types: &[&str]) -> Schema {
        Schema {
            graph_description: "test graph".into(),
            entity_types: types
                .iter()
                .map(|t| (t.to_string(), format!("a {t}")))
                .collect(),
        }
    }

    fn chain_index() -> GraphIndex {
        // a - b - c - d
        GraphIndex::new(
            vec![
                entity("a", "x"),
                entity("b", "x"),
                entity("c", "x"),
                entity("d", "x"),
            ],
            vec![
                relation("r1", "a", "b"),
                relation("r2", "b", "c"),
                relation("r3", "c", "d"),
            ],
            vec![],
            schema(&["x"]),
        )
        .unwrap()
    }

    fn seeds(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn chain_two_hops() {
        let index = chain_index();
        let sub = expand_hops(&index, &seeds(&["a"]), 2, &BTreeSet::new()).unwrap();
        assert_eq!(sub.entities, seeds(&["a", "b", "c"]));
        assert_eq!(sub.relations.len(), 2);
    }

    #[test]
    fn star_type_filter_keeps_only_allowed_leaves() {
        let mut entities = vec![entity("h", "hub")];
        let mut rels = vec![];
        for i in 0..5 {
            entities.push(entity(&format!("x{i}"), "x"));
            entities.push(entity(&format!("y{i}"), "y"));
            rels.push(relation(&format!("rx{i}"), "h", &format!("x{i}")));
            rels.push(relation(&format!("ry{i}"), "h", &format!("y{i}")));
        }
        let index = GraphIndex::new(entities, rels, vec![], schema(&["hub", "x", "y"])).unwrap();
        let allowed: BTreeSet<String> = ["x".to_string()].into();
        let sub = expand_hops(&index, &seeds(&["h"]), 1, &allowed).unwrap();
        assert_eq!(sub.entities.len(), 6);
        assert!(sub.entities.contains("h"));
        for i in 0..5 {
            assert!(sub.entities.contains(&format!("x{i}")));
            assert!(!sub.entities.contains(&format!("y{i}")));
        }
    }

    #[test]
    fn filter_blocks_paths_through_disallowed_nodes() {
        // a - blocker - c where blocker's type is filtered out: c unreachable.
        let index = GraphIndex::new(
            vec![entity("a", "x"), entity("blocker", "y"), entity("c", "x")],
            vec![relation("r1", "a", "blocker"), relation("r2", "blocker", "c")],
            vec![],
            schema(&["x", "y"]),
        )
        .unwrap();
        let allowed: BTreeSet<String> = ["x".to_string()].into();
        let sub = expand_hops(&index, &seeds(&["a"]), 3, &allowed).unwrap();
        assert_eq!(sub.entities, seeds(&["a"]));
    }

    #[test]
    fn seed_retained_despite_filtered_type() {
        let index = chain_index();
        let allowed: BTreeSet<String> = ["nonexistent".to_string()].into();
        let sub = expand_hops(&index, &seeds(&["b"]), 2, &allowed).unwrap();
        assert_eq!(sub.entities, seeds(&["b"]));
    }

    #[test]
    fn zero_hops_rejected() {
        let index = chain_index();
        assert!(expand_hops(&index, &seeds(&["a"]), 0, &BTreeSet::new()).is_err());
    }

    #[test]
    fn unknown_seed_rejected() {
        let index = chain_index();
        let err = expand_hops(&index, &seeds(&["nope"]), 1, &BTreeSet::new()).unwrap_err();
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn self_loop_rejected() {
        let res = GraphIndex::new(
            vec![entity("a", "x")],
            vec![relation("r1", "a", "a")],
            vec![],
            schema(&["x"]),
        );
        assert!(res.is_err());
    }

    #[test]
    fn unknown_entity_type_rejected() {
        let res = GraphIndex::new(vec![entity("a", "mystery")], vec![], vec![], schema(&["x"]));
        assert!(matches!(res, Err(Error::Schema { .. })));
    }

    #[test]
    fn unsure_type_always_allowed() {
        let res = GraphIndex::new(vec![entity("a", "unsure")], vec![], vec![], schema(&["x"]));
        assert!(res.is_ok());
    }

    #[test]
    fn induced_subgraph_includes_cross_edges() {
        // Triangle a-b, b-c, a-c: expanding 1 hop from a keeps the b-c edge
        // because both endpoints are retained.
        let index = GraphIndex::new(
            vec![entity("a", "x"), entity("b", "x"), entity("c", "x")],
            vec![
                relation("r1", "a", "b"),
                relation("r2", "b", "c"),
                relation("r3", "a", "c"),
            ],
            vec![],
            schema(&["x"]),
        )
        .unwrap();
        let sub = expand_hops(&index, &seeds(&["a"]), 1, &BTreeSet::new()).unwrap();
        assert_eq!(sub.relations.len(), 3);
    }
}
