//! Newline-delimited JSON index loader.
//!
//! Each line is one record with a `"kind"` discriminator in
//! `{"entity", "relation", "chunk", "schema"}`. Exactly one schema record is
//! required. Entity and relation records carry their embedding inline as an
//! array of numbers under `"embedding"`; the loader hands those to the
//! vector stores untouched.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Chunk, Entity, GraphIndex, Relation, Schema};

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub(crate) enum Record {
    Entity {
        id: String,
        name: String,
        entity_type: String,
        description: String,
        #[serde(default)]
        chunk_ids: BTreeSet<String>,
        embedding: Vec<f32>,
    },
    Relation {
        id: String,
        src: String,
        dst: String,
        description: String,
        #[serde(default)]
        keywords: Vec<String>,
        embedding: Vec<f32>,
    },
    Chunk {
        id: String,
        text: String,
        #[serde(default)]
        entity_ids: BTreeSet<String>,
    },
    Schema {
        graph_description: String,
        entity_types: Vec<TypeDef>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TypeDef {
    pub label: String,
    pub definition: String,
}

/// A parsed index file: the validated graph plus the raw embeddings destined
/// for the vector stores.
#[derive(Debug)]
pub struct LoadedIndex {
    pub index: GraphIndex,
    pub entity_embeddings: Vec<(String, Vec<f32>)>,
    pub relation_embeddings: Vec<(String, Vec<f32>)>,
}

/// Loads and validates an index file from disk.
pub fn load_index(path: impl AsRef<Path>) -> Result<LoadedIndex> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Graph {
        message: format!("cannot read index file '{}': {e}", path.display()),
    })?;
    parse_index(&text)
}

/// Parses index records from a string. Loading the same bytes twice yields
/// structurally identical indexes.
pub fn parse_index(text: &str) -> Result<LoadedIndex> {
    let mut entities = Vec::new();
    let mut relations = Vec::new();
    let mut chunks = Vec::new();
    let mut schema: Option<Schema> = None;
    let mut entity_embeddings = Vec::new();
    let mut relation_embeddings = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line_num = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: line_num,
            message: e.to_string(),
        })?;
        match record {
            Record::Entity {
                id,
                name,
                entity_type,
                description,
                chunk_ids,
                embedding,
            } => {
                entity_embeddings.push((id.clone(), embedding));
                entities.push(Entity {
                    embedding_id: id.clone(),
                    id,
                    name,
                    entity_type,
                    description,
                    chunk_ids,
                });
            }
            Record::Relation {
                id,
                src,
                dst,
                description,
                keywords,
                embedding,
            } => {
                relation_embeddings.push((id.clone(), embedding));
                relations.push(Relation {
                    embedding_id: id.clone(),
                    id,
                    src,
                    dst,
                    description,
                    keywords,
                });
            }
            Record::Chunk {
                id,
                text,
                entity_ids,
            } => chunks.push(Chunk {
                id,
                text,
                entity_ids,
            }),
            Record::Schema {
                graph_description,
                entity_types,
            } => {
                if schema.is_some() {
                    return Err(Error::Parse {
                        line: line_num,
                        message: "more than one schema record".into(),
                    });
                }
                schema = Some(Schema {
                    graph_description,
                    entity_types: entity_types
                        .into_iter()
                        .map(|t| (t.label, t.definition))
                        .collect(),
                });
            }
        }
    }

    let schema = schema.ok_or_else(|| Error::Parse {
        line: 0,
        message: "index file contains no schema record".into(),
    })?;
    let index = GraphIndex::new(entities, relations, chunks, schema)?;
    Ok(LoadedIndex {
        index,
        entity_embeddings,
        relation_embeddings,
    })
}

/// Serializes one schema record line.
pub fn schema_record(schema: &Schema) -> serde_json::Value {
    serde_json::json!({
        "kind": "schema",
        "graph_description": schema.graph_description,
        "entity_types": schema
            .entity_types
            .iter()
            .map(|(label, definition)| serde_json::json!({"label": label, "definition": definition}))
            .collect::<Vec<_>>(),
    })
}

/// Serializes one entity record line.
pub fn entity_record(e: &Entity, embedding: &[f32]) -> serde_json::Value {
    serde_json::json!({
        "kind": "entity",
        "id": e.id,
        "name": e.name,
        "entity_type": e.entity_type,
        "description": e.description,
        "chunk_ids": e.chunk_ids,
        "embedding": embedding,
    })
}

/// Serializes one relation record line.
pub fn relation_record(r: &Relation, embedding: &[f32]) -> serde_json::Value {
    serde_json::json!({
        "kind": "relation",
        "id": r.id,
        "src": r.src,
        "dst": r.dst,
        "description": r.description,
        "keywords": r.keywords,
        "embedding": embedding,
    })
}

/// Serializes one chunk record line.
pub fn chunk_record(c: &Chunk) -> serde_json::Value {
    serde_json::json!({
        "kind": "chunk",
        "id": c.id,
        "text": c.text,
        "entity_ids": c.entity_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"kind":"schema","graph_description":"two companies","entity_types":[{"label":"org","definition":"an organization"}]}
{"kind":"entity","id":"e1","name":"Acme","entity_type":"org","description":"a company","chunk_ids":["c1"],"embedding":[1.0,0.0]}
{"kind":"entity","id":"e2","name":"Globex","entity_type":"org","description":"another company","chunk_ids":[],"embedding":[0.0,1.0]}
{"kind":"relation","id":"r1","src":"e1","dst":"e2","description":"Acme competes with Globex","keywords":["rivalry"],"embedding":[0.5,0.5]}
{"kind":"chunk","id":"c1","text":"Acme is a company.","entity_ids":["e1"]}
"#;

    #[test]
    fn minimal_file_loads() {
        let loaded = parse_index(MINIMAL).unwrap();
        assert_eq!(loaded.index.entity_count(), 2);
        assert_eq!(loaded.index.relation_count(), 1);
        assert_eq!(loaded.index.chunk_count(), 1);
        assert_eq!(loaded.entity_embeddings.len(), 2);
        assert_eq!(loaded.relation_embeddings.len(), 1);
    }

    #[test]
    fn unknown_relation_endpoint_names_the_id() {
        let text = MINIMAL.replace("\"dst\":\"e2\"", "\"dst\":\"ghost\"");
        let err = parse_index(&text).unwrap_err();
        assert!(matches!(err, Error::Referential { .. }));
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = format!("{MINIMAL}{{not json\n");
        let err = parse_index(&text).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 6),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn second_schema_record_rejected() {
        let extra = r#"{"kind":"schema","graph_description":"again","entity_types":[]}"#;
        let text = format!("{MINIMAL}{extra}\n");
        assert!(parse_index(&text).is_err());
    }

    #[test]
    fn deterministic_reload() {
        let a = parse_index(MINIMAL).unwrap();
        let b = parse_index(MINIMAL).unwrap();
        assert_eq!(
            a.index.entities().collect::<Vec<_>>(),
            b.index.entities().collect::<Vec<_>>()
        );
        assert_eq!(a.entity_embeddings, b.entity_embeddings);
    }
}
