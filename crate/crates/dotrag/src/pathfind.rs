//! K-shortest loopless path discovery inside a workspace subgraph.
//!
//! Paths use unit edge weights (hop count) and a fully deterministic order:
//! ascending length, then lexicographic node-id sequence. Parallel relations
//! between two entities collapse to a single edge for pathfinding; their
//! descriptions all remain available at textualization time.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EntityId, GraphIndex, Subgraph};

/// Judgment status of a discovered path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    Unjudged,
    Irrelevant,
    Partial,
    Complete,
}

/// An ordered entity sequence starting at an anchor, with its rendered
/// description and judged status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelPath {
    pub nodes: Vec<EntityId>,
    pub text: String,
    pub status: PathStatus,
}

impl RelPath {
    pub fn new(nodes: Vec<EntityId>) -> Self {
        RelPath {
            nodes,
            text: String::new(),
            status: PathStatus::Unjudged,
        }
    }

    /// Number of edges (nodes minus one).
    pub fn edge_count(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn destination(&self) -> Option<&EntityId> {
        self.nodes.last()
    }
}

/// True iff `shorter`'s node sequence is a proper leading subsequence of
/// `longer`'s.
pub fn is_prefix(shorter: &RelPath, longer: &RelPath) -> bool {
    shorter.nodes.len() < longer.nodes.len()
        && longer.nodes[..shorter.nodes.len()] == shorter.nodes[..]
}

/// Dense adjacency over a subgraph, built once per workspace so repeated
/// path queries avoid re-indexing. Node indices follow ascending entity-id
/// order, which makes index-sequence comparisons agree with id-sequence
/// lexicographic order.
#[derive(Debug)]
pub struct PathGraph {
    ids: Vec<EntityId>,
    index_of: HashMap<EntityId, usize>,
    adj: Vec<Vec<usize>>,
}

impl PathGraph {
    pub fn new(index: &GraphIndex, subgraph: &Subgraph) -> Self {
        let ids: Vec<EntityId> = subgraph.entities.iter().cloned().collect();
        let index_of: HashMap<EntityId, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let mut adj = vec![BTreeSet::new(); ids.len()];
        for rid in &subgraph.relations {
            let r = index.relation(rid).expect("subgraph relation exists");
            let (Some(&s), Some(&d)) = (index_of.get(&r.src), index_of.get(&r.dst)) else {
                continue;
            };
            adj[s].insert(d);
            adj[d].insert(s);
        }
        PathGraph {
            ids,
            index_of,
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index_of.contains_key(id)
    }

    fn to_ids(&self, path: &[usize]) -> Vec<EntityId> {
        path.iter().map(|&i| self.ids[i].clone()).collect()
    }

    /// Up to `p` loopless paths from `source` to `target` with at most
    /// `max_len` edges, in (length, lexicographic node-id sequence) order.
    ///
    /// No path between the endpoints yields an empty list, not an error.
    pub fn k_shortest(
        &self,
        source: &str,
        target: &str,
        p: usize,
        max_len: usize,
    ) -> Result<Vec<RelPath>> {
        if p == 0 {
            return Err(Error::graph("p must be at least 1"));
        }
        let (Some(&s), Some(&t)) = (self.index_of.get(source), self.index_of.get(target)) else {
            return Err(Error::graph(format!(
                "path endpoints '{source}' / '{target}' must both be in the subgraph"
            )));
        };

        if s == t {
            return Ok(vec![RelPath::new(vec![self.ids[s].clone()])]);
        }

        let mut banned_nodes = vec![false; self.ids.len()];
        let no_first_bans = BTreeSet::new();
        let Some(first) = self.lex_min_shortest(s, t, &banned_nodes, &no_first_bans) else {
            return Ok(vec![]);
        };
        if first.len() - 1 > max_len {
            return Ok(vec![]);
        }

        let mut accepted: Vec<Vec<usize>> = vec![first];
        // Candidate pool ordered by (length, sequence).
        let mut pool: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();

        while accepted.len() < p {
            let prev = accepted.last().expect("at least one accepted path");
            for spur_pos in 0..prev.len() - 1 {
                let spur = prev[spur_pos];
                let root = &prev[..=spur_pos];

                // Forbid re-walking the next hop of any accepted path that
                // shares this root, and re-entering root nodes before the
                // spur.
                let mut banned_first = BTreeSet::new();
                for path in &accepted {
                    if path.len() > spur_pos + 1 && path[..=spur_pos] == *root {
                        banned_first.insert(path[spur_pos + 1]);
                    }
                }
                for &n in &root[..spur_pos] {
                    banned_nodes[n] = true;
                }

                if let Some(spur_path) = self.lex_min_shortest(spur, t, &banned_nodes, &banned_first)
                {
                    let mut candidate = root[..spur_pos].to_vec();
                    candidate.extend(spur_path);
                    if candidate.len() - 1 <= max_len && !accepted.contains(&candidate) {
                        pool.insert((candidate.len(), candidate));
                    }
                }

                for &n in &root[..spur_pos] {
                    banned_nodes[n] = false;
                }
            }

            match pool.pop_first() {
                Some((_, next)) => accepted.push(next),
                None => break,
            }
        }

        Ok(accepted
            .into_iter()
            .map(|p| RelPath::new(self.to_ids(&p)))
            .collect())
    }

    /// The shortest path from `s` to `t` that avoids banned nodes and whose
    /// first hop is not in `banned_first`; among equally short paths,
    /// returns the lexicographically smallest node sequence.
    fn lex_min_shortest(
        &self,
        s: usize,
        t: usize,
        banned_nodes: &[bool],
        banned_first: &BTreeSet<usize>,
    ) -> Option<Vec<usize>> {
        if banned_nodes[t] {
            return None;
        }
        if s == t {
            return Some(vec![s]);
        }

        // Distances to t over the graph minus banned nodes and minus s, so a
        // downhill walk can never revisit s.
        const UNREACHED: usize = usize::MAX;
        let mut dist = vec![UNREACHED; self.ids.len()];
        dist[t] = 0;
        let mut queue = VecDeque::from([t]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if v == s || banned_nodes[v] || dist[v] != UNREACHED {
                    continue;
                }
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }

        let start_dist = self.adj[s]
            .iter()
            .filter(|&&v| !banned_nodes[v] && !banned_first.contains(&v))
            .map(|&v| dist[v])
            .min()
            .filter(|&d| d != UNREACHED)?
            + 1;

        let mut path = vec![s];
        let mut current = s;
        let mut remaining = start_dist;
        while current != t {
            let next = self.adj[current]
                .iter()
                .copied()
                .find(|&v| {
                    !banned_nodes[v]
                        && v != s
                        && dist[v] == remaining - 1
                        && (current != s || !banned_first.contains(&v))
                })
                .expect("a downhill neighbor exists while remaining > 0");
            path.push(next);
            current = next;
            remaining -= 1;
        }
        Some(path)
    }
}

/// Convenience wrapper that builds the adjacency and runs one query. Inside
/// the search loop, build a [`PathGraph`] once and reuse it.
pub fn yen_paths(
    index: &GraphIndex,
    subgraph: &Subgraph,
    source: &str,
    target: &str,
    p: usize,
    max_len: usize,
) -> Result<Vec<RelPath>> {
    PathGraph::new(index, subgraph).k_shortest(source, target, p, max_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{expand_hops, Entity, GraphIndex, Relation, Schema};
    use std::collections::BTreeSet;

    fn build_index(nodes: &[&str], edges: &[(&str, &str)]) -> (GraphIndex, Subgraph) {
        let entities = nodes
            .iter()
            .map(|id| Entity {
                id: id.to_string(),
                name: id.to_uppercase(),
                entity_type: "x".into(),
                description: format!("node {id}"),
                chunk_ids: BTreeSet::new(),
                embedding_id: id.to_string(),
            })
            .collect();
        let relations = edges
            .iter()
            .enumerate()
            .map(|(i, (a, b))| Relation {
                id: format!("r{i}"),
                src: a.to_string(),
                dst: b.to_string(),
                description: format!("{a}-{b}"),
                keywords: vec![],
                embedding_id: format!("r{i}"),
            })
            .collect();
        let schema = Schema {
            graph_description: "test".into(),
            entity_types: vec![("x".into(), "anything".into())],
        };
        let index = GraphIndex::new(entities, relations, vec![], schema).unwrap();
        let seeds: BTreeSet<String> = nodes.iter().map(|s| s.to_string()).collect();
        let sub = expand_hops(&index, &seeds, 1, &BTreeSet::new()).unwrap();
        (index, sub)
    }

    fn node_seqs(paths: &[RelPath]) -> Vec<Vec<&str>> {
        paths
            .iter()
            .map(|p| p.nodes.iter().map(String::as_str).collect())
            .collect()
    }

    #[test]
    fn triangle_with_shortcut() {
        let (index, sub) = build_index(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]);
        let paths = yen_paths(&index, &sub, "a", "c", 2, 10).unwrap();
        assert_eq!(node_seqs(&paths), vec![vec!["a", "c"], vec!["a", "b", "c"]]);
        assert_eq!(paths[0].edge_count(), 1);
        assert_eq!(paths[1].edge_count(), 2);
    }

    #[test]
    fn source_equals_target() {
        let (index, sub) = build_index(&["a", "b"], &[("a", "b")]);
        let paths = yen_paths(&index, &sub, "a", "a", 3, 10).unwrap();
        assert_eq!(node_seqs(&paths), vec![vec!["a"]]);
        assert_eq!(paths[0].edge_count(), 0);
    }

    #[test]
    fn disconnected_returns_empty() {
        let (index, sub) = build_index(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")]);
        let paths = yen_paths(&index, &sub, "a", "d", 3, 10).unwrap();
        assert!(paths.is_empty());
    }

    #[test]
    fn max_len_filters_long_paths() {
        let (index, sub) = build_index(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        assert!(yen_paths(&index, &sub, "a", "c", 3, 1).unwrap().is_empty());
        assert_eq!(yen_paths(&index, &sub, "a", "c", 3, 2).unwrap().len(), 1);
    }

    #[test]
    fn equal_length_paths_come_lexicographically() {
        // Two 2-edge routes a->b->d and a->c->d.
        let (index, sub) = build_index(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "d"), ("a", "c"), ("c", "d")],
        );
        let paths = yen_paths(&index, &sub, "a", "d", 5, 10).unwrap();
        assert_eq!(
            node_seqs(&paths),
            vec![vec!["a", "b", "d"], vec!["a", "c", "d"]]
        );
    }

    #[test]
    fn parallel_relations_collapse_for_pathfinding() {
        let (index, sub) = build_index(&["a", "b"], &[("a", "b"), ("b", "a")]);
        let paths = yen_paths(&index, &sub, "a", "b", 5, 10).unwrap();
        assert_eq!(node_seqs(&paths), vec![vec!["a", "b"]]);
    }

    #[test]
    fn paths_are_loopless_and_edge_valid() {
        let (index, sub) = build_index(
            &["a", "b", "c", "d", "e"],
            &[
                ("a", "b"),
                ("b", "c"),
                ("c", "d"),
                ("d", "e"),
                ("a", "c"),
                ("b", "d"),
                ("c", "e"),
            ],
        );
        let paths = yen_paths(&index, &sub, "a", "e", 10, 10).unwrap();
        assert!(!paths.is_empty());
        let mut last_len = 0;
        for path in &paths {
            let unique: BTreeSet<_> = path.nodes.iter().collect();
            assert_eq!(unique.len(), path.nodes.len(), "loopless");
            for pair in path.nodes.windows(2) {
                assert!(
                    !sub.relations_between(&index, &pair[0], &pair[1]).is_empty(),
                    "consecutive nodes adjacent"
                );
            }
            assert!(path.edge_count() >= last_len, "non-decreasing lengths");
            last_len = path.edge_count();
        }
    }

    #[test]
    fn prefix_checks() {
        let ab = RelPath::new(vec!["a".into(), "b".into()]);
        let abc = RelPath::new(vec!["a".into(), "b".into(), "c".into()]);
        let ac = RelPath::new(vec!["a".into(), "c".into()]);
        assert!(is_prefix(&ab, &abc));
        assert!(!is_prefix(&ab, &ab));
        assert!(!is_prefix(&ac, &abc));
        assert!(!is_prefix(&abc, &ab));
    }
}
