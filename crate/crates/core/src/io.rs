//! JSON graph documents.
//!
//! ```json
//! { "n": 3, "directed": false, "p": 0.25,
//!   "edges": [[0, 1]], "communities": [0, 0, 1] }
//! ```
//!
//! An optional `meta` object is carried through untouched; fixture files use it to
//! record the parameters they were built with.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, Graph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub n: usize,
    pub directed: bool,
    pub p: f64,
    pub edges: Vec<[usize; 2]>,
    pub communities: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl GraphDocument {
    pub fn from_parts(g: &Graph, part: &CommunityPartition) -> Self {
        GraphDocument {
            n: g.n(),
            directed: g.is_directed(),
            p: g.p(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            communities: part.labels().to_vec(),
            meta: None,
        }
    }

    pub fn into_parts(self) -> Result<(Graph, CommunityPartition)> {
        if self.communities.len() != self.n {
            return Err(Error::Partition(format!(
                "{} community labels for {} vertices",
                self.communities.len(),
                self.n
            )));
        }
        let edges = self.edges.into_iter().map(|[u, v]| (u, v)).collect();
        let g = Graph::new(self.n, edges, self.directed, self.p)?;
        let part = CommunityPartition::new(self.communities)?;
        Ok((g, part))
    }
}

pub fn parse_graph(text: &str) -> Result<(Graph, CommunityPartition)> {
    let doc: GraphDocument =
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    doc.into_parts()
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<(Graph, CommunityPartition)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    parse_graph(&text)
}

pub fn graph_to_string(g: &Graph, part: &CommunityPartition) -> Result<String> {
    Ok(serde_json::to_string(&GraphDocument::from_parts(g, part))?)
}

pub fn write_graph(path: impl AsRef<Path>, g: &Graph, part: &CommunityPartition) -> Result<()> {
    let path = path.as_ref();
    let mut text = graph_to_string(g, part)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::file(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_document() {
        let (g, part) = parse_graph(
            r#"{"n":3,"directed":false,"p":0.25,"edges":[[0,1]],"communities":[0,0,1]}"#,
        )
        .unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(g.p(), 0.25);
        assert_eq!(part.sizes(), &[2, 1]);
    }

    #[test]
    fn dangling_vertex_is_rejected() {
        let err = parse_graph(
            r#"{"n":3,"directed":false,"p":0.25,"edges":[[0,5]],"communities":[0,0,1]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("vertex id out of range"), "{err}");
    }

    #[test]
    fn missing_label_and_bad_probability() {
        assert!(matches!(
            parse_graph(r#"{"n":3,"directed":false,"p":0.25,"edges":[],"communities":[0,0]}"#),
            Err(Error::Partition(_))
        ));
        assert!(matches!(
            parse_graph(r#"{"n":1,"directed":false,"p":-0.1,"edges":[],"communities":[0]}"#),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(parse_graph("{\"n\": 3"), Err(Error::Malformed(_))));
    }

    #[test]
    fn file_round_trip() {
        let g = Graph::new(4, vec![(0, 1), (3, 2)], true, 0.4).unwrap();
        let part = CommunityPartition::new(vec![0, 1, 1, 0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        write_graph(&path, &g, &part).unwrap();
        assert_eq!(load_graph(&path).unwrap(), (g, part));
        assert!(load_graph(dir.path().join("missing.json")).unwrap_err().is_file_error());
    }
}
