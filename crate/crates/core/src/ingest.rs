//! Loading patent-like citation corpora and building per-technology graphs.
//!
//! Input files are CSV with a header row:
//!
//! * nodes: `node_id,year,classes[,granted]`; `classes` is `;`-separated and
//!   `year` may be empty.
//! * edges: `citing_id,cited_id,origin` with origin `APP`, `EXA` or empty.
//! * grouping table: `group_name,prefix`.
//!
//! Nodes are ordered by `(year, node_id)`, undated nodes first. A citation
//! between two selected nodes is internal; one from a selected node to any
//! other id is external. Every `(citing, cited)` pair counts once.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphParts, InventionNode, KnowledgeGraph};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{file}: line {line}: {message}")]
    Malformed { file: String, line: u64, message: String },
    #[error("{file}: line {line}: duplicate node id {id:?}")]
    DuplicateNode { file: String, line: u64, id: String },
    #[error("cannot read {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("query {0:?} matches no nodes")]
    EmptySelection(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("group {0:?} has no prefixes")]
    EmptyGroup(String),
}

type Result<T> = std::result::Result<T, IngestError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CitationOrigin {
    /// Added by the applicant.
    App,
    /// Added by the examiner.
    Exa,
    Unknown,
}

impl fmt::Display for CitationOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CitationOrigin::App => "APP",
            CitationOrigin::Exa => "EXA",
            CitationOrigin::Unknown => "",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusNode {
    pub id: String,
    pub year: Option<i32>,
    pub classes: Vec<String>,
    pub granted: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationRecord {
    pub citing_id: String,
    pub cited_id: String,
    pub origin: CitationOrigin,
}

/// Parsed node and citation records.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub nodes: Vec<CorpusNode>,
    pub citations: Vec<CitationRecord>,
    index: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(nodes: Vec<CorpusNode>, citations: Vec<CitationRecord>) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.id.clone(), i).is_some() {
                return Err(IngestError::DuplicateNode {
                    file: "<memory>".into(),
                    line: i as u64 + 2,
                    id: node.id.clone(),
                });
            }
        }
        for (i, c) in citations.iter().enumerate() {
            if c.citing_id == c.cited_id {
                return Err(IngestError::Malformed {
                    file: "<memory>".into(),
                    line: i as u64 + 2,
                    message: format!("node {:?} cites itself", c.citing_id),
                });
            }
        }
        Ok(Self { nodes, citations, index })
    }

    pub fn node(&self, id: &str) -> Option<&CorpusNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }
}

#[derive(Debug, Deserialize)]
struct NodeRow {
    node_id: String,
    year: String,
    classes: String,
    #[serde(default)]
    granted: Option<String>,
}

#[derive(Debug, Deserialize)]
struct EdgeRow {
    citing_id: String,
    cited_id: String,
    origin: String,
}

#[derive(Debug, Deserialize)]
struct GroupRow {
    group_name: String,
    prefix: String,
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader)
}

fn malformed(file: &str, err: &csv::Error) -> IngestError {
    let line = err.position().map_or(0, |p| p.line());
    let message = match err.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        _ => err.to_string(),
    };
    IngestError::Malformed { file: file.to_string(), line, message }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "y" | "t" => Some(true),
        "false" | "0" | "no" | "n" | "f" => Some(false),
        _ => None,
    }
}

pub fn read_nodes<R: Read>(reader: R, file: &str) -> Result<Vec<CorpusNode>> {
    let mut rdr = csv_reader(reader);
    let mut nodes = Vec::new();
    let mut seen: HashMap<String, u64> = HashMap::new();
    for row in rdr.deserialize::<NodeRow>() {
        let row = row.map_err(|e| malformed(file, &e))?;
        let line = nodes.len() as u64 + 2;
        let bad = |message: String| IngestError::Malformed { file: file.to_string(), line, message };
        if row.node_id.is_empty() {
            return Err(bad("empty node_id".into()));
        }
        let year = if row.year.is_empty() {
            None
        } else {
            Some(row.year.parse::<i32>().map_err(|_| bad(format!("invalid year {:?}", row.year)))?)
        };
        let granted = match row.granted.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(parse_bool(s).ok_or_else(|| bad(format!("invalid granted flag {s:?}")))?),
        };
        if seen.insert(row.node_id.clone(), line).is_some() {
            return Err(IngestError::DuplicateNode { file: file.to_string(), line, id: row.node_id });
        }
        let classes = row
            .classes
            .split(';')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(str::to_string)
            .collect();
        nodes.push(CorpusNode { id: row.node_id, year, classes, granted });
    }
    Ok(nodes)
}

pub fn read_citations<R: Read>(reader: R, file: &str) -> Result<Vec<CitationRecord>> {
    let mut rdr = csv_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<EdgeRow>() {
        let row = row.map_err(|e| malformed(file, &e))?;
        let line = out.len() as u64 + 2;
        let bad = |message: String| IngestError::Malformed { file: file.to_string(), line, message };
        if row.citing_id.is_empty() || row.cited_id.is_empty() {
            return Err(bad("empty citing_id or cited_id".into()));
        }
        if row.citing_id == row.cited_id {
            return Err(bad(format!("node {:?} cites itself", row.citing_id)));
        }
        let origin = match row.origin.to_ascii_uppercase().as_str() {
            "APP" => CitationOrigin::App,
            "EXA" => CitationOrigin::Exa,
            "" => CitationOrigin::Unknown,
            other => return Err(bad(format!("unknown origin {other:?}"))),
        };
        out.push(CitationRecord { citing_id: row.citing_id, cited_id: row.cited_id, origin });
    }
    Ok(out)
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| IngestError::Io { file: path.display().to_string(), source })
}

/// Reads the node and edge CSV files.
pub fn load_corpus(node_file: &Path, edge_file: &Path) -> Result<Corpus> {
    let nodes = read_nodes(open(node_file)?, &node_file.display().to_string())?;
    let citations = read_citations(open(edge_file)?, &edge_file.display().to_string())?;
    Corpus::new(nodes, citations)
}

/// Strips all whitespace so `"Y02E 10/5"` and `"Y02E10/5"` compare equal.
pub fn normalize_class(code: &str) -> String {
    code.chars().filter(|c| !c.is_whitespace()).collect()
}

/// A technology: every node carrying a class under one of the prefixes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TechnologyQuery {
    pub name: String,
    class_prefixes: Vec<String>,
    pub year_cutoff: Option<i32>,
}

impl TechnologyQuery {
    pub fn new<I, S>(name: impl Into<String>, prefixes: I, year_cutoff: Option<i32>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.into();
        let mut class_prefixes: Vec<String> = prefixes.into_iter().map(|p| normalize_class(p.as_ref())).collect();
        if class_prefixes.iter().any(String::is_empty) {
            return Err(IngestError::InvalidQuery(format!("{name}: empty class prefix")));
        }
        if class_prefixes.is_empty() {
            return Err(IngestError::InvalidQuery(format!("{name}: no class prefixes")));
        }
        class_prefixes.sort();
        class_prefixes.dedup();
        Ok(Self { name, class_prefixes, year_cutoff })
    }

    pub fn prefixes(&self) -> &[String] {
        &self.class_prefixes
    }

    pub fn matches_class(&self, class: &str) -> bool {
        let class = normalize_class(class);
        self.class_prefixes.iter().any(|p| class.starts_with(p.as_str()))
    }

    pub fn matches(&self, node: &CorpusNode) -> bool {
        node.classes.iter().any(|c| self.matches_class(c))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum OriginFilter {
    #[default]
    All,
    /// Keep applicant citations only.
    ApplicantOnly,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildFilters {
    pub origin: OriginFilter,
    /// Skip nodes whose `granted` flag is false.
    pub granted_only: bool,
}

/// Counts collected while building a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildDiagnostics {
    pub selected_nodes: usize,
    pub internal_edges: usize,
    pub external_links: usize,
    /// Repeated `(citing, cited)` records collapsed into one link.
    pub duplicate_citations: usize,
    /// Internal citations to a node with a later year, dropped.
    pub chronology_dropped: usize,
    /// Same-year internal citations to a node ordered later by id, dropped.
    pub tie_order_dropped: usize,
    /// Citations removed by the origin filter.
    pub origin_filtered: usize,
    /// External citations whose target id is not in the corpus.
    pub unknown_cited: usize,
}

/// Builds the knowledge graph of one technology.
pub fn build_graph(
    corpus: &Corpus,
    query: &TechnologyQuery,
    filters: BuildFilters,
) -> Result<(KnowledgeGraph, BuildDiagnostics)> {
    let mut selected: Vec<&CorpusNode> = corpus
        .nodes
        .iter()
        .filter(|n| query.matches(n))
        .filter(|n| !(filters.granted_only && n.granted == Some(false)))
        .filter(|n| match query.year_cutoff {
            Some(cutoff) => n.year.is_some_and(|y| y <= cutoff),
            None => true,
        })
        .collect();
    if selected.is_empty() {
        return Err(IngestError::EmptySelection(query.name.clone()));
    }
    selected.sort_by(|a, b| (a.year, &a.id).cmp(&(b.year, &b.id)));
    let ordinal: HashMap<&str, usize> = selected.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();

    let mut diag = BuildDiagnostics { selected_nodes: selected.len(), ..Default::default() };
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    let mut edges = Vec::new();
    let mut external = vec![0u64; selected.len()];
    for c in &corpus.citations {
        let Some(&citing) = ordinal.get(c.citing_id.as_str()) else {
            continue;
        };
        if filters.origin == OriginFilter::ApplicantOnly && c.origin != CitationOrigin::App {
            diag.origin_filtered += 1;
            continue;
        }
        if !seen.insert((c.citing_id.as_str(), c.cited_id.as_str())) {
            diag.duplicate_citations += 1;
            continue;
        }
        match ordinal.get(c.cited_id.as_str()) {
            Some(&cited) => {
                let (cy, dy) = (selected[citing].year, selected[cited].year);
                if cited > citing {
                    if cy == dy {
                        diag.tie_order_dropped += 1;
                    } else {
                        diag.chronology_dropped += 1;
                    }
                    continue;
                }
                edges.push((citing, cited));
            }
            None => {
                if corpus.node(&c.cited_id).is_none() {
                    diag.unknown_cited += 1;
                }
                external[citing] += 1;
                diag.external_links += 1;
            }
        }
    }
    diag.internal_edges = edges.len();

    let nodes = selected
        .iter()
        .enumerate()
        .map(|(i, n)| InventionNode {
            node_id: n.id.clone(),
            ordinal: i,
            year: n.year,
            class_labels: n.classes.iter().cloned().collect(),
        })
        .collect();
    let graph = KnowledgeGraph::from_parts(GraphParts { nodes, internal_edges: edges, external_backlink_counts: external })
        .expect("edges are filtered to point backward and deduplicated");
    Ok((graph, diag))
}

/// Group name to class prefixes.
pub type GroupingTable = BTreeMap<String, Vec<String>>;

pub fn read_grouping_table<R: Read>(reader: R, file: &str) -> Result<GroupingTable> {
    let mut rdr = csv_reader(reader);
    let mut table = GroupingTable::new();
    for row in rdr.deserialize::<GroupRow>() {
        let row = row.map_err(|e| malformed(file, &e))?;
        if row.group_name.is_empty() {
            return Err(IngestError::Malformed {
                file: file.to_string(),
                line: table.values().map(Vec::len).sum::<usize>() as u64 + 2,
                message: "empty group_name".into(),
            });
        }
        table.entry(row.group_name).or_default().push(row.prefix);
    }
    Ok(table)
}

pub fn load_grouping_table(path: &Path) -> Result<GroupingTable> {
    read_grouping_table(open(path)?, &path.display().to_string())
}

/// Node ids of each group: the union of the nodes under any of its prefixes.
pub fn class_grouping(corpus: &Corpus, table: &GroupingTable) -> Result<BTreeMap<String, BTreeSet<String>>> {
    let mut out = BTreeMap::new();
    for (group, prefixes) in table {
        let query = TechnologyQuery::new(group.clone(), prefixes, None)
            .map_err(|_| IngestError::EmptyGroup(group.clone()))?;
        let members = corpus.nodes.iter().filter(|n| query.matches(n)).map(|n| n.id.clone()).collect();
        out.insert(group.clone(), members);
    }
    Ok(out)
}

/// One [`TechnologyQuery`] per group of the table.
pub fn queries_from_table(table: &GroupingTable, year_cutoff: Option<i32>) -> Result<Vec<TechnologyQuery>> {
    table
        .iter()
        .map(|(group, prefixes)| {
            TechnologyQuery::new(group.clone(), prefixes, year_cutoff).map_err(|_| IngestError::EmptyGroup(group.clone()))
        })
        .collect()
}
