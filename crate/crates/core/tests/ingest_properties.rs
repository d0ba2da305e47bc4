//! Properties of corpus loading and graph building over random corpora.

use std::collections::HashSet;
use std::io::Write;

use cumuldyn::graph::validate_graph;
use cumuldyn::ingest::{
    build_graph, load_corpus, BuildFilters, CitationOrigin, CitationRecord, Corpus, CorpusNode, IngestError,
    OriginFilter, TechnologyQuery,
};
use cumuldyn::paths::internal_dependence;
use proptest::prelude::*;

const CLASSES: [&str; 4] = ["H01L 31/04", "H01L31/05", "F03D 1/00", "G21C 1/00"];

fn corpus_strategy() -> impl Strategy<Value = Corpus> {
    (1usize..30).prop_flat_map(|n| {
        let nodes = prop::collection::vec(
            (prop::option::weighted(0.9, 1980i32..1990), prop::collection::vec(0usize..4, 1..3)),
            n,
        );
        let citations = prop::collection::vec((0..n, 0..n + 3, 0usize..3), 0..4 * n);
        (nodes, citations).prop_map(|(nodes, citations)| {
            let nodes = nodes
                .into_iter()
                .enumerate()
                .map(|(i, (year, classes))| CorpusNode {
                    id: format!("F{i}"),
                    year,
                    classes: classes.into_iter().map(|c| CLASSES[c].to_string()).collect(),
                    granted: None,
                })
                .collect();
            let origins = [CitationOrigin::App, CitationOrigin::Exa, CitationOrigin::Unknown];
            let citations = citations
                .into_iter()
                .filter(|(a, b, _)| a != b)
                .map(|(a, b, o)| CitationRecord { citing_id: format!("F{a}"), cited_id: format!("F{b}"), origin: origins[o] })
                .collect();
            Corpus::new(nodes, citations).unwrap()
        })
    })
}

fn query(cutoff: Option<i32>) -> TechnologyQuery {
    TechnologyQuery::new("pv", ["H01L31"], cutoff).unwrap()
}

proptest! {
    #[test]
    fn built_graphs_are_valid(corpus in corpus_strategy()) {
        for filters in [BuildFilters::default(), BuildFilters { origin: OriginFilter::ApplicantOnly, granted_only: false }] {
            match build_graph(&corpus, &query(None), filters) {
                Ok((g, diag)) => {
                    prop_assert!(validate_graph(g.parts()).is_empty());
                    prop_assert_eq!(diag.internal_edges, g.edge_count());
                    let pairs: HashSet<_> = g.parts().internal_edges.iter().collect();
                    prop_assert_eq!(pairs.len(), g.edge_count());
                }
                Err(e) => prop_assert!(matches!(e, IngestError::EmptySelection(_))),
            }
        }
    }

    #[test]
    fn applicant_only_never_raises_id(corpus in corpus_strategy()) {
        if let Ok((all, _)) = build_graph(&corpus, &query(None), BuildFilters::default()) {
            let app = BuildFilters { origin: OriginFilter::ApplicantOnly, granted_only: false };
            let (only, _) = build_graph(&corpus, &query(None), app).unwrap();
            prop_assert_eq!(all.node_count(), only.node_count());
            for n in 1..=all.node_count() {
                prop_assert!(internal_dependence(&only, n).unwrap() <= internal_dependence(&all, n).unwrap());
            }
        }
    }

    #[test]
    fn later_cutoff_keeps_earlier_nodes(corpus in corpus_strategy(), cutoff in 1980i32..1990) {
        let early = build_graph(&corpus, &query(Some(cutoff)), BuildFilters::default());
        let late = build_graph(&corpus, &query(Some(cutoff + 1)), BuildFilters::default());
        if let Ok((early, _)) = early {
            let (late, _) = late.unwrap();
            prop_assert!(early.node_count() <= late.node_count());
            // the earlier graph is a prefix of the later one
            for (a, b) in early.nodes().iter().zip(late.nodes()) {
                prop_assert_eq!(&a.node_id, &b.node_id);
            }
            prop_assert_eq!(early.edge_count(), late.edges_in_prefix(early.node_count()));
        }
    }
}

#[test]
fn loads_files_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let nodes = dir.path().join("nodes.csv");
    let edges = dir.path().join("edges.csv");
    writeln!(std::fs::File::create(&nodes).unwrap(), "node_id,year,classes\nA,2001,H01L 31/04\nB,2002,H01L31/05;F03D 1/00\nC,2003,G21C 1/00").unwrap();
    writeln!(std::fs::File::create(&edges).unwrap(), "citing_id,cited_id,origin\nB,A,APP\nB,A,EXA\nC,B,\nB,Z,EXA").unwrap();
    let corpus = load_corpus(&nodes, &edges).unwrap();
    let (g, diag) = build_graph(&corpus, &query(None), BuildFilters::default()).unwrap();
    assert_eq!(g.node_count(), 2);
    assert_eq!(g.parts().internal_edges, vec![(1, 0)]);
    assert_eq!(g.parts().external_backlink_counts, vec![0, 1]);
    assert_eq!(diag.duplicate_citations, 1);
    assert_eq!(diag.unknown_cited, 1);

    let missing = load_corpus(&dir.path().join("absent.csv"), &edges).unwrap_err();
    assert!(matches!(missing, IngestError::Io { .. }));
}
