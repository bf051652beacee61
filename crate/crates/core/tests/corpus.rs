mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use topicburst_core::corpus::{
    extract_terms, filter_titled, filter_top_cited, Corpus, Document, Stoplist, TermIndex,
};
use topicburst_core::term_stats::{
    count_series, export_frequency_table, parse_frequency_table, rank_by_frequency,
};

const WORDS: &[&str] = &[
    "Gene", "protein", "HIV", "cell", "kinase", "p53", "membrane", "Cloning",
];

fn doc_strategy() -> impl Strategy<Value = (i32, u64, Vec<usize>, Vec<usize>)> {
    (
        1990i32..=1995,
        0u64..50,
        prop::collection::vec(0..WORDS.len(), 0..5),
        prop::collection::vec(0..WORDS.len(), 0..3),
    )
}

fn corpus_strategy() -> impl Strategy<Value = Corpus> {
    prop::collection::vec(doc_strategy(), 1..40).prop_map(|docs| {
        let documents = docs
            .into_iter()
            .enumerate()
            .map(|(i, (year, citations, title, kw))| Document {
                id: format!("d{i}"),
                year,
                citations,
                title: title
                    .iter()
                    .map(|&w| WORDS[w])
                    .collect::<Vec<_>>()
                    .join(" "),
                keywords: kw.iter().map(|&w| format!("{} data", WORDS[w])).collect(),
            })
            .collect();
        Corpus::new(documents).unwrap()
    })
}

fn ids(corpus: &Corpus) -> BTreeSet<String> {
    corpus.documents().iter().map(|d| d.id.clone()).collect()
}

proptest! {
    #[test]
    fn larger_fraction_keeps_a_superset(corpus in corpus_strategy(), a in 0.01f64..1.0, b in 0.01f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = ids(&filter_top_cited(&corpus, lo).unwrap());
        let large = ids(&filter_top_cited(&corpus, hi).unwrap());
        prop_assert!(small.is_subset(&large));
        prop_assert_eq!(ids(&filter_top_cited(&corpus, 1.0).unwrap()), ids(&corpus));
    }

    #[test]
    fn filters_keep_the_year_range(corpus in corpus_strategy(), f in 0.01f64..1.0) {
        let titled = filter_titled(&corpus);
        prop_assume!(!titled.is_empty());
        let kept = filter_top_cited(&titled, f).unwrap();
        prop_assert_eq!(kept.years(), corpus.years());
    }

    #[test]
    fn extraction_ignores_case(corpus in corpus_strategy()) {
        let stoplist = Stoplist::builtin();
        for doc in corpus.documents() {
            let shouted = Document {
                title: doc.title.to_uppercase(),
                keywords: doc.keywords.iter().map(|k| k.to_uppercase()).collect(),
                ..doc.clone()
            };
            prop_assert_eq!(extract_terms(doc, &stoplist), extract_terms(&shouted, &stoplist));
        }
    }

    #[test]
    fn series_match_brute_force_counts(corpus in corpus_strategy()) {
        let stoplist = Stoplist::empty();
        let index = TermIndex::build(&corpus, &stoplist);
        let series = count_series(&index, &index.vocabulary()).unwrap();
        for (term, s) in &series {
            for (t, year) in corpus.years().enumerate() {
                let in_year: Vec<&Document> = corpus.documents().iter().filter(|d| d.year == year).collect();
                let hits = in_year.iter().filter(|d| extract_terms(d, &stoplist).contains(term)).count() as u64;
                prop_assert_eq!(s.r[t], hits);
                prop_assert_eq!(s.d[t], in_year.len() as u64);
            }
        }
    }

    #[test]
    fn frequency_table_round_trips(corpus in corpus_strategy()) {
        let index = TermIndex::build(&corpus, &Stoplist::empty());
        let series = count_series(&index, &index.vocabulary()).unwrap();
        let ranking = rank_by_frequency(&series, &Stoplist::empty());
        let text = export_frequency_table(&ranking, &series).unwrap();
        let table = parse_frequency_table(&text).unwrap();
        prop_assert_eq!(&table.terms, &ranking);
        for (c, t) in ranking.iter().enumerate() {
            let column: Vec<u64> = table.rows.iter().map(|row| row[c]).collect();
            prop_assert_eq!(&column, &series[t].r);
        }
    }
}

#[test]
fn full_fraction_without_stoplist_keeps_the_whole_vocabulary() {
    let documents = vec![
        Document {
            id: "a".into(),
            year: 2000,
            citations: 1,
            title: "Support cells".into(),
            keywords: vec!["Rats".into()],
        },
        Document {
            id: "b".into(),
            year: 2001,
            citations: 0,
            title: "gene".into(),
            keywords: vec![],
        },
    ];
    let corpus = Corpus::new(documents).unwrap();
    let kept = filter_top_cited(&filter_titled(&corpus), 1.0).unwrap();
    let index = TermIndex::build(&kept, &Stoplist::empty());
    let expected: BTreeSet<_> = ["support", "cells", "rats", "gene"]
        .iter()
        .map(|s| common::term(s))
        .collect();
    assert_eq!(index.vocabulary(), expected);
    let builtin = TermIndex::build(&kept, &Stoplist::builtin());
    assert_eq!(
        builtin.vocabulary(),
        [common::term("gene")].into_iter().collect()
    );
}
