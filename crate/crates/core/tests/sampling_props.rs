use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use proptest::prelude::*;
use tdm_core::corpus::{
    build_vocabulary, generate_instances, make_folds, Concept, Fold, InstanceRecord, PaperAnnotation,
    SamplingConfig, TdmTriple,
};
use tdm_core::doctaet::ContextFeature;
use tdm_core::records::to_jsonl;

fn triple() -> impl Strategy<Value = TdmTriple> {
    (0..6u8, 0..8u8, 0..4u8).prop_map(|(t, d, m)| TdmTriple::new(&format!("T{t}"), &format!("D{d}"), &format!("M{m}")).unwrap())
}

fn corpus() -> impl Strategy<Value = Vec<PaperAnnotation>> {
    prop::collection::vec(prop::collection::btree_set(triple(), 0..6), 2..25).prop_map(|papers| {
        papers
            .into_iter()
            .enumerate()
            .map(|(i, triples)| {
                if triples.is_empty() {
                    PaperAnnotation::new(format!("paper-{i:03}"), [TdmTriple::unknown()])
                } else {
                    PaperAnnotation::new(format!("paper-{i:03}"), triples)
                }
            })
            .collect()
    })
}

fn ctx(id: &str) -> Arc<ContextFeature> {
    Arc::new(ContextFeature {
        paper_id: id.into(),
        token_count: 2,
        text: format!("context of {id}"),
        spans: Default::default(),
    })
}

fn instance_file(papers: &[PaperAnnotation], cfg: &SamplingConfig) -> String {
    let vocab = build_vocabulary(papers, 1).unwrap();
    let mut rows = Vec::new();
    for p in papers {
        for i in generate_instances(p, &ctx(&p.paper_id), &vocab, cfg).unwrap() {
            rows.push(InstanceRecord::from(&i));
        }
    }
    to_jsonl(&rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn instance_counts_and_disjointness(
        papers in corpus(),
        num_false in prop::sample::select(vec![1usize, 10, 50, 100]),
        seed in any::<u64>(),
    ) {
        prop_assume!(papers.iter().any(|p| !p.is_unknown()));
        let vocab = build_vocabulary(&papers, 1).unwrap();
        let cfg = SamplingConfig { num_false, rng_seed: seed };
        for p in &papers {
            let inst = generate_instances(p, &ctx(&p.paper_id), &vocab, &cfg).unwrap();
            let gold: HashSet<&TdmTriple> = p.tdm_triples().collect();
            let trues: Vec<_> = inst.iter().filter(|i| i.label).collect();
            let falses: Vec<_> = inst.iter().filter(|i| !i.label).collect();
            let expected_true = gold.iter().filter(|t| vocab.contains(t)).count();
            prop_assert_eq!(trues.len(), expected_true);
            prop_assert_eq!(falses.len(), num_false.min(vocab.len() - expected_true));
            for f in &falses {
                prop_assert!(!gold.contains(&f.triple));
            }
            let distinct: HashSet<&TdmTriple> = falses.iter().map(|i| &i.triple).collect();
            prop_assert_eq!(distinct.len(), falses.len());
        }
    }

    #[test]
    fn identical_seeds_give_identical_files(papers in corpus(), seed in any::<u64>()) {
        prop_assume!(papers.iter().any(|p| !p.is_unknown()));
        let cfg = SamplingConfig { num_false: 10, rng_seed: seed };
        let a = instance_file(&papers, &cfg);
        prop_assert_eq!(&a, &instance_file(&papers, &cfg));
        // Processing order does not change per-paper draws.
        let mut reversed = papers.clone();
        reversed.reverse();
        let b = instance_file(&reversed, &cfg);
        let sorted = |s: &str| s.lines().map(str::to_owned).collect::<BTreeSet<_>>();
        prop_assert_eq!(sorted(&a), sorted(&b));
    }

    #[test]
    fn vocabulary_projections(papers in corpus()) {
        prop_assume!(papers.iter().any(|p| !p.is_unknown()));
        let vocab = build_vocabulary(&papers, 1).unwrap();
        for c in Concept::ALL {
            let direct: BTreeSet<&str> = vocab.triples().iter().map(|t| t.concept(c)).collect();
            prop_assert_eq!(vocab.distinct(c), direct);
        }
        prop_assert!(vocab.triples().iter().all(|t| !t.is_unknown()));
    }

    #[test]
    fn folds_partition_papers(papers in corpus(), seed in any::<u64>()) {
        let split = make_folds(&papers, seed).unwrap();
        let f0: BTreeSet<&str> = split.papers_in(Fold::Fold0).collect();
        let f1: BTreeSet<&str> = split.papers_in(Fold::Fold1).collect();
        prop_assert!(f0.is_disjoint(&f1));
        prop_assert_eq!(f0.len() + f1.len(), papers.len());
        prop_assert!(f0.len().abs_diff(f1.len()) <= 1);
        for p in &papers {
            prop_assert!(split.fold_of(&p.paper_id).is_some());
        }
    }
}
