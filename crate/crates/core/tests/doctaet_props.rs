use proptest::prelude::*;
use tdm_core::doctaet::{extract_doctaet, Component, DocTaetConfig};
use tdm_core::ingest::{Section, StructuredDoc, Table};

fn word() -> impl Strategy<Value = String> {
    ("[A-Za-z][a-z0-9]{0,7}", prop::sample::select(vec!["", "", "", ".", "?", "!", ","]))
        .prop_map(|(w, p)| format!("{w}{p}"))
}

fn words(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(word(), 0..max).prop_map(|w| w.join(" "))
}

fn section() -> impl Strategy<Value = Section> {
    (
        prop::sample::select(vec!["Introduction", "Experimental Setup", "Results", "Evaluation", "Data", ""]),
        prop::collection::vec(words(120), 0..4),
        1u32..4,
    )
        .prop_map(|(h, paragraphs, depth)| Section {
            depth,
            ..Section::new(h, paragraphs)
        })
}

fn table() -> impl Strategy<Value = Table> {
    (words(30), prop::collection::vec(words(4), 0..40)).prop_map(|(c, cells)| Table::new(c, cells))
}

fn doc() -> impl Strategy<Value = StructuredDoc> {
    (
        words(25),
        words(400),
        prop::collection::vec(section(), 0..6),
        prop::collection::vec(table(), 0..4),
    )
        .prop_map(|(title, abstract_text, sections, tables)| StructuredDoc {
            paper_id: "p".into(),
            title: if title.is_empty() { "Untitled".into() } else { title },
            abstract_text,
            sections,
            tables,
        })
}

fn tokens_of<'a>(fields: impl IntoIterator<Item = &'a str>) -> std::collections::HashSet<&'a str> {
    fields.into_iter().flat_map(str::split_whitespace).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn token_count_respects_cap(d in doc(), cap in prop::sample::select(vec![1usize, 16, 64, 512, 2000])) {
        let f = extract_doctaet(&d, &DocTaetConfig::with_cap(cap)).unwrap();
        prop_assert!(f.token_count <= cap);
        prop_assert_eq!(f.token_count, f.text.split_whitespace().count());
    }

    #[test]
    fn smaller_cap_is_token_prefix(d in doc(), a in 1usize..600, b in 1usize..600) {
        let (lo, hi) = (a.min(b), a.max(b));
        let small = extract_doctaet(&d, &DocTaetConfig::with_cap(lo)).unwrap();
        let large = extract_doctaet(&d, &DocTaetConfig::with_cap(hi)).unwrap();
        let s: Vec<&str> = small.text.split_whitespace().collect();
        let l: Vec<&str> = large.text.split_whitespace().collect();
        prop_assert!(s.len() <= l.len());
        prop_assert_eq!(&l[..s.len()], &s[..]);
    }

    #[test]
    fn tokens_come_from_their_component(d in doc()) {
        let f = extract_doctaet(&d, &DocTaetConfig::default()).unwrap();
        let exp_fields: Vec<&str> = d.sections.iter().flat_map(|s| s.paragraphs.iter().map(String::as_str)).collect();
        let table_fields: Vec<&str> = d
            .tables
            .iter()
            .flat_map(|t| std::iter::once(t.caption.as_str()).chain(t.cells.iter().map(String::as_str)))
            .collect();
        let sources = [
            (Component::Title, tokens_of([d.title.as_str()])),
            (Component::Abstract, tokens_of([d.abstract_text.as_str()])),
            (Component::ExpSetup, tokens_of(exp_fields)),
            (Component::TableInfo, tokens_of(table_fields)),
        ];
        let mut covered = 0;
        for (c, vocab) in &sources {
            for tok in f.component_text(*c).split_whitespace() {
                prop_assert!(vocab.contains(tok), "{tok:?} not in {c:?}");
                covered += 1;
            }
        }
        // Spans cover the whole text.
        prop_assert_eq!(covered, f.token_count);
    }

    #[test]
    fn extraction_is_deterministic(d in doc()) {
        let cfg = DocTaetConfig::default();
        prop_assert_eq!(extract_doctaet(&d, &cfg).unwrap(), extract_doctaet(&d, &cfg).unwrap());
    }

    #[test]
    fn budgets_bound_components(d in doc()) {
        let f = extract_doctaet(&d, &DocTaetConfig::uncapped()).unwrap();
        let capped = extract_doctaet(&d, &DocTaetConfig { cap: None, ..Default::default() }).unwrap();
        prop_assert!(capped.component_text(Component::ExpSetup).split_whitespace().count() <= 150);
        prop_assert!(capped.component_text(Component::TableInfo).split_whitespace().count() <= 150);
        prop_assert!(f.token_count >= capped.token_count);
    }
}
