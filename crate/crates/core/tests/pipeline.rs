use armga::dataset::{aggregate_low_support, compress_domain, discretize};
use armga::oracle::RawScanner;
use armga::{
    binarize, evaluate_rule, fixtures, mine_frequent, parse_csv, run_evolution, CsvOptions, Evaluation, Execution,
    GAConfig, ItemId, Itemset,
};

fn raw_support(ds: &armga::CategoricalDataset, catalog: &armga::ItemCatalog, items: &[ItemId]) -> u64 {
    ds.rows()
        .iter()
        .filter(|row| {
            items.iter().all(|&id| {
                let it = catalog.item(id).unwrap();
                row[it.attribute_index as usize] == Some(it.value_index)
            })
        })
        .count() as u64
}

#[test]
fn zoo_frequent_itemsets_match_row_counts() {
    let ds = fixtures::zoo();
    let (catalog, db) = binarize(&ds, None).unwrap();
    let frequent = mine_frequent(&db, 0.1).unwrap();
    for f in &frequent {
        assert_eq!(f.support_count, raw_support(&ds, &catalog, f.itemset.items()));
        assert!(f.support_count * 10 >= 101);
    }
    // every frequent pair is reported, and nothing else of size two
    let pairs: Vec<&Itemset> = frequent.iter().filter(|f| f.itemset.len() == 2).map(|f| &f.itemset).collect();
    let k = catalog.len() as u32;
    let mut expected = 0;
    for a in 0..k {
        for b in a + 1..k {
            if raw_support(&ds, &catalog, &[ItemId(a), ItemId(b)]) * 10 >= 101 {
                expected += 1;
                assert!(pairs.contains(&&Itemset::from_ids([a, b])));
            }
        }
    }
    assert_eq!(pairs.len(), expected);
}

#[test]
fn sequential_and_parallel_runs_agree_on_zoo() {
    let (_, db) = binarize(&fixtures::zoo(), None).unwrap();
    let frequent = mine_frequent(&db, 0.1).unwrap();
    let par = GAConfig { rng_seed: 9, ..GAConfig::default() };
    let seq = GAConfig { execution: Execution::Sequential, ..par.clone() };
    let a = run_evolution(&db, &frequent, &par, |_| {}).unwrap();
    let b = run_evolution(&db, &frequent, &seq, |_| {}).unwrap();
    assert_eq!(a.archive, b.archive);
    assert_eq!(a.history, b.history);
}

#[test]
fn preprocessed_interval_rules_reverify_by_row_scan() {
    let mut text = String::from("age,city,plan\n");
    let cities = ["Oslo", "Lima", "Pune", "Kyiv", "Nice"];
    for i in 0..120 {
        let age = 18 + (i * 7) % 50;
        let city = cities[(i * 3 + age) % cities.len()];
        let plan = if age < 30 { "basic" } else if i % 3 == 0 { "family" } else { "pro" };
        text.push_str(&format!("{age},{city},{plan}\n"));
    }
    text.push_str("?,Oslo,pro\n");
    let ds = parse_csv(text.as_bytes(), &CsvOptions::default()).unwrap();
    let ds = discretize(&ds, "age", &[18.0, 26.0, 34.0, 42.0, 50.0, 68.0]).unwrap();
    let ds = aggregate_low_support(&ds, "city", 20).unwrap();
    let ds = compress_domain(&ds, "plan", 2).unwrap();
    let (catalog, db) = binarize(&ds, None).unwrap();

    let frequent = mine_frequent(&db, 0.05).unwrap();
    let cfg = GAConfig { rng_seed: 3, min_generations: 200, ..GAConfig::default() };
    let run = run_evolution(&db, &frequent, &cfg, |_| {}).unwrap();
    assert!(!run.archive.is_empty());
    let scanner = RawScanner::new(&ds, &catalog).unwrap();
    for e in run.archive.entries() {
        let raw = scanner.metrics(&e.rule, cfg.comprehensibility).unwrap().expect("archived rules are feasible");
        assert_eq!(raw.counts, e.metrics.counts, "{}", e.rule);
        let Evaluation::Feasible(again) = evaluate_rule(&db, &e.rule).unwrap() else {
            panic!("{} became infeasible", e.rule);
        };
        assert_eq!(again, e.metrics);
    }
}
