use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use armga::apriori::{mine_frequent, write_frequent, FrequentItemset};
use armga::dataset::{aggregate_low_support, compress_domain, discretize};
use armga::ga::{run_evolution, select_final, ArchiveEntry, GAConfig, GenerationStats, ParetoArchive};
use armga::oracle;
use armga::report::{self, ArchiveFile, ReportRow, RunManifest};
use armga::{fixtures, parse_csv, BinaryTransactionDB, CategoricalDataset, CsvOptions, Execution, ItemCatalog};
use serde_json::json;

use crate::config::{layer, layer_list, ConfigFile};
use crate::{Failure, Fixture, Format, GaArgs, InputArgs, MineArgs, OutputArgs, RuleBound};

pub const DEFAULT_MINSUP: f64 = 0.1;

struct Loaded {
    bytes: Vec<u8>,
    dataset: CategoricalDataset,
    catalog: ItemCatalog,
    db: BinaryTransactionDB,
}

fn config_of(input: &InputArgs) -> Result<ConfigFile, Failure> {
    match &input.config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

fn with_context(label: &str) -> impl Fn(armga::Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{label}: {}", f.message);
        f
    }
}

fn fixture_source(f: Fixture) -> (Vec<u8>, String, bool) {
    match f {
        Fixture::WebSessions => (fixtures::WEB_SESSIONS_CSV.as_bytes().to_vec(), "fixture web-sessions".into(), false),
        Fixture::Zoo => (fixtures::ZOO_CSV.as_bytes().to_vec(), "fixture zoo".into(), true),
    }
}

fn read_source(path: &Path) -> Result<(Vec<u8>, String, bool), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    Ok((bytes, path.display().to_string(), false))
}

/// Splits `attr:value` at the last colon.
fn split_attr_arg<'a>(arg: &'a str, flag: &str) -> Result<(&'a str, &'a str), Failure> {
    arg.rsplit_once(':')
        .map(|(a, v)| (a.trim(), v.trim()))
        .ok_or_else(|| Failure::usage(format!("--{flag} expects attr:value, got `{arg}`")))
}

fn parse_count(raw: &str, flag: &str) -> Result<usize, Failure> {
    raw.parse()
        .map_err(|_| Failure::usage(format!("--{flag}: `{raw}` is not a count")))
}

fn load(input: &InputArgs, cfg: &ConfigFile) -> Result<Loaded, Failure> {
    let (bytes, label, is_zoo) = if let Some(path) = &input.input {
        read_source(path)?
    } else if let Some(f) = input.fixture {
        fixture_source(f)
    } else if let Some(path) = cfg.get::<PathBuf>("input")? {
        // relative paths in a config file are relative to that file
        let base = input.config.as_deref().and_then(Path::parent).unwrap_or(Path::new(""));
        read_source(&base.join(path))?
    } else if let Some(f) = cfg.get::<Fixture>("fixture")? {
        fixture_source(f)
    } else {
        return Err(Failure::usage("no dataset given; pass --input <FILE> or --fixture <NAME>"));
    };

    let mut options = CsvOptions::default();
    if let Some(d) = layer(input.delimiter, cfg, "delimiter")? {
        options.delimiter = u8::try_from(d)
            .ok()
            .filter(u8::is_ascii)
            .ok_or_else(|| Failure::usage(format!("delimiter `{d}` is not a single ASCII character")))?;
    }
    if let Some(m) = layer(input.missing_token.clone(), cfg, "missing-token")? {
        options.missing_token = m;
    }
    let context = with_context(&label);
    let mut ds = parse_csv(bytes.as_slice(), &options).map_err(&context)?;
    if is_zoo {
        ds = ds.drop_column("name").map_err(&context)?;
    }
    for name in layer_list(&input.drop_column, cfg, "drop-column") {
        ds = ds.drop_column(&name).map_err(&context)?;
    }
    for arg in layer_list(&input.discretize, cfg, "discretize") {
        let (attr, raw) = split_attr_arg(&arg, "discretize")?;
        let bounds = raw
            .split(',')
            .map(|b| b.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Failure::usage(format!("--discretize: bad boundary list `{raw}`")))?;
        ds = discretize(&ds, attr, &bounds).map_err(&context)?;
    }
    for arg in layer_list(&input.aggregate, cfg, "aggregate") {
        let (attr, raw) = split_attr_arg(&arg, "aggregate")?;
        ds = aggregate_low_support(&ds, attr, parse_count(raw, "aggregate")?).map_err(&context)?;
    }
    for arg in layer_list(&input.compress, cfg, "compress") {
        let (attr, raw) = split_attr_arg(&arg, "compress")?;
        ds = compress_domain(&ds, attr, parse_count(raw, "compress")?).map_err(&context)?;
    }
    let drop_above = layer(input.drop_items_above, cfg, "drop-items-above")?;
    let (catalog, db) = armga::binarize(&ds, drop_above).map_err(&context)?;
    Ok(Loaded {
        bytes,
        dataset: ds,
        catalog,
        db,
    })
}

fn resolve_minsup(mine: &MineArgs, cfg: &ConfigFile) -> Result<f64, Failure> {
    let minsup = layer(mine.minsup, cfg, "minsup")?.unwrap_or(DEFAULT_MINSUP);
    if minsup > 0.0 && minsup <= 1.0 {
        Ok(minsup)
    } else {
        Err(Failure::usage(format!("--minsup must lie in (0, 1], got {minsup}")))
    }
}

pub fn resolve_ga(ga: &GaArgs, cfg: &ConfigFile) -> Result<GAConfig, Failure> {
    let d = GAConfig::default();
    let resolved = GAConfig {
        population_size: layer(ga.pop_size, cfg, "pop-size")?.unwrap_or(d.population_size),
        mutation_rate: layer(ga.mutation_rate, cfg, "mutation-rate")?.unwrap_or(d.mutation_rate),
        crossover_rate: layer(ga.crossover_rate, cfg, "crossover-rate")?.unwrap_or(d.crossover_rate),
        min_generations: layer(ga.min_generations, cfg, "min-generations")?.unwrap_or(d.min_generations),
        stall_generations: layer(ga.stall_generations, cfg, "stall-generations")?.unwrap_or(d.stall_generations),
        max_generations: layer(ga.max_generations, cfg, "max-generations")?.unwrap_or(d.max_generations),
        rng_seed: layer(ga.seed, cfg, "seed")?.unwrap_or(d.rng_seed),
        max_rule_items: layer(ga.max_rule_items, cfg, "max-rule-items")?.unwrap_or_default().0,
        specialize_generalize_probability: layer(
            ga.specialize_generalize_probability,
            cfg,
            "specialize-generalize-probability",
        )?
        .unwrap_or(d.specialize_generalize_probability),
        generalize_operator: layer(ga.generalize_operator, cfg, "generalize-operator")?.unwrap_or(d.generalize_operator),
        archive_capacity: layer(ga.archive_capacity, cfg, "archive-capacity")?.or(d.archive_capacity),
        comprehensibility: layer(ga.comprehensibility_variant, cfg, "comprehensibility-variant")?.unwrap_or(d.comprehensibility),
        execution: layer(ga.execution, cfg, "execution")?.unwrap_or(d.execution),
    };
    resolved.validate()?;
    Ok(resolved)
}

fn resolve_output(output: &OutputArgs, cfg: &ConfigFile) -> Result<(Format, Option<usize>), Failure> {
    Ok((
        layer(output.format, cfg, "format")?.unwrap_or(Format::Table),
        layer(output.top_k, cfg, "top-k")?,
    ))
}

fn emit_rows(rows: &[ReportRow], format: Format) -> Result<(), Failure> {
    let out = io::stdout().lock();
    match format {
        Format::Table => report::write_table(rows, out)?,
        Format::Csv => report::write_csv(rows, out)?,
        Format::Json => report::write_json(rows, out)?,
    }
    Ok(())
}

fn read_archive(path: &Path, catalog: &ItemCatalog) -> Result<(Vec<ArchiveEntry>, Option<GAConfig>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Ok((Vec::new(), None));
    }
    let label = path.display().to_string();
    let file = ArchiveFile::from_json(&text).map_err(with_context(&label))?;
    let entries = file.entries(catalog).map_err(with_context(&label))?;
    Ok((entries, Some(file.config)))
}

pub fn binarize(input: &InputArgs, catalog_path: Option<&Path>) -> Result<(), Failure> {
    let cfg = config_of(input)?;
    let data = load(input, &cfg)?;
    let mut listing = Vec::new();
    for (i, item) in data.catalog.items().iter().enumerate() {
        writeln!(listing, "{i}\t{}={}", item.attribute, item.value)?;
    }
    match catalog_path {
        Some(p) => fs::write(p, &listing).map_err(|e| Failure::data(format!("{}: {e}", p.display())))?,
        None => io::stderr().write_all(&listing)?,
    }
    data.db.write_matrix(&data.catalog.matrix_header(), io::stdout().lock())?;
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emit_frequent(catalog: &ItemCatalog, frequent: &[FrequentItemset], format: Format) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match format {
        Format::Table => write_frequent(catalog, frequent, out)?,
        Format::Csv => {
            writeln!(out, "itemset,support_count,support_fraction")?;
            for f in frequent {
                let items = catalog.tokens(&f.itemset).join(" & ");
                writeln!(out, "{},{},{}", csv_field(&items), f.support_count, f.support_fraction)?;
            }
        }
        Format::Json => {
            let list: Vec<_> = frequent
                .iter()
                .map(|f| {
                    json!({
                        "itemset": catalog.tokens(&f.itemset),
                        "support_count": f.support_count,
                        "support_fraction": f.support_fraction,
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &list).map_err(|e| Failure::data(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn mine(input: &InputArgs, mine: &MineArgs, output: &OutputArgs) -> Result<(), Failure> {
    let cfg = config_of(input)?;
    let minsup = resolve_minsup(mine, &cfg)?;
    let (format, _) = resolve_output(output, &cfg)?;
    let data = load(input, &cfg)?;
    let frequent = mine_frequent(&data.db, minsup)?;
    emit_frequent(&data.catalog, &frequent, format)
}

fn progress_line(s: &GenerationStats) -> String {
    let best = match s.best {
        Some([cf, comp, int, compr]) => {
            format!("cf={cf:.4} completeness={comp:.4} interestingness={int:.4} comprehensibility={compr:.4}")
        }
        None => "none".to_string(),
    };
    format!(
        "generation {} archive {} changed {} best {best}",
        s.generation, s.archive_size, s.changed
    )
}

pub fn evolve(
    input: &InputArgs,
    mine: &MineArgs,
    ga: &GaArgs,
    output: &OutputArgs,
    archive_path: Option<&Path>,
    manifest_path: Option<&Path>,
    progress: bool,
) -> Result<(), Failure> {
    let cfg = config_of(input)?;
    let minsup = resolve_minsup(mine, &cfg)?;
    let ga = resolve_ga(ga, &cfg)?;
    let (format, top_k) = resolve_output(output, &cfg)?;
    let data = load(input, &cfg)?;

    let frequent = mine_frequent(&data.db, minsup)?;
    let run = run_evolution(&data.db, &frequent, &ga, |s| {
        if progress {
            eprintln!("{}", progress_line(s));
        }
    })?;
    eprintln!(
        "{} generations, {} archived rules",
        run.generations,
        run.archive.len()
    );

    let file = ArchiveFile::new(&data.catalog, &ga, run.generations, run.archive.entries());
    emit_rows(&report::rows(&data.catalog, &select_final(&run.archive, top_k)), format)?;
    if let Some(p) = archive_path {
        fs::write(p, file.to_json()?).map_err(|e| Failure::data(format!("{}: {e}", p.display())))?;
    }
    let manifest = RunManifest::new(&data.bytes, minsup, &file)?;
    let manifest_json = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::data(e.to_string()))?;
    match manifest_path {
        Some(p) => fs::write(p, manifest_json).map_err(|e| Failure::data(format!("{}: {e}", p.display())))?,
        None => eprintln!("manifest: {}", serde_json::to_string(&manifest).map_err(|e| Failure::data(e.to_string()))?),
    }
    Ok(())
}

pub fn verify(input: &InputArgs, archive: &Path, bound: Option<RuleBound>, output: &OutputArgs) -> Result<(), Failure> {
    let cfg = config_of(input)?;
    let (format, _) = resolve_output(output, &cfg)?;
    let bound = layer(bound, &cfg, "max-rule-items")?;
    let data = load(input, &cfg)?;
    let (entries, archived_cfg) = read_archive(archive, &data.catalog)?;
    let max_items = match bound {
        Some(b) => b.0,
        None => archived_cfg.as_ref().map_or(RuleBound::default().0, |c| c.max_rule_items),
    }
    .ok_or_else(|| Failure::usage("verification needs a finite --max-rule-items"))?;
    let variant = archived_cfg.map(|c| c.comprehensibility).unwrap_or_default();

    let front = oracle::exact_front(&data.dataset, &data.catalog, max_items, variant, Execution::Parallel)?;
    let report = oracle::verify_archive(&entries, &data.catalog.fingerprint(), &front)?;
    let mut out = io::stdout().lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Failure::data(e.to_string()))?;
            writeln!(out)?;
        }
        Format::Table | Format::Csv => {
            writeln!(out, "rules enumerated: {} (up to {max_items} items)", front.rules_enumerated)?;
            writeln!(out, "front vectors: {}", front.distinct_vectors().len())?;
            writeln!(out, "archive entries: {}", entries.len())?;
            writeln!(out, "coverage: {:.4}", report.coverage)?;
            writeln!(out, "spurious: {}", report.spurious.len())?;
            for s in &report.spurious {
                writeln!(
                    out,
                    "  {} is dominated by {}",
                    describe(&data.catalog, &s.entry),
                    describe(&data.catalog, &s.witness)
                )?;
            }
        }
    }
    if report.is_sound() {
        Ok(())
    } else {
        Err(Failure {
            code: Failure::VERIFICATION,
            message: format!("{} archived rules are dominated by the exact front", report.spurious.len()),
        })
    }
}

fn describe(catalog: &ItemCatalog, e: &ArchiveEntry) -> String {
    format!(
        "{} => {}",
        catalog.describe(&e.rule.antecedent).join(" AND "),
        catalog.describe(&e.rule.consequent).join(" AND ")
    )
}

pub fn report(input: &InputArgs, archive: &Path, output: &OutputArgs) -> Result<(), Failure> {
    let cfg = config_of(input)?;
    let (format, top_k) = resolve_output(output, &cfg)?;
    let data = load(input, &cfg)?;
    let (entries, _) = read_archive(archive, &data.catalog)?;
    let archive = ParetoArchive::from_entries(entries);
    emit_rows(&report::rows(&data.catalog, &select_final(&archive, top_k)), format)
}
