use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gazkit_core::wikidata::{fetch_names, FetchPlan, LabelKind, MockGraph, Qid, Recorder};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

fn gazkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gazkit"))
        .args(args)
        .env_remove("GAZKIT_ENDPOINT")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn airport_features_match_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("features.tsv");
    let o = gazkit(&[
        "match",
        "--input",
        s(&fixture("airport/corpus.bio")),
        "--gazetteer-dir",
        s(&fixture("airport/gazetteer")),
        "--output",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let got = fs::read_to_string(&out).unwrap();
    assert_eq!(got, fs::read_to_string(fixture("airport/features.golden")).unwrap());

    // Columns follow the registry order: PER ORG COMM POL GPE LOC ...
    let col = |k: usize| -> Vec<String> {
        got.lines()
            .filter(|l| !l.is_empty())
            .map(|l| l.split('\t').nth(k + 1).unwrap().to_string())
            .collect()
    };
    let row = |s: &str| s.split(' ').map(String::from).collect::<Vec<_>>();
    assert_eq!(col(0), row("B-PER O O O O O O O O O O O O"));
    assert_eq!(col(5), row("O O O O O O O O B-LOC I-LOC O O O"));
    assert_eq!(col(4), row("O O O B-GPE I-GPE O O O O O O B-GPE I-GPE"));
    assert_eq!(col(1), row("O O O O O I-ORG I-ORG O O O O O O"));
}

#[test]
fn partial_matching_can_be_switched_off() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("gazkit.toml");
    fs::write(&config, "[matcher]\npartial = false\n").unwrap();
    let o = gazkit(&[
        "--config",
        s(&config),
        "match",
        "--input",
        s(&fixture("airport/corpus.bio")),
        "--gazetteer-dir",
        s(&fixture("airport/gazetteer")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(!text.contains("I-ORG") && !text.contains("B-GPE\tO"), "{text}");
    assert!(text.contains("B-PER"));

    // The flag wins over the config file.
    let o = gazkit(&[
        "--config",
        s(&config),
        "match",
        "--partial",
        "on",
        "--input",
        s(&fixture("airport/corpus.bio")),
        "--gazetteer-dir",
        s(&fixture("airport/gazetteer")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("I-ORG"));
}

#[test]
fn score_against_itself_is_perfect() {
    let g = fixture("airport/corpus.bio");
    let o = gazkit(&["score", "--gold", s(&g), "--pred", s(&g), "--tsv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let micro = text.lines().find(|l| l.starts_with("micro")).unwrap();
    assert!(micro.starts_with("micro\t100.00\t100.00\t100.00\t"), "{micro}");
}

#[test]
fn missing_input_is_a_data_error() {
    let o = gazkit(&["score", "--gold", "/no/such/gold.bio", "--pred", "/no/such/gold.bio"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/gold.bio"), "{}", stderr(&o));

    let o = gazkit(&["--config", "/no/such/gazkit.toml", "ttest", "--a", "x", "--b", "y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/gazkit.toml"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(gazkit(&["score", "--bogus"]).status.code(), Some(1));
    assert_eq!(gazkit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gazkit(&[]).status.code(), Some(1));
    let g = fixture("airport/corpus.bio");
    assert_eq!(gazkit(&["score", "--gold", s(&g), "--pred", s(&g), "--mode", "glyph"]).status.code(), Some(1));
    let o = gazkit(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("scan-dump"));
}

#[test]
fn ttest_reports_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    fs::write(&a, "1\n2\n3\n").unwrap();
    fs::write(&b, "# run scores\n2\n3\n4\n\n").unwrap();
    let o = gazkit(&["ttest", "--a", s(&a), "--b", s(&b)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("t\t-1.224745\ndf\t4.0000\np\t"), "{}", stdout(&o));
}

#[test]
fn augment_is_reproducible() {
    let run = || {
        let o = gazkit(&[
            "augment",
            "--input",
            s(&fixture("airport/corpus.bio")),
            "--gazetteer-dir",
            s(&fixture("airport/gazetteer")),
            "--types",
            "PER,LOC,GPE",
            "--seed",
            "7",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        stdout(&o)
    };
    let first = run();
    assert_eq!(first, run());
    // Each targeted type has a one-entry group to draw from; the airport
    // is not targeted and stays.
    assert!(first.contains("Hong\tB-GPE\nKong\tI-GPE\nGovernment\tI-GPE\n"), "{first}");
    assert!(first.contains("Hong\tB-AIR\n"));
}

const DUMP: &str = r#"[
{"id":"Q1","labels":{"en":{"language":"en","value":"Ada Lovelace"},"ru":{"language":"ru","value":"Ада Лавлейс"}},"aliases":{"en":[{"language":"en","value":"Ada King (countess)"}]},"claims":{"P31":[{"mainsnak":{"datavalue":{"value":{"id":"Q5"}}}}]}},
{"id":"Q2","labels":{"ru":{"language":"ru","value":"Москва"}},"claims":{"P31":[{"mainsnak":{"datavalue":{"value":{"id":"Q515"}}}}]}},
{"id":"Q3","labels":{"en":{"language":"en","value":"Q3"}},"claims":{"P31":[{"mainsnak":{"datavalue":{"value":{"id":"Q5"}}}}]}}
]
"#;

#[test]
fn dump_to_gazetteer_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    fs::write(p("dump.json"), DUMP).unwrap();
    fs::write(p("types.tsv"), "Q5\tPER\nQ515\tGPE\n").unwrap();

    let o = gazkit(&[
        "scan-dump",
        "--dump",
        s(&p("dump.json")),
        "--type-map",
        s(&p("types.tsv")),
        "--language",
        "en",
        "--language",
        "ru",
        "--output",
        s(&p("records.jsonl")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(p("records.jsonl")).unwrap().lines().count(), 5);

    let o = gazkit(&[
        "clean",
        "--input",
        s(&p("records.jsonl")),
        "--out-dir",
        s(&p("gaz")),
        "--reject-log",
        s(&p("rejects.tsv")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(p("gaz/en_PER_alias.txt")).unwrap(), "Ada King\n");
    assert_eq!(fs::read_to_string(p("gaz/ru_GPE_canonical.txt")).unwrap(), "Москва\n");
    assert!(fs::read_to_string(p("rejects.tsv")).unwrap().starts_with("Q3\tPER\tpattern:"));

    let o = gazkit(&["inflect", "--gazetteer-dir", s(&p("gaz")), "--out-dir", s(&p("gaz"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let forms = fs::read_to_string(p("gaz/ru_GPE_inflected.txt")).unwrap();
    assert_eq!(forms, "Москве\nМосквой\nМоскву\nМосквы\n");

    fs::write(p("ru.bio"), "В\tO\nМоскве\tB-GPE\n.\tO\n\nМосква\tB-GPE\n").unwrap();
    let o = gazkit(&[
        "coverage",
        "--input",
        s(&p("ru.bio")),
        "--gazetteer-dir",
        s(&p("gaz")),
        "--language",
        "ru",
        "--tsv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("GPE\t2\t2\t100.0"), "{}", stdout(&o));
}

#[test]
fn fetch_replays_recorded_exchanges() {
    let dir = tempfile::tempdir().unwrap();
    let tape = dir.path().join("tape.jsonl");
    let graph = MockGraph::new()
        .instance(Qid(193727), Qid(3918))
        .name(Qid(193727), LabelKind::Canonical, "en".parse().unwrap(), "Johns Hopkins University")
        .name(Qid(193727), LabelKind::Alias, "en".parse().unwrap(), "JHU");
    let plan = FetchPlan {
        tag: "ORG".into(),
        types: vec![Qid(3918)],
        language: "en".parse().unwrap(),
        page_size: 1,
        endpoint: String::new(),
        timeout_secs: 60,
    };
    {
        let rec = Recorder::new(&graph, fs::File::create(&tape).unwrap());
        assert_eq!(fetch_names(&plan, &rec).unwrap().count(), 2);
    }
    fs::write(dir.path().join("types.tsv"), "Q3918\tORG\n").unwrap();
    let o = gazkit(&[
        "fetch",
        "--type",
        "ORG",
        "--type-map",
        s(&dir.path().join("types.tsv")),
        "--page-size",
        "1",
        "--replay",
        s(&tape),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<_> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().any(|l| l.contains(r#""kind":"alias","text":"JHU""#)), "{lines:?}");

    // A query missing from the tape is a data error naming the query.
    let o = gazkit(&[
        "fetch",
        "--type",
        "ORG",
        "--type-map",
        s(&dir.path().join("types.tsv")),
        "--page-size",
        "5",
        "--replay",
        s(&tape),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("LIMIT 5"), "{}", stderr(&o));
}
