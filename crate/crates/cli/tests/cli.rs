use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_onhold"))
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic.csv")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn onhold")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_exits_zero_everywhere() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    for cmd in [
        "mine",
        "train",
        "evaluate",
        "classify",
        "detect-conditions",
        "baseline",
        "features",
    ] {
        let o = run(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn evaluate_ranks_classifiers_and_repeats_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let before = fs::read(fixture()).unwrap();
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let o = run(&[
            "evaluate",
            "--dataset",
            p(&fixture()),
            "--seed",
            "7",
            "--out",
            p(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        reports.push(fs::read(&out).unwrap());
    }
    assert!(reports[0] == reports[1], "same seed must give identical reports");
    assert_eq!(fs::read(fixture()).unwrap(), before, "input must not change");

    let v: Value = serde_json::from_slice(&reports[0]).unwrap();
    let cols: Vec<&str> = v["comparison"]["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(cols, ["baseline", "unigram", "ngram"]);
    let auc_row = v["comparison"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["metric"] == "auc")
        .unwrap();
    let auc: Vec<f64> = auc_row["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["value"].as_f64().unwrap())
        .collect();
    assert!(auc[2] >= auc[1] && auc[1] >= auc[0], "{auc:?}");
    assert_eq!(v["report"]["n_comments"], 600);
    assert_eq!(
        v["report"]["classifiers"][2]["splits"].as_array().unwrap().len(),
        10
    );
}

#[test]
fn missing_dataset_is_input_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&[
        "evaluate",
        "--dataset",
        "/no/such/file.csv",
        "--seed",
        "1",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not found"));
    assert!(!out.exists());
    assert_eq!(
        fs::read_dir(dir.path()).unwrap().count(),
        0,
        "no temp files left behind"
    );
}

#[test]
fn seed_is_mandatory() {
    for cmd in ["train", "evaluate"] {
        let o = run(&[cmd, "--dataset", p(&fixture())]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(stderr(&o).contains("--seed"));
    }
}

#[test]
fn single_class_training_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("one.csv");
    fs::write(
        &data,
        "project,id,text,label\np,1,TODO fix this,not_on_hold\np,2,TODO and this,not_on_hold\n",
    )
    .unwrap();
    let out = dir.path().join("model.txt");
    let o = run(&["train", "--dataset", p(&data), "--seed", "1", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("both on-hold and other"), "{}", stderr(&o));
    assert!(!out.exists());
}

/// Fixture plus on-hold comments waiting on a YARN change to be committed.
fn augmented_fixture(dir: &Path) -> PathBuf {
    let tails = [
        "we can drop the fallback",
        "switch to the new API",
        "remove the copy below",
        "use the shared pool",
        "delete this branch",
        "call the public method",
        "simplify this check",
        "enable the test again",
    ];
    let mut text = fs::read_to_string(fixture()).unwrap();
    for i in 0..30 {
        let bug = 10 + i * 331;
        let tail = tails[i % tails.len()];
        text.push_str(&format!(
            "alpha,y{i:03},\"TODO: After YARN-{bug} is committed, {tail}\",on_hold\n"
        ));
    }
    let path = dir.join("augmented.csv");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn classify_reports_waiting_bug() {
    let dir = tempfile::tempdir().unwrap();
    let data = augmented_fixture(dir.path());
    let model = dir.path().join("model.txt");
    let o = run(&["train", "--dataset", p(&data), "--seed", "3", "--out", p(&model)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    // unlabeled input
    let input = dir.path().join("input.csv");
    fs::write(
        &input,
        "project,id,text\nhadoop,yarn2,\"TODO: After YARN-2 is committed, we should call containerResource.getCpus()\n(or equivalent) to multiply the weight by the number of requested cpus.\"\n",
    )
    .unwrap();
    let out = dir.path().join("pred.json");
    let o = run(&[
        "classify",
        "--model",
        p(&model),
        "--dataset",
        p(&input),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_json(&out);
    let pred = &v["predictions"][0];
    assert_eq!(pred["comment_id"], "yarn2");
    assert_eq!(pred["predicted"], "on_hold");
    assert_eq!(pred["conditions"].as_array().unwrap().len(), 1);
    assert_eq!(pred["conditions"][0]["kind"], "product_bug");
    assert_eq!(pred["conditions"][0]["parts"], serde_json::json!(["YARN", "2"]));
}

#[test]
fn classify_empty_tree_and_bad_model() {
    let dir = tempfile::tempdir().unwrap();
    let data = augmented_fixture(dir.path());
    let model = dir.path().join("model.txt");
    let o = run(&[
        "train",
        "--dataset",
        p(&data),
        "--seed",
        "3",
        "--unigram",
        "--out",
        p(&model),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let tree = dir.path().join("empty");
    fs::create_dir(&tree).unwrap();
    let out = dir.path().join("pred.json");
    let o = run(&[
        "classify",
        "--model",
        p(&model),
        "--source",
        p(&tree),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_json(&out);
    assert_eq!(v["n_comments"], 0);
    assert_eq!(v["predictions"], serde_json::json!([]));

    let text = fs::read_to_string(&model).unwrap();
    let future = dir.path().join("future.txt");
    fs::write(&future, text.replacen(" v1", " v9", 1)).unwrap();
    let o = run(&["classify", "--model", p(&future), "--source", p(&tree)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("version"), "{}", stderr(&o));
}

#[test]
fn mine_counts_every_comment() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("repo");
    fs::create_dir_all(root.join("src/util")).unwrap();
    fs::write(
        root.join("src/A.java"),
        "// TODO remove in Camel 3.0\nclass A {\n  /* plain block */\n  int x; // trailing\n}\n",
    )
    .unwrap();
    fs::write(
        root.join("src/util/B.java"),
        "/**\n * Helper.\n * FIXME after CAMEL-3091\n */\nclass B { String s = \"// not a comment\"; }\n",
    )
    .unwrap();
    fs::write(root.join("C.java"), "// first line\n// second line\nclass C {}\n").unwrap();
    fs::write(root.join("notes.txt"), "// ignored, wrong extension\n").unwrap();

    let out = dir.path().join("mined.csv");
    let o = run(&["mine", "--root", p(&root), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    // A: three comments, B: one javadoc, C: two merged line comments
    assert_eq!(rows.len(), 5, "{text}");
    let ids: Vec<&str> = rows.iter().map(|r| &r[1]).collect();
    assert_eq!(
        ids,
        [
            "C.java:1",
            "src/A.java:1",
            "src/A.java:3",
            "src/A.java:4",
            "src/util/B.java:1"
        ]
    );
    assert_eq!(&rows[0][2], "first line\nsecond line");
}

#[test]
fn features_lead_with_multi_word_gram() {
    let o = run(&["features", "--dataset", p(&fixture()), "--top", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let top = v["top"].as_array().unwrap();
    assert_eq!(top.len(), 3);
    assert!(top[0]["n"].as_u64().unwrap() > 1, "{}", top[0]);
    assert_eq!(top[0]["rank"], 1);
}

#[test]
fn detect_conditions_on_known_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("rows.csv");
    fs::write(
        &data,
        "project,id,text,label\n\
         x,1,Can be removed after 26 June 2013,on_hold\n\
         x,2,remove the httpBindingRef look up in Camel 3.0,on_hold\n\
         x,3,FIXME (CAMEL-3091): @Test,on_hold\n\
         x,4,works on Linux only,not_on_hold\n",
    )
    .unwrap();
    let o = run(&["detect-conditions", "--dataset", p(&data), "--on-hold-only"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n_comments"], 3);
    let got: Vec<(String, Value)> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["conditions"][0]["kind"].as_str().unwrap().to_string(),
                r["conditions"][0]["parts"].clone(),
            )
        })
        .collect();
    assert_eq!(
        got,
        [
            ("date".to_string(), serde_json::json!(["26 June 2013"])),
            ("product_version".to_string(), serde_json::json!(["Camel", "3.0"])),
            ("product_bug".to_string(), serde_json::json!(["CAMEL", "3091"])),
        ]
    );
}

#[test]
fn baseline_flags_keyword_comments() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("rows.csv");
    fs::write(
        &data,
        "project,id,text,label\nx,1,TODO remove after release,on_hold\nx,2,TODO tidy up,not_on_hold\nx,3,FIXME this will break,not_on_hold\n",
    )
    .unwrap();
    let o = run(&["baseline", "--dataset", p(&data)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["confusion"],
        serde_json::json!({"tp": 1, "fp": 1, "tn": 1, "fn": 0})
    );
    assert_eq!(
        v["predictions"][0]["matched"],
        serde_json::json!(["after", "remove"])
    );
    assert_eq!(v["recall"]["value"], 1.0);
}

#[test]
fn config_file_supplies_seed_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(
        &conf,
        format!(
            "# shared settings\ndataset = {}\nseed = 5\nfolds = 2\nunigram = true\n",
            p(&fixture())
        ),
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["evaluate", "--config", p(&conf), "--folds", "3", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_json(&out);
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["n_folds"], 3);
    assert_eq!(
        v["comparison"]["columns"],
        serde_json::json!(["baseline", "unigram"])
    );

    fs::write(&conf, "seed = soon\n").unwrap();
    let o = run(&["evaluate", "--config", p(&conf)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cross_project_evaluation_runs() {
    let o = run(&[
        "evaluate",
        "--dataset",
        p(&fixture()),
        "--seed",
        "2",
        "--cross-project",
        "--unigram",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["mode"], "cross_project");
    let splits: Vec<&str> = v["report"]["classifiers"][1]["splits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["split"].as_str().unwrap())
        .collect();
    assert_eq!(splits, ["alpha", "beta", "gamma"]);
}

/// Checks the subset of JSON Schema the report schema uses. Objects may
/// not carry keys the schema does not list.
fn conforms(schema: &Value, root: &Value, v: &Value, at: &str) {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.strip_prefix("#/$defs/").unwrap();
        return conforms(&root["$defs"][name], root, v, at);
    }
    if let Some(options) = schema.get("enum") {
        assert!(
            options.as_array().unwrap().contains(v),
            "{at}: {v} not in {options}"
        );
    }
    if let Some(t) = schema.get("type") {
        let types: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().map(|x| x.as_str().unwrap()).collect(),
            _ => unreachable!(),
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "integer" => v.is_u64() || v.is_i64(),
            "number" => v.is_number(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        });
        assert!(ok, "{at}: {v} is not {types:?}");
    }
    if let Some(obj) = v.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        for key in schema
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            assert!(obj.contains_key(key.as_str().unwrap()), "{at}: missing {key}");
        }
        if let Some(props) = props {
            for (k, child) in obj {
                let sub = props
                    .get(k)
                    .unwrap_or_else(|| panic!("{at}: undocumented key {k}"));
                conforms(sub, root, child, &format!("{at}.{k}"));
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, child) in arr.iter().enumerate() {
            conforms(items, root, child, &format!("{at}[{i}]"));
        }
    }
}

#[test]
fn reports_follow_the_shipped_schema() {
    let schema: Value = serde_json::from_slice(
        &fs::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.schema.json")).unwrap(),
    )
    .unwrap();
    let data = fixture();
    for extra in [
        &[][..],
        &["--cross-project"][..],
        &["--no-stratify", "--folds", "2"][..],
    ] {
        let mut args = vec!["evaluate", "--dataset", p(&data), "--seed", "1"];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        conforms(&schema, &schema, &v, "$");
    }
}
