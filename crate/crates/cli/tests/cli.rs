use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_typgraph");

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("typgraph-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn typgraph(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn corpus_configs() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    v.sort();
    v
}

fn header(csv: &str) -> Vec<String> {
    csv.lines()
        .next()
        .unwrap()
        .split(',')
        .map(str::to_owned)
        .collect()
}

#[test]
fn corpus_validates_and_runs() {
    let configs = corpus_configs();
    assert!(configs.len() >= 6);
    for cfg in configs {
        let path = cfg.to_str().unwrap();
        let v = typgraph(&["validate", path]);
        assert_eq!(
            code(&v),
            0,
            "{path}: {}",
            String::from_utf8_lossy(&v.stdout)
        );
        assert_eq!(String::from_utf8_lossy(&v.stdout).trim(), "ok", "{path}");
        let r = typgraph(&["run", path, "--trials", "2"]);
        assert_eq!(
            code(&r),
            0,
            "{path}: {}",
            String::from_utf8_lossy(&r.stderr)
        );
        let csv = String::from_utf8(r.stdout).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines.last().unwrap().starts_with("#summary"), "{path}");
        let width = header(&csv).len();
        for line in &lines {
            assert_eq!(line.split(',').count(), width, "{path}: {line}");
        }
    }
}

#[test]
fn help_lists_every_column() {
    let out = typgraph(&["--help"]);
    assert_eq!(code(&out), 0);
    let help = String::from_utf8(out.stdout).unwrap();
    for cfg in corpus_configs() {
        let r = typgraph(&["run", cfg.to_str().unwrap(), "--trials", "1"]);
        for col in header(&String::from_utf8(r.stdout).unwrap()) {
            let name = match col.rsplit_once('_') {
                Some((stem, idx)) if idx.parse::<usize>().is_ok() => format!("{stem}_r"),
                _ => col.clone(),
            };
            assert!(help.contains(&name), "column {col} missing from --help");
        }
    }
}

#[test]
fn overrides_apply() {
    let dir = scratch("overrides");
    let cfg = corpus().join("quasirandom.toml");
    let cfg = cfg.to_str().unwrap();
    let out = dir.join("out.csv");
    let long = dir.join("long.csv");
    let r = typgraph(&[
        "run",
        cfg,
        "--trials",
        "4",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
        "--emit-plot-data",
        long.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(r.stdout.is_empty());
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 + 1);
    let long = fs::read_to_string(&long).unwrap();
    assert_eq!(long.lines().next().unwrap(), "experiment,row,column,value");
    assert!(long.lines().skip(1).all(|l| l.starts_with("quasirandom,")));

    let same = typgraph(&["run", cfg, "--trials", "4", "--seed", "5"]);
    assert_eq!(String::from_utf8(same.stdout).unwrap(), csv);
    let other = typgraph(&["run", cfg, "--trials", "4", "--seed", "6"]);
    assert_ne!(String::from_utf8(other.stdout).unwrap(), csv);
}

#[test]
fn config_errors_exit_2() {
    let dir = scratch("config");
    let cases = [
        ("unknown.toml", "experiment = \"deviation\"\nmaster_seed = 1\ntrials = 2\nn = 10\np = 0.5\ncolour = 3\n"),
        ("syntax.toml", "experiment = \n"),
        ("delta.toml", "experiment = \"deviation\"\nmaster_seed = 1\ntrials = 2\nn = 10\np = 0.5\ndelta = 0.7\n"),
        ("trials.toml", "experiment = \"quasirandom\"\nmaster_seed = 1\ntrials = 0\nn = 10\np = 0.5\n"),
        (
            "graph.toml",
            "experiment = \"percolation-gap\"\nmaster_seed = 1\ntrials = 2\np = 0.5\ngraph_file = \"bad.txt\"\n",
        ),
    ];
    fs::write(dir.join("bad.txt"), "3 1\n0 7\n").unwrap();
    for (name, body) in cases {
        let path = write_config(&dir, name, body);
        let v = typgraph(&["validate", &path]);
        let r = typgraph(&["run", &path]);
        assert_eq!(
            code(&r),
            2,
            "{name}: {}",
            String::from_utf8_lossy(&r.stderr)
        );
        if name != "graph.toml" {
            assert_eq!(code(&v), 2, "{name}");
        }
        assert!(r.stdout.is_empty(), "{name}");
    }
    let v = typgraph(&["validate", &write_config(&dir, "d.toml", cases[2].1)]);
    assert!(String::from_utf8(v.stdout).unwrap().contains("`delta`"));
}

#[test]
fn io_errors_exit_3() {
    let dir = scratch("io");
    let missing = dir.join("missing.toml");
    assert_eq!(code(&typgraph(&["run", missing.to_str().unwrap()])), 3);
    assert_eq!(code(&typgraph(&["validate", missing.to_str().unwrap()])), 3);

    let cfg = corpus().join("quasirandom.toml");
    let out = dir.join("no/such/dir/out.csv");
    let r = typgraph(&[
        "run",
        cfg.to_str().unwrap(),
        "--trials",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 3);
    assert!(String::from_utf8_lossy(&r.stderr).contains("cannot write"));

    let body = "experiment = \"percolation-gap\"\nmaster_seed = 1\ntrials = 2\np = 0.5\ngraph_file = \"absent.txt\"\n";
    let path = write_config(&dir, "absent.toml", body);
    assert_eq!(code(&typgraph(&["run", &path])), 3);
}

#[test]
fn warnings_do_not_block() {
    let dir = scratch("warn");
    let body =
        "experiment = \"graphon-spectrum\"\nmaster_seed = 1\ntrials = 1\nn = 60\np = 0.3\n\n\
                [kernel]\nkind = \"constant\"\nvalue = 4.0\n";
    let path = write_config(&dir, "warn.toml", body);
    let v = typgraph(&["validate", &path]);
    let text = String::from_utf8(v.stdout).unwrap();
    assert!(text.starts_with("warning:"), "{text}");
    let r = typgraph(&["run", &path]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stderr).contains("warning:"));
}
