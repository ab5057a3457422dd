//! The `affine-osc` binary end to end.

use std::fs;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affine-osc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn spectrum_of_half_oscillator() {
    let o = bin(&["spectrum", "--kind", "eqintro", "--levels", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("n,energy_analytic,energy_numeric,abs_diff\n"));
    for (n, row) in csv_rows(&text).iter().enumerate() {
        let e: f64 = row[2].parse().unwrap();
        assert!((e - 2.0 * (n as f64 + 1.0)).abs() < 2e-6);
        assert!(row[3].parse::<f64>().unwrap() <= 2e-6);
    }
}

#[test]
fn coupled_ground_level() {
    let o = bin(&["coupled", "--g", "0.6", "--count", "1"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][..2], ["0", "0"]);
    let e: f64 = rows[0][2].parse().unwrap();
    assert!((e - 1.4230249470757707).abs() < 1e-13);
}

#[test]
fn check_passes() {
    let o = bin(&["check"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() >= 20);
    assert!(!text.contains("FAIL "));
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = bin(&[
            "sweep",
            "--b-values",
            "0,2,5",
            "--levels",
            "2",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert!(String::from_utf8(x)
        .unwrap()
        .starts_with("b,n,energy,dev_half,dev_full\n"));
}

#[test]
fn companion_tables_and_json() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = bin(&[
        "coupled",
        "--g",
        "0.3",
        "--count",
        "3",
        "--levels",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(fs::read_to_string(&out)
        .unwrap()
        .starts_with("n1,n2,energy\n"));
    let branches = fs::read_to_string(dir.path().join("run.branches.csv")).unwrap();
    assert_eq!(branches.lines().count(), 5);

    let json = dir.path().join("spec.json");
    let o = bin(&[
        "spectrum",
        "--kind",
        "eqo2",
        "--g",
        "0.3",
        "--levels",
        "2",
        "--samples",
        "5",
        "--format",
        "json",
        "--out",
        json.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["meta"]["params"]["g"], 0.3);
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["wavefunctions"].as_array().unwrap().len(), 10);
}

#[test]
fn dump_config_round_trips() {
    let dir = tempdir().unwrap();
    let o = bin(&[
        "sweep",
        "--g",
        "0.25",
        "--b-values",
        "0,1",
        "--levels",
        "2",
        "--dump-config",
    ]);
    assert!(o.status.success());
    let dumped = stdout(&o);
    let path = dir.path().join("cfg.toml");
    fs::write(&path, &dumped).unwrap();
    let again = bin(&["--config", path.to_str().unwrap(), "--dump-config"]);
    assert_eq!(stdout(&again), dumped);

    let direct = bin(&["sweep", "--g", "0.25", "--b-values", "0,1", "--levels", "2"]);
    let via_file = bin(&["--config", path.to_str().unwrap()]);
    assert_eq!(direct.stdout, via_file.stdout);
}

#[test]
fn flags_override_file() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    fs::write(
        &path,
        "command = \"specfun\"\nfunction = \"hermite\"\ndegree = 2\npoints = [1.0]\n",
    )
    .unwrap();
    let o = bin(&[
        "--config",
        path.to_str().unwrap(),
        "--degree",
        "3",
        "--points",
        "2",
    ]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "x,value\n2.00000000000000e0,4.00000000000000e1\n"
    );
}

#[test]
fn exit_codes() {
    // validation: bad coupling, unknown key, missing offset, unknown flag
    let o = bin(&["spectrum", "--g", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("g"));
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "command = \"spectrum\"\nnot_a_key = 1\n").unwrap();
    assert_eq!(
        bin(&["--config", path.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(bin(&["spectrum", "--kind", "hext1"]).status.code(), Some(1));
    assert_eq!(bin(&["spectrum", "--frobnicate"]).status.code(), Some(1));

    // numerical: a domain too short for the truncation check
    let o = bin(&[
        "spectrum", "--kind", "eqo2", "--g", "0.5", "--domain", "-1.5,1.5", "--grid-n", "200",
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    // i/o: missing config file, unwritable output
    assert_eq!(
        bin(&["--config", "/nonexistent/cfg.toml"]).status.code(),
        Some(3)
    );
    let o = bin(&[
        "specfun",
        "--function",
        "hermite",
        "--points",
        "1",
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));

    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}
