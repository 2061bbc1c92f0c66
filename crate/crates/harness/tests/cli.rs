use std::process::Command;

fn boostnys() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boostnys"))
}

#[test]
fn synth_run_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("points.csv");
    let status = boostnys()
        .args(["synth", "--n", "90", "--d", "3", "--seed", "4", "--out"])
        .arg(&points)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&points).unwrap();
    assert_eq!(text.lines().count(), 90);
    assert!(text.lines().all(|l| l.split(',').count() == 3));

    let exp = dir.path().join("exp.txt");
    std::fs::write(
        &exp,
        "data = csv\npath = points.csv\nmethods = standard, RUB-mean, ensemble-R\n\
         m = 5\nk = 3\np_max = 3\ns = 10\nv1 = 6\nv2 = 6\nreplicates = 2\ntiming = false\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = boostnys().args(["run", "--config"]).arg(&exp).arg("--out-dir").arg(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    for f in ["trace.csv", "summary.csv", "welch.csv", "error.svg", "runtime.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }

    let svg = dir.path().join("again.svg");
    let plot = boostnys()
        .args(["plot", "--summary"])
        .arg(out.join("summary.csv"))
        .arg("--out")
        .arg(&svg)
        .status()
        .unwrap();
    assert!(plot.success());
    assert_eq!(
        std::fs::read(&svg).unwrap(),
        std::fs::read(out.join("error.svg")).unwrap()
    );
}

#[test]
fn errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let exp = dir.path().join("bad.txt");
    std::fs::write(&exp, "data = synthetic\nn = 50\nd = 2\nmethods = QQB-mean\n").unwrap();
    let out = boostnys().args(["run", "--config"]).arg(&exp).arg("--out-dir").arg(dir.path()).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let summary = dir.path().join("summary.csv");
    std::fs::write(&summary, "not,a,summary\n").unwrap();
    let out = boostnys().args(["plot", "--summary"]).arg(&summary).arg("--out").arg(dir.path().join("x.svg")).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));
}
