use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sigchange"))
}

#[test]
fn field_rows_match_grid_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let out = dir.path().join("field.csv");
    fs::write(&conf, format!("model = crosscap\ngrid = 32\nout = {}\n", out.display())).unwrap();
    let status = bin()
        .args(["field", "--config"])
        .arg(&conf)
        .args(["--grid", "12", "--window", "-1.5,1.5,-1.5,1.5"])
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,x,g_tt,g_tx,g_xx,det,class_code,slope1,slope2\n"));
    assert_eq!(text.lines().count(), 1 + 12 * 12);
    // crosscap from the config file: the corner is Lorentzian, the centre Riemannian
    assert!(text.lines().any(|l| l.contains(",R,,")));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let svg = dir.path().join(format!("{name}.svg"));
        let ok = bin()
            .args(["field", "--grid", "24", "--out"])
            .arg(&out)
            .arg("--svg")
            .arg(&svg)
            .output()
            .unwrap()
            .status
            .success();
        assert!(ok);
        (fs::read(out).unwrap(), fs::read(svg).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn bad_input_exits_with_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("no_such_dir").join("x.csv");
    let res = bin().args(["field", "--grid", "8", "--out"]).arg(&out).output().unwrap();
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("writing"));
    let res = bin().args(["field", "--grid", "4"]).output().unwrap();
    assert_eq!(res.status.code(), Some(2));
    let res = bin().args(["geodesic", "--init", "0,0,0,0"]).output().unwrap();
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn radical_and_seam_commands_write_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rad.csv");
    let ok = bin()
        .args(["radical", "--model", "crosscap", "--grid", "128", "--out"])
        .arg(&csv)
        .output()
        .unwrap()
        .status
        .success();
    assert!(ok);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("s,t,x,rad_t,rad_x,tan_t,tan_x,alignment,class\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",transverse") || l.ends_with(",tangent")));

    let json = dir.path().join("seam.json");
    let ok = bin()
        .args(["seam", "--topology", "rp2", "--model", "crosscap", "--order", "0", "--out"])
        .arg(&json)
        .output()
        .unwrap()
        .status
        .success();
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}
