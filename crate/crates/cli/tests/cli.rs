use std::path::Path;
use std::process::{Command, Output};

fn blockwatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockwatch"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_flat_raw(path: &Path, frames: usize, value: u8) {
    std::fs::write(path, vec![value; 16 * 16 * frames]).unwrap();
}

fn synth(dir: &Path) -> String {
    let video = dir.join("clip.yuv").to_string_lossy().into_owned();
    let o = blockwatch(&[
        "synth",
        "--out",
        &video,
        "--frames",
        "30",
        "--width",
        "64",
        "--height",
        "48",
        "--distorted",
        "15",
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    video
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let o = blockwatch(&[]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8_lossy(&o.stderr).into_owned() + &stdout(&o);
    assert!(text.contains("Usage"), "{text}");
}

#[test]
fn help_succeeds() {
    let o = blockwatch(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for sub in ["measure", "detect", "seba", "synth", "evaluate"] {
        assert!(stdout(&o).contains(sub));
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(blockwatch(&["measure", "--bogus"]).status.code(), Some(1));
}

#[test]
fn invalid_parameter_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("flat.yuv");
    write_flat_raw(&raw, 2, 9);
    let raw = raw.to_str().unwrap();
    let o = blockwatch(&[
        "measure", "--input", raw, "--width", "16", "--height", "16", "--layout", "y-only", "--delta", "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn measure_flat_frames_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("flat.yuv");
    write_flat_raw(&raw, 2, 77);
    let o = blockwatch(&[
        "measure",
        "--input",
        raw.to_str().unwrap(),
        "--width",
        "16",
        "--height",
        "16",
        "--layout",
        "y-only",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "frame_index,score,boundary_offset");
    assert_eq!(lines.len(), 3);
    for (i, line) in lines[1..].iter().enumerate() {
        assert!(line.starts_with(&format!("{i},0.000000,")), "{line}");
    }
}

#[test]
fn geometry_flags_on_container_format_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("clip.y4m");
    std::fs::write(&path, b"YUV4MPEG2 W16 H16 F25:1 C420\n").unwrap();
    let o = blockwatch(&["measure", "--input", path.to_str().unwrap(), "--width", "32"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_input_is_an_io_error() {
    let o = blockwatch(&["detect", "--input", "/nonexistent/clip.y4m"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn raw_input_without_geometry_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("flat.yuv");
    write_flat_raw(&raw, 1, 0);
    assert_eq!(
        blockwatch(&["measure", "--input", raw.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn synth_detect_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let video = synth(dir.path());
    let sidecar = dir.path().join("clip.json");
    assert!(sidecar.exists());

    let o = blockwatch(&["detect", "--input", &video]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let frames = report["frames"].as_array().unwrap();
    assert_eq!(frames.len(), 30);
    assert_eq!(frames[0]["verdict"], "insufficient-window");
    assert!(report["config"]["detection"]["beta"].is_number());

    let report_path = dir.path().join("report.json");
    let o = blockwatch(&["detect", "--input", &video, "--out", report_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = blockwatch(&[
        "evaluate",
        "--ground-truth",
        sidecar.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("correct,missed,false_alarms,precision,recall,efficiency")
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    let correct: usize = fields[0].parse().unwrap();
    let missed: usize = fields[1].parse().unwrap();
    assert_eq!(correct + missed, 1);
}

#[test]
fn seba_reports_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let video = synth(dir.path());
    let o = blockwatch(&[
        "seba",
        "--input",
        &video,
        "--block-size",
        "16",
        "--report-format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("frame_index,x,y,width,height,class,"));
    assert!(text.lines().count() > 1);
    assert!(text
        .lines()
        .skip(1)
        .all(|l| ["uniform", "edge", "texture"].iter().any(|c| l.contains(c))));
}
