use std::path::Path;
use std::process::{Command, Output};

use latent_brush::fixture::{synthetic_trajectory, FixtureSpec};
use latent_brush::io::npy;
use latent_brush::Shape;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_latent-brush"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn fixture(dir: &Path) -> String {
    let path = dir.join("traj.npy");
    let spec = FixtureSpec::twelve_step().with_shape(Shape::new(4, 24, 24).unwrap());
    npy::write_trajectory(&path, &synthetic_trajectory(&spec).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn inspect_reports_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("twelve.npy");
    let out = run(&["synth", "--out", s(&path)]);
    assert!(out.status.success());
    let out = run(&["inspect", s(&path)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("T=12 C=4 H=64 W=64"), "{text}");
    assert_eq!(text.lines().filter(|l| l.trim_end().ends_with("yes") || l.trim_end().ends_with("no")).count(), 12);
}

#[test]
fn passthrough_writes_one_frame_per_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let traj = fixture(dir.path());
    let frames = dir.path().join("frames.npy");
    let out = run(&["paint", &traj, "--effect", "passthrough", "--out-frames", s(&frames)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (dims, _) = npy::read_f32(&frames).unwrap();
    assert_eq!(dims, vec![12, 4, 24, 24]);
}

#[test]
fn repeated_paint_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let traj = fixture(dir.path());
    let mut outputs = Vec::new();
    for (i, effect) in ["strokes", "dissolve", "strokes"].iter().enumerate() {
        let sub = dir.path().join(format!("run{i}"));
        std::fs::create_dir(&sub).unwrap();
        let out = run(&[
            "paint", &traj, "--effect", effect, "--seed", "11",
            "--out-frames", s(&sub.join("f.npy")),
            "--out-log", s(&sub.join("l.jsonl")),
            "--out-heatmap", s(&sub.join("h.npy")),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(
            ["f.npy", "l.jsonl", "h.npy"].map(|f| std::fs::read(sub.join(f)).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[2]);
    assert_ne!(outputs[0][0], outputs[1][0]);
}

#[test]
fn replay_command_matches_paint() {
    let dir = tempfile::tempdir().unwrap();
    let traj = fixture(dir.path());
    let (painted, log, replayed) = (dir.path().join("a.npy"), dir.path().join("a.jsonl"), dir.path().join("b.npy"));
    let heat = dir.path().join("heat.pgm");
    assert!(run(&["paint", &traj, "--strokes-per-frame", "4", "--out-frames", s(&painted), "--out-log", s(&log), "--out-heatmap", s(&heat)]).status.success());
    assert!(std::fs::read(&heat).unwrap().starts_with(b"P5\n24 24\n255\n"));
    let out = run(&["replay", "--log", s(&log), "--traj", &traj, "--out-frames", s(&replayed)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&painted).unwrap(), std::fs::read(&replayed).unwrap());
}

#[test]
fn transition_and_previews() {
    let dir = tempfile::tempdir().unwrap();
    let src = fixture(dir.path());
    let dst = dir.path().join("dst.npy");
    assert!(run(&["synth", "--out", s(&dst), "--size", "24", "--seed", "5", "--steps", "4"]).status.success());
    let frames = dir.path().join("t.npy");
    let pgm = dir.path().join("pgm");
    let out = run(&[
        "transition", "--src", &src, "--dst", s(&dst), "--mode", "interp", "--steps", "6", "--interp", "slerp",
        "--effect", "passthrough", "--out-frames", s(&frames), "--out-pgm", s(&pgm),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(npy::read_f32(&frames).unwrap().0, vec![6, 4, 24, 24]);
    assert!(pgm.join("frame_000005_c3.pgm").exists());
    assert!(pgm.join("normalization.txt").exists());

    let out = run(&["transition", "--src", &src, "--dst", s(&dst), "--out-frames", s(&frames)]);
    assert!(out.status.success());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let traj = fixture(dir.path());
    let cfg = dir.path().join("painter.toml");
    std::fs::write(&cfg, "effect = \"flip\"\nframes_per_iteration = 3\nrho = 0.0\n").unwrap();
    let frames = dir.path().join("f.npy");
    assert!(run(&["paint", &traj, "--config", s(&cfg), "--out-frames", s(&frames)]).status.success());
    assert_eq!(npy::read_f32(&frames).unwrap().0[0], 36);
    assert!(run(&["paint", &traj, "--config", s(&cfg), "--frames-per-iter", "2", "--out-frames", s(&frames)]).status.success());
    assert_eq!(npy::read_f32(&frames).unwrap().0[0], 24);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(run(&["paint", &traj, "--config", s(&cfg)]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let traj = fixture(dir.path());
    assert_eq!(run(&["paint", &traj, "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["paint", &traj, "--theta", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["paint", s(&dir.path().join("missing.npy"))]).status.code(), Some(1));
    let rank3 = dir.path().join("r3.npy");
    npy::write_f32(&rank3, &[1, 2, 2], &[0.0; 4]).unwrap();
    assert_eq!(run(&["inspect", s(&rank3)]).status.code(), Some(2));
    assert_eq!(run(&["paint", &traj, "--out-pgm", s(dir.path())]).status.code(), Some(2));
    assert_eq!(run(&["paint", &traj, "--out-frames", "/nonexistent-dir/x.npy"]).status.code(), Some(1));
}

#[test]
fn help_lists_every_flag() {
    let out = run(&["paint", "--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in [
        "--effect", "--theta", "--rho", "--radius", "--sigma", "--epsilon", "--cost-mode", "--stroke-cap",
        "--frames-per-iter", "--strokes-per-frame", "--dissolve-mode", "--chunk-size", "--final-flush", "--seed",
        "--config", "--layout", "--out-frames", "--out-log", "--out-heatmap", "--out-pgm",
    ] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
}
