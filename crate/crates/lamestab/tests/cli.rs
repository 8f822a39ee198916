use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use lamestab::config::ExperimentConfig;
use lamestab::io::{read_scalar, write_displacement, write_mesh};
use lamestab::runner::{prepare, realize_pair};
use lamestab_core::elasticity::{assemble, solve_dirichlet};
use lamestab_core::reconstruct::vertex_error;

const BIN: &str = env!("CARGO_BIN_EXE_lamestab");

const SMALL: &str = r#"
seed = 11
mesh_h = 0.1
d = 0.1
scales = [1e-3, 1e-2, 1e-1]
checks = CHECKS

[domain]
kind = "unit_disk"

[lame.mu]
background = 1.0
inclusions = [{ center = [-0.3, 0.2], radius = 0.2, contrast = 0.5 }]

[boundary_g]
kind = "affine"
matrix = [[1.0, 0.3], [0.3, -0.5]]

[reconstruction]
noise_levels = [0.0, 1e-4, 1e-3]

[three_sphere]
centers = 4
"#;

fn config(dir: &Path, checks: &str, extra: &str) -> PathBuf {
    let path = dir.join("exp.toml");
    fs::write(&path, format!("{}{extra}", SMALL.replace("CHECKS", checks))).unwrap();
    path
}

fn lamestab(args: &[&str], env_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("LAME_OUTPUT_DIR");
    if let Some(d) = env_dir {
        cmd.env("LAME_OUTPUT_DIR", d);
    }
    cmd.output().unwrap()
}

fn names(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn empty_check_list_writes_only_summaries() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "[]", "");
    let out = tmp.path().join("out");
    let o = lamestab(
        &[
            "run",
            cfg.to_str().unwrap(),
            "--output-dir",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(names(&out), ["boundary_norms.csv", "summary.json"]);
    let s = summary(&out);
    assert_eq!(s["schema_version"], 1);
    assert_eq!(s["exit_status"], 0);
    assert!(s["mesh"]["vertices"].as_u64().unwrap() > 100);
    let norms = fs::read_to_string(out.join("boundary_norms.csv")).unwrap();
    assert!(norms.starts_with("s,norm,theta,frequency\n"));
    assert_eq!(norms.lines().count(), 4);
}

#[test]
fn same_seed_gives_identical_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), r#"["three_sphere", "reconstruction"]"#, "");
    let dirs = [
        tmp.path().join("a"),
        tmp.path().join("b"),
        tmp.path().join("c"),
    ];
    for (d, jobs) in dirs.iter().zip(["1", "2", "1"]) {
        let mut args = vec![
            "run",
            cfg.to_str().unwrap(),
            "--output-dir",
            d.to_str().unwrap(),
        ];
        args.extend(["--jobs", jobs]);
        if d.ends_with("c") {
            args.extend(["--seed", "12"]);
        }
        let o = lamestab(&args, None);
        assert!(
            o.status.code().is_some_and(|c| c < 2),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let files = names(&dirs[0]);
    assert!(files.contains(&"noise_sweep.csv".to_string()));
    assert_eq!(files, names(&dirs[1]));
    for f in files.iter().filter(|f| f.ends_with(".csv")) {
        assert_eq!(
            fs::read(dirs[0].join(f)).unwrap(),
            fs::read(dirs[1].join(f)).unwrap(),
            "{f}"
        );
    }
    // another seed moves the random centers
    assert_ne!(
        fs::read(dirs[0].join("three_sphere.csv")).unwrap(),
        fs::read(dirs[2].join("three_sphere.csv")).unwrap()
    );
    assert_eq!(summary(&dirs[2])["seed"], 12);
}

#[test]
fn exit_status_follows_failed_checks() {
    let tmp = tempfile::tempdir().unwrap();
    // an impossible δ window fails every center
    let cfg = config(
        tmp.path(),
        r#"["three_sphere"]"#,
        "window = [0.999, 0.9999]\n",
    );
    let out = tmp.path().join("out");
    let o = lamestab(
        &[
            "run",
            cfg.to_str().unwrap(),
            "--output-dir",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        o.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let s = summary(&out);
    let failed = s["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == "fail")
        .count();
    assert!(failed > 0);
    assert_eq!(s["failed_checks"], failed);
    assert_eq!(s["exit_status"], 1);
}

#[test]
fn output_dir_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("from_env");
    let flag_dir = tmp.path().join("from_flag");
    let cfg = config(tmp.path(), "[]", "");
    let o = lamestab(&["run", cfg.to_str().unwrap()], Some(&env_dir));
    assert!(o.status.success());
    assert!(env_dir.join("summary.json").exists());

    let o = lamestab(
        &[
            "run",
            cfg.to_str().unwrap(),
            "--output-dir",
            flag_dir.to_str().unwrap(),
        ],
        Some(&env_dir),
    );
    assert!(o.status.success());
    assert!(flag_dir.join("summary.json").exists());

    let cfg_dir = tmp.path().join("from_config");
    let text = fs::read_to_string(&cfg).unwrap();
    let text = format!("output_dir = {:?}\n{text}", cfg_dir.to_str().unwrap());
    fs::write(&cfg, text).unwrap();
    let o = lamestab(&["run", cfg.to_str().unwrap()], Some(&env_dir));
    assert!(o.status.success());
    assert!(cfg_dir.join("summary.json").exists());
}

#[test]
fn describe_reports_sizes_and_solves() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), r#"["holder_stability"]"#, "");
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("mesh_h = 0.1", "mesh_h = 0.05")
        .replace(
            "scales = [1e-3, 1e-2, 1e-1]",
            "scales = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1]",
        );
    fs::write(&cfg, &text).unwrap();
    let o = lamestab(&["describe", cfg.to_str().unwrap()], None);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("family: 10 forward solves"), "{stdout}");
    assert!(stdout.contains("total forward solves: 10"), "{stdout}");

    let plan = lamestab::describe(&ExperimentConfig::from_toml(&text, &cfg).unwrap()).unwrap();
    let p2 = 2 * (plan.vertices + plan.edges);
    assert!((plan.vector_dofs as f64 / p2 as f64 - 1.0).abs() <= 0.2);
    assert_eq!(plan.forward_solves, 10);
    // describe solves nothing, so no output directory appears
    assert_eq!(names(tmp.path()), ["exp.toml"]);
}

#[test]
fn invalid_check_name_lists_valid_names() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), r#"["three_sphere", "four_sphere"]"#, "");
    let o = lamestab(&["describe", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("four_sphere"), "{err}");
    for name in ["integral_estimate", "strain_lower_bound", "reconstruction"] {
        assert!(err.contains(name), "{err}");
    }
    assert!(err.contains("line"), "{err}");
}

#[test]
fn reconstruct_subcommand_recovers_mu() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = config(tmp.path(), "[]", "");
    let cfg = ExperimentConfig::load(&cfg_path).unwrap();
    let setup = prepare(&cfg).unwrap();
    let truth = realize_pair(&cfg, &setup.mesh, 2).unwrap();
    let u = solve_dirichlet(
        &assemble(setup.mesh.clone(), &truth).unwrap(),
        &setup.g,
        None,
    )
    .unwrap();
    let meas = tmp.path().join("u.txt");
    let mut f = fs::File::create(&meas).unwrap();
    write_displacement(&u, &mut f).unwrap();

    let out = tmp.path().join("rec");
    let o = lamestab(
        &[
            "reconstruct",
            cfg_path.to_str().unwrap(),
            "--measurement",
            meas.to_str().unwrap(),
            "--output-dir",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(names(&out), ["mesh.txt", "mu_rec.txt"]);
    let mut mesh_text = Vec::new();
    write_mesh(&setup.mesh, &mut mesh_text).unwrap();
    assert_eq!(fs::read(out.join("mesh.txt")).unwrap(), mesh_text);

    let rec = read_scalar(
        fs::File::open(out.join("mu_rec.txt")).unwrap(),
        Arc::clone(&setup.mesh),
    )
    .unwrap();
    assert_eq!(rec.degree(), 1);
    for (v, (r, t)) in rec
        .values()
        .iter()
        .zip(truth.mu.vertex_values())
        .enumerate()
    {
        if setup.mesh.is_boundary_node(v) {
            assert!((r - t).abs() <= 1e-12);
        }
    }
    let worst = vertex_error(&rec, &truth.mu, cfg.d).unwrap();
    assert!(worst < 0.15, "{worst}");

    let o = lamestab(
        &[
            "reconstruct",
            cfg_path.to_str().unwrap(),
            "--measurement",
            "/nonexistent/u.txt",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}
