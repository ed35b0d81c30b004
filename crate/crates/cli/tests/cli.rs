use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use approx::assert_abs_diff_eq;
use qwalk::io::tables::{read_distributions, variance_from_table, StepTable};
use qwalk::io::unitary::read_unitary;
use qwalk::{load_fixture_schedule, Fixture};
use tempfile::TempDir;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = qwalk(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str], code: i32) -> String {
    let out = qwalk(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stderr).unwrap()
}

fn manifest(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn s(p: &Path) -> String {
    p.display().to_string()
}

fn walk_manifest(dir: &Path, sites: i64, steps: i64) -> String {
    manifest(
        dir,
        &format!("walk_{sites}_{steps}.json"),
        &format!(r#"{{ "walk": {{ "sites": {sites}, "steps": {steps} }} }}"#),
    )
}

fn noisy_manifest(dir: &Path, sites: usize, steps: usize, preset: &str, sorted: bool, r: usize) -> String {
    manifest(
        dir,
        &format!("noisy_{sites}_{steps}_{preset}_{sorted}_{r}.json"),
        &format!(
            r#"{{
  "walk": {{ "sites": {sites}, "steps": {steps} }},
  "noise": {{ "kind": "Dynamic", "preset": "{preset}", "sorted": {sorted} }},
  "ensemble": {{ "configurations": {r}, "seed": 11 }}
}}"#
        ),
    )
}

fn variance_of(path: &Path) -> qwalk::VarianceSeries {
    let label = s(path);
    variance_from_table(&StepTable::read(path).unwrap(), None, &label).unwrap()
}

#[test]
fn noise_free_simulation_rows_are_normalized() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok(&["simulate", "--manifest", &walk_manifest(tmp.path(), 8, 20), "--out", &s(&out)]);
    let dists = read_distributions(&out.join("distributions.csv")).unwrap();
    assert_eq!(dists.len(), 21);
    let raw = StepTable::read(&out.join("distributions.csv")).unwrap();
    for row in &raw.rows {
        assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
    }
    assert_eq!(variance_of(&out.join("variance.csv")).len(), 21);
    assert!(out.join("schedule.txt").exists());
}

#[test]
fn zero_steps_gives_the_averaged_injections() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok(&["simulate", "--manifest", &walk_manifest(tmp.path(), 8, 0), "--out", &s(&out)]);
    let raw = StepTable::read(&out.join("distributions.csv")).unwrap();
    assert_eq!(raw.rows.len(), 1);
    assert_eq!(raw.rows[0], vec![0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0]);
    assert_eq!(fs::read_to_string(out.join("schedule.txt")).unwrap(), "");
}

#[test]
fn sorted_strong_fixture_variance_minimum_at_step_twelve() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok(&["simulate", "--fixture", "SortedStrong", "--out", &s(&out)]);
    let series = variance_of(&out.join("variance.csv"));
    assert_eq!(series.argmin_in(1, 20), Some(12));
}

#[test]
fn simulated_files_round_trip() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok(&["simulate", "--fixture", "UnsortedStrong", "--out", &s(&out)]);
    let path = out.join("distributions.csv");
    let text = fs::read_to_string(&path).unwrap();
    let reparsed = StepTable::from_csv(&text, "x").unwrap();
    assert_eq!(reparsed.to_csv(), text);
    let schedule = fs::read_to_string(out.join("schedule.txt")).unwrap();
    assert_eq!(schedule, load_fixture_schedule(Fixture::UnsortedStrong).to_text());
    let resolved = out.join("manifest.json");
    let again = tmp.path().join("again");
    ok(&["simulate", "--manifest", &s(&resolved), "--fixture", "UnsortedStrong", "--out", &s(&again)]);
    assert_eq!(fs::read(path).unwrap(), fs::read(again.join("distributions.csv")).unwrap());
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let m = noisy_manifest(tmp.path(), 8, 30, "Strong", true, 12);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&["simulate", "--manifest", &m, "--out", &s(&dir.join("sim"))]);
        ok(&["ensemble", "--manifest", &m, "--out", &s(&dir.join("ens"))]);
    }
    for file in ["sim/distributions.csv", "sim/variance.csv", "sim/schedule.txt"]
        .iter()
        .chain(&["ens/avg_distributions.csv", "ens/variance_bands.csv", "ens/perconfig_variance.csv"])
    {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    let c = tmp.path().join("c");
    ok(&["simulate", "--manifest", &m, "--seed", "12", "--out", &s(&c)]);
    assert_ne!(
        fs::read(a.join("sim/schedule.txt")).unwrap(),
        fs::read(c.join("schedule.txt")).unwrap()
    );
}

#[test]
fn single_configuration_has_no_band() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("ens");
    let m = noisy_manifest(tmp.path(), 8, 40, "Strong", false, 1);
    ok(&["ensemble", "--manifest", &m, "--out", &s(&out)]);
    let bands = StepTable::read(&out.join("variance_bands.csv")).unwrap();
    assert_eq!(bands.columns, ["central_variance", "mean_of_variances", "std_band"]);
    assert!(bands.column("std_band").unwrap().iter().all(|&b| b == 0.0));
    let per = StepTable::read(&out.join("perconfig_variance.csv")).unwrap();
    assert_eq!(per.columns, ["c1"]);
    assert_eq!(per.column("c1").unwrap(), bands.column("central_variance").unwrap());
}

#[test]
fn long_time_noisy_spread_is_below_ballistic() {
    let tmp = TempDir::new().unwrap();
    let (ens, free) = (tmp.path().join("ens"), tmp.path().join("free"));
    ok(&["ensemble", "--manifest", &noisy_manifest(tmp.path(), 200, 100, "Strong", false, 100), "--out", &s(&ens)]);
    ok(&["simulate", "--manifest", &walk_manifest(tmp.path(), 200, 100), "--out", &s(&free)]);
    let noisy = variance_of(&ens.join("variance_bands.csv")).at(100).unwrap();
    let ballistic = variance_of(&free.join("variance.csv")).at(100).unwrap();
    assert!(noisy < ballistic, "{noisy} vs {ballistic}");
}

#[test]
fn confined_strong_unsorted_ensemble_saturates() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("ens");
    ok(&["ensemble", "--manifest", &noisy_manifest(tmp.path(), 8, 100, "Strong", false, 100), "--out", &s(&out)]);
    let series = variance_of(&out.join("variance_bands.csv"));
    let window: Vec<f64> = (10..=100).map(|n| series.at(n).unwrap()).collect();
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    assert!(window.iter().all(|v| (v / mean - 1.0).abs() <= 0.25));
}

#[test]
fn ensemble_needs_dynamic_noise() {
    let tmp = TempDir::new().unwrap();
    let err = fails(&["ensemble", "--manifest", &walk_manifest(tmp.path(), 8, 5), "--out", &s(tmp.path())], 2);
    assert!(err.contains("Dynamic"), "{err}");
}

fn write_series(dir: &Path, values: &[f64]) -> PathBuf {
    let mut t = StepTable::new(vec!["variance".into()]);
    for (n, &v) in values.iter().enumerate() {
        t.push(n, vec![v]);
    }
    let path = dir.join("series.csv");
    t.write(&path).unwrap();
    path
}

#[test]
fn peaks_of_a_staircase() {
    let tmp = TempDir::new().unwrap();
    let input = write_series(tmp.path(), &[0.0, 1.0, 0.0, 2.0, 0.0, 3.0, 0.0]);
    let out = tmp.path().join("peaks");
    ok(&["peaks", &s(&input), "--out", &s(&out)]);
    let peaks = StepTable::read(&out.join("peaks.csv")).unwrap();
    assert_eq!(peaks.steps, vec![1, 3, 5]);
    assert_eq!(peaks.column("order").unwrap(), vec![1.0, 2.0, 3.0]);
    let fit = fs::read_to_string(out.join("peak_fit.csv")).unwrap();
    let values: Vec<f64> = fit.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_abs_diff_eq!(values[0], 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(values[1], -1.0, epsilon = 1e-12);
}

#[test]
fn monotone_series_has_no_peaks_and_warns() {
    let tmp = TempDir::new().unwrap();
    let input = write_series(tmp.path(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
    let out = tmp.path().join("peaks");
    let result = qwalk(&["peaks", &s(&input), "--out", &s(&out)]);
    assert!(result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("need 2 to fit"));
    assert!(StepTable::read(&out.join("peaks.csv")).unwrap().steps.is_empty());
    assert!(!out.join("peak_fit.csv").exists());
}

fn peak_slope(dir: &Path) -> f64 {
    let fit = fs::read_to_string(dir.join("peak_fit.csv")).unwrap();
    fit.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap()
}

#[test]
fn sorted_fixture_peaks_spread_faster_than_noise_free() {
    let tmp = TempDir::new().unwrap();
    let (free, sorted) = (tmp.path().join("free"), tmp.path().join("sorted"));
    ok(&["simulate", "--manifest", &walk_manifest(tmp.path(), 8, 20), "--out", &s(&free)]);
    ok(&["simulate", "--fixture", "SortedWeak", "--out", &s(&sorted)]);
    for dir in [&free, &sorted] {
        ok(&["peaks", &s(&dir.join("variance.csv")), "--out", &s(dir)]);
    }
    let (a, b) = (peak_slope(&free), peak_slope(&sorted));
    assert!(a < b, "noise-free {a} vs sorted {b}");
}

fn write_rows(path: &Path, rows: &[Vec<f64>]) {
    let mut t = StepTable::new((1..=rows[0].len()).map(|i| format!("p{i}")).collect());
    for (n, r) in rows.iter().enumerate() {
        t.push(n, r.clone());
    }
    t.write(path).unwrap();
}

fn tvds(dir: &Path) -> Vec<f64> {
    StepTable::read(&dir.join("tvd_per_step.csv")).unwrap().column("tvd").unwrap()
}

#[test]
fn file_compared_with_itself_is_zero() {
    let tmp = TempDir::new().unwrap();
    let run = tmp.path().join("run");
    ok(&["simulate", "--fixture", "SortedStrong", "--out", &s(&run)]);
    let d = s(&run.join("distributions.csv"));
    let summary = ok(&["compare", &d, &d, "--out", &s(&run)]);
    assert!(summary.contains("max tvd 0.000000000"), "{summary}");
    assert!(tvds(&run).iter().all(|&x| x == 0.0));
}

#[test]
fn disjoint_deltas_are_one_apart() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a.csv"), tmp.path().join("b.csv"));
    write_rows(&a, &[vec![1.0, 0.0, 0.0, 0.0]]);
    write_rows(&b, &[vec![0.0, 1.0, 0.0, 0.0]]);
    ok(&["compare", &s(&a), &s(&b), "--out", &s(tmp.path())]);
    assert_eq!(tvds(tmp.path()), vec![1.0]);
}

#[test]
fn perturbed_run_is_one_percent_away() {
    let tmp = TempDir::new().unwrap();
    let run = tmp.path().join("run");
    ok(&["simulate", "--manifest", &walk_manifest(tmp.path(), 8, 20), "--out", &s(&run)]);
    let sim = run.join("distributions.csv");
    let mut rows = StepTable::read(&sim).unwrap().rows;
    for row in &mut rows {
        // the injection columns hold at least 0.01 at step 0 only, so pick
        // the largest entry of each row for the decrease
        let big = (0..row.len()).max_by(|&i, &j| row[i].total_cmp(&row[j])).unwrap();
        let other = (big + 1) % row.len();
        row[big] -= 0.01;
        row[other] += 0.01;
    }
    let measured = tmp.path().join("measured.csv");
    write_rows(&measured, &rows);
    ok(&["compare", &s(&measured), &s(&sim), "--out", &s(tmp.path())]);
    let t = tvds(tmp.path());
    assert_eq!(t.len(), 21);
    for x in t {
        assert_abs_diff_eq!(x, 0.01, epsilon = 1e-12);
    }
}

#[test]
fn compare_rejects_mismatched_inputs() {
    let tmp = TempDir::new().unwrap();
    let (a, b, c) = (tmp.path().join("a.csv"), tmp.path().join("b.csv"), tmp.path().join("c.csv"));
    write_rows(&a, &[vec![0.5, 0.5], vec![0.5, 0.5]]);
    write_rows(&b, &[vec![0.5, 0.5]]);
    write_rows(&c, &[vec![0.25, 0.25, 0.25, 0.25], vec![0.25, 0.25, 0.25, 0.25]]);
    let err = fails(&["compare", &s(&a), &s(&b), "--out", &s(tmp.path())], 2);
    assert!(err.contains("step 1"), "{err}");
    let err = fails(&["compare", &s(&a), &s(&c), "--out", &s(tmp.path())], 2);
    assert!(err.contains("column count"), "{err}");
}

#[test]
fn zero_step_unitary_is_the_identity() {
    let tmp = TempDir::new().unwrap();
    ok(&["unitary", "--manifest", &walk_manifest(tmp.path(), 8, 0), "--out", &s(tmp.path())]);
    let path = tmp.path().join("total_unitary.txt");
    let u = read_unitary(&path).unwrap();
    assert_eq!(u.nrows(), 20);
    for i in 0..20 {
        for j in 0..20 {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert_eq!(u[(i, j)], qwalk::c64::new(expected, 0.0));
        }
    }
    ok(&["unitary", "--check", &s(&path)]);
}

#[test]
fn unitary_reproduces_simulated_distributions() {
    let tmp = TempDir::new().unwrap();
    ok(&["unitary", "--fixture", "UnsortedStrong", "--out", &s(tmp.path())]);
    ok(&["simulate", "--fixture", "UnsortedStrong", "--out", &s(tmp.path())]);
    let path = tmp.path().join("total_unitary.txt");
    ok(&["unitary", "--check", &s(&path)]);
    let u = read_unitary(&path).unwrap();
    let last = read_distributions(&tmp.path().join("distributions.csv")).unwrap().pop().unwrap();
    for (i, p) in last.probabilities().iter().enumerate() {
        let q = 0.5 * (u[(i, 3)].norm_sqr() + u[(i, 4)].norm_sqr());
        assert_abs_diff_eq!(*p, q, epsilon = 1e-9);
    }
}

#[test]
fn non_unitary_file_is_a_numerical_failure() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("bad.txt");
    fs::write(&path, "1+0i,0+0i\n0+0i,2+0i\n").unwrap();
    let err = fails(&["unitary", "--check", &s(&path)], 3);
    assert!(err.contains("not unitary"), "{err}");
}

#[test]
fn phases_export_fixture_and_draws() {
    let tmp = TempDir::new().unwrap();
    ok(&["phases", "--fixture", "SortedWeak", "--out", &s(tmp.path())]);
    let text = fs::read_to_string(tmp.path().join("schedule.txt")).unwrap();
    assert_eq!(text.lines().count(), 20);
    assert!(text.starts_with("1,-3.870000000e-1\n"));

    let m = noisy_manifest(tmp.path(), 8, 50, "Weak", true, 4);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["phases", "--manifest", &m, "--config-index", "3", "--out", &s(&a)]);
    ok(&["phases", "--manifest", &m, "--config-index", "3", "--out", &s(&b)]);
    let first = fs::read_to_string(a.join("schedule.txt")).unwrap();
    assert_eq!(first, fs::read_to_string(b.join("schedule.txt")).unwrap());
    let phases: Vec<f64> = first.lines().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(phases.len(), 50);
    assert!(phases.windows(2).all(|w| w[0] <= w[1]));
    assert!(phases.iter().all(|p| p.abs() <= std::f64::consts::FRAC_PI_8));
}

#[test]
fn schema_errors_are_distinct_and_located() {
    let tmp = TempDir::new().unwrap();
    let odd = manifest(tmp.path(), "odd.json", "{\n  \"walk\": {\n    \"sites\": 7,\n    \"steps\": 4\n  }\n}\n");
    let negative = manifest(tmp.path(), "neg.json", "{\n  \"walk\": {\n    \"sites\": 8,\n    \"steps\": -1\n  }\n}\n");
    let inverted = manifest(
        tmp.path(),
        "inv.json",
        "{\n  \"walk\": { \"sites\": 8, \"steps\": 4 },\n  \"noise\": {\n    \"kind\": \"Dynamic\",\n    \"interval\": [1.0, -1.0]\n  }\n}\n",
    );
    let unknown = manifest(tmp.path(), "unk.json", "{\n  \"walk\": { \"sites\": 8, \"steps\": 4, \"colour\": 1 }\n}\n");
    let out = s(&tmp.path().join("never"));
    let e1 = fails(&["simulate", "--manifest", &odd, "--out", &out], 2);
    let e2 = fails(&["simulate", "--manifest", &negative, "--out", &out], 2);
    let e3 = fails(&["simulate", "--manifest", &inverted, "--out", &out], 2);
    let e4 = fails(&["simulate", "--manifest", &unknown, "--out", &out], 2);
    assert!(e1.contains("odd.json:3:") && e1.contains("even"), "{e1}");
    assert!(e2.contains("neg.json:4:") && e2.contains("non-negative"), "{e2}");
    assert!(e3.contains("inv.json:5:") && e3.contains("inverted"), "{e3}");
    assert!(e4.contains("unk.json:2:") && e4.contains("colour"), "{e4}");
    assert!(!Path::new(&out).exists());
}

#[test]
fn file_problems_exit_with_four() {
    let tmp = TempDir::new().unwrap();
    fails(&["simulate", "--manifest", &s(&tmp.path().join("missing.json"))], 4);
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let m = walk_manifest(tmp.path(), 8, 3);
    fails(&["simulate", "--manifest", &m, "--out", &s(&blocker.join("sub"))], 4);
}

#[test]
fn needs_a_manifest_or_fixture() {
    let err = fails(&["simulate"], 2);
    assert!(err.contains("--manifest or --fixture"), "{err}");
    fails(&["simulate", "--fixture", "Nonsense"], 2);
}

#[test]
fn fixture_shorter_than_the_walk_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let err = fails(&["simulate", "--manifest", &walk_manifest(tmp.path(), 8, 30), "--fixture", "SortedWeak"], 2);
    assert!(err.contains("20 steps"), "{err}");
}
