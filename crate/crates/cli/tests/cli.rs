use std::path::PathBuf;
use std::process::{Command, Output};

fn padestep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padestep")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("padestep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Data rows after the metadata line and the header.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(2).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn meta_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    let first = text.lines().next()?;
    first.split_whitespace().filter_map(|kv| kv.strip_prefix(key)?.strip_prefix('=')).next_back()
}

#[test]
fn scheme_prints_the_tables() {
    let o = padestep(&["scheme", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("[120, 60, 12, 1]"), "{s}");
    assert!(s.contains("[120, -60, 12, -1]"));
    assert!(s.contains("4.644370709252"));
    assert!(s.contains("[240, 0, 24]"));
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["scheme", "0"],
        vec!["run", "--model", "sdof:9", "--dt", "0.1"],
        vec!["run", "--method", "heun", "--dt", "0.1"],
        vec!["run", "--dt", "-1"],
        vec!["run", "--config", "/nonexistent/run.cfg"],
        vec!["converge", "--form", "cubed"],
        vec!["converge", "--ladder", "1e-2,0.5"],
        vec!["bogus"],
    ] {
        let o = padestep(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn singular_mass_exits_with_three() {
    let zero = scratch("zero.mtx");
    std::fs::write(&zero, "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 0.0\n").unwrap();
    let z = zero.to_str().unwrap();
    let o = padestep(&["run", "--model", "files", "--mass", z, "--stiffness", z, "--dt", "0.1", "--t-sim", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_writes_one_row_per_step() {
    // Case 1 has T = 1 s: dt = T/10 over 10 periods.
    let o = padestep(&["run", "--model", "sdof:1", "--m", "4", "--steps-per-period", "10", "--t-sim", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with(&format!("# padestep {}", env!("CARGO_PKG_VERSION"))));
    assert!(meta.contains("command=run") && meta.contains("m=4"));
    assert_eq!(meta_value(&s, "resolved_method"), Some("pade4"));
    assert_eq!(lines.next(), Some("step,t,dof_id,u,v"));
    let r = rows(&s);
    assert_eq!(r.len(), 100);
    assert_eq!(r[0][0], "1");
    assert_eq!(r[99][0], "100");
    // Shortest round-trip floats parse back to the same value.
    let t: f64 = r[9][1].parse().unwrap();
    assert_eq!(format!("{t:?}"), r[9][1]);
}

#[test]
fn runs_are_deterministic() {
    let args = ["run", "--model", "random:6", "--seed", "7", "--damped", "--signal", "ricker", "--dt", "0.01", "--t-sim", "1", "--dofs", "0,3"];
    let a = padestep(&args);
    let b = padestep(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(rows(&stdout(&a)).len(), 200);
}

#[test]
fn newmark_and_first_order_pade_agree() {
    let common = ["run", "--model", "sdof:5", "--steps-per-period", "16", "--t-sim", "10"];
    let nm = padestep(&[&common[..], &["--method", "newmark"]].concat());
    let pd = padestep(&[&common[..], &["--method", "pade1"]].concat());
    let (nm, pd) = (rows(&stdout(&nm)), rows(&stdout(&pd)));
    assert_eq!(nm.len(), pd.len());
    let scale = pd.iter().map(|r| r[3].parse::<f64>().unwrap().abs()).fold(0.0, f64::max);
    for (a, b) in nm.iter().zip(&pd) {
        let (x, y): (f64, f64) = (a[3].parse().unwrap(), b[3].parse().unwrap());
        assert!((x - y).abs() <= 1e-12 * scale, "step {}: {x} vs {y}", a[0]);
    }
}

#[test]
fn flags_override_the_config_file() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "# sdof run\nmodel = sdof:2\ndt = 0.1\nmethod = newmark\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = padestep(&["run", "--config", c, "--t-sim", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(meta_value(&s, "resolved_dt"), Some("0.1"));
    assert_eq!(meta_value(&s, "method"), Some("newmark"));
    assert_eq!(meta_value(&s, "resolved_method"), Some("newmark"));
    assert_eq!(rows(&s).len(), 10);

    let o = padestep(&["run", "--dt", "0.25", "--config", c, "--t-sim", "1"]);
    let s = stdout(&o);
    assert_eq!(meta_value(&s, "resolved_dt"), Some("0.25"));
    assert_eq!(meta_value(&s, "model"), Some("sdof:2"));
    assert_eq!(rows(&s).len(), 4);
}

#[test]
fn output_file_matches_stdout() {
    let path = scratch("run.csv");
    let args = ["run", "--model", "sdof:3", "--dt", "0.05", "--t-sim", "2"];
    let to_stdout = padestep(&args);
    let o = padestep(&[&args[..], &["-o", path.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(0));
    let file = std::fs::read_to_string(&path).unwrap();
    // Only the echoed output path differs.
    assert_eq!(file.lines().skip(1).collect::<Vec<_>>(), stdout(&to_stdout).lines().skip(1).collect::<Vec<_>>());
}

#[test]
fn converge_reports_slopes() {
    let o = padestep(&["converge", "--model", "sdof:1", "--methods", "pade1,pade2", "--steps-per-period", "8,16,32,64,128,256,384"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().nth(1), Some("order,dt,epsilon_L2,slope"));
    let r = rows(&s);
    assert_eq!(r.len(), 14);
    for (order, want) in [("2", 2.0), ("4", 4.0)] {
        let slope: f64 = r.iter().find(|x| x[0] == order).unwrap()[3].parse().unwrap();
        assert!((slope - want).abs() <= 0.3, "order {order}: {slope}");
    }
}

#[test]
fn ladder_accepts_commas_or_spaces() {
    let a = padestep(&["converge", "--model", "sdof:1", "--methods", "pade1", "--ladder", "0.1,0.5,4"]);
    let b = padestep(&["converge", "--model", "sdof:1", "--methods", "pade1", "--ladder", "0.1", "0.5", "4"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(rows(&stdout(&a)), rows(&stdout(&b)));
    assert_eq!(rows(&stdout(&a)).len(), 4);
}

#[test]
fn peae_schema() {
    let o = padestep(&["peae", "--methods", "pade1,pade4", "--ratios", "0.5,0.01", "--periods", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("# padestep"));
    assert_eq!(s.lines().nth(1), Some("order,dt_over_T,AE_pct,PE_pct"));
    let r = rows(&s);
    assert_eq!(r.len(), 4);
    assert_eq!((r[0][0].as_str(), r[3][0].as_str()), ("2", "8"));
}

#[test]
fn time_reports_amortized_factorization() {
    let o = padestep(&["time", "--model", "rod:10x2", "--methods", "newmark,pade1,pade3", "--steps", "20", "--repeats", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(meta_value(&s, "factorization"), Some("amortized"));
    assert_eq!(s.lines().nth(1), Some("method,order,setup_s,per_step_s,normalized"));
    let r = rows(&s);
    assert_eq!(r.iter().map(|x| x[0].as_str()).collect::<Vec<_>>(), ["newmark", "pade1", "pade3"]);
    assert_eq!(r[0][4], "1.0");
}
