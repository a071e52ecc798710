use std::path::Path;
use std::process::{Command, Output};

fn pqldpc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqldpc")).current_dir(dir).args(args).output().expect("spawn pqldpc")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_prints_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = stdout(&pqldpc(d, &["build", "--family", "k8-288", "--lx", "12", "--ly", "12", "-o", "a.toml"]));
    assert_eq!(out.trim(), "[[288,8,?]]");
    let out = stdout(&pqldpc(d, &["build", "--f", "1+x+x^-1*y^2", "--g", "1+y+x^-2*y^-1", "--lx", "10", "--ly", "10", "-o", "b.toml"]));
    assert_eq!(out.trim(), "[[200,8,?]]");
    let out = stdout(&pqldpc(d, &["build", "--family", "k6-88", "--lx", "6", "--ly", "8", "-o", "c.toml"]));
    assert_eq!(out.trim(), "[[88,6,?]]");
}

#[test]
fn distance_updates_manifest_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout(&pqldpc(d, &["build", "--family", "k6-88", "--lx", "6", "--ly", "8", "-o", "a.toml"]));
    let out = stdout(&pqldpc(d, &["distance", "-m", "a.toml", "--exact", "--dmax", "6"]));
    assert!(out.starts_with("[[88,6,6]] (exact"), "{out}");
    let text = std::fs::read_to_string(d.join("a.toml")).unwrap();
    assert!(text.contains("[certificate]"));
    assert!(stdout(&pqldpc(d, &["verify", "-m", "a.toml"])).starts_with("ok: [[88,6,6]] exact"));
}

#[test]
fn isd_distance_is_an_upper_bound() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout(&pqldpc(d, &["build", "--family", "k8-288", "--lx", "12", "--ly", "12", "-o", "a.toml"]));
    let out = stdout(&pqldpc(d, &["distance", "-m", "a.toml", "--isd", "--trials", "2000", "--seed", "7"]));
    assert!(out.starts_with("[[288,8,≤12]] (upper_bound"), "{out}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(pqldpc(d, &["distance", "-m", "missing.toml"]).status.code(), Some(2));
    assert_eq!(pqldpc(d, &["build", "--f", "1+x^", "--g", "1+y", "--lx", "4", "--ly", "4"]).status.code(), Some(2));
    assert_eq!(pqldpc(d, &["build", "--family", "nope", "--lx", "4", "--ly", "4"]).status.code(), Some(2));

    stdout(&pqldpc(d, &["build", "--family", "k8-288", "--lx", "4", "--ly", "4", "-o", "a.toml"]));
    stdout(&pqldpc(d, &["distance", "-m", "a.toml"]));
    let good = std::fs::read_to_string(d.join("a.toml")).unwrap();
    assert!(good.contains("support = [12, 20]"), "{good}");

    // A certificate that is not a logical operator.
    std::fs::write(d.join("b.toml"), good.replace("support = [12, 20]", "support = [12, 21]")).unwrap();
    assert_eq!(pqldpc(d, &["verify", "-m", "b.toml"]).status.code(), Some(1));
    // A wrong logical dimension.
    std::fs::write(d.join("c.toml"), good.replace("k = 8", "k = 7")).unwrap();
    assert_eq!(pqldpc(d, &["verify", "-m", "c.toml"]).status.code(), Some(1));
    // Anticommuting checks.
    std::fs::write(d.join("e.toml"), good.replace("hx = [[0, 18]", "hx = [[0, 17]")).unwrap();
    assert_eq!(pqldpc(d, &["verify", "-m", "e.toml"]).status.code(), Some(1));
}

#[test]
fn export_import_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout(&pqldpc(d, &["build", "--family", "k7-131", "--lx", "7", "--ly", "11", "-o", "a.toml"]));
    for fmt in ["alist", "mtx"] {
        stdout(&pqldpc(d, &["export", "-m", "a.toml", "--format", fmt, "-o", "x"]));
        let hx = format!("x.hx.{fmt}");
        let hz = format!("x.hz.{fmt}");
        let out = stdout(&pqldpc(d, &["import", "--hx", &hx, "--hz", &hz, "--labels", "x.labels", "--format", fmt, "-o", "b.toml"]));
        assert_eq!(out.trim(), "[[131,7,?]]");
        stdout(&pqldpc(d, &["export", "-m", "b.toml", "--format", fmt, "-o", "y"]));
        for part in [hx.as_str(), hz.as_str(), "x.labels"] {
            let again = part.replacen('x', "y", 1);
            assert_eq!(std::fs::read(d.join(part)).unwrap(), std::fs::read(d.join(&again)).unwrap(), "{part}");
        }
        let a: toml::Value = toml::from_str(&std::fs::read_to_string(d.join("a.toml")).unwrap()).unwrap();
        let b: toml::Value = toml::from_str(&std::fs::read_to_string(d.join("b.toml")).unwrap()).unwrap();
        assert_eq!(a["code"], b["code"]);
    }
}

#[test]
fn families_are_listed_as_toml() {
    let dir = tempfile::tempdir().unwrap();
    let v: toml::Value = toml::from_str(&stdout(&pqldpc(dir.path(), &["families"]))).unwrap();
    let fams = v["family"].as_array().unwrap();
    assert_eq!(fams.len(), 9);
    let ks: Vec<i64> = fams.iter().map(|f| f["k"].as_integer().unwrap()).collect();
    assert_eq!(ks, [6, 7, 8, 8, 9, 10, 11, 12, 13]);
}

#[test]
fn fractal_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = stdout(&pqldpc(d, &["fractal", "--family", "k8-288", "--sizes", "6,8,10,12,14", "--svg-dir", "svg"]));
    assert_eq!(out.lines().last().unwrap(), "4,6,9,12,15");
    assert!(d.join("svg/fractal_L14.svg").exists());

    stdout(&pqldpc(d, &["build", "--family", "k6-88", "--lx", "6", "--ly", "8", "-o", "a.toml"]));
    stdout(&pqldpc(d, &["distance", "-m", "a.toml"]));
    stdout(&pqldpc(d, &["render", "-m", "a.toml", "-o", "a.svg", "--certificate"]));
    let svg = std::fs::read_to_string(d.join("a.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains(r#"stroke-width="6""#));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout(&pqldpc(d, &["sweep", "--family", "k8-288", "--lx", "5..7", "--ly", "5..7", "--diagonal", "--exact-max-n", "100", "-o", "s.csv"]));
    let csv = std::fs::read_to_string(d.join("s.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "family,a,b,c,d,Lx,Ly,n,k,d,certainty,metric");
    assert_eq!(&lines[1..], ["k8-288,,,,,5,5,50,8,3,exact,1.4400", "k8-288,,,,,6,6,72,8,4,exact,1.7778", "k8-288,,,,,7,7,98,8,5,exact,2.0408"]);
}

#[test]
fn graft_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout(&pqldpc(d, &["build", "--family", "k6-88", "--lx", "6", "--ly", "8", "-o", "a.toml"]));
    let out1 = stdout(&pqldpc(d, &["--threads", "1", "graft", "-m", "a.toml", "-o", "g1.toml", "--trials", "6", "--seed", "1"]));
    let out3 = stdout(&pqldpc(d, &["--threads", "3", "graft", "-m", "a.toml", "-o", "g3.toml", "--trials", "6", "--seed", "1"]));
    assert_eq!(out1, out3);
    assert_eq!(std::fs::read(d.join("g1.toml")).unwrap(), std::fs::read(d.join("g3.toml")).unwrap());
    assert!(stdout(&pqldpc(d, &["verify", "-m", "g1.toml"])).starts_with("ok:"));
    let g: toml::Value = toml::from_str(&std::fs::read_to_string(d.join("g1.toml")).unwrap()).unwrap();
    assert_eq!(g["graft"]["input_n"].as_integer(), Some(88));
    assert!(g["code"]["n"].as_integer().unwrap() < 88);
}

#[test]
fn search_with_checkpoint_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["search", "--k", "1,2", "--d", "2..3", "--exps", "-1..1", "--lx", "3..6", "--ly", "3..6", "--max-n", "60", "--checkpoint", "ck", "-o", "rows.csv"];
    let first = stdout(&pqldpc(d, &args));
    let rows1 = std::fs::read_to_string(d.join("rows.csv")).unwrap();
    let second = stdout(&pqldpc(d, &args));
    assert_eq!(first, second);
    assert_eq!(rows1, std::fs::read_to_string(d.join("rows.csv")).unwrap());
    assert!(first.starts_with("k\\d\t2\t3\n"), "{first}");
}
