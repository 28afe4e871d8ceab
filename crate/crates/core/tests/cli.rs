use std::path::Path;

use serde_json::Value;

use idemsym::cli::run;
use idemsym::codec::{self, MatrixFile};
use idemsym::linalg::{from_real_rows, random_unitary, ComplexMatrix};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn idemsym(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("idemsym").chain(args.iter().copied()), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", o.stdout))
}

fn write(dir: &Path, name: &str, m: ComplexMatrix) -> String {
    let path = dir.join(name);
    codec::write(&path, &MatrixFile::new(m)).unwrap();
    path.display().to_string()
}

fn s(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn unbalanced_instance_exits_2_with_kernel_dims() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "P.json", from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]));
    for cmd in ["gamma", "delta"] {
        let o = idemsym(&[cmd, "-i", &p, "--json"]);
        assert_eq!(o.code, 2, "{cmd}: {}", o.stderr);
        let report = json(&o);
        assert_eq!(report["findings"]["kernel_dims"]["d_plus"], 2);
        assert_eq!(report["findings"]["kernel_dims"]["d_minus"], 1);
        assert_eq!(report["pass"], false);
    }
    let j = dir.path().join("J.json");
    assert_eq!(idemsym(&["gamma", "-i", &p, "-o", &s(&j)]).code, 2);
    assert!(!j.exists());
}

#[test]
fn check_reports_memberships_of_delta_element() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "P.json", from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]));
    let i = idemsym::linalg::c64::new(0.0, 1.0);
    let zero = idemsym::linalg::c64::new(0.0, 0.0);
    let j = write(dir.path(), "J.json", idemsym::linalg::from_rows(&[vec![zero, i], vec![-i, zero]]));
    let o = idemsym(&["check", "-i", &p, "-j", &j, "--json"]);
    assert_eq!(o.code, 0);
    let r = json(&o);
    assert_eq!(r["findings"]["in_delta"], true);
    assert_eq!(r["findings"]["in_gamma"], false);
    assert_eq!(r["findings"]["positive_pair"], false);
}

#[test]
fn explicit_parameter_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "P.json", from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]));
    let u = write(dir.path(), "U.json", from_real_rows(&[&[-1.0]]));
    let out = dir.path().join("J.json");
    assert_eq!(idemsym(&["gamma", "-i", &p, "-u", &u, "-o", &s(&out)]).code, 0);
    let j = codec::read(&out).unwrap().matrix;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let expected = from_real_rows(&[&[h, -h], &[-h, -h]]);
    assert!(idemsym::linalg::dist(&j, &expected) < 1e-12);

    let bad = write(dir.path(), "bad.json", from_real_rows(&[&[2.0]]));
    let o = idemsym(&["gamma", "-i", &p, "-u", &bad, "-o", &s(&out)]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.starts_with("error:"));
}

#[test]
fn table_output_lists_checks() {
    let dir = tempfile::tempdir().unwrap();
    let p = s(&dir.path().join("P.json"));
    assert_eq!(idemsym(&["gen", "--n", "2", "--r", "1", "--seed", "7", "-o", &p]).code, 0);
    let o = idemsym(&["verify", "-i", &p]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("halmos_is_symmetry"));
    assert!(!o.stdout.contains("FAIL"));
}

#[test]
fn gen_to_stdout_is_a_matrix_file() {
    let o = idemsym(&["gen", "--n", "3", "--r", "1", "--seed", "9"]);
    assert_eq!(o.code, 0);
    let file = codec::from_str(&o.stdout).unwrap();
    assert_eq!(file.seed, Some(9));
    assert_eq!(file.matrix.nrows(), 3);
}

#[test]
fn intertwine_matched_and_mismatched() {
    let dir = tempfile::tempdir().unwrap();
    let p0 = from_real_rows(&[&[1.0, 2.0], &[0.0, 0.0]]);
    let u = random_unitary(2, 4);
    let v = random_unitary(2, 5);
    let q = &u * &p0 * idemsym::linalg::adjoint(&u);
    let q2 = &v * &p0 * idemsym::linalg::adjoint(&v);
    let (p, uf, qf, q2f) = (
        write(dir.path(), "P.json", p0),
        write(dir.path(), "U.json", u),
        write(dir.path(), "Q.json", q),
        write(dir.path(), "Q2.json", q2),
    );
    let o = idemsym(&["intertwine", "-u", &uf, "-p", &p, "-q", &qf, "--json"]);
    assert_eq!(o.code, 0);
    assert_eq!(json(&o)["findings"]["conjugation"], true);
    let o = idemsym(&["intertwine", "-u", &uf, "-p", &p, "-q", &q2f, "--json"]);
    assert_eq!(o.code, 0, "agreeing conditions pass even when all are false");
    let r = json(&o);
    assert_eq!(r["findings"]["conjugation"], false);
    assert_eq!(r["findings"]["reflection_and_skew_part"], false);
}

#[test]
fn decompose_rejects_non_member() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "P.json", from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]));
    let j = write(dir.path(), "J.json", from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0]]));
    let o = idemsym(&["decompose", "-i", &p, "-j", &j, "-o", &s(&dir.path().join("out"))]);
    assert_eq!(o.code, 2, "{}", o.stderr);
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = s(&dir.path().join("missing.json"));
    let o = idemsym(&["verify", "-i", &missing]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("missing.json"));

    let malformed = dir.path().join("bad.json");
    std::fs::write(&malformed, r#"{"rows":1,"cols":1,"data":[[[1]]]}"#).unwrap();
    let o = idemsym(&["verify", "-i", &s(&malformed)]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("data[0][0]"), "{}", o.stderr);

    let not_idem = write(dir.path(), "N.json", from_real_rows(&[&[2.0]]));
    assert_eq!(idemsym(&["verify", "-i", &not_idem]).code, 1);

    assert_eq!(idemsym(&["verify", "-i", &not_idem, "--tol-psd", "0.5"]).code, 1);
    assert_eq!(idemsym(&["frobnicate"]).code, 1);
    assert_eq!(idemsym(&["--help"]).code, 0);
}
