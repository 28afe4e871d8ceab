use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use idemsym_ffi::*;

const R2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn matrix(rows: usize, cols: usize, data: &[f64]) -> *mut IdsMatrix {
    assert_eq!(data.len(), 2 * rows * cols);
    let m = unsafe { ids_matrix_new(rows, cols, data.as_ptr()) };
    assert!(!m.is_null());
    m
}

fn read(m: *const IdsMatrix) -> Vec<f64> {
    let len = unsafe { 2 * ids_matrix_rows(m) * ids_matrix_cols(m) };
    let mut buf = vec![0.0; len];
    assert_eq!(unsafe { ids_matrix_copy_data(m, buf.as_mut_ptr(), len) }, IdsStatus::Ok);
    buf
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn last_error() -> String {
    let p = ids_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

/// `[[1, 1], [0, 0]]`.
fn oblique() -> *mut IdsMatrix {
    matrix(2, 2, &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
}

#[test]
fn matrix_handles_roundtrip_entries() {
    let data = [1.0, 2.0, 3.0, -4.0, 0.5, 0.0];
    let m = matrix(1, 3, &data);
    unsafe {
        assert_eq!((ids_matrix_rows(m), ids_matrix_cols(m)), (1, 3));
        assert_eq!(read(m), data);
        let mut small = [0.0; 2];
        assert_eq!(ids_matrix_copy_data(m, small.as_mut_ptr(), 2), IdsStatus::InvalidArgument);
        ids_matrix_free(m);
        ids_matrix_free(ptr::null_mut());
        assert_eq!(ids_matrix_rows(ptr::null()), 0);
        let z = ids_matrix_new(2, 2, ptr::null());
        assert_eq!(read(z), vec![0.0; 8]);
        ids_matrix_free(z);
    }
}

#[test]
fn non_finite_data_is_rejected() {
    let m = unsafe { ids_matrix_new(1, 1, [f64::NAN, 0.0].as_ptr()) };
    assert!(m.is_null());
    assert!(last_error().contains("non-finite"));
}

#[test]
fn canonical_constructions_on_oblique_fixture() {
    let p = oblique();
    unsafe {
        assert_eq!(ids_validate_idempotent(p, ptr::null()), IdsStatus::Ok);
        let mut exists = false;
        assert_eq!(ids_gamma_exists(p, ptr::null(), &mut exists), IdsStatus::Ok);
        assert!(exists);

        let mut j = ptr::null_mut();
        assert_eq!(ids_canonical_gamma(p, ptr::null(), &mut j), IdsStatus::Ok);
        assert!(close(&read(j), &[-R2, 0.0, R2, 0.0, R2, 0.0, R2, 0.0], 1e-12));
        ids_matrix_free(j);

        let mut d = ptr::null_mut();
        assert_eq!(ids_canonical_delta(p, ptr::null(), &mut d), IdsStatus::Ok);
        assert!(close(&read(d), &[0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0], 1e-12));

        let mut m = IdsMembership::default();
        assert_eq!(ids_membership(p, d, ptr::null(), &mut m), IdsStatus::Ok);
        assert!(m.is_symmetry && m.in_delta && !m.in_gamma && !m.positive);

        let (mut j1, mut j2, mut residual) = (ptr::null_mut(), ptr::null_mut(), f64::NAN);
        assert_eq!(
            ids_delta_decompose(p, d, ptr::null(), &mut j1, &mut j2, &mut residual),
            IdsStatus::Ok
        );
        assert!(residual < 1e-12);
        assert!(close(&read(j1), &[-R2, 0.0, R2, 0.0, R2, 0.0, R2, 0.0], 1e-12));
        assert!(close(&read(j2), &[R2, 0.0, R2, 0.0, R2, 0.0, -R2, 0.0], 1e-12));

        let mut h = ptr::null_mut();
        assert_eq!(ids_halmos_symmetry(p, ptr::null(), &mut h), IdsStatus::Ok);
        assert!(close(&read(h), &read(j2), 1e-12));
        let mut mp = ptr::null_mut();
        assert_eq!(ids_min_positive_symmetry(p, ptr::null(), &mut mp), IdsStatus::Ok);
        assert!(close(&read(mp), &read(j2), 1e-12));

        // J2 is positive for P but not in the delta family
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            ids_delta_decompose(p, j2, ptr::null(), &mut a, &mut b, ptr::null_mut()),
            IdsStatus::NotMember
        );
        assert!(a.is_null() && b.is_null());

        for m in [d, j1, j2, h, mp, p] {
            ids_matrix_free(m);
        }
    }
}

#[test]
fn unbalanced_instance_reports_not_exists() {
    let p = matrix(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    unsafe {
        let (mut dp, mut dm) = (0, 0);
        assert_eq!(ids_kernel_dims(p, ptr::null(), &mut dp, &mut dm), IdsStatus::Ok);
        assert_eq!((dp, dm), (2, 1));
        let mut j = ptr::null_mut();
        assert_eq!(ids_canonical_gamma(p, ptr::null(), &mut j), IdsStatus::NotExists);
        assert!(j.is_null());
        assert!(last_error().contains("no such symmetry"));
        ids_matrix_free(p);
    }
}

#[test]
fn invalid_inputs_map_to_status_codes() {
    unsafe {
        let not_idem = matrix(2, 2, &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(ids_validate_idempotent(not_idem, ptr::null()), IdsStatus::NotIdempotent);
        let rect = ids_matrix_new(2, 3, ptr::null());
        assert_eq!(ids_validate_idempotent(rect, ptr::null()), IdsStatus::NotSquare);
        assert_eq!(ids_validate_idempotent(ptr::null(), ptr::null()), IdsStatus::NullPointer);
        let bad_tol = IdsTolerance {
            psd_tol: 1.0,
            ..ids_tolerance_default()
        };
        assert_eq!(ids_validate_idempotent(not_idem, &bad_tol), IdsStatus::InvalidArgument);
        let mut out = ptr::null_mut();
        assert_eq!(ids_random_idempotent(2, 3, 1.0, 0, &mut out), IdsStatus::InvalidArgument);
        ids_matrix_free(not_idem);
        ids_matrix_free(rect);
    }
}

#[test]
fn random_idempotent_is_accepted() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(ids_random_idempotent(6, 3, 10.0, 7, &mut p), IdsStatus::Ok);
        assert_eq!(ids_validate_idempotent(p, ptr::null()), IdsStatus::Ok);
        let mut j = ptr::null_mut();
        assert_eq!(ids_canonical_gamma(p, ptr::null(), &mut j), IdsStatus::Ok);
        let mut m = IdsMembership::default();
        assert_eq!(ids_membership(p, j, ptr::null(), &mut m), IdsStatus::Ok);
        assert!(m.in_gamma && m.gamma_residual < 1e-10);
        ids_matrix_free(j);
        ids_matrix_free(p);
    }
}

#[test]
fn generated_header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/idemsym.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build script");
    for symbol in ["ids_matrix_new", "ids_canonical_gamma", "IDS_STATUS_NOT_EXISTS", "typedef struct IdsMatrix IdsMatrix"] {
        assert!(text.contains(symbol), "header lacks {symbol}");
    }
    let dir = tempfile_dir();
    let source = dir.join("probe.c");
    std::fs::write(
        &source,
        "#include \"idemsym.h\"\nint main(void) { IdsTolerance t = ids_tolerance_default(); return t.rank_rtol > 0 ? 0 : 1; }\n",
    )
    .unwrap();
    let status = match Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&source)
        .status()
    {
        Ok(s) => s,
        // no C compiler on this machine
        Err(_) => return,
    };
    assert!(status.success(), "header does not compile");
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("idemsym-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
