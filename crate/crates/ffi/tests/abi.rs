use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use constwidth_ffi::*;

fn last_error() -> Option<String> {
    let p = cw_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn body_round_trip() {
    unsafe {
        let mut body = ptr::null_mut();
        assert_eq!(cw_body_new(4, &mut body), CwStatus::Ok);
        assert_eq!(cw_body_dimension(body), 4);

        let mut inside = false;
        let v = [0.3, -0.1, 0.2, 0.0];
        assert_eq!(cw_body_contains(body, v.as_ptr(), 4, 1e-12, &mut inside), CwStatus::Ok);
        assert!(inside);

        let theta = [0.5, -0.5, 0.5, -0.5];
        let (mut h, mut w, mut rho) = (0.0, 0.0, 0.0);
        assert_eq!(cw_body_support(body, theta.as_ptr(), 4, &mut h), CwStatus::Ok);
        assert_eq!(cw_body_width(body, theta.as_ptr(), 4, &mut w), CwStatus::Ok);
        assert_eq!(cw_body_radial_extent(body, theta.as_ptr(), 4, &mut rho), CwStatus::Ok);
        assert!((w - 2.0).abs() < 1e-12);
        assert!(rho > 0.0 && rho <= h + 1e-12);

        let not_unit = [1.0, 1.0, 0.0, 0.0];
        assert_eq!(cw_body_support(body, not_unit.as_ptr(), 4, &mut h), CwStatus::NotUnit);
        assert!(last_error().is_some());

        cw_body_free(body);
        cw_body_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_reported_not_panicked() {
    unsafe {
        let mut body = ptr::null_mut();
        assert_eq!(cw_body_new(0, &mut body), CwStatus::InvalidArgument);
        assert!(body.is_null());
        assert!(last_error().unwrap().contains("dimension"));
        assert_eq!(cw_body_new(2, ptr::null_mut()), CwStatus::NullPointer);

        assert_eq!(cw_body_new(2, &mut body), CwStatus::Ok);
        let mut out = false;
        assert_eq!(
            cw_body_contains(body, ptr::null(), 2, 0.0, &mut out),
            CwStatus::NullPointer
        );
        let v = [0.0, 0.0, 0.0];
        assert_eq!(
            cw_body_contains(body, v.as_ptr(), 3, 0.0, &mut out),
            CwStatus::DimensionMismatch
        );
        cw_body_free(body);

        // A successful call clears the previous message.
        let mut vol = std::mem::zeroed::<CwVolume>();
        assert_eq!(cw_exact_volume(3, &mut vol), CwStatus::Ok);
        assert!(last_error().is_none());
        assert_eq!(cw_mc_volume(3, 0, 1, &mut vol), CwStatus::InvalidArgument);
    }
}

#[test]
fn volumes_agree_across_methods() {
    unsafe {
        let mut exact = std::mem::zeroed::<CwVolume>();
        let mut mc = std::mem::zeroed::<CwVolume>();
        let mut radial = std::mem::zeroed::<CwVolume>();
        assert_eq!(cw_exact_volume(3, &mut exact), CwStatus::Ok);
        assert_eq!(cw_mc_volume(3, 400_000, 9, &mut mc), CwStatus::Ok);
        assert_eq!(cw_mc_volume_radial(3, 200_000, 9, &mut radial), CwStatus::Ok);
        assert_eq!(mc.method, CwVolumeMethod::McRejection);
        assert!(mc.has_ci && mc.samples == 400_000 && mc.seed == 9);
        for est in [mc, radial] {
            assert!(est.log_ci_low <= exact.log_volume && exact.log_volume <= est.log_ci_high);
        }
    }
}

#[test]
fn bounds_entry_points() {
    unsafe {
        let mut opt = std::mem::zeroed::<CwSOptimum>();
        assert_eq!(cw_minimize_s(&mut opt), CwStatus::Ok);
        assert!((opt.s - 2.0 * cw_least_positive_root()).abs() < 1e-12);
        assert!(opt.constraint_residual.abs() < 1e-9);

        let (mut feasible, mut s) = (false, 0.0);
        assert_eq!(
            cw_triangle_feasible(1.5, 0.7 * 2f64.sqrt(), &mut feasible, &mut s),
            CwStatus::Ok
        );
        assert!(feasible && s < 1.8);
        assert_eq!(
            cw_triangle_feasible(-1.0, 1.0, &mut feasible, &mut s),
            CwStatus::InvalidArgument
        );

        let mut r = 0.0;
        assert_eq!(cw_eq3_upper_bound(10, 1.0, 1.0, &mut r), CwStatus::InvalidArgument);
        assert_eq!(
            cw_eq3_upper_bound(10, opt.alpha_star, opt.beta_star, &mut r),
            CwStatus::Ok
        );
        assert!(r > cw_schramm_lower_bound(10));
        assert!(cw_disk_segment_contains(0.5, 0.1, 0.0));
    }
}

#[test]
fn split_norms_and_polyline() {
    unsafe {
        let v = [3.0, -4.0, 0.0];
        let (mut p, mut m) = (0.0, 0.0);
        assert_eq!(cw_split_norms(v.as_ptr(), 3, &mut p, &mut m), CwStatus::Ok);
        assert_eq!((p, m), (3.0, 4.0));

        let mut count = 0usize;
        assert_eq!(
            cw_boundary_polyline_2d(16, ptr::null_mut(), 0, &mut count),
            CwStatus::Ok
        );
        assert!(count > 0 && count % 2 == 0);
        let mut buf = vec![0.0; count];
        assert_eq!(
            cw_boundary_polyline_2d(16, buf.as_mut_ptr(), 1, &mut count),
            CwStatus::BufferTooSmall
        );
        assert_eq!(
            cw_boundary_polyline_2d(16, buf.as_mut_ptr(), buf.len(), &mut count),
            CwStatus::Ok
        );
        for xy in buf.chunks_exact(2) {
            let r = xy[0].hypot(xy[1]);
            assert!(r <= 2f64.sqrt() + 1e-12);
        }
    }
}

#[test]
fn mesh_buffers_and_export() {
    unsafe {
        let mut mesh = ptr::null_mut();
        assert_eq!(cw_mesh_new(3, &mut mesh), CwStatus::Ok);
        let (nv, nf) = (cw_mesh_vertex_count(mesh), cw_mesh_face_count(mesh));
        let mut verts = vec![0.0; 3 * nv];
        let mut faces = vec![0u64; 3 * nf];
        assert_eq!(
            cw_mesh_copy_vertices(mesh, verts.as_mut_ptr(), verts.len()),
            CwStatus::Ok
        );
        assert_eq!(cw_mesh_copy_faces(mesh, faces.as_mut_ptr(), faces.len()), CwStatus::Ok);
        assert!(faces.iter().all(|&i| (i as usize) < nv));
        assert!(cw_mesh_signed_volume(mesh) > 0.0);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("m.obj").to_str().unwrap()).unwrap();
        assert_eq!(cw_mesh_write_obj(mesh, path.as_ptr(), false), CwStatus::Ok);
        let text = std::fs::read_to_string(dir.path().join("m.obj")).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), nv);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), nf);

        let bad = CString::new("/nonexistent-dir/m.obj").unwrap();
        assert_eq!(cw_mesh_write_obj(mesh, bad.as_ptr(), false), CwStatus::Io);
        cw_mesh_free(mesh);
        assert!(cw_mesh_signed_volume(ptr::null()).is_nan());
    }
}

#[test]
fn status_messages_are_static_strings() {
    for code in [0, 1, 2, 3, 4, 5, 6, 7, 99, 12345] {
        let s = unsafe { CStr::from_ptr(cw_status_message(code)) };
        assert!(!s.to_bytes().is_empty());
    }
    let v = unsafe { CStr::from_ptr(cw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/constwidth.h")).unwrap();
    let source = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 20);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in [
        "typedef struct CwBody CwBody;",
        "typedef struct CwMesh CwMesh;",
        "CW_STATUS_PANIC = 99",
    ] {
        assert!(header.contains(ty), "{ty}");
    }
}

/// Directory holding the static library built for this test run.
fn lib_dir() -> PathBuf {
    std::env::current_exe().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = lib_dir().join("libconstwidth_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok"));
}
