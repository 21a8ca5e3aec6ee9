//! C ABI for `constwidth`.
//!
//! Bodies and meshes are opaque handles created by `*_new` and released
//! with the matching `*_free`. Every fallible call returns a [`CwStatus`];
//! results come back through out-pointers. After a non-OK status,
//! [`cw_last_error_message`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use constwidth::body::{disk_segment_contains, split_norms, BodySpec};
use constwidth::bounds;
use constwidth::lowdim::{boundary_polyline_2d, export_obj, mesh_3d, TriangleMesh3D};
use constwidth::volume::{self, VolumeMethod, VolumeResult};
use constwidth::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotUnit = 4,
    NumericalFailure = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 99,
}

impl From<&Error> for CwStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => CwStatus::DimensionMismatch,
            Error::NotUnit(_) => CwStatus::NotUnit,
            Error::QuadratureBudget { .. } | Error::ZeroHits(_) | Error::CheckFailed(_) => CwStatus::NumericalFailure,
            _ => CwStatus::InvalidArgument,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(CwStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(CwStatus::from(&e), e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> CwStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CwStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside constwidth");
            CwStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(CwStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn vector<'a>(v: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    non_null(v, "vector")?;
    Ok(slice::from_raw_parts(v, len))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Static description of a status code; unknown codes map to
/// `"unknown status"`.
#[no_mangle]
pub extern "C" fn cw_status_message(code: i32) -> *const c_char {
    let s: &'static CStr = match code {
        0 => c"ok",
        1 => c"null pointer argument",
        2 => c"invalid argument",
        3 => c"dimension mismatch",
        4 => c"direction is not a unit vector",
        5 => c"numerical failure",
        6 => c"i/o error",
        7 => c"output buffer too small",
        99 => c"internal panic",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn cw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Opaque body handle.
pub struct CwBody {
    spec: BodySpec,
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cw_body_new(n: usize, out: *mut *mut CwBody) -> CwStatus {
    guard(|| {
        non_null(out, "out")?;
        let spec = BodySpec::new(n)?;
        *out = Box::into_raw(Box::new(CwBody { spec }));
        Ok(())
    })
}

/// # Safety
/// `body` must be null or a handle from [`cw_body_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_body_free(body: *mut CwBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Dimension of the body, 0 for a null handle.
///
/// # Safety
/// `body` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_body_dimension(body: *const CwBody) -> usize {
    body.as_ref().map_or(0, |b| b.spec.dimension())
}

unsafe fn body_query<T>(
    body: *const CwBody,
    v: *const f64,
    len: usize,
    out: *mut T,
    f: impl FnOnce(&BodySpec, &[f64]) -> constwidth::Result<T>,
) -> CwStatus {
    guard(|| {
        non_null(body, "body")?;
        non_null(out, "out")?;
        let v = vector(v, len)?;
        *out = f(&(*body).spec, v)?;
        Ok(())
    })
}

/// Membership via `(|v₊|, |v₋|) ∈ A`.
///
/// # Safety
/// `v` must point to `len` doubles; `body` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_body_contains(
    body: *const CwBody,
    v: *const f64,
    len: usize,
    tol: f64,
    out: *mut bool,
) -> CwStatus {
    body_query(body, v, len, out, |b, v| b.contains(v, tol))
}

/// Membership from the ball-intersection definition.
///
/// # Safety
/// As [`cw_body_contains`].
#[no_mangle]
pub unsafe extern "C" fn cw_body_contains_definitional(
    body: *const CwBody,
    v: *const f64,
    len: usize,
    tol: f64,
    out: *mut bool,
) -> CwStatus {
    body_query(body, v, len, out, |b, v| b.contains_definitional(v, tol))
}

/// # Safety
/// `theta` must point to `len` doubles; `body` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_body_support(
    body: *const CwBody,
    theta: *const f64,
    len: usize,
    out: *mut f64,
) -> CwStatus {
    body_query(body, theta, len, out, |b, t| b.support(t))
}

/// # Safety
/// As [`cw_body_support`].
#[no_mangle]
pub unsafe extern "C" fn cw_body_width(body: *const CwBody, theta: *const f64, len: usize, out: *mut f64) -> CwStatus {
    body_query(body, theta, len, out, |b, t| b.width(t))
}

/// # Safety
/// As [`cw_body_support`].
#[no_mangle]
pub unsafe extern "C" fn cw_body_radial_extent(
    body: *const CwBody,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> CwStatus {
    body_query(body, u, len, out, |b, u| b.radial_extent(u))
}

/// `(|v₊|, |v₋|)` of a vector.
///
/// # Safety
/// `v` must point to `len` doubles; both outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_split_norms(
    v: *const f64,
    len: usize,
    norm_plus: *mut f64,
    norm_minus: *mut f64,
) -> CwStatus {
    guard(|| {
        non_null(norm_plus, "norm_plus")?;
        non_null(norm_minus, "norm_minus")?;
        let v = vector(v, len)?;
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i).into());
        }
        let (p, m) = split_norms(v);
        *norm_plus = p;
        *norm_minus = m;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn cw_disk_segment_contains(a: f64, b: f64, tol: f64) -> bool {
    disk_segment_contains(a, b, tol)
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwVolumeMethod {
    Quadrature = 0,
    McRejection = 1,
    McRadial = 2,
}

/// Volume estimate. The interval fields are meaningful only when `has_ci`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwVolume {
    pub n: usize,
    pub log_volume: f64,
    pub effective_radius: f64,
    pub method: CwVolumeMethod,
    pub has_ci: bool,
    pub log_ci_low: f64,
    pub log_ci_high: f64,
    pub samples: u64,
    pub seed: u64,
}

impl From<&VolumeResult> for CwVolume {
    fn from(v: &VolumeResult) -> Self {
        CwVolume {
            n: v.n,
            log_volume: v.log_volume,
            effective_radius: v.effective_radius,
            method: match v.method {
                VolumeMethod::Quadrature => CwVolumeMethod::Quadrature,
                VolumeMethod::McRejection => CwVolumeMethod::McRejection,
                VolumeMethod::McRadial => CwVolumeMethod::McRadial,
            },
            has_ci: v.log_ci_low.is_some(),
            log_ci_low: v.log_ci_low.unwrap_or(f64::NAN),
            log_ci_high: v.log_ci_high.unwrap_or(f64::NAN),
            samples: v.samples.unwrap_or(0),
            seed: v.seed.unwrap_or(0),
        }
    }
}

unsafe fn volume_out(out: *mut CwVolume, f: impl FnOnce() -> constwidth::Result<VolumeResult>) -> CwStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = CwVolume::from(&f()?);
        Ok(())
    })
}

/// Exact volume by orthant quadrature.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_exact_volume(n: usize, out: *mut CwVolume) -> CwStatus {
    volume_out(out, || volume::exact_volume(n))
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_mc_volume(n: usize, samples: u64, seed: u64, out: *mut CwVolume) -> CwStatus {
    volume_out(out, || volume::mc_volume(n, samples, seed))
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_mc_volume_radial(n: usize, samples: u64, seed: u64, out: *mut CwVolume) -> CwStatus {
    volume_out(out, || volume::mc_volume_radial(n, samples, seed))
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwSOptimum {
    pub s: f64,
    pub alpha_star: f64,
    pub beta_star: f64,
    pub x_star: f64,
    pub residual: f64,
    pub s_numeric: f64,
    pub constraint_residual: f64,
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_minimize_s(out: *mut CwSOptimum) -> CwStatus {
    guard(|| {
        non_null(out, "out")?;
        let o = bounds::minimize_s()?;
        *out = CwSOptimum {
            s: o.s,
            alpha_star: o.alpha_star,
            beta_star: o.beta_star,
            x_star: o.x_star,
            residual: o.residual,
            s_numeric: o.s_numeric,
            constraint_residual: o.constraint_residual,
        };
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn cw_least_positive_root() -> f64 {
    bounds::least_positive_root()
}

#[no_mangle]
pub extern "C" fn cw_schramm_lower_bound(n: usize) -> f64 {
    bounds::schramm_lower_bound(n)
}

/// # Safety
/// Both outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_triangle_feasible(
    alpha: f64,
    beta: f64,
    feasible: *mut bool,
    s_candidate: *mut f64,
) -> CwStatus {
    guard(|| {
        non_null(feasible, "feasible")?;
        non_null(s_candidate, "s_candidate")?;
        let t = bounds::triangle_feasible(alpha, beta)?;
        *feasible = t.feasible;
        *s_candidate = t.s_candidate;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_eq3_upper_bound(n: usize, alpha: f64, beta: f64, out: *mut f64) -> CwStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = bounds::eq3_upper_bound(n, alpha, beta)?;
        Ok(())
    })
}

/// Two-call helper: with `buf` null, stores the number of doubles needed
/// (`2 × vertices`) in `count`; otherwise fills `buf` with `x, y` pairs.
///
/// # Safety
/// `buf`, when non-null, must hold `buf_len` doubles; `count` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_boundary_polyline_2d(
    points_per_arc: usize,
    buf: *mut f64,
    buf_len: usize,
    count: *mut usize,
) -> CwStatus {
    guard(|| {
        non_null(count, "count")?;
        let poly = boundary_polyline_2d(points_per_arc)?;
        let needed = 2 * poly.vertices.len();
        *count = needed;
        if buf.is_null() {
            return Ok(());
        }
        if buf_len < needed {
            return Err(Fail(
                CwStatus::BufferTooSmall,
                format!("need {needed} doubles, got {buf_len}"),
            ));
        }
        let dst = slice::from_raw_parts_mut(buf, needed);
        for (chunk, v) in dst.chunks_exact_mut(2).zip(&poly.vertices) {
            chunk.copy_from_slice(v);
        }
        Ok(())
    })
}

/// Opaque 3D mesh handle.
pub struct CwMesh {
    mesh: TriangleMesh3D,
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_mesh_new(level: u32, out: *mut *mut CwMesh) -> CwStatus {
    guard(|| {
        non_null(out, "out")?;
        let mesh = mesh_3d(level)?;
        *out = Box::into_raw(Box::new(CwMesh { mesh }));
        Ok(())
    })
}

/// # Safety
/// `mesh` must be null or a live handle from [`cw_mesh_new`].
#[no_mangle]
pub unsafe extern "C" fn cw_mesh_free(mesh: *mut CwMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_mesh_vertex_count(mesh: *const CwMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.vertices.len())
}

/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_mesh_face_count(mesh: *const CwMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.faces.len())
}

/// Divergence-theorem volume; NaN for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_mesh_signed_volume(mesh: *const CwMesh) -> f64 {
    mesh.as_ref().map_or(f64::NAN, |m| m.mesh.signed_volume())
}

/// Copies `3 × vertex_count` doubles (`x, y, z` per vertex).
///
/// # Safety
/// `buf` must hold `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_mesh_copy_vertices(mesh: *const CwMesh, buf: *mut f64, buf_len: usize) -> CwStatus {
    guard(|| {
        non_null(mesh, "mesh")?;
        non_null(buf, "buf")?;
        let verts = &(*mesh).mesh.vertices;
        if buf_len < 3 * verts.len() {
            return Err(Fail(
                CwStatus::BufferTooSmall,
                format!("need {} doubles", 3 * verts.len()),
            ));
        }
        let dst = slice::from_raw_parts_mut(buf, 3 * verts.len());
        for (chunk, v) in dst.chunks_exact_mut(3).zip(verts) {
            chunk.copy_from_slice(v);
        }
        Ok(())
    })
}

/// Copies `3 × face_count` zero-based vertex indices.
///
/// # Safety
/// `buf` must hold `buf_len` indices.
#[no_mangle]
pub unsafe extern "C" fn cw_mesh_copy_faces(mesh: *const CwMesh, buf: *mut u64, buf_len: usize) -> CwStatus {
    guard(|| {
        non_null(mesh, "mesh")?;
        non_null(buf, "buf")?;
        let faces = &(*mesh).mesh.faces;
        if buf_len < 3 * faces.len() {
            return Err(Fail(
                CwStatus::BufferTooSmall,
                format!("need {} indices", 3 * faces.len()),
            ));
        }
        let dst = slice::from_raw_parts_mut(buf, 3 * faces.len());
        for (chunk, f) in dst.chunks_exact_mut(3).zip(faces) {
            for (d, &i) in chunk.iter_mut().zip(f) {
                *d = i as u64;
            }
        }
        Ok(())
    })
}

/// Writes the mesh as Wavefront OBJ to `path`.
///
/// # Safety
/// `mesh` must be live and `path` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn cw_mesh_write_obj(mesh: *const CwMesh, path: *const c_char, colorize: bool) -> CwStatus {
    guard(|| {
        non_null(mesh, "mesh")?;
        non_null(path, "path")?;
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Fail(CwStatus::InvalidArgument, "path is not UTF-8".into()))?;
        let io = |e: std::io::Error| Fail(CwStatus::Io, e.to_string());
        let file = File::create(path).map_err(io)?;
        let mut w = BufWriter::new(file);
        export_obj(&(*mesh).mesh, colorize, &mut w).map_err(io)?;
        w.flush().map_err(io)
    })
}
