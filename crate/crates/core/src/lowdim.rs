//! Exact geometry of `M` in two and three dimensions.
//!
//! In the plane `L` is four points, `±`-scaled unit vectors, and `∂M` is four
//! circular arcs, one per quadrant. In space the boundary is traced by an
//! octahedral mesh whose vertices are pushed out to `∂M` along rays, so the
//! octant seams (where `∂M` is not smooth) fall on mesh edges.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use std::io::{self, BufRead, Write};

use serde::Serialize;

use crate::body::{radial_from_minus_norm, split_norms, INNER_RADIUS};
use crate::error::{Error, Result};

/// Which constraint circle a boundary segment comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcTag {
    /// Quadrant (+,+): `|v| = √2`.
    OuterPositive,
    /// Quadrant (−,+): radius 2 about `√2e₁`.
    MixedUpperLeft,
    /// Quadrant (−,−): `|v| = 2 − √2`.
    InnerNegative,
    /// Quadrant (+,−): radius 2 about `√2e₂`.
    MixedLowerRight,
}

impl ArcTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcTag::OuterPositive => "outer_pp",
            ArcTag::MixedUpperLeft => "mixed_mp",
            ArcTag::InnerNegative => "inner_mm",
            ArcTag::MixedLowerRight => "mixed_pm",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    tag: ArcTag,
    center: [f64; 2],
    radius: f64,
    start: [f64; 2],
    end: [f64; 2],
}

/// Closed, counter-clockwise boundary of `M` in the plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPolyline2D {
    pub vertices: Vec<[f64; 2]>,
    /// `arc_tags[i]` labels the segment from vertex `i` to vertex `i+1`
    /// (wrapping).
    pub arc_tags: Vec<ArcTag>,
}

impl BoundaryPolyline2D {
    fn segments(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn perimeter(&self) -> f64 {
        self.segments().map(|(p, q)| (q[0] - p[0]).hypot(q[1] - p[1])).sum()
    }

    /// Shoelace area; positive for counter-clockwise loops.
    pub fn signed_area(&self) -> f64 {
        0.5 * self.segments().map(|(p, q)| p[0] * q[1] - q[0] * p[1]).sum::<f64>()
    }

    /// Quadratic-time check that no two non-adjacent segments meet.
    pub fn is_simple(&self) -> bool {
        let segs: Vec<_> = self.segments().collect();
        let n = segs.len();
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if segments_intersect(segs[i], segs[j]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y")?;
        for v in &self.vertices {
            writeln!(w, "{},{}", crate::format::num(v[0]), crate::format::num(v[1]))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.vertices
                .iter()
                .map(|v| serde_json::json!([crate::format::round(v[0]), crate::format::round(v[1])]))
                .collect(),
        )
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(s: ([f64; 2], [f64; 2]), t: ([f64; 2], [f64; 2])) -> bool {
    let d1 = cross(t.0, t.1, s.0);
    let d2 = cross(t.0, t.1, s.1);
    let d3 = cross(s.0, s.1, t.0);
    let d4 = cross(s.0, s.1, t.1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Intersection points of two circles. Tangent circles yield their single
/// contact point.
pub fn circle_intersections(c1: [f64; 2], r1: f64, c2: [f64; 2], r2: f64) -> Vec<[f64; 2]> {
    let (dx, dy) = (c2[0] - c1[0], c2[1] - c1[1]);
    let d = dx.hypot(dy);
    if d == 0.0 || d > r1 + r2 + 1e-12 || d < (r1 - r2).abs() - 1e-12 {
        return Vec::new();
    }
    let along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h2 = r1 * r1 - along * along;
    let (ux, uy) = (dx / d, dy / d);
    let base = [c1[0] + along * ux, c1[1] + along * uy];
    if h2 <= 1e-24 {
        return vec![base];
    }
    let h = h2.sqrt();
    vec![
        [base[0] - h * uy, base[1] + h * ux],
        [base[0] + h * uy, base[1] - h * ux],
    ]
}

fn pick(points: Vec<[f64; 2]>, pred: impl Fn(&[f64; 2]) -> bool) -> [f64; 2] {
    let p = points
        .into_iter()
        .find(|p| pred(p))
        .expect("constraint circles of the planar body always meet");
    // snap rounding noise on the axes
    [snap(p[0]), snap(p[1])]
}

fn snap(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

fn planar_arcs() -> [Arc; 4] {
    let origin = [0.0, 0.0];
    let c_right = [SQRT_2, 0.0];
    let c_up = [0.0, SQRT_2];
    let top = pick(circle_intersections(origin, SQRT_2, c_right, 2.0), |p| p[1] > 0.0);
    let left = pick(circle_intersections(c_right, 2.0, origin, INNER_RADIUS), |p| p[0] < 0.0);
    let bottom = pick(circle_intersections(origin, INNER_RADIUS, c_up, 2.0), |p| p[1] < 0.0);
    let right = pick(circle_intersections(c_up, 2.0, origin, SQRT_2), |p| p[0] > 0.0);
    [
        Arc {
            tag: ArcTag::OuterPositive,
            center: origin,
            radius: SQRT_2,
            start: right,
            end: top,
        },
        Arc {
            tag: ArcTag::MixedUpperLeft,
            center: c_right,
            radius: 2.0,
            start: top,
            end: left,
        },
        Arc {
            tag: ArcTag::InnerNegative,
            center: origin,
            radius: INNER_RADIUS,
            start: left,
            end: bottom,
        },
        Arc {
            tag: ArcTag::MixedLowerRight,
            center: c_up,
            radius: 2.0,
            start: bottom,
            end: right,
        },
    ]
}

/// The four-arc boundary with `points_per_arc` vertices per arc, starting
/// at each arc's analytic start point.
pub fn boundary_polyline_2d(points_per_arc: usize) -> Result<BoundaryPolyline2D> {
    if points_per_arc < 2 {
        return Err(Error::InvalidArgument("points_per_arc must be at least 2".into()));
    }
    let mut vertices = Vec::with_capacity(4 * points_per_arc);
    let mut arc_tags = Vec::with_capacity(4 * points_per_arc);
    for arc in planar_arcs() {
        let angle = |p: [f64; 2]| (p[1] - arc.center[1]).atan2(p[0] - arc.center[0]);
        let a0 = angle(arc.start);
        let span = (angle(arc.end) - a0).rem_euclid(2.0 * PI);
        vertices.push(arc.start);
        arc_tags.push(arc.tag);
        for i in 1..points_per_arc {
            let t = a0 + span * i as f64 / points_per_arc as f64;
            vertices.push([
                arc.center[0] + arc.radius * t.cos(),
                arc.center[1] + arc.radius * t.sin(),
            ]);
            arc_tags.push(arc.tag);
        }
    }
    Ok(BoundaryPolyline2D { vertices, arc_tags })
}

/// Closed outline of the disk segment `A`: origin, `(√2, 0)`, the arc up to
/// `(0, 2−√2)`, back to the origin.
pub fn disk_segment_outline(arc_points: usize) -> Vec<[f64; 2]> {
    let arc_points = arc_points.max(2);
    let mut pts = vec![[0.0, 0.0]];
    for i in 0..arc_points {
        let t = FRAC_PI_4 + FRAC_PI_4 * i as f64 / (arc_points - 1) as f64;
        pts.push([snap(2.0 * t.cos()), snap(2.0 * t.sin() - SQRT_2)]);
    }
    pts[1] = [SQRT_2, 0.0];
    let last = pts.len() - 1;
    pts[last] = [0.0, INNER_RADIUS];
    pts.push([0.0, 0.0]);
    pts
}

/// Closed outline of `T_{α,β}`.
pub fn triangle_outline(alpha: f64, beta: f64) -> Vec<[f64; 2]> {
    vec![[0.0, 0.0], [alpha, 0.0], [0.0, beta], [0.0, 0.0]]
}

/// Triangle surface mesh of `∂M ⊂ R³`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleMesh3D {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

/// Levels above this produce more than two million faces.
pub const MAX_MESH_LEVEL: u32 = 10;

fn radial_3(dir: [f64; 3]) -> f64 {
    let (_, q) = split_norms(&dir);
    radial_from_minus_norm(q)
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Octahedron with each face split into `4^{level−1}` triangles, projected
/// radially onto `∂M`. Level 1 is the plain octahedron.
pub fn mesh_3d(level: u32) -> Result<TriangleMesh3D> {
    if level == 0 || level > MAX_MESH_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "subdivision level must be in 1..={MAX_MESH_LEVEL}, got {level}"
        )));
    }
    let m = 1i64 << (level - 1);
    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut lattice: Vec<[i64; 3]> = Vec::new();
    let mut faces = Vec::new();

    let mut id = |p: [i64; 3]| -> usize {
        *index.entry(p).or_insert_with(|| {
            lattice.push(p);
            lattice.len() - 1
        })
    };

    for octant in 0..8u8 {
        let s = [
            if octant & 1 == 0 { 1 } else { -1 },
            if octant & 2 == 0 { 1 } else { -1 },
            if octant & 4 == 0 { 1 } else { -1 },
        ];
        let pt = |i: i64, j: i64| [i * s[0], j * s[1], (m - i - j) * s[2]];
        for i in 0..m {
            for j in 0..(m - i) {
                let mut tris = vec![[pt(i, j), pt(i + 1, j), pt(i, j + 1)]];
                if i + j < m - 1 {
                    tris.push([pt(i + 1, j), pt(i + 1, j + 1), pt(i, j + 1)]);
                }
                for [a, b, c] in tris {
                    let f = |p: [i64; 3]| p.map(|x| x as f64);
                    let normal = cross3(sub3(f(b), f(a)), sub3(f(c), f(a)));
                    let centroid = [0, 1, 2].map(|k| (a[k] + b[k] + c[k]) as f64);
                    if dot3(normal, centroid) > 0.0 {
                        faces.push([id(a), id(b), id(c)]);
                    } else {
                        faces.push([id(a), id(c), id(b)]);
                    }
                }
            }
        }
    }

    let vertices = lattice
        .iter()
        .map(|p| {
            let v = p.map(|x| x as f64);
            let norm = dot3(v, v).sqrt();
            let dir = v.map(|x| x / norm);
            let r = radial_3(dir);
            dir.map(|x| x * r)
        })
        .collect();
    Ok(TriangleMesh3D { vertices, faces })
}

impl TriangleMesh3D {
    fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::new();
        for f in &self.faces {
            for e in 0..3 {
                *counts.entry((f[e], f[(e + 1) % 3])).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Every edge borders exactly two faces.
    pub fn is_watertight(&self) -> bool {
        let mut undirected: HashMap<(usize, usize), usize> = HashMap::new();
        for ((a, b), c) in self.edge_counts() {
            *undirected.entry((a.min(b), a.max(b))).or_insert(0) += c;
        }
        undirected.values().all(|&c| c == 2)
    }

    /// Every directed edge appears once, so neighbouring faces agree on
    /// orientation.
    pub fn is_consistently_oriented(&self) -> bool {
        let counts = self.edge_counts();
        counts
            .iter()
            .all(|(&(a, b), &c)| c == 1 && counts.get(&(b, a)) == Some(&1))
    }

    /// Enclosed volume by the divergence theorem.
    pub fn signed_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                dot3(a, cross3(b, c))
            })
            .sum::<f64>()
            / 6.0
    }

    /// Largest `|ρ(v/|v|) − |v||` over the vertices.
    pub fn max_vertex_defect(&self) -> f64 {
        self.vertices
            .iter()
            .map(|&v| {
                let norm = dot3(v, v).sqrt();
                (radial_3(v.map(|x| x / norm)) - norm).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest radial gap between `∂M` and the mesh, sampled at face
    /// centroids and edge midpoints. Measures how far the inscribed
    /// polyhedron sits inside the body.
    pub fn chord_error(&self) -> f64 {
        let gap = |p: [f64; 3]| {
            let norm = dot3(p, p).sqrt();
            radial_3(p.map(|x| x / norm)) - norm
        };
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                let mid = |p: [f64; 3], q: [f64; 3]| [0, 1, 2].map(|k| 0.5 * (p[k] + q[k]));
                let centroid = [0, 1, 2].map(|k| (a[k] + b[k] + c[k]) / 3.0);
                [gap(centroid), gap(mid(a, b)), gap(mid(b, c)), gap(mid(c, a))]
                    .into_iter()
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Sign pattern of a face centroid, e.g. `"pmp"` for `(+,−,+)`.
    pub fn face_octant(&self, face: usize) -> String {
        let f = self.faces[face];
        (0..3)
            .map(|k| {
                let c: f64 = f.iter().map(|&i| self.vertices[i][k]).sum();
                if c >= 0.0 {
                    'p'
                } else {
                    'm'
                }
            })
            .collect()
    }
}

/// Octant labels in output order.
pub const OCTANTS: [&str; 8] = ["ppp", "mpp", "pmp", "mmp", "ppm", "mpm", "pmm", "mmm"];

/// Wavefront OBJ: `v` records, then 1-based `f` records. With
/// `colorize_by_octant` the faces are grouped by the octant of their
/// centroid, each group opened by `g` and `usemtl` records.
pub fn export_obj<W: Write>(mesh: &TriangleMesh3D, colorize_by_octant: bool, w: W) -> io::Result<()> {
    write_obj(mesh, colorize_by_octant, None, w)
}

/// Colorized export that references the material library `mtllib`
/// (a path relative to the OBJ file, as written by [`export_mtl`]).
pub fn export_obj_with_mtllib<W: Write>(mesh: &TriangleMesh3D, mtllib: &str, w: W) -> io::Result<()> {
    write_obj(mesh, true, Some(mtllib), w)
}

fn write_obj<W: Write>(
    mesh: &TriangleMesh3D,
    colorize_by_octant: bool,
    mtllib: Option<&str>,
    mut w: W,
) -> io::Result<()> {
    writeln!(
        w,
        "# constant-width body mesh: {} vertices, {} faces",
        mesh.vertices.len(),
        mesh.faces.len()
    )?;
    if let Some(lib) = mtllib {
        writeln!(w, "mtllib {lib}")?;
    }
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
    }
    let write_face = |w: &mut W, f: &[usize; 3]| writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    if colorize_by_octant {
        let mut groups: HashMap<String, Vec<usize>> = HashMap::new();
        for i in 0..mesh.faces.len() {
            groups.entry(mesh.face_octant(i)).or_default().push(i);
        }
        for name in OCTANTS {
            let Some(ids) = groups.get(name) else { continue };
            writeln!(w, "g octant_{name}")?;
            writeln!(w, "usemtl octant_{name}")?;
            for &i in ids {
                write_face(&mut w, &mesh.faces[i])?;
            }
        }
    } else {
        for f in &mesh.faces {
            write_face(&mut w, f)?;
        }
    }
    Ok(())
}

/// Companion material library for colorized exports.
pub fn export_mtl<W: Write>(mut w: W) -> io::Result<()> {
    for name in OCTANTS {
        let rgb: Vec<f64> = name.chars().map(|c| if c == 'p' { 0.9 } else { 0.3 }).collect();
        writeln!(w, "newmtl octant_{name}")?;
        writeln!(w, "Kd {} {} {}", rgb[0], rgb[1], rgb[2])?;
    }
    Ok(())
}

/// Minimal OBJ reader for the subset written by [`export_obj`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedObj {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub groups: Vec<String>,
}

pub fn read_obj<R: BufRead>(r: R) -> io::Result<ParsedObj> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut out = ParsedObj::default();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let xs: Vec<f64> = it
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| bad(format!("line {}: {e}", lineno + 1)))?;
                if xs.len() != 3 {
                    return Err(bad(format!("line {}: expected 3 coordinates", lineno + 1)));
                }
                out.vertices.push([xs[0], xs[1], xs[2]]);
            }
            Some("f") => {
                let ids: Vec<usize> = it
                    .map(|t| t.split('/').next().unwrap_or(t).parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| bad(format!("line {}: {e}", lineno + 1)))?;
                if ids.len() != 3 || ids.iter().any(|&i| i == 0 || i > out.vertices.len()) {
                    return Err(bad(format!("line {}: bad face", lineno + 1)));
                }
                out.faces.push([ids[0] - 1, ids[1] - 1, ids[2] - 1]);
            }
            Some("g") => out.groups.push(it.collect::<Vec<_>>().join(" ")),
            _ => {}
        }
    }
    Ok(out)
}
