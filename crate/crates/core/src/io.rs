//! File formats: versioned JSON artifacts, OFF meshes, CSV sample grids and
//! deterministic SVG renderings.
//!
//! Every JSON artifact is wrapped as `{"v": 1, "kind": "...", "data": ...}`;
//! unknown fields are rejected at every level.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{DetCheck, EmbeddingCertificate};
use crate::cone::ConeReport;
use crate::disk::{
    AnReport, ChoquetScan, ConeScan, DiskBoundaryMap, DiskSample, HarmonicMeasureAudit, MonotoneReport, PolarGrid, RkcReport,
};
use crate::extension::ConvexExtension;
use crate::geom::{self, Point};
use crate::harmonic::{EdgeWeights, HarmonicError};
use crate::mesh::{self, BuildOptions, GeometryError, MeshError, PlanarDrawing, TargetPolygon, Triangulation};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}, expected {FORMAT_VERSION}")]
    Version(u32),
    #[error("expected a '{expected}' document, found '{found}'")]
    Kind { expected: &'static str, found: String },
    #[error("OFF line {line}: {msg}")]
    Off { line: usize, msg: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
}

/// A type stored as a versioned JSON document.
pub trait Artifact: Serialize + DeserializeOwned {
    const KIND: &'static str;
}

#[derive(Serialize)]
struct EnvelopeOut<'a, T> {
    v: u32,
    kind: &'static str,
    data: &'a T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvelopeIn {
    v: u32,
    kind: String,
    data: serde_json::Value,
}

/// Canonical (pretty-printed) JSON of an artifact.
pub fn to_json<T: Artifact>(value: &T) -> Result<String, IoError> {
    let mut s = serde_json::to_string_pretty(&EnvelopeOut {
        v: FORMAT_VERSION,
        kind: T::KIND,
        data: value,
    })?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: Artifact>(text: &str) -> Result<T, IoError> {
    let env: EnvelopeIn = serde_json::from_str(text)?;
    if env.v != FORMAT_VERSION {
        return Err(IoError::Version(env.v));
    }
    if env.kind != T::KIND {
        return Err(IoError::Kind {
            expected: T::KIND,
            found: env.kind,
        });
    }
    Ok(serde_json::from_value(env.data)?)
}

fn to_pairs(points: &[Point]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.x, p.y]).collect()
}

fn to_points(pairs: &[[f64; 2]]) -> Vec<Point> {
    pairs.iter().map(|p| Point::new(p[0], p[1])).collect()
}

/// Combinatorial mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub vertex_count: usize,
    pub faces: Vec<[usize; 3]>,
}

impl MeshFile {
    pub fn from_triangulation(tri: &Triangulation) -> Self {
        MeshFile {
            vertex_count: tri.vertex_count(),
            faces: tri.faces().to_vec(),
        }
    }

    pub fn triangulation(&self) -> Result<Triangulation, IoError> {
        Ok(mesh::build_triangulation(&self.faces, self.vertex_count)?)
    }
}

/// Straight-line drawing of a mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrawingFile {
    pub faces: Vec<[usize; 3]>,
    pub coords: Vec<[f64; 2]>,
}

impl DrawingFile {
    pub fn from_drawing(d: &PlanarDrawing) -> Self {
        DrawingFile {
            faces: d.triangulation().faces().to_vec(),
            coords: to_pairs(d.coords()),
        }
    }

    pub fn drawing(&self) -> Result<PlanarDrawing, IoError> {
        let tri = mesh::build_triangulation(&self.faces, self.coords.len())?;
        Ok(PlanarDrawing::new(Arc::new(tri), to_points(&self.coords))?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonFile {
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonFile {
    pub fn from_points(points: &[Point]) -> Self {
        PolygonFile { vertices: to_pairs(points) }
    }

    pub fn polygon(&self) -> Result<TargetPolygon, IoError> {
        Ok(TargetPolygon::new(to_points(&self.vertices))?)
    }
}

/// Directed edge weights as `(i, j, w_ij)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsFile {
    pub weights: Vec<(usize, usize, f64)>,
}

impl WeightsFile {
    pub fn from_weights(w: &EdgeWeights) -> Self {
        WeightsFile { weights: w.triples() }
    }

    pub fn weights(&self, tri: Arc<Triangulation>) -> Result<EdgeWeights, IoError> {
        Ok(EdgeWeights::from_triples(tri, &self.weights)?)
    }
}

/// A convex extension: hull, pockets, pocket triangles and the extended
/// mesh with its weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionFile {
    pub hull: Vec<usize>,
    pub pockets: Vec<Vec<usize>>,
    pub pocket_faces: Vec<[usize; 3]>,
    pub extended: MeshFile,
    pub weights: Vec<(usize, usize, f64)>,
}

impl ExtensionFile {
    pub fn from_extension(ext: &ConvexExtension) -> Self {
        ExtensionFile {
            hull: ext.hull.clone(),
            pockets: ext.pockets.clone(),
            pocket_faces: ext.delta_faces.clone(),
            extended: MeshFile::from_triangulation(&ext.extended_tri),
            weights: ext.extended_weights.triples(),
        }
    }

    /// The extended mesh; vertices outside it are allowed.
    pub fn extended_triangulation(&self) -> Result<Triangulation, IoError> {
        Ok(Triangulation::build(
            &self.extended.faces,
            self.extended.vertex_count,
            BuildOptions { allow_unreferenced: true },
        )?)
    }
}

macro_rules! artifact {
    ($($t:ty => $k:literal),* $(,)?) => {
        $(impl Artifact for $t {
            const KIND: &'static str = $k;
        })*
    };
}

artifact! {
    MeshFile => "mesh",
    DrawingFile => "drawing",
    PolygonFile => "polygon",
    WeightsFile => "weights",
    ExtensionFile => "extension",
    ConeReport => "cone_report",
    EmbeddingCertificate => "certificate",
    DetCheck => "det_check",
    DiskBoundaryMap => "boundary_map",
    ConeScan => "disk_cone_scan",
    RkcReport => "rkc_report",
    AnReport => "an_report",
    ChoquetScan => "choquet_scan",
    MonotoneReport => "monotone_report",
    HarmonicMeasureAudit => "measure_audit",
}

/// Parse an OFF file. Only triangles are accepted; a third coordinate, if
/// present, is ignored.
pub fn read_off(text: &str) -> Result<(Vec<Point>, Vec<[usize; 3]>), IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, msg: &str| IoError::Off { line, msg: msg.to_string() };
    let (mut ln, mut first) = lines.next().ok_or_else(|| err(0, "empty file"))?;
    if first.starts_with("OFF") {
        let rest = first[3..].trim();
        if rest.is_empty() {
            (ln, first) = lines.next().ok_or_else(|| err(ln, "missing counts"))?;
        } else {
            first = rest;
        }
    }
    let counts: Vec<usize> = first
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| err(ln, "bad counts"))?;
    if counts.len() < 2 {
        return Err(err(ln, "expected vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut pts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| err(ln, "missing vertex line"))?;
        let xs: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| err(ln, "bad coordinate"))?;
        if xs.len() < 2 || xs.iter().any(|x| !x.is_finite()) {
            return Err(err(ln, "expected finite x y [z]"));
        }
        pts.push(Point::new(xs[0], xs[1]));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| err(ln, "missing face line"))?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| err(ln, "bad face index"))?;
        if ids.len() < 4 || ids[0] != 3 {
            return Err(err(ln, "only triangles are supported"));
        }
        faces.push([ids[1], ids[2], ids[3]]);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, "trailing data"));
    }
    Ok((pts, faces))
}

pub fn write_off(points: &[Point], faces: &[[usize; 3]]) -> String {
    let mut s = format!("OFF\n{} {} 0\n", points.len(), faces.len());
    for p in points {
        let _ = writeln!(s, "{} {} 0", p.x, p.y);
    }
    for f in faces {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    s
}

#[derive(Serialize, Deserialize)]
struct SampleRow {
    nu: f64,
    theta: f64,
    phi_x: f64,
    phi_y: f64,
    d_nu_x: f64,
    d_nu_y: f64,
    d_theta_x: f64,
    d_theta_y: f64,
}

pub fn write_samples_csv(samples: &[DiskSample]) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in samples {
        w.serialize(SampleRow {
            nu: s.nu,
            theta: s.theta,
            phi_x: s.phi[0],
            phi_y: s.phi[1],
            d_nu_x: s.d_nu[0],
            d_nu_y: s.d_nu[1],
            d_theta_x: s.d_theta[0],
            d_theta_y: s.d_theta[1],
        })?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_samples_csv(text: &str) -> Result<Vec<DiskSample>, IoError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize::<SampleRow>()
        .map(|row| {
            let r = row?;
            Ok(DiskSample {
                nu: r.nu,
                theta: r.theta,
                phi: [r.phi_x, r.phi_y],
                d_nu: [r.d_nu_x, r.d_nu_y],
                d_theta: [r.d_theta_x, r.d_theta_y],
            })
        })
        .collect()
}

/// Rendering options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvgOptions {
    /// Width of the drawing area in pixels.
    pub width: f64,
    /// Arrow length per unit of force (or normal derivative).
    pub arrow_scale: f64,
    pub face_fill: String,
    pub edge_color: String,
    pub boundary_color: String,
    pub reflex_color: String,
    pub pass_color: String,
    pub fail_color: String,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 800.0,
            arrow_scale: 0.1,
            face_fill: "#dde6f3".into(),
            edge_color: "#5b6b80".into(),
            boundary_color: "#111111".into(),
            reflex_color: "#b35900".into(),
            pass_color: "#1a7f37".into(),
            fail_color: "#cf222e".into(),
        }
    }
}

struct Frame {
    min: Point,
    max_y: f64,
    scale: f64,
    pad: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn new(points: &[Point], width: f64) -> Self {
        let (min, max) = geom::bounding_box(points);
        let span = (max.x - min.x).max(max.y - min.y).max(f64::MIN_POSITIVE);
        let pad = 0.05 * width;
        let scale = width / span;
        Frame {
            min,
            max_y: max.y,
            scale,
            pad,
            w: (max.x - min.x) * scale + 2.0 * pad,
            h: (max.y - min.y) * scale + 2.0 * pad,
        }
    }

    fn xy(&self, p: &Point) -> String {
        format!(
            "{:.3},{:.3}",
            self.pad + (p.x - self.min.x) * self.scale,
            self.pad + (self.max_y - p.y) * self.scale
        )
    }

    fn header(&self, out: &mut String, opts: &SvgOptions) {
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">",
            w = self.w,
            h = self.h
        );
        out.push_str("<defs>\n");
        for (id, color) in [("pass", &opts.pass_color), ("fail", &opts.fail_color)] {
            let _ = writeln!(
                out,
                "<marker id=\"head-{id}\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"{color}\"/></marker>"
            );
        }
        out.push_str("</defs>\n");
    }

    fn arrow(&self, out: &mut String, from: &Point, to: &Point, ok: bool, opts: &SvgOptions) {
        let (class, color) = if ok { ("pass", &opts.pass_color) } else { ("fail", &opts.fail_color) };
        let (a, b) = (self.xy(from), self.xy(to));
        let (a, b) = (a.split_once(',').unwrap(), b.split_once(',').unwrap());
        let _ = writeln!(
            out,
            "<line class=\"force {class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\" marker-end=\"url(#head-{class})\"/>",
            a.0, a.1, b.0, b.1
        );
    }
}

/// SVG of a drawing: filled triangles, bold boundary, reflex vertices
/// marked, and boundary force arrows from an optional cone report, failing
/// cones in the failure color. Output depends only on the inputs.
pub fn emit_svg(drawing: &PlanarDrawing, cones: Option<&ConeReport>, opts: &SvgOptions) -> String {
    let mut extent: Vec<Point> = drawing.coords().to_vec();
    let tips: Vec<(Point, Point, bool)> = cones
        .map(|r| {
            r.vertices
                .iter()
                .filter(|v| v.index < drawing.coords().len())
                .map(|v| {
                    let p = drawing.point(v.index);
                    let q = p + opts.arrow_scale * crate::Vec2::new(v.force[0], v.force[1]);
                    (p, q, v.pass)
                })
                .collect()
        })
        .unwrap_or_default();
    extent.extend(tips.iter().map(|t| t.1));
    let frame = Frame::new(&extent, opts.width);
    let mut out = String::new();
    frame.header(&mut out, opts);
    let _ = writeln!(out, "<g id=\"faces\" fill=\"{}\" stroke=\"{}\" stroke-width=\"0.6\">", opts.face_fill, opts.edge_color);
    for f in drawing.triangulation().faces() {
        let pts: Vec<String> = f.iter().map(|&v| frame.xy(&drawing.point(v))).collect();
        let _ = writeln!(out, "<polygon points=\"{}\"/>", pts.join(" "));
    }
    out.push_str("</g>\n");
    let bpts: Vec<String> = drawing.boundary_polygon().iter().map(|p| frame.xy(p)).collect();
    let _ = writeln!(
        out,
        "<polygon id=\"boundary\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2.5\"/>",
        bpts.join(" "),
        opts.boundary_color
    );
    if let Ok(classes) = mesh::classify_boundary_vertices(drawing) {
        let _ = writeln!(out, "<g id=\"reflex\" fill=\"{}\">", opts.reflex_color);
        for (v, c) in classes {
            if c.is_reflex() {
                let (x, y) = frame.xy(&drawing.point(v)).split_once(',').map(|(a, b)| (a.to_string(), b.to_string())).unwrap();
                let _ = writeln!(out, "<circle class=\"reflex\" cx=\"{x}\" cy=\"{y}\" r=\"4\"/>");
            }
        }
        out.push_str("</g>\n");
    }
    if !tips.is_empty() {
        out.push_str("<g id=\"forces\">\n");
        for (p, q, ok) in &tips {
            frame.arrow(&mut out, p, q, *ok, opts);
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// SVG of a mapped polar grid: image rings and spokes, the image of the
/// boundary in bold, and normal-derivative arrows on the boundary.
pub fn emit_disk_svg(samples: &[DiskSample], grid: PolarGrid, opts: &SvgOptions) -> String {
    let pt = |i: usize| Point::new(samples[i].phi[0], samples[i].phi[1]);
    let mut extent: Vec<Point> = (0..samples.len()).map(pt).collect();
    let boundary = grid.radii - 1;
    let arrows: Vec<(Point, Point)> = (0..grid.angles)
        .map(|k| {
            let s = &samples[grid.index(boundary, k)];
            let p = Point::new(s.phi[0], s.phi[1]);
            (p, p + opts.arrow_scale * crate::Vec2::new(s.d_nu[0], s.d_nu[1]))
        })
        .collect();
    extent.extend(arrows.iter().map(|a| a.1));
    let frame = Frame::new(&extent, opts.width);
    let mut out = String::new();
    frame.header(&mut out, opts);
    let _ = writeln!(out, "<g id=\"grid\" fill=\"none\" stroke=\"{}\" stroke-width=\"0.5\">", opts.edge_color);
    for j in 0..grid.radii {
        let ring: Vec<String> = (0..grid.angles).map(|k| frame.xy(&pt(grid.index(j, k)))).collect();
        let attrs = if j == boundary {
            format!(" id=\"boundary\" stroke=\"{}\" stroke-width=\"2.5\"", opts.boundary_color)
        } else {
            String::new()
        };
        let _ = writeln!(out, "<polygon points=\"{}\"{attrs}/>", ring.join(" "));
    }
    let centre = samples.len() - 1;
    for k in 0..grid.angles {
        let spoke: Vec<String> = std::iter::once(frame.xy(&pt(centre)))
            .chain((0..grid.radii).map(|j| frame.xy(&pt(grid.index(j, k)))))
            .collect();
        let _ = writeln!(out, "<polyline points=\"{}\"/>", spoke.join(" "));
    }
    out.push_str("</g>\n<g id=\"forces\">\n");
    for (p, q) in &arrows {
        frame.arrow(&mut out, p, q, true, opts);
    }
    out.push_str("</g>\n</svg>\n");
    out
}
