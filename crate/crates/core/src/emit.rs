//! Serialization of traced curves (CSV/JSON), SVG figure rendering, and the
//! parabolic sweep of a generating curve into a quad mesh (OBJ).

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::odetrace::GeneratingCurve;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("curve has no samples")]
    EmptyCurve,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveFormat {
    Csv,
    Json,
}

#[derive(Serialize)]
struct CurveDocument<'a> {
    spec: &'a crate::params::WeingartenSpec,
    ic: &'a crate::params::InitialConditions,
    samples: Vec<[f64; 4]>,
    left_end: &'a crate::odetrace::TerminationReason,
    right_end: &'a crate::odetrace::TerminationReason,
}

/// Serialize a curve. CSV has one `s,x,z,theta` header row and 17-significant-
/// digit values so samples round-trip bit-exactly; JSON carries the spec,
/// initial conditions, 4-tuple samples, and both termination reasons.
/// Returns the byte count written.
pub fn write_curve(
    curve: &GeneratingCurve,
    format: CurveFormat,
    sink: &mut dyn Write,
) -> Result<usize, EmitError> {
    if curve.samples.is_empty() {
        return Err(EmitError::EmptyCurve);
    }
    let bytes = match format {
        CurveFormat::Csv => {
            let mut out = String::from("s,x,z,theta\n");
            for p in &curve.samples {
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    p.s, p.x, p.z, p.theta
                ));
            }
            out.into_bytes()
        }
        CurveFormat::Json => {
            let doc = CurveDocument {
                spec: &curve.spec,
                ic: &curve.ic,
                samples: curve
                    .samples
                    .iter()
                    .map(|p| [p.s, p.x, p.z, p.theta])
                    .collect(),
                left_end: &curve.left_end,
                right_end: &curve.right_end,
            };
            let mut v = serde_json::to_vec_pretty(&doc)?;
            v.push(b'\n');
            v
        }
    };
    sink.write_all(&bytes)?;
    Ok(bytes.len())
}

/// Figure styling: caption text and pixel width of the rendered viewport.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureStyle {
    pub caption: String,
    pub width_px: f64,
}

impl Default for FigureStyle {
    fn default() -> Self {
        FigureStyle {
            caption: String::new(),
            width_px: 640.0,
        }
    }
}

const CURVE_COLORS: [&str; 4] = ["#1f5fa8", "#c23b22", "#2e8540", "#8444b0"];

/// Render curves as polylines in the (x, z) plane: equal-aspect mapping, the
/// ideal boundary z = 0 drawn as a horizontal axis and always inside the
/// viewport, bounding box padded 10%. Deterministic text for identical input.
pub fn render_svg(curves: &[GeneratingCurve], style: &FigureStyle) -> Result<String, EmitError> {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut z_max = f64::NEG_INFINITY;
    for c in curves {
        if c.samples.is_empty() {
            return Err(EmitError::EmptyCurve);
        }
        for p in &c.samples {
            x_min = x_min.min(p.x);
            x_max = x_max.max(p.x);
            z_max = z_max.max(p.z);
        }
    }
    if curves.is_empty() {
        (x_min, x_max, z_max) = (-1.0, 1.0, 1.0);
    }
    let z_min = 0.0; // the axis is always included
    let pad_x = 0.1 * (x_max - x_min).max(1e-9);
    let pad_z = 0.1 * (z_max - z_min).max(1e-9);
    let (x_lo, x_hi) = (x_min - pad_x, x_max + pad_x);
    let (z_lo, z_hi) = (z_min - pad_z, z_max + pad_z);

    let caption_h = if style.caption.is_empty() { 0.0 } else { 28.0 };
    let scale = style.width_px / (x_hi - x_lo);
    let height_px = scale * (z_hi - z_lo) + caption_h;
    let px = |x: f64| (x - x_lo) * scale;
    let py = |z: f64| (z_hi - z) * scale;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{:.6}\" height=\"{:.6}\" viewBox=\"0 0 {:.6} {:.6}\">\n",
        style.width_px, height_px, style.width_px, height_px
    ));
    svg.push_str(&format!(
        "  <line x1=\"0\" y1=\"{y:.6}\" x2=\"{w:.6}\" y2=\"{y:.6}\" \
         stroke=\"#444444\" stroke-width=\"1\"/>\n",
        y = py(0.0),
        w = style.width_px
    ));
    for (i, c) in curves.iter().enumerate() {
        let color = CURVE_COLORS[i % CURVE_COLORS.len()];
        let mut points = String::new();
        for p in &c.samples {
            points.push_str(&format!("{:.6},{:.6} ", px(p.x), py(p.z)));
        }
        points.pop();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
             points=\"{points}\"/>\n"
        ));
    }
    if !style.caption.is_empty() {
        svg.push_str(&format!(
            "  <text x=\"{:.6}\" y=\"{:.6}\" text-anchor=\"middle\" \
             font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
            0.5 * style.width_px,
            height_px - 10.0,
            xml_escape(&style.caption)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Quad mesh of the parabolic sweep X(s, t) = (x(s), t, z(s)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    /// Row-major: vertex (i, j) at index i*cols + j.
    pub vertices: Vec<[f64; 3]>,
    /// Quads as 0-based vertex index quadruples, consistently oriented.
    pub faces: Vec<[usize; 4]>,
    pub rows: usize,
    pub cols: usize,
}

/// Sweep the generating curve along the translation direction: one mesh row
/// per curve sample, `cols` uniform stations on `[-t_half_width, t_half_width]`.
pub fn sweep_mesh(
    curve: &GeneratingCurve,
    t_half_width: f64,
    cols: usize,
) -> Result<SurfaceMesh, EmitError> {
    if curve.samples.is_empty() {
        return Err(EmitError::EmptyCurve);
    }
    assert!(cols >= 2, "need at least two sweep stations");
    assert!(t_half_width > 0.0, "sweep half-width must be positive");
    let rows = curve.samples.len();
    let mut vertices = Vec::with_capacity(rows * cols);
    for p in &curve.samples {
        for j in 0..cols {
            let t = -t_half_width + 2.0 * t_half_width * j as f64 / (cols - 1) as f64;
            vertices.push([p.x, t, p.z]);
        }
    }
    let mut faces = Vec::with_capacity((rows - 1) * (cols - 1));
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            let a = i * cols + j;
            faces.push([a, a + cols, a + cols + 1, a + 1]);
        }
    }
    Ok(SurfaceMesh {
        vertices,
        faces,
        rows,
        cols,
    })
}

/// Write the mesh as text OBJ: `v x y z` then `f a b c d` with 1-based
/// indices, 9 significant digits. Returns the byte count written.
pub fn write_obj(mesh: &SurfaceMesh, sink: &mut dyn Write) -> Result<usize, EmitError> {
    let mut out = String::new();
    for v in &mesh.vertices {
        out.push_str(&format!("v {:.8e} {:.8e} {:.8e}\n", v[0], v[1], v[2]));
    }
    for f in &mesh.faces {
        out.push_str(&format!(
            "f {} {} {} {}\n",
            f[0] + 1,
            f[1] + 1,
            f[2] + 1,
            f[3] + 1
        ));
    }
    sink.write_all(out.as_bytes())?;
    Ok(out.len())
}
