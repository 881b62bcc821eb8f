//! Triangle meshes of sampled droplets, written as ASCII PLY.
//!
//! Each grid point becomes the vertex `|f| · (sin β cos α, sin β sin α, cos β)`
//! colored by the phase of `f`: red at 0, green at π, and the remaining hues
//! of the color wheel in between.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lisa::DropletLabel;
use crate::spin::C64;
use crate::tomo::{SampleSet, TomographyGrid};

const POLE_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-12;

/// Hue in degrees for a phase: 0 → 0° (red), π → 120° (green), back to
/// 360° through blue and magenta.
pub fn phase_hue(phase: f64) -> f64 {
    let p = phase.rem_euclid(2.0 * PI);
    if p <= PI {
        120.0 * p / PI
    } else {
        120.0 + 240.0 * (p - PI) / PI
    }
}

/// Fully saturated RGB color for a phase.
pub fn phase_color(phase: f64) -> [u8; 3] {
    let h = phase_hue(phase).rem_euclid(360.0) / 60.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let q = |v: f64| (v * 255.0).round() as u8;
    [q(r), q(g), q(b)]
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub colors: Vec<[u8; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Grid values behind the vertices, row-major in `(β, α)`.
    pub values: Vec<C64>,
    pub rows: usize,
    pub cols: usize,
}

impl SurfaceMesh {
    /// Builds a mesh from values on `grid`. Rows at `β = 0` and `β = π` are
    /// replaced by their α-average so each pole is a single point.
    pub fn from_grid(values: &[C64], grid: &TomographyGrid) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        let (rows, cols) = (grid.betas().len(), grid.alphas().len());
        let mut values = values.to_vec();
        for (bi, &b) in grid.betas().iter().enumerate() {
            if b.abs() < POLE_TOL || (b - PI).abs() < POLE_TOL {
                let row = &mut values[bi * cols..(bi + 1) * cols];
                let mean = row.iter().sum::<C64>() / cols as f64;
                row.fill(mean);
            }
        }
        let mut vertices = Vec::with_capacity(values.len());
        let mut colors = Vec::with_capacity(values.len());
        for (bi, ai, b, a) in grid.points() {
            let v = values[grid.index(bi, ai)];
            let r = v.norm();
            vertices.push([r * b.sin() * a.cos(), r * b.sin() * a.sin(), r * b.cos()]);
            colors.push(phase_color(v.im.atan2(v.re)));
        }
        let mut faces = Vec::new();
        for bi in 0..rows.saturating_sub(1) {
            for ai in 0..cols.saturating_sub(1) {
                let (p, q) = (grid.index(bi, ai), grid.index(bi, ai + 1));
                let (s, t) = (grid.index(bi + 1, ai), grid.index(bi + 1, ai + 1));
                faces.push([p, s, t]);
                faces.push([p, t, q]);
            }
        }
        Ok(Self {
            vertices,
            colors,
            faces,
            values,
            rows,
            cols,
        })
    }

    /// Whether every vertex sits at the origin.
    pub fn is_degenerate(&self) -> bool {
        self.values.iter().all(|v| v.norm() < ZERO_TOL)
    }

    pub fn write_ply<W: Write>(&self, mut w: W, comment: &str) -> Result<()> {
        writeln!(w, "ply")?;
        writeln!(w, "format ascii 1.0")?;
        if !comment.is_empty() {
            writeln!(w, "comment {comment}")?;
        }
        writeln!(w, "element vertex {}", self.vertices.len())?;
        for p in ["x", "y", "z"] {
            writeln!(w, "property float {p}")?;
        }
        for p in ["red", "green", "blue"] {
            writeln!(w, "property uchar {p}")?;
        }
        writeln!(w, "element face {}", self.faces.len())?;
        writeln!(w, "property list uchar int vertex_indices")?;
        writeln!(w, "end_header")?;
        for (v, c) in self.vertices.iter().zip(&self.colors) {
            writeln!(
                w,
                "{:.6} {:.6} {:.6} {} {} {}",
                v[0], v[1], v[2], c[0], c[1], c[2]
            )?;
        }
        for f in &self.faces {
            writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
        }
        Ok(())
    }

    pub fn save_ply(&self, path: &Path, comment: &str) -> Result<()> {
        let mut buf = Vec::new();
        self.write_ply(&mut buf, comment)?;
        std::fs::write(path, buf)?;
        Ok(())
    }
}

/// Catmull–Rom weights for the four neighbours of `t ∈ [0, 1]`.
fn catmull_rom(t: f64) -> [f64; 4] {
    let (t2, t3) = (t * t, t * t * t);
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Interpolates one axis of samples by `factor`; `periodic` wraps indices.
fn refine_axis(values: &[C64], factor: usize, periodic: bool) -> Vec<C64> {
    let n = values.len();
    if n < 2 || factor < 2 {
        return values.to_vec();
    }
    let at = |i: isize| -> C64 {
        if periodic {
            // the last sample repeats the first one
            values[i.rem_euclid(n as isize - 1) as usize]
        } else {
            values[i.clamp(0, n as isize - 1) as usize]
        }
    };
    let mut out = Vec::with_capacity((n - 1) * factor + 1);
    for (i, &v) in values[..n - 1].iter().enumerate() {
        out.push(v);
        for s in 1..factor {
            let w = catmull_rom(s as f64 / factor as f64);
            let i = i as isize;
            out.push(at(i - 1) * w[0] + at(i) * w[1] + at(i + 1) * w[2] + at(i + 2) * w[3]);
        }
    }
    out.push(values[n - 1]);
    out
}

fn refine_angles(angles: &[f64], factor: usize) -> Vec<f64> {
    if angles.len() < 2 || factor < 2 {
        return angles.to_vec();
    }
    let mut out = Vec::new();
    for w in angles.windows(2) {
        for s in 0..factor {
            out.push(w[0] + (w[1] - w[0]) * s as f64 / factor as f64);
        }
    }
    out.push(*angles.last().unwrap());
    out
}

/// Bicubic (Catmull–Rom) refinement of grid samples; every original sample
/// reappears unchanged at its original angles.
pub fn refine(
    values: &[C64],
    grid: &TomographyGrid,
    factor: usize,
) -> Result<(Vec<C64>, TomographyGrid)> {
    if factor == 0 {
        return Err(Error::InvalidArgument(
            "refinement factor must be at least 1".into(),
        ));
    }
    if values.len() != grid.len() {
        return Err(Error::InvalidArgument(
            "sample count does not match the grid".into(),
        ));
    }
    let (rows, cols) = (grid.betas().len(), grid.alphas().len());
    let alphas = grid.alphas();
    let periodic = cols > 2 && ((alphas[cols - 1] - alphas[0]) - 2.0 * PI).abs() < POLE_TOL;
    let wide: Vec<Vec<C64>> = (0..rows)
        .map(|r| refine_axis(&values[r * cols..(r + 1) * cols], factor, periodic))
        .collect();
    let new_cols = wide.first().map(Vec::len).unwrap_or(0);
    let columns: Vec<Vec<C64>> = (0..new_cols)
        .map(|c| {
            refine_axis(
                &wide.iter().map(|row| row[c]).collect::<Vec<_>>(),
                factor,
                false,
            )
        })
        .collect();
    let new_rows = columns.first().map(Vec::len).unwrap_or(0);
    let mut out = Vec::with_capacity(new_rows * new_cols);
    for r in 0..new_rows {
        for col in &columns {
            out.push(col[r]);
        }
    }
    let fine = TomographyGrid::new(
        refine_angles(grid.betas(), factor),
        refine_angles(alphas, factor),
    )?;
    Ok((out, fine))
}

/// Mesh of the droplet `f^{(ℓ)} = Σ_j f_j^{(ℓ)}` of a sample set.
pub fn droplet_mesh(
    set: &SampleSet,
    label: DropletLabel,
    refinement: usize,
) -> Result<SurfaceMesh> {
    if !set.labels().contains(&label) {
        return Err(Error::InvalidArgument(format!(
            "sample set has no droplet {label}"
        )));
    }
    let values = set.droplet_values(label);
    if refinement > 1 {
        let (fine, grid) = refine(&values, set.grid(), refinement)?;
        SurfaceMesh::from_grid(&fine, &grid)
    } else {
        SurfaceMesh::from_grid(&values, set.grid())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lisa::decompose;
    use crate::spin::{raising, single_spin, Axis};
    use crate::tomo::{scan, ScanOptions};

    #[test]
    fn colormap_anchors() {
        assert_eq!(phase_color(0.0), [255, 0, 0]);
        assert_eq!(phase_color(PI), [0, 255, 0]);
        assert_eq!(phase_color(-PI), [0, 255, 0]);
        assert_eq!(phase_hue(1.5 * PI), 240.0);
        assert_eq!(phase_color(1.5 * PI), [0, 0, 255]);
        assert!((phase_hue(2.0 * PI - 1e-9) - 360.0).abs() < 1e-6);
    }

    #[test]
    fn iz_droplet_has_two_lobes_touching_at_origin() {
        let iz = single_spin(1, 1, Axis::Z).unwrap();
        let set = scan(
            &iz,
            &[DropletLabel::Single(1)],
            &TomographyGrid::default(),
            &ScanOptions::analytic(),
        )
        .unwrap();
        let mesh = droplet_mesh(&set, DropletLabel::Single(1), 1).unwrap();
        assert_eq!(mesh.vertices.len(), 13 * 25);
        assert_eq!(mesh.faces.len(), 2 * 12 * 24);
        let north = mesh.vertices[0];
        let south = mesh.vertices[12 * 25];
        assert!(north[2] > 0.3 && south[2] < -0.3);
        assert_eq!(mesh.colors[0], [255, 0, 0]);
        assert_eq!(mesh.colors[12 * 25], [0, 255, 0]);
        let equator = mesh.vertices[6 * 25 + 3];
        assert!(equator.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn raising_operator_winds_once() {
        let set = scan(
            &raising(1),
            &[DropletLabel::Single(1)],
            &TomographyGrid::default(),
            &ScanOptions::analytic(),
        )
        .unwrap();
        let mesh = droplet_mesh(&set, DropletLabel::Single(1), 1).unwrap();
        let row = 6 * 25;
        let hues: Vec<f64> = (0..25)
            .map(|a| phase_hue(mesh.values[row + a].arg()))
            .collect();
        let mut turns = 0.0;
        for w in hues.windows(2) {
            let mut d = w[1] - w[0];
            if d > 180.0 {
                d -= 360.0;
            } else if d < -180.0 {
                d += 360.0;
            }
            turns += d;
        }
        assert!((turns.abs() - 360.0).abs() < 1e-6);
        assert!(mesh.values[0].norm() < 1e-12);
    }

    #[test]
    fn zero_droplet_is_degenerate() {
        let g = TomographyGrid::from_steps(45.0, 90.0).unwrap();
        let zeros = vec![C64::new(0.0, 0.0); g.len()];
        assert!(SurfaceMesh::from_grid(&zeros, &g).unwrap().is_degenerate());
        assert!(SurfaceMesh::from_grid(&zeros[1..], &g).is_err());
    }

    #[test]
    fn refinement_keeps_original_samples() {
        let a = single_spin(2, 1, Axis::X).unwrap() + single_spin(2, 2, Axis::Y).unwrap();
        let d = decompose(&a).unwrap();
        let g = TomographyGrid::default();
        let set = SampleSet::from_droplets(&d, &[DropletLabel::Single(1)], &g);
        let values = set.droplet_values(DropletLabel::Single(1));
        let (fine, fine_grid) = refine(&values, &g, 3).unwrap();
        assert_eq!(fine_grid.betas().len(), 37);
        assert_eq!(fine_grid.alphas().len(), 73);
        for (bi, ai, _, _) in g.points() {
            assert_eq!(
                fine[fine_grid.index(3 * bi, 3 * ai)],
                values[g.index(bi, ai)]
            );
        }
        let mid = fine_grid.index(10, 20);
        let exact = d
            .get(DropletLabel::Single(1))
            .unwrap()
            .evaluate(fine_grid.betas()[10], fine_grid.alphas()[20]);
        assert!((fine[mid] - exact).norm() < 5e-3);
        assert!(refine(&values, &g, 0).is_err());
    }

    #[test]
    fn ply_layout() {
        let g = TomographyGrid::from_steps(90.0, 180.0).unwrap();
        let values = vec![C64::new(1.0, 0.0); g.len()];
        let mesh = SurfaceMesh::from_grid(&values, &g).unwrap();
        let mut buf = Vec::new();
        mesh.write_ply(&mut buf, "droplet 1").unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("ply\nformat ascii 1.0\ncomment droplet 1\nelement vertex 9\n"));
        assert!(text.contains("element face 8\n"));
        assert_eq!(text.lines().count(), 13 + 9 + 8);
    }
}
