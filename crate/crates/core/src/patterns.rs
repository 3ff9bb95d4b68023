//! Deterministic generators for test structures.
//!
//! Grid generators lay facets out on a zigzag grid: vertex (i, j) sits at
//! `(i·S, Y_j + [i odd]·V, Z_j)`, where row j advances by `(0, L_j, Z_j+1 − Z_j)`.
//! Every facet is then a parallelogram with a zigzag side of length
//! `a = √(S² + V²)` and a straight side of length `b_j`; the sheet folds
//! rigidly as V varies.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::liegroup::Vec3;
use crate::model::{Connection, ConnectionKind, FacetRef, RfsModel, SeedOrientation, Sheet};

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("invalid pattern parameters: {0}")]
    Invalid(String),
    #[error("incompatible layer dimensions: {0}")]
    Incompatible(String),
}

fn check(cond: bool, msg: &str) -> Result<(), PatternError> {
    if cond {
        Ok(())
    } else {
        Err(PatternError::Invalid(msg.to_string()))
    }
}

/// One row of a zigzag grid: straight-side advance (L, ΔZ).
#[derive(Clone, Copy, Debug)]
struct Row {
    l: f64,
    dz: f64,
}

/// Rows for straight side `b` and sector angle `alpha` at zigzag offset `v`.
fn row(a: f64, b: f64, alpha: f64, v: f64, up: bool) -> Result<Row, PatternError> {
    let l = a * b * alpha.cos() / v;
    if l > b * (1.0 + 1e-12) {
        return Err(PatternError::Invalid(format!(
            "zigzag offset {v} is below the flat limit {} for sector angle {alpha}",
            a * alpha.cos()
        )));
    }
    let h = (b * b - l * l).max(0.0).sqrt();
    Ok(Row { l, dz: if up { h } else { -h } })
}

/// Grid sheet with `nx` facet columns and one facet row per entry of `rows`.
fn zigzag_sheet(nx: usize, s: f64, v: f64, rows: &[Row], seed: SeedOrientation) -> Sheet {
    let ny = rows.len();
    let w = nx + 1;
    let mut vertices = Vec::with_capacity(w * (ny + 1));
    let (mut y, mut z) = (0.0, 0.0);
    for j in 0..=ny {
        for i in 0..=nx {
            let dy = if i % 2 == 1 { v } else { 0.0 };
            vertices.push(Vec3::new(i as f64 * s, y + dy, z));
        }
        if j < ny {
            y += rows[j].l;
            z += rows[j].dz;
        }
    }
    let id = |i: usize, j: usize| j * w + i;
    let mut edges = Vec::new();
    for j in 0..=ny {
        for i in 0..nx {
            edges.push([id(i, j), id(i + 1, j)]);
        }
    }
    for j in 0..ny {
        for i in 0..=nx {
            edges.push([id(i, j), id(i, j + 1)]);
        }
    }
    let mut facets = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let quad = vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            facets.push(quad);
        }
    }
    Sheet { vertices, edges, facets, seed_orientation: seed }
}

fn grid_facet(nx: usize, i: usize, j: usize) -> usize {
    j * nx + i
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiuraParams {
    pub rows: usize,
    pub cols: usize,
    /// Zigzag side length.
    pub a: f64,
    /// Straight side length.
    pub b: f64,
    /// Acute parallelogram angle, radians in (0, π/2).
    pub sector_angle: f64,
    /// Home fold height of each row (0 = flat).
    pub fold_height: f64,
}

impl Default for MiuraParams {
    fn default() -> Self {
        Self { rows: 1, cols: 1, a: 1.0, b: 1.0, sector_angle: 60f64.to_radians(), fold_height: 0.0 }
    }
}

impl MiuraParams {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, ..Self::default() }
    }

    fn validate(&self) -> Result<(), PatternError> {
        check(self.rows >= 1 && self.cols >= 1, "rows and cols must be at least 1")?;
        check(self.a > 0.0 && self.b > 0.0, "panel lengths must be positive")?;
        check(
            self.sector_angle > 0.0 && self.sector_angle < FRAC_PI_2,
            "sector angle must lie strictly between 0 and π/2",
        )?;
        check(self.fold_height >= 0.0 && self.fold_height < self.b, "fold height must lie in [0, b)")
    }

    /// Zigzag offset V for the home fold height.
    fn zigzag_offset(&self) -> f64 {
        let l = (self.b * self.b - self.fold_height * self.fold_height).sqrt();
        self.a * self.b * self.sector_angle.cos() / l
    }
}

/// Facets `(rows+1)(cols+1)`, hinges `2·rows·cols + rows + cols`, loops `rows·cols`.
pub fn gen_miura(p: &MiuraParams) -> Result<RfsModel, PatternError> {
    p.validate()?;
    miura_at_offset(p, p.zigzag_offset())
}

/// Miura sheet at zigzag offset `v` (flat at `a·cos α`); used for sampling
/// folded configurations with known geometry.
pub fn miura_at_offset(p: &MiuraParams, v: f64) -> Result<RfsModel, PatternError> {
    p.validate()?;
    check(v > 0.0 && v < p.a, "zigzag offset must lie in (0, a)")?;
    let s = (p.a * p.a - v * v).sqrt();
    let rows: Vec<Row> = (0..=p.rows)
        .map(|j| row(p.a, p.b, p.sector_angle, v, j % 2 == 0))
        .collect::<Result<_, _>>()?;
    Ok(RfsModel { sheets: vec![zigzag_sheet(p.cols + 1, s, v, &rows, SeedOrientation::Ccw)], connections: vec![] })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StackedMiuraParams {
    /// Facet columns per sheet.
    pub nx: usize,
    /// Facet rows per sheet.
    pub ny: usize,
    pub a: f64,
    /// Straight side of the top sheet.
    pub b: f64,
    /// Straight side of the bottom sheet.
    pub b_bottom: f64,
    /// Top sheet sector angle; the bottom angle follows from compatibility.
    pub sector_angle: f64,
    /// Home fold height of the top sheet (> 0).
    pub fold_height: f64,
    /// Grid lines (even indices) along which the sheets are hinged; `None` = all even lines.
    pub link_lines: Option<Vec<usize>>,
}

impl Default for StackedMiuraParams {
    fn default() -> Self {
        Self {
            nx: 2,
            ny: 2,
            a: 1.0,
            b: 1.0,
            b_bottom: 1.4,
            sector_angle: 60f64.to_radians(),
            fold_height: 0.5,
            link_lines: None,
        }
    }
}

/// Two Miura sheets mirrored through the plane of their shared zigzag lines
/// and hinged together along them.
///
/// Hinges: `2·((nx−1)·ny + nx·(ny−1)) + nx·|link lines|`.
pub fn gen_stacked_miura(p: &StackedMiuraParams) -> Result<RfsModel, PatternError> {
    check(p.nx >= 1 && p.ny >= 1, "nx and ny must be at least 1")?;
    check(p.a > 0.0 && p.b > 0.0 && p.b_bottom > 0.0, "panel lengths must be positive")?;
    check(p.sector_angle > 0.0 && p.sector_angle < FRAC_PI_2, "sector angle must lie in (0, π/2)")?;
    check(p.fold_height > 0.0 && p.fold_height < p.b, "fold height must lie in (0, b)")?;
    let bc = p.b * p.sector_angle.cos();
    if p.b_bottom <= bc {
        return Err(PatternError::Incompatible(format!(
            "bottom straight side {} must exceed b·cos α = {bc}",
            p.b_bottom
        )));
    }
    let alpha_bottom = (bc / p.b_bottom).acos();
    let l = (p.b * p.b - p.fold_height * p.fold_height).sqrt();
    let h_bottom2 = p.b_bottom * p.b_bottom - l * l;
    if h_bottom2 <= 0.0 {
        return Err(PatternError::Incompatible("bottom sheet would have to stretch to match".into()));
    }
    let v = p.a * p.b * p.sector_angle.cos() / l;
    check(v < p.a, "layers cannot fold to the requested height")?;
    let s = (p.a * p.a - v * v).sqrt();
    let top_rows: Vec<Row> =
        (0..p.ny).map(|j| row(p.a, p.b, p.sector_angle, v, j % 2 == 0)).collect::<Result<_, _>>()?;
    let bottom_rows: Vec<Row> =
        (0..p.ny).map(|j| row(p.a, p.b_bottom, alpha_bottom, v, j % 2 == 1)).collect::<Result<_, _>>()?;
    let top = zigzag_sheet(p.nx, s, v, &top_rows, SeedOrientation::Ccw);
    let bottom = zigzag_sheet(p.nx, s, v, &bottom_rows, SeedOrientation::Cw);

    let lines: Vec<usize> = match &p.link_lines {
        Some(l) => l.clone(),
        None => (0..=p.ny).step_by(2).collect(),
    };
    for &j in &lines {
        check(j % 2 == 0 && j <= p.ny, "link lines must be even grid lines within the sheet")?;
    }
    let mut connections = Vec::new();
    for &j in &lines {
        let r = if j < p.ny { j } else { j - 1 };
        for i in 0..p.nx {
            let f = grid_facet(p.nx, i, r);
            connections.push(Connection {
                a: FacetRef::new(0, f),
                b: FacetRef::new(1, f),
                kind: ConnectionKind::Hinging,
                hinge_edge: None,
            });
        }
    }
    Ok(RfsModel { sheets: vec![top, bottom], connections })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TmpParams {
    /// Facet columns (≥ 2).
    pub nx: usize,
    /// Tube units stacked along the zigzag direction.
    pub units: usize,
    pub a: f64,
    pub b_flange: f64,
    pub b_tube: f64,
    pub flange_angle: f64,
    pub tube_angle: f64,
    /// Home zigzag offset; must exceed `a·cos` of both angles.
    pub zigzag_offset: f64,
}

impl Default for TmpParams {
    fn default() -> Self {
        Self {
            nx: 2,
            units: 1,
            a: 1.0,
            b_flange: 0.6,
            b_tube: 1.0,
            flange_angle: 50f64.to_radians(),
            tube_angle: 65f64.to_radians(),
            zigzag_offset: 0.8,
        }
    }
}

/// Two zigzag sheets whose flange rows coincide and are soldered; between
/// flanges the sheets bulge apart to form tubes.
///
/// Per sheet: rows F,(U,D,F)×units. Solder records: `nx·(units+1)`.
pub fn gen_tmp(p: &TmpParams) -> Result<RfsModel, PatternError> {
    check(p.nx >= 2 && p.units >= 1, "nx ≥ 2 and units ≥ 1 required")?;
    check(p.a > 0.0 && p.b_flange > 0.0 && p.b_tube > 0.0, "panel lengths must be positive")?;
    for ang in [p.flange_angle, p.tube_angle] {
        check(ang > 0.0 && ang < FRAC_PI_2, "sector angles must lie in (0, π/2)")?;
    }
    check(p.zigzag_offset < p.a, "zigzag offset must be below a")?;
    let v = p.zigzag_offset;
    let s = (p.a * p.a - v * v).sqrt();
    let flange = |up| row(p.a, p.b_flange, p.flange_angle, v, up);
    let tube = |up| row(p.a, p.b_tube, p.tube_angle, v, up);
    // Flanges alternate down/up so consecutive units mirror each other.
    let mut top = vec![flange(false)?];
    let mut bottom = vec![flange(false)?];
    for u in 1..=p.units {
        top.extend([tube(true)?, tube(false)?, flange(u % 2 == 1)?]);
        bottom.extend([tube(false)?, tube(true)?, flange(u % 2 == 1)?]);
    }
    let a_sheet = zigzag_sheet(p.nx, s, v, &top, SeedOrientation::Ccw);
    let b_sheet = zigzag_sheet(p.nx, s, v, &bottom, SeedOrientation::Cw);
    let mut connections = Vec::new();
    for u in 0..=p.units {
        for i in 0..p.nx {
            let f = grid_facet(p.nx, i, 3 * u);
            connections.push(Connection {
                a: FacetRef::new(0, f),
                b: FacetRef::new(1, f),
                kind: ConnectionKind::Soldering,
                hinge_edge: None,
            });
        }
    }
    Ok(RfsModel { sheets: vec![a_sheet, b_sheet], connections })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KirigamiParams {
    pub width: f64,
    pub height: f64,
    pub hole_width: f64,
    pub hole_height: f64,
}

impl Default for KirigamiParams {
    fn default() -> Self {
        Self { width: 4.0, height: 4.0, hole_width: 2.0, hole_height: 2.0 }
    }
}

/// Flat ring of eight facets (four corners, four sides) around a centered
/// rectangular hole. Eight hinges, one perforated loop.
pub fn gen_kirigami_slit(p: &KirigamiParams) -> Result<RfsModel, PatternError> {
    check(p.hole_width > 0.0 && p.hole_height > 0.0, "hole dimensions must be positive")?;
    check(p.width > p.hole_width && p.height > p.hole_height, "hole must fit inside the sheet")?;
    let xs = [0.0, (p.width - p.hole_width) / 2.0, (p.width + p.hole_width) / 2.0, p.width];
    let ys = [0.0, (p.height - p.hole_height) / 2.0, (p.height + p.hole_height) / 2.0, p.height];
    let id = |i: usize, j: usize| j * 4 + i;
    let vertices: Vec<Vec3> = (0..4).flat_map(|j| (0..4).map(move |i| Vec3::new(xs[i], ys[j], 0.0))).collect();
    // Ring order, counterclockwise, starting at the lower-left corner.
    let cells = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)];
    let facets: Vec<Vec<usize>> =
        cells.iter().map(|&(i, j)| vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]).collect();
    let mut edges: Vec<[usize; 2]> = Vec::new();
    for f in &facets {
        for k in 0..4 {
            let (a, b) = (f[k], f[(k + 1) % 4]);
            let e = [a.min(b), a.max(b)];
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
    }
    Ok(RfsModel {
        sheets: vec![Sheet { vertices, edges, facets, seed_orientation: SeedOrientation::Ccw }],
        connections: vec![],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThickParams {
    pub miura: MiuraParams,
    /// Panel thickness; hinges lie on the top surface.
    pub thickness: f64,
}

impl Default for ThickParams {
    fn default() -> Self {
        Self { miura: MiuraParams::default(), thickness: 0.1 }
    }
}

/// Thick panels built from a flat thin sheet of facets.
///
/// Sheet 0 holds the top faces (sharing edges, so they carry the hinges).
/// Sheet 1 holds the bottom faces and sheet 2 the side walls, each panel with
/// its own vertices; both are soldered to the matching top face.
fn thicken(thin: &Sheet, t: f64) -> RfsModel {
    let up = Vec3::new(0.0, 0.0, t / 2.0);
    let mut top = thin.clone();
    for v in &mut top.vertices {
        *v += up;
    }
    let mut bottom = Sheet { seed_orientation: SeedOrientation::Cw, ..Sheet::default() };
    let mut sides = Sheet { seed_orientation: SeedOrientation::Ccw, ..Sheet::default() };
    let mut connections = Vec::new();
    for (f, facet) in thin.facets.iter().enumerate() {
        let k = facet.len();
        let base = bottom.vertices.len();
        bottom.vertices.extend(facet.iter().map(|&i| thin.vertices[i] - up));
        bottom.facets.push((0..k).map(|m| base + m).collect());
        for m in 0..k {
            bottom.edges.push([base + m, base + (m + 1) % k]);
        }
        connections.push(Connection {
            a: FacetRef::new(0, f),
            b: FacetRef::new(1, f),
            kind: ConnectionKind::Soldering,
            hinge_edge: None,
        });

        let sbase = sides.vertices.len();
        sides.vertices.extend(facet.iter().map(|&i| thin.vertices[i] + up));
        sides.vertices.extend(facet.iter().map(|&i| thin.vertices[i] - up));
        for m in 0..k {
            let n = (m + 1) % k;
            let (t0, t1, b0, b1) = (sbase + m, sbase + n, sbase + k + m, sbase + k + n);
            sides.facets.push(vec![t0, b0, b1, t1]);
            sides.edges.extend([[t0, b0], [b0, b1], [b1, t1], [t1, t0]]);
            connections.push(Connection {
                a: FacetRef::new(0, f),
                b: FacetRef::new(2, sides.facets.len() - 1),
                kind: ConnectionKind::Soldering,
                hinge_edge: None,
            });
        }
    }
    RfsModel { sheets: vec![top, bottom, sides], connections }
}

/// Thick-panel Miura: flat home, hinges shifted to the top surface.
pub fn gen_thick_miura(p: &ThickParams) -> Result<RfsModel, PatternError> {
    check(p.thickness > 0.0, "thickness must be positive")?;
    let thin = gen_miura(&MiuraParams { fold_height: 0.0, ..p.miura.clone() })?;
    Ok(thicken(&thin.sheets[0], p.thickness))
}

/// Two thick square panels of side `size` sharing one top-surface hinge along x = 0.
pub fn gen_thick_crease(size: f64, thickness: f64) -> Result<RfsModel, PatternError> {
    check(size > 0.0 && thickness > 0.0, "size and thickness must be positive")?;
    let v = |x: f64, y: f64| Vec3::new(x, y, 0.0);
    let thin = Sheet {
        vertices: vec![v(-size, 0.0), v(0.0, 0.0), v(0.0, size), v(-size, size), v(size, 0.0), v(size, size)],
        edges: vec![[0, 1], [1, 2], [2, 3], [3, 0], [1, 4], [4, 5], [5, 2]],
        facets: vec![vec![0, 1, 2, 3], vec![1, 4, 5, 2]],
        seed_orientation: SeedOrientation::Ccw,
    };
    Ok(thicken(&thin, thickness))
}

/// Four parallelogram facets around one interior vertex at the origin, with
/// creases along the given directions (radians, increasing, spanning < π apart).
pub fn gen_vertex(crease_angles: [f64; 4], length: f64) -> Result<RfsModel, PatternError> {
    check(length > 0.0, "crease length must be positive")?;
    for k in 0..4 {
        let next = if k == 3 { crease_angles[0] + std::f64::consts::TAU } else { crease_angles[k + 1] };
        let sector = next - crease_angles[k];
        check(sector > 0.0 && sector < std::f64::consts::PI, "sector angles must lie in (0, π)")?;
    }
    let dirs: Vec<Vec3> = crease_angles.iter().map(|a| Vec3::new(a.cos(), a.sin(), 0.0) * length).collect();
    let mut vertices = vec![Vec3::zeros()];
    vertices.extend(dirs.iter().copied());
    vertices.extend((0..4).map(|k| dirs[k] + dirs[(k + 1) % 4]));
    let facets: Vec<Vec<usize>> = (0..4).map(|k| vec![0, 1 + k, 5 + k, 1 + (k + 1) % 4]).collect();
    let mut edges: Vec<[usize; 2]> = (0..4).map(|k| [0, 1 + k]).collect();
    for k in 0..4 {
        edges.push([1 + k, 5 + k]);
        edges.push([5 + k, 1 + (k + 1) % 4]);
    }
    Ok(RfsModel {
        sheets: vec![Sheet { vertices, edges, facets, seed_orientation: SeedOrientation::Ccw }],
        connections: vec![],
    })
}

/// Flat grid of unit squares, `nx` by `ny` facets.
pub fn gen_grid(nx: usize, ny: usize) -> Result<RfsModel, PatternError> {
    check(nx >= 1 && ny >= 1, "grid needs at least one facet")?;
    let rows = vec![Row { l: 1.0, dz: 0.0 }; ny];
    Ok(RfsModel {
        sheets: vec![zigzag_sheet(nx, 1.0, 0.0, &rows, SeedOrientation::Ccw)],
        connections: vec![],
    })
}
