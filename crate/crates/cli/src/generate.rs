use clap::{Args, Subcommand};
use rfs_core::model::RfsModel;
use rfs_core::patterns::*;

/// Angles on the command line are in degrees.
#[derive(Debug, Subcommand)]
pub enum Pattern {
    /// Single-sheet Miura-ori.
    Miura(MiuraArgs),
    /// Two Miura sheets hinged along shared zigzag lines.
    StackedMiura(StackedArgs),
    /// Tubular Miura: two zigzag sheets soldered along flange rows.
    Tmp(TmpArgs),
    /// Flat ring of eight facets around a rectangular hole.
    Kirigami(KirigamiArgs),
    /// Miura-ori with thick panels.
    ThickMiura(ThickMiuraArgs),
    /// Two thick panels joined by one hinge on the top surface.
    ThickCrease(ThickCreaseArgs),
    /// Degree-4 vertex.
    Vertex(VertexArgs),
    /// Flat grid of unit squares.
    Grid(GridArgs),
}

#[derive(Debug, Args, Clone)]
pub struct MiuraArgs {
    #[arg(long, default_value_t = 1)]
    rows: usize,
    #[arg(long, default_value_t = 1)]
    cols: usize,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 60.0)]
    sector_angle: f64,
    #[arg(long, default_value_t = 0.0)]
    fold_height: f64,
}

impl MiuraArgs {
    fn params(&self) -> MiuraParams {
        MiuraParams {
            rows: self.rows,
            cols: self.cols,
            a: self.a,
            b: self.b,
            sector_angle: self.sector_angle.to_radians(),
            fold_height: self.fold_height,
        }
    }
}

#[derive(Debug, Args)]
pub struct StackedArgs {
    #[arg(long, default_value_t = 2)]
    nx: usize,
    #[arg(long, default_value_t = 2)]
    ny: usize,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 1.4)]
    b_bottom: f64,
    #[arg(long, default_value_t = 60.0)]
    sector_angle: f64,
    #[arg(long, default_value_t = 0.5)]
    fold_height: f64,
    /// Even grid lines to hinge along, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    link_lines: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct TmpArgs {
    #[arg(long, default_value_t = 2)]
    nx: usize,
    #[arg(long, default_value_t = 1)]
    units: usize,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 0.6)]
    b_flange: f64,
    #[arg(long, default_value_t = 1.0)]
    b_tube: f64,
    #[arg(long, default_value_t = 50.0)]
    flange_angle: f64,
    #[arg(long, default_value_t = 65.0)]
    tube_angle: f64,
    #[arg(long, default_value_t = 0.8)]
    zigzag_offset: f64,
}

#[derive(Debug, Args)]
pub struct KirigamiArgs {
    #[arg(long, default_value_t = 4.0)]
    width: f64,
    #[arg(long, default_value_t = 4.0)]
    height: f64,
    #[arg(long, default_value_t = 2.0)]
    hole_width: f64,
    #[arg(long, default_value_t = 2.0)]
    hole_height: f64,
}

#[derive(Debug, Args)]
pub struct ThickMiuraArgs {
    #[command(flatten)]
    miura: MiuraArgs,
    #[arg(long, default_value_t = 0.1)]
    thickness: f64,
}

#[derive(Debug, Args)]
pub struct ThickCreaseArgs {
    #[arg(long, default_value_t = 1.0)]
    size: f64,
    #[arg(long, default_value_t = 0.1)]
    thickness: f64,
}

#[derive(Debug, Args)]
pub struct VertexArgs {
    /// Four increasing crease directions, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [10.0, 100.0, 200.0, 280.0])]
    angles: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    length: f64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 2)]
    nx: usize,
    #[arg(long, default_value_t = 2)]
    ny: usize,
}

pub fn generate(p: &Pattern) -> Result<RfsModel, PatternError> {
    match p {
        Pattern::Miura(m) => gen_miura(&m.params()),
        Pattern::StackedMiura(s) => gen_stacked_miura(&StackedMiuraParams {
            nx: s.nx,
            ny: s.ny,
            a: s.a,
            b: s.b,
            b_bottom: s.b_bottom,
            sector_angle: s.sector_angle.to_radians(),
            fold_height: s.fold_height,
            link_lines: s.link_lines.clone(),
        }),
        Pattern::Tmp(t) => gen_tmp(&TmpParams {
            nx: t.nx,
            units: t.units,
            a: t.a,
            b_flange: t.b_flange,
            b_tube: t.b_tube,
            flange_angle: t.flange_angle.to_radians(),
            tube_angle: t.tube_angle.to_radians(),
            zigzag_offset: t.zigzag_offset,
        }),
        Pattern::Kirigami(k) => gen_kirigami_slit(&KirigamiParams {
            width: k.width,
            height: k.height,
            hole_width: k.hole_width,
            hole_height: k.hole_height,
        }),
        Pattern::ThickMiura(t) => gen_thick_miura(&ThickParams { miura: t.miura.params(), thickness: t.thickness }),
        Pattern::ThickCrease(t) => gen_thick_crease(t.size, t.thickness),
        Pattern::Vertex(v) => {
            let a = [v.angles[0], v.angles[1], v.angles[2], v.angles[3]].map(f64::to_radians);
            gen_vertex(a, v.length)
        }
        Pattern::Grid(g) => gen_grid(g.nx, g.ny),
    }
}
