//! Line-oriented text reports for `validate` and `analyze`.
//!
//! Every line is `key: value` or an indexed record (`loop 0: ...`). Numbers
//! are printed with fixed precision so reruns are byte-identical.

use std::fmt::Write;

use rfs_core::constraint::rank_and_dof;
use rfs_core::graph::{HingeOrigin, Perforation};
use rfs_core::liegroup::Vec3;
use rfs_core::model::ValidationReport;
use rfs_core::Analysis;

/// Fixed-precision float with negative zero folded to zero.
pub fn num(x: f64) -> String {
    let s = format!("{x:.9}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn vec3(v: &Vec3) -> String {
    format!("({}, {}, {})", num(v.x), num(v.y), num(v.z))
}

pub fn validation(report: &ValidationReport) -> String {
    let mut out = String::new();
    writeln!(out, "errors: {}", report.errors.len()).unwrap();
    for f in &report.errors {
        writeln!(out, "error {f}").unwrap();
    }
    writeln!(out, "warnings: {}", report.warnings.len()).unwrap();
    for f in &report.warnings {
        writeln!(out, "warning {f}").unwrap();
    }
    out
}

pub fn analysis(an: &Analysis, theta: &[f64]) -> String {
    let mut out = String::new();
    let w = &mut out;
    let g = &an.graph;
    let sys = &an.system;
    writeln!(w, "sheets: {}", an.model.sheets.len()).unwrap();
    writeln!(w, "facets: {}", an.model.facet_count()).unwrap();
    writeln!(w, "connections: {}", an.model.connections.len()).unwrap();
    writeln!(w, "warnings: {}", an.report.warnings.len()).unwrap();
    for f in &an.report.warnings {
        writeln!(w, "warning {f}").unwrap();
    }
    writeln!(w, "bodies: {}", g.nodes.len()).unwrap();
    writeln!(w, "hinges: {}", g.edges.len()).unwrap();
    writeln!(w, "components: {}", g.component_count()).unwrap();

    let basis = &sys.basis;
    writeln!(w, "loops: {}", basis.len()).unwrap();
    writeln!(w, "loops_non_perforated: {}", basis.non_perforated_count()).unwrap();
    writeln!(w, "loops_perforated: {}", basis.perforated_count()).unwrap();
    writeln!(w, "loop_weight_total: {}", basis.total_weight()).unwrap();
    for l in &basis.loops {
        let kind = match &l.perforation {
            Perforation::NonPerforated(p) => format!("non-perforated at {}", vec3(p)),
            Perforation::Perforated => "perforated".to_string(),
        };
        let crossings: Vec<String> = l
            .crossings
            .iter()
            .map(|&(h, d)| format!("{h}{}", if d > 0 { '+' } else { '-' }))
            .collect();
        writeln!(w, "loop {}: weight {}, {kind}, crossings [{}]", l.id, l.weight(), crossings.join(" ")).unwrap();
    }

    for (h, s) in g.edges.iter().zip(&sys.screws) {
        let origin = match h.origin {
            HingeOrigin::IntraSheet { sheet, .. } => format!("sheet {sheet}"),
            HingeOrigin::InterSheet { connection } => format!("connection {connection}"),
        };
        writeln!(
            w,
            "hinge {}: {origin}, pair ({}, {}), omega {}, q {}, v {}, polarity {}",
            s.hinge,
            s.oriented_pair.0,
            s.oriented_pair.1,
            vec3(&s.screw.omega),
            vec3(&h.axis_point),
            vec3(&s.screw.v),
            s.polarity_source.as_str()
        )
        .unwrap();
    }

    let a = sys.pfaffian(theta);
    let info = rank_and_dof(&a);
    writeln!(w, "active_hinges: {}", sys.active.active.len()).unwrap();
    writeln!(w, "free_hinges: {}", sys.active.free.len()).unwrap();
    writeln!(w, "A: {}x{}", a.a.nrows(), a.a.ncols()).unwrap();
    writeln!(w, "rank_tol: {:e}", a.rank_tolerance).unwrap();
    let residual = sys.residual(theta).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    writeln!(w, "residual: {residual:.3e}").unwrap();
    writeln!(w, "rank: {}", info.rank).unwrap();
    writeln!(w, "dof_active: {}", info.dof_active).unwrap();
    writeln!(w, "dof_total: {}", info.dof_total).unwrap();
    out
}
