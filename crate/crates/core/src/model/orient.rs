use std::collections::{HashMap, VecDeque};

use super::{ModelError, RfsModel, Sheet};

/// Directed boundary edges of a facet loop, as (from, to) vertex pairs.
pub(crate) fn directed_edges(facet: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..facet.len()).map(move |i| (facet[i], facet[(i + 1) % facet.len()]))
}

/// Undirected edge key → incident facets with the edge direction each stores.
pub(crate) fn edge_incidence(sheet: &Sheet) -> HashMap<(usize, usize), Vec<(usize, bool)>> {
    let mut map: HashMap<(usize, usize), Vec<(usize, bool)>> = HashMap::new();
    for (f, facet) in sheet.facets.iter().enumerate() {
        for (a, b) in directed_edges(facet) {
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            map.entry(key).or_default().push((f, a < b));
        }
    }
    map
}

/// Connected components of a sheet's facets under shared pattern edges.
/// Components are listed by their lowest facet index.
pub(crate) fn facet_components(sheet: &Sheet) -> Vec<Vec<usize>> {
    let incidence = edge_incidence(sheet);
    let mut adj = vec![Vec::new(); sheet.facets.len()];
    for inc in incidence.values() {
        for i in 0..inc.len() {
            for j in i + 1..inc.len() {
                adj[inc[i].0].push(inc[j].0);
                adj[inc[j].0].push(inc[i].0);
            }
        }
    }
    let mut seen = vec![false; sheet.facets.len()];
    let mut out = Vec::new();
    for start in 0..sheet.facets.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut i = 0;
        while i < comp.len() {
            let f = comp[i];
            i += 1;
            for &g in &adj[f] {
                if !seen[g] {
                    seen[g] = true;
                    comp.push(g);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn orient_sheet(sheet_idx: usize, sheet: &Sheet) -> Result<Vec<bool>, ModelError> {
    let incidence = edge_incidence(sheet);
    // Per facet: list of (neighbor, same stored direction?)
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); sheet.facets.len()];
    let mut keys: Vec<_> = incidence.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let inc = &incidence[&key];
        for i in 0..inc.len() {
            for j in i + 1..inc.len() {
                let (fi, di) = inc[i];
                let (fj, dj) = inc[j];
                if fi == fj {
                    continue;
                }
                adj[fi].push((fj, di == dj));
                adj[fj].push((fi, di == dj));
            }
        }
    }
    let mut flip: Vec<Option<bool>> = vec![None; sheet.facets.len()];
    for start in 0..sheet.facets.len() {
        if flip[start].is_some() {
            continue;
        }
        flip[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            let ff = flip[f].unwrap();
            for &(g, same) in &adj[f] {
                let want = ff ^ same;
                match flip[g] {
                    None => {
                        flip[g] = Some(want);
                        queue.push_back(g);
                    }
                    Some(have) if have != want => {
                        return Err(ModelError::Orientation { sheet: sheet_idx, facet: g });
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(flip.into_iter().map(|f| f.unwrap_or(false)).collect())
}

/// Breadth-first orientation propagation from each sheet's seed facet.
///
/// Returns, per sheet and facet, whether the stored vertex order must be
/// reversed so that every shared edge appears in opposite order in its two
/// facets. Facets not reachable from the seed start a fresh propagation at
/// their lowest index, unflipped.
pub fn orient_facets(model: &RfsModel) -> Result<Vec<Vec<bool>>, ModelError> {
    model.sheets.iter().enumerate().map(|(s, sheet)| orient_sheet(s, sheet)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::Vec3;
    use crate::model::{FacetRef, SeedOrientation};

    fn sheet(vertices: Vec<[f64; 3]>, facets: Vec<Vec<usize>>) -> Sheet {
        Sheet {
            vertices: vertices.into_iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect(),
            edges: vec![],
            facets,
            seed_orientation: SeedOrientation::Ccw,
        }
    }

    #[test]
    fn same_order_neighbor_is_flipped() {
        let s = sheet(
            vec![[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.], [2., 0.5, 0.]],
            vec![vec![0, 1, 2, 3], vec![1, 2, 4]],
        );
        let model = RfsModel { sheets: vec![s], connections: vec![] };
        let map = orient_facets(&model).unwrap();
        assert_eq!(map, vec![vec![false, true]]);
        assert_eq!(model.oriented_facet(FacetRef::new(0, 1), &map), vec![4, 2, 1]);
    }

    #[test]
    fn consistent_grid_needs_no_flips() {
        // 3x3 vertex grid, 2x2 facets, all counterclockwise.
        let mut v = vec![];
        for j in 0..3 {
            for i in 0..3 {
                v.push([i as f64, j as f64, 0.0]);
            }
        }
        let f = |i: usize, j: usize| vec![j * 3 + i, j * 3 + i + 1, (j + 1) * 3 + i + 1, (j + 1) * 3 + i];
        let s = sheet(v, vec![f(0, 0), f(1, 0), f(0, 1), f(1, 1)]);
        let model = RfsModel { sheets: vec![s], connections: vec![] };
        assert_eq!(orient_facets(&model).unwrap(), vec![vec![false; 4]]);
    }

    #[test]
    fn twisted_strip_is_not_orientable() {
        // Five quads in a closed band; the last gluing reverses the rails.
        let mut v = vec![];
        for i in 0..5 {
            let a = i as f64 * std::f64::consts::TAU / 5.0;
            v.push([a.cos(), a.sin(), 0.0]);
            v.push([a.cos(), a.sin(), 1.0]);
        }
        let quad = |i: usize| {
            let (b0, t0) = (2 * i, 2 * i + 1);
            let (b1, t1) = if i == 4 { (1, 0) } else { (2 * i + 2, 2 * i + 3) };
            vec![b0, b1, t1, t0]
        };
        let s = sheet(v, (0..5).map(quad).collect());
        let model = RfsModel { sheets: vec![s], connections: vec![] };
        assert!(matches!(orient_facets(&model), Err(ModelError::Orientation { sheet: 0, .. })));
    }

    #[test]
    fn components_are_found() {
        let s = sheet(
            vec![[0., 0., 0.], [1., 0., 0.], [0., 1., 0.], [5., 0., 0.], [6., 0., 0.], [5., 1., 0.]],
            vec![vec![0, 1, 2], vec![3, 4, 5]],
        );
        assert_eq!(facet_components(&s), vec![vec![0], vec![1]]);
    }
}
