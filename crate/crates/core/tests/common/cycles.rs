use std::collections::VecDeque;

use rand::Rng;

/// Spanning forest by BFS from `root` first; returns the fundamental cycles as
/// edge bitsets.
pub fn fundamental_cycles(n: usize, edges: &[(usize, usize)], root: usize) -> Vec<u64> {
    let mut adj = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((i, b));
        adj[b].push((i, a));
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut tree = vec![false; edges.len()];
    for r in std::iter::once(root).chain(0..n) {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let mut q = VecDeque::from([r]);
        while let Some(v) = q.pop_front() {
            for &(e, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree[e] = true;
                    parent[w] = Some((v, e));
                    q.push_back(w);
                }
            }
        }
    }
    let path_to_root = |mut v: usize| {
        let mut bits = 0u64;
        while let Some((p, e)) = parent[v] {
            bits ^= 1 << e;
            v = p;
        }
        bits
    };
    (0..edges.len())
        .filter(|&e| !tree[e])
        .map(|e| {
            let (a, b) = edges[e];
            path_to_root(a) ^ path_to_root(b) ^ (1 << e)
        })
        .collect()
}

pub fn rank_gf2(vectors: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vectors {
        let mut x = v;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Minimum total weight over all bases of the cycle space. Every element of
/// the space is enumerated; for small dimensions every subset is tried, above
/// that the matroid greedy rule over the full space is used.
pub fn exhaustive_minimum(n: usize, edges: &[(usize, usize)]) -> usize {
    let fund = fundamental_cycles(n, edges, 0);
    let d = fund.len();
    let mut space: Vec<u64> = (1u64..1 << d)
        .map(|mask| (0..d).filter(|i| mask >> i & 1 == 1).fold(0, |acc, i| acc ^ fund[i]))
        .collect();
    space.sort_by_key(|v| (v.count_ones(), *v));
    if d <= 4 {
        let mut best = usize::MAX;
        let m = space.len();
        let mut idx: Vec<usize> = (0..d).collect();
        loop {
            let pick: Vec<u64> = idx.iter().map(|&i| space[i]).collect();
            if rank_gf2(&pick) == d {
                best = best.min(pick.iter().map(|v| v.count_ones() as usize).sum());
            }
            let Some(k) = (0..d).rev().find(|&k| idx[k] < m - d + k) else { break };
            idx[k] += 1;
            for j in k + 1..d {
                idx[j] = idx[j - 1] + 1;
            }
        }
        return if d == 0 { 0 } else { best };
    }
    let mut chosen: Vec<u64> = Vec::new();
    for v in space {
        let mut trial = chosen.clone();
        trial.push(v);
        if rank_gf2(&trial) == trial.len() {
            chosen = trial;
        }
        if chosen.len() == d {
            break;
        }
    }
    chosen.iter().map(|v| v.count_ones() as usize).sum()
}

pub fn random_connected_graph(rng: &mut rand::rngs::StdRng) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(3..=8);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    let target = rng.gen_range(n - 1..=14.min(n * (n - 1) / 2));
    while edges.len() < target {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !edges.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)) {
            edges.push((a.min(b), a.max(b)));
        }
    }
    (n, edges)
}

pub fn bits(loop_edges: &[usize]) -> u64 {
    loop_edges.iter().fold(0, |acc, e| acc | 1 << e)
}
