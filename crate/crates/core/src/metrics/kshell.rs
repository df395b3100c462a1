//! Core decomposition with the linear-time bucket algorithm of Batagelj and
//! Zaversnik.

use crate::graph::Graph;

/// Shell index of every node: the largest `k` whose k-core contains it.
pub fn k_shell(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let mut deg: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let max_deg = *deg.iter().max().unwrap();

    // bin[d] = start of the degree-d block in `order`
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for slot in bin.iter_mut() {
        let count = *slot;
        *slot = start;
        start += count;
    }
    let mut order = vec![0usize; n];
    let mut pos = vec![0usize; n];
    for u in 0..n {
        pos[u] = bin[deg[u]];
        order[pos[u]] = u;
        bin[deg[u]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let u = order[i];
        for &v in g.neighbors(u) {
            if deg[v] > deg[u] {
                // move v to the front of its block, then shrink its degree
                let dv = deg[v];
                let pv = pos[v];
                let pw = bin[dv];
                let w = order[pw];
                if v != w {
                    order.swap(pv, pw);
                    pos[v] = pw;
                    pos[w] = pv;
                }
                bin[dv] += 1;
                deg[v] -= 1;
            }
        }
    }
    deg
}
