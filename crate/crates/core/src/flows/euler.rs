use super::{weak_component, FlowError, IntegerMultiDigraph};

/// Closed walk using every arc exactly its multiplicity many times
/// (Hierholzer). Starts at the smallest vertex with positive degree and
/// always leaves a vertex through its lowest-indexed remaining head.
///
/// Isolated vertices are allowed; only the support must be connected. An
/// arc-free graph yields an empty walk.
pub fn euler_circuit(g: &IntegerMultiDigraph) -> Result<Vec<(usize, usize)>, FlowError> {
    let n = g.n();
    if let Some(vertex) = g.first_unbalanced() {
        return Err(FlowError::NotEulerian {
            vertex,
            out_degree: g.out_degree(vertex),
            in_degree: g.in_degree(vertex),
        });
    }
    let Some(start) = (0..n).find(|&v| g.out_degree(v) > 0) else {
        return Ok(Vec::new());
    };
    let component = weak_component(g, start);
    if (0..n).any(|v| g.out_degree(v) > 0 && component.binary_search(&v).is_err()) {
        return Err(FlowError::Disconnected { component });
    }

    let mut remaining: Vec<u32> = (0..n * n).map(|i| g.get(i / n, i % n)).collect();
    let mut cursor = vec![0usize; n];
    let mut stack = vec![start];
    let mut reversed = Vec::with_capacity(g.total_multiplicity() as usize + 1);
    while let Some(&v) = stack.last() {
        while cursor[v] < n && remaining[v * n + cursor[v]] == 0 {
            cursor[v] += 1;
        }
        if cursor[v] < n {
            let w = cursor[v];
            remaining[v * n + w] -= 1;
            stack.push(w);
        } else {
            reversed.push(v);
            stack.pop();
        }
    }
    reversed.reverse();
    Ok(reversed.windows(2).map(|p| (p[0], p[1])).collect())
}
