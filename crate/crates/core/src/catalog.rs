//! Generators for the standard bigraph families used throughout the suite.

use crate::bigraph::Bigraph;
use crate::error::{Error, Result};

/// The even cycle `C_{2n}` on parts `u1..un`, `v1..vn`:
/// `u1 - v1 - u2 - v2 - ... - un - vn - u1`.
pub fn even_cycle(n: usize) -> Result<Bigraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "even cycle needs length at least 4".into(),
        ));
    }
    let mut edges = Vec::with_capacity(2 * n);
    for i in 0..n {
        edges.push((i, i));
        edges.push(((i + 1) % n, i));
    }
    Bigraph::from_parts(n, n, &edges)
}

/// The complete bigraph `K_{p,q}`.
pub fn complete(p: usize, q: usize) -> Result<Bigraph> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidParameter(
            "complete bigraph needs nonempty parts".into(),
        ));
    }
    let mut edges = Vec::with_capacity(p * q);
    for i in 0..p {
        for j in 0..q {
            edges.push((i, j));
        }
    }
    Bigraph::from_parts(p, q, &edges)
}

/// `K_{n,n}` minus a perfect matching: edges `(u_i, v_j)` for `i ≠ j`.
pub fn complete_minus_matching(n: usize) -> Result<Bigraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "matching complement needs n >= 2".into(),
        ));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                edges.push((i, j));
            }
        }
    }
    Bigraph::from_parts(n, n, &edges)
}

/// The hypercube `Q_n`, bipartitioned by parity of the coordinate sum.
/// Vertices are labeled by their bit strings.
pub fn hypercube(n: usize) -> Result<Bigraph> {
    if n == 0 || n > 16 {
        return Err(Error::InvalidParameter("hypercube needs 1 <= n <= 16".into()));
    }
    let bits = |x: usize| -> String {
        (0..n)
            .rev()
            .map(|b| if x >> b & 1 == 1 { '1' } else { '0' })
            .collect()
    };
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for x in 0..1usize << n {
        if (x.count_ones() & 1) == 0 {
            even.push(x);
        } else {
            odd.push(x);
        }
    }
    let v1: Vec<String> = even.iter().map(|&x| bits(x)).collect();
    let v2: Vec<String> = odd.iter().map(|&x| bits(x)).collect();
    let mut edges = Vec::new();
    for &x in &even {
        for b in 0..n {
            let y = x ^ (1 << b);
            edges.push((bits(x), bits(y)));
        }
    }
    Bigraph::new(v1, v2, &edges)
}

/// The path with `k` edges, alternating `u1 - v1 - u2 - v2 - ...`.
pub fn path(k: usize) -> Result<Bigraph> {
    if k == 0 {
        return Err(Error::InvalidParameter("path needs at least one edge".into()));
    }
    // Vertex i of the path is u_{i/2+1} when i is even, v_{(i-1)/2+1} when odd.
    let n1 = k / 2 + 1;
    let n2 = k.div_ceil(2);
    let mut edges = Vec::with_capacity(k);
    for i in 0..k {
        let (a, b) = (i, i + 1);
        let (l, r) = if a % 2 == 0 { (a, b) } else { (b, a) };
        edges.push((l / 2, (r - 1) / 2));
    }
    Bigraph::from_parts(n1, n2, &edges)
}

/// The star `K_{1,k}`.
pub fn star(k: usize) -> Result<Bigraph> {
    complete(1, k)
}

/// Look up a generator by name, as used by the command line.
pub fn by_name(name: &str, params: &[usize]) -> Result<Bigraph> {
    match (name, params) {
        ("even_cycle", [n]) => even_cycle(*n),
        ("complete", [p, q]) => complete(*p, *q),
        ("complete_minus_matching", [n]) => complete_minus_matching(*n),
        ("hypercube", [n]) => hypercube(*n),
        ("path", [k]) => path(*k),
        ("star", [k]) => star(*k),
        _ => Err(Error::InvalidParameter(format!(
            "unknown catalog entry `{name}` with {} parameter(s)",
            params.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_cycle_counts() {
        for n in 2..=5 {
            let g = even_cycle(n).unwrap();
            assert_eq!(g.v1_count(), n);
            assert_eq!(g.v2_count(), n);
            assert_eq!(g.edge_count(), 2 * n);
            assert!(g.is_connected());
            assert!(g.vertices().all(|v| g.degree(v) == 2));
        }
        assert!(even_cycle(1).is_err());
    }

    #[test]
    fn complete_counts() {
        let g = complete(2, 3).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(g.is_connected());
    }

    #[test]
    fn matching_complement_counts() {
        let g = complete_minus_matching(3).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(g.is_connected());
        assert!(!g.has_edge(0, g.vertex_by_label("v1").unwrap()));
    }

    #[test]
    fn hypercube_counts() {
        let q3 = hypercube(3).unwrap();
        assert_eq!(q3.v1_count(), 4);
        assert_eq!(q3.v2_count(), 4);
        assert_eq!(q3.edge_count(), 12);
        assert!(q3.is_connected());
        assert!(q3.vertices().all(|v| q3.degree(v) == 3));
    }

    #[test]
    fn path_shape() {
        let p3 = path(3).unwrap();
        assert_eq!(p3.v1_count(), 2);
        assert_eq!(p3.v2_count(), 2);
        assert_eq!(p3.edge_count(), 3);
        // u1-v1, u2-v1, u2-v2
        assert!(p3.has_edge(0, 2));
        assert!(p3.has_edge(1, 2));
        assert!(p3.has_edge(1, 3));
    }

    #[test]
    fn by_name_dispatch() {
        assert!(by_name("even_cycle", &[3]).is_ok());
        assert!(by_name("nope", &[1]).is_err());
        assert!(by_name("even_cycle", &[]).is_err());
    }
}
