#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use roebench::double::{validate_double, Bridge, DoubleMetric};
use roebench::metric::{MetricTower, Point};
use roebench::Dist;

/// Shortest-path metric of a random connected weighted graph on `n` points.
/// Edge weights are multiples of 1/2 up to `max_half_weight / 2`.
pub fn random_graph_tower(rng: &mut impl Rng, n: usize, edge_prob: f64, max_half_weight: i64) -> MetricTower {
    const INF: i64 = i64::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for i in 1..n {
        // A random spanning tree keeps the graph connected.
        let j = rng.gen_range(0..i);
        let w = rng.gen_range(1..=max_half_weight);
        d[i][j] = w;
        d[j][i] = w;
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_prob) {
                let w = rng.gen_range(1..=max_half_weight).min(d[i][j]);
                d[i][j] = w;
                d[j][i] = w;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let points = (0..n as i64).map(Point).collect();
    let matrix = d.iter().map(|row| row.iter().map(|&v| Dist::new(v, 2).unwrap()).collect()).collect();
    MetricTower::from_matrix(points, matrix, None).unwrap()
}

pub fn diameter(tower: &MetricTower) -> Dist {
    tower.table(tower.top()).unwrap().max_value().unwrap()
}

/// A valid double built from bridges: short diagonal bridges `(a, a)` plus a
/// few arbitrary bridges long enough (`≥ diameter`) to keep every mixed
/// triangle inequality.
pub fn random_double(rng: &mut impl Rng, base: &Arc<MetricTower>) -> DoubleMetric {
    let pts = base.points();
    let diam = diameter(base);
    let mut bridges = Vec::new();
    let k = rng.gen_range(1..=pts.len().min(8));
    for &a in pts.choose_multiple(rng, k) {
        bridges.push(Bridge { source: a, target: a, length: Dist::new(rng.gen_range(1..=4), 2).unwrap() });
    }
    for _ in 0..rng.gen_range(0..3) {
        let (a, b) = (*pts.choose(rng).unwrap(), *pts.choose(rng).unwrap());
        bridges.push(Bridge { source: a, target: b, length: diam + Dist::new(rng.gen_range(0..4), 2).unwrap() });
    }
    let d = DoubleMetric::from_bridges(base.clone(), &bridges).unwrap();
    debug_assert!(validate_double(&d).unwrap().ok);
    d
}

/// Tower over `ℤ` truncated at the given radii, shared.
pub fn integers(radii: &[u32]) -> Arc<MetricTower> {
    Arc::new(MetricTower::integers(radii).unwrap())
}
