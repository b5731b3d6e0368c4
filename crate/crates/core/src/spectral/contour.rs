//! Marching squares with linear interpolation along cell edges.
//!
//! Values are indexed `values[i * ny + j]` at point `(xs[i], ys[j])`.
//! Segments are chained into polylines by matching shared edge crossings.

use std::collections::HashMap;

/// Polyline in the plane; closed curves repeat their first point at the end.
pub type Polyline = Vec<[f64; 2]>;

// An edge crossing is identified by the grid edge it lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeKey {
    // Edge between (i, j) and (i + 1, j).
    AlongX(usize, usize),
    // Edge between (i, j) and (i, j + 1).
    AlongY(usize, usize),
}

fn crossing(level: f64, a: f64, b: f64) -> f64 {
    if a == b {
        0.5
    } else {
        ((level - a) / (b - a)).clamp(0.0, 1.0)
    }
}

/// Extracts the `level` iso-contours of a sampled scalar field.
pub fn marching_squares(xs: &[f64], ys: &[f64], values: &[f64], level: f64) -> Vec<Polyline> {
    let nx = xs.len();
    let ny = ys.len();
    assert_eq!(values.len(), nx * ny, "values must have nx·ny entries");
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let v = |i: usize, j: usize| values[i * ny + j];
    let point = |key: EdgeKey| -> [f64; 2] {
        match key {
            EdgeKey::AlongX(i, j) => {
                let s = crossing(level, v(i, j), v(i + 1, j));
                [xs[i] + s * (xs[i + 1] - xs[i]), ys[j]]
            }
            EdgeKey::AlongY(i, j) => {
                let s = crossing(level, v(i, j), v(i, j + 1));
                [xs[i], ys[j] + s * (ys[j + 1] - ys[j])]
            }
        }
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let c = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            if c.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let mut case = 0u8;
            for (bit, val) in c.iter().enumerate() {
                if *val > level {
                    case |= 1 << bit;
                }
            }
            // Edges: 0 bottom (i,j)-(i+1,j), 1 right (i+1,j)-(i+1,j+1),
            // 2 top (i,j+1)-(i+1,j+1), 3 left (i,j)-(i,j+1).
            let e = [
                EdgeKey::AlongX(i, j),
                EdgeKey::AlongY(i + 1, j),
                EdgeKey::AlongX(i, j + 1),
                EdgeKey::AlongY(i, j),
            ];
            let center_above = (c[0] + c[1] + c[2] + c[3]) * 0.25 > level;
            let pairs: &[(usize, usize)] = match case {
                0 | 15 => &[],
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(3, 2)],
                5 => {
                    if center_above {
                        &[(3, 2), (0, 1)]
                    } else {
                        &[(3, 0), (1, 2)]
                    }
                }
                10 => {
                    if center_above {
                        &[(3, 0), (1, 2)]
                    } else {
                        &[(3, 2), (0, 1)]
                    }
                }
                _ => unreachable!(),
            };
            for &(a, b) in pairs {
                segments.push((e[a], e[b]));
            }
        }
    }
    chain(segments).into_iter().map(|keys| keys.into_iter().map(point).collect()).collect()
}

fn chain(segments: Vec<(EdgeKey, EdgeKey)>) -> Vec<Vec<EdgeKey>> {
    let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(idx);
        adjacency.entry(*b).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start_seg: usize, from: EdgeKey, used: &mut Vec<bool>| -> Vec<EdgeKey> {
        let mut line = vec![from];
        let mut seg = start_seg;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            line.push(next);
            at = next;
            match adjacency[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        line
    };

    // Open lines start at crossings with a single incident segment (domain boundary).
    for idx in 0..segments.len() {
        if used[idx] {
            continue;
        }
        let (a, b) = segments[idx];
        if adjacency[&a].len() == 1 {
            lines.push(walk(idx, a, &mut used));
        } else if adjacency[&b].len() == 1 {
            lines.push(walk(idx, b, &mut used));
        }
    }
    for idx in 0..segments.len() {
        if !used[idx] {
            let (a, _) = segments[idx];
            lines.push(walk(idx, a, &mut used));
        }
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn circle_is_one_closed_polyline() {
        let xs = linspace(-2.0, 2.0, 81);
        let ys = xs.clone();
        let mut values = Vec::new();
        for x in &xs {
            for y in &ys {
                values.push(x * x + y * y - 1.0);
            }
        }
        let lines = marching_squares(&xs, &ys, &values, 0.0);
        assert_eq!(lines.len(), 1);
        let line = &lines[0];
        assert_eq!(line.first(), line.last());
        for p in line {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 1.0).abs() < 0.05 * 0.05 + 1e-3);
        }
    }

    #[test]
    fn straight_line_is_open() {
        let xs = linspace(0.0, 1.0, 5);
        let ys = linspace(0.0, 1.0, 4);
        let mut values = Vec::new();
        for x in &xs {
            for _ in &ys {
                values.push(x - 0.3);
            }
        }
        let lines = marching_squares(&xs, &ys, &values, 0.0);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].len(), 4);
        for p in &lines[0] {
            assert!((p[0] - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn no_crossing_no_contour() {
        let xs = linspace(0.0, 1.0, 3);
        let values = vec![1.0; 9];
        assert!(marching_squares(&xs, &xs, &values, 0.0).is_empty());
    }
}
