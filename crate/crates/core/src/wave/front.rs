use serde::{Deserialize, Serialize};

use crate::solver::{Grid, Trajectory};

/// Level-set position of the female density over time. A position of
/// `f64::NEG_INFINITY` means the density is below threshold everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontTrajectory {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub threshold: f64,
}

/// Largest `x` with `v(x) >= threshold`, interpolated linearly between nodes.
pub fn front_position(grid: &Grid, v: &[f64], threshold: f64) -> f64 {
    let n = v.len();
    let Some(i) = (0..n).rev().find(|&i| v[i] >= threshold) else {
        return f64::NEG_INFINITY;
    };
    if i + 1 == n {
        return grid.x(i);
    }
    let (a, b) = (v[i], v[i + 1]);
    grid.x(i) + grid.dx * (a - threshold) / (a - b)
}

pub fn track_front(traj: &Trajectory, threshold: f64) -> FrontTrajectory {
    assert!(threshold > 0.0, "front threshold must be positive");
    FrontTrajectory {
        times: traj.snapshots.iter().map(|s| s.t).collect(),
        positions: traj.snapshots.iter().map(|s| front_position(&traj.grid, &s.f, threshold)).collect(),
        threshold,
    }
}

/// Ordinary least-squares slope of `y` against `t`. `None` with fewer than two points.
pub fn least_squares_slope(t: &[f64], y: &[f64]) -> Option<f64> {
    let n = t.len();
    if n < 2 {
        return None;
    }
    let tm = t.iter().sum::<f64>() / n as f64;
    let ym = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in t.iter().zip(y) {
        sxy += (a - tm) * (b - ym);
        sxx += (a - tm) * (a - tm);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

impl FrontTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Position at the sample closest to `t`.
    pub fn position_at(&self, t: f64) -> f64 {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .expect("empty front trajectory");
        self.positions[i]
    }

    /// Finite samples with `t` in `[t0, t1]`.
    pub fn window(&self, t0: f64, t1: f64) -> (Vec<f64>, Vec<f64>) {
        self.times
            .iter()
            .zip(&self.positions)
            .filter(|(t, x)| **t >= t0 - 1e-9 && **t <= t1 + 1e-9 && x.is_finite())
            .map(|(t, x)| (*t, *x))
            .unzip()
    }

    pub fn slope_over(&self, t0: f64, t1: f64) -> Option<f64> {
        let (t, x) = self.window(t0, t1);
        least_squares_slope(&t, &x)
    }

    /// Last time at which the front is at least `gap` away from both domain ends.
    pub fn last_time_clear_of_boundary(&self, grid: &Grid, gap: f64) -> Option<f64> {
        let mut last = None;
        for (t, x) in self.times.iter().zip(&self.positions) {
            if x.is_finite() && (x - grid.x_min < gap || grid.x_max - x < gap) {
                break;
            }
            last = Some(*t);
        }
        last
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_profile_and_empty() {
        let g = Grid::with_spacing(0.0, 20.0, 0.5).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|&x| if x < 10.0 { 77.4 } else { 0.0 }).collect();
        let pos = front_position(&g, &v, 7.74);
        assert!((pos - 10.0).abs() <= g.dx);
        assert_eq!(front_position(&g, &vec![0.0; g.len()], 1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn slope_of_line() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        assert!((least_squares_slope(&t, &y).unwrap() - 2.0).abs() < 1e-14);
        assert!(least_squares_slope(&t[..1], &y[..1]).is_none());
    }
}
