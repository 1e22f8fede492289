//! QRE correspondence over a grid of control levels (bifurcation diagram).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::GameParams;
use crate::qre::{find_qre, QreSet};

/// Largest jump in `x` between adjacent grid levels that still continues a branch.
pub const BRANCH_JUMP: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSlice {
    pub temperature: f64,
    pub qre: QreSet,
    /// Branch id for each point of `qre`, in the same order.
    pub branches: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub params: GameParams,
    pub slices: Vec<SweepSlice>,
    pub branch_count: usize,
}

impl Sweep {
    /// Number of equilibria per grid level.
    pub fn counts(&self) -> Vec<(f64, usize)> {
        self.slices.iter().map(|s| (s.temperature, s.qre.len())).collect()
    }
}

/// Evenly spaced levels `tmin, tmin + step, ...` up to and including `tmax`
/// (within a relative slack of 1e-9 steps).
pub fn temperature_grid(tmin: f64, tmax: f64, step: f64) -> Result<Vec<f64>> {
    if !(tmin >= 0.0 && tmin.is_finite()) {
        return Err(Error::domain("tmin", "must be finite and >= 0"));
    }
    if !(tmax >= tmin && tmax.is_finite()) {
        return Err(Error::domain("tmax", "must be finite and >= tmin"));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::domain("tstep", "must be positive"));
    }
    let n = ((tmax - tmin) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| tmin + i as f64 * step).collect())
}

/// Solves every grid level, in parallel, and labels branches by continuity.
/// Output is in grid order and identical to a serial run.
pub fn sweep_correspondence(p: &GameParams, grid: &[f64]) -> Result<Sweep> {
    for (i, t) in grid.iter().enumerate() {
        if !(t.is_finite() && *t >= 0.0) {
            return Err(Error::domain("T", format!("grid value {t} is not a valid level")));
        }
        if i > 0 && *t <= grid[i - 1] {
            return Err(Error::domain("T", "grid must be strictly ascending"));
        }
    }
    let sets: Vec<QreSet> = grid
        .par_iter()
        .map(|&t| find_qre(t, p).map_err(|e| e.at_temperature(t)))
        .collect::<Result<_>>()?;

    let mut slices = Vec::with_capacity(sets.len());
    let mut prev: Vec<(usize, f64)> = Vec::new();
    let mut next_id = 0;
    for qre in sets {
        let xs: Vec<f64> = qre.points.iter().map(|q| q.x).collect();
        let branches = match_branches(&prev, &xs, &mut next_id);
        prev = branches.iter().copied().zip(xs.iter().copied()).collect();
        slices.push(SweepSlice {
            temperature: qre.temperature,
            qre,
            branches,
        });
    }
    Ok(Sweep {
        params: *p,
        slices,
        branch_count: next_id,
    })
}

/// Greedy nearest-neighbour matching: closest pairs first, each previous
/// branch used at most once, jumps above `BRANCH_JUMP` open a new branch.
fn match_branches(prev: &[(usize, f64)], xs: &[f64], next_id: &mut usize) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        for (j, (_, px)) in prev.iter().enumerate() {
            let d = (x - px).abs();
            if d <= BRANCH_JUMP {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut ids: Vec<Option<usize>> = vec![None; xs.len()];
    let mut used = vec![false; prev.len()];
    for (_, i, j) in pairs {
        if ids[i].is_none() && !used[j] {
            ids[i] = Some(prev[j].0);
            used[j] = true;
        }
    }
    ids.into_iter()
        .map(|id| {
            id.unwrap_or_else(|| {
                *next_id += 1;
                *next_id - 1
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qre::critical_temperature;

    #[test]
    fn grid_includes_endpoint() {
        let g = temperature_grid(0.0, 0.5, 0.01).unwrap();
        assert_eq!(g.len(), 51);
        assert!((g[50] - 0.5).abs() < 1e-15);
        assert_eq!(temperature_grid(0.0, 0.0, 0.01).unwrap(), vec![0.0]);
        assert!(temperature_grid(0.0, 1.0, 0.0).is_err());
        assert!(temperature_grid(0.5, 0.1, 0.1).is_err());
    }

    #[test]
    fn count_transition_brackets_critical_level() {
        let p = GameParams::bilinear(0.185).unwrap();
        let grid = temperature_grid(0.0, 0.5, 0.01).unwrap();
        let sweep = sweep_correspondence(&p, &grid).unwrap();
        let tc = critical_temperature(0.185).unwrap().t_c;
        for (t, n) in sweep.counts() {
            if t < tc {
                assert_eq!(n, 3, "T={t}");
            } else {
                assert_eq!(n, 1, "T={t}");
            }
        }
        // 3 -> 1 happens between adjacent grid points around T_c.
        let last3 = sweep.counts().iter().rev().find(|c| c.1 == 3).unwrap().0;
        assert!(tc - last3 < 0.01 && tc > last3);
        // lower branch keeps its id all the way through
        let lower: Vec<usize> = sweep.slices.iter().map(|s| s.branches[0]).collect();
        assert!(lower.iter().all(|b| *b == lower[0]));
    }

    #[test]
    fn degenerate_grid() {
        let p = GameParams::bilinear(0.2).unwrap();
        let s = sweep_correspondence(&p, &[0.0]).unwrap();
        assert_eq!(s.slices.len(), 1);
        let xs: Vec<f64> = s.slices[0].qre.points.iter().map(|q| q.x).collect();
        assert_eq!(xs, vec![0.0, 0.6, 1.0]);
        assert_eq!(s.slices[0].branches, vec![0, 1, 2]);
    }

    #[test]
    fn rejects_unsorted_grid() {
        let p = GameParams::bilinear(0.2).unwrap();
        assert!(sweep_correspondence(&p, &[0.2, 0.1]).is_err());
        assert!(sweep_correspondence(&p, &[-0.1]).is_err());
    }

    fn lower_horn(alpha: f64, grid: &[f64]) -> bool {
        let p = GameParams::new(0.2, alpha).unwrap();
        let sweep = sweep_correspondence(&p, grid).unwrap();
        sweep
            .slices
            .iter()
            .any(|s| s.qre.points.iter().filter(|q| q.x < 0.5).count() >= 3)
    }

    #[test]
    fn steep_network_effect_folds_lower_branch() {
        // At gamma = 0.2 the lower fold opens between alpha = 6.8 and 7,
        // in a narrow window around T = 0.333.
        assert!(lower_horn(7.0, &temperature_grid(0.330, 0.336, 1e-4).unwrap()));
        assert!(!lower_horn(6.0, &temperature_grid(0.0, 0.5, 0.001).unwrap()));
    }

    #[test]
    fn parallel_matches_serial() {
        let p = GameParams::bilinear(0.3).unwrap();
        let grid = temperature_grid(0.0, 0.6, 0.02).unwrap();
        let par = sweep_correspondence(&p, &grid).unwrap();
        for s in &par.slices {
            assert_eq!(s.qre, find_qre(s.temperature, &p).unwrap());
        }
    }
}
