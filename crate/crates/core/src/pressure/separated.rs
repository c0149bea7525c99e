//! Pressure from maximal `(ε, T)`-separated sets under the Bowen metric.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::dynamics::Dynamics;
use crate::error::{Error, Result};
use crate::pressure::{log_sum_exp, Observable, PressureConfig, PressureEstimate, PressureMethod, PressureRow};

/// Sample trajectories on the Bowen time grid plus Birkhoff prefix sums.
pub struct BowenEnsemble<S> {
    /// `paths[i][j]` is sample `i` at time `j · step`.
    pub paths: Vec<Vec<S>>,
    /// Bowen grid points per unit time.
    pub per_unit: usize,
    /// `sums[i][T] = Σ_{k<T} f(Φ^k ρ_i)`.
    pub sums: Vec<Vec<f64>>,
}

impl<S: Clone + Send + Sync> BowenEnsemble<S> {
    pub fn build<D: Dynamics<State = S>>(d: &D, f: Observable<S>, samples: Vec<S>, t_max: usize) -> Result<Self> {
        let step = d.bowen_step();
        let per_unit = (1.0 / step).round() as usize;
        let rows: Vec<(Vec<S>, Vec<f64>)> = samples
            .into_par_iter()
            .map(|s0| {
                let mut path = Vec::with_capacity(t_max * per_unit + 1);
                path.push(s0);
                for j in 1..=t_max * per_unit {
                    let next = d.advance(&path[j - 1], step)?;
                    path.push(next);
                }
                let mut sums = Vec::with_capacity(t_max + 1);
                sums.push(0.0);
                for k in 0..t_max {
                    let v = f(&path[k * per_unit])?;
                    if !v.is_finite() {
                        return Err(Error::InvalidArgument(format!("observable returned {v}")));
                    }
                    sums.push(sums[k] + v);
                }
                Ok((path, sums))
            })
            .collect::<Result<_>>()?;
        let (paths, sums) = rows.into_iter().unzip();
        Ok(Self { paths, per_unit, sums })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Grid hashing of keys with periodic wrap.
struct CellIndex {
    width: Vec<f64>,
    wrap: Vec<Option<i64>>,
    cells: HashMap<u64, Vec<usize>>,
}

fn mix(h: u64, v: i64) -> u64 {
    (h ^ (v as u64)).wrapping_mul(0x0000_0100_0000_01b3).rotate_left(17)
}

impl CellIndex {
    fn new(periods: &[Option<f64>], size: f64) -> Self {
        let mut width = Vec::new();
        let mut wrap = Vec::new();
        for p in periods {
            match p {
                Some(p) => {
                    let n = ((p / size).floor() as i64).max(1);
                    width.push(p / n as f64);
                    wrap.push(Some(n));
                }
                None => {
                    width.push(size);
                    wrap.push(None);
                }
            }
        }
        Self {
            width,
            wrap,
            cells: HashMap::new(),
        }
    }

    fn coords(&self, key: &[f64]) -> Vec<i64> {
        key.iter()
            .enumerate()
            .map(|(k, x)| {
                let c = (x / self.width[k % self.width.len()]).floor() as i64;
                match self.wrap[k % self.wrap.len()] {
                    Some(n) => c.rem_euclid(n),
                    None => c,
                }
            })
            .collect()
    }

    fn hash(coords: &[i64]) -> u64 {
        coords.iter().fold(0xcbf2_9ce4_8422_2325, |h, v| mix(h, *v))
    }

    fn insert(&mut self, key: &[f64], id: usize) {
        let h = Self::hash(&self.coords(key));
        self.cells.entry(h).or_default().push(id);
    }

    /// Visit members of all neighbouring cells until `visit` returns true.
    fn any_neighbor(&self, key: &[f64], mut visit: impl FnMut(usize) -> bool) -> bool {
        let base = self.coords(key);
        let options: Vec<Vec<i64>> = base
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let mut v = vec![c - 1, c, c + 1];
                if let Some(n) = self.wrap[k % self.wrap.len()] {
                    for x in v.iter_mut() {
                        *x = x.rem_euclid(n);
                    }
                    v.sort_unstable();
                    v.dedup();
                }
                v
            })
            .collect();
        let mut idx = vec![0usize; options.len()];
        let mut cur: Vec<i64> = options.iter().map(|o| o[0]).collect();
        loop {
            if let Some(members) = self.cells.get(&Self::hash(&cur)) {
                if members.iter().any(|&m| visit(m)) {
                    return true;
                }
            }
            // odometer increment
            let mut k = 0;
            loop {
                if k == options.len() {
                    return false;
                }
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    cur[k] = options[k][idx[k]];
                    break;
                }
                idx[k] = 0;
                cur[k] = options[k][0];
                k += 1;
            }
        }
    }
}

/// Greedy maximal `(ε, T)`-separated subset, scanning samples in order: a
/// sample is kept unless some kept sample stays within `ε` of it at every
/// Bowen time `0, step, …, T`.
pub fn separated_set<D: Dynamics>(d: &D, ens: &BowenEnsemble<D::State>, horizon: usize, eps: f64) -> Vec<usize> {
    let last = horizon * ens.per_unit;
    let mut key_times = vec![last / 2, last];
    key_times.dedup();
    let periods: Vec<Option<f64>> = key_times.iter().flat_map(|_| d.key_periods()).collect();
    let mut index = CellIndex::new(&periods, d.key_slack() * eps);
    let key_of = |i: usize| -> Vec<f64> {
        key_times
            .iter()
            .flat_map(|&t| d.key(&ens.paths[i][t]))
            .collect()
    };
    let close = |i: usize, j: usize| -> bool {
        let (a, b) = (&ens.paths[i], &ens.paths[j]);
        (0..=last).rev().all(|t| d.within(&a[t], &b[t], eps))
    };
    let mut kept = Vec::new();
    for i in 0..ens.len() {
        let key = key_of(i);
        if !index.any_neighbor(&key, |j| close(i, j)) {
            index.insert(&key, i);
            kept.push(i);
        }
    }
    kept
}

fn rows_for_eps<D: Dynamics>(d: &D, f: Observable<D::State>, cfg: &PressureConfig, eps: f64) -> Result<Vec<PressureRow>> {
    let t_max = *cfg.horizons.last().expect("validated");
    let samples = d.sample(cfg.samples, cfg.seed, cfg.region.region(eps))?;
    let ens = BowenEnsemble::build(d, f, samples, t_max)?;
    let n0 = separated_set(d, &ens, 0, eps).len() as f64;
    Ok(cfg
        .horizons
        .iter()
        .map(|&t| {
            let set = separated_set(d, &ens, t, eps);
            let log_z = log_sum_exp(set.iter().map(|&i| ens.sums[i][t]));
            PressureRow {
                method: PressureMethod::Separated,
                eps,
                horizon: t,
                value: (log_z - n0.ln()) / t as f64,
                z_value: log_z / t as f64,
                set_size: set.len(),
            }
        })
        .collect())
}

/// Full `(ε, T)` table, ordered by descending `ε` then ascending `T`.
pub fn separated_table<D: Dynamics>(d: &D, f: Observable<D::State>, cfg: &PressureConfig) -> Result<Vec<PressureRow>> {
    cfg.validate()?;
    let per_eps: Vec<Vec<PressureRow>> = cfg
        .epsilons
        .par_iter()
        .map(|&eps| rows_for_eps(d, f, cfg, eps))
        .collect::<Result<_>>()?;
    Ok(per_eps.into_iter().flatten().collect())
}

/// `(1/T)(log Σ_{ρ∈S} e^{S_T f(ρ)} − log N_0)` at the smallest `ε` and
/// largest `T`, where `N_0` is the size of the greedy `ε`-separated set at
/// time zero on the same samples (the raw `log Z / T` is kept as `z_value`).
pub fn pressure_separated<D: Dynamics>(d: &D, f: Observable<D::State>, cfg: &PressureConfig) -> Result<PressureEstimate> {
    let table = separated_table(d, f, cfg)?;
    let best = table.last().expect("non-empty grid").clone();
    Ok(PressureEstimate {
        value: best.value,
        method: PressureMethod::Separated,
        eps: Some(best.eps),
        horizon: Some(best.horizon),
        matrix_size: None,
        z_value: Some(best.z_value),
        error_bar: 0.0,
        table,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{DoublingMap, SampleRegion};

    #[test]
    fn separated_set_is_separated_and_maximal() {
        let d = DoublingMap;
        let samples = d.sample(3000, 5, SampleRegion::Global).unwrap();
        let ens = BowenEnsemble::build(&d, &|_: &f64| Ok(0.0), samples, 4).unwrap();
        let eps = 1.0 / 16.0;
        let set = separated_set(&d, &ens, 4, eps);
        let bowen = |i: usize, j: usize| {
            (0..=4)
                .map(|t| d.distance(&ens.paths[i][t], &ens.paths[j][t]))
                .fold(0.0, f64::max)
        };
        for (a, &i) in set.iter().enumerate() {
            for &j in &set[a + 1..] {
                assert!(bowen(i, j) > eps);
            }
        }
        for i in 0..ens.len() {
            assert!(set.iter().any(|&j| bowen(i, j) <= eps) || set.contains(&i));
        }
    }
}
