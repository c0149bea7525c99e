//! Pressure from refined grid covers and a greedy weighted subcover.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::Dynamics;
use crate::error::{Error, Result};
use crate::pressure::{log_sum_exp, Observable, PressureConfig, PressureEstimate, PressureMethod, PressureRow};

/// Cells beyond this many are not enumerated when counting unvisited ones.
const MAX_BOX_CELLS: usize = 4_000_000;

/// A cylinder of the refined cover: the cells visited at times `0, …, T−1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverWord {
    /// Indices into [`CoverReport::cells`].
    pub symbols: Vec<u32>,
    /// Supremum of the Birkhoff sum over sampled points of the cylinder.
    pub coarse_sum: f64,
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub estimate: PressureEstimate,
    /// Selected subcover.
    pub selected: Vec<CoverWord>,
    /// Integer grid coordinates of each symbol.
    pub cells: Vec<Vec<i64>>,
    /// Cells of the grid meeting the phase space that no sample visits.
    pub uncovered_cells: usize,
    pub total_words: usize,
}

struct Grid {
    width: Vec<f64>,
    wrap: Vec<Option<i64>>,
}

impl Grid {
    fn new(periods: &[Option<f64>], diam: f64) -> Self {
        let (width, wrap) = periods
            .iter()
            .map(|p| match p {
                Some(p) => {
                    let n = ((p / diam).floor() as i64).max(1);
                    (p / n as f64, Some(n))
                }
                None => (diam, None),
            })
            .unzip();
        Self { width, wrap }
    }

    fn wrap(&self, k: usize, c: i64) -> i64 {
        match self.wrap[k] {
            Some(n) => c.rem_euclid(n),
            None => c,
        }
    }

    fn primary(&self, key: &[f64]) -> Vec<i64> {
        key.iter()
            .enumerate()
            .map(|(k, x)| self.wrap(k, (x / self.width[k]).floor() as i64))
            .collect()
    }

    /// Cells whose `margin`-enlargement contains the key.
    fn enlarged(&self, key: &[f64], margin: f64) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for (k, x) in key.iter().enumerate() {
            let s = x / self.width[k];
            let c = s.floor() as i64;
            let frac = s - c as f64;
            let mut opts = vec![self.wrap(k, c)];
            if frac < margin {
                opts.push(self.wrap(k, c - 1));
            }
            if frac > 1.0 - margin {
                opts.push(self.wrap(k, c + 1));
            }
            opts.sort_unstable();
            opts.dedup();
            out = out
                .into_iter()
                .flat_map(|p| {
                    opts.iter().map(move |&o| {
                        let mut q = p.clone();
                        q.push(o);
                        q
                    })
                })
                .collect();
        }
        out
    }

    fn center(&self, cell: &[i64]) -> Vec<f64> {
        cell.iter().enumerate().map(|(k, c)| (*c as f64 + 0.5) * self.width[k]).collect()
    }
}

struct Trie {
    children: Vec<HashMap<u32, usize>>,
    leaf: Vec<Option<usize>>,
}

impl Trie {
    fn new() -> Self {
        Self {
            children: vec![HashMap::new()],
            leaf: vec![None],
        }
    }

    fn insert(&mut self, word: &[u32], id: usize) {
        let mut node = 0;
        for s in word {
            node = match self.children[node].get(s) {
                Some(&n) => n,
                None => {
                    self.children.push(HashMap::new());
                    self.leaf.push(None);
                    let n = self.children.len() - 1;
                    self.children[node].insert(*s, n);
                    n
                }
            };
        }
        self.leaf[node] = Some(id);
    }

    /// Words whose `k`-th symbol lies in `options[k]` for every `k`.
    fn matches(&self, options: &[Vec<u32>]) -> Vec<usize> {
        let mut frontier = vec![0usize];
        for opts in options {
            frontier = frontier
                .iter()
                .flat_map(|&n| opts.iter().filter_map(move |s| self.children[n].get(s).copied()))
                .collect();
            if frontier.is_empty() {
                break;
            }
        }
        frontier.iter().filter_map(|&n| self.leaf[n]).collect()
    }
}

struct Candidate {
    score: f64,
    word: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    // min-heap on score, ties broken by lower word index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then_with(|| other.word.cmp(&self.word))
    }
}

/// Greedy weighted set cover: repeatedly take the word minimising
/// `e^{coarse_sum} / #newly covered samples`.
fn greedy_subcover(coarse: &[f64], members: &[Vec<usize>], n_samples: usize) -> Vec<usize> {
    let mut covered = vec![false; n_samples];
    let mut remaining = n_samples;
    let mut heap: BinaryHeap<Candidate> = members
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(w, m)| Candidate {
            score: coarse[w] - (m.len() as f64).ln(),
            word: w,
        })
        .collect();
    let mut chosen = Vec::new();
    while remaining > 0 {
        let Some(top) = heap.pop() else { break };
        let fresh = members[top.word].iter().filter(|&&i| !covered[i]).count();
        if fresh == 0 {
            continue;
        }
        let score = coarse[top.word] - (fresh as f64).ln();
        if score > top.score {
            heap.push(Candidate { score, word: top.word });
            continue;
        }
        for &i in &members[top.word] {
            if !covered[i] {
                covered[i] = true;
                remaining -= 1;
            }
        }
        chosen.push(top.word);
    }
    chosen.sort_unstable();
    chosen
}

/// `(1/T) log Σ_{W ∈ subcover} e^{⟨f⟩_W}` with cell side `ε_min` and
/// horizon `T_max` from the configuration.
pub fn pressure_cover<D: Dynamics>(d: &D, f: Observable<D::State>, cfg: &PressureConfig) -> Result<CoverReport> {
    cfg.validate()?;
    let diam = *cfg.epsilons.last().expect("validated");
    let horizon = *cfg.horizons.last().expect("validated");
    let samples = d.sample(cfg.samples, cfg.seed, cfg.region.region(diam))?;
    let grid = Grid::new(&d.key_periods(), diam);

    // keys along the orbit at integer times, and the Birkhoff sum
    let orbits: Vec<(Vec<Vec<f64>>, f64)> = samples
        .into_par_iter()
        .map(|s0| {
            let mut s = s0;
            let mut keys = Vec::with_capacity(horizon);
            let mut sum = 0.0;
            for k in 0..horizon {
                keys.push(d.key(&s));
                sum += f(&s)?;
                if k + 1 < horizon {
                    s = d.advance(&s, 1.0)?;
                }
            }
            if !sum.is_finite() {
                return Err(Error::InvalidArgument(format!("Birkhoff sum {sum} is not finite")));
            }
            Ok((keys, sum))
        })
        .collect::<Result<_>>()?;

    let mut cells: Vec<Vec<i64>> = Vec::new();
    let mut cell_id: HashMap<Vec<i64>, u32> = HashMap::new();
    let mut words: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut word_list: Vec<Vec<u32>> = Vec::new();
    let mut trie = Trie::new();
    for (keys, _) in &orbits {
        let word: Vec<u32> = keys
            .iter()
            .map(|k| {
                let c = grid.primary(k);
                *cell_id.entry(c.clone()).or_insert_with(|| {
                    cells.push(c);
                    (cells.len() - 1) as u32
                })
            })
            .collect();
        if !words.contains_key(&word) {
            let id = word_list.len();
            trie.insert(&word, id);
            words.insert(word.clone(), id);
            word_list.push(word);
        }
    }

    let memberships: Vec<Vec<usize>> = orbits
        .par_iter()
        .map(|(keys, _)| {
            let options: Vec<Vec<u32>> = keys
                .iter()
                .map(|k| {
                    grid.enlarged(k, cfg.cover_margin)
                        .into_iter()
                        .filter_map(|c| cell_id.get(&c).copied())
                        .collect()
                })
                .collect();
            trie.matches(&options)
        })
        .collect();
    let mut members = vec![Vec::new(); word_list.len()];
    for (i, ws) in memberships.iter().enumerate() {
        for &w in ws {
            members[w].push(i);
        }
    }
    let coarse: Vec<f64> = members
        .iter()
        .map(|m| m.iter().map(|&i| orbits[i].1).fold(f64::NEG_INFINITY, f64::max))
        .collect();

    let chosen = greedy_subcover(&coarse, &members, orbits.len());
    let log_z = log_sum_exp(chosen.iter().map(|&w| coarse[w]));
    let value = log_z / horizon as f64;

    let uncovered = count_unvisited(d, &grid, &cells);
    let mut warnings = Vec::new();
    if let Some(n) = uncovered {
        if n > 0 {
            warnings.push(format!("{n} cover cells meet the phase space but hold no sample"));
        }
    } else {
        warnings.push("cover grid too large to count unvisited cells".into());
    }
    let selected = chosen
        .iter()
        .map(|&w| CoverWord {
            symbols: word_list[w].clone(),
            coarse_sum: coarse[w],
            support: members[w].len(),
        })
        .collect::<Vec<_>>();
    let row = PressureRow {
        method: PressureMethod::Cover,
        eps: diam,
        horizon,
        value,
        z_value: value,
        set_size: selected.len(),
    };
    Ok(CoverReport {
        estimate: PressureEstimate {
            value,
            method: PressureMethod::Cover,
            eps: Some(diam),
            horizon: Some(horizon),
            matrix_size: None,
            z_value: Some(value),
            error_bar: 0.0,
            table: vec![row],
            warnings,
        },
        selected,
        cells,
        uncovered_cells: uncovered.unwrap_or(0),
        total_words: word_list.len(),
    })
}

/// Unvisited cells in the bounding box of the visited ones whose centre
/// lies in the phase space; `None` if the box is too large to enumerate.
fn count_unvisited<D: Dynamics>(d: &D, grid: &Grid, visited: &[Vec<i64>]) -> Option<usize> {
    let dims = grid.width.len();
    let ranges: Vec<(i64, i64)> = (0..dims)
        .map(|k| match grid.wrap[k] {
            Some(n) => (0, n - 1),
            None => visited.iter().fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c[k]), hi.max(c[k]))),
        })
        .collect();
    let total = ranges
        .iter()
        .try_fold(1usize, |acc, (lo, hi)| acc.checked_mul((hi - lo + 1).max(0) as usize))?;
    if total > MAX_BOX_CELLS {
        return None;
    }
    let seen: std::collections::HashSet<&[i64]> = visited.iter().map(|c| c.as_slice()).collect();
    let mut count = 0;
    let mut cell: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    for _ in 0..total {
        if !seen.contains(cell.as_slice()) && d.key_in_domain(&grid.center(&cell)) {
            count += 1;
        }
        for k in 0..dims {
            cell[k] += 1;
            if cell[k] <= ranges[k].1 {
                break;
            }
            cell[k] = ranges[k].0;
        }
    }
    Some(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DoublingMap;
    use crate::pressure::RegionSpec;

    fn two_cell(t: usize) -> PressureConfig {
        PressureConfig {
            epsilons: vec![0.5],
            horizons: vec![t],
            samples: 20_000,
            region: RegionSpec::Global,
            cover_margin: 0.0,
            ..PressureConfig::map_defaults()
        }
    }

    #[test]
    fn doubling_two_cell_partition_counts_words() {
        let r = pressure_cover(&DoublingMap, &|_: &f64| Ok(0.0), &two_cell(8)).unwrap();
        assert_eq!(r.total_words, 256);
        assert_eq!(r.uncovered_cells, 0);
        assert!((r.estimate.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn coarse_sums_dominate_members() {
        let cfg = PressureConfig {
            epsilons: vec![0.125],
            cover_margin: 0.2,
            ..two_cell(4)
        };
        let f = |x: &f64| Ok((6.0 * x).sin());
        let r = pressure_cover(&DoublingMap, &f, &cfg).unwrap();
        assert!(r.selected.len() <= r.total_words);
        assert!(r.selected.iter().all(|w| w.support > 0 && w.coarse_sum.is_finite()));
    }

    #[test]
    fn greedy_prefers_cheap_words() {
        // word 0 covers everything at cost e^1; words 1, 2 split it at e^0 each
        let members = vec![vec![0, 1, 2, 3], vec![0, 1], vec![2, 3]];
        let chosen = greedy_subcover(&[1.0, 0.0, 0.0], &members, 4);
        assert_eq!(chosen, vec![1, 2]);
        let chosen = greedy_subcover(&[0.2, 0.0, 0.0], &members, 4);
        assert_eq!(chosen, vec![0]);
    }
}
