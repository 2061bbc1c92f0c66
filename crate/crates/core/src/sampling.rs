//! Column sampling and clustering of residual columns.
//!
//! All distances are squared Euclidean between columns. Ties are always
//! broken towards the lowest index so every routine is a deterministic
//! function of its input and RNG state.

use std::ops::Deref;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Portable, seedable generator used by every randomized routine.
pub type RngState = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> RngState {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ordered list of distinct indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>, bound: usize) -> Result<Self> {
        let mut seen = vec![false; bound];
        for &i in &indices {
            if i >= bound {
                return Err(Error::IndexOutOfRange { index: i, bound });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        Ok(Self(indices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn all(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Concatenation of two sets; fails if they overlap.
    pub fn union(&self, other: &IndexSet) -> Result<IndexSet> {
        let bound = self.iter().chain(other.iter()).max().map_or(0, |m| m + 1);
        let mut joined = self.0.clone();
        joined.extend_from_slice(&other.0);
        IndexSet::new(joined, bound)
    }

    /// Maps local positions into this set to the stored indices.
    pub fn pick(&self, local: &[usize]) -> Result<IndexSet> {
        let mut out = Vec::with_capacity(local.len());
        for &l in local {
            out.push(*self.0.get(l).ok_or(Error::IndexOutOfRange {
                index: l,
                bound: self.0.len(),
            })?);
        }
        let bound = out.iter().max().map_or(0, |m| m + 1);
        IndexSet::new(out, bound)
    }
}

impl Deref for IndexSet {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// Draws `count` distinct indices uniformly without replacement from
/// `{0, .., n-1}` minus `exclusions`, in draw order.
pub fn sample_uniform(
    n: usize,
    count: usize,
    exclusions: &IndexSet,
    rng: &mut RngState,
) -> Result<IndexSet> {
    let mut excluded = vec![false; n];
    for &e in exclusions.iter() {
        if e < n {
            excluded[e] = true;
        }
    }
    let mut candidates: Vec<usize> = (0..n).filter(|&i| !excluded[i]).collect();
    if count > candidates.len() {
        return Err(Error::NotEnoughCandidates {
            requested: count,
            available: candidates.len(),
        });
    }
    // Partial Fisher-Yates; u64 ranges keep the draw sequence platform independent.
    let len = candidates.len();
    for i in 0..count {
        let j = i + rng.random_range(0..(len - i) as u64) as usize;
        candidates.swap(i, j);
    }
    candidates.truncate(count);
    Ok(IndexSet(candidates))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Centers {
    /// `dim × m` matrix of cluster means.
    Means(DenseMatrix),
    /// Column indices of the medoids.
    Medoids(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub assignments: Vec<usize>,
    pub centers: Centers,
    /// Sum of squared distances of each column to its assigned center.
    pub objective: f64,
    /// Objective after every assignment pass, starting with the initial one.
    pub objective_trace: Vec<f64>,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn column(m: &DenseMatrix, j: usize) -> &[f64] {
    let rows = m.nrows();
    &m.as_slice()[j * rows..(j + 1) * rows]
}

fn check_clusters(m: usize, q: usize) -> Result<()> {
    if m == 0 || m > q {
        return Err(Error::TooManyClusters {
            clusters: m,
            points: q,
        });
    }
    Ok(())
}

/// Squared Euclidean distances between all column pairs.
pub fn pairwise_sq_dists(columns: &DenseMatrix) -> DenseMatrix {
    let q = columns.ncols();
    let mut d = DenseMatrix::zeros(q, q);
    for j in 0..q {
        for i in (j + 1)..q {
            let v = sq_dist(column(columns, i), column(columns, j));
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

/// Lloyd's k-means over the columns of `columns`, initialised from `m`
/// distinct columns drawn uniformly.
pub fn kmeans(
    columns: &DenseMatrix,
    m: usize,
    rng: &mut RngState,
    max_iter: usize,
) -> Result<Clustering> {
    let (dim, q) = columns.shape();
    check_clusters(m, q)?;
    let init = sample_uniform(q, m, &IndexSet::empty(), rng)?;
    let mut centers = DenseMatrix::zeros(dim, m);
    for (c, &j) in init.iter().enumerate() {
        centers.set_column(c, &columns.column(j));
    }

    let (mut assign, mut dists) = assign_to_means(columns, &centers);
    let mut trace = vec![dists.iter().sum::<f64>()];

    for _ in 0..max_iter {
        // update step
        let mut sums = DenseMatrix::zeros(dim, m);
        let mut counts = vec![0usize; m];
        for (j, &c) in assign.iter().enumerate() {
            counts[c] += 1;
            let mut dst = sums.column_mut(c);
            dst += columns.column(j);
        }
        for c in 0..m {
            if counts[c] > 0 {
                let mut col = centers.column_mut(c);
                col.copy_from(&sums.column(c));
                col /= counts[c] as f64;
            }
        }
        for (j, &c) in assign.iter().enumerate() {
            dists[j] = sq_dist(column(columns, j), column(&centers, c));
        }
        // Reseed empty clusters with the column farthest from its center.
        for c in 0..m {
            if counts[c] > 0 {
                continue;
            }
            let mut best: Option<usize> = None;
            for j in 0..q {
                if counts[assign[j]] <= 1 {
                    continue;
                }
                if best.is_none_or(|b| dists[j] > dists[b]) {
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                counts[assign[j]] -= 1;
                counts[c] = 1;
                assign[j] = c;
                dists[j] = 0.0;
                centers.set_column(c, &columns.column(j));
            }
        }

        let (next_assign, next_dists) = assign_to_means(columns, &centers);
        trace.push(next_dists.iter().sum());
        let changed = next_assign != assign;
        assign = next_assign;
        dists = next_dists;
        if !changed {
            break;
        }
    }

    Ok(Clustering {
        assignments: assign,
        centers: Centers::Means(centers),
        objective: *trace.last().unwrap(),
        objective_trace: trace,
    })
}

fn assign_to_means(columns: &DenseMatrix, centers: &DenseMatrix) -> (Vec<usize>, Vec<f64>) {
    let q = columns.ncols();
    let m = centers.ncols();
    let mut assign = vec![0; q];
    let mut dists = vec![0.0; q];
    for j in 0..q {
        let x = column(columns, j);
        let mut best = (f64::INFINITY, 0);
        for c in 0..m {
            let d = sq_dist(x, column(centers, c));
            if d < best.0 {
                best = (d, c);
            }
        }
        dists[j] = best.0;
        assign[j] = best.1;
    }
    (assign, dists)
}

fn assign_to_medoids(d: &DenseMatrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let q = d.nrows();
    let mut assign = vec![0; q];
    let mut total = 0.0;
    for (j, slot) in assign.iter_mut().enumerate() {
        let mut best = (f64::INFINITY, 0);
        for (c, &med) in medoids.iter().enumerate() {
            if d[(j, med)] < best.0 {
                best = (d[(j, med)], c);
            }
        }
        *slot = best.1;
        total += best.0;
    }
    (assign, total)
}

/// k-medoids by Partitioning Around Medoids: greedy BUILD followed by
/// best-improvement SWAP steps (at most `max_iter` swaps).
pub fn kmedoids_pam(columns: &DenseMatrix, m: usize, max_iter: usize) -> Result<Clustering> {
    let q = columns.ncols();
    check_clusters(m, q)?;
    let d = pairwise_sq_dists(columns);

    // BUILD
    let mut medoids: Vec<usize> = Vec::with_capacity(m);
    let mut nearest = vec![f64::INFINITY; q];
    let mut is_medoid = vec![false; q];
    for _ in 0..m {
        let mut best = (f64::INFINITY, usize::MAX);
        for cand in (0..q).filter(|&c| !is_medoid[c]) {
            let cost: f64 = (0..q).map(|j| nearest[j].min(d[(j, cand)])).sum();
            if cost < best.0 {
                best = (cost, cand);
            }
        }
        let chosen = best.1;
        is_medoid[chosen] = true;
        medoids.push(chosen);
        for j in 0..q {
            nearest[j] = nearest[j].min(d[(j, chosen)]);
        }
    }

    let (_, mut objective) = assign_to_medoids(&d, &medoids);
    let mut trace = vec![objective];

    // SWAP
    for _ in 0..max_iter {
        // nearest and second-nearest medoid distance per column
        let mut near = vec![(f64::INFINITY, usize::MAX); q];
        let mut second = vec![f64::INFINITY; q];
        for j in 0..q {
            for (slot, &med) in medoids.iter().enumerate() {
                let dj = d[(j, med)];
                if dj < near[j].0 {
                    second[j] = near[j].0;
                    near[j] = (dj, slot);
                } else if dj < second[j] {
                    second[j] = dj;
                }
            }
        }
        let mut best = (0.0, usize::MAX, usize::MAX);
        for slot in 0..m {
            for cand in (0..q).filter(|&c| !is_medoid[c]) {
                let mut delta = 0.0;
                for j in 0..q {
                    let to_cand = d[(j, cand)];
                    let replacement = if near[j].1 == slot {
                        second[j].min(to_cand)
                    } else {
                        near[j].0.min(to_cand)
                    };
                    delta += replacement - near[j].0;
                }
                if delta < best.0 {
                    best = (delta, slot, cand);
                }
            }
        }
        if best.1 == usize::MAX || best.0 >= -1e-12 * objective.max(f64::MIN_POSITIVE) {
            break;
        }
        let (_, slot, cand) = best;
        is_medoid[medoids[slot]] = false;
        is_medoid[cand] = true;
        medoids[slot] = cand;
        objective = assign_to_medoids(&d, &medoids).1;
        trace.push(objective);
    }

    medoids.sort_unstable();
    let (assignments, objective) = assign_to_medoids(&d, &medoids);
    Ok(Clustering {
        assignments,
        centers: Centers::Medoids(medoids),
        objective,
        objective_trace: trace,
    })
}

/// Park and Jun's simple and fast k-medoids.
///
/// Starts from the `m` columns with the smallest normalised distance score
/// `v_j = Σ_i d_ij / Σ_l d_il`, then alternates nearest-medoid assignment
/// with a within-cluster medoid update until the objective stops falling.
pub fn kmedoids_sf(columns: &DenseMatrix, m: usize, max_iter: usize) -> Result<Clustering> {
    let q = columns.ncols();
    check_clusters(m, q)?;
    let d = pairwise_sq_dists(columns);

    let row_sums: Vec<f64> = (0..q).map(|i| d.row(i).sum()).collect();
    let mut score: Vec<(f64, usize)> = (0..q)
        .map(|j| {
            let v = (0..q)
                .filter(|&i| row_sums[i] > 0.0)
                .map(|i| d[(i, j)] / row_sums[i])
                .sum::<f64>();
            (v, j)
        })
        .collect();
    score.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut medoids: Vec<usize> = score[..m].iter().map(|&(_, j)| j).collect();
    medoids.sort_unstable();

    let (mut assign, mut objective) = assign_to_medoids(&d, &medoids);
    let mut trace = vec![objective];

    for _ in 0..max_iter {
        let mut next = medoids.clone();
        for (c, slot) in next.iter_mut().enumerate() {
            let members: Vec<usize> = (0..q).filter(|&j| assign[j] == c).collect();
            if members.is_empty() {
                continue;
            }
            let mut best = (f64::INFINITY, *slot);
            for &cand in &members {
                let cost: f64 = members.iter().map(|&j| d[(j, cand)]).sum();
                if cost < best.0 || (cost == best.0 && cand < best.1) {
                    best = (cost, cand);
                }
            }
            *slot = best.1;
        }
        let (next_assign, next_objective) = assign_to_medoids(&d, &next);
        if !(next_objective < objective) {
            break;
        }
        medoids = next;
        assign = next_assign;
        objective = next_objective;
        trace.push(objective);
    }

    Ok(Clustering {
        assignments: assign,
        centers: Centers::Medoids(medoids),
        objective,
        objective_trace: trace,
    })
}

/// For each center in order, the nearest column that is neither forbidden
/// nor already chosen. Returned indices are local to `columns`.
pub fn nearest_columns(
    centers: &DenseMatrix,
    columns: &DenseMatrix,
    forbidden: &IndexSet,
) -> Result<IndexSet> {
    let q = columns.ncols();
    let m = centers.ncols();
    if centers.nrows() != columns.nrows() {
        return Err(Error::DimensionMismatch(centers.nrows(), columns.nrows()));
    }
    let mut taken = vec![false; q];
    for &f in forbidden.iter() {
        if f < q {
            taken[f] = true;
        }
    }
    let available = taken.iter().filter(|t| !**t).count();
    if m > available {
        return Err(Error::NotEnoughCandidates {
            requested: m,
            available,
        });
    }
    let mut chosen = Vec::with_capacity(m);
    for c in 0..m {
        let center = column(centers, c);
        let mut best = (f64::INFINITY, usize::MAX);
        for j in (0..q).filter(|&j| !taken[j]) {
            let dist = sq_dist(center, column(columns, j));
            if dist < best.0 || best.1 == usize::MAX {
                best = (dist, j);
            }
        }
        taken[best.1] = true;
        chosen.push(best.1);
    }
    Ok(IndexSet(chosen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn line(points: &[f64]) -> DenseMatrix {
        DenseMatrix::from_row_slice(1, points.len(), points)
    }

    fn random_columns(dim: usize, q: usize, rng: &mut RngState) -> DenseMatrix {
        DenseMatrix::from_fn(dim, q, |_, _| rng.random_range(-1.0..1.0))
    }

    /// Optimal k-means objective by enumerating every labelling.
    fn exhaustive_kmeans(columns: &DenseMatrix, m: usize) -> f64 {
        let (dim, q) = columns.shape();
        let mut labels = vec![0usize; q];
        let mut best = f64::INFINITY;
        loop {
            let mut total = 0.0;
            let mut ok = true;
            for c in 0..m {
                let members: Vec<usize> = (0..q).filter(|&j| labels[j] == c).collect();
                if members.is_empty() {
                    ok = false;
                    break;
                }
                for r in 0..dim {
                    let mean = members.iter().map(|&j| columns[(r, j)]).sum::<f64>()
                        / members.len() as f64;
                    total += members
                        .iter()
                        .map(|&j| (columns[(r, j)] - mean).powi(2))
                        .sum::<f64>();
                }
            }
            if ok {
                best = best.min(total);
            }
            let mut pos = 0;
            loop {
                if pos == q {
                    return best;
                }
                labels[pos] += 1;
                if labels[pos] < m {
                    break;
                }
                labels[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn sample_uniform_examples() {
        let mut rng = rng_from_seed(1);
        let mut all = sample_uniform(5, 5, &IndexSet::empty(), &mut rng).unwrap().into_vec();
        all.sort();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);

        let excl = IndexSet::new(vec![0, 1], 5).unwrap();
        let mut rest = sample_uniform(5, 3, &excl, &mut rng).unwrap().into_vec();
        rest.sort();
        assert_eq!(rest, vec![2, 3, 4]);

        assert_eq!(
            sample_uniform(5, 4, &excl, &mut rng),
            Err(Error::NotEnoughCandidates {
                requested: 4,
                available: 3
            })
        );
    }

    #[test]
    fn sample_uniform_frequencies() {
        // Each index is drawn with probability 0.1 per repetition.
        let mut rng = rng_from_seed(2024);
        let reps = 10_000;
        let mut freq = vec![0usize; 1000];
        for _ in 0..reps {
            for &i in sample_uniform(1000, 100, &IndexSet::empty(), &mut rng).unwrap().iter() {
                freq[i] += 1;
            }
        }
        let expect = reps as f64 * 0.1;
        let sd = (reps as f64 * 0.1 * 0.9).sqrt();
        let chi2: f64 = freq.iter().map(|&f| (f as f64 - expect).powi(2) / expect).sum();
        for &f in &freq {
            assert!((f as f64 - expect).abs() <= 4.0 * sd, "frequency {f}");
        }
        // 999 dof: mean 999, sd ~45
        assert!(chi2 < 999.0 + 6.0 * 44.7, "chi2 {chi2}");
    }

    #[test]
    fn sample_uniform_respects_exclusions() {
        let mut rng = rng_from_seed(5);
        for trial in 0..500 {
            let n = 20 + trial % 30;
            let excl = sample_uniform(n, trial % 10, &IndexSet::empty(), &mut rng).unwrap();
            let count = rng.random_range(0..=(n - excl.len()) as u64) as usize;
            let drawn = sample_uniform(n, count, &excl, &mut rng).unwrap();
            assert_eq!(drawn.len(), count);
            assert!(drawn.iter().all(|i| !excl.contains(i) && *i < n));
            assert!(IndexSet::new(drawn.into_vec(), n).is_ok());
        }
    }

    #[test]
    fn sample_uniform_deterministic() {
        let a = sample_uniform(100, 10, &IndexSet::empty(), &mut rng_from_seed(9)).unwrap();
        let b = sample_uniform(100, 10, &IndexSet::empty(), &mut rng_from_seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kmeans_separated_and_degenerate() {
        let c = kmeans(&line(&[0.0, 10.0]), 2, &mut rng_from_seed(0), 50).unwrap();
        assert_eq!(c.objective, 0.0);
        assert_ne!(c.assignments[0], c.assignments[1]);

        let same = DenseMatrix::from_element(3, 6, 2.5);
        let c = kmeans(&same, 1, &mut rng_from_seed(0), 50).unwrap();
        assert_eq!(c.objective, 0.0);
        assert!(c.assignments.iter().all(|&a| a == 0));

        assert!(matches!(
            kmeans(&line(&[0.0]), 2, &mut rng_from_seed(0), 5),
            Err(Error::TooManyClusters { .. })
        ));
    }

    #[test]
    fn kmeans_monotone_objective() {
        let mut rng = rng_from_seed(77);
        for _ in 0..100 {
            let q = rng.random_range(5..40u64) as usize;
            let m = rng.random_range(1..=q as u64) as usize;
            let cols = random_columns(4, q, &mut rng);
            let c = kmeans(&cols, m, &mut rng, 100).unwrap();
            for w in c.objective_trace.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} -> {}", w[0], w[1]);
            }
            assert!(c.assignments.iter().all(|&a| a < m));
            let mut used = vec![false; m];
            c.assignments.iter().for_each(|&a| used[a] = true);
            assert!(used.iter().all(|u| *u), "empty cluster");
        }
    }

    #[test]
    fn kmeans_planted_blobs_against_enumeration() {
        let mut hits = 0;
        let trials = 50;
        for seed in 0..trials {
            let mut rng = rng_from_seed(1000 + seed);
            let anchors = [(0.0, 0.0), (8.0, 0.0), (4.0, 7.0)];
            let cols = DenseMatrix::from_fn(2, 12, |r, j| {
                let a = anchors[j / 4];
                let base = if r == 0 { a.0 } else { a.1 };
                base + rng.random_range(-0.5..0.5)
            });
            let oracle = exhaustive_kmeans(&cols, 3);
            let c = kmeans(&cols, 3, &mut rng_from_seed(seed), 100).unwrap();
            assert!(c.objective >= oracle - 1e-9);
            if (c.objective - oracle).abs() <= 1e-9 {
                hits += 1;
            }
        }
        eprintln!("kmeans reached the enumerated optimum in {hits}/{trials} seeds");
        assert!(hits * 10 >= trials * 9, "{hits}/{trials}");
    }

    #[test]
    fn pam_examples() {
        let c = kmedoids_pam(&line(&[0.0, 10.0]), 2, 100).unwrap();
        assert_eq!(c.centers, Centers::Medoids(vec![0, 1]));
        assert_eq!(c.objective, 0.0);

        let mut rng = rng_from_seed(8);
        let cols = random_columns(3, 6, &mut rng);
        let c = kmedoids_pam(&cols, 6, 100).unwrap();
        assert_eq!(c.objective, 0.0);
        assert_eq!(c.centers, Centers::Medoids((0..6).collect()));
    }

    #[test]
    fn pam_is_swap_optimal_and_bounded_by_exhaustive() {
        let mut rng = rng_from_seed(31);
        let mut matched = 0;
        for _ in 0..200 {
            let q = rng.random_range(2..=8u64) as usize;
            let cols = random_columns(3, q, &mut rng);
            let d = pairwise_sq_dists(&cols);
            let cost = |a: usize, b: usize| (0..q).map(|j| d[(j, a)].min(d[(j, b)])).sum::<f64>();
            let mut best = f64::INFINITY;
            for a in 0..q {
                for b in (a + 1)..q {
                    best = best.min(cost(a, b));
                }
            }
            let c = kmedoids_pam(&cols, 2, 100).unwrap();
            let tol = 1e-12 * best.max(1.0);
            assert!(c.objective >= best - tol);
            let Centers::Medoids(meds) = &c.centers else { panic!("medoids expected") };
            for x in (0..q).filter(|x| !meds.contains(x)) {
                assert!(cost(x, meds[1]) >= c.objective - tol);
                assert!(cost(meds[0], x) >= c.objective - tol);
            }
            if c.objective <= best + tol {
                matched += 1;
            }
        }
        // BUILD + SWAP is a local search; it finds the global pair most of the time.
        assert!(matched >= 180, "matched {matched} of 200");
    }

    #[test]
    fn sf_examples() {
        let c = kmedoids_sf(&line(&[0.0, 10.0]), 2, 100).unwrap();
        assert_eq!(c.centers, Centers::Medoids(vec![0, 1]));

        let same = DenseMatrix::from_element(2, 5, -1.0);
        for m in 1..=5 {
            assert_eq!(kmedoids_sf(&same, m, 100).unwrap().objective, 0.0);
        }
    }

    #[test]
    fn sf_versus_pam() {
        let mut rng = rng_from_seed(44);
        for _ in 0..50 {
            let cols = random_columns(2, 8, &mut rng);
            let sf = kmedoids_sf(&cols, 2, 100).unwrap();
            let pam = kmedoids_pam(&cols, 2, 100).unwrap();
            let d = pairwise_sq_dists(&cols);
            let mut best = f64::INFINITY;
            for a in 0..8 {
                for b in (a + 1)..8 {
                    best = best.min((0..8).map(|j| d[(j, a)].min(d[(j, b)])).sum::<f64>());
                }
            }
            assert!(sf.objective >= best - 1e-12);
            assert!(pam.objective >= best - 1e-12);
            assert!(sf.objective <= sf.objective_trace[0]);
            match &sf.centers {
                Centers::Medoids(meds) => assert!(meds.iter().all(|&j| j < 8)),
                _ => panic!("medoids expected"),
            }
        }
    }

    #[test]
    fn clustering_is_deterministic() {
        let cols = random_columns(5, 30, &mut rng_from_seed(3));
        assert_eq!(
            kmeans(&cols, 4, &mut rng_from_seed(12), 100).unwrap(),
            kmeans(&cols, 4, &mut rng_from_seed(12), 100).unwrap()
        );
        assert_eq!(kmedoids_pam(&cols, 4, 100).unwrap(), kmedoids_pam(&cols, 4, 100).unwrap());
        assert_eq!(kmedoids_sf(&cols, 4, 100).unwrap(), kmedoids_sf(&cols, 4, 100).unwrap());
    }

    #[test]
    fn nearest_columns_examples() {
        let cols = line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let centers = line(&[2.0, 5.0]);
        assert_eq!(
            nearest_columns(&centers, &cols, &IndexSet::empty()).unwrap().as_slice(),
            &[2, 5]
        );

        let cols = line(&[9.0, 1.0, 9.0, 3.0]);
        let centers = line(&[2.0]);
        assert_eq!(
            nearest_columns(&centers, &cols, &IndexSet::empty()).unwrap().as_slice(),
            &[1]
        );

        let forbidden = IndexSet::new(vec![0, 1, 2], 4).unwrap();
        assert!(matches!(
            nearest_columns(&line(&[0.0, 1.0]), &cols, &forbidden),
            Err(Error::NotEnoughCandidates { .. })
        ));
    }

    #[test]
    fn nearest_columns_brute_force() {
        let mut rng = rng_from_seed(61);
        for _ in 0..100 {
            let cols = random_columns(3, 10, &mut rng);
            let centers = random_columns(3, 3, &mut rng);
            let forbidden = sample_uniform(10, 2, &IndexSet::empty(), &mut rng).unwrap();
            let got = nearest_columns(&centers, &cols, &forbidden).unwrap();

            let mut taken: Vec<usize> = forbidden.to_vec();
            for c in 0..3 {
                let mut dists: Vec<(f64, usize)> = (0..10)
                    .filter(|j| !taken.contains(j))
                    .map(|j| ((cols.column(j) - centers.column(c)).norm_squared(), j))
                    .collect();
                dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                assert_eq!(got[c], dists[0].1);
                taken.push(dists[0].1);
            }
        }
    }

    #[test]
    fn index_set_helpers() {
        assert_eq!(IndexSet::new(vec![1, 1], 3), Err(Error::DuplicateIndex(1)));
        assert!(matches!(IndexSet::new(vec![3], 3), Err(Error::IndexOutOfRange { .. })));
        let a = IndexSet::new(vec![4, 2], 5).unwrap();
        let b = IndexSet::new(vec![0], 5).unwrap();
        assert_eq!(a.union(&b).unwrap().as_slice(), &[4, 2, 0]);
        assert!(a.union(&a).is_err());
        assert_eq!(a.pick(&[1]).unwrap().as_slice(), &[2]);
    }
}
