//! The noisy registration objective: bidirectional greedy closest-point
//! correspondence driven by a randomized match order, with matches weighted
//! by how many directions agree.
//!
//! Evaluating a candidate transform `c` against a static set `S` and a
//! deformed set `D` proceeds as:
//!
//! 1. warp `D` with `c`, giving `W` (n points; `S` has k points);
//! 2. build the n-by-k Euclidean distance matrix;
//! 3. greedily match `W` to `S` visiting warped points in the order given by
//!    the match-order vector (each point claims its nearest not-yet-assigned
//!    target), yielding the binary matrix `M'`; repeat in the opposite
//!    direction for `M''`;
//! 4. weight each `W`-to-`S` match by the reciprocal of the number of
//!    directions that found it (`Q = M' + M''`, `Q* = 1/Q` elementwise where
//!    non-zero), and sum the weighted distances.
//!
//! Bidirectional matches therefore count at half weight and one-directional
//! matches at full weight; lower fitness is better. Randomizing the visit
//! order each generation makes the objective noisy, but within a generation
//! identical chromosomes receive identical values.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::geometry::{AffineParams, PointSet};

/// Dense row-major matrix of pairwise Euclidean distances; rows index the
/// warped set, columns the static set.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Pairwise distances between a warped set (rows) and a static set
    /// (columns).
    pub fn between(w: &PointSet, s: &PointSet) -> Self {
        let rows = w.len();
        let cols = s.len();
        let mut data = Vec::with_capacity(rows * cols);
        for wp in w.iter() {
            for sp in s.iter() {
                data.push(wp.distance(sp));
            }
        }
        DistanceMatrix { rows, cols, data }
    }

    /// Wrap an explicit matrix. Entries must be finite and non-negative;
    /// `data` is row-major with `rows * cols` entries.
    ///
    /// Panics when the shape or entries are invalid. Intended for tests and
    /// tooling; production paths go through [`DistanceMatrix::between`].
    pub fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape mismatch");
        assert!(
            data.iter().all(|d| d.is_finite() && *d >= 0.0),
            "distances must be finite and non-negative"
        );
        DistanceMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Column-major copy of the entries; lets the column-side greedy pass
    /// scan contiguous memory.
    fn transposed_data(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }
}

/// Visit orders for the two matching passes: a permutation of the warped
/// indices (`0..n`) and one of the static indices (`0..k`).
#[derive(Debug, Clone, PartialEq)]
pub struct MatchOrder {
    w_order: Vec<usize>,
    s_order: Vec<usize>,
}

impl MatchOrder {
    /// Validates that both vectors are permutations of their index ranges.
    /// Panics otherwise.
    pub fn new(w_order: Vec<usize>, s_order: Vec<usize>) -> Self {
        assert!(is_permutation(&w_order), "w_order is not a permutation");
        assert!(is_permutation(&s_order), "s_order is not a permutation");
        MatchOrder { w_order, s_order }
    }

    /// Index order (0, 1, 2, ...) on both sides.
    pub fn in_index_order(n: usize, k: usize) -> Self {
        MatchOrder {
            w_order: (0..n).collect(),
            s_order: (0..k).collect(),
        }
    }

    /// Uniformly random permutations drawn from `rng`; deterministic given
    /// the generator state.
    pub fn random<R: Rng>(n: usize, k: usize, rng: &mut R) -> Self {
        let mut w_order: Vec<usize> = (0..n).collect();
        w_order.shuffle(rng);
        let mut s_order: Vec<usize> = (0..k).collect();
        s_order.shuffle(rng);
        MatchOrder { w_order, s_order }
    }

    pub fn w_order(&self) -> &[usize] {
        &self.w_order
    }

    pub fn s_order(&self) -> &[usize] {
        &self.s_order
    }
}

fn is_permutation(order: &[usize]) -> bool {
    let mut seen = vec![false; order.len()];
    for &i in order {
        if i >= order.len() || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// Which side claims matches during a greedy pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Warped points claim static points; sources are rows.
    WToS,
    /// Static points claim warped points; sources are columns.
    SToW,
}

/// Dense row-major matrix used for correspondence and weight matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Grid {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }
}

/// Binary correspondence matrix; at most one `true` per row and per column.
pub type BinaryMatrix = Grid<bool>;

impl Grid<bool> {
    pub fn row_count(&self, i: usize) -> usize {
        (0..self.cols).filter(|&j| self.get(i, j)).count()
    }

    pub fn col_count(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    pub fn ones(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Greedy closest-point pass over an explicit source ordering.
///
/// Sources are rows for [`Direction::WToS`] and columns for
/// [`Direction::SToW`]; `order` must be a permutation of the source index
/// range. Each visited source claims its nearest target among those not yet
/// claimed in this pass (lowest index wins ties); a source finding every
/// target claimed stays unmatched.
pub fn greedy_assign(delta: &DistanceMatrix, order: &[usize], direction: Direction) -> BinaryMatrix {
    assert!(is_permutation(order), "order is not a permutation");
    let expected = match direction {
        Direction::WToS => delta.rows(),
        Direction::SToW => delta.cols(),
    };
    assert_eq!(order.len(), expected, "order length does not match source side");

    let targets = greedy_targets(delta, order, direction);
    let mut out = Grid::filled(delta.rows(), delta.cols(), false);
    for (src, tgt) in targets.iter().enumerate() {
        if let Some(tgt) = *tgt {
            match direction {
                Direction::WToS => out.set(src, tgt, true),
                Direction::SToW => out.set(tgt, src, true),
            }
        }
    }
    out
}

/// Core of the greedy pass: `result[src] = Some(tgt)` for each matched
/// source, in source index space. Sources index rows of `data`.
fn greedy_targets(delta: &DistanceMatrix, order: &[usize], direction: Direction) -> Vec<Option<usize>> {
    match direction {
        Direction::WToS => greedy_scan_rows(&delta.data, delta.rows, delta.cols, order),
        Direction::SToW => {
            let transposed = delta.transposed_data();
            greedy_scan_rows(&transposed, delta.cols, delta.rows, order)
        }
    }
}

fn greedy_scan_rows(data: &[f64], rows: usize, cols: usize, order: &[usize]) -> Vec<Option<usize>> {
    debug_assert_eq!(order.len(), rows);
    let mut taken = vec![false; cols];
    let mut target_of: Vec<Option<usize>> = vec![None; rows];
    for &src in order {
        let row = &data[src * cols..(src + 1) * cols];
        let mut best: f64 = f64::INFINITY;
        let mut best_tgt: Option<usize> = None;
        for (tgt, (claimed, &d)) in taken.iter().zip(row).enumerate() {
            if !*claimed && d < best {
                best = d;
                best_tgt = Some(tgt);
            }
        }
        if let Some(tgt) = best_tgt {
            taken[tgt] = true;
            target_of[src] = Some(tgt);
        }
    }
    target_of
}

/// Full evaluation record: both correspondence matrices, the derived weight
/// matrices, and the scalar fitness.
#[derive(Debug, Clone)]
pub struct MatchResult {
    /// W-to-S matches.
    pub m_prime: BinaryMatrix,
    /// S-to-W matches.
    pub m_double_prime: BinaryMatrix,
    /// Per-pair match multiplicity: `m_prime + m_double_prime`, in {0, 1, 2}.
    pub q: Grid<u8>,
    /// Reciprocal multiplicity, zero where `q` is zero.
    pub q_star: Grid<f64>,
    /// Final match weights: `m_prime * q_star` elementwise.
    pub m: Grid<f64>,
    /// Sum of weighted matched distances; non-negative, lower is better.
    pub fitness: f64,
}

/// Objective function value of candidate `c` for aligning `d` to `s` under
/// the given match order. Lower is better; zero means every warped point
/// lies exactly on its bidirectional match.
///
/// This is the hot path: identical to [`evaluate_detailed`] but skipping the
/// intermediate matrices.
pub fn evaluate(s: &PointSet, d: &PointSet, c: &AffineParams, order: &MatchOrder) -> f64 {
    assert_eq!(order.w_order().len(), d.len(), "w_order sized to |d|");
    assert_eq!(order.s_order().len(), s.len(), "s_order sized to |s|");

    let w = c.warp(d);
    let delta = DistanceMatrix::between(&w, s);
    let w2s = greedy_targets(&delta, order.w_order(), Direction::WToS);
    let s2w = greedy_targets(&delta, order.s_order(), Direction::SToW);

    let mut fitness = 0.0;
    for (i, matched) in w2s.iter().enumerate() {
        if let Some(j) = *matched {
            let weight = if s2w[j] == Some(i) { 0.5 } else { 1.0 };
            fitness += weight * delta.get(i, j);
        }
    }
    fitness
}

/// As [`evaluate`], but materializes every intermediate matrix.
pub fn evaluate_detailed(s: &PointSet, d: &PointSet, c: &AffineParams, order: &MatchOrder) -> MatchResult {
    assert_eq!(order.w_order().len(), d.len(), "w_order sized to |d|");
    assert_eq!(order.s_order().len(), s.len(), "s_order sized to |s|");

    let w = c.warp(d);
    let delta = DistanceMatrix::between(&w, s);
    let m_prime = greedy_assign(&delta, order.w_order(), Direction::WToS);
    let m_double_prime = greedy_assign(&delta, order.s_order(), Direction::SToW);

    let (n, k) = (delta.rows(), delta.cols());
    let mut q = Grid::filled(n, k, 0u8);
    let mut q_star = Grid::filled(n, k, 0.0f64);
    let mut m = Grid::filled(n, k, 0.0f64);
    let mut fitness = 0.0;
    for i in 0..n {
        for j in 0..k {
            let qij = m_prime.get(i, j) as u8 + m_double_prime.get(i, j) as u8;
            q.set(i, j, qij);
            let q_star_ij = if qij != 0 { 1.0 / f64::from(qij) } else { 0.0 };
            q_star.set(i, j, q_star_ij);
            let mij = if m_prime.get(i, j) { q_star_ij } else { 0.0 };
            m.set(i, j, mij);
            fitness += mij * delta.get(i, j);
        }
    }

    MatchResult {
        m_prime,
        m_double_prime,
        q,
        q_star,
        m,
        fitness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn pts(coords: &[(f64, f64)]) -> PointSet {
        PointSet::new(coords.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn distance_matrix_basics() {
        let single = pts(&[(0.0, 0.0)]);
        let d = DistanceMatrix::between(&single, &single);
        assert_eq!((d.rows(), d.cols()), (1, 1));
        assert_eq!(d.get(0, 0), 0.0);

        let d = DistanceMatrix::between(&pts(&[(0.0, 0.0)]), &pts(&[(3.0, 4.0)]));
        assert_eq!(d.get(0, 0), 5.0);
    }

    #[test]
    fn distance_matrix_two_by_two() {
        let w = pts(&[(0.0, 0.0), (10.0, 0.0)]);
        let s = pts(&[(0.0, 1.0), (10.0, 1.0)]);
        let d = DistanceMatrix::between(&w, &s);
        let root101 = 101.0f64.sqrt();
        assert_eq!(d.get(0, 0), 1.0);
        assert_eq!(d.get(0, 1), root101);
        assert_eq!(d.get(1, 0), root101);
        assert_eq!(d.get(1, 1), 1.0);
    }

    #[test]
    fn greedy_uncontested_nearest() {
        let root101 = 101.0f64.sqrt();
        let delta = DistanceMatrix::from_raw(2, 2, vec![1.0, root101, root101, 1.0]);
        for order in [vec![0, 1], vec![1, 0]] {
            let m = greedy_assign(&delta, &order, Direction::WToS);
            assert!(m.get(0, 0) && m.get(1, 1));
            assert!(!m.get(0, 1) && !m.get(1, 0));
        }
    }

    #[test]
    fn greedy_order_decides_contested_target() {
        // Two warped points, one static target: whoever visits first claims it.
        let w = pts(&[(0.0, 0.0), (0.5, 0.0)]);
        let s = pts(&[(0.0, 0.0)]);
        let delta = DistanceMatrix::between(&w, &s);

        let first = greedy_assign(&delta, &[0, 1], Direction::WToS);
        assert!(first.get(0, 0));
        assert_eq!(first.ones(), 1);

        let second = greedy_assign(&delta, &[1, 0], Direction::WToS);
        assert!(second.get(1, 0));
        assert_eq!(second.ones(), 1);
    }

    #[test]
    fn greedy_single_cell() {
        let delta = DistanceMatrix::from_raw(1, 1, vec![42.0]);
        let m = greedy_assign(&delta, &[0], Direction::WToS);
        assert!(m.get(0, 0));
    }

    #[test]
    fn greedy_ties_prefer_lowest_index() {
        let delta = DistanceMatrix::from_raw(1, 3, vec![2.0, 2.0, 2.0]);
        let m = greedy_assign(&delta, &[0], Direction::WToS);
        assert!(m.get(0, 0));
        assert_eq!(m.ones(), 1);
    }

    #[test]
    fn evaluate_zero_at_coincidence() {
        let s = pts(&[(1.0, 2.0), (3.0, -4.0), (0.5, 0.25)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let order = MatchOrder::random(s.len(), s.len(), &mut rng);
            assert_eq!(evaluate(&s, &s, &AffineParams::IDENTITY, &order), 0.0);
        }
    }

    #[test]
    fn evaluate_half_weights_bidirectional_matches() {
        let s = pts(&[(0.0, 1.0), (10.0, 1.0)]);
        let d = pts(&[(0.0, 0.0), (10.0, 0.0)]);
        for (wo, so) in [
            (vec![0, 1], vec![0, 1]),
            (vec![1, 0], vec![0, 1]),
            (vec![0, 1], vec![1, 0]),
            (vec![1, 0], vec![1, 0]),
        ] {
            let order = MatchOrder::new(wo, so);
            assert_eq!(evaluate(&s, &d, &AffineParams::IDENTITY, &order), 1.0);
        }
    }

    #[test]
    fn evaluate_depends_on_visit_order() {
        let s = pts(&[(0.0, 0.0)]);
        let d = pts(&[(0.0, 0.0), (0.5, 0.0)]);

        let near_first = MatchOrder::new(vec![0, 1], vec![0]);
        assert_eq!(evaluate(&s, &d, &AffineParams::IDENTITY, &near_first), 0.0);

        let far_first = MatchOrder::new(vec![1, 0], vec![0]);
        assert_eq!(evaluate(&s, &d, &AffineParams::IDENTITY, &far_first), 0.5);
    }

    #[test]
    fn evaluate_detailed_matches_fast_path_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(1..8);
            let k = rng.random_range(1..8);
            let d = pts(&random_coords(n, &mut rng));
            let s = pts(&random_coords(k, &mut rng));
            let mut theta = [0.0; 6];
            for t in &mut theta {
                *t = rng.random_range(-2.0..2.0);
            }
            let c = AffineParams::new(theta);
            let order = MatchOrder::random(n, k, &mut rng);
            let detailed = evaluate_detailed(&s, &d, &c, &order);
            let fast = evaluate(&s, &d, &c, &order);
            assert_eq!(detailed.fitness.to_bits(), fast.to_bits());
        }
    }

    #[test]
    fn evaluate_detailed_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..200 {
            let n = rng.random_range(1..7);
            let k = rng.random_range(1..7);
            let d = pts(&random_coords(n, &mut rng));
            let s = pts(&random_coords(k, &mut rng));
            let order = MatchOrder::random(n, k, &mut rng);
            let r = evaluate_detailed(&s, &d, &AffineParams::IDENTITY, &order);

            // Injectivity on both correspondence matrices.
            for m in [&r.m_prime, &r.m_double_prime] {
                for i in 0..n {
                    assert!(m.row_count(i) <= 1);
                }
                for j in 0..k {
                    assert!(m.col_count(j) <= 1);
                }
                // Greedy always matches the smaller side fully.
                assert_eq!(m.ones(), n.min(k));
            }

            // Q, Q*, M elementwise contracts.
            for i in 0..n {
                for j in 0..k {
                    let q = r.q.get(i, j);
                    assert!(q <= 2);
                    assert_eq!(
                        q,
                        r.m_prime.get(i, j) as u8 + r.m_double_prime.get(i, j) as u8
                    );
                    let qs = r.q_star.get(i, j);
                    if q == 0 {
                        assert_eq!(qs, 0.0);
                    } else {
                        assert_eq!(qs, 1.0 / f64::from(q));
                    }
                    let m = r.m.get(i, j);
                    if r.m_prime.get(i, j) {
                        assert_eq!(m, qs);
                    } else {
                        assert_eq!(m, 0.0);
                    }
                }
            }
            assert!(r.fitness >= 0.0);
        }
    }

    #[test]
    fn evaluate_is_deterministic_per_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = pts(&random_coords(20, &mut rng));
        let d = pts(&random_coords(20, &mut rng));
        let c = AffineParams::new([0.9, 0.1, 3.0, -0.1, 1.1, 2.0]);
        let order = MatchOrder::random(20, 20, &mut rng);
        let a = evaluate(&s, &d, &c, &order);
        let b = evaluate(&s, &d, &c, &order);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn match_order_single_element() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let order = MatchOrder::random(1, 1, &mut rng);
        assert_eq!(order.w_order(), &[0]);
        assert_eq!(order.s_order(), &[0]);
    }

    #[test]
    fn match_order_same_seed_same_order() {
        let a = MatchOrder::random(12, 9, &mut ChaCha8Rng::seed_from_u64(99));
        let b = MatchOrder::random(12, 9, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
    }

    #[test]
    fn match_order_is_uniform_over_permutations() {
        // Chi-square-style check: all 6 permutations of 3 elements within
        // 1/6 +- 0.02 over 10,000 draws.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        let draws = 10_000;
        for _ in 0..draws {
            let order = MatchOrder::random(3, 1, &mut rng);
            *counts.entry(order.w_order().to_vec()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (_, count) in counts {
            let freq = count as f64 / draws as f64;
            assert!((freq - 1.0 / 6.0).abs() < 0.02, "freq {freq}");
        }
    }

    #[test]
    #[should_panic(expected = "not a permutation")]
    fn match_order_rejects_non_permutation() {
        MatchOrder::new(vec![0, 0], vec![0]);
    }

    fn random_coords(n: usize, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
        (0..n)
            .map(|_| (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)))
            .collect()
    }
}
