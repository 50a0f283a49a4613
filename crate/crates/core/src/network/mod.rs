//! Weight matrices, stationary influence and DeGroot consensus.

mod text;
mod topology;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use topology::{
    build_complete_equal, build_complete_self_weight, build_core_periphery, build_star,
    stationary_complete_self_weight, stationary_core_periphery, stationary_star,
};

/// Maximum absolute deviation of a row sum from 1.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Bound on `‖πW − π‖∞` for a returned stationary distribution.
pub const FIXED_POINT_TOL: f64 = 1e-10;

/// Row-stochastic update weights. Row `i` holds how agent `i` averages
/// everyone's opinions in one DeGroot step.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    w: DMatrix<f64>,
    primitive: bool,
}

impl WeightMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        Self::from_row_major(n, rows.into_iter().flatten().collect())
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize {
                what: "weight matrix",
                got: n,
                min: 2,
            });
        }
        if data.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(n, n, &data))
    }

    /// Validates nonnegativity and row sums, then classifies connectivity.
    pub fn from_matrix(w: DMatrix<f64>) -> Result<Self> {
        let n = w.nrows();
        if n < 2 || w.ncols() != n {
            return Err(Error::InvalidSize {
                what: "weight matrix",
                got: n.min(w.ncols()),
                min: 2,
            });
        }
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                let x = w[(i, j)];
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::domain(format!(
                        "weight ({}, {}) = {x} is not a nonnegative finite number",
                        i + 1,
                        j + 1
                    )));
                }
                sum += x;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::domain(format!("row {} sums to {sum}, not 1", i + 1)));
            }
        }
        let primitive = is_primitive(&w);
        Ok(Self { w, primitive })
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[(i, j)]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.w.row(i).iter().copied().collect()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// True iff some power `W^k` is entrywise positive, i.e. the weight
    /// graph is strongly connected and aperiodic.
    pub fn is_strongly_connected_aperiodic(&self) -> bool {
        self.primitive
    }

    /// Renames agent `i` to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::domain("relabeling is not a permutation"));
            }
            seen[p] = true;
        }
        let mut w = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                w[(perm[i], perm[j])] = self.w[(i, j)];
            }
        }
        Ok(Self {
            w,
            primitive: self.primitive,
        })
    }

    /// Largest absolute entry difference against another matrix of the same size.
    pub fn max_abs_diff(&self, other: &WeightMatrix) -> Option<f64> {
        (self.n() == other.n()).then(|| (&self.w - &other.w).amax())
    }
}

/// Strong connectivity plus aperiodicity of the support graph.
///
/// The period is the gcd over edges `u -> v` of `level(u) + 1 - level(v)`,
/// where levels are BFS distances from agent 0.
fn is_primitive(w: &DMatrix<f64>) -> bool {
    let n = w.nrows();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let edge = if forward { w[(u, v)] } else { w[(v, u)] };
                if edge > 0.0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    if !reach(true) || !reach(false) {
        return false;
    }

    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if w[(u, v)] > 0.0 && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut period = 0usize;
    for u in 0..n {
        for v in 0..n {
            if w[(u, v)] > 0.0 {
                let diff = (level[u] + 1).abs_diff(level[v]);
                period = gcd(period, diff);
                if period == 1 {
                    return true;
                }
            }
        }
    }
    period == 1
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Stationary influence `π` with `πW = π` and `Σπ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceVector(Vec<f64>);

impl InfluenceVector {
    /// Accepts a nonnegative vector summing to 1 within `1e-12`.
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::InvalidSize {
                what: "influence vector",
                got: 0,
                min: 1,
            });
        }
        if pi.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::domain("influence entries must be nonnegative"));
        }
        let sum: f64 = pi.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::domain(format!("influence sums to {sum}, not 1")));
        }
        Ok(Self(pi))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `Σ πₖ²`, the quantity every agent minimises when choosing a dimension.
    pub fn concentration(&self) -> f64 {
        self.0.iter().map(|p| p * p).sum()
    }

    /// `‖πW − π‖∞`.
    pub fn residual(&self, w: &WeightMatrix) -> f64 {
        let pi = DVector::from_column_slice(&self.0);
        let moved = w.as_matrix().tr_mul(&pi);
        (moved - pi).amax()
    }
}

impl std::ops::Index<usize> for InfluenceVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Per-agent scalar opinions.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionVector(Vec<f64>);

impl OpinionVector {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("opinions must be finite"));
        }
        Ok(Self(s))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Solves `(Wᵀ − I)π = 0` with one equation replaced by `Σπ = 1`.
///
/// Falls back to power iteration when the augmented system is numerically
/// singular.
pub fn stationary_distribution(w: &WeightMatrix) -> Result<InfluenceVector> {
    if !w.is_strongly_connected_aperiodic() {
        return Err(Error::NoUniqueStationary);
    }
    let n = w.n();
    let mut a = w.as_matrix().transpose() - DMatrix::<f64>::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;

    let pi = match a.lu().solve(&b) {
        Some(x) if x.iter().all(|v| v.is_finite()) => finish(x.as_slice().to_vec(), w),
        _ => None,
    };
    match pi {
        Some(pi) => Ok(pi),
        None => power_iteration(w),
    }
}

fn finish(mut pi: Vec<f64>, w: &WeightMatrix) -> Option<InfluenceVector> {
    // Round-off can leave entries a few ulps below zero.
    for p in &mut pi {
        if *p < 0.0 && *p > -1e-14 {
            *p = 0.0;
        }
    }
    if pi.iter().any(|p| *p < 0.0) {
        return None;
    }
    let sum: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= sum);
    let pi = InfluenceVector(pi);
    (pi.residual(w) < FIXED_POINT_TOL).then_some(pi)
}

fn power_iteration(w: &WeightMatrix) -> Result<InfluenceVector> {
    const MAX_ITERS: usize = 1_000_000;
    let n = w.n();
    let mut pi = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..MAX_ITERS {
        let next = w.as_matrix().tr_mul(&pi);
        let delta = (&next - &pi).amax();
        pi = next;
        if delta < 1e-15 {
            break;
        }
    }
    finish(pi.as_slice().to_vec(), w)
        .ok_or_else(|| Error::Solver("power iteration did not reach the fixed point".into()))
}

/// Consensus opinion `Σ πₖ sₖ`.
pub fn degroot_consensus(w: &WeightMatrix, s: &OpinionVector) -> Result<f64> {
    check_len(w.n(), s.len())?;
    let pi = stationary_distribution(w)?;
    Ok(pi
        .as_slice()
        .iter()
        .zip(s.as_slice())
        .map(|(p, x)| p * x)
        .sum())
}

/// Applies `s ← W s` `steps` times.
pub fn degroot_iterate(w: &WeightMatrix, s: &OpinionVector, steps: usize) -> Result<OpinionVector> {
    check_len(w.n(), s.len())?;
    let mut v = DVector::from_column_slice(s.as_slice());
    for _ in 0..steps {
        v = w.as_matrix() * v;
    }
    Ok(OpinionVector(v.as_slice().to_vec()))
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig6() -> WeightMatrix {
        build_complete_self_weight(&[0.1, 0.25, 0.4, 0.7]).unwrap()
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            WeightMatrix::from_rows(vec![vec![0.5, 0.6], vec![0.5, 0.5]]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            WeightMatrix::from_rows(vec![vec![1.5, -0.5], vec![0.5, 0.5]]),
            Err(Error::Domain(_))
        ));
        assert!(WeightMatrix::from_rows(vec![vec![1.0]]).is_err());
    }

    #[test]
    fn connectivity_classification() {
        // Two-cycle is periodic.
        let flip = WeightMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(!flip.is_strongly_connected_aperiodic());
        // Identity is disconnected.
        let id = WeightMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!id.is_strongly_connected_aperiodic());
        // 3-cycle plus one chord of length 2 gives cycle lengths 3 and 2.
        let w = WeightMatrix::from_rows(vec![
            vec![0.0, 0.5, 0.5],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(w.is_strongly_connected_aperiodic());
        assert!(build_star(5).unwrap().is_strongly_connected_aperiodic());
    }

    #[test]
    fn stationary_rejects_periodic() {
        let flip = WeightMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(
            stationary_distribution(&flip),
            Err(Error::NoUniqueStationary)
        );
        assert!(degroot_consensus(&flip, &OpinionVector::new(vec![0.0, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary_distribution(&build_complete_equal(4).unwrap()).unwrap();
        for p in pi.as_slice() {
            assert_abs_diff_eq!(*p, 0.25, epsilon = 1e-12);
        }
        let pi = stationary_distribution(&fig6()).unwrap();
        for (p, want) in pi.as_slice().iter().zip([0.149, 0.179, 0.224, 0.448]) {
            assert_abs_diff_eq!(*p, want, epsilon = 1e-3);
        }
        let pi = stationary_distribution(&build_core_periphery(7).unwrap()).unwrap();
        for p in &pi.as_slice()[..6] {
            assert_abs_diff_eq!(*p, 4.0 / 31.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(pi[6], 7.0 / 31.0, epsilon = 1e-12);
    }

    #[test]
    fn power_iteration_agrees_with_elimination() {
        let w = fig6();
        let a = stationary_distribution(&w).unwrap();
        let b = power_iteration(&w).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn consensus_examples() {
        let w = build_complete_equal(4).unwrap();
        let s = OpinionVector::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(degroot_consensus(&w, &s).unwrap(), 2.5, epsilon = 1e-12);

        let c = OpinionVector::new(vec![-3.5; 4]).unwrap();
        assert_abs_diff_eq!(
            degroot_consensus(&fig6(), &c).unwrap(),
            -3.5,
            epsilon = 1e-12
        );

        // Oracle: iterate W s 500 times.
        let e1 = OpinionVector::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let iterated = degroot_iterate(&fig6(), &e1, 500).unwrap();
        let consensus = degroot_consensus(&fig6(), &e1).unwrap();
        assert_abs_diff_eq!(consensus, 0.149, epsilon = 1e-3);
        for x in iterated.as_slice() {
            assert_abs_diff_eq!(*x, consensus, epsilon = 1e-8);
        }
    }

    #[test]
    fn iterate_examples() {
        let w = build_complete_equal(2).unwrap();
        let s = OpinionVector::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(degroot_iterate(&w, &s, 0).unwrap(), s);
        assert_eq!(degroot_iterate(&w, &s, 1).unwrap().as_slice(), &[0.5, 0.5]);
        assert!(degroot_iterate(&w, &OpinionVector::new(vec![1.0]).unwrap(), 1).is_err());
    }

    #[test]
    fn relabel_moves_star_center() {
        let star = build_star(4).unwrap();
        // Center (index 3) becomes agent 0.
        let moved = star.relabel(&[1, 2, 3, 0]).unwrap();
        assert_eq!(moved.row(0), vec![0.25; 4]);
        assert_eq!(moved.row(1), vec![0.5, 0.5, 0.0, 0.0]);
        assert!(star.relabel(&[0, 0, 1, 2]).is_err());
    }
}
