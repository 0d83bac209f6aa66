//! Exact rational feasibility for A μ = b, μ >= 0: existence of color
//! representations, Farkas infeasibility certificates, and the S_n symmetry
//! reduction to partition shapes.
//!
//! The decision procedure is a phase-1 simplex with Bland's rule over big
//! rationals. Floats decide nothing here: the K_4 feasibility boundary is
//! algebraic (the threshold is x = 2 + √3) and a float LP misclassifies close
//! to it.

use crate::colorop;
use crate::error::{Error, Result};
use crate::ising::{self, SpinMeasure};
use crate::linalg::{self, Mat};
use crate::partitions::{self, PartitionShape, SetPartition};
use crate::ratio::{self, Ratio};
use crate::rcm::PartitionMeasure;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Hard cap on simplex pivots; Bland's rule terminates long before this on
/// every in-scope instance.
pub const PIVOT_CAP: usize = 1_000_000;

/// Column index space of a feasibility problem.
#[derive(Debug, Clone)]
pub enum ColumnLabels {
    Partitions(Vec<SetPartition>),
    Shapes(Vec<PartitionShape>),
}

/// An exact constraint system A μ = b, μ >= 0.
#[derive(Debug, Clone)]
pub struct FeasibilityProblem {
    pub mat: Mat,
    pub rhs: Vec<Ratio>,
    pub columns: ColumnLabels,
    pub reduced: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

/// A feasible witness (full or shape-level) or a Farkas certificate c with
/// cᵀA >= 0 and cᵀb < 0, verified exactly before being returned.
#[derive(Debug, Clone)]
pub struct FeasibilityOutcome {
    pub status: FeasibilityStatus,
    pub witness: Option<PartitionMeasure>,
    pub shape_witness: Option<Vec<(PartitionShape, Ratio)>>,
    pub certificate: Option<Vec<Ratio>>,
}

/// Raw simplex verdict on A x = b, x >= 0.
#[derive(Debug, Clone)]
pub enum SimplexResult {
    Feasible(Vec<Ratio>),
    Infeasible(Vec<Ratio>),
}

/// Phase-1 simplex with Bland's rule. Returns a basic feasible solution or a
/// Farkas vector.
pub fn feasibility_simplex(a: &Mat, b: &[Ratio]) -> Result<SimplexResult> {
    let m = a.rows();
    let n = a.cols();
    if b.len() != m {
        return Err(Error::dimension("rhs length != row count"));
    }
    // orient rows so b >= 0, remembering flips for the certificate
    let mut flipped = vec![false; m];
    let mut t = Mat::zeros(m, n + m + 1);
    for i in 0..m {
        let flip = b[i].is_negative();
        flipped[i] = flip;
        for j in 0..n {
            let v = if flip { -a.get(i, j) } else { a.get(i, j).clone() };
            t.set(i, j, v);
        }
        t.set(i, n + i, Ratio::one());
        t.set(i, n + m, if flip { -&b[i] } else { b[i].clone() });
    }
    // objective row: minimize sum of artificials; reduced costs start at
    // c_j - sum_i T[i][j] for original columns, 0 for artificials
    let mut obj = vec![Ratio::zero(); n + m + 1];
    for j in 0..=n + m {
        let mut s = Ratio::zero();
        for i in 0..m {
            s += t.get(i, j);
        }
        obj[j] = -s;
    }
    for jj in n..n + m {
        obj[jj] += Ratio::one();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0usize;
    loop {
        // Bland: entering = lowest-index column with negative reduced cost
        let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) else {
            break;
        };
        // leaving: min ratio, ties by lowest basis variable index
        let mut best: Option<(Ratio, usize)> = None;
        for i in 0..m {
            if t.get(i, enter).is_positive() {
                let r = t.get(i, n + m) / t.get(i, enter);
                let better = match &best {
                    None => true,
                    Some((cur, row)) => r < *cur || (r == *cur && basis[i] < basis[*row]),
                };
                if better {
                    best = Some((r, i));
                }
            }
        }
        let Some((_, row)) = best else {
            // phase-1 objective is bounded below by 0, so a column can always
            // leave; unreachable with exact arithmetic
            return Err(Error::InfeasibleLinearSystem(
                "phase-1 simplex detected unbounded direction".into(),
            ));
        };
        // pivot
        let piv = t.get(row, enter).clone();
        for j in 0..=n + m {
            let v = t.get(row, j) / &piv;
            t.set(row, j, v);
        }
        for i in 0..m {
            if i != row && !t.get(i, enter).is_zero() {
                let f = t.get(i, enter).clone();
                for j in 0..=n + m {
                    let v = t.get(i, j) - &f * t.get(row, j);
                    t.set(i, j, v);
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for j in 0..=n + m {
                obj[j] = &obj[j] - &f * t.get(row, j);
            }
        }
        basis[row] = enter;
        pivots += 1;
        if pivots > PIVOT_CAP {
            return Err(Error::PivotLimit(pivots));
        }
    }
    let optimum = -obj[n + m].clone();
    if optimum.is_zero() {
        let mut x = vec![Ratio::zero(); n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = t.get(i, n + m).clone();
            }
            // a residual artificial in the basis carries value 0 here
        }
        Ok(SimplexResult::Feasible(x))
    } else {
        // simplex multipliers: y_i = 1 - redcost(artificial_i); dual
        // feasibility of phase 1 gives yᵀA <= 0, yᵀb = optimum > 0,
        // so c = -y (unflipped) satisfies cᵀA >= 0, cᵀb < 0.
        let mut cert = Vec::with_capacity(m);
        for i in 0..m {
            let y_i = Ratio::one() - &obj[n + i];
            let c_i = -y_i;
            cert.push(if flipped[i] { -c_i } else { c_i });
        }
        Ok(SimplexResult::Infeasible(cert))
    }
}

/// Exact check that a Farkas vector certifies infeasibility.
pub fn verify_certificate(a: &Mat, b: &[Ratio], cert: &[Ratio]) -> bool {
    if cert.len() != a.rows() {
        return false;
    }
    let ca: Vec<Ratio> = (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| &cert[i] * a.get(i, j)).sum())
        .collect();
    let cb: Ratio = cert.iter().zip(b).map(|(c, v)| c * v).sum();
    ca.iter().all(|v| !v.is_negative()) && cb.is_negative()
}

/// The full color-representation system A_{n,p} μ = ν for p = marginal(ν).
pub fn color_system(nu: &SpinMeasure) -> Result<FeasibilityProblem> {
    let n = nu.n();
    if n > colorop::MAX_MATRIX_N {
        return Err(Error::size_limit(format!(
            "full color system capped at n = {}; use the shape-reduced path",
            colorop::MAX_MATRIX_N
        )));
    }
    if !nu.is_probability() {
        return Err(Error::validation("nu must be a probability measure"));
    }
    let p = ising::marginal_p(nu);
    if !p.is_positive() || p >= Ratio::one() {
        return Err(Error::validation("marginal of nu must lie in (0,1)"));
    }
    let a = colorop::build_a(n, &p)?;
    Ok(FeasibilityProblem {
        mat: a.mat,
        rhs: nu.probs(),
        columns: ColumnLabels::Partitions(a.cols),
        reduced: false,
    })
}

/// Decides whether ν has a color representation at p = marginal(ν), by exact
/// phase-1 simplex on the full 2^n x |B_n| system.
pub fn has_color_representation(nu: &SpinMeasure) -> Result<FeasibilityOutcome> {
    let problem = color_system(nu)?;
    solve_problem(&problem, nu.n())
}

/// Same decision through the S_n-reduced system (requires invariant ν).
/// Feasibility agrees with the full system by the averaging argument.
pub fn has_color_representation_reduced(nu: &SpinMeasure) -> Result<FeasibilityOutcome> {
    let problem = symmetry_reduce(nu)?;
    solve_problem(&problem, nu.n())
}

fn solve_problem(problem: &FeasibilityProblem, n: usize) -> Result<FeasibilityOutcome> {
    match feasibility_simplex(&problem.mat, &problem.rhs)? {
        SimplexResult::Feasible(x) => {
            let (witness, shape_witness) = match &problem.columns {
                ColumnLabels::Partitions(parts) => {
                    let mut values = BTreeMap::new();
                    for (pi, v) in parts.iter().zip(&x) {
                        if !v.is_zero() {
                            values.insert(pi.clone(), v.clone());
                        }
                    }
                    (Some(PartitionMeasure::from_values(n, values)?), None)
                }
                ColumnLabels::Shapes(shapes) => {
                    let sw: Vec<(PartitionShape, Ratio)> =
                        shapes.iter().cloned().zip(x.iter().cloned()).collect();
                    // materialize the invariant measure when B_n is small
                    let witness = if n <= colorop::MAX_MATRIX_N {
                        let mut values = BTreeMap::new();
                        for pi in partitions::enumerate_partitions(n)? {
                            let idx = shapes.iter().position(|s| *s == pi.shape()).unwrap();
                            if !x[idx].is_zero() {
                                values.insert(pi, x[idx].clone());
                            }
                        }
                        Some(PartitionMeasure::from_values(n, values)?)
                    } else {
                        None
                    };
                    (witness, Some(sw))
                }
            };
            Ok(FeasibilityOutcome {
                status: FeasibilityStatus::Feasible,
                witness,
                shape_witness,
                certificate: None,
            })
        }
        SimplexResult::Infeasible(cert) => {
            if !verify_certificate(&problem.mat, &problem.rhs, &cert) {
                return Err(Error::InfeasibleLinearSystem(
                    "internal: certificate failed exact verification".into(),
                ));
            }
            Ok(FeasibilityOutcome {
                status: FeasibilityStatus::Infeasible,
                witness: None,
                shape_witness: None,
                certificate: Some(cert),
            })
        }
    }
}

/// Folds the system over the S_n action: rows collapse to Hamming classes,
/// columns to shapes (the variable is the common per-partition value of an
/// orbit, so the folded coefficient counts orbit members). ν must be
/// permutation invariant.
pub fn symmetry_reduce(nu: &SpinMeasure) -> Result<FeasibilityProblem> {
    let n = nu.n();
    if n > 12 {
        return Err(Error::size_limit("symmetry_reduce: n > 12"));
    }
    if !nu.is_probability() {
        return Err(Error::validation("nu must be a probability measure"));
    }
    if !nu.is_permutation_invariant() {
        return Err(Error::validation(
            "nu is not permutation invariant; use the full solver",
        ));
    }
    let p = ising::marginal_p(nu);
    if !p.is_positive() || p >= Ratio::one() {
        return Err(Error::validation("marginal of nu must lie in (0,1)"));
    }
    let q = Ratio::one() - &p;
    let shapes = partitions::shapes(n);
    // row k: representative sigma = 1^k 0^(n-k); fold A over each orbit by
    // summing over the distinct block-coloring patterns of each shape.
    // Enumerating B_n per row is affordable up to the n = 12 guard only for
    // shapes; we instead count, for each shape, the partitions refining the
    // representative sigma with a given number of 1-blocks.
    let mut mat = Mat::zeros(n + 1, shapes.len());
    let rhs: Vec<Ratio> = (0..=n).map(|k| nu.prob((1u32 << k) - 1)).collect();
    for (j, shape) in shapes.iter().enumerate() {
        // partitions of this shape refining 1^k 0^(n-k) split the sizes
        // multiset into a part covering [k] and a part covering the rest
        for k in 0..=n {
            let mut acc = Ratio::zero();
            for (ones_sizes, zeros_sizes) in split_multiset(shape.sizes(), k) {
                let ways = arrangements(&ones_sizes, k) * arrangements(&zeros_sizes, n - k);
                let kb = ones_sizes.len() as i64;
                let zb = zeros_sizes.len() as i64;
                acc += ways * ratio::pow(&p, kb) * ratio::pow(&q, zb);
            }
            mat.set(k, j, acc);
        }
    }
    Ok(FeasibilityProblem {
        mat,
        rhs,
        columns: ColumnLabels::Shapes(shapes),
        reduced: true,
    })
}

/// All ways to split a size multiset into (sizes summing to k, the rest).
fn split_multiset(sizes: &[usize], k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    let total = sizes.len();
    let mut seen = std::collections::HashSet::new();
    for mask in 0..1u32 << total {
        let ones: Vec<usize> = (0..total)
            .filter(|&i| (mask >> i) & 1 == 1)
            .map(|i| sizes[i])
            .collect();
        if ones.iter().sum::<usize>() != k {
            continue;
        }
        let zeros: Vec<usize> = (0..total)
            .filter(|&i| (mask >> i) & 1 == 0)
            .map(|i| sizes[i])
            .collect();
        let mut key = (ones.clone(), zeros.clone());
        key.0.sort_unstable();
        key.1.sort_unstable();
        if seen.insert(key) {
            out.push((ones, zeros));
        }
    }
    out
}

/// Number of set partitions of a k-set with the given size multiset:
/// k! / (prod sizes! * prod multiplicities!).
fn arrangements(sizes: &[usize], k: usize) -> Ratio {
    debug_assert_eq!(sizes.iter().sum::<usize>(), k);
    let mut acc = ratio::falling(k, k); // k!
    for &s in sizes {
        acc /= ratio::falling(s, s);
    }
    let mut mult: BTreeMap<usize, usize> = BTreeMap::new();
    for &s in sizes {
        *mult.entry(s).or_insert(0) += 1;
    }
    for m in mult.values() {
        acc /= ratio::falling(*m, *m);
    }
    acc
}

/// Affine dimension of the reduced solution set {μ : A μ = ν over shapes}.
/// Errors with `InfeasibleLinearSystem` when the linear system itself is
/// inconsistent (distinct from LP infeasibility).
pub fn solution_set_dimension(nu: &SpinMeasure) -> Result<usize> {
    let problem = symmetry_reduce(nu)?;
    let rank = problem.mat.rank();
    let aug = problem.mat.augmented(&problem.rhs);
    if aug.rank() != rank {
        return Err(Error::InfeasibleLinearSystem(
            "reduced system has no formal solution".into(),
        ));
    }
    Ok(problem.mat.cols() - rank)
}

/// All formal solutions of the reduced system with `k` prescribed zero
/// coordinates, one per k-subset of shape columns that pins the system down
/// to a unique solution. Signed entries allowed.
pub fn enumerate_zero_pattern_solutions(
    nu: &SpinMeasure,
    k: usize,
) -> Result<Vec<(Vec<PartitionShape>, Vec<(PartitionShape, Ratio)>)>> {
    let problem = symmetry_reduce(nu)?;
    let ColumnLabels::Shapes(shapes) = &problem.columns else {
        unreachable!("symmetry_reduce labels columns by shape");
    };
    let ncols = shapes.len();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn subsets(
        start: usize,
        left: usize,
        ncols: usize,
        chosen: &mut Vec<usize>,
        all: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            all.push(chosen.clone());
            return;
        }
        for j in start..=ncols.saturating_sub(left) {
            chosen.push(j);
            subsets(j + 1, left - 1, ncols, chosen, all);
            chosen.pop();
        }
    }
    let mut all = Vec::new();
    subsets(0, k, ncols, &mut chosen, &mut all);
    for zeros in all {
        if let linalg::SolveOutcome::Unique(x) =
            linalg::solve_with_forced_zeros(&problem.mat, &problem.rhs, &zeros)
        {
            let zero_shapes: Vec<PartitionShape> =
                zeros.iter().map(|&j| shapes[j].clone()).collect();
            let solution: Vec<(PartitionShape, Ratio)> =
                shapes.iter().cloned().zip(x).collect();
            out.push((zero_shapes, solution));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform;
    use crate::graphs::Graph;
    use crate::ising::ModelParams;
    use crate::ratio::{int, ratio};

    fn nu_kn(n: usize, x: Ratio, y: Ratio) -> SpinMeasure {
        ising::kn_measure(n, &ModelParams::new(x, y).unwrap()).unwrap()
    }

    #[test]
    fn simplex_toy_problems() {
        // x1 + x2 = 1 is feasible
        let a = Mat::from_rows(vec![vec![int(1), int(1)]]);
        match feasibility_simplex(&a, &[int(1)]).unwrap() {
            SimplexResult::Feasible(x) => {
                assert_eq!(x.iter().sum::<Ratio>(), int(1));
            }
            _ => panic!("expected feasible"),
        }
        // x1 + x2 = -1 with x >= 0 is infeasible
        match feasibility_simplex(&a, &[int(-1)]).unwrap() {
            SimplexResult::Infeasible(c) => {
                assert!(verify_certificate(&a, &[int(-1)], &c));
            }
            _ => panic!("expected infeasible"),
        }
        // x1 - x2 = 0, x1 + x2 = 2: feasible at (1,1)
        let a = Mat::from_rows(vec![vec![int(1), int(-1)], vec![int(1), int(1)]]);
        match feasibility_simplex(&a, &[int(0), int(2)]).unwrap() {
            SimplexResult::Feasible(x) => assert_eq!(x, vec![int(1), int(1)]),
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn k3_always_feasible_with_unique_solution() {
        let nu = nu_kn(3, int(2), int(3));
        let out = has_color_representation(&nu).unwrap();
        assert_eq!(out.status, FeasibilityStatus::Feasible);
        let w = out.witness.unwrap();
        let p = ising::marginal_p(&nu);
        assert!(colorop::phi_p(&w, &p).unwrap().same_distribution(&nu));
        assert_eq!(solution_set_dimension(&nu).unwrap(), 0);
    }

    #[test]
    fn product_measure_witnessed_by_singletons() {
        let nu = nu_kn(3, int(1), int(2));
        let out = has_color_representation(&nu).unwrap();
        assert_eq!(out.status, FeasibilityStatus::Feasible);
        let w = out.witness.unwrap();
        let singletons = SetPartition::singletons(3);
        assert_eq!(w.get(&singletons), int(1));
    }

    #[test]
    fn k4_infeasible_beyond_threshold() {
        let nu = nu_kn(4, int(4), ratio(101, 100));
        let out = has_color_representation(&nu).unwrap();
        assert_eq!(out.status, FeasibilityStatus::Infeasible);
        let cert = out.certificate.unwrap();
        let problem = color_system(&nu).unwrap();
        assert!(verify_certificate(&problem.mat, &problem.rhs, &cert));
        // matches the closed-form sign
        assert!(closedform::k4_polynomial(&int(4), &ratio(101, 100)).is_negative());
    }

    #[test]
    fn reduction_column_counts() {
        let nu = nu_kn(4, int(2), ratio(3, 2));
        let problem = symmetry_reduce(&nu).unwrap();
        match &problem.columns {
            ColumnLabels::Shapes(s) => assert_eq!(s.len(), 5),
            _ => panic!("expected shapes"),
        }
        let nu5 = nu_kn(5, int(2), ratio(3, 2));
        let problem5 = symmetry_reduce(&nu5).unwrap();
        match &problem5.columns {
            ColumnLabels::Shapes(s) => assert_eq!(s.len(), 7),
            _ => panic!("expected shapes"),
        }
    }

    #[test]
    fn reduced_matrix_matches_folded_full_matrix() {
        // fold the full A over orbits and compare entrywise
        let nu = nu_kn(4, ratio(5, 2), ratio(7, 5));
        let p = ising::marginal_p(&nu);
        let reduced = symmetry_reduce(&nu).unwrap();
        let a = colorop::build_a(4, &p).unwrap();
        let ColumnLabels::Shapes(shapes) = &reduced.columns else {
            panic!()
        };
        for k in 0..=4usize {
            let sigma = ((1u32 << k) - 1) as usize;
            for (j, shape) in shapes.iter().enumerate() {
                let folded: Ratio = a
                    .cols
                    .iter()
                    .enumerate()
                    .filter(|(_, pi)| pi.shape() == *shape)
                    .map(|(jj, _)| a.mat.get(sigma, jj).clone())
                    .sum();
                assert_eq!(folded, *reduced.mat.get(k, j), "k={k} shape={shape}");
            }
        }
    }

    #[test]
    fn reduced_agrees_with_full_on_k4() {
        for (x, y) in [
            (int(2), ratio(3, 2)),
            (int(4), ratio(101, 100)),
            (ratio(7, 2), ratio(101, 100)),
        ] {
            let nu = nu_kn(4, x, y);
            let full = has_color_representation(&nu).unwrap();
            let red = has_color_representation_reduced(&nu).unwrap();
            assert_eq!(full.status, red.status);
            if let Some(w) = red.witness {
                let p = ising::marginal_p(&nu);
                assert!(colorop::phi_p(&w, &p).unwrap().same_distribution(&nu));
            }
        }
    }

    #[test]
    fn reduction_rejects_non_invariant() {
        let g = Graph::path(3).unwrap();
        let nu = ising::ising_measure(&g, &ModelParams::new(int(2), int(2)).unwrap()).unwrap();
        assert!(symmetry_reduce(&nu).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(solution_set_dimension(&nu_kn(3, int(3), int(2))).unwrap(), 0);
        assert_eq!(
            solution_set_dimension(&nu_kn(4, int(2), ratio(5, 4))).unwrap(),
            1
        );
        assert_eq!(
            solution_set_dimension(&nu_kn(5, int(2), ratio(5, 4))).unwrap(),
            2
        );
    }

    #[test]
    fn zero_pattern_solutions_k4() {
        let nu = nu_kn(4, int(2), ratio(3, 2));
        let sols = enumerate_zero_pattern_solutions(&nu, 1).unwrap();
        // every singleton zero-set that pins the dim-1 system down uniquely
        assert!(!sols.is_empty() && sols.len() <= 5);
        let problem = symmetry_reduce(&nu).unwrap();
        for (_zeros, sol) in &sols {
            let x: Vec<Ratio> = sol.iter().map(|(_, v)| v.clone()).collect();
            let lhs = linalg::mat_vec(&problem.mat, &x);
            assert_eq!(lhs, problem.rhs);
        }
    }

    #[test]
    fn marginal_mismatch_is_infeasible() {
        // solving with p other than the marginal must be infeasible
        let nu = nu_kn(3, int(2), int(3));
        let wrong_p = ratio(1, 2);
        let a = colorop::build_a(3, &wrong_p).unwrap();
        match feasibility_simplex(&a.mat, &nu.probs()).unwrap() {
            SimplexResult::Infeasible(c) => {
                assert!(verify_certificate(&a.mat, &nu.probs(), &c));
            }
            _ => panic!("expected infeasible at mismatched p"),
        }
    }
}
