//! The color operator Φ_p, the matrices A_{n,p}, A′, A″, exact rank, the
//! spanning-tree column basis with its permutation-matrix certificate, and
//! the explicit formal solution for K_n with external field.

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::ising::{self, ModelParams, SpinMeasure};
use crate::linalg::{self, Mat};
use crate::partitions::{self, SetPartition};
use crate::ratio::{self, Ratio};
use crate::rcm::{self, PartitionMeasure};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Matrix guard: A_{n,p} is 2^n x |B_n|.
pub const MAX_MATRIX_N: usize = 8;

/// Row index space of a [`ColorMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowLabels {
    /// Rows are spin configurations σ ∈ {0,1}^n, in mask order.
    Spins(usize),
    /// Rows are subsets S ⊆ [n], in mask order.
    Subsets(usize),
}

/// A matrix of the color-representation linear system, with its labeling.
/// Columns are B_n in canonical order.
#[derive(Debug, Clone)]
pub struct ColorMatrix {
    pub rows: RowLabels,
    pub cols: Vec<SetPartition>,
    pub mat: Mat,
}

fn check_p(p: &Ratio) -> Result<()> {
    if !p.is_positive() || *p >= Ratio::one() {
        return Err(Error::validation("p must lie in (0,1)"));
    }
    Ok(())
}

/// Φ_p(μ)(σ) = Σ_{π ⊲ σ} p^{‖σ‖_π}(1-p)^{‖π‖-‖σ‖_π} μ(π), extended to signed
/// μ (the starred operator). Computed by distributing each supported
/// partition over its 2^{‖π‖} block colorings.
pub fn phi_p(mu: &PartitionMeasure, p: &Ratio) -> Result<SpinMeasure> {
    check_p(p)?;
    let n = mu.n();
    if n > 20 {
        return Err(Error::size_limit("phi_p: n > 20"));
    }
    let q = Ratio::one() - p;
    let mut ppow = vec![Ratio::one()];
    let mut qpow = vec![Ratio::one()];
    for _ in 0..n {
        ppow.push(ppow.last().unwrap() * p);
        qpow.push(qpow.last().unwrap() * &q);
    }
    let mut out = vec![Ratio::zero(); 1 << n];
    for (pi, v) in mu.iter() {
        if v.is_zero() {
            continue;
        }
        let blocks = pi.blocks();
        let masks: Vec<u32> = blocks
            .iter()
            .map(|blk| partitions::mask_of(blk))
            .collect();
        let m = blocks.len();
        for coloring in 0..1u32 << m {
            let mut sigma = 0u32;
            for (b, mask) in masks.iter().enumerate() {
                if (coloring >> b) & 1 == 1 {
                    sigma |= mask;
                }
            }
            let k = coloring.count_ones() as usize;
            out[sigma as usize] += &ppow[k] * &qpow[m - k] * v;
        }
    }
    SpinMeasure::from_weights(n, out)
}

/// A_{n,p}(σ,π) = p^{‖σ‖_π}(1-p)^{‖π‖-‖σ‖_π} when π ⊲ σ, else 0.
pub fn build_a(n: usize, p: &Ratio) -> Result<ColorMatrix> {
    check_p(p)?;
    if n == 0 || n > MAX_MATRIX_N {
        return Err(Error::size_limit(format!("build_a: n = {n} out of range")));
    }
    let cols = partitions::enumerate_partitions(n)?;
    let q = Ratio::one() - p;
    let mut mat = Mat::zeros(1 << n, cols.len());
    for (j, pi) in cols.iter().enumerate() {
        let m = pi.block_count();
        for sigma in 0..1u32 << n {
            if pi.refines_spin(sigma) {
                let k = pi.ones_blocks(sigma);
                mat.set(
                    sigma as usize,
                    j,
                    ratio::pow(p, k as i64) * ratio::pow(&q, (m - k) as i64),
                );
            }
        }
    }
    Ok(ColorMatrix {
        rows: RowLabels::Spins(n),
        cols,
        mat,
    })
}

/// A′(S,π) = Σ_{σ: σ|_S ≡ 1} A_{n,1/2}(σ,π) = 2^{-‖π|_S‖}. Defined at p = 1/2.
pub fn build_a_prime(n: usize) -> Result<ColorMatrix> {
    if n == 0 || n > MAX_MATRIX_N {
        return Err(Error::size_limit("build_a_prime: n out of range"));
    }
    let cols = partitions::enumerate_partitions(n)?;
    let half = ratio::ratio(1, 2);
    let mut mat = Mat::zeros(1 << n, cols.len());
    for (j, pi) in cols.iter().enumerate() {
        for s_mask in 0..1u32 << n {
            let blocks = pi.restricted_block_count(s_mask);
            mat.set(s_mask as usize, j, ratio::pow(&half, blocks as i64));
        }
    }
    Ok(ColorMatrix {
        rows: RowLabels::Subsets(n),
        cols,
        mat,
    })
}

/// A″(S,π) = 1(π|_S has only even-sized blocks). Row-equivalent to A_{n,1/2};
/// the equivalence is verified in tests against the Möbius-sum definition,
/// not assumed.
pub fn build_a_double_prime(n: usize) -> Result<ColorMatrix> {
    if n == 0 || n > MAX_MATRIX_N {
        return Err(Error::size_limit("build_a_double_prime: n out of range"));
    }
    let cols = partitions::enumerate_partitions(n)?;
    let mut mat = Mat::zeros(1 << n, cols.len());
    for (j, pi) in cols.iter().enumerate() {
        for s_mask in 0..1u32 << n {
            if all_even_blocks(pi, s_mask) {
                mat.set(s_mask as usize, j, Ratio::one());
            }
        }
    }
    Ok(ColorMatrix {
        rows: RowLabels::Subsets(n),
        cols,
        mat,
    })
}

pub fn all_even_blocks(pi: &SetPartition, s_mask: u32) -> bool {
    pi.restricted_block_sizes(s_mask)
        .iter()
        .all(|(_, c)| c % 2 == 0)
}

/// Rank over the rationals (fraction-free elimination).
pub fn exact_rank(m: &ColorMatrix) -> usize {
    m.mat.rank()
}

/// B_n^T: the partitions whose blocks induce connected subgraphs of the
/// deterministic spanning tree of G. Verifies |B_n^T| = 2^{n-1} and that the
/// alternating-sum matrix B over the even rows is a permutation matrix (the
/// invertibility certificate for using these columns as dependent variables).
pub fn spanning_tree_column_basis(g: &Graph) -> Result<Vec<SetPartition>> {
    let n = g.n();
    if n > MAX_MATRIX_N {
        return Err(Error::size_limit("spanning_tree_column_basis: n > 8"));
    }
    let tree = g.spanning_tree()?;
    let basis: Vec<SetPartition> = partitions::enumerate_partitions(n)?
        .into_iter()
        .filter(|pi| pi.blocks_connected_in(&tree))
        .collect();
    if basis.len() != 1 << (n - 1) {
        return Err(Error::InfeasibleLinearSystem(format!(
            "tree-connected partition count {} != 2^(n-1)",
            basis.len()
        )));
    }
    // B(S,π) = Σ_{π' ⊲ π, π' ∈ B_n^T} (-1)^{‖π‖-‖π'‖} A_T(S,π') must be a
    // permutation matrix on even-S rows.
    let even_masks: Vec<u32> = (0..1u32 << n).filter(|m| m.count_ones() % 2 == 0).collect();
    let mut b = Mat::zeros(even_masks.len(), basis.len());
    for (j, pi) in basis.iter().enumerate() {
        let sign_base = pi.block_count();
        for (jj, finer) in basis.iter().enumerate() {
            let _ = jj;
            if !finer.refines(pi)? {
                continue;
            }
            let sgn = if (finer.block_count() - sign_base) % 2 == 0 {
                Ratio::one()
            } else {
                -Ratio::one()
            };
            for (i, &s_mask) in even_masks.iter().enumerate() {
                if all_even_blocks(finer, s_mask) {
                    let v = b.get(i, j) + &sgn;
                    b.set(i, j, v);
                }
            }
        }
    }
    let is_permutation = (0..b.rows()).all(|i| {
        let ones = (0..b.cols()).filter(|&j| b.get(i, j).is_one()).count();
        let zeros = (0..b.cols()).filter(|&j| b.get(i, j).is_zero()).count();
        ones == 1 && ones + zeros == b.cols()
    }) && (0..b.cols()).all(|j| {
        (0..b.rows()).filter(|&i| b.get(i, j).is_one()).count() == 1
    });
    if !is_permutation {
        return Err(Error::InfeasibleLinearSystem(
            "alternating-sum certificate is not a permutation matrix".into(),
        ));
    }
    Ok(basis)
}

/// Two distinct probability measures with the same Φ_{1/2}-image ν_{G,x,1}.
///
/// The first is the random-cluster measure μ_{G,1-1/x,2}. The second moves
/// one free column (outside the spanning-tree basis; with G-connected blocks
/// when G is not a tree) by half the exact ratio-test maximum, compensating
/// on the basis columns so the linear system stays satisfied.
pub fn second_representation(
    g: &Graph,
    x: &Ratio,
) -> Result<(PartitionMeasure, PartitionMeasure)> {
    let n = g.n();
    if n < 3 {
        return Err(Error::NoSecondRepresentation(
            "graphs on one or two vertices have a unique color representation".into(),
        ));
    }
    if *x <= Ratio::one() {
        return Err(Error::validation("second_representation needs x > 1"));
    }
    let r = Ratio::one() - x.recip();
    let mu = rcm::rcm_measure(g, &r, &ratio::int(2))?;
    let basis = spanning_tree_column_basis(g)?;
    let all = partitions::enumerate_partitions(n)?;

    // first free column in canonical order, connected-block when possible
    let is_tree = g.is_tree();
    let free = all
        .iter()
        .find(|pi| !basis.contains(pi) && (is_tree || pi.blocks_connected_in(g)))
        .ok_or_else(|| {
            Error::NoSecondRepresentation("no eligible free column".into())
        })?
        .clone();

    // direction d with d_free = 1, supported on basis ∪ {free}, A d = 0;
    // solve on the even-|S| rows of A'' (they span the row space).
    let even_masks: Vec<u32> = (0..1u32 << n).filter(|m| m.count_ones() % 2 == 0).collect();
    let indicator = |pi: &SetPartition, s: u32| -> Ratio {
        if all_even_blocks(pi, s) {
            Ratio::one()
        } else {
            Ratio::zero()
        }
    };
    let a_t = Mat::from_rows(
        even_masks
            .iter()
            .map(|&s| basis.iter().map(|pi| indicator(pi, s)).collect())
            .collect(),
    );
    let rhs: Vec<Ratio> = even_masks.iter().map(|&s| -indicator(&free, s)).collect();
    let d_basis = match linalg::solve(&a_t, &rhs) {
        linalg::SolveOutcome::Unique(d) => d,
        _ => {
            return Err(Error::InfeasibleLinearSystem(
                "tree-basis submatrix unexpectedly singular".into(),
            ))
        }
    };

    // exact ratio test: largest delta keeping all dependent coordinates >= 0
    let mut delta: Option<Ratio> = None;
    for (pi, d) in basis.iter().zip(&d_basis) {
        if d.is_negative() {
            let bound = mu.get(pi) / -d;
            if delta.as_ref().map_or(true, |cur| bound < *cur) {
                delta = Some(bound);
            }
        }
    }
    let delta = delta.ok_or_else(|| {
        Error::InfeasibleLinearSystem("ratio test found no binding coordinate".into())
    })? / ratio::int(2);

    let mut dir = BTreeMap::new();
    dir.insert(free, Ratio::one());
    for (pi, d) in basis.iter().zip(d_basis) {
        if !d.is_zero() {
            dir.insert(pi.clone(), d);
        }
    }
    let direction = PartitionMeasure::from_values(n, dir)?;
    let second = mu.add_scaled(&direction, &delta)?;
    if !second.is_probability() {
        return Err(Error::InfeasibleLinearSystem(
            "perturbed measure left the simplex".into(),
        ));
    }
    Ok((mu, second))
}

/// The explicit formal solution for ν_{K_n,x,y}, supported on
/// {π[T] : |T| >= 2} ∪ {π[∅]}:
///
///   μ(π[T]) = Σ_{S ⊇ T} (-1)^{|S|-|T|}
///             [ Σ_{S' ⊆ S} (-(1-p))^{|S|-|S'|} ν(0^{S'}) ]
///             / [ p(-(1-p))^{|S|} + p^{|S|}(1-p) ],
///
/// with the singleton partition carrying the remaining mass. Requires y ≠ 1:
/// at p = 1/2 the odd-|S| denominators vanish.
pub fn formal_solution(n: usize, x: &Ratio, y: &Ratio) -> Result<PartitionMeasure> {
    if n == 0 || n > MAX_MATRIX_N {
        return Err(Error::size_limit("formal_solution: n out of range"));
    }
    if y.is_one() {
        return Err(Error::SingularParameter(
            "formal solution needs y != 1 (p = 1/2 zeroes the odd denominators)".into(),
        ));
    }
    let params = ModelParams::new(x.clone(), y.clone())?;
    let nu = ising::kn_measure(n, &params)?;
    let p = ising::marginal_p(&nu);
    let q = Ratio::one() - &p;
    let neg_q = -&q;

    // K_n invariance: ν(0^S) depends on |S| only
    let down: Vec<Ratio> = (0..=n)
        .map(|k| ising::down_marginal(&nu, (1u32 << k) - 1))
        .collect();
    // numerator for a set of size s: Σ_{j<=s} C(s,j) (-q)^{s-j} ν(0^{[j]})
    let numerator: Vec<Ratio> = (0..=n)
        .map(|s| {
            (0..=s)
                .map(|j| ratio::binomial(s, j) * ratio::pow(&neg_q, (s - j) as i64) * &down[j])
                .sum()
        })
        .collect();
    let denominator: Vec<Ratio> = (0..=n)
        .map(|s| &p * ratio::pow(&neg_q, s as i64) + ratio::pow(&p, s as i64) * &q)
        .collect();
    // μ(π[T]) for |T| = t: Σ_{s>=t} C(n-t, s-t) (-1)^{s-t} num_s / den_s
    let mut by_size = vec![Ratio::zero(); n + 1];
    for t in 2..=n {
        let mut acc = Ratio::zero();
        for s in t..=n {
            if denominator[s].is_zero() {
                return Err(Error::SingularParameter(format!(
                    "zero denominator at |S| = {s}"
                )));
            }
            let sgn = if (s - t) % 2 == 0 {
                Ratio::one()
            } else {
                -Ratio::one()
            };
            acc += ratio::binomial(n - t, s - t) * sgn * &numerator[s] / &denominator[s];
        }
        by_size[t] = acc;
    }

    let mut values = BTreeMap::new();
    let mut mass = Ratio::zero();
    for t in 2..=n {
        for t_mask in 0..1u32 << n {
            if t_mask.count_ones() as usize == t {
                let pi = partitions::single_block_partition(&partitions::elems_of(t_mask), n)?;
                mass += &by_size[t];
                values.insert(pi, by_size[t].clone());
            }
        }
    }
    values.insert(SetPartition::singletons(n), Ratio::one() - mass);
    PartitionMeasure::from_values(n, values)
}

/// Minimum entry of the formal solution per block-size class |T|
/// (class 0 is the all-singletons entry π[∅]).
pub fn formal_solution_sign_profile(
    n: usize,
    x: &Ratio,
    y: &Ratio,
) -> Result<BTreeMap<usize, Ratio>> {
    let mu = formal_solution(n, x, y)?;
    let mut mins: BTreeMap<usize, Ratio> = BTreeMap::new();
    for (pi, v) in mu.iter() {
        let class = match pi.blocks().iter().map(|b| b.len()).max().unwrap() {
            1 => 0,
            t => t,
        };
        mins.entry(class)
            .and_modify(|cur| {
                if v < cur {
                    *cur = v.clone();
                }
            })
            .or_insert_with(|| v.clone());
    }
    Ok(mins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, ratio};

    #[test]
    fn phi_of_point_masses() {
        // singletons -> product Bernoulli(p)^n
        let p = ratio(1, 3);
        let mu = PartitionMeasure::delta(SetPartition::singletons(3));
        let nu = phi_p(&mu, &p).unwrap();
        for s in 0..8u32 {
            let k = s.count_ones() as i64;
            assert_eq!(
                nu.prob(s),
                ratio::pow(&p, k) * ratio::pow(&(Ratio::one() - &p), 3 - k)
            );
        }
        // single block -> (1-p) delta_0 + p delta_1
        let mu = PartitionMeasure::delta(SetPartition::single_block(3));
        let nu = phi_p(&mu, &p).unwrap();
        assert_eq!(nu.prob(0), ratio(2, 3));
        assert_eq!(nu.prob(0b111), ratio(1, 3));
        assert_eq!(nu.prob(0b010), int(0));
        assert!(phi_p(&mu, &int(1)).is_err());
    }

    #[test]
    fn phi_marginal_is_p() {
        let g = Graph::complete(4).unwrap();
        let mu = rcm::rcm_measure(&g, &ratio(2, 5), &int(2)).unwrap();
        for p in [ratio(1, 2), ratio(1, 3), ratio(7, 9)] {
            let nu = phi_p(&mu, &p).unwrap();
            assert_eq!(ising::marginal_p(&nu), p);
        }
    }

    #[test]
    fn matrix_entries() {
        let n = 3;
        let p = ratio(1, 3);
        let a = build_a(n, &p).unwrap();
        let parts = partitions::enumerate_partitions(n).unwrap();
        // A(1^n, single block) = p
        let single = parts
            .iter()
            .position(|pi| *pi == SetPartition::single_block(n))
            .unwrap();
        assert_eq!(*a.mat.get(0b111, single), p);
        // zero unless pi refines sigma
        let pair = parts.iter().position(|pi| pi.to_string() == "1,2|3").unwrap();
        assert_eq!(*a.mat.get(0b001, pair), int(0));

        let ap = build_a_prime(n).unwrap();
        // A'({1,2}, {12|3}) = 1/2
        assert_eq!(*ap.mat.get(0b011, pair), ratio(1, 2));

        let app = build_a_double_prime(n).unwrap();
        // S = empty: 1 for every partition
        for j in 0..parts.len() {
            assert_eq!(*app.mat.get(0, j), int(1));
        }
    }

    #[test]
    fn a_double_prime_matches_moebius_sum() {
        // A''(S,π) = Σ_{S' ⊆ S} 2^{|S'|} (-1)^{|S|-|S'|} A'(S',π), checked
        // entrywise for n = 4
        let n = 4;
        let ap = build_a_prime(n).unwrap();
        let app = build_a_double_prime(n).unwrap();
        for s in 0..1u32 << n {
            for j in 0..ap.cols.len() {
                let mut acc = Ratio::zero();
                let mut sub = s;
                loop {
                    let sgn_even = (s.count_ones() - sub.count_ones()) % 2 == 0;
                    let term = ratio::pow(&int(2), sub.count_ones() as i64) * ap.mat.get(sub as usize, j);
                    if sgn_even {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & s;
                }
                assert_eq!(acc, *app.mat.get(s as usize, j));
            }
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(exact_rank(&build_a(3, &ratio(1, 2)).unwrap()), 4);
        assert_eq!(exact_rank(&build_a(3, &ratio(1, 3)).unwrap()), 5);
        assert_eq!(exact_rank(&build_a(4, &ratio(1, 2)).unwrap()), 8);
    }

    #[test]
    fn row_equivalence_ranks() {
        for n in 2..=5 {
            let r = 1usize << (n - 1);
            assert_eq!(exact_rank(&build_a(n, &ratio(1, 2)).unwrap()), r);
            assert_eq!(exact_rank(&build_a_prime(n).unwrap()), r);
            assert_eq!(exact_rank(&build_a_double_prime(n).unwrap()), r);
        }
    }

    #[test]
    fn tree_basis_size_and_certificate() {
        for g in [
            Graph::complete(3).unwrap(),
            Graph::complete(4).unwrap(),
            Graph::cycle(5).unwrap(),
            Graph::path(4).unwrap(),
        ] {
            let basis = spanning_tree_column_basis(&g).unwrap();
            assert_eq!(basis.len(), 1 << (g.n() - 1));
        }
    }

    #[test]
    fn second_representation_on_k3() {
        let g = Graph::complete(3).unwrap();
        let (mu, mu2) = second_representation(&g, &int(2)).unwrap();
        assert!(mu.is_probability());
        assert!(mu2.is_probability());
        assert_ne!(mu, mu2);
        let half = ratio(1, 2);
        assert!(phi_p(&mu, &half)
            .unwrap()
            .same_distribution(&phi_p(&mu2, &half).unwrap()));
        // K3 is not a tree: both supported on connected blocks
        assert!(mu.supported_on_connected_blocks(&g));
        assert!(mu2.supported_on_connected_blocks(&g));
    }

    #[test]
    fn second_representation_rejects_tiny_graphs() {
        let g = Graph::complete(2).unwrap();
        assert!(matches!(
            second_representation(&g, &int(2)),
            Err(Error::NoSecondRepresentation(_))
        ));
    }

    #[test]
    fn formal_solution_pushes_to_nu() {
        let (n, x, y) = (4usize, ratio(3, 2), int(4));
        let mu = formal_solution(n, &x, &y).unwrap();
        assert_eq!(mu.total(), int(1));
        let params = ModelParams::new(x, y).unwrap();
        let nu = ising::kn_measure(n, &params).unwrap();
        let p = ising::marginal_p(&nu);
        let pushed = phi_p(&mu, &p).unwrap();
        assert!(pushed.same_distribution(&nu));
    }

    #[test]
    fn formal_solution_rejects_h0() {
        assert!(matches!(
            formal_solution(3, &int(2), &int(1)),
            Err(Error::SingularParameter(_))
        ));
    }

    #[test]
    fn formal_solution_nonnegative_in_large_h_regime() {
        // (n-1)beta < h at x = 6/5, y = 20 for n = 3
        let mu = formal_solution(3, &ratio(6, 5), &int(20)).unwrap();
        assert!(mu.is_probability());
    }

    #[test]
    fn sign_profile_classes() {
        let prof = formal_solution_sign_profile(4, &ratio(3, 2), &int(4)).unwrap();
        // classes 0 (singletons) and 2..4
        assert_eq!(
            prof.keys().copied().collect::<Vec<_>>(),
            vec![0usize, 2, 3, 4]
        );
        // spec sample point: exact computation gives POSITIVE odd-|T| entries
        // (recorded discrepancy with the source's remark)
        let prof = formal_solution_sign_profile(4, &ratio(101, 100), &int(4)).unwrap();
        assert!(prof[&3].is_positive());
        // the genuine negative-odd-class case lives at n = 5, y near 1
        let prof = formal_solution_sign_profile(5, &ratio(101, 100), &int(2)).unwrap();
        assert!(prof[&3].is_negative());
        assert!(prof[&0].is_positive());
    }
}
