//! Exact random-cluster measures μ_{G,r,q}, Bernoulli edge measures, the
//! Ising coupling at q = 2, and the random-cluster-limit necessary condition
//! with its exact r̂-series.

use crate::colorop;
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::ising::{self, ModelParams};
use crate::partitions::{self, SetPartition};
use crate::poly::Poly;
use crate::ratio::{self, Ratio};
use num::{BigInt, One, Signed, Zero};
use std::collections::BTreeMap;

/// Configuration-count guard: 2^24 ≈ 1.7e7 edge configurations.
pub const MAX_RCM_EDGES: usize = 24;

/// A (possibly signed) measure on B_n, keyed by canonical partitions, so
/// iteration order is the enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMeasure {
    n: usize,
    values: BTreeMap<SetPartition, Ratio>,
    is_probability: bool,
}

impl PartitionMeasure {
    pub fn from_values(n: usize, values: BTreeMap<SetPartition, Ratio>) -> Result<Self> {
        if values.keys().any(|pi| pi.n() != n) {
            return Err(Error::dimension("partition ground set != n"));
        }
        let nonneg = values.values().all(|v| !v.is_negative());
        let total: Ratio = values.values().sum();
        Ok(PartitionMeasure {
            n,
            values,
            is_probability: nonneg && total.is_one(),
        })
    }

    /// Point mass at a single partition.
    pub fn delta(pi: SetPartition) -> Self {
        let n = pi.n();
        let mut values = BTreeMap::new();
        values.insert(pi, Ratio::one());
        PartitionMeasure {
            n,
            values,
            is_probability: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, pi: &SetPartition) -> Ratio {
        self.values.get(pi).cloned().unwrap_or_else(Ratio::zero)
    }

    /// Entries in canonical partition order; zero entries may be absent.
    pub fn iter(&self) -> impl Iterator<Item = (&SetPartition, &Ratio)> {
        self.values.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &SetPartition> {
        self.values
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(pi, _)| pi)
    }

    pub fn total(&self) -> Ratio {
        self.values.values().sum()
    }

    pub fn is_probability(&self) -> bool {
        self.is_probability
    }

    /// Every partition with nonzero mass has G-connected blocks.
    pub fn supported_on_connected_blocks(&self, g: &Graph) -> bool {
        self.support().all(|pi| pi.blocks_connected_in(g))
    }

    /// self + c * other, as signed measures.
    pub fn add_scaled(&self, other: &PartitionMeasure, c: &Ratio) -> Result<PartitionMeasure> {
        if self.n != other.n {
            return Err(Error::dimension("measures on different ground sets"));
        }
        let mut values = self.values.clone();
        for (pi, v) in &other.values {
            let entry = values.entry(pi.clone()).or_insert_with(Ratio::zero);
            *entry += v * c;
        }
        values.retain(|_, v| !v.is_zero());
        PartitionMeasure::from_values(self.n, values)
    }
}

/// The edge measure μ̂_{G,r̂,q}(w) = r̂^{‖w‖}(1-r̂)^{|E|-‖w‖} q^{‖π[w]‖}.
///
/// The random-cluster limit computations use the q-factor-free variant
/// ([`EdgeMeasure::bernoulli`]): the source notation writes q = 0 there, which
/// taken literally would annihilate every configuration, so the factor is
/// simply omitted.
#[derive(Debug, Clone)]
pub struct EdgeMeasure {
    graph: Graph,
    r_hat: Ratio,
    q: Option<Ratio>,
}

impl EdgeMeasure {
    pub fn new(graph: Graph, r_hat: Ratio, q: Ratio) -> Result<Self> {
        validate_edge_param(&r_hat)?;
        if q.is_negative() {
            return Err(Error::validation("q must be >= 0"));
        }
        Ok(EdgeMeasure {
            graph,
            r_hat,
            q: Some(q),
        })
    }

    /// Weight r̂^{‖w‖}(1-r̂)^{|E|-‖w‖} with no cluster-count factor.
    pub fn bernoulli(graph: Graph, r_hat: Ratio) -> Result<Self> {
        validate_edge_param(&r_hat)?;
        Ok(EdgeMeasure {
            graph,
            r_hat,
            q: None,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weight(&self, w: u64) -> Ratio {
        let e = self.graph.edge_count();
        let k = w.count_ones() as i64;
        let mut val = ratio::pow(&self.r_hat, k)
            * ratio::pow(&(Ratio::one() - &self.r_hat), e as i64 - k);
        if let Some(q) = &self.q {
            let pi = partitions::partition_from_edges(&self.graph, w);
            val *= ratio::pow(q, pi.block_count() as i64);
        }
        val
    }

    pub fn total(&self) -> Ratio {
        (0..1u64 << self.graph.edge_count())
            .map(|w| self.weight(w))
            .sum()
    }
}

fn validate_edge_param(r: &Ratio) -> Result<()> {
    if !r.is_positive() || *r >= Ratio::one() {
        return Err(Error::validation("edge parameter must lie in (0,1)"));
    }
    Ok(())
}

/// μ_{G,r,q}: sums r^{‖w‖}(1-r)^{|E|-‖w‖} q^{‖π[w]‖} over all 2^{|E|}
/// configurations, grouped as integer counts per (π, ‖w‖) first so the
/// rational work is one term per pair.
pub fn rcm_measure(g: &Graph, r: &Ratio, q: &Ratio) -> Result<PartitionMeasure> {
    validate_edge_param(r)?;
    if !q.is_positive() {
        return Err(Error::validation("rcm_measure needs q > 0 to normalize"));
    }
    let e = g.edge_count();
    if e > MAX_RCM_EDGES {
        return Err(Error::size_limit(format!(
            "rcm_measure: |E| = {e} > {MAX_RCM_EDGES}"
        )));
    }
    let mut counts: BTreeMap<SetPartition, Vec<u64>> = BTreeMap::new();
    for w in 0..1u64 << e {
        let pi = partitions::partition_from_edges(g, w);
        counts.entry(pi).or_insert_with(|| vec![0; e + 1])[w.count_ones() as usize] += 1;
    }
    let rpow: Vec<Ratio> = powers(r, e);
    let spow: Vec<Ratio> = powers(&(Ratio::one() - r), e);
    let mut values = BTreeMap::new();
    let mut z = Ratio::zero();
    for (pi, per_k) in counts {
        let qfac = ratio::pow(q, pi.block_count() as i64);
        let mut acc = Ratio::zero();
        for (k, &c) in per_k.iter().enumerate() {
            if c > 0 {
                acc += Ratio::from_integer(BigInt::from(c)) * &rpow[k] * &spow[e - k];
            }
        }
        acc *= &qfac;
        z += &acc;
        values.insert(pi, acc);
    }
    for v in values.values_mut() {
        *v /= &z;
    }
    PartitionMeasure::from_values(g.n(), values)
}

fn powers(base: &Ratio, up_to: usize) -> Vec<Ratio> {
    let mut out = Vec::with_capacity(up_to + 1);
    out.push(Ratio::one());
    for _ in 0..up_to {
        out.push(out.last().unwrap() * base);
    }
    out
}

/// The unnormalized total Z'_{G,r,q} = Σ_w r^{‖w‖}(1-r)^{|E|-‖w‖} q^{‖π[w]‖}.
pub fn rcm_normalizer(g: &Graph, r: &Ratio, q: &Ratio) -> Result<Ratio> {
    validate_edge_param(r)?;
    let e = g.edge_count();
    if e > MAX_RCM_EDGES {
        return Err(Error::size_limit("rcm_normalizer: too many edges"));
    }
    let rpow = powers(r, e);
    let spow = powers(&(Ratio::one() - r), e);
    let mut z = Ratio::zero();
    for w in 0..1u64 << e {
        let pi = partitions::partition_from_edges(g, w);
        let k = w.count_ones() as usize;
        z += &rpow[k] * &spow[e - k] * ratio::pow(q, pi.block_count() as i64);
    }
    Ok(z)
}

/// Does Φ_{1/2}(μ_{G,1-1/x,2}) equal ν_{G,x,1} exactly?
pub fn coupling_check(g: &Graph, x: &Ratio) -> Result<bool> {
    if *x <= Ratio::one() {
        return Err(Error::validation("coupling needs x > 1"));
    }
    let r = Ratio::one() - x.recip();
    let mu = rcm_measure(g, &r, &ratio::int(2))?;
    let pushed = colorop::phi_p(&mu, &ratio::ratio(1, 2))?;
    let nu = ising::ising_measure(g, &ModelParams::new(x.clone(), Ratio::one())?)?;
    Ok(pushed.same_distribution(&nu))
}

/// LHS - RHS of the limit necessary condition at μ = μ_{G,r,2}:
/// n Σ_π A(S,π)|T_{S,π}| μ(π)  vs  [Σ_i Σ_π |T_{{i},π}| μ(π)]·[Σ_π A(S,π) μ(π)].
/// Zero means the random-cluster measure passes the condition for this S.
pub fn necessary_condition_residual(g: &Graph, r: &Ratio, s: &[usize]) -> Result<Ratio> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if s.len() % 2 == 0 {
        return Err(Error::validation("necessary condition needs odd |S|"));
    }
    let s_mask = partitions::mask_of(s);
    let mu = rcm_measure(g, r, &ratio::int(2))?;
    let n = ratio::int(g.n() as i64);
    let mut weighted = Ratio::zero();
    let mut plain = Ratio::zero();
    let mut singleton_sizes = Ratio::zero();
    for (pi, v) in mu.iter() {
        if partitions::odd_block_indicator(s_mask, pi) {
            plain += v;
            if let Some(block) = partitions::odd_block(s_mask, pi) {
                weighted += ratio::int(block.len() as i64) * v;
            }
        }
        let sq: i64 = pi.blocks().iter().map(|b| (b.len() * b.len()) as i64).sum();
        singleton_sizes += ratio::int(sq) * v;
    }
    Ok(n * weighted - singleton_sizes * plain)
}

/// Which bracketed sum of the Bernoulli-translated necessary condition to
/// expand as an exact polynomial in r̂.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Σ_w A(S,π[w]) (|T_{S,π[w]}| - 1) μ̂(w)
    AWeighted,
    /// Σ_w A(S,π[w]) μ̂(w)
    APlain,
    /// Σ_i Σ_w (|T_{{i},π[w]}| - 1) μ̂(w) = Σ_w (Σ_B |B|² - n) μ̂(w)
    SingletonSizes,
}

/// The exact polynomial (in r̂) of the requested sum over edge configurations
/// of K_n against the q-factor-free Bernoulli weight. 4 <= n <= 6.
pub fn bernoulli_series_coefficients(n: usize, s: &[usize], kind: SeriesKind) -> Result<Poly> {
    if !(4..=6).contains(&n) {
        return Err(Error::size_limit(format!(
            "bernoulli series implemented for K_4..K_6, got n = {n}"
        )));
    }
    let g = Graph::complete(n)?;
    let s_mask = partitions::mask_of(s);
    let e = g.edge_count();
    // integer coefficient per open-edge count
    let mut per_k: Vec<BigInt> = vec![BigInt::zero(); e + 1];
    for w in 0..1u64 << e {
        let pi = partitions::partition_from_edges(&g, w);
        let f: i64 = match kind {
            SeriesKind::AWeighted => {
                if partitions::odd_block_indicator(s_mask, &pi) {
                    partitions::odd_block(s_mask, &pi)
                        .map(|b| b.len() as i64 - 1)
                        .unwrap_or(0)
                } else {
                    0
                }
            }
            SeriesKind::APlain => partitions::odd_block_indicator(s_mask, &pi) as i64,
            SeriesKind::SingletonSizes => {
                let sq: i64 = pi.blocks().iter().map(|b| (b.len() * b.len()) as i64).sum();
                sq - n as i64
            }
        };
        if f != 0 {
            per_k[w.count_ones() as usize] += BigInt::from(f);
        }
    }
    let mut poly = Poly::zero();
    for (k, c) in per_k.iter().enumerate() {
        if !c.is_zero() {
            poly = poly.add(&Poly::bernoulli_weight(k, e).scale(&Ratio::from_integer(c.clone())));
        }
    }
    Ok(poly)
}

/// Named functionals for the Bernoulli-translation identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    One,
    BlockCount,
    /// A(S, ·) with S given as a mask.
    OddIndicator(u32),
}

impl Functional {
    fn eval(&self, pi: &SetPartition) -> Ratio {
        match self {
            Functional::One => Ratio::one(),
            Functional::BlockCount => ratio::int(pi.block_count() as i64),
            Functional::OddIndicator(mask) => {
                ratio::int(partitions::odd_block_indicator(*mask, pi) as i64)
            }
        }
    }
}

/// The exact pre-truncation identity behind the Bernoulli translation:
/// Z'_{G,r,2} Σ_π f(π) μ_{G,r,2}(π) = Σ_w r^{‖w‖}(1-r)^{|E|-‖w‖} 2^{‖π[w]‖} f(π[w]).
pub fn bernoulli_translation_check(g: &Graph, r: &Ratio, f: Functional) -> Result<bool> {
    let e = g.edge_count();
    if e > 20 {
        return Err(Error::size_limit("bernoulli_translation_check: |E| > 20"));
    }
    let two = ratio::int(2);
    let z = rcm_normalizer(g, r, &two)?;
    let mu = rcm_measure(g, r, &two)?;
    let lhs: Ratio = z * mu
        .iter()
        .map(|(pi, v)| f.eval(pi) * v)
        .sum::<Ratio>();
    let rpow = powers(r, e);
    let spow = powers(&(Ratio::one() - r), e);
    let mut rhs = Ratio::zero();
    for w in 0..1u64 << e {
        let pi = partitions::partition_from_edges(g, w);
        let k = w.count_ones() as usize;
        rhs += &rpow[k]
            * &spow[e - k]
            * ratio::pow(&two, pi.block_count() as i64)
            * f.eval(&pi);
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, ratio};

    #[test]
    fn rcm_is_probability_on_connected_blocks() {
        let g = Graph::complete(4).unwrap();
        let mu = rcm_measure(&g, &ratio(1, 3), &int(2)).unwrap();
        assert!(mu.is_probability());
        assert!(mu.supported_on_connected_blocks(&g));
        assert_eq!(mu.total(), int(1));
        // cycle_4: the two-blocks-of-opposite-vertices partition is not
        // connected, so it gets no mass
        let c4 = Graph::cycle(4).unwrap();
        let mu = rcm_measure(&c4, &ratio(1, 2), &int(2)).unwrap();
        let diag = crate::partitions::parse_partition("1,3|2,4", 4).unwrap();
        assert_eq!(mu.get(&diag), int(0));
        assert!(mu.supported_on_connected_blocks(&c4));
    }

    #[test]
    fn q_one_is_bernoulli_pushforward() {
        let g = Graph::complete(3).unwrap();
        let r = ratio(2, 5);
        let mu = rcm_measure(&g, &r, &int(1)).unwrap();
        // direct pushforward of independent Bernoulli(r) edges
        let e = g.edge_count();
        let mut direct: BTreeMap<SetPartition, Ratio> = BTreeMap::new();
        for w in 0..1u64 << e {
            let k = w.count_ones() as usize;
            let weight = ratio::pow(&r, k as i64)
                * ratio::pow(&(Ratio::one() - &r), (e - k) as i64);
            *direct
                .entry(partitions::partition_from_edges(&g, w))
                .or_insert_with(Ratio::zero) += weight;
        }
        for (pi, v) in &direct {
            assert_eq!(mu.get(pi), *v);
        }
    }

    #[test]
    fn k3_singleton_mass_closed_form() {
        // mu_{K3, 1-1/x, 2}(singletons) = 4/(x(3+x^2)) at x=2 -> 2/7
        let g = Graph::complete(3).unwrap();
        let x = int(2);
        let r = Ratio::one() - x.recip();
        let mu = rcm_measure(&g, &r, &int(2)).unwrap();
        let singletons = SetPartition::singletons(3);
        assert_eq!(mu.get(&singletons), ratio(2, 7));
    }

    #[test]
    fn coupling_on_small_graphs() {
        for (g, x) in [
            (Graph::complete(3).unwrap(), int(2)),
            (Graph::complete(4).unwrap(), ratio(3, 2)),
            (Graph::path(3).unwrap(), int(5)),
        ] {
            assert!(coupling_check(&g, &x).unwrap());
        }
        assert!(coupling_check(&Graph::complete(3).unwrap(), &int(1)).is_err());
    }

    #[test]
    fn residual_nonzero_on_k4() {
        // exact oracle value -32/81 at r = 1/2 (independently computed)
        let g = Graph::complete(4).unwrap();
        let res = necessary_condition_residual(&g, &ratio(1, 2), &[1, 2, 3]).unwrap();
        assert_eq!(res, ratio(-32, 81));
        assert!(necessary_condition_residual(&g, &ratio(1, 2), &[1, 2]).is_err());
    }

    #[test]
    fn residual_vanishes_as_r_to_zero() {
        // at tiny r the measure degenerates toward singletons and both sides
        // shrink together; check the residual is O(r^2)-small at r = 1/1000
        let g = Graph::complete(4).unwrap();
        let res = necessary_condition_residual(&g, &ratio(1, 1000), &[1, 2, 3]).unwrap();
        assert!(res.abs() < ratio(1, 10000));
    }

    #[test]
    fn series_low_order_coefficients() {
        for n in 4..=6 {
            let p = bernoulli_series_coefficients(n, &[1, 2, 3], SeriesKind::AWeighted).unwrap();
            assert_eq!(p.coeff(0), int(0));
            assert_eq!(p.coeff(1), int(0));
            assert_eq!(p.coeff(2), int(3 * (n as i64 - 1)));
            let n_i = n as i64;
            assert_eq!(p.coeff(3), int(2 * (7 - 12 * n_i + 3 * n_i * n_i)));
        }
        let plain = bernoulli_series_coefficients(4, &[1, 2, 3], SeriesKind::APlain).unwrap();
        assert_eq!(plain.coeff(0), int(0));
        // derived by the brute-force oracle: Sigma_i sum has r^1 coefficient n(n-1)
        for (n, expect) in [(4usize, 12i64), (5, 20)] {
            let s =
                bernoulli_series_coefficients(n, &[1, 2, 3], SeriesKind::SingletonSizes).unwrap();
            assert_eq!(s.coeff(0), int(0));
            assert_eq!(s.coeff(1), int(expect));
        }
        assert!(bernoulli_series_coefficients(7, &[1, 2, 3], SeriesKind::APlain).is_err());
    }

    #[test]
    fn series_evaluates_to_direct_sum() {
        // the expanded polynomial evaluated at a rational r-hat equals the
        // configuration sum computed directly
        let n = 4;
        let rh = ratio(1, 3);
        let g = Graph::complete(n).unwrap();
        let em = EdgeMeasure::bernoulli(g.clone(), rh.clone()).unwrap();
        let s_mask = partitions::mask_of(&[1, 2, 3]);
        let mut direct = Ratio::zero();
        for w in 0..1u64 << g.edge_count() {
            let pi = partitions::partition_from_edges(&g, w);
            if partitions::odd_block_indicator(s_mask, &pi) {
                if let Some(b) = partitions::odd_block(s_mask, &pi) {
                    direct += int(b.len() as i64 - 1) * em.weight(w);
                }
            }
        }
        let poly = bernoulli_series_coefficients(n, &[1, 2, 3], SeriesKind::AWeighted).unwrap();
        assert_eq!(poly.eval(&rh), direct);
    }

    #[test]
    fn translation_identity() {
        let g = Graph::complete(4).unwrap();
        assert!(bernoulli_translation_check(&g, &ratio(1, 3), Functional::One).unwrap());
        assert!(bernoulli_translation_check(&g, &ratio(1, 3), Functional::BlockCount).unwrap());
        let s = partitions::mask_of(&[1, 2, 3]);
        assert!(
            bernoulli_translation_check(&g, &ratio(2, 7), Functional::OddIndicator(s)).unwrap()
        );
    }

    #[test]
    fn edge_measure_q_weights() {
        let g = Graph::complete(3).unwrap();
        let em = EdgeMeasure::new(g.clone(), ratio(1, 2), int(1)).unwrap();
        // q = 1: weights sum to 1
        assert_eq!(em.total(), int(1));
        let eb = EdgeMeasure::bernoulli(g, ratio(1, 2)).unwrap();
        assert_eq!(eb.total(), int(1));
        assert!(EdgeMeasure::bernoulli(Graph::complete(3).unwrap(), int(1)).is_err());
    }

    #[test]
    fn guards() {
        let g = Graph::complete(3).unwrap();
        assert!(rcm_measure(&g, &int(1), &int(2)).is_err());
        assert!(rcm_measure(&g, &ratio(1, 2), &int(0)).is_err());
        let big = Graph::complete(8).unwrap(); // 28 edges
        assert!(rcm_measure(&big, &ratio(1, 2), &int(2)).is_err());
    }
}
