//! Set partitions of [n]: enumeration, restriction, refinement, parity
//! predicates, the symmetric-group action, and partitions induced by edge
//! configurations.
//!
//! A partition is stored as its restricted growth string (RGS): entry `i`
//! holds the block index of element `i+1`, blocks numbered by first
//! appearance. The RGS is a canonical encoding, so equality, ordering and
//! hashing are plain `Vec` operations, and RGS-lexicographic order is the
//! enumeration order.

use crate::error::{Error, Result};
use crate::graphs::Graph;
use std::fmt;

/// Full enumeration is capped here; |B_12| = 4 213 597 already.
pub const MAX_ENUM_N: usize = 12;

/// A set partition of `[n]` in canonical form (blocks sorted by minimum,
/// elements ascending — exactly what the RGS encodes).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    rgs: Vec<u8>,
}

/// The multiset of block sizes: an integer partition of n, sorted descending.
/// Shapes index the S_n-orbits of B_n.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionShape {
    n: usize,
    sizes: Vec<usize>,
}

impl SetPartition {
    /// Builds from an RGS; validates the restricted-growth property.
    pub fn from_rgs(rgs: Vec<u8>) -> Result<Self> {
        if rgs.is_empty() {
            return Err(Error::validation("empty ground set"));
        }
        let mut max_seen: i32 = -1;
        for &v in &rgs {
            if i32::from(v) > max_seen + 1 {
                return Err(Error::validation("not a restricted growth string"));
            }
            max_seen = max_seen.max(i32::from(v));
        }
        Ok(SetPartition { rgs })
    }

    /// Builds from explicit blocks over `[n]`; validates disjoint cover.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("empty ground set"));
        }
        let mut owner = vec![usize::MAX; n + 1];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::validation("empty block"));
            }
            for &e in block {
                if e < 1 || e > n {
                    return Err(Error::validation(format!("element {e} out of range")));
                }
                if owner[e] != usize::MAX {
                    return Err(Error::validation(format!("element {e} in two blocks")));
                }
                owner[e] = b;
            }
        }
        if owner[1..].iter().any(|&b| b == usize::MAX) {
            return Err(Error::validation("blocks do not cover [n]"));
        }
        // canonicalize: relabel block ids by first appearance
        let mut relabel = vec![u8::MAX; blocks.len()];
        let mut next = 0u8;
        let mut rgs = Vec::with_capacity(n);
        for e in 1..=n {
            let b = owner[e];
            if relabel[b] == u8::MAX {
                relabel[b] = next;
                next += 1;
            }
            rgs.push(relabel[b]);
        }
        Ok(SetPartition { rgs })
    }

    /// The partition of [n] into singletons.
    pub fn singletons(n: usize) -> Self {
        SetPartition {
            rgs: (0..n as u8).collect(),
        }
    }

    /// The one-block partition of [n].
    pub fn single_block(n: usize) -> Self {
        SetPartition { rgs: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.rgs.len()
    }

    pub fn rgs(&self) -> &[u8] {
        &self.rgs
    }

    /// Number of blocks, the paper's ‖π‖.
    pub fn block_count(&self) -> usize {
        self.rgs.iter().map(|&v| v as usize).max().unwrap() + 1
    }

    /// Blocks in canonical order (by minimum element), elements ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[b as usize].push(i + 1);
        }
        blocks
    }

    /// Block index of element `e` (1-based).
    pub fn block_of(&self, e: usize) -> usize {
        self.rgs[e - 1] as usize
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.rgs[a - 1] == self.rgs[b - 1]
    }

    /// Whether σ (bitmask, bit i-1 = σ_i) is constant on every block: π ⊲ σ.
    pub fn refines_spin(&self, sigma: u32) -> bool {
        let nb = self.block_count();
        let mut seen = vec![None; nb];
        for (i, &b) in self.rgs.iter().enumerate() {
            let bit = (sigma >> i) & 1;
            match seen[b as usize] {
                None => seen[b as usize] = Some(bit),
                Some(prev) if prev != bit => return false,
                _ => {}
            }
        }
        true
    }

    /// For π ⊲ σ: the number of blocks colored 1, the paper's ‖σ‖_π.
    /// Caller must ensure `refines_spin(sigma)`.
    pub fn ones_blocks(&self, sigma: u32) -> usize {
        let nb = self.block_count();
        let mut first = vec![None; nb];
        for (i, &b) in self.rgs.iter().enumerate() {
            if first[b as usize].is_none() {
                first[b as usize] = Some((sigma >> i) & 1);
            }
        }
        first.iter().filter(|v| **v == Some(1)).count()
    }

    /// Restriction π|_T as a partition over the relabeled ground set
    /// 1..=|T| (elements of T taken in ascending order).
    pub fn restrict(&self, t: &[usize]) -> Result<SetPartition> {
        if t.is_empty() {
            return Err(Error::EmptySet("restriction to the empty set".into()));
        }
        let mut t = t.to_vec();
        t.sort_unstable();
        t.dedup();
        if t.iter().any(|&e| e < 1 || e > self.n()) {
            return Err(Error::validation("restriction set out of range"));
        }
        let mut relabel = std::collections::HashMap::new();
        let mut rgs = Vec::with_capacity(t.len());
        for &e in &t {
            let b = self.rgs[e - 1];
            let next = relabel.len() as u8;
            let id = *relabel.entry(b).or_insert(next);
            rgs.push(id);
        }
        Ok(SetPartition { rgs })
    }

    /// Block sizes of π|_T without relabeling, keyed by block id of π.
    /// Handy for the parity predicates; fine with `t_mask = 0`.
    pub fn restricted_block_sizes(&self, t_mask: u32) -> Vec<(usize, usize)> {
        let mut sizes: Vec<(usize, usize)> = Vec::new();
        for (i, &b) in self.rgs.iter().enumerate() {
            if (t_mask >> i) & 1 == 1 {
                match sizes.iter_mut().find(|(id, _)| *id == b as usize) {
                    Some((_, c)) => *c += 1,
                    None => sizes.push((b as usize, 1)),
                }
            }
        }
        sizes
    }

    /// Number of blocks of π|_S, the ‖π|_S‖ in A'(S,π) = 2^{-‖π|_S‖}.
    pub fn restricted_block_count(&self, t_mask: u32) -> usize {
        self.restricted_block_sizes(t_mask).len()
    }

    /// π′ ⊲ π″: every block of `self` lies inside some block of `other`.
    pub fn refines(&self, other: &SetPartition) -> Result<bool> {
        if self.n() != other.n() {
            return Err(Error::dimension("refines: mismatched ground sets"));
        }
        let mut image = vec![None; self.block_count()];
        for (i, &b) in self.rgs.iter().enumerate() {
            let o = other.rgs[i];
            match image[b as usize] {
                None => image[b as usize] = Some(o),
                Some(prev) if prev != o => return Ok(false),
                _ => {}
            }
        }
        Ok(true)
    }

    /// The action of a permutation τ (given as the image list `tau[i-1] = τ(i)`).
    pub fn apply_permutation(&self, tau: &[usize]) -> Result<SetPartition> {
        let n = self.n();
        if tau.len() != n {
            return Err(Error::dimension("permutation length != n"));
        }
        let mut check = vec![false; n + 1];
        for &v in tau {
            if v < 1 || v > n || check[v] {
                return Err(Error::validation("not a permutation of [n]"));
            }
            check[v] = true;
        }
        let blocks = self.blocks();
        let mapped: Vec<Vec<usize>> = blocks
            .iter()
            .map(|blk| blk.iter().map(|&e| tau[e - 1]).collect())
            .collect();
        SetPartition::from_blocks(n, &mapped)
    }

    pub fn shape(&self) -> PartitionShape {
        let mut sizes: Vec<usize> = self.blocks().iter().map(|b| b.len()).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        PartitionShape {
            n: self.n(),
            sizes,
        }
    }

    /// Whether every block induces a connected subgraph of `g`.
    pub fn blocks_connected_in(&self, g: &Graph) -> bool {
        self.blocks().iter().all(|blk| {
            if blk.len() == 1 {
                return true;
            }
            let inside: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .copied()
                .filter(|&(a, b)| blk.contains(&a) && blk.contains(&b))
                .collect();
            let mut seen = std::collections::HashSet::from([blk[0]]);
            let mut stack = vec![blk[0]];
            while let Some(v) = stack.pop() {
                for &(a, b) in &inside {
                    let w = if a == v { b } else if b == v { a } else { continue };
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            blk.iter().all(|e| seen.contains(e))
        })
    }
}

impl fmt::Display for SetPartition {
    /// Canonical text form: blocks joined by `|`, elements by `,`: `1,2|3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks = self.blocks();
        let mut first = true;
        for blk in blocks {
            if !first {
                write!(f, "|")?;
            }
            first = false;
            let strs: Vec<String> = blk.iter().map(|e| e.to_string()).collect();
            write!(f, "{}", strs.join(","))?;
        }
        Ok(())
    }
}

/// Parses the canonical text form back into a partition of [n].
pub fn parse_partition(s: &str, n: usize) -> Result<SetPartition> {
    let mut blocks = Vec::new();
    for part in s.split('|') {
        let mut blk = Vec::new();
        for e in part.split(',') {
            let v: usize = e
                .trim()
                .parse()
                .map_err(|_| Error::validation(format!("bad element `{e}`")))?;
            blk.push(v);
        }
        blocks.push(blk);
    }
    SetPartition::from_blocks(n, &blocks)
}

impl PartitionShape {
    pub fn new(n: usize, mut sizes: Vec<usize>) -> Result<Self> {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        if sizes.iter().sum::<usize>() != n || sizes.iter().any(|&s| s == 0) {
            return Err(Error::validation("block sizes must sum to n"));
        }
        Ok(PartitionShape { n, sizes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn block_count(&self) -> usize {
        self.sizes.len()
    }

    /// Number of set partitions with this shape: n! / (prod sizes! * prod mult!).
    pub fn orbit_size(&self) -> usize {
        let fact = |k: usize| -> u128 { (1..=k as u128).product::<u128>().max(1) };
        let mut denom: u128 = self.sizes.iter().map(|&s| fact(s)).product();
        let mut mult = std::collections::HashMap::new();
        for &s in &self.sizes {
            *mult.entry(s).or_insert(0usize) += 1;
        }
        for m in mult.values() {
            denom *= fact(*m);
        }
        (fact(self.n) / denom) as usize
    }

    /// The canonical representative: consecutive runs, largest block first,
    /// e.g. shape 2+2+1 of [5] gives 1,2|3,4|5.
    pub fn representative(&self) -> SetPartition {
        let mut blocks = Vec::new();
        let mut next = 1;
        for &s in &self.sizes {
            blocks.push((next..next + s).collect::<Vec<_>>());
            next += s;
        }
        SetPartition::from_blocks(self.n, &blocks).expect("shape representative is valid")
    }
}

impl fmt::Display for PartitionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", strs.join("+"))
    }
}

/// All of B_n in restricted-growth lexicographic order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<SetPartition>> {
    if n == 0 || n > MAX_ENUM_N {
        return Err(Error::size_limit(format!(
            "enumerate_partitions needs 1 <= n <= {MAX_ENUM_N}, got {n}"
        )));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0u8; n];
    loop {
        out.push(SetPartition { rgs: rgs.clone() });
        // next RGS in lexicographic order
        let mut i = n;
        loop {
            if i == 1 {
                return Ok(out);
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap();
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for v in rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
    }
}

/// π[w]: the partition of V(G) into connected components of the open edges.
/// Bit `k` of `w` is edge `g.edges()[k]`.
pub fn partition_from_edges(g: &Graph, w: u64) -> SetPartition {
    let n = g.n();
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (k, &(a, b)) in g.edges().iter().enumerate() {
        if (w >> k) & 1 == 1 {
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            parent[ra] = rb;
        }
    }
    let mut relabel = vec![u8::MAX; n + 1];
    let mut next = 0u8;
    let mut rgs = Vec::with_capacity(n);
    for e in 1..=n {
        let r = find(&mut parent, e);
        if relabel[r] == u8::MAX {
            relabel[r] = next;
            next += 1;
        }
        rgs.push(relabel[r]);
    }
    SetPartition { rgs }
}

/// π[T]: T a block, all else singletons. Defined for |T| >= 2 and T = ∅
/// (all singletons); |T| = 1 is rejected.
pub fn single_block_partition(t: &[usize], n: usize) -> Result<SetPartition> {
    match t.len() {
        0 => Ok(SetPartition::singletons(n)),
        1 => Err(Error::validation(
            "pi[T] needs |T| >= 2 (or T empty for all singletons)",
        )),
        _ => {
            let mut blocks = vec![t.to_vec()];
            for e in 1..=n {
                if !t.contains(&e) {
                    blocks.push(vec![e]);
                }
            }
            SetPartition::from_blocks(n, &blocks)
        }
    }
}

/// A(S,π): does π|_S have at most one odd-sized block? (S as bitmask.)
pub fn odd_block_indicator(s_mask: u32, pi: &SetPartition) -> bool {
    pi.restricted_block_sizes(s_mask)
        .iter()
        .filter(|(_, c)| c % 2 == 1)
        .count()
        <= 1
}

/// T_{S,π}: when |S| is odd and A(S,π) = 1, the full block of π whose
/// restriction to S is the odd block (its size counts vertices of π's block,
/// matching the random-cluster limit computations). Absent otherwise.
pub fn odd_block(s_mask: u32, pi: &SetPartition) -> Option<Vec<usize>> {
    if s_mask.count_ones() % 2 == 0 {
        return None;
    }
    let odd: Vec<usize> = pi
        .restricted_block_sizes(s_mask)
        .iter()
        .filter(|(_, c)| c % 2 == 1)
        .map(|(id, _)| *id)
        .collect();
    if odd.len() != 1 {
        return None;
    }
    Some(pi.blocks()[odd[0]].clone())
}

/// One representative per S_n-orbit: the canonical representative of each
/// integer partition of n, largest parts first.
pub fn shape_representatives(n: usize) -> Vec<SetPartition> {
    shapes(n).iter().map(|s| s.representative()).collect()
}

/// All shapes (integer partitions of n), reverse-lexicographic: [n] first,
/// all-singletons last.
pub fn shapes(n: usize) -> Vec<PartitionShape> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for next in (1..=remaining.min(max)).rev() {
            current.push(next);
            rec(remaining - next, next, current, out);
            current.pop();
        }
    }
    let mut sizes_list = Vec::new();
    rec(n, n, &mut current, &mut sizes_list);
    for sizes in sizes_list {
        out.push(PartitionShape { n, sizes });
    }
    out
}

/// Subset helpers: [n] masks <-> element lists (1-based).
pub fn mask_of(elems: &[usize]) -> u32 {
    elems.iter().fold(0, |m, &e| m | (1 << (e - 1)))
}

pub fn elems_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| (mask >> i) & 1 == 1).map(|i| i + 1).collect()
}
