//! The lattice `NC(n)` of noncrossing partitions of `{1, ..., n}`.
//!
//! Partitions are kept in canonical form: blocks sorted by their minimum
//! element, elements ascending inside each block. The canonical encoding for
//! hashing and ordering is the restricted-growth string (RGS): position `p`
//! maps to the index of its block in canonical order. Enumeration is
//! lexicographic on that encoding.
//!
//! Möbius values are computed by memoized recursion over intervals of the
//! lattice, never by interval factorization.

use crate::{domain_err, Error, Result};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

/// Enumeration cap: |NC(12)| = 208012 keeps memory bounded.
pub const DEFAULT_ENUM_CAP: usize = 12;

/// A noncrossing partition of `{1, ..., n}` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NoncrossingPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl fmt::Debug for NoncrossingPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NC[{}]{}", self.n, self)
    }
}

impl fmt::Display for NoncrossingPartition {
    /// Text form used by the CLI and golden files: `{(1,2),(3)}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (j, e) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for NoncrossingPartition {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("partition must be braced: {text:?}")))?;
        let mut blocks = Vec::new();
        let mut rest = inner;
        while !rest.is_empty() {
            let rest2 = rest.strip_prefix('(').ok_or_else(|| {
                Error::Parse(format!("expected '(' at {rest:?} in partition {text:?}"))
            })?;
            let close = rest2
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed block in {text:?}")))?;
            let body = &rest2[..close];
            let mut block = Vec::new();
            for piece in body.split(',') {
                if piece.is_empty() {
                    return Err(Error::Parse(format!("empty element in {text:?}")));
                }
                let v: usize = piece
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad element {piece:?} in {text:?}")))?;
                block.push(v);
            }
            blocks.push(block);
            rest = &rest2[close + 1..];
            rest = rest.strip_prefix(',').unwrap_or(rest);
        }
        let n = blocks.iter().flatten().copied().max().unwrap_or(0);
        NoncrossingPartition::from_blocks(n, blocks)
    }
}

impl NoncrossingPartition {
    /// Validate and canonicalize a block list into a partition of `{1..n}`.
    pub fn from_blocks(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return domain_err("partition ground set must be nonempty");
        }
        let mut seen = vec![false; n + 1];
        for b in &mut blocks {
            if b.is_empty() {
                return domain_err("empty block");
            }
            b.sort_unstable();
            for &e in b.iter() {
                if e == 0 || e > n {
                    return domain_err(format!("element {e} outside 1..={n}"));
                }
                if seen[e] {
                    return domain_err(format!("element {e} appears twice"));
                }
                seen[e] = true;
            }
        }
        if seen[1..].iter().any(|s| !s) {
            return domain_err("blocks do not cover the ground set");
        }
        blocks.sort_by_key(|b| b[0]);
        let part = NoncrossingPartition { n, blocks };
        if !part.check_noncrossing() {
            return domain_err(format!("partition {part} has crossing blocks"));
        }
        Ok(part)
    }

    /// `0_n`: all singletons.
    pub fn minimum(n: usize) -> Self {
        NoncrossingPartition {
            n,
            blocks: (1..=n).map(|i| vec![i]).collect(),
        }
    }

    /// `1_n`: one block.
    pub fn maximum(n: usize) -> Self {
        NoncrossingPartition {
            n,
            blocks: vec![(1..=n).collect()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Restricted-growth string: index of the block containing each point.
    pub fn rgs(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &e in b {
                out[e - 1] = i as u8;
            }
        }
        out
    }

    /// Index (in canonical block order) of the block containing `elem`.
    pub fn block_of(&self, elem: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&elem).is_ok())
            .expect("element in ground set")
    }

    pub fn is_even(&self) -> bool {
        self.blocks.iter().all(|b| b.len() % 2 == 0)
    }

    pub fn is_pair(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }

    /// Stack sweep: each position's block must be new or on top of the open
    /// stack.
    fn check_noncrossing(&self) -> bool {
        let rgs = self.rgs();
        let last: Vec<usize> = self.blocks.iter().map(|b| *b.last().unwrap()).collect();
        let mut open: Vec<u8> = Vec::new();
        for p in 1..=self.n {
            let label = rgs[p - 1];
            match open.last() {
                Some(&top) if top == label => {}
                _ if !open.contains(&label) => open.push(label),
                _ => return false,
            }
            if last[label as usize] == p {
                open.pop();
            }
        }
        true
    }

    /// Refinement order: true iff every block of `self` is contained in a
    /// block of `pi`.
    pub fn leq(&self, pi: &NoncrossingPartition) -> Result<bool> {
        if self.n != pi.n {
            return domain_err(format!("leq on mismatched sizes {} vs {}", self.n, pi.n));
        }
        let coarse = pi.rgs();
        Ok(self
            .blocks
            .iter()
            .all(|b| b.iter().all(|&e| coarse[e - 1] == coarse[b[0] - 1])))
    }

    /// Kreweras complement: the maximal partition on the interleaved points
    /// `1', ..., n'` whose union with `self` (on `1, ..., n`) stays
    /// noncrossing on the 2n-point line.
    ///
    /// Two interleaved points belong to the same complement block iff no
    /// block of `self` separates them, where a block separates a pair iff it
    /// has a leg strictly between them and another leg outside them.
    pub fn kreweras(&self) -> NoncrossingPartition {
        let n = self.n;
        // Odd positions 2i-1 carry self, even positions 2i the complement.
        let legs: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&e| 2 * e - 1).collect())
            .collect();
        let separated = |p: usize, q: usize| -> bool {
            legs.iter().any(|block| {
                let inside = block.iter().any(|&v| p < v && v < q);
                let outside = block.iter().any(|&v| v < p || v > q);
                inside && outside
            })
        };
        let mut class: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in 0..i {
                if class[i] == i && !separated(2 * j + 2, 2 * i + 2) {
                    class[i] = class[j];
                    break;
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index: HashMap<usize, usize> = HashMap::new();
        for i in 0..n {
            let root = class[i];
            let slot = *index.entry(root).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[slot].push(i + 1);
        }
        blocks.sort_by_key(|b| b[0]);
        NoncrossingPartition { n, blocks }
    }

    /// Interleave `self` on odd positions and `sigma` on even positions of a
    /// `2n`-point ground set. Errors when the relabeled union crosses, which
    /// signals `sigma` is not below the Kreweras complement of `self`.
    pub fn alternating_union(&self, sigma: &NoncrossingPartition) -> Result<NoncrossingPartition> {
        if self.n != sigma.n {
            return domain_err("alternating_union requires equal ground sets");
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for b in &self.blocks {
            blocks.push(b.iter().map(|&e| 2 * e - 1).collect());
        }
        for b in &sigma.blocks {
            blocks.push(b.iter().map(|&e| 2 * e).collect());
        }
        NoncrossingPartition::from_blocks(2 * self.n, blocks)
    }
}

/// Nesting forest of a partition's blocks: outer blocks are roots, a block is
/// a child of the innermost block whose consecutive legs enclose it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestingForest {
    /// Parent block index (canonical order) per block; `None` for roots.
    pub parent: Vec<Option<usize>>,
    /// Children per block, ordered left to right.
    pub children: Vec<Vec<usize>>,
    /// Root blocks, ordered left to right.
    pub roots: Vec<usize>,
}

/// Compute the nesting forest by the same stack sweep that certifies the
/// noncrossing property.
pub fn nesting_structure(pi: &NoncrossingPartition) -> NestingForest {
    let k = pi.num_blocks();
    let rgs = pi.rgs();
    let last: Vec<usize> = pi.blocks().iter().map(|b| *b.last().unwrap()).collect();
    let mut parent: Vec<Option<usize>> = vec![None; k];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut roots = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    let mut started = vec![false; k];
    for p in 1..=pi.n() {
        let b = rgs[p - 1] as usize;
        if !started[b] {
            started[b] = true;
            match open.last() {
                Some(&top) => {
                    parent[b] = Some(top);
                    children[top].push(b);
                }
                None => roots.push(b),
            }
            open.push(b);
        }
        if last[b] == p {
            debug_assert_eq!(open.last(), Some(&b));
            open.pop();
        }
    }
    NestingForest {
        parent,
        children,
        roots,
    }
}

fn check_enum_args(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return domain_err("NC(0) is not supported; n must be at least 1");
    }
    if n > cap {
        return Err(Error::Domain(format!(
            "enumeration of NC({n}) exceeds the cap of {cap}"
        )));
    }
    Ok(())
}

/// All of `NC(n)` in lexicographic order of the canonical encoding, with an
/// explicit cap.
pub fn enumerate_nc_capped(n: usize, cap: usize) -> Result<Vec<NoncrossingPartition>> {
    check_enum_args(n, cap)?;
    let mut out = Vec::new();
    let mut rgs = vec![0u8; n];
    // Open blocks as (label, last element); labels increase bottom to top, so
    // scanning the stack from the bottom visits candidate labels in ascending
    // order and yields RGS-lexicographic output.
    let mut stack: Vec<u8> = vec![0];
    fn rec(
        p: usize,
        n: usize,
        nblocks: u8,
        rgs: &mut Vec<u8>,
        stack: &mut Vec<u8>,
        out: &mut Vec<NoncrossingPartition>,
    ) {
        if p == n {
            let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); nblocks as usize];
            for (i, &l) in rgs.iter().enumerate() {
                blocks[l as usize].push(i + 1);
            }
            out.push(NoncrossingPartition { n, blocks });
            return;
        }
        for idx in 0..stack.len() {
            let label = stack[idx];
            let popped: Vec<u8> = stack.split_off(idx + 1);
            rgs[p] = label;
            rec(p + 1, n, nblocks, rgs, stack, out);
            stack.extend(popped);
        }
        rgs[p] = nblocks;
        stack.push(nblocks);
        rec(p + 1, n, nblocks + 1, rgs, stack, out);
        stack.pop();
    }
    rec(1, n, 1, &mut rgs, &mut stack, &mut out);
    Ok(out)
}

static NC_CACHE: Lazy<Mutex<HashMap<usize, Arc<Vec<NoncrossingPartition>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// All of `NC(n)` (cached, default cap).
pub fn enumerate_nc(n: usize) -> Result<Arc<Vec<NoncrossingPartition>>> {
    check_enum_args(n, DEFAULT_ENUM_CAP)?;
    let mut cache = NC_CACHE.lock().unwrap();
    if let Some(v) = cache.get(&n) {
        return Ok(Arc::clone(v));
    }
    let v = Arc::new(enumerate_nc_capped(n, DEFAULT_ENUM_CAP)?);
    cache.insert(n, Arc::clone(&v));
    Ok(v)
}

/// Noncrossing partitions of `{1..n}` with all blocks of even size.
pub fn enumerate_nc_even(n: usize) -> Result<Vec<NoncrossingPartition>> {
    Ok(enumerate_nc(n)?
        .iter()
        .filter(|p| p.is_even())
        .cloned()
        .collect())
}

/// Noncrossing pair partitions of `{1..n}`; empty for odd `n`.
pub fn enumerate_nc_pair(n: usize) -> Result<Vec<NoncrossingPartition>> {
    Ok(enumerate_nc(n)?
        .iter()
        .filter(|p| p.is_pair())
        .cloned()
        .collect())
}

/// Zeta function of the incidence algebra: 1 iff `theta <= pi`.
pub fn zeta(theta: &NoncrossingPartition, pi: &NoncrossingPartition) -> Result<i64> {
    Ok(if theta.leq(pi)? { 1 } else { 0 })
}

/// Delta function: 1 iff `theta == pi`.
pub fn delta(theta: &NoncrossingPartition, pi: &NoncrossingPartition) -> Result<i64> {
    if theta.n() != pi.n() {
        return domain_err("delta on mismatched sizes");
    }
    Ok(if theta == pi { 1 } else { 0 })
}

/// Möbius function on the interval `[theta, pi]`, by memoized recursion on
/// `sum_{theta <= sigma <= pi} mu(sigma, pi) = delta(theta, pi)`. Returns 0
/// when `theta` is not below `pi`.
pub fn mobius(theta: &NoncrossingPartition, pi: &NoncrossingPartition) -> Result<i64> {
    if theta.n() != pi.n() {
        return domain_err("mobius on mismatched sizes");
    }
    if !theta.leq(pi)? {
        return Ok(0);
    }
    if theta == pi {
        return Ok(1);
    }
    let all = enumerate_nc(pi.n())?;
    let interval: Vec<&NoncrossingPartition> = all
        .iter()
        .filter(|s| theta.leq(s).unwrap() && s.leq(pi).unwrap())
        .collect();
    // sigma < tau implies tau has strictly fewer blocks, so computing in
    // ascending block count makes every summand available when needed.
    let mut order: Vec<usize> = (0..interval.len()).collect();
    order.sort_by_key(|&i| interval[i].num_blocks());
    let mut mu: HashMap<&NoncrossingPartition, i64> = HashMap::new();
    for &i in &order {
        let sigma = interval[i];
        let value = if sigma == pi {
            1
        } else {
            let mut acc = 0i64;
            for (tau, &m) in mu.iter() {
                if sigma != *tau && sigma.leq(tau).unwrap() {
                    acc += m;
                }
            }
            -acc
        };
        mu.insert(sigma, value);
    }
    Ok(*mu.get(theta).unwrap())
}

static MU_TOP_CACHE: Lazy<Mutex<HashMap<usize, Arc<HashMap<Vec<u8>, i64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// `mu(pi, 1_n)` for every `pi` in `NC(n)`, cached per `n`. This is the
/// weight table used by every Möbius inversion in the crate.
pub fn mobius_to_top_table(n: usize) -> Result<Arc<HashMap<Vec<u8>, i64>>> {
    {
        let cache = MU_TOP_CACHE.lock().unwrap();
        if let Some(t) = cache.get(&n) {
            return Ok(Arc::clone(t));
        }
    }
    let all = enumerate_nc(n)?;
    let mut order: Vec<usize> = (0..all.len()).collect();
    order.sort_by_key(|&i| all[i].num_blocks());
    let mut mu: HashMap<Vec<u8>, i64> = HashMap::new();
    let mut coarser: Vec<(&NoncrossingPartition, i64)> = Vec::new();
    for &i in &order {
        let sigma = &all[i];
        let value = if sigma.num_blocks() == 1 {
            1
        } else {
            let mut acc = 0i64;
            for &(tau, m) in &coarser {
                if sigma.leq(tau).unwrap() {
                    acc += m;
                }
            }
            -acc
        };
        mu.insert(sigma.rgs(), value);
        coarser.push((sigma, value));
    }
    let arc = Arc::new(mu);
    MU_TOP_CACHE
        .lock()
        .unwrap()
        .insert(n, Arc::clone(&arc));
    Ok(arc)
}

/// `mu(pi, 1_n)` through the cached table.
pub fn mobius_to_top(pi: &NoncrossingPartition) -> Result<i64> {
    let table = mobius_to_top_table(pi.n())?;
    Ok(*table.get(&pi.rgs()).expect("partition in NC(n)"))
}

/// Catalan numbers; `catalan(n) = |NC(n)|`.
pub fn catalan(n: usize) -> u64 {
    let mut c: u128 = 1;
    for i in 0..n as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c as u64
}
