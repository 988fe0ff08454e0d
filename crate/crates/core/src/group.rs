//! Concrete finite groups as element tables.
//!
//! Elements are indices `0..order` with the identity always at index 0. Small
//! groups carry a dense multiplication table; large enumerated groups carry
//! their regular coset action instead, with products computed by tracing
//! definition words. Both backings sit behind the same `GroupTable` surface.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{factorize, AbelianType};
use crate::error::{Error, Result};

pub type Elem = u32;
pub const IDENTITY: Elem = 0;

/// Shared handle to an immutable group.
pub type GroupRef = Arc<GroupTable>;

/// Orders above this threshold keep the regular-action backing; below it the
/// dense table is materialized.
pub const DENSE_THRESHOLD: usize = 4096;

const ASSOC_SAMPLE_CAP: usize = 1_000_000;

#[derive(Debug)]
pub struct GroupTable {
    name: String,
    order: usize,
    generators: Vec<Elem>,
    backing: Backing,
}

#[derive(Debug)]
enum Backing {
    Dense { mul: Vec<Elem>, inv: Vec<Elem> },
    Regular(RegularRep),
}

/// Regular representation taken from a complete coset table over the trivial
/// subgroup: element `c` is the coset reached from 0 by its definition word.
#[derive(Debug)]
pub struct RegularRep {
    width: usize,           // 2 * generator count; even columns act by the
    action: Vec<Elem>,      // generator, odd columns by its inverse
    def: Vec<(Elem, i32)>,  // spanning forest rooted at 0
    visit_order: Vec<Elem>, // forest traversal order (parents first)
}

impl RegularRep {
    pub fn new(width: usize, action: Vec<Elem>, def: Vec<(Elem, i32)>, visit_order: Vec<Elem>) -> Self {
        RegularRep { width, action, def, visit_order }
    }

    #[inline]
    pub fn apply_letter(&self, c: Elem, letter: i32) -> Elem {
        let col = if letter > 0 {
            2 * (letter as usize - 1)
        } else {
            2 * ((-letter) as usize - 1) + 1
        };
        self.action[c as usize * self.width + col]
    }

    pub fn trace(&self, start: Elem, letters: &[i32]) -> Elem {
        letters.iter().fold(start, |c, &l| self.apply_letter(c, l))
    }
}

thread_local! {
    static REG_WORD_BUF: std::cell::RefCell<Vec<i32>> = const { std::cell::RefCell::new(Vec::new()) };
}

impl GroupTable {
    // -- construction -------------------------------------------------------

    /// Validates a raw multiplication table and canonicalizes it: the identity
    /// is relocated to index 0 and a greedy generating set is chosen.
    pub fn from_mul_table(name: impl Into<String>, mul: &[Vec<u32>]) -> Result<GroupRef> {
        let name = name.into();
        let n = mul.len();
        if n == 0 {
            return Err(Error::NotAGroup { reason: "empty table".into(), witness: None });
        }
        for row in mul {
            if row.len() != n {
                return Err(Error::NotAGroup { reason: "table is not square".into(), witness: None });
            }
            if let Some(&bad) = row.iter().find(|&&x| x as usize >= n) {
                return Err(Error::NotAGroup {
                    reason: format!("entry {bad} out of range"),
                    witness: None,
                });
            }
        }
        // locate the two-sided identity
        let identity = (0..n).find(|&e| {
            (0..n).all(|x| mul[e][x] == x as u32 && mul[x][e] == x as u32)
        });
        let Some(e) = identity else {
            return Err(Error::NotAGroup { reason: "no identity element".into(), witness: None });
        };
        // relocate identity to index 0 by swapping labels 0 <-> e
        let swap = |x: u32| -> u32 {
            if x == 0 {
                e as u32
            } else if x == e as u32 {
                0
            } else {
                x
            }
        };
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                table[swap(x as u32) as usize * n + swap(y as u32) as usize] =
                    swap(mul[x][y]);
            }
        }
        let mut inv = vec![u32::MAX; n];
        for x in 0..n {
            let j = (0..n).find(|&j| table[x * n + j] == 0 && table[j * n + x] == 0);
            match j {
                Some(j) => inv[x] = j as u32,
                None => {
                    return Err(Error::NotAGroup {
                        reason: format!("element {x} has no two-sided inverse"),
                        witness: Some((x as u32, 0, 0)),
                    })
                }
            }
        }
        // associativity: exhaustive for small orders, sampled above
        if n <= 256 {
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    let ab = table[a as usize * n + b as usize];
                    for c in 0..n as u32 {
                        let bc = table[b as usize * n + c as usize];
                        if table[ab as usize * n + c as usize] != table[a as usize * n + bc as usize] {
                            return Err(Error::NotAGroup {
                                reason: "associativity fails".into(),
                                witness: Some((a, b, c)),
                            });
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let samples = (10 * n * n).min(ASSOC_SAMPLE_CAP);
            for _ in 0..samples {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                let ab = table[a * n + b] as usize;
                let bc = table[b * n + c] as usize;
                if table[ab * n + c] != table[a * n + bc] {
                    return Err(Error::NotAGroup {
                        reason: "associativity fails (sampled)".into(),
                        witness: Some((a as u32, b as u32, c as u32)),
                    });
                }
            }
        }
        let mut g = GroupTable {
            name,
            order: n,
            generators: Vec::new(),
            backing: Backing::Dense { mul: table, inv },
        };
        g.generators = g.greedy_generators();
        Ok(Arc::new(g))
    }

    /// Internal constructor for tables produced by trusted algorithms
    /// (quotients, products, subgroup materializations).
    pub(crate) fn from_dense_parts(
        name: impl Into<String>,
        order: usize,
        mul: Vec<Elem>,
        generators: Option<Vec<Elem>>,
    ) -> GroupRef {
        debug_assert_eq!(mul.len(), order * order);
        let mut inv = vec![u32::MAX; order];
        for x in 0..order {
            let j = (0..order).find(|&j| mul[x * order + j] == 0).expect("row without identity");
            inv[x] = j as u32;
        }
        let mut g = GroupTable {
            name: name.into(),
            order,
            generators: Vec::new(),
            backing: Backing::Dense { mul, inv },
        };
        g.generators = generators.unwrap_or_else(|| g.greedy_generators());
        debug_assert!(g.spot_check_associativity());
        Arc::new(g)
    }

    pub(crate) fn from_regular(
        name: impl Into<String>,
        order: usize,
        rep: RegularRep,
        generators: Vec<Elem>,
    ) -> GroupRef {
        let g = GroupTable { name: name.into(), order, generators, backing: Backing::Regular(rep) };
        debug_assert!(g.spot_check_associativity());
        Arc::new(g)
    }

    fn spot_check_associativity(&self) -> bool {
        let n = self.order as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200.min(self.order * self.order) {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return false;
            }
        }
        true
    }

    pub fn cyclic(n: usize) -> GroupRef {
        assert!(n >= 1);
        let mut mul = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                mul[i * n + j] = ((i + j) % n) as u32;
            }
        }
        let gens = if n == 1 { vec![0] } else { vec![1] };
        Self::from_dense_parts(format!("z{n}"), n, mul, Some(gens))
    }

    pub fn direct_product(a: &GroupTable, b: &GroupTable) -> GroupRef {
        let (na, nb) = (a.order, b.order);
        let n = na * nb;
        let idx = |x: Elem, y: Elem| -> Elem { x * nb as u32 + y };
        let mut mul = vec![0u32; n * n];
        for x1 in 0..na as u32 {
            for y1 in 0..nb as u32 {
                for x2 in 0..na as u32 {
                    for y2 in 0..nb as u32 {
                        mul[idx(x1, y1) as usize * n + idx(x2, y2) as usize] =
                            idx(a.mul(x1, x2), b.mul(y1, y2));
                    }
                }
            }
        }
        let mut gens: Vec<Elem> = a.generators.iter().map(|&g| idx(g, 0)).collect();
        gens.extend(b.generators.iter().map(|&g| idx(0, g)));
        gens.retain(|&g| g != 0);
        if gens.is_empty() {
            gens.push(0);
        }
        Self::from_dense_parts(format!("{}x{}", a.name, b.name), n, mul, Some(gens))
    }

    /// Dense copy of a regular-backed group (columns are filled by walking the
    /// definition forest, parents before children).
    pub fn densify(&self, name: Option<String>) -> GroupRef {
        let n = self.order;
        let rep = match &self.backing {
            Backing::Dense { .. } => {
                let mul = match &self.backing {
                    Backing::Dense { mul, .. } => mul.clone(),
                    _ => unreachable!(),
                };
                return Self::from_dense_parts(
                    name.unwrap_or_else(|| self.name.clone()),
                    n,
                    mul,
                    Some(self.generators.clone()),
                );
            }
            Backing::Regular(r) => r,
        };
        let mut mul = vec![0u32; n * n];
        // column for the identity is the identity permutation
        for a in 0..n {
            mul[a * n] = a as u32;
        }
        for &b in &rep.visit_order {
            if b == 0 {
                continue;
            }
            let (p, l) = rep.def[b as usize];
            for a in 0..n {
                let ap = mul[a * n + p as usize];
                mul[a * n + b as usize] = rep.apply_letter(ap, l);
            }
        }
        Self::from_dense_parts(
            name.unwrap_or_else(|| self.name.clone()),
            n,
            mul,
            Some(self.generators.clone()),
        )
    }

    // -- accessors ----------------------------------------------------------

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.backing, Backing::Dense { .. })
    }

    pub fn regular_rep(&self) -> Option<&RegularRep> {
        match &self.backing {
            Backing::Regular(r) => Some(r),
            _ => None,
        }
    }

    // -- arithmetic ----------------------------------------------------------

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.backing {
            Backing::Dense { mul, .. } => mul[a as usize * self.order + b as usize],
            Backing::Regular(r) => {
                if b == 0 {
                    return a;
                }
                REG_WORD_BUF.with(|buf| {
                    let mut buf = buf.borrow_mut();
                    buf.clear();
                    let mut c = b;
                    while c != 0 {
                        let (p, l) = r.def[c as usize];
                        buf.push(l);
                        c = p;
                    }
                    let mut x = a;
                    for &l in buf.iter().rev() {
                        x = r.apply_letter(x, l);
                    }
                    x
                })
            }
        }
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        match &self.backing {
            Backing::Dense { inv, .. } => inv[a as usize],
            Backing::Regular(r) => {
                let mut res = IDENTITY;
                let mut c = a;
                while c != 0 {
                    let (p, l) = r.def[c as usize];
                    res = r.apply_letter(res, -l);
                    c = p;
                }
                res
            }
        }
    }

    /// `[a, b] = a b a^-1 b^-1`.
    #[inline]
    pub fn commutator(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    /// `^a b = a b a^-1`.
    #[inline]
    pub fn conjugate(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(a, b), self.inv(a))
    }

    pub fn pow(&self, a: Elem, n: i64) -> Elem {
        let (mut base, mut e) = if n < 0 { (self.inv(a), (-n) as u64) } else { (a, n as u64) };
        let mut acc = IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn elem_order(&self, a: Elem) -> u64 {
        let mut x = a;
        let mut k = 1u64;
        while x != IDENTITY {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        // commuting generators suffice
        self.generators.iter().all(|&a| {
            self.generators.iter().all(|&b| self.mul(a, b) == self.mul(b, a))
        })
    }

    pub fn exponent(&self) -> u64 {
        self.elements().fold(1u64, |acc, e| num_integer::lcm(acc, self.elem_order(e)))
    }

    /// Evaluates a presentation word under the given generator images.
    pub fn eval_word(&self, letters: &[i32], images: &[Elem]) -> Elem {
        letters.iter().fold(IDENTITY, |acc, &l| {
            let img = images[l.unsigned_abs() as usize - 1];
            self.mul(acc, if l > 0 { img } else { self.inv(img) })
        })
    }

    /// `Some(p)` when the order is a prime power (order 1 yields `None`).
    pub fn p_group_prime(&self) -> Option<u64> {
        let fs = factorize(self.order as u64);
        if fs.len() == 1 {
            Some(fs[0].0)
        } else {
            None
        }
    }

    fn greedy_generators(&self) -> Vec<Elem> {
        let mut gens: Vec<Elem> = Vec::new();
        let mut closed = closure(self, &[]);
        while closed.len() < self.order {
            let next = self
                .elements()
                .find(|e| closed.binary_search(e).is_err())
                .expect("closure smaller than the group but no element missing");
            gens.push(next);
            closed = closure(self, &gens);
        }
        if gens.is_empty() {
            gens.push(IDENTITY);
        }
        gens
    }

    /// Stable bytes identifying the group's content (used for cache keys).
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.order as u64).to_le_bytes());
        match &self.backing {
            Backing::Dense { mul, .. } => {
                out.push(0);
                for &x in mul {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
            Backing::Regular(r) => {
                out.push(1);
                out.extend_from_slice(&(r.width as u64).to_le_bytes());
                for &x in &r.action {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Subgroups
// ---------------------------------------------------------------------------

/// A subgroup stored as its sorted element set.
#[derive(Debug, Clone)]
pub struct Subgroup {
    pub parent: GroupRef,
    elements: Vec<Elem>,
}

impl Subgroup {
    pub fn from_elements(parent: GroupRef, mut elements: Vec<Elem>) -> Result<Subgroup> {
        elements.sort_unstable();
        elements.dedup();
        if elements.binary_search(&IDENTITY).is_err() {
            return Err(Error::Internal("subgroup misses the identity".into()));
        }
        let h = Subgroup { parent, elements };
        for &a in &h.elements {
            if h.elements.binary_search(&h.parent.inv(a)).is_err() {
                return Err(Error::Internal(format!("subgroup not closed under inverse of {a}")));
            }
            for &b in &h.elements {
                if h.elements.binary_search(&h.parent.mul(a, b)).is_err() {
                    return Err(Error::Internal(format!("subgroup not closed under {a}*{b}")));
                }
            }
        }
        if h.parent.order() % h.elements.len() != 0 {
            return Err(Error::Internal("subgroup order does not divide the group order".into()));
        }
        Ok(h)
    }

    pub(crate) fn from_sorted_unchecked(parent: GroupRef, elements: Vec<Elem>) -> Subgroup {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(parent.order() % elements.len(), 0, "Lagrange violated");
        Subgroup { parent, elements }
    }

    pub fn trivial(parent: GroupRef) -> Subgroup {
        Subgroup { parent, elements: vec![IDENTITY] }
    }

    pub fn full(parent: GroupRef) -> Subgroup {
        let elements = parent.elements().collect();
        Subgroup { parent, elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn set_eq(&self, other: &Subgroup) -> bool {
        self.elements == other.elements
    }

    /// Greedy small generating set for the subgroup.
    pub fn generating_set(&self) -> Vec<Elem> {
        let mut gens: Vec<Elem> = Vec::new();
        let mut closed = vec![IDENTITY];
        while closed.len() < self.elements.len() {
            let next = self
                .elements
                .iter()
                .copied()
                .find(|e| closed.binary_search(e).is_err())
                .expect("incomplete closure with no missing element");
            gens.push(next);
            closed = closure(&self.parent, &gens);
        }
        if gens.is_empty() {
            gens.push(IDENTITY);
        }
        gens
    }
}

/// Closure of a seed set under multiplication (inverses come for free in a
/// finite group). Returns the sorted element list.
fn closure(g: &GroupTable, seeds: &[Elem]) -> Vec<Elem> {
    let mut seen: HashSet<Elem> = HashSet::with_capacity(seeds.len() * 4 + 1);
    seen.insert(IDENTITY);
    let mut frontier: Vec<Elem> = vec![IDENTITY];
    let gens: Vec<Elem> = seeds.iter().copied().filter(|&s| s != IDENTITY).collect();
    while let Some(x) = frontier.pop() {
        for &s in &gens {
            let y = g.mul(x, s);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    let mut out: Vec<Elem> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Smallest subgroup containing the seed elements.
pub fn subgroup_generated(parent: &GroupRef, seeds: &[Elem]) -> Subgroup {
    Subgroup::from_sorted_unchecked(parent.clone(), closure(parent, seeds))
}

/// Closure of the seeds under multiplication and conjugation by the parent's
/// generators: the normal closure of `<seeds>`.
pub fn normal_closure(parent: &GroupRef, seeds: &[Elem]) -> Subgroup {
    let mut seen: HashSet<Elem> = HashSet::new();
    seen.insert(IDENTITY);
    let mut frontier: Vec<Elem> = vec![IDENTITY];
    let mut gens: Vec<Elem> = seeds.iter().copied().filter(|&s| s != IDENTITY).collect();
    gens.sort_unstable();
    gens.dedup();
    let conj: Vec<Elem> = parent.generators().to_vec();
    while let Some(x) = frontier.pop() {
        for &s in &gens {
            let y = parent.mul(x, s);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
        for &c in &conj {
            let y = parent.conjugate(c, x);
            if seen.insert(y) {
                frontier.push(y);
            }
            let y = parent.conjugate(parent.inv(c), x);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    let mut out: Vec<Elem> = seen.into_iter().collect();
    out.sort_unstable();
    Subgroup::from_sorted_unchecked(parent.clone(), out)
}

const ALL_PAIRS_LIMIT: usize = 4_000_000;

/// Subgroup generated by `{ [a, b] : a in A, b in B }` over all element pairs.
/// Above the all-pairs budget the same subgroup is computed from generator
/// commutators closed under conjugation by `<A, B>`.
pub fn commutator_subgroup(g: &GroupRef, a: &Subgroup, b: &Subgroup) -> Subgroup {
    if a.order() * b.order() <= ALL_PAIRS_LIMIT {
        let mut seeds: HashSet<Elem> = HashSet::new();
        for &x in a.elements() {
            for &y in b.elements() {
                seeds.insert(g.commutator(x, y));
            }
        }
        let seeds: Vec<Elem> = {
            let mut v: Vec<Elem> = seeds.into_iter().collect();
            v.sort_unstable();
            v
        };
        subgroup_generated(g, &seeds)
    } else {
        let ga = a.generating_set();
        let gb = b.generating_set();
        let mut seeds = Vec::new();
        for &x in &ga {
            for &y in &gb {
                seeds.push(g.commutator(x, y));
            }
        }
        // close under conjugation by the join's generators
        let mut seen: HashSet<Elem> = HashSet::new();
        seen.insert(IDENTITY);
        let mut frontier = vec![IDENTITY];
        seeds.retain(|&s| s != IDENTITY);
        let conj: Vec<Elem> = ga.iter().chain(gb.iter()).copied().collect();
        while let Some(x) = frontier.pop() {
            for &s in &seeds {
                let y = g.mul(x, s);
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
            for &c in &conj {
                for z in [g.conjugate(c, x), g.conjugate(g.inv(c), x)] {
                    if seen.insert(z) {
                        frontier.push(z);
                    }
                }
            }
        }
        let mut out: Vec<Elem> = seen.into_iter().collect();
        out.sort_unstable();
        Subgroup::from_sorted_unchecked(g.clone(), out)
    }
}

pub fn derived_subgroup(g: &GroupRef) -> Subgroup {
    if g.order() * g.order() <= ALL_PAIRS_LIMIT {
        let full = Subgroup::full(g.clone());
        commutator_subgroup(g, &full, &full)
    } else {
        let gens = g.generators().to_vec();
        let mut seeds = Vec::new();
        for &x in &gens {
            for &y in &gens {
                seeds.push(g.commutator(x, y));
            }
        }
        normal_closure(g, &seeds)
    }
}

/// `G = G^(0) >= G^(1) >= ...` until stabilization; the stable term appears
/// once at the end.
pub fn derived_series(g: &GroupRef) -> Vec<Subgroup> {
    let mut out = vec![Subgroup::full(g.clone())];
    loop {
        let last = out.last().unwrap();
        let next = if out.len() == 1 {
            derived_subgroup(g)
        } else {
            commutator_subgroup(g, last, last)
        };
        if next.order() == last.order() {
            break;
        }
        out.push(next);
    }
    out
}

pub fn lower_central_series(g: &GroupRef) -> Vec<Subgroup> {
    let full = Subgroup::full(g.clone());
    let mut out = vec![full.clone()];
    loop {
        let last = out.last().unwrap();
        let next = commutator_subgroup(g, last, &full);
        if next.order() == last.order() {
            break;
        }
        out.push(next);
    }
    out
}

/// Fastest descending central series with exponent-p factors:
/// `L_1 = G`, `L_{k+1} = [L_k, G] L_k^p`. Each factor is checked to be
/// elementary abelian.
pub fn lower_central_p_series(g: &GroupRef, p: u64) -> Result<Vec<Subgroup>> {
    match g.p_group_prime() {
        Some(q) if q == p => {}
        _ if g.order() == 1 => {}
        _ => return Err(Error::NotAPGroup { order: g.order() as u64 }),
    }
    let full = Subgroup::full(g.clone());
    let mut out = vec![full.clone()];
    loop {
        let last = out.last().unwrap();
        let comm = commutator_subgroup(g, last, &full);
        let mut seeds: Vec<Elem> = comm.elements().to_vec();
        seeds.extend(last.elements().iter().map(|&x| g.pow(x, p as i64)));
        let next = subgroup_generated(g, &seeds);
        // factor must be elementary abelian: p-th powers and commutators of
        // the previous term land in the new term
        for &x in last.elements() {
            debug_assert!(next.contains(g.pow(x, p as i64)));
        }
        let factor_ok = last.elements().iter().all(|&x| {
            next.contains(g.pow(x, p as i64))
        }) && comm.elements().iter().all(|&c| next.contains(c));
        if !factor_ok {
            return Err(Error::Internal("lower central p-series factor is not elementary abelian".into()));
        }
        if next.order() == last.order() {
            if next.order() != 1 {
                return Err(Error::Internal("lower central p-series stalled above the identity".into()));
            }
            break;
        }
        out.push(next);
        if out.last().unwrap().order() == 1 {
            break;
        }
    }
    Ok(out)
}

/// Minimum size of a generating set of a p-group: the rank of the elementary
/// abelian quotient `G / L_2(G)`.
pub fn minimal_generator_count(g: &GroupRef) -> Result<usize> {
    if g.order() == 1 {
        return Ok(0);
    }
    let p = g.p_group_prime().ok_or(Error::NotAPGroup { order: g.order() as u64 })?;
    let series = lower_central_p_series(g, p)?;
    let index = (g.order() / series.get(1).map_or(1, |s| s.order())) as u64;
    let mut d = 0u32;
    let mut x = index;
    while x > 1 {
        assert_eq!(x % p, 0);
        x /= p;
        d += 1;
    }
    Ok(d as usize)
}

pub fn center(g: &GroupRef) -> Subgroup {
    let gens = g.generators();
    let els: Vec<Elem> = g
        .elements()
        .filter(|&z| gens.iter().all(|&a| g.mul(z, a) == g.mul(a, z)))
        .collect();
    Subgroup::from_sorted_unchecked(g.clone(), els)
}

/// `None` when normal; otherwise a witness `(conjugator, element)`.
pub fn normality_witness(g: &GroupRef, h: &Subgroup) -> Option<(Elem, Elem)> {
    for &c in g.generators() {
        for &x in h.elements() {
            if !h.contains(g.conjugate(c, x)) {
                return Some((c, x));
            }
            let ci = g.inv(c);
            if !h.contains(g.conjugate(ci, x)) {
                return Some((ci, x));
            }
        }
    }
    None
}

/// Quotient by a verified-normal subgroup, with the canonical projection.
/// Cosets are numbered by their smallest member, so the identity coset is 0.
pub fn quotient_group(g: &GroupRef, n: &Subgroup) -> Result<(GroupRef, Homomorphism)> {
    if let Some((conjugator, element)) = normality_witness(g, n) {
        return Err(Error::NotNormal { conjugator, element });
    }
    let order = g.order();
    let mut coset_of = vec![u32::MAX; order];
    let mut reps: Vec<Elem> = Vec::new();
    for x in 0..order as u32 {
        if coset_of[x as usize] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(x);
        for &h in n.elements() {
            coset_of[g.mul(x, h) as usize] = id;
        }
    }
    let q = reps.len();
    let mut mul = vec![0u32; q * q];
    for i in 0..q {
        for j in 0..q {
            mul[i * q + j] = coset_of[g.mul(reps[i], reps[j]) as usize];
        }
    }
    let quotient = GroupTable::from_dense_parts(format!("{}/N{}", g.name(), n.order()), q, mul, None);
    let projection = Homomorphism::verified(g.clone(), quotient.clone(), coset_of)?;
    Ok((quotient, projection))
}

/// Searches for a complement to the normal subgroup `n`: a subgroup meeting
/// `n` trivially with complementary order. Candidates are closures of up to
/// three elements, which covers every group at the scale this library targets.
pub fn find_complement(g: &GroupRef, n: &Subgroup) -> Option<Subgroup> {
    let target = g.order() / n.order();
    if target == 1 {
        return Some(Subgroup::trivial(g.clone()));
    }
    let candidates: Vec<Elem> = g
        .elements()
        .filter(|&e| e != IDENTITY && !n.contains(e) && target as u64 % g.elem_order(e) == 0)
        .collect();
    let check = |seeds: &[Elem]| -> Option<Subgroup> {
        let h = subgroup_generated(g, seeds);
        if h.order() == target && h.elements().iter().filter(|&&x| n.contains(x)).count() == 1 {
            Some(h)
        } else {
            None
        }
    };
    for (i, &a) in candidates.iter().enumerate() {
        if let Some(h) = check(&[a]) {
            return Some(h);
        }
        for (j, &b) in candidates.iter().enumerate().skip(i + 1) {
            if let Some(h) = check(&[a, b]) {
                return Some(h);
            }
            for &c in candidates.iter().skip(j + 1) {
                if let Some(h) = check(&[a, b, c]) {
                    return Some(h);
                }
            }
        }
    }
    None
}

/// Materializes a subgroup as its own dense group table, remembering the
/// embedding back into the parent.
#[derive(Debug, Clone)]
pub struct MaterializedSubgroup {
    pub group: GroupRef,
    pub to_parent: Vec<Elem>,
}

impl MaterializedSubgroup {
    pub fn new(sub: &Subgroup, name: impl Into<String>) -> MaterializedSubgroup {
        let els = sub.elements();
        let n = els.len();
        assert!(n <= DENSE_THRESHOLD, "subgroup too large to materialize densely ({n})");
        let index_of = |e: Elem| -> u32 { els.binary_search(&e).expect("closure escaped subgroup") as u32 };
        let mut mul = vec![0u32; n * n];
        let parent = &sub.parent;
        for (i, &a) in els.iter().enumerate() {
            for (j, &b) in els.iter().enumerate() {
                mul[i * n + j] = index_of(parent.mul(a, b));
            }
        }
        let group = GroupTable::from_dense_parts(name, n, mul, None);
        MaterializedSubgroup { group, to_parent: els.to_vec() }
    }

    pub fn parent_index(&self, local: Elem) -> Elem {
        self.to_parent[local as usize]
    }

    pub fn local_index(&self, parent_elem: Elem) -> Option<Elem> {
        self.to_parent.binary_search(&parent_elem).ok().map(|i| i as u32)
    }

    /// Pulls a set of parent elements down to local indices; all must belong.
    pub fn pull_subgroup(&self, parent_elems: &[Elem]) -> Subgroup {
        let els: Vec<Elem> = parent_elems
            .iter()
            .map(|&e| self.local_index(e).expect("element outside the materialized subgroup"))
            .collect();
        Subgroup::from_sorted_unchecked(self.group.clone(), els)
    }

    /// Pushes a local subgroup up to parent element indices (sorted).
    pub fn push_elements(&self, local: &Subgroup) -> Vec<Elem> {
        let mut v: Vec<Elem> = local.elements().iter().map(|&e| self.parent_index(e)).collect();
        v.sort_unstable();
        v
    }
}

// ---------------------------------------------------------------------------
// Homomorphisms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Homomorphism {
    pub source: GroupRef,
    pub target: GroupRef,
    image: Vec<Elem>,
}

const HOM_EXHAUSTIVE_LIMIT: usize = 4096;

impl Homomorphism {
    /// Wraps a total map after verifying multiplicativity: exhaustively up to
    /// 4096 source elements, on seeded samples above.
    pub fn verified(source: GroupRef, target: GroupRef, image: Vec<Elem>) -> Result<Homomorphism> {
        assert_eq!(image.len(), source.order());
        if image[IDENTITY as usize] != IDENTITY {
            return Err(Error::NotAHomomorphism(IDENTITY, IDENTITY));
        }
        let n = source.order();
        if n <= HOM_EXHAUSTIVE_LIMIT {
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    if image[source.mul(a, b) as usize]
                        != target.mul(image[a as usize], image[b as usize])
                    {
                        return Err(Error::NotAHomomorphism(a, b));
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x40b);
            for _ in 0..100_000 {
                let a = rng.gen_range(0..n as u32);
                let b = rng.gen_range(0..n as u32);
                if image[source.mul(a, b) as usize]
                    != target.mul(image[a as usize], image[b as usize])
                {
                    return Err(Error::NotAHomomorphism(a, b));
                }
            }
        }
        Ok(Homomorphism { source, target, image })
    }

    pub fn apply(&self, e: Elem) -> Elem {
        self.image[e as usize]
    }

    pub fn image_map(&self) -> &[Elem] {
        &self.image
    }

    pub fn kernel(&self) -> Subgroup {
        let els: Vec<Elem> = self
            .source
            .elements()
            .filter(|&e| self.image[e as usize] == IDENTITY)
            .collect();
        Subgroup::from_sorted_unchecked(self.source.clone(), els)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }
}

/// Extends generator images to a total map by walking the Cayley graph of the
/// source, then verifies the result.
pub fn hom_from_generator_images(
    source: &GroupRef,
    target: &GroupRef,
    images: &[Elem],
) -> Result<Homomorphism> {
    let gens = source.generators();
    if gens.len() != images.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} generator images, got {}",
            gens.len(),
            images.len()
        )));
    }
    let n = source.order();
    let mut image = vec![u32::MAX; n];
    image[IDENTITY as usize] = IDENTITY;
    let mut queue = std::collections::VecDeque::from([IDENTITY]);
    while let Some(x) = queue.pop_front() {
        for (i, &t) in gens.iter().enumerate() {
            let y = source.mul(x, t);
            if image[y as usize] == u32::MAX {
                image[y as usize] = target.mul(image[x as usize], images[i]);
                queue.push_back(y);
            }
        }
    }
    if image.iter().any(|&v| v == u32::MAX) {
        return Err(Error::Internal("declared generators do not generate the source".into()));
    }
    Homomorphism::verified(source.clone(), target.clone(), image)
}

// ---------------------------------------------------------------------------
// Fingerprints
// ---------------------------------------------------------------------------

/// Isomorphism-type evidence for a finite group. Equal fingerprints are this
/// library's working notion of isomorphism; they are not a complete invariant
/// in general, but suffice at the scale of the built-in catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: u64,
    pub abelianization: AbelianType,
    pub derived_orders: Vec<u64>,
    pub lower_central_orders: Vec<u64>,
    pub exponent: u64,
    pub center_order: u64,
    pub element_order_histogram: BTreeMap<u64, u64>,
}

pub fn fingerprint(g: &GroupRef) -> Fingerprint {
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for e in g.elements() {
        *histogram.entry(g.elem_order(e)).or_insert(0) += 1;
    }
    let exponent = histogram.keys().fold(1u64, |acc, &k| num_integer::lcm(acc, k));
    let derived = derived_series(g);
    let lcs = lower_central_series(g);
    let dsub = &derived[derived.len().min(2) - 1];
    let abelianization = if derived.len() == 1 {
        // perfect or trivial group; abelianization is trivial
        if g.order() == 1 {
            AbelianType::trivial()
        } else {
            let (q, _) = quotient_group(g, dsub).expect("derived subgroup is normal");
            abelian_type_of(&q).expect("abelianization is abelian")
        }
    } else {
        let (q, _) = quotient_group(g, &derived[1]).expect("derived subgroup is normal");
        abelian_type_of(&q).expect("abelianization is abelian")
    };
    Fingerprint {
        order: g.order() as u64,
        abelianization,
        derived_orders: derived.iter().map(|s| s.order() as u64).collect(),
        lower_central_orders: lcs.iter().map(|s| s.order() as u64).collect(),
        exponent,
        center_order: center(g).order() as u64,
        element_order_histogram: histogram,
    }
}

/// Isomorphism type of an abelian group table, recovered from element-order
/// counts: for each prime, the count of solutions of `x^(p^j) = 1` determines
/// the multiset of p-power factors.
pub fn abelian_type_of(g: &GroupRef) -> Result<AbelianType> {
    if !g.is_abelian() {
        return Err(Error::Internal(format!("{} is not abelian", g.name())));
    }
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for e in g.elements() {
        *histogram.entry(g.elem_order(e)).or_insert(0) += 1;
    }
    let v_p = |p: u64, mut x: u64| -> u32 {
        let mut k = 0;
        while x % p == 0 {
            x /= p;
            k += 1;
        }
        k
    };
    let mut prime_powers: Vec<u64> = Vec::new();
    for (p, _) in factorize(g.order() as u64) {
        let emax = histogram.keys().map(|&k| v_p(p, k)).max().unwrap_or(0);
        // count elements of pure p-power order dividing p^j
        let count_dividing = |j: u32| -> u64 {
            (0..=j).map(|i| histogram.get(&p.pow(i)).copied().unwrap_or(0)).sum()
        };
        let log_p = |mut x: u64| -> u32 {
            let mut k = 0;
            while x > 1 {
                assert_eq!(x % p, 0, "p-part count is not a power of p");
                x /= p;
                k += 1;
            }
            k
        };
        // counts_ge[j-1] = number of cyclic p-factors with exponent >= j
        let mut counts_ge: Vec<u32> = Vec::new();
        let mut prev = 0u32;
        for j in 1..=emax {
            let cur = log_p(count_dividing(j));
            counts_ge.push(cur - prev);
            prev = cur;
        }
        for j in 1..=counts_ge.len() {
            let here = counts_ge[j - 1];
            let next = counts_ge.get(j).copied().unwrap_or(0);
            for _ in 0..(here - next) {
                prime_powers.push(p.pow(j as u32));
            }
        }
    }
    Ok(AbelianType::from_cyclic_factors(0, prime_powers))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Closure of permutation generators into a multiplication table; the
    /// independent construction the table-based operations are tested against.
    pub(crate) fn perm_group(name: &str, degree: usize, gens: &[Vec<u32>]) -> GroupRef {
        let id: Vec<u32> = (0..degree as u32).collect();
        let compose = |a: &Vec<u32>, b: &Vec<u32>| -> Vec<u32> {
            // (a then b) as a right action: (x)(ab) = ((x)a)b
            a.iter().map(|&x| b[x as usize]).collect()
        };
        let mut elems: Vec<Vec<u32>> = vec![id.clone()];
        let mut seen: std::collections::HashSet<Vec<u32>> = elems.iter().cloned().collect();
        let mut frontier = vec![id];
        while let Some(p) = frontier.pop() {
            for g in gens {
                let q = compose(&p, g);
                if seen.insert(q.clone()) {
                    elems.push(q.clone());
                    frontier.push(q);
                }
            }
        }
        elems.sort();
        let n = elems.len();
        let index = |p: &Vec<u32>| elems.binary_search(p).unwrap() as u32;
        let mut mul: Vec<Vec<u32>> = vec![vec![0; n]; n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                mul[i][j] = index(&compose(a, b));
            }
        }
        let g = GroupTable::from_mul_table(name, &mul).unwrap();
        g
    }

    pub(crate) fn s3() -> GroupRef {
        perm_group("s3", 3, &[vec![1, 2, 0], vec![1, 0, 2]])
    }

    pub(crate) fn d4() -> GroupRef {
        // rotation (0123) and a reflection
        perm_group("d4", 4, &[vec![1, 2, 3, 0], vec![3, 2, 1, 0]])
    }

    #[test]
    fn trivial_group() {
        let g = GroupTable::from_mul_table("t", &[vec![0]]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.generators(), &[0]);
    }

    #[test]
    fn cyclic_four_has_one_generator() {
        // feed the raw addition table through the validating constructor
        let mut rows = vec![vec![0u32; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rows[i][j] = ((i + j) % 4) as u32;
            }
        }
        let g = GroupTable::from_mul_table("z4", &rows).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.generators().len(), 1);
    }

    #[test]
    fn identity_relocation() {
        // Z_3 with the identity placed at index 2
        let rows = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let g = GroupTable::from_mul_table("z3-shifted", &rows).unwrap();
        assert_eq!(g.mul(0, 1), 1);
        assert_eq!(g.mul(1, 1), 2);
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // start from Z_6 and swap two non-identity entries in one row
        let mut rows = vec![vec![0u32; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                rows[i][j] = ((i + j) % 6) as u32;
            }
        }
        rows[2].swap(1, 3);
        let err = GroupTable::from_mul_table("broken", &rows).unwrap_err();
        match err {
            Error::NotAGroup { witness, .. } => assert!(witness.is_some()),
            other => panic!("expected NotAGroup, got {other:?}"),
        }
    }

    #[test]
    fn subgroup_closure_oracle() {
        let g = s3();
        assert_eq!(subgroup_generated(&g, &[]).order(), 1);
        let three_cycle = g.elements().find(|&e| g.elem_order(e) == 3).unwrap();
        assert_eq!(subgroup_generated(&g, &[three_cycle]).order(), 3);
        let gens: Vec<Elem> = g.generators().to_vec();
        assert_eq!(subgroup_generated(&g, &gens).order(), 6);
    }

    #[test]
    fn commutator_subgroups() {
        let z6 = GroupTable::cyclic(6);
        let full = Subgroup::full(z6.clone());
        assert_eq!(commutator_subgroup(&z6, &full, &full).order(), 1);

        let g = s3();
        let full = Subgroup::full(g.clone());
        assert_eq!(commutator_subgroup(&g, &full, &full).order(), 3);

        let g = d4();
        let full = Subgroup::full(g.clone());
        assert_eq!(commutator_subgroup(&g, &full, &full).order(), 2);
    }

    #[test]
    fn series_examples() {
        let z6 = GroupTable::cyclic(6);
        let ds: Vec<usize> = derived_series(&z6).iter().map(|s| s.order()).collect();
        assert_eq!(ds, vec![6, 1]);

        let ds: Vec<usize> = derived_series(&s3()).iter().map(|s| s.order()).collect();
        assert_eq!(ds, vec![6, 3, 1]);

        let lcs: Vec<usize> = lower_central_series(&d4()).iter().map(|s| s.order()).collect();
        assert_eq!(lcs, vec![8, 2, 1]);

        // S3 is not nilpotent: the lower central series stalls at A3
        let lcs: Vec<usize> = lower_central_series(&s3()).iter().map(|s| s.order()).collect();
        assert_eq!(lcs, vec![6, 3]);

        // second derived term agrees with the all-pairs commutator subgroup
        let g = d4();
        let ds = derived_series(&g);
        let full = Subgroup::full(g.clone());
        assert!(commutator_subgroup(&g, &full, &full).set_eq(&ds[1]));
    }

    #[test]
    fn p_series_examples() {
        let z2xz2 = GroupTable::direct_product(&GroupTable::cyclic(2), &GroupTable::cyclic(2));
        let s: Vec<usize> = lower_central_p_series(&z2xz2, 2).unwrap().iter().map(|s| s.order()).collect();
        assert_eq!(s, vec![4, 1]);

        let z4 = GroupTable::cyclic(4);
        let s: Vec<usize> = lower_central_p_series(&z4, 2).unwrap().iter().map(|s| s.order()).collect();
        assert_eq!(s, vec![4, 2, 1]);

        let s: Vec<usize> = lower_central_p_series(&d4(), 2).unwrap().iter().map(|s| s.order()).collect();
        assert_eq!(s, vec![8, 2, 1]);

        assert!(matches!(lower_central_p_series(&GroupTable::cyclic(6), 2), Err(Error::NotAPGroup { .. })));

        // the p-series descends at least as fast as the lower central series
        // and the p-power series
        let g = d4();
        let lambda = lower_central_p_series(&g, 2).unwrap();
        let gamma = lower_central_series(&g);
        for (k, gk) in gamma.iter().enumerate() {
            if k < lambda.len() {
                for &x in gk.elements() {
                    assert!(lambda[k].contains(x));
                }
            }
        }
        let mut powers: Vec<Elem> = g.elements().collect();
        for (k, lk) in lambda.iter().enumerate() {
            let closed = subgroup_generated(&g, &powers);
            for &x in closed.elements() {
                assert!(lk.contains(x), "p-power closure escapes lambda_{}", k + 1);
            }
            powers = powers.iter().map(|&x| g.pow(x, 2)).collect();
        }
    }

    #[test]
    fn center_and_quotients() {
        assert_eq!(center(&s3()).order(), 1);

        let z4 = GroupTable::cyclic(4);
        let n = subgroup_generated(&z4, &[2]);
        let (q, proj) = quotient_group(&z4, &n).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(proj.kernel().order(), 2);

        let g = d4();
        let (q, _) = quotient_group(&g, &center(&g)).unwrap();
        assert_eq!(q.order(), 4);
        assert_eq!(q.exponent(), 2);

        // a non-normal subgroup is rejected with a witness
        let g = s3();
        let t = g.elements().find(|&e| g.elem_order(e) == 2).unwrap();
        let h = subgroup_generated(&g, &[t]);
        match quotient_group(&g, &h) {
            Err(Error::NotNormal { conjugator, element }) => {
                assert!(!h.contains(g.conjugate(conjugator, element)));
            }
            other => panic!("expected NotNormal, got {other:?}"),
        }
    }

    #[test]
    fn minimal_generator_counts() {
        let z2 = GroupTable::cyclic(2);
        let e8 = GroupTable::direct_product(&GroupTable::direct_product(&z2, &z2), &z2);
        assert_eq!(minimal_generator_count(&e8).unwrap(), 3);
        assert_eq!(minimal_generator_count(&GroupTable::cyclic(8)).unwrap(), 1);
        assert_eq!(minimal_generator_count(&d4()).unwrap(), 2);
    }

    #[test]
    fn fingerprints_and_homs() {
        let z6 = GroupTable::cyclic(6);
        let fp = fingerprint(&z6);
        assert_eq!(fp.exponent, 6);
        assert_eq!(fp.abelianization, AbelianType::cyclic(6));

        let z4 = GroupTable::cyclic(4);
        let z2 = GroupTable::cyclic(2);
        let h = hom_from_generator_images(&z4, &z2, &[1]).unwrap();
        assert_eq!(h.kernel().order(), 2);

        let z3 = GroupTable::cyclic(3);
        assert!(matches!(
            hom_from_generator_images(&z4, &z3, &[1]),
            Err(Error::NotAHomomorphism(..))
        ));
    }

    #[test]
    fn abelian_type_recovery() {
        let z2 = GroupTable::cyclic(2);
        let z4 = GroupTable::cyclic(4);
        let g = GroupTable::direct_product(&z2, &z4);
        assert_eq!(abelian_type_of(&g).unwrap(), AbelianType::from_cyclic_factors(0, [2, 4]));
        let g = GroupTable::direct_product(&z4, &GroupTable::cyclic(6));
        assert_eq!(abelian_type_of(&g).unwrap(), AbelianType::from_cyclic_factors(0, [2, 12]));
    }

    #[test]
    fn complement_search() {
        let g = s3();
        let a3 = derived_subgroup(&g);
        let c = find_complement(&g, &a3).unwrap();
        assert_eq!(c.order(), 2);

        let g = d4();
        let gp = derived_subgroup(&g);
        assert!(find_complement(&g, &gp).is_none());
    }

    #[test]
    fn lagrange_holds_for_generated_subgroups() {
        let g = d4();
        for a in g.elements() {
            for b in g.elements() {
                let h = subgroup_generated(&g, &[a, b]);
                assert_eq!(g.order() % h.order(), 0);
            }
        }
    }

    #[test]
    fn materialized_subgroup_roundtrip() {
        let g = d4();
        let z = center(&g);
        let m = MaterializedSubgroup::new(&z, "Z(d4)");
        assert_eq!(m.group.order(), 2);
        assert_eq!(m.parent_index(0), 0);
        let back = m.push_elements(&Subgroup::full(m.group.clone()));
        assert_eq!(back, z.elements());
    }
}
