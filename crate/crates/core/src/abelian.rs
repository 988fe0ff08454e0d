//! Finitely generated abelian groups: Smith normal form, invariant factors,
//! tensor products, the Whitehead quadratic functor, and the diagonal/complement
//! decomposition of `A (x) A`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Isomorphism type of a finitely generated abelian group: a free rank plus
/// invariant factors `d_1 | d_2 | ... | d_k`, all `>= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianType {
    pub free_rank: usize,
    #[serde(rename = "factors")]
    pub invariant_factors: Vec<u64>,
}

impl AbelianType {
    pub fn trivial() -> Self {
        AbelianType { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        AbelianType { free_rank: rank, invariant_factors: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_cyclic_factors(0, [n])
    }

    /// Canonicalizes an arbitrary list of cyclic orders into invariant-factor
    /// form. Factors equal to 1 are dropped.
    pub fn from_cyclic_factors(free_rank: usize, factors: impl IntoIterator<Item = u64>) -> Self {
        // Split every factor into prime powers, then rebuild the divisor chain
        // by aligning, per prime, the largest powers into the largest factor.
        let mut per_prime: std::collections::BTreeMap<u64, Vec<u32>> = Default::default();
        for f in factors {
            assert!(f != 0, "cyclic factor 0 is not a finite group order");
            for (p, e) in factorize(f) {
                per_prime.entry(p).or_default().push(e);
            }
        }
        let max_len = per_prime.values().map(|v| v.len()).max().unwrap_or(0);
        let mut chain = vec![1u64; max_len];
        for (p, mut exps) in per_prime {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (i, e) in exps.into_iter().enumerate() {
                // largest power goes into the last (largest) invariant factor
                let slot = max_len - 1 - i;
                chain[slot] = chain[slot].checked_mul(p.pow(e)).expect("invariant factor overflow");
            }
        }
        chain.retain(|&d| d > 1);
        AbelianType { free_rank, invariant_factors: chain }
    }

    /// Order of the group, when finite.
    pub fn order(&self) -> Option<u128> {
        if self.free_rank > 0 {
            return None;
        }
        let mut o: u128 = 1;
        for &d in &self.invariant_factors {
            o = o.checked_mul(d as u128).expect("order overflow");
        }
        Some(o)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Canonical cyclic decomposition: `None` stands for an infinite cyclic
    /// factor.
    pub fn cyclic_factors(&self) -> Vec<Option<u64>> {
        let mut fs: Vec<Option<u64>> = vec![None; self.free_rank];
        fs.extend(self.invariant_factors.iter().map(|&d| Some(d)));
        fs
    }

    pub fn direct_sum(&self, other: &AbelianType) -> AbelianType {
        AbelianType::from_cyclic_factors(
            self.free_rank + other.free_rank,
            self.invariant_factors.iter().chain(other.invariant_factors.iter()).copied(),
        )
    }

    /// Number of invariant factors divisible by `p` (the p-rank of `A/A^p`).
    pub fn rank_at(&self, p: u64) -> usize {
        self.free_rank + self.invariant_factors.iter().filter(|&&d| d % p == 0).count()
    }

    /// True when the group is elementary abelian for the prime `p`
    /// (the trivial group counts).
    pub fn is_elementary_abelian(&self, p: u64) -> bool {
        self.free_rank == 0 && self.invariant_factors.iter().all(|&d| d == p)
    }

    pub fn exponent(&self) -> Option<u64> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.invariant_factors.last().copied().unwrap_or(1))
        }
    }

    /// Odd part: each factor replaced by its largest odd divisor.
    pub fn odd_part(&self) -> AbelianType {
        AbelianType::from_cyclic_factors(
            self.free_rank,
            self.invariant_factors.iter().map(|&d| {
                let mut d = d;
                while d % 2 == 0 {
                    d /= 2;
                }
                d
            }),
        )
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        for &d in &self.invariant_factors {
            parts.push(format!("Z{d}"));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" x ")
        }
    }
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

// ---------------------------------------------------------------------------
// Integer matrices and Smith normal form
// ---------------------------------------------------------------------------

/// Dense integer matrix. Entries are `i128` and every arithmetic step is
/// checked; overflow aborts instead of wrapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i128>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.checked_mul(other[(k, j)]).expect("integer overflow in matrix product");
                    out[(i, j)] = out[(i, j)].checked_add(prod).expect("integer overflow in matrix product");
                }
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i128 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut m = self.clone();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if m[(k, k)] == 0 {
                let swap = (k + 1..n).find(|&i| m[(i, k)] != 0);
                match swap {
                    Some(i) => {
                        for j in 0..n {
                            let tmp = m[(k, j)];
                            m[(k, j)] = m[(i, j)];
                            m[(i, j)] = tmp;
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[(k, k)]
                        .checked_mul(m[(i, j)])
                        .and_then(|x| {
                            m[(i, k)].checked_mul(m[(k, j)]).and_then(|y| x.checked_sub(y))
                        })
                        .expect("integer overflow in determinant");
                    m[(i, j)] = num / prev;
                }
            }
            prev = m[(k, k)];
        }
        sign * m[(n - 1, n - 1)]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] += q * row[b]
    fn add_row(&mut self, a: usize, b: usize, q: i128) {
        for j in 0..self.cols {
            let add = q.checked_mul(self[(b, j)]).expect("integer overflow in row operation");
            self[(a, j)] = self[(a, j)].checked_add(add).expect("integer overflow in row operation");
        }
    }

    /// col[a] += q * col[b]
    fn add_col(&mut self, a: usize, b: usize, q: i128) {
        for i in 0..self.rows {
            let add = q.checked_mul(self[(i, b)]).expect("integer overflow in column operation");
            self[(i, a)] = self[(i, a)].checked_add(add).expect("integer overflow in column operation");
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            self[(a, j)] = -self[(a, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form `S = U * M * V` with unimodular `U`, `V`, nonnegative
/// diagonal and `d_1 | d_2 | ...`.
pub struct Snf {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);

    for t in 0..n {
        'place: loop {
            // smallest-magnitude nonzero pivot in the trailing submatrix
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..s.rows {
                for j in t..s.cols {
                    if s[(i, j)] != 0
                        && pivot.map_or(true, |(pi, pj)| s[(i, j)].abs() < s[(pi, pj)].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break 'place };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..s.rows {
                if s[(i, t)] != 0 {
                    let q = div_round(s[(i, t)], s[(t, t)]);
                    s.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                    if s[(i, t)] != 0 {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..s.cols {
                if s[(t, j)] != 0 {
                    let q = div_round(s[(t, j)], s[(t, t)]);
                    s.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                    if s[(t, j)] != 0 {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'place;
            }
            // force divisibility of the rest of the submatrix by the pivot
            let d = s[(t, t)];
            let offender = (t + 1..s.rows)
                .flat_map(|i| (t + 1..s.cols).map(move |j| (i, j)))
                .find(|&(i, j)| s[(i, j)] % d != 0);
            match offender {
                Some((i, _)) => {
                    s.add_row(t, i, 1);
                    u.add_row(t, i, 1);
                }
                None => break 'place,
            }
        }
        if s[(t, t)] < 0 {
            s.negate_row(t);
            u.negate_row(t);
        }
    }

    // verification: the factorization and unimodularity are part of the contract
    debug_assert_eq!(u.mul(m).mul(&v), s, "SNF factorization failed");
    let (du, dv) = (u.det().abs(), v.det().abs());
    assert!(du == 1 && dv == 1, "SNF transforms are not unimodular (|det| = {du}, {dv})");
    for t in 1..n {
        let (a, b) = (s[(t - 1, t - 1)], s[(t, t)]);
        assert!(b == 0 || (a != 0 && b % a == 0), "SNF divisibility chain broken");
    }
    Snf { s, u, v }
}

/// Rounded division used to shrink remainders fast.
fn div_round(a: i128, b: i128) -> i128 {
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + r.signum() * b.signum()
    } else {
        q
    }
}

/// Type of `Z^g` modulo the row space of `relations` (columns index the
/// generators).
pub fn abelian_invariants(relations: &IntMatrix) -> AbelianType {
    let g = relations.cols;
    let snf = smith_normal_form(relations);
    let mut factors = Vec::new();
    let mut nonzero = 0;
    for t in 0..relations.rows.min(g) {
        let d = snf.s[(t, t)];
        if d != 0 {
            nonzero += 1;
            if d > 1 {
                factors.push(d as u64);
            }
        }
    }
    AbelianType { free_rank: g - nonzero, invariant_factors: factors }
}

// ---------------------------------------------------------------------------
// Tensor products, Whitehead functor, diagonal decomposition
// ---------------------------------------------------------------------------

/// Tensor product of two cyclic factors (`None` = infinite cyclic).
fn tensor_cyclic(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(m), Some(n)) => Some(num_integer::gcd(m, n)),
    }
}

fn assemble(parts: impl IntoIterator<Item = Option<u64>>) -> AbelianType {
    let mut free = 0usize;
    let mut torsion = Vec::new();
    for p in parts {
        match p {
            None => free += 1,
            Some(d) => torsion.push(d),
        }
    }
    AbelianType::from_cyclic_factors(free, torsion)
}

/// Ordinary tensor product `A (x) B` over the integers.
pub fn tensor_abelian(a: &AbelianType, b: &AbelianType) -> AbelianType {
    let fa = a.cyclic_factors();
    let fb = b.cyclic_factors();
    assemble(fa.iter().flat_map(|&x| fb.iter().map(move |&y| tensor_cyclic(x, y))))
}

/// Whitehead's quadratic functor on a finitely generated abelian group:
/// `G(Z) = Z`, `G(Z_n) = Z_n` for odd `n` and `Z_2n` for even `n`, with cross
/// tensor terms over the canonical cyclic decomposition.
pub fn gamma_whitehead(a: &AbelianType) -> AbelianType {
    let fs = a.cyclic_factors();
    let diag = fs.iter().map(|&f| match f {
        None => None,
        Some(n) if n % 2 == 1 => Some(n),
        Some(n) => Some(2 * n),
    });
    let cross = (0..fs.len())
        .flat_map(|i| (i + 1..fs.len()).map(move |j| (i, j)))
        .map(|(i, j)| tensor_cyclic(fs[i], fs[j]));
    assemble(diag.chain(cross))
}

/// The two halves of `A (x) A` for abelian `A`: the diagonal subgroup
/// (generated by all `a (x) a`) and its standard complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NablaSplit {
    pub nabla: AbelianType,
    pub e_part: AbelianType,
}

pub fn nabla_abelian(a: &AbelianType) -> NablaSplit {
    let fs = a.cyclic_factors();
    let cross: Vec<Option<u64>> = (0..fs.len())
        .flat_map(|i| (i + 1..fs.len()).map(move |j| (i, j)))
        .map(|(i, j)| tensor_cyclic(fs[i], fs[j]))
        .collect();
    let nabla = assemble(fs.iter().copied().chain(cross.iter().copied()));
    let e_part = assemble(cross);
    NablaSplit { nabla, e_part }
}

/// Parses the serialized form `{"free_rank": r, "factors": [...]}` and
/// re-normalizes it.
pub fn abelian_type_from_json(src: &str) -> Result<AbelianType> {
    let raw: AbelianType =
        serde_json::from_str(src).map_err(|e| Error::InvalidInput(format!("bad abelian type: {e}")))?;
    Ok(AbelianType::from_cyclic_factors(raw.free_rank, raw.invariant_factors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ty(free: usize, fs: &[u64]) -> AbelianType {
        AbelianType::from_cyclic_factors(free, fs.iter().copied())
    }

    #[test]
    fn canonical_form() {
        assert_eq!(ty(0, &[2, 3]), ty(0, &[6]));
        assert_eq!(ty(0, &[4, 6]).invariant_factors, vec![2, 12]);
        assert_eq!(ty(0, &[1, 1]), AbelianType::trivial());
        assert_eq!(ty(2, &[]).free_rank, 2);
        assert_eq!(ty(0, &[2, 2, 4]).invariant_factors, vec![2, 2, 4]);
    }

    #[test]
    fn snf_examples() {
        // diag(2,3) -> diag(1,6): d1 = gcd of entries, d1*d2 = |det|
        let m = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 3]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.s[(0, 0)], 1);
        assert_eq!(snf.s[(1, 1)], 6);

        let z = IntMatrix::zero(2, 3);
        assert_eq!(smith_normal_form(&z).s, z);

        let id = IntMatrix::identity(3);
        assert_eq!(smith_normal_form(&id).s, id);
    }

    #[test]
    fn snf_factorization_holds() {
        let m = IntMatrix::from_rows(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.s);
        assert_eq!(snf.u.det().abs(), 1);
        assert_eq!(snf.v.det().abs(), 1);
    }

    #[test]
    fn invariants_examples() {
        assert_eq!(abelian_invariants(&IntMatrix::zero(0, 2)), ty(2, &[]));
        let m = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(abelian_invariants(&m), ty(0, &[2, 2]));
        // [[2,1],[0,3]]: SNF diag(1,6) -> Z_6
        let m = IntMatrix::from_rows(vec![vec![2, 1], vec![0, 3]]);
        assert_eq!(abelian_invariants(&m), ty(0, &[6]));
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(tensor_abelian(&ty(0, &[2]), &ty(0, &[3])), AbelianType::trivial());
        assert_eq!(tensor_abelian(&ty(0, &[2, 2]), &ty(0, &[2, 2])), ty(0, &[2, 2, 2, 2]));
        assert_eq!(tensor_abelian(&ty(0, &[4]), &ty(0, &[6])), ty(0, &[2]));
        assert_eq!(tensor_abelian(&ty(1, &[]), &ty(1, &[])), ty(1, &[]));
        assert_eq!(tensor_abelian(&ty(1, &[]), &ty(0, &[5])), ty(0, &[5]));
    }

    #[test]
    fn gamma_rules() {
        assert_eq!(gamma_whitehead(&ty(1, &[])), ty(1, &[]));
        assert_eq!(gamma_whitehead(&ty(0, &[2])), ty(0, &[4]));
        assert_eq!(gamma_whitehead(&ty(0, &[3])), ty(0, &[3]));
        // Z_2 x Z_3 = Z_6: gamma = Z_4 x Z_3 (cross term trivial)
        assert_eq!(gamma_whitehead(&ty(0, &[6])), ty(0, &[12]));
    }

    #[test]
    fn nabla_examples() {
        // cyclic: no cross terms
        let s = nabla_abelian(&ty(0, &[7]));
        assert_eq!(s.nabla, ty(0, &[7]));
        assert!(s.e_part.is_trivial());
        // free of rank n: nabla has rank n(n+1)/2
        for n in 0..=4 {
            let s = nabla_abelian(&ty(n, &[]));
            assert_eq!(s.nabla.free_rank, n * (n + 1) / 2);
        }
    }

    /// Independent oracle for the diagonal split of `A (x) A`: realize the
    /// tensor square as a product of cyclic groups indexed by generator pairs
    /// and close the generating vectors under addition.
    fn nabla_brute_force(orders: &[u64]) -> (u64, u64) {
        let s = orders.len();
        let moduli: Vec<u64> = (0..s)
            .flat_map(|i| (0..s).map(move |j| (i, j)))
            .map(|(i, j)| num_integer::gcd(orders[i], orders[j]))
            .collect();
        let add = |a: &Vec<u64>, b: &Vec<u64>| -> Vec<u64> {
            a.iter().zip(b).zip(&moduli).map(|((x, y), m)| (x + y) % m).collect()
        };
        let close = |gens: Vec<Vec<u64>>| -> u64 {
            let zero = vec![0u64; moduli.len()];
            let mut seen = std::collections::HashSet::new();
            seen.insert(zero.clone());
            let mut frontier = vec![zero];
            while let Some(v) = frontier.pop() {
                for g in &gens {
                    let w = add(&v, g);
                    if seen.insert(w.clone()) {
                        frontier.push(w);
                    }
                }
            }
            seen.len() as u64
        };
        let unit = |i: usize, j: usize| -> Vec<u64> {
            let mut v = vec![0u64; moduli.len()];
            if moduli[i * s + j] > 0 {
                v[i * s + j] = 1 % moduli[i * s + j];
            }
            v
        };
        let mut diag_gens = Vec::new();
        for i in 0..s {
            diag_gens.push(unit(i, i));
        }
        for i in 0..s {
            for j in i + 1..s {
                let mut v = unit(i, j);
                let w = unit(j, i);
                v = add(&v, &w);
                diag_gens.push(v);
            }
        }
        let mut e_gens = Vec::new();
        for i in 0..s {
            for j in i + 1..s {
                e_gens.push(unit(i, j));
            }
        }
        (close(diag_gens), close(e_gens))
    }

    #[test]
    fn nabla_z2_x_z4_against_brute_force() {
        let (nabla_order, e_order) = nabla_brute_force(&[2, 4]);
        assert_eq!(nabla_order, 16);
        assert_eq!(e_order, 2);
        let s = nabla_abelian(&ty(0, &[2, 4]));
        assert_eq!(s.nabla.order(), Some(16));
        assert_eq!(s.e_part.order(), Some(2));
        // product recovers |A (x) A|
        assert_eq!(tensor_abelian(&ty(0, &[2, 4]), &ty(0, &[2, 4])).order(), Some(32));
    }

    #[test]
    fn nabla_matches_brute_force_on_small_types() {
        for orders in [vec![2], vec![3], vec![2, 2], vec![2, 4], vec![2, 6], vec![4, 4], vec![2, 2, 2], vec![3, 9]] {
            let (bn, be) = nabla_brute_force(&orders);
            let s = nabla_abelian(&AbelianType::from_cyclic_factors(0, orders.clone()));
            assert_eq!(s.nabla.order(), Some(bn as u128), "nabla of {orders:?}");
            assert_eq!(s.e_part.order(), Some(be as u128), "e part of {orders:?}");
        }
    }

    fn arb_type() -> impl Strategy<Value = AbelianType> {
        (0usize..3, proptest::collection::vec(1u64..=32, 0..4))
            .prop_map(|(f, fs)| AbelianType::from_cyclic_factors(f, fs))
    }

    proptest! {
        #[test]
        fn tensor_is_symmetric(a in arb_type(), b in arb_type()) {
            prop_assert_eq!(tensor_abelian(&a, &b), tensor_abelian(&b, &a));
        }

        #[test]
        fn tensor_distributes_over_sums(a in arb_type(), b in arb_type(), c in arb_type()) {
            let lhs = tensor_abelian(&a, &b.direct_sum(&c));
            let rhs = tensor_abelian(&a, &b).direct_sum(&tensor_abelian(&a, &c));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn nabla_times_e_is_tensor_square(a in arb_type()) {
            prop_assume!(a.free_rank == 0);
            let s = nabla_abelian(&a);
            let t = tensor_abelian(&a, &a);
            prop_assert_eq!(
                s.nabla.order().unwrap() * s.e_part.order().unwrap(),
                t.order().unwrap()
            );
        }

        #[test]
        fn gamma_covers_nabla(a in arb_type()) {
            prop_assume!(a.free_rank == 0);
            let g = gamma_whitehead(&a).order().unwrap();
            let n = nabla_abelian(&a).nabla.order().unwrap();
            prop_assert_eq!(g % n, 0u128);
            prop_assert_eq!(gamma_whitehead(&a).odd_part(), nabla_abelian(&a).nabla.odd_part());
        }

        #[test]
        fn gamma_equals_nabla_without_two_torsion(a in arb_type()) {
            prop_assume!(a.invariant_factors.iter().all(|d| d % 2 == 1));
            prop_assert_eq!(gamma_whitehead(&a), nabla_abelian(&a).nabla);
        }

        #[test]
        fn snf_roundtrip(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
            let mut state = seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as i64 % 20 - 10) as i128
            };
            let m = IntMatrix::from_rows((0..rows).map(|_| (0..cols).map(|_| next()).collect()).collect());
            let snf = smith_normal_form(&m);
            prop_assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.s);
        }
    }
}
