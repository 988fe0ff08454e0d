//! The two-copy construction: present `G * G^phi` with conjugation
//! compatibility relations, enumerate it, and read the non-abelian tensor
//! square off as the commutator subgroup `[G, G^phi]` of the image, together
//! with its named subgroups (diagonal, complement, commutator-map kernel,
//! Schur multiplicator, tensor/exterior centers).

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::AbelianType;
use crate::coset::{perm_image, todd_coxeter, Presentation};
use crate::error::{Error, Result};
use crate::group::{
    abelian_type_of, center, derived_subgroup, fingerprint, normality_witness, quotient_group,
    subgroup_generated, Elem, Fingerprint, GroupRef, Homomorphism, MaterializedSubgroup, Subgroup,
    IDENTITY,
};
use crate::word::Word;
use crate::RunConfig;

/// How the two-copy presentation is instantiated. `Full` states the
/// compatibility relations over every element triple and is the correctness
/// reference; `Generators` restricts words to a generating set (and its
/// inverses) and is far smaller, gated by cross-mode agreement tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuMode {
    Full,
    Generators,
}

impl std::fmt::Display for NuMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NuMode::Full => write!(f, "full"),
            NuMode::Generators => write!(f, "generators"),
        }
    }
}

impl std::str::FromStr for NuMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<NuMode> {
        match s {
            "full" => Ok(NuMode::Full),
            "generators" | "gens" => Ok(NuMode::Generators),
            other => Err(Error::InvalidInput(format!("unknown nu mode '{other}'"))),
        }
    }
}

/// Enumerated image of the two-copy group, with both embeddings of the source
/// and the materialized tensor subgroup `T = [G, G^phi]`.
pub struct NuImage {
    pub source: GroupRef,
    pub nu: GroupRef,
    pub mode: NuMode,
    pub presentation: Presentation,
    embed_g: Vec<Elem>,
    embed_gphi: Vec<Elem>,
    pub tensor: MaterializedSubgroup,
}

impl NuImage {
    pub fn embed(&self, g: Elem) -> Elem {
        self.embed_g[g as usize]
    }

    pub fn embed_phi(&self, g: Elem) -> Elem {
        self.embed_gphi[g as usize]
    }

    /// `[g, h^phi]` inside the image; the tensor pairing of `g` and `h`.
    pub fn pairing(&self, g: Elem, h: Elem) -> Elem {
        self.nu.commutator(self.embed_g[g as usize], self.embed_gphi[h as usize])
    }

    /// The tensor square as a subgroup of the image.
    pub fn t_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted_unchecked(self.nu.clone(), self.tensor.to_parent.clone())
    }

    /// Image of a subgroup of the source under the first/second embedding.
    pub fn embed_set(&self, sub: &Subgroup, phi: bool) -> Vec<Elem> {
        let map = if phi { &self.embed_gphi } else { &self.embed_g };
        let mut v: Vec<Elem> = sub.elements().iter().map(|&e| map[e as usize]).collect();
        v.sort_unstable();
        v
    }

    /// Subgroup of the image generated by all `[a, b^phi]`, `a` in `A`,
    /// `b` in `B`, for subgroups `A`, `B` of the source.
    pub fn pairing_subgroup(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut seeds: Vec<Elem> = Vec::with_capacity(a.order() * b.order());
        for &x in a.elements() {
            for &y in b.elements() {
                seeds.push(self.pairing(x, y));
            }
        }
        seeds.sort_unstable();
        seeds.dedup();
        subgroup_generated(&self.nu, &seeds)
    }

    /// Same with the copies swapped: generated by `[b, a^phi]` ... used for
    /// the swap identities; `a` ranges over `A` embedded plainly.
    pub fn pairing_subgroup_rev(&self, b: &Subgroup, a: &Subgroup) -> Subgroup {
        let mut seeds: Vec<Elem> = Vec::with_capacity(a.order() * b.order());
        for &x in b.elements() {
            for &y in a.elements() {
                seeds.push(self.pairing(x, y));
            }
        }
        seeds.sort_unstable();
        seeds.dedup();
        subgroup_generated(&self.nu, &seeds)
    }
}

// ---------------------------------------------------------------------------
// Presentation builders
// ---------------------------------------------------------------------------

fn commutator_letters(a: &[i32], b: &[i32]) -> Vec<i32> {
    let mut w = Vec::with_capacity(2 * (a.len() + b.len()));
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    w.extend(a.iter().rev().map(|&l| -l));
    w.extend(b.iter().rev().map(|&l| -l));
    w
}

fn conjugation_relator(conj: &[i32], lhs_comm: &[i32], rhs_comm: &[i32]) -> Word {
    // ^c [x, y] * [x', y']^-1
    let mut w = Vec::new();
    w.extend_from_slice(conj);
    w.extend_from_slice(lhs_comm);
    w.extend(conj.iter().rev().map(|&l| -l));
    w.extend(rhs_comm.iter().rev().map(|&l| -l));
    Word::from_letters(w)
}

/// Builds the two-copy presentation of `G`.
///
/// `Full`: one generator per nontrivial element and copy; relators are both
/// multiplication tables plus, for every element triple, the two words
/// equating the conjugate of `[g1, g2^phi]` by `g3` and by `g3^phi` with
/// `[^g3 g1, (^g3 g2)^phi]`. Triples containing the identity reduce to the
/// empty word and are dropped.
///
/// `Generators`: one generator per group generator and copy; relators are a
/// multiplication-table presentation of `G` in each copy (spanning-tree words
/// over the Cayley graph) plus the same triple words instantiated over
/// generators and their inverses only.
pub fn build_nu_presentation(g: &GroupRef, mode: NuMode) -> Presentation {
    let n = g.order();
    match mode {
        NuMode::Full => {
            let copy1 = |e: Elem| -> i32 { e as i32 };
            let copy2 = |e: Elem| -> i32 { (n - 1) as i32 + e as i32 };
            let word1 = |e: Elem| -> Vec<i32> {
                if e == 0 {
                    vec![]
                } else {
                    vec![copy1(e)]
                }
            };
            let word2 = |e: Elem| -> Vec<i32> {
                if e == 0 {
                    vec![]
                } else {
                    vec![copy2(e)]
                }
            };
            let mut names: Vec<String> = (1..n).map(|e| format!("x{e}")).collect();
            names.extend((1..n).map(|e| format!("y{e}")));
            let mut relators = Vec::new();
            for a in 1..n as u32 {
                for b in 1..n as u32 {
                    let c = g.mul(a, b);
                    let mut w1 = vec![copy1(a), copy1(b)];
                    let mut w2 = vec![copy2(a), copy2(b)];
                    if c != 0 {
                        w1.push(-copy1(c));
                        w2.push(-copy2(c));
                    }
                    relators.push(Word::from_letters(w1));
                    relators.push(Word::from_letters(w2));
                }
            }
            for g3 in 1..n as u32 {
                for g1 in 1..n as u32 {
                    for g2 in 1..n as u32 {
                        let c1 = g.conjugate(g3, g1);
                        let c2 = g.conjugate(g3, g2);
                        let lhs = commutator_letters(&word1(g1), &word2(g2));
                        let rhs = commutator_letters(&word1(c1), &word2(c2));
                        for conj in [word1(g3), word2(g3)] {
                            let r = conjugation_relator(&conj, &lhs, &rhs);
                            if !r.is_empty() {
                                relators.push(r);
                            }
                        }
                    }
                }
            }
            Presentation::new(format!("nu({})", g.name()), names, relators)
                .expect("generated presentation is well-formed")
        }
        NuMode::Generators => {
            let gens: Vec<Elem> = g.generators().iter().copied().filter(|&t| t != 0).collect();
            let d = gens.len().max(1);
            let gens = if gens.is_empty() { vec![IDENTITY] } else { gens };
            // canonical spanning-tree words over the group's generators
            let mut tree_word: Vec<Option<Vec<i32>>> = vec![None; n];
            tree_word[0] = Some(vec![]);
            let mut queue = std::collections::VecDeque::from([IDENTITY]);
            while let Some(x) = queue.pop_front() {
                for (i, &t) in gens.iter().enumerate() {
                    let y = g.mul(x, t);
                    if tree_word[y as usize].is_none() {
                        let mut w = tree_word[x as usize].clone().unwrap();
                        w.push(i as i32 + 1);
                        tree_word[y as usize] = Some(w);
                        queue.push_back(y);
                    }
                }
            }
            let word_in = |e: Elem, copy: usize| -> Vec<i32> {
                tree_word[e as usize]
                    .as_ref()
                    .expect("generators generate the group")
                    .iter()
                    .map(|&l| if copy == 0 { l } else { l + d as i32 })
                    .collect()
            };
            let mut names: Vec<String> = (0..d).map(|i| format!("a{}", i + 1)).collect();
            names.extend((0..d).map(|i| format!("b{}", i + 1)));
            let mut relators = Vec::new();
            // multiplication-table presentation of each copy
            for copy in 0..2usize {
                for x in 0..n as u32 {
                    for (i, &t) in gens.iter().enumerate() {
                        let y = g.mul(x, t);
                        let mut w = word_in(x, copy);
                        w.push(i as i32 + 1 + (copy * d) as i32);
                        w.extend(word_in(y, copy).iter().rev().map(|&l| -l));
                        let r = Word::from_letters(w);
                        if !r.is_empty() {
                            relators.push(r);
                        }
                    }
                }
            }
            // triple relations over generators and their inverses
            let signed: Vec<(i32, Elem)> = (0..d)
                .flat_map(|i| {
                    let t = gens[i];
                    let ti = g.inv(t);
                    [(i as i32 + 1, t), (-(i as i32 + 1), ti)]
                })
                .collect();
            for &(s3, e3) in &signed {
                for &(s1, e1) in &signed {
                    for &(s2, e2) in &signed {
                        let c1 = g.conjugate(e3, e1);
                        let c2 = g.conjugate(e3, e2);
                        let lhs = commutator_letters(&[s1], &[shift_copy(s2, d)]);
                        let rhs = commutator_letters(&word_in(c1, 0), &word_in(c2, 1));
                        for conj in [vec![s3], vec![shift_copy(s3, d)]] {
                            let r = conjugation_relator(&conj, &lhs, &rhs);
                            if !r.is_empty() {
                                relators.push(r);
                            }
                        }
                    }
                }
            }
            Presentation::new(format!("nu({})", g.name()), names, relators)
                .expect("generated presentation is well-formed")
        }
    }
}

fn shift_copy(letter: i32, d: usize) -> i32 {
    if letter > 0 {
        letter + d as i32
    } else {
        letter - d as i32
    }
}

/// The defining presentation of the tensor square itself: generators indexed
/// by element pairs, relators the two expansion rules over all triples. This
/// is the independent oracle for the two-copy route; it is only feasible for
/// very small groups (`|G|^2` generators, `2|G|^3` relators).
pub fn direct_tensor_presentation(g: &GroupRef) -> Presentation {
    let n = g.order();
    let letter = |a: Elem, b: Elem| -> i32 { (a as usize * n + b as usize) as i32 + 1 };
    let mut names = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            names.push(format!("t{a}_{b}"));
        }
    }
    let mut relators = Vec::new();
    for x in 0..n as u32 {
        for y in 0..n as u32 {
            for k in 0..n as u32 {
                // xy (x) k = (^x y (x) ^x k)(x (x) k)
                let r1 = Word::from_letters([
                    letter(g.mul(x, y), k),
                    -letter(x, k),
                    -letter(g.conjugate(x, y), g.conjugate(x, k)),
                ]);
                // x (x) yk = (x (x) y)(^y x (x) ^y k)
                let r2 = Word::from_letters([
                    letter(x, g.mul(y, k)),
                    -letter(g.conjugate(y, x), g.conjugate(y, k)),
                    -letter(x, y),
                ]);
                for r in [r1, r2] {
                    if !r.is_empty() {
                        relators.push(r);
                    }
                }
            }
        }
    }
    Presentation::new(format!("tensor({})", g.name()), names, relators)
        .expect("generated presentation is well-formed")
}

/// Enumerates the defining presentation of the tensor square directly.
pub fn direct_tensor_square(g: &GroupRef, cfg: &RunConfig) -> Result<GroupRef> {
    if g.order() > cfg.direct_cap {
        return Err(Error::InvalidInput(format!(
            "direct tensor presentation needs |G| <= {} (got {})",
            cfg.direct_cap,
            g.order()
        )));
    }
    let pres = direct_tensor_presentation(g);
    let table = todd_coxeter(&pres, &[], cfg.max_cosets)?;
    let (group, _) = perm_image(&table, &pres, cfg.element_cap)?;
    Ok(group)
}

// ---------------------------------------------------------------------------
// Image construction
// ---------------------------------------------------------------------------

/// Enumerates the two-copy presentation over the trivial subgroup, builds and
/// verifies both embeddings, checks the defining relations elementwise, and
/// materializes the tensor subgroup. The order identity
/// `|image| = |G|^2 * |T|` is asserted.
pub fn nu_image(g: &GroupRef, mode: NuMode, cfg: &RunConfig) -> Result<NuImage> {
    let pres = build_nu_presentation(g, mode);
    let table = todd_coxeter(&pres, &[], cfg.max_cosets)?;
    let (nu, gen_images) = perm_image(&table, &pres, cfg.element_cap)?;

    let n = g.order();
    let (embed_g, embed_gphi) = match mode {
        NuMode::Full => {
            let mut e1 = vec![IDENTITY; n];
            let mut e2 = vec![IDENTITY; n];
            for e in 1..n {
                e1[e] = gen_images[e - 1];
                e2[e] = gen_images[(n - 1) + (e - 1)];
            }
            (e1, e2)
        }
        NuMode::Generators => {
            let gens: Vec<Elem> = g.generators().iter().copied().filter(|&t| t != 0).collect();
            let gens = if gens.is_empty() { vec![IDENTITY] } else { gens };
            let d = gens.len();
            let mut tree_word: Vec<Option<Vec<i32>>> = vec![None; n];
            tree_word[0] = Some(vec![]);
            let mut queue = std::collections::VecDeque::from([IDENTITY]);
            while let Some(x) = queue.pop_front() {
                for (i, &t) in gens.iter().enumerate() {
                    let y = g.mul(x, t);
                    if tree_word[y as usize].is_none() {
                        let mut w = tree_word[x as usize].clone().unwrap();
                        w.push(i as i32 + 1);
                        tree_word[y as usize] = Some(w);
                        queue.push_back(y);
                    }
                }
            }
            let mut e1 = vec![IDENTITY; n];
            let mut e2 = vec![IDENTITY; n];
            for e in 0..n {
                let w = tree_word[e].as_ref().unwrap();
                e1[e] = w.iter().fold(IDENTITY, |c, &l| {
                    nu.mul(c, gen_images[l as usize - 1])
                });
                e2[e] = w.iter().fold(IDENTITY, |c, &l| {
                    nu.mul(c, gen_images[d + l as usize - 1])
                });
            }
            (e1, e2)
        }
    };

    // embeddings must be injective homomorphisms
    for (map, copy) in [(&embed_g, "G"), (&embed_gphi, "G^phi")] {
        let distinct: HashSet<Elem> = map.iter().copied().collect();
        if distinct.len() != n {
            return Err(Error::EmbeddingNotInjective { copy: if copy == "G" { "G" } else { "G^phi" } });
        }
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if nu.mul(map[a as usize], map[b as usize]) != map[g.mul(a, b) as usize] {
                    return Err(Error::Internal(format!(
                        "embedding of {copy} is not a homomorphism at ({a}, {b})"
                    )));
                }
            }
        }
    }

    let tensor = {
        let pairing = |a: u32, b: u32| -> Elem {
            nu.commutator(embed_g[a as usize], embed_gphi[b as usize])
        };
        let mut seeds: Vec<Elem> = Vec::with_capacity(n * n);
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                seeds.push(pairing(a, b));
            }
        }
        seeds.sort_unstable();
        seeds.dedup();
        let t = subgroup_generated(&nu, &seeds);
        if let Some((c, x)) = normality_witness(&nu, &t) {
            return Err(Error::Internal(format!(
                "tensor subgroup is not normal (conjugator {c}, element {x})"
            )));
        }
        let expected = (n as u64) * (n as u64) * (t.order() as u64);
        if nu.order() as u64 != expected {
            return Err(Error::OrderMismatch {
                expected,
                got: nu.order() as u64,
                context: "two-copy image order must be |G|^2 * |T|".into(),
            });
        }
        MaterializedSubgroup::new(&t, format!("{}(x){}", g.name(), g.name()))
    };

    let image = NuImage { source: g.clone(), nu, mode, presentation: pres, embed_g, embed_gphi, tensor };
    verify_defining_relations(&image, cfg)?;
    Ok(image)
}

/// The conjugation-compatibility relations, checked elementwise inside the
/// image: exhaustive over all triples for `|G| <= 16`, on seeded samples
/// otherwise.
fn verify_defining_relations(ni: &NuImage, cfg: &RunConfig) -> Result<()> {
    let g = &ni.source;
    let nu = &ni.nu;
    let n = g.order() as u32;
    let mut check = |g1: u32, g2: u32, g3: u32| -> Result<()> {
        let comm = ni.pairing(g1, g2);
        let lhs1 = nu.conjugate(ni.embed(g3), comm);
        let lhs2 = nu.conjugate(ni.embed_phi(g3), comm);
        let rhs = ni.pairing(g.conjugate(g3, g1), g.conjugate(g3, g2));
        if lhs1 != rhs || lhs2 != rhs {
            return Err(Error::Internal(format!(
                "defining relation fails at triple ({g1}, {g2}, {g3})"
            )));
        }
        Ok(())
    };
    if n <= 16 {
        for g3 in 0..n {
            for g1 in 0..n {
                for g2 in 0..n {
                    check(g1, g2, g3)?;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xde1a);
        for _ in 0..10_000 {
            check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
        }
    }
    Ok(())
}

/// Runs the two-copy route and returns the image together with the tensor
/// square as a subgroup of it.
pub fn tensor_square(g: &GroupRef, mode: NuMode, cfg: &RunConfig) -> Result<(NuImage, Subgroup)> {
    let ni = nu_image(g, mode, cfg)?;
    let t = ni.t_subgroup();
    Ok((ni, t))
}

// ---------------------------------------------------------------------------
// Named subgroups
// ---------------------------------------------------------------------------

/// The diagonal subgroup: generated by all `[g, g^phi]`. Central in the image.
pub fn nabla_subgroup(ni: &NuImage) -> Subgroup {
    let seeds: Vec<Elem> = ni.source.elements().map(|e| ni.pairing(e, e)).collect();
    subgroup_generated(&ni.nu, &seeds)
}

/// Canonical basis of a finite abelian group: element/order pairs whose
/// cyclic spans form an internal direct product, orders ascending along the
/// divisor chain. Built by splitting off a maximal-order cyclic factor and
/// recursing on the quotient, correcting lifts by powers of the split factor.
pub fn abelian_basis(g: &GroupRef) -> Vec<(Elem, u64)> {
    if g.order() == 1 {
        return Vec::new();
    }
    assert!(g.is_abelian(), "abelian basis of a nonabelian group");
    let max_ord = g.elements().map(|e| g.elem_order(e)).max().unwrap();
    let a = g.elements().find(|&e| g.elem_order(e) == max_ord).unwrap();
    let span = subgroup_generated(g, &[a]);
    let (q, proj) = quotient_group(g, &span).expect("cyclic subgroup of an abelian group is normal");
    let mut basis = Vec::new();
    for (qb, r) in abelian_basis(&q) {
        // smallest preimage, corrected so its order drops to r
        let x = g
            .elements()
            .find(|&x| proj.apply(x) == qb)
            .expect("projection is onto");
        // x^r lies in <a>; find a^s = x^r, then y = x * a^(-s/r) has order r
        let xr = g.pow(x, r as i64);
        let mut s = 0u64;
        let mut pw = IDENTITY;
        while pw != xr {
            pw = g.mul(pw, a);
            s += 1;
            assert!(s <= max_ord, "power of the split generator not found");
        }
        assert_eq!(s % r, 0, "lift correction must divide evenly");
        let y = g.mul(x, g.pow(a, -((s / r) as i64)));
        debug_assert_eq!(g.elem_order(y), r);
        debug_assert_eq!(proj.apply(y), qb);
        basis.push((y, r));
    }
    basis.push((a, max_ord));
    basis.sort_by_key(|&(_, r)| r);
    basis
}

/// Data shared by every operation that needs the abelianization: the derived
/// subgroup, the quotient map, and a canonical transversal.
pub struct AbelianizationData {
    pub derived: Subgroup,
    pub gab: GroupRef,
    pub proj: Homomorphism,
    pub gab_type: AbelianType,
    pub basis: Vec<(Elem, u64)>,
    pub transversal: Vec<Elem>,
}

pub fn abelianization_data(g: &GroupRef) -> AbelianizationData {
    let derived = derived_subgroup(g);
    let (gab, proj) = quotient_group(g, &derived).expect("derived subgroup is normal");
    let gab_type = abelian_type_of(&gab).expect("abelianization is abelian");
    let basis = abelian_basis(&gab);
    let transversal = basis
        .iter()
        .map(|&(b, _)| {
            g.elements().find(|&x| proj.apply(x) == b).expect("projection is onto")
        })
        .collect();
    AbelianizationData { derived, gab, proj, gab_type, basis, transversal }
}

/// Validates that the transversal projects to an independent generating set
/// of the abelianization whose orders are exactly the invariant factors.
pub fn validate_transversal(g: &GroupRef, data: &AbelianizationData, transversal: &[Elem]) -> Result<()> {
    let factors = &data.gab_type.invariant_factors;
    if transversal.len() != factors.len() {
        return Err(Error::BadTransversal(format!(
            "expected {} elements, got {}",
            factors.len(),
            transversal.len()
        )));
    }
    if transversal.iter().any(|&x| x as usize >= g.order()) {
        return Err(Error::BadTransversal("element index out of range".into()));
    }
    let images: Vec<Elem> = transversal.iter().map(|&x| data.proj.apply(x)).collect();
    let mut product: u128 = 1;
    for (&img, &d) in images.iter().zip(factors) {
        let o = data.gab.elem_order(img);
        if o != d {
            return Err(Error::BadTransversal(format!(
                "image order {o} does not match invariant factor {d}"
            )));
        }
        product *= o as u128;
    }
    if product != data.gab.order() as u128
        || subgroup_generated(&data.gab, &images).order() != data.gab.order()
    {
        return Err(Error::BadTransversal("images do not generate independently".into()));
    }
    Ok(())
}

/// The complement subgroup for a chosen transversal:
/// `< [x_i, x_j^phi], i < j > * [G', G^phi]`.
pub fn e_subgroup(ni: &NuImage, transversal: &[Elem]) -> Result<Subgroup> {
    let data = abelianization_data(&ni.source);
    validate_transversal(&ni.source, &data, transversal)?;
    let mut seeds = Vec::new();
    for i in 0..transversal.len() {
        for j in i + 1..transversal.len() {
            seeds.push(ni.pairing(transversal[i], transversal[j]));
        }
    }
    for &c in data.derived.elements() {
        for x in ni.source.elements() {
            seeds.push(ni.pairing(c, x));
        }
    }
    Ok(subgroup_generated(&ni.nu, &seeds))
}

/// The fold-both-copies map onto the source; its restriction to the tensor
/// subgroup is the commutator map.
pub fn kappa_map(ni: &NuImage) -> Result<Homomorphism> {
    let d = match ni.mode {
        NuMode::Full => ni.source.order() - 1,
        NuMode::Generators => {
            ni.source.generators().iter().filter(|&&t| t != 0).count().max(1)
        }
    };
    let images: Vec<Elem> = match ni.mode {
        NuMode::Full => {
            let mut v: Vec<Elem> = (1..ni.source.order() as u32).collect();
            v.extend(1..ni.source.order() as u32);
            v
        }
        NuMode::Generators => {
            let gens: Vec<Elem> =
                ni.source.generators().iter().copied().filter(|&t| t != 0).collect();
            let gens = if gens.is_empty() { vec![IDENTITY] } else { gens };
            let mut v = gens.clone();
            v.extend(gens);
            v
        }
    };
    debug_assert_eq!(images.len(), 2 * d);
    // relator certificate: every relator evaluates trivially in the source
    for r in ni.presentation.relators() {
        if ni.source.eval_word(r.letters(), &images) != IDENTITY {
            return Err(Error::Internal("fold map does not satisfy a defining relator".into()));
        }
    }
    crate::group::hom_from_generator_images(&ni.nu, &ni.source, &images)
}

/// Kernel of the commutator map inside the tensor subgroup.
pub fn j_kernel(ni: &NuImage) -> Result<Subgroup> {
    let rho = kappa_map(ni)?;
    let els: Vec<Elem> = ni
        .tensor
        .to_parent
        .iter()
        .copied()
        .filter(|&t| rho.apply(t) == IDENTITY)
        .collect();
    Subgroup::from_elements(ni.nu.clone(), els)
}

/// The Schur multiplicator as an abelian type: `J / nabla`.
pub fn multiplicator(ni: &NuImage) -> Result<AbelianType> {
    let nabla = nabla_subgroup(ni);
    let j = j_kernel(ni)?;
    multiplicator_from(ni, &nabla, &j)
}

fn multiplicator_from(ni: &NuImage, nabla: &Subgroup, j: &Subgroup) -> Result<AbelianType> {
    let j_local = ni.tensor.pull_subgroup(j.elements());
    let jm = MaterializedSubgroup::new(&j_local, "J");
    let nabla_in_j: Vec<Elem> = nabla
        .elements()
        .iter()
        .map(|&e| {
            let t_local = ni.tensor.local_index(e).expect("nabla inside tensor subgroup");
            jm.local_index(t_local).expect("nabla inside J")
        })
        .collect();
    let nabla_sub = Subgroup::from_elements(jm.group.clone(), nabla_in_j)?;
    let (m, _) = quotient_group(&jm.group, &nabla_sub)?;
    abelian_type_of(&m)
}

/// The exterior square: tensor subgroup modulo the diagonal, as a concrete
/// group.
pub fn exterior_square(ni: &NuImage) -> Result<GroupRef> {
    let nabla = nabla_subgroup(ni);
    let nabla_local = ni.tensor.pull_subgroup(nabla.elements());
    let (q, _) = quotient_group(&ni.tensor.group, &nabla_local)?;
    Ok(q)
}

/// Elements pairing trivially with everything.
pub fn tensor_center(ni: &NuImage) -> Subgroup {
    let els: Vec<Elem> = ni
        .source
        .elements()
        .filter(|&z| ni.source.elements().all(|x| ni.pairing(z, x) == IDENTITY))
        .collect();
    Subgroup::from_sorted_unchecked(ni.source.clone(), els)
}

/// Elements pairing into the diagonal subgroup with everything.
pub fn exterior_center(ni: &NuImage) -> Subgroup {
    let nabla = nabla_subgroup(ni);
    let nabla_els = nabla.elements();
    let els: Vec<Elem> = ni
        .source
        .elements()
        .filter(|&z| {
            ni.source
                .elements()
                .all(|x| nabla_els.binary_search(&ni.pairing(z, x)).is_ok())
        })
        .collect();
    Subgroup::from_sorted_unchecked(ni.source.clone(), els)
}

/// A group is capable (a central quotient of some group) exactly when its
/// exterior center is trivial.
pub fn is_capable(ni: &NuImage) -> bool {
    exterior_center(ni).is_trivial()
}

// ---------------------------------------------------------------------------
// Full computation and report
// ---------------------------------------------------------------------------

/// Everything the report and the verification suites need, computed once.
pub struct TensorComputation {
    pub ni: NuImage,
    pub data: AbelianizationData,
    pub transversal: Vec<Elem>,
    pub nabla: Subgroup,
    pub e_sub: Subgroup,
    pub n_sub: Subgroup,
    pub j_sub: Subgroup,
    pub rho: Homomorphism,
    pub nabla_type: AbelianType,
    pub n_type: AbelianType,
    pub j_type: AbelianType,
    pub m_type: AbelianType,
    pub tensor_fp: Fingerprint,
    pub exterior_group: GroupRef,
    pub exterior_fp: Fingerprint,
    pub tensor_center: Subgroup,
    pub exterior_center: Subgroup,
    pub splits: bool,
    pub capable: bool,
}

impl TensorComputation {
    pub fn new(g: &GroupRef, cfg: &RunConfig) -> Result<TensorComputation> {
        let ni = nu_image(g, cfg.nu_mode, cfg)?;
        Self::from_image(ni, cfg)
    }

    pub fn from_image(ni: NuImage, cfg: &RunConfig) -> Result<TensorComputation> {
        let data = abelianization_data(&ni.source);
        let transversal = match &cfg.transversal {
            Some(t) => {
                validate_transversal(&ni.source, &data, t)?;
                t.clone()
            }
            None => data.transversal.clone(),
        };

        let nabla = nabla_subgroup(&ni);
        // the diagonal is central in the whole image
        for &z in nabla.elements() {
            for &w in ni.nu.generators() {
                if ni.nu.mul(z, w) != ni.nu.mul(w, z) {
                    return Err(Error::Internal("diagonal subgroup is not central".into()));
                }
            }
        }
        // restricted generation: diagonal pairings of the transversal plus the
        // symmetrized cross pairings already generate the diagonal
        {
            let mut seeds = Vec::new();
            for (i, &xi) in transversal.iter().enumerate() {
                seeds.push(ni.pairing(xi, xi));
                for &xj in transversal.iter().skip(i + 1) {
                    seeds.push(ni.nu.mul(ni.pairing(xi, xj), ni.pairing(xj, xi)));
                }
            }
            let restricted = subgroup_generated(&ni.nu, &seeds);
            if !restricted.set_eq(&nabla) {
                return Err(Error::Internal(
                    "restricted diagonal generators do not span the diagonal".into(),
                ));
            }
        }

        let e_sub = e_subgroup(&ni, &transversal)?;
        // the tensor subgroup factors as diagonal * complement
        let t_sub = ni.t_subgroup();
        {
            let mut union: Vec<Elem> = nabla.elements().to_vec();
            union.extend_from_slice(e_sub.elements());
            let span = subgroup_generated(&ni.nu, &union);
            if !span.set_eq(&t_sub) {
                return Err(Error::Internal(
                    "diagonal and complement do not span the tensor subgroup".into(),
                ));
            }
        }
        let n_els: Vec<Elem> = nabla
            .elements()
            .iter()
            .copied()
            .filter(|e| e_sub.elements().binary_search(e).is_ok())
            .collect();
        let n_sub = Subgroup::from_elements(ni.nu.clone(), n_els)?;
        if nabla.order() as u128 * e_sub.order() as u128
            != t_sub.order() as u128 * n_sub.order() as u128
        {
            return Err(Error::Internal("product order identity fails for diagonal * complement".into()));
        }

        let rho = kappa_map(&ni)?;
        let j_els: Vec<Elem> = ni
            .tensor
            .to_parent
            .iter()
            .copied()
            .filter(|&t| rho.apply(t) == IDENTITY)
            .collect();
        let j_sub = Subgroup::from_elements(ni.nu.clone(), j_els)?;

        // order identities from the exact rows: |T| = |J| * |G'|, |J| = |nabla| * |M|
        if (ni.tensor.group.order() as u128)
            != j_sub.order() as u128 * data.derived.order() as u128
        {
            return Err(Error::Internal("order identity |T| = |J| |G'| fails".into()));
        }
        let m_type = multiplicator_from(&ni, &nabla, &j_sub)?;
        if j_sub.order() as u128
            != nabla.order() as u128 * m_type.order().expect("finite multiplicator")
        {
            return Err(Error::Internal("order identity |J| = |nabla| |M| fails".into()));
        }

        let nabla_local = ni.tensor.pull_subgroup(nabla.elements());
        let nabla_mat = MaterializedSubgroup::new(&nabla_local, "nabla");
        let nabla_type = abelian_type_of(&nabla_mat.group)?;
        let n_local = ni.tensor.pull_subgroup(n_sub.elements());
        let n_mat = MaterializedSubgroup::new(&n_local, "N");
        let n_type = abelian_type_of(&n_mat.group)?;
        let j_local = ni.tensor.pull_subgroup(j_sub.elements());
        let j_mat = MaterializedSubgroup::new(&j_local, "J");
        let j_type = abelian_type_of(&j_mat.group)?;

        let tensor_fp = fingerprint(&ni.tensor.group);
        let (exterior_group, _) = quotient_group(&ni.tensor.group, &nabla_local)?;
        let exterior_fp = fingerprint(&exterior_group);

        let tc = tensor_center(&ni);
        let ec = exterior_center(&ni);
        // tensor center <= exterior center <= center, and tensor center <= G'
        for &z in tc.elements() {
            if !ec.contains(z) || !data.derived.contains(z) {
                return Err(Error::Internal("tensor center containment fails".into()));
            }
        }
        let zg = center(&ni.source);
        for &z in ec.elements() {
            if !zg.contains(z) {
                return Err(Error::Internal("exterior center is not central".into()));
            }
        }

        let splits = n_sub.is_trivial();
        let capable = ec.is_trivial();

        Ok(TensorComputation {
            ni,
            data,
            transversal,
            nabla,
            e_sub,
            n_sub,
            j_sub,
            rho,
            nabla_type,
            n_type,
            j_type,
            m_type,
            tensor_fp,
            exterior_group,
            exterior_fp,
            tensor_center: tc,
            exterior_center: ec,
            splits,
            capable,
        })
    }

    pub fn gab_type(&self) -> &AbelianType {
        &self.data.gab_type
    }

    /// Both sides of the open question: the diagonal/complement intersection
    /// versus the pairings of the exterior-center part of the derived
    /// subgroup with everything.
    pub fn question_record(&self) -> QuestionRecord {
        let zc: Vec<Elem> = self
            .exterior_center
            .elements()
            .iter()
            .copied()
            .filter(|&z| self.data.derived.contains(z))
            .collect();
        let mut seeds = Vec::new();
        for &z in &zc {
            for x in self.ni.source.elements() {
                seeds.push(self.ni.pairing(z, x));
            }
        }
        let bracket = subgroup_generated(&self.ni.nu, &seeds);
        QuestionRecord {
            n_order: self.n_sub.order() as u64,
            bracket_order: bracket.order() as u64,
            equal: bracket.set_eq(&self.n_sub),
        }
    }
}

/// Outcome of the exploratory check; never asserted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub n_order: u64,
    pub bracket_order: u64,
    pub equal: bool,
}

pub fn explore_question(comp: &TensorComputation) -> QuestionRecord {
    comp.question_record()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportMeta {
    pub version: String,
    pub nu_mode: NuMode,
    pub max_cosets: usize,
    pub element_cap: usize,
    pub seed: u64,
    pub elapsed_ms: u64,
}

/// Everything computed for one group, in serializable form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorReport {
    pub group: String,
    pub group_order: u64,
    pub abelianization: AbelianType,
    pub derived_order: u64,
    pub nu_order: u64,
    pub tensor_order: u64,
    pub tensor: Fingerprint,
    pub nabla: AbelianType,
    pub nabla_order: u64,
    pub e_order: u64,
    pub n_subgroup: AbelianType,
    pub n_order: u64,
    pub j_kernel: AbelianType,
    pub multiplicator: AbelianType,
    pub exterior_order: u64,
    pub exterior: Fingerprint,
    pub tensor_center: Vec<Elem>,
    pub exterior_center: Vec<Elem>,
    pub splits: bool,
    pub capable: bool,
    pub transversal: Vec<Elem>,
    pub question: QuestionRecord,
    pub meta: ReportMeta,
}

/// Runs the whole pipeline for one group.
pub fn full_report(g: &GroupRef, cfg: &RunConfig) -> Result<TensorReport> {
    let started = Instant::now();
    let comp = TensorComputation::new(g, cfg)?;
    Ok(report_from(&comp, cfg, started.elapsed().as_millis() as u64))
}

pub fn report_from(comp: &TensorComputation, cfg: &RunConfig, elapsed_ms: u64) -> TensorReport {
    TensorReport {
        group: comp.ni.source.name().to_string(),
        group_order: comp.ni.source.order() as u64,
        abelianization: comp.data.gab_type.clone(),
        derived_order: comp.data.derived.order() as u64,
        nu_order: comp.ni.nu.order() as u64,
        tensor_order: comp.ni.tensor.group.order() as u64,
        tensor: comp.tensor_fp.clone(),
        nabla: comp.nabla_type.clone(),
        nabla_order: comp.nabla.order() as u64,
        e_order: comp.e_sub.order() as u64,
        n_subgroup: comp.n_type.clone(),
        n_order: comp.n_sub.order() as u64,
        j_kernel: comp.j_type.clone(),
        multiplicator: comp.m_type.clone(),
        exterior_order: comp.exterior_group.order() as u64,
        exterior: comp.exterior_fp.clone(),
        tensor_center: comp.tensor_center.elements().to_vec(),
        exterior_center: comp.exterior_center.elements().to_vec(),
        splits: comp.splits,
        capable: comp.capable,
        transversal: comp.transversal.clone(),
        question: comp.question_record(),
        meta: ReportMeta {
            version: crate::VERSION.to_string(),
            nu_mode: comp.ni.mode,
            max_cosets: cfg.max_cosets,
            element_cap: cfg.element_cap,
            seed: cfg.seed,
            elapsed_ms,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupTable;

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn z2_image() {
        let g = GroupTable::cyclic(2);
        let ni = nu_image(&g, NuMode::Full, &cfg()).unwrap();
        // |image| = |G|^2 * |Z2 (x) Z2| = 4 * 2 = 8
        assert_eq!(ni.nu.order(), 8);
        assert_eq!(ni.tensor.group.order(), 2);
    }

    #[test]
    fn z2_presentation_shape() {
        let g = GroupTable::cyclic(2);
        let p = build_nu_presentation(&g, NuMode::Full);
        assert_eq!(p.ngens(), 2);
        // table relators x^2, y^2 plus two triple words for the unique
        // nontrivial triple
        assert_eq!(p.relators().len(), 4);
    }

    #[test]
    fn klein_four_tensor_square() {
        let z2 = GroupTable::cyclic(2);
        let g = GroupTable::direct_product(&z2, &z2);
        let ni = nu_image(&g, NuMode::Full, &cfg()).unwrap();
        assert_eq!(ni.nu.order(), 256);
        assert_eq!(ni.tensor.group.order(), 16);
        let nabla = nabla_subgroup(&ni);
        assert_eq!(nabla.order(), 8);
        let comp = TensorComputation::from_image(ni, &cfg()).unwrap();
        assert_eq!(comp.e_sub.order(), 2);
        assert!(comp.splits);
        assert!(comp.capable);
        assert_eq!(comp.m_type, AbelianType::cyclic(2));
    }

    #[test]
    fn cyclic_groups_have_central_tensor() {
        for n in [3usize, 4, 5, 6] {
            let g = GroupTable::cyclic(n);
            let ni = nu_image(&g, NuMode::Full, &cfg()).unwrap();
            assert_eq!(ni.tensor.group.order(), n, "|T| for z{n}");
            let nabla = nabla_subgroup(&ni);
            assert_eq!(nabla.order(), n);
            let comp = TensorComputation::from_image(ni, &cfg()).unwrap();
            assert!(comp.e_sub.is_trivial());
            assert!(comp.m_type.is_trivial());
            assert!(!comp.capable, "cyclic z{n} is not capable");
        }
    }

    #[test]
    fn z4_not_capable_klein_capable() {
        let g = GroupTable::cyclic(4);
        let ni = nu_image(&g, NuMode::Full, &cfg()).unwrap();
        let zc = exterior_center(&ni);
        assert_eq!(zc.order(), 4);
        assert!(!is_capable(&ni));
    }

    #[test]
    fn abelian_tensor_center_is_trivial() {
        for g in [GroupTable::cyclic(4), GroupTable::direct_product(&GroupTable::cyclic(2), &GroupTable::cyclic(2))] {
            let ni = nu_image(&g, NuMode::Full, &cfg()).unwrap();
            assert!(tensor_center(&ni).is_trivial());
        }
    }

    #[test]
    fn modes_agree_on_klein_four() {
        let z2 = GroupTable::cyclic(2);
        let g = GroupTable::direct_product(&z2, &z2);
        let full = nu_image(&g, NuMode::Full, &cfg()).unwrap();
        let gens = nu_image(&g, NuMode::Generators, &cfg()).unwrap();
        assert_eq!(full.nu.order(), gens.nu.order());
        assert_eq!(full.tensor.group.order(), gens.tensor.group.order());
        assert_eq!(
            fingerprint(&full.tensor.group),
            fingerprint(&gens.tensor.group)
        );
    }

    #[test]
    fn direct_oracle_small_cyclic() {
        for n in [2usize, 3] {
            let g = GroupTable::cyclic(n);
            let t = direct_tensor_square(&g, &cfg()).unwrap();
            assert_eq!(t.order(), n);
        }
    }

    #[test]
    fn abelian_basis_of_z2_x_z4() {
        let g = GroupTable::direct_product(&GroupTable::cyclic(2), &GroupTable::cyclic(4));
        let basis = abelian_basis(&g);
        let orders: Vec<u64> = basis.iter().map(|&(_, r)| r).collect();
        assert_eq!(orders, vec![2, 4]);
        // spans independently
        let span = subgroup_generated(&g, &basis.iter().map(|&(e, _)| e).collect::<Vec<_>>());
        assert_eq!(span.order(), 8);
    }
}
