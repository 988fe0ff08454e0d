//! Todd-Coxeter coset enumeration (HLT strategy with lookahead) and the
//! extraction of a concrete group from a completed table.

use std::collections::{HashMap, VecDeque};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::group::{Elem, GroupRef, GroupTable, RegularRep, DENSE_THRESHOLD};
use crate::word::{parse_word, Word};

/// Abstract generators plus relator words.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub name: String,
    pub generator_names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(
        name: impl Into<String>,
        generator_names: Vec<String>,
        relators: Vec<Word>,
    ) -> Result<Presentation> {
        let ngens = generator_names.len();
        for w in &relators {
            if let Some(m) = w.max_generator() {
                if m >= ngens {
                    return Err(Error::InvalidInput(format!(
                        "relator references generator {} but only {} are declared",
                        m + 1,
                        ngens
                    )));
                }
            }
        }
        Ok(Presentation { name: name.into(), generator_names, relators })
    }

    pub fn ngens(&self) -> usize {
        self.generator_names.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Parses either the plain text format
    ///
    /// ```text
    /// gens: a, b
    /// rels: a^3, b^2, (ab)^2
    /// ```
    ///
    /// (headers optional: first line generators, remaining lines relators) or,
    /// when the input starts with `{`, the JSON form
    /// `{"name": ..., "generators": [...], "relators": [...]}` with relators
    /// as word strings or signed-integer arrays.
    pub fn parse(src: &str) -> Result<Presentation> {
        let trimmed = src.trim_start();
        if trimmed.starts_with('{') {
            return Self::parse_json(src);
        }
        let mut gen_line: Option<String> = None;
        let mut rel_chunks: Vec<String> = Vec::new();
        for raw in src.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("gens:") || lower.starts_with("generators:") {
                gen_line = Some(line[line.find(':').unwrap() + 1..].to_string());
            } else if lower.starts_with("rels:") || lower.starts_with("relators:") {
                rel_chunks.push(line[line.find(':').unwrap() + 1..].to_string());
            } else if gen_line.is_none() {
                gen_line = Some(line.to_string());
            } else {
                rel_chunks.push(line.to_string());
            }
        }
        let gen_line = gen_line.ok_or_else(|| Error::InvalidInput("no generator line".into()))?;
        let names: Vec<String> = gen_line
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if names.iter().any(|n| n.len() != 1 || !n.chars().next().unwrap().is_ascii_lowercase()) {
            return Err(Error::InvalidInput(
                "generator names in text presentations must be single lowercase letters".into(),
            ));
        }
        let mut relators = Vec::new();
        for chunk in rel_chunks {
            for part in chunk.split([',', ';']) {
                let part = part.trim();
                if !part.is_empty() && part != "1" {
                    relators.push(parse_word(part, &names)?);
                }
            }
        }
        Presentation::new("presentation", names, relators)
    }

    fn parse_json(src: &str) -> Result<Presentation> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum RelatorRepr {
            Text(String),
            Letters(Vec<i32>),
        }
        #[derive(Deserialize)]
        struct Repr {
            #[serde(default)]
            name: Option<String>,
            generators: Vec<String>,
            relators: Vec<RelatorRepr>,
        }
        let repr: Repr = serde_json::from_str(src)
            .map_err(|e| Error::InvalidInput(format!("bad presentation JSON: {e}")))?;
        let mut relators = Vec::new();
        for r in repr.relators {
            match r {
                RelatorRepr::Text(s) => relators.push(parse_word(&s, &repr.generators)?),
                RelatorRepr::Letters(ls) => {
                    if ls.iter().any(|&l| l == 0) {
                        return Err(Error::InvalidInput("relator letter 0".into()));
                    }
                    relators.push(Word::from_letters(ls));
                }
            }
        }
        Presentation::new(repr.name.unwrap_or_else(|| "presentation".into()), repr.generators, relators)
    }

    pub fn display_relators(&self) -> Vec<String> {
        self.relators.iter().map(|w| w.display(&self.generator_names)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetStatus {
    Complete,
}

/// A completed, compacted coset table: for each coset the action of every
/// generator and inverse, plus the definition forest rooted at coset 0.
#[derive(Debug)]
pub struct CosetTable {
    pub ngens: usize,
    pub coset_count: usize,
    pub status: CosetStatus,
    pub trivial_subgroup: bool,
    width: usize,
    action: Vec<Elem>,
    def: Vec<(Elem, i32)>,
    visit_order: Vec<Elem>,
}

impl CosetTable {
    #[inline]
    fn col(letter: i32) -> usize {
        if letter > 0 {
            2 * (letter as usize - 1)
        } else {
            2 * ((-letter) as usize - 1) + 1
        }
    }

    pub fn apply(&self, coset: Elem, letter: i32) -> Elem {
        self.action[coset as usize * self.width + Self::col(letter)]
    }

    pub fn trace(&self, start: Elem, word: &Word) -> Elem {
        word.letters().iter().fold(start, |c, &l| self.apply(c, l))
    }

    /// Byte image used for determinism tests and caching.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.action.len() * 4 + 16);
        out.extend_from_slice(&(self.coset_count as u64).to_le_bytes());
        out.extend_from_slice(&(self.ngens as u64).to_le_bytes());
        for &x in &self.action {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }
}

const UNDEF: u32 = u32::MAX;

struct Enumerator {
    width: usize,
    max_rows: usize,
    relators: Vec<Vec<i32>>,
    tab: Vec<u32>,
    parent: Vec<u32>, // union-find; parent[c] == c iff live
    scanned: Vec<bool>,
    rows: usize,
    dead: usize,
    queue: VecDeque<u32>,
}

enum ScanOutcome {
    Complete,
    Incomplete,
    NeedSpace,
}

impl Enumerator {
    fn new(ngens: usize, relators: Vec<Vec<i32>>, max_rows: usize) -> Enumerator {
        let width = 2 * ngens.max(1);
        Enumerator {
            width,
            max_rows,
            relators,
            tab: vec![UNDEF; width],
            parent: vec![0],
            scanned: vec![false],
            rows: 1,
            dead: 0,
            queue: VecDeque::new(),
        }
    }

    #[inline]
    fn col(letter: i32) -> usize {
        CosetTable::col(letter)
    }

    #[inline]
    fn get(&self, c: u32, letter: i32) -> u32 {
        self.tab[c as usize * self.width + Self::col(letter)]
    }

    #[inline]
    fn set(&mut self, c: u32, letter: i32, v: u32) {
        self.tab[c as usize * self.width + Self::col(letter)] = v;
    }

    fn set_pair(&mut self, c: u32, letter: i32, d: u32) {
        debug_assert_eq!(self.get(c, letter), UNDEF);
        debug_assert_eq!(self.get(d, -letter), UNDEF);
        self.set(c, letter, d);
        self.set(d, -letter, c);
    }

    fn rep(&mut self, mut c: u32) -> u32 {
        while self.parent[c as usize] != c {
            let up = self.parent[self.parent[c as usize] as usize];
            self.parent[c as usize] = up;
            c = up;
        }
        c
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, letter: i32) -> Option<u32> {
        if self.rows >= self.max_rows {
            return None;
        }
        let n = self.rows as u32;
        self.rows += 1;
        self.tab.extend(std::iter::repeat(UNDEF).take(self.width));
        self.parent.push(n);
        self.scanned.push(false);
        self.set_pair(c, letter, n);
        Some(n)
    }

    fn merge(&mut self, a: u32, b: u32) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (keep, die) = if a < b { (a, b) } else { (b, a) };
        self.parent[die as usize] = keep;
        self.dead += 1;
        self.queue.push_back(die);
    }

    /// Standard coincidence processing: rows of dead cosets are replayed onto
    /// their representatives, queueing any further collisions.
    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(gamma) = self.queue.pop_front() {
            for colletter in 0..self.width {
                let letter = if colletter % 2 == 0 {
                    (colletter / 2 + 1) as i32
                } else {
                    -((colletter / 2 + 1) as i32)
                };
                let delta = self.tab[gamma as usize * self.width + colletter];
                if delta == UNDEF {
                    continue;
                }
                // remove the paired entry pointing back at the dead row
                self.set(delta, -letter, UNDEF);
                let mu = self.rep(gamma);
                let nu = self.rep(delta);
                let mu_entry = self.get(mu, letter);
                if mu_entry != UNDEF {
                    self.merge(nu, mu_entry);
                } else {
                    let nu_entry = self.get(nu, -letter);
                    if nu_entry != UNDEF {
                        self.merge(mu, nu_entry);
                    } else {
                        self.set(mu, letter, nu);
                        self.set(nu, -letter, mu);
                    }
                }
            }
        }
    }

    fn scan(&mut self, start: u32, word: &[i32], fill: bool) -> ScanOutcome {
        if word.is_empty() {
            return ScanOutcome::Complete;
        }
        let mut f = start;
        let mut i = 0usize;
        let mut b = start;
        let mut j = word.len();
        loop {
            while i < j {
                let t = self.get(f, word[i]);
                if t == UNDEF {
                    break;
                }
                f = t;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return ScanOutcome::Complete;
            }
            while j > i {
                let t = self.get(b, -word[j - 1]);
                if t == UNDEF {
                    break;
                }
                b = t;
                j -= 1;
            }
            if j == i {
                if f != b {
                    self.coincidence(f, b);
                }
                return ScanOutcome::Complete;
            }
            if j == i + 1 {
                self.set_pair(f, word[i], b);
                return ScanOutcome::Complete;
            }
            if !fill {
                return ScanOutcome::Incomplete;
            }
            if self.define(f, word[i]).is_none() {
                return ScanOutcome::NeedSpace;
            }
        }
    }

    /// Deduction-only pass over the whole table, then compaction. Returns an
    /// overflow error when no space was reclaimed.
    fn recover(&mut self, subgroup_words: &[Word]) -> Result<()> {
        for w in subgroup_words {
            if self.is_live(0) {
                self.scan(0, w.letters(), false);
            }
        }
        let relators = std::mem::take(&mut self.relators);
        let mut c = 0u32;
        while (c as usize) < self.rows {
            if self.is_live(c) {
                for r in &relators {
                    if !self.is_live(c) {
                        break;
                    }
                    self.scan(c, r, false);
                }
            }
            c += 1;
        }
        self.relators = relators;
        if self.dead == 0 {
            return Err(Error::Overflow { max_cosets: self.max_rows });
        }
        self.compact();
        Ok(())
    }

    /// Renumbers live cosets in ascending (first-definition) order.
    fn compact(&mut self) {
        let mut remap = vec![UNDEF; self.rows];
        let mut next = 0u32;
        for c in 0..self.rows as u32 {
            if self.is_live(c) {
                remap[c as usize] = next;
                next += 1;
            }
        }
        let live = next as usize;
        let mut tab = vec![UNDEF; live * self.width];
        let mut scanned = vec![false; live];
        for c in 0..self.rows as u32 {
            let nc = remap[c as usize];
            if nc == UNDEF {
                continue;
            }
            scanned[nc as usize] = self.scanned[c as usize];
            for col in 0..self.width {
                let v = self.tab[c as usize * self.width + col];
                tab[nc as usize * self.width + col] = if v == UNDEF {
                    UNDEF
                } else {
                    let rv = self.rep(v);
                    debug_assert!(self.is_live(rv));
                    remap[rv as usize]
                };
            }
        }
        self.tab = tab;
        self.scanned = scanned;
        self.parent = (0..live as u32).collect();
        self.rows = live;
        self.dead = 0;
    }

    fn run(&mut self, subgroup_words: &[Word]) -> Result<()> {
        for w in subgroup_words {
            loop {
                match self.scan(0, w.letters(), true) {
                    ScanOutcome::NeedSpace => self.recover(subgroup_words)?,
                    _ => break,
                }
            }
        }
        let mut cursor = 0usize;
        'outer: loop {
            while cursor < self.rows
                && (!self.is_live(cursor as u32) || self.scanned[cursor])
            {
                cursor += 1;
            }
            if cursor >= self.rows {
                break;
            }
            let c = cursor as u32;
            let nrel = self.relators.len();
            for ri in 0..nrel {
                if !self.is_live(c) {
                    continue 'outer;
                }
                loop {
                    let word = std::mem::take(&mut self.relators[ri]);
                    let out = self.scan(c, &word, true);
                    self.relators[ri] = word;
                    match out {
                        ScanOutcome::NeedSpace => {
                            self.recover(subgroup_words)?;
                            cursor = 0;
                            continue 'outer;
                        }
                        _ => break,
                    }
                }
            }
            if !self.is_live(c) {
                continue 'outer;
            }
            for col in 0..self.width {
                if self.tab[c as usize * self.width + col] == UNDEF {
                    let letter = if col % 2 == 0 {
                        (col / 2 + 1) as i32
                    } else {
                        -((col / 2 + 1) as i32)
                    };
                    if self.define(c, letter).is_none() {
                        self.recover(subgroup_words)?;
                        cursor = 0;
                        continue 'outer;
                    }
                }
            }
            self.scanned[c as usize] = true;
        }
        self.compact();
        Ok(())
    }
}

/// Enumerates the cosets of the subgroup generated by `subgroup_words` in the
/// presented group. HLT scanning; deterministic numbering by first definition.
pub fn todd_coxeter(
    pres: &Presentation,
    subgroup_words: &[Word],
    max_cosets: usize,
) -> Result<CosetTable> {
    if max_cosets < 1 {
        return Err(Error::InvalidInput("max_cosets must be at least 1".into()));
    }
    // relators are scanned cyclically reduced; duplicates dropped; short first
    let mut seen = std::collections::HashSet::new();
    let mut relators: Vec<Vec<i32>> = Vec::new();
    for w in pres.relators() {
        let r = w.cyclically_reduced();
        if r.is_empty() {
            continue;
        }
        if seen.insert(r.letters().to_vec()) {
            relators.push(r.letters().to_vec());
        }
    }
    relators.sort_by_key(|r| r.len());

    let mut e = Enumerator::new(pres.ngens(), relators, max_cosets);
    e.run(subgroup_words)?;

    let width = e.width;
    let rows = e.rows;
    // completeness and column bijectivity
    for c in 0..rows {
        for col in 0..width {
            let v = e.tab[c * width + col];
            if v == UNDEF || v as usize >= rows {
                return Err(Error::Internal(format!(
                    "incomplete coset table at coset {c}, column {col}"
                )));
            }
        }
    }
    for col in 0..width {
        let mut hit = vec![false; rows];
        for c in 0..rows {
            let v = e.tab[c * width + col] as usize;
            if hit[v] {
                return Err(Error::Internal(format!("column {col} is not a permutation")));
            }
            hit[v] = true;
        }
    }

    // definition forest by breadth-first search from coset 0
    let ngens = pres.ngens();
    let mut def = vec![(0u32, 0i32); rows];
    let mut visit_order = Vec::with_capacity(rows);
    let mut seen_c = vec![false; rows];
    seen_c[0] = true;
    visit_order.push(0u32);
    let mut queue = VecDeque::from([0u32]);
    while let Some(c) = queue.pop_front() {
        for g in 0..ngens {
            for letter in [g as i32 + 1, -(g as i32 + 1)] {
                let v = e.tab[c as usize * width + CosetTable::col(letter)];
                if !seen_c[v as usize] {
                    seen_c[v as usize] = true;
                    def[v as usize] = (c, letter);
                    visit_order.push(v);
                    queue.push_back(v);
                }
            }
        }
    }
    if visit_order.len() != rows {
        return Err(Error::Internal("coset action is not transitive".into()));
    }

    let table = CosetTable {
        ngens,
        coset_count: rows,
        status: CosetStatus::Complete,
        trivial_subgroup: subgroup_words.is_empty(),
        width,
        action: e.tab,
        def,
        visit_order,
    };

    verify_table(&table, pres, subgroup_words)?;
    Ok(table)
}

/// Relator check: every relator must act trivially from every coset (sampled
/// once the full check would exceed the letter budget), and the subgroup
/// words must fix coset 0.
fn verify_table(t: &CosetTable, pres: &Presentation, subgroup_words: &[Word]) -> Result<()> {
    for w in subgroup_words {
        if t.trace(0, w) != 0 {
            return Err(Error::Internal("subgroup word does not fix coset 0".into()));
        }
    }
    let total_letters: usize = pres.relators().iter().map(|r| r.len()).sum();
    let full_budget: usize = 1_000_000_000;
    let reduced: Vec<Word> = pres.relators().iter().map(|r| r.cyclically_reduced()).collect();
    if t.coset_count.saturating_mul(total_letters) <= full_budget {
        for c in 0..t.coset_count as u32 {
            for r in &reduced {
                if t.trace(c, r) != c {
                    return Err(Error::Internal(format!(
                        "relator fails to close from coset {c}"
                    )));
                }
            }
        }
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xc05e7);
        for _ in 0..1_000_000usize.div_euclid(reduced.len().max(1)).max(1000) {
            let c = rng.gen_range(0..t.coset_count as u32);
            for r in &reduced {
                if t.trace(c, r) != c {
                    return Err(Error::Internal(format!(
                        "relator fails to close from coset {c}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Concrete group generated by the coset action, with the images of the
/// presentation generators.
///
/// Over the trivial subgroup the action is regular: cosets are the elements
/// and no dense table is needed. Otherwise the generated permutation group is
/// closed explicitly, which is only feasible for small images.
pub fn perm_image(
    t: &CosetTable,
    pres: &Presentation,
    element_cap: usize,
) -> Result<(GroupRef, Vec<Elem>)> {
    if t.trivial_subgroup {
        if t.coset_count > element_cap {
            return Err(Error::ElementCapExceeded { cap: element_cap });
        }
        let gen_images: Vec<Elem> = (0..t.ngens).map(|g| t.apply(0, g as i32 + 1)).collect();
        let rep = RegularRep::new(t.width, t.action.clone(), t.def.clone(), t.visit_order.clone());
        let g = GroupTable::from_regular(pres.name.clone(), t.coset_count, rep, gen_images.clone());
        if t.coset_count <= DENSE_THRESHOLD {
            let dense = g.densify(None);
            let images = gen_images;
            return Ok((dense, images));
        }
        return Ok((g, gen_images));
    }

    // non-regular action: close the generated permutation group explicitly
    let degree = t.coset_count;
    let cap = element_cap.min(DENSE_THRESHOLD);
    let gen_perms: Vec<Vec<u32>> = (0..t.ngens)
        .map(|g| (0..degree as u32).map(|c| t.apply(c, g as i32 + 1)).collect())
        .collect();
    let id: Vec<u32> = (0..degree as u32).collect();
    let mut elems: Vec<Vec<u32>> = vec![id.clone()];
    let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
    index.insert(id, 0);
    let mut frontier = VecDeque::from([0u32]);
    while let Some(i) = frontier.pop_front() {
        for gp in &gen_perms {
            let p = &elems[i as usize];
            let q: Vec<u32> = p.iter().map(|&x| gp[x as usize]).collect();
            if !index.contains_key(&q) {
                if elems.len() >= cap {
                    return Err(Error::ElementCapExceeded { cap });
                }
                let id = elems.len() as u32;
                index.insert(q.clone(), id);
                elems.push(q);
                frontier.push_back(id);
            }
        }
    }
    let n = elems.len();
    let mut mul = vec![0u32; n * n];
    for (i, a) in elems.iter().enumerate() {
        for (j, b) in elems.iter().enumerate() {
            let q: Vec<u32> = a.iter().map(|&x| b[x as usize]).collect();
            mul[i * n + j] = index[&q];
        }
    }
    let gen_images: Vec<Elem> = gen_perms.iter().map(|p| index[p]).collect();
    let gens: Vec<Elem> = {
        let mut v: Vec<Elem> = gen_images.iter().copied().filter(|&g| g != 0).collect();
        v.dedup();
        if v.is_empty() {
            v.push(0);
        }
        v
    };
    let g = GroupTable::from_dense_parts(pres.name.clone(), n, mul, Some(gens));
    Ok((g, gen_images))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(gens: &str, rels: &[&str]) -> Presentation {
        let names: Vec<String> = gens.chars().map(|c| c.to_string()).collect();
        let relators = rels.iter().map(|r| parse_word(r, &names).unwrap()).collect();
        Presentation::new("test", names, relators).unwrap()
    }

    #[test]
    fn cyclic_four() {
        let p = pres("a", &["a^4"]);
        let t = todd_coxeter(&p, &[], 100).unwrap();
        assert_eq!(t.coset_count, 4);
        let (g, images) = perm_image(&t, &p, 1 << 20).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.elem_order(images[0]), 4);
    }

    #[test]
    fn trivial_presentation() {
        let p = pres("a", &["a"]);
        let t = todd_coxeter(&p, &[], 100).unwrap();
        assert_eq!(t.coset_count, 1);
        let (g, _) = perm_image(&t, &p, 1 << 20).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn s3_over_subgroup() {
        // index of <b> in <a,b | a^3, b^2, abab> is |S3| / 2 = 3
        let p = pres("ab", &["a^3", "b^2", "abab"]);
        let names = p.generator_names.clone();
        let sub = vec![parse_word("b", &names).unwrap()];
        let t = todd_coxeter(&p, &sub, 100).unwrap();
        assert_eq!(t.coset_count, 3);
        // the permutation image on 3 cosets is all of S3
        let (g, _) = perm_image(&t, &p, 1 << 20).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
    }

    #[test]
    fn s3_over_trivial() {
        let p = pres("ab", &["a^3", "b^2", "abab"]);
        let t = todd_coxeter(&p, &[], 100).unwrap();
        assert_eq!(t.coset_count, 6);
        let (g, _) = perm_image(&t, &p, 1 << 20).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
    }

    #[test]
    fn quaternion_group() {
        let p = pres("ab", &["a^4", "a^2B^2", "b'aba"]);
        let t = todd_coxeter(&p, &[], 100).unwrap();
        assert_eq!(t.coset_count, 8);
        let (g, _) = perm_image(&t, &p, 1 << 20).unwrap();
        // Q8: a unique element of order 2
        let twos = g.elements().filter(|&e| g.elem_order(e) == 2).count();
        assert_eq!(twos, 1);
    }

    #[test]
    fn overflow_reported() {
        let p = pres("a", &["a^100"]);
        match todd_coxeter(&p, &[], 10) {
            Err(Error::Overflow { max_cosets }) => assert_eq!(max_cosets, 10),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let p = pres("ab", &["a^6", "b^2", "abab"]);
        let t1 = todd_coxeter(&p, &[], 1000).unwrap();
        let t2 = todd_coxeter(&p, &[], 1000).unwrap();
        assert_eq!(t1.canonical_bytes(), t2.canonical_bytes());
        assert_eq!(t1.coset_count, 12);
    }

    #[test]
    fn collapse_to_trivial_group() {
        // adding a = b and ab = 1 to S3 forces everything to collapse
        let p = pres("ab", &["a^3", "b^2", "abab", "aB", "ab"]);
        let t = todd_coxeter(&p, &[], 100).unwrap();
        assert_eq!(t.coset_count, 1);
    }

    #[test]
    fn cayley_table_roundtrip() {
        // present a group by its full multiplication table: one generator per
        // element, one relator per product; enumeration recovers the order
        for g in [GroupTable::cyclic(5), crate::group::tests::s3()] {
            let n = g.order();
            let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
            let mut relators = Vec::new();
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    let c = g.mul(a, b);
                    relators.push(Word::from_letters([
                        a as i32 + 1,
                        b as i32 + 1,
                        -(c as i32 + 1),
                    ]));
                }
            }
            let p = Presentation::new("cayley", names, relators).unwrap();
            let t = todd_coxeter(&p, &[], 4 * n + 10).unwrap();
            assert_eq!(t.coset_count, n, "cayley presentation of {}", g.name());
        }
    }
}
