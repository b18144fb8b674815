//! Ground-truth verification of collusion-security properties on explicit
//! codes, and the non-separation witness for linear codes built from a
//! codeword with a separable component set.
//!
//! The verifiers are exhaustive: `is_separating` checks every pair of
//! disjoint coalitions of bounded sizes, `is_ipp` every candidate forgery,
//! `is_ta` every coalition/descendant pair. Descendant sets are per-position
//! product sets, so two coalitions share a descendant iff their projections
//! intersect at every position; that is what the separating check tests.
//!
//! All searches are deterministic: coalitions are enumerated by ascending
//! size then lexicographic member indices, and the first verified
//! counterexample in that order is returned, even when the outer loop is
//! parallelized.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::rs::Codeword;
use crate::separability::{Mode, SepWitness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollusionError {
    #[error("codeword length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("explicit code must not contain duplicate words")]
    DuplicateWords,
    #[error("explicit code needs length >= 2 and at least one word")]
    TooSmall,
    #[error("constant codeword carries no information: |Im c| < 2")]
    ConstantWord,
    #[error("separability witness does not cover the codeword image")]
    CoverageGap,
    #[error("constructed witness failed re-verification")]
    VerificationFailed,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An explicit list of equal-length words over one field.
#[derive(Debug, Clone)]
pub struct ExplicitCode {
    field: Field,
    n: usize,
    words: Vec<Vec<u32>>,
}

impl ExplicitCode {
    pub fn new(field: Field, words: Vec<Vec<u32>>) -> Result<Self, CollusionError> {
        let Some(first) = words.first() else {
            return Err(CollusionError::TooSmall);
        };
        let n = first.len();
        if n < 2 {
            return Err(CollusionError::TooSmall);
        }
        for w in &words {
            if w.len() != n {
                return Err(CollusionError::LengthMismatch(n, w.len()));
            }
        }
        let distinct: BTreeSet<&Vec<u32>> = words.iter().collect();
        if distinct.len() != words.len() {
            return Err(CollusionError::DuplicateWords);
        }
        Ok(ExplicitCode { field, n, words })
    }

    pub fn from_codewords(field: Field, words: Vec<Codeword>) -> Result<Self, CollusionError> {
        ExplicitCode::new(field, words.into_iter().map(|c| c.components().to_vec()).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[Vec<u32>] {
        &self.words
    }

    /// Minimum pairwise Hamming distance; None for single-word codes.
    pub fn min_distance(&self) -> Option<u64> {
        let mut best: Option<u64> = None;
        for i in 0..self.words.len() {
            for j in i + 1..self.words.len() {
                let d = hamming(&self.words[i], &self.words[j]);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }
}

pub fn hamming(a: &[u32], b: &[u32]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// d > n(1 - 1/w^2), the distance bound that forces w-TA (and the chain down
/// to (w,w)-separating).
pub fn ta_distance_bound(n: u64, d: u64, w: u64) -> bool {
    d * w * w > n * (w * w - 1)
}

/// d > n(1 - 1/(w1 w2)), sufficient for (w1,w2)-separation.
pub fn separating_distance_bound(n: u64, d: u64, w1: u64, w2: u64) -> bool {
    let w = w1 * w2;
    d * w > n * (w - 1)
}

/// x is in desc(U): every component appears at that position in some member.
pub fn in_descendant(x: &[u32], members: &[&[u32]]) -> Result<bool, CollusionError> {
    for m in members {
        if m.len() != x.len() {
            return Err(CollusionError::LengthMismatch(x.len(), m.len()));
        }
    }
    Ok(x.iter().enumerate().all(|(i, &xi)| members.iter().any(|m| m[i] == xi)))
}

/// Lazily enumerates desc(U) = the product of per-position alphabets, in
/// lexicographic (positionwise) order. Errors when the product exceeds the
/// guard.
pub fn descendant_set(
    members: &[&[u32]],
    guard: u128,
) -> Result<impl Iterator<Item = Vec<u32>>, CollusionError> {
    let Some(first) = members.first() else {
        return Err(CollusionError::TooSmall);
    };
    let n = first.len();
    for m in members {
        if m.len() != n {
            return Err(CollusionError::LengthMismatch(n, m.len()));
        }
    }
    let alphabets: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let s: BTreeSet<u32> = members.iter().map(|m| m[i]).collect();
            s.into_iter().collect()
        })
        .collect();
    let total: u128 = alphabets.iter().map(|a| a.len() as u128).product();
    if total > guard {
        return Err(CollusionError::VerificationFailed);
    }
    Ok(ProductIter { alphabets, idx: vec![0; n], done: false })
}

struct ProductIter {
    alphabets: Vec<Vec<u32>>,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for ProductIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let word: Vec<u32> =
            self.idx.iter().enumerate().map(|(i, &j)| self.alphabets[i][j]).collect();
        // odometer, last position fastest
        let mut i = self.alphabets.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.idx[i] += 1;
            if self.idx[i] < self.alphabets[i].len() {
                break;
            }
            self.idx[i] = 0;
        }
        Some(word)
    }
}

/// Two disjoint coalitions of bounded sizes with a common descendant word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonSepWitness {
    #[serde(skip)]
    pub field: Field,
    #[serde(rename = "U1")]
    pub u1: Vec<Vec<u32>>,
    #[serde(rename = "U2")]
    pub u2: Vec<Vec<u32>>,
    pub x: Vec<u32>,
}

impl NonSepWitness {
    pub fn verify(&self, w1: u64, w2: u64) -> bool {
        let set1: BTreeSet<&Vec<u32>> = self.u1.iter().collect();
        let set2: BTreeSet<&Vec<u32>> = self.u2.iter().collect();
        if set1.is_empty()
            || set2.is_empty()
            || set1.len() as u64 > w1
            || set2.len() as u64 > w2
            || !set1.is_disjoint(&set2)
        {
            return false;
        }
        let m1: Vec<&[u32]> = self.u1.iter().map(|w| w.as_slice()).collect();
        let m2: Vec<&[u32]> = self.u2.iter().map(|w| w.as_slice()).collect();
        matches!(in_descendant(&self.x, &m1), Ok(true))
            && matches!(in_descendant(&self.x, &m2), Ok(true))
    }
}

#[derive(Debug, Clone)]
pub enum SeparatingOutcome {
    Holds,
    Fails(NonSepWitness),
    GuardExceeded,
}

#[derive(Debug, Clone)]
pub enum IppOutcome {
    Holds,
    Fails {
        x: Vec<u32>,
        /// Index sets of all coalitions of size <= w with x in their
        /// descendant set; their intersection is empty.
        coalitions: Vec<Vec<usize>>,
    },
    GuardExceeded,
}

#[derive(Debug, Clone)]
pub enum TaOutcome {
    Holds,
    Fails {
        x: Vec<u32>,
        coalition: Vec<usize>,
        /// An outsider at distance <= every coalition member's distance.
        rival: usize,
    },
    GuardExceeded,
}

fn count_coalitions(m: usize, wmax: u64) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for j in 1..=wmax.min(m as u64) {
        binom = binom.saturating_mul((m as u128) - (j as u128) + 1) / j as u128;
        total = total.saturating_add(binom);
    }
    total
}

/// All index subsets of {0..m} of size 1..=wmax, ascending size then
/// lexicographic. Materialized; callers guard the count first.
fn coalitions(m: usize, wmax: u64) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let wmax = wmax.min(m as u64) as usize;
    for size in 1..=wmax {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            out.push(combo.clone());
            let mut i = size;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if combo[i] != i + m - size {
                    combo[i] += 1;
                    for j in i + 1..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    out
}

/// Per-position membership masks of a coalition's projections.
struct Projection {
    words: usize, // u64 words per position
    bits: Vec<u64>,
}

impl Projection {
    fn build(code: &ExplicitCode, coalition: &[usize]) -> Self {
        let q = code.field.q() as usize;
        let words = q.div_ceil(64);
        let mut bits = vec![0u64; code.n * words];
        for &ci in coalition {
            for (i, &c) in code.words[ci].iter().enumerate() {
                bits[i * words + c as usize / 64] |= 1u64 << (c % 64);
            }
        }
        Projection { words, bits }
    }

    fn contains(&self, pos: usize, code: u32) -> bool {
        self.bits[pos * self.words + code as usize / 64] >> (code % 64) & 1 == 1
    }
}

/// Exhaustive (w1,w2)-separation check over all pairs of disjoint coalitions.
pub fn is_separating(code: &ExplicitCode, w1: u64, w2: u64, guard: u128) -> SeparatingOutcome {
    let m = code.len();
    let pairs = count_coalitions(m, w1).saturating_mul(count_coalitions(m, w2));
    if pairs.saturating_mul(code.n as u128) > guard {
        return SeparatingOutcome::GuardExceeded;
    }
    let outer = coalitions(m, w1);
    let inner = coalitions(m, w2);
    let hit = outer.par_iter().find_map_first(|u1| {
        let proj = Projection::build(code, u1);
        let u1set: BTreeSet<usize> = u1.iter().copied().collect();
        for u2 in &inner {
            if u2.iter().any(|i| u1set.contains(i)) {
                continue;
            }
            // shared descendant iff projections meet at every position
            let mut x = Vec::with_capacity(code.n);
            let mut ok = true;
            for pos in 0..code.n {
                let mut best: Option<u32> = None;
                for &ci in u2 {
                    let c = code.words[ci][pos];
                    if proj.contains(pos, c) {
                        best = Some(best.map_or(c, |b| b.min(c)));
                    }
                }
                match best {
                    Some(c) => x.push(c),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Some(NonSepWitness {
                    field: code.field.clone(),
                    u1: u1.iter().map(|&i| code.words[i].clone()).collect(),
                    u2: u2.iter().map(|&i| code.words[i].clone()).collect(),
                    x,
                });
            }
        }
        None
    });
    match hit {
        Some(w) => {
            debug_assert!(w.verify(w1, w2));
            SeparatingOutcome::Fails(w)
        }
        None => SeparatingOutcome::Holds,
    }
}

/// Exhaustive w-IPP check: every word of the per-position product alphabet
/// either has no candidate coalition or all candidates share a member.
pub fn is_ipp(code: &ExplicitCode, w: u64, guard: u128) -> IppOutcome {
    let m = code.len();
    let coals = count_coalitions(m, w);
    let alphabets: Vec<Vec<u32>> = (0..code.n)
        .map(|i| {
            let s: BTreeSet<u32> = code.words.iter().map(|wd| wd[i]).collect();
            s.into_iter().collect()
        })
        .collect();
    let space: u128 = alphabets.iter().map(|a| a.len() as u128).product();
    if space
        .saturating_mul(coals)
        .saturating_mul(code.n as u128)
        .saturating_mul(w as u128)
        > guard
    {
        return IppOutcome::GuardExceeded;
    }
    let coals = coalitions(m, w);
    let mut iter = ProductIter { idx: vec![0; code.n], alphabets, done: false };
    let words: Vec<&[u32]> = code.words.iter().map(|v| v.as_slice()).collect();
    loop {
        let Some(x) = iter.next() else {
            return IppOutcome::Holds;
        };
        let mut matching: Vec<&Vec<usize>> = Vec::new();
        for u in &coals {
            let members: Vec<&[u32]> = u.iter().map(|&i| words[i]).collect();
            if in_descendant(&x, &members).expect("lengths agree") {
                matching.push(u);
            }
        }
        if matching.is_empty() {
            continue;
        }
        let mut common: BTreeSet<usize> = matching[0].iter().copied().collect();
        for u in &matching[1..] {
            common.retain(|i| u.contains(i));
            if common.is_empty() {
                break;
            }
        }
        if common.is_empty() {
            return IppOutcome::Fails {
                x,
                coalitions: matching.into_iter().cloned().collect(),
            };
        }
    }
}

/// Exhaustive w-TA check: for every coalition and every descendant, some
/// member must be strictly closer than every outsider.
pub fn is_ta(code: &ExplicitCode, w: u64, guard: u128) -> TaOutcome {
    let m = code.len();
    let coals = coalitions(m, w);
    let mut work: u128 = 0;
    for u in &coals {
        let desc_size: u128 = (0..code.n)
            .map(|i| {
                let s: BTreeSet<u32> = u.iter().map(|&ci| code.words[ci][i]).collect();
                s.len() as u128
            })
            .product();
        work = work.saturating_add(
            desc_size.saturating_mul(m as u128).saturating_mul(code.n as u128),
        );
    }
    if work > guard {
        return TaOutcome::GuardExceeded;
    }
    for u in &coals {
        if u.len() == m {
            continue; // no outsiders: vacuously fine
        }
        let members: Vec<&[u32]> = u.iter().map(|&i| code.words[i].as_slice()).collect();
        let desc = descendant_set(&members, u128::MAX).expect("sized above");
        for x in desc {
            let min_in = u.iter().map(|&i| hamming(&x, &code.words[i])).min().unwrap();
            let rival = (0..m)
                .filter(|i| !u.contains(i))
                .map(|i| (hamming(&x, &code.words[i]), i))
                .min();
            if let Some((dist_out, rival)) = rival {
                if dist_out <= min_in {
                    return TaOutcome::Fails { x, coalition: u.clone(), rival };
                }
            }
        }
    }
    TaOutcome::Holds
}

/// Builds the two-coalition witness behind non-separation of a linear code
/// from a codeword whose component set the witness covers: constants from E
/// on one side, shifted (or scaled) copies of c on the other, and the word
/// of E-parts as the common descendant. The ambient code must be linear and
/// contain both c and the all-ones word; the caller asserts that.
pub fn witness_from_separable_image(
    c: &Codeword,
    sep: &SepWitness,
) -> Result<NonSepWitness, CollusionError> {
    let field = c.field().clone();
    let image = c.image();
    if image.len() < 2 {
        return Err(CollusionError::ConstantWord);
    }
    if !sep.covers(&image) {
        return Err(CollusionError::CoverageGap);
    }
    let comps = c.components();

    let witness = match sep.mode {
        Mode::Additive => {
            // per-position decomposition c_i = beta + gamma
            let mut x = Vec::with_capacity(comps.len());
            for &ci in comps {
                let beta = sep
                    .e
                    .iter()
                    .copied()
                    .find(|&b| sep.f.contains(&field.sub_code(ci, b)))
                    .expect("coverage checked");
                x.push(beta);
            }
            let ones = vec![1u32; comps.len()];
            let u1: Vec<Vec<u32>> = sep
                .e
                .iter()
                .map(|&b| ones.iter().map(|&o| field.mul_code(b, o)).collect())
                .collect();
            let u2: Vec<Vec<u32>> = sep
                .f
                .iter()
                .map(|&g| comps.iter().map(|&ci| field.sub_code(ci, g)).collect())
                .collect();
            NonSepWitness { field: field.clone(), u1, u2, x }
        }
        Mode::Multiplicative => {
            let has_zero_pos = comps.contains(&0);
            if !has_zero_pos || sep.e.contains(&0) {
                // constants from E, scaled copies of c from F
                let mut x = Vec::with_capacity(comps.len());
                for &ci in comps {
                    let beta = if ci == 0 {
                        0
                    } else {
                        sep.e
                            .iter()
                            .copied()
                            .filter(|&b| b != 0)
                            .find(|&b| {
                                sep.f.contains(&field.div_code(ci, b).expect("b nonzero"))
                            })
                            .expect("coverage checked")
                    };
                    x.push(beta);
                }
                let u1: Vec<Vec<u32>> =
                    sep.e.iter().map(|&b| vec![b; comps.len()]).collect();
                let u2: Vec<Vec<u32>> = sep
                    .f
                    .iter()
                    .filter(|&&g| g != 0)
                    .map(|&g| {
                        let ginv = field.inv_code(g).expect("g nonzero");
                        comps.iter().map(|&ci| field.mul_code(ginv, ci)).collect()
                    })
                    .collect();
                NonSepWitness { field: field.clone(), u1, u2, x }
            } else if sep.f.contains(&0) {
                // roles swapped: scaled copies of c from E, constants from F
                let mut x = Vec::with_capacity(comps.len());
                for &ci in comps {
                    let gamma = if ci == 0 {
                        0
                    } else {
                        sep.f
                            .iter()
                            .copied()
                            .filter(|&g| g != 0)
                            .find(|&g| {
                                let need = field.div_code(ci, g).expect("g nonzero");
                                sep.e.contains(&need)
                            })
                            .expect("coverage checked")
                    };
                    x.push(gamma);
                }
                let u1: Vec<Vec<u32>> = sep
                    .e
                    .iter()
                    .filter(|&&b| b != 0)
                    .map(|&b| {
                        let binv = field.inv_code(b).expect("b nonzero");
                        comps.iter().map(|&ci| field.mul_code(binv, ci)).collect()
                    })
                    .collect();
                let u2: Vec<Vec<u32>> = sep.f.iter().map(|&g| vec![g; comps.len()]).collect();
                NonSepWitness { field: field.clone(), u1, u2, x }
            } else {
                return Err(CollusionError::CoverageGap);
            }
        }
    };

    if witness.verify(sep.w1, sep.w2) {
        Ok(witness)
    } else {
        Err(CollusionError::VerificationFailed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::rs::{encode, Poly, RsSpec};
    use crate::separability::{check_witness, Mode, SepWitness};

    fn code2(words: &[&[u32]]) -> ExplicitCode {
        let f = make_field(2, 1).unwrap();
        ExplicitCode::new(f, words.iter().map(|w| w.to_vec()).collect()).unwrap()
    }

    #[test]
    fn in_descendant_examples() {
        let y = [1u32, 0, 1];
        assert!(in_descendant(&y, &[&y]).unwrap());
        let u: Vec<&[u32]> = vec![&[0, 0], &[1, 1]];
        assert!(in_descendant(&[0, 1], &u).unwrap());
        let f3u: Vec<&[u32]> = vec![&[0, 0], &[1, 1]];
        assert!(!in_descendant(&[2, 0], &f3u).unwrap());
        assert!(in_descendant(&[0, 1, 2], &[&[0, 0]]).is_err());
    }

    #[test]
    fn descendant_set_counts() {
        let single: Vec<&[u32]> = vec![&[3, 1, 4]];
        assert_eq!(descendant_set(&single, 1 << 20).unwrap().count(), 1);
        let two: Vec<&[u32]> = vec![&[0, 0], &[1, 1]];
        let all: Vec<Vec<u32>> = descendant_set(&two, 1 << 20).unwrap().collect();
        assert_eq!(all.len(), 4);
        let rs: Vec<&[u32]> = vec![&[1, 2, 4, 3], &[2, 4, 3, 1]];
        assert_eq!(descendant_set(&rs, 1 << 20).unwrap().count(), 16);
    }

    #[test]
    fn desc_monotone_under_inclusion() {
        let f5 = make_field(5, 1).unwrap();
        let words: Vec<Vec<u32>> = vec![
            vec![1, 2, 4, 3],
            vec![2, 4, 3, 1],
            vec![0, 1, 2, 3],
        ];
        let code = ExplicitCode::new(f5, words).unwrap();
        let small: Vec<&[u32]> = vec![&code.words()[0], &code.words()[1]];
        let big: Vec<&[u32]> =
            vec![&code.words()[0], &code.words()[1], &code.words()[2]];
        for x in descendant_set(&small, 1 << 20).unwrap() {
            assert!(in_descendant(&x, &big).unwrap());
        }
        // U subset of desc(U)
        for w in &small {
            assert!(in_descendant(w, &small).unwrap());
        }
    }

    #[test]
    fn separating_examples() {
        // RS_2(5) is not (2,2)-separating.
        let f5 = make_field(5, 1).unwrap();
        let spec = RsSpec::new(f5.clone(), 2).unwrap();
        let words = crate::rs::enumerate_codewords(&spec, 1 << 20).unwrap();
        let code = ExplicitCode::from_codewords(f5, words).unwrap();
        match is_separating(&code, 2, 2, 1 << 40) {
            SeparatingOutcome::Fails(w) => assert!(w.verify(2, 2)),
            other => panic!("expected Fails, got {other:?}"),
        }

        // single-codeword code holds vacuously
        let f2 = make_field(2, 1).unwrap();
        let one = ExplicitCode::new(f2, vec![vec![0, 1]]).unwrap();
        assert!(matches!(is_separating(&one, 2, 2, 1 << 30), SeparatingOutcome::Holds));

        // distance bound forces separation
        let f3 = make_field(3, 1).unwrap();
        let rep = ExplicitCode::new(
            f3,
            vec![vec![0, 0, 0, 0], vec![1, 1, 1, 1], vec![2, 2, 2, 2]],
        )
        .unwrap();
        assert!(separating_distance_bound(4, 4, 2, 2));
        assert!(matches!(is_separating(&rep, 2, 2, 1 << 30), SeparatingOutcome::Holds));
    }

    #[test]
    fn ipp_examples() {
        let f3 = make_field(3, 1).unwrap();
        let rep = ExplicitCode::new(f3, vec![vec![0, 0], vec![1, 1], vec![2, 2]]).unwrap();
        assert!(matches!(is_ipp(&rep, 2, 1 << 30), IppOutcome::Holds));

        let all = code2(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        match is_ipp(&all, 2, 1 << 30) {
            IppOutcome::Fails { x, coalitions } => {
                assert!(coalitions.len() >= 2);
                let words: Vec<&[u32]> = all.words().iter().map(|w| w.as_slice()).collect();
                for u in &coalitions {
                    let members: Vec<&[u32]> = u.iter().map(|&i| words[i]).collect();
                    assert!(in_descendant(&x, &members).unwrap());
                }
                let mut common: BTreeSet<usize> = coalitions[0].iter().copied().collect();
                for u in &coalitions[1..] {
                    common.retain(|i| u.contains(i));
                }
                assert!(common.is_empty());
            }
            other => panic!("expected Fails, got {other:?}"),
        }
    }

    #[test]
    fn ta_examples() {
        // |C| <= w holds vacuously
        let two = code2(&[&[0, 0], &[1, 1]]);
        assert!(matches!(is_ta(&two, 2, 1 << 30), TaOutcome::Holds));

        let f3 = make_field(3, 1).unwrap();
        let rep = ExplicitCode::new(
            f3,
            vec![vec![0, 0, 0, 0], vec![1, 1, 1, 1], vec![2, 2, 2, 2]],
        )
        .unwrap();
        assert!(ta_distance_bound(4, 4, 2));
        assert!(matches!(is_ta(&rep, 2, 1 << 30), TaOutcome::Holds));

        // the full space is never TA once coalitions can straddle it
        let all = code2(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert!(matches!(is_ta(&all, 2, 1 << 30), TaOutcome::Fails { .. }));
    }

    #[test]
    fn thm21_engine_multiplicative() {
        let f5 = make_field(5, 1).unwrap();
        let spec = RsSpec::new(f5.clone(), 2).unwrap();
        let c = encode(&spec, &Poly::x(&f5)).unwrap();
        let sep = SepWitness {
            mode: Mode::Multiplicative,
            field: f5.clone(),
            e: [1u32, 4].into(),
            f: [1u32, 2].into(),
            w1: 2,
            w2: 2,
        };
        assert!(check_witness(&c.image(), &sep));
        let w = witness_from_separable_image(&c, &sep).unwrap();
        assert!(w.verify(2, 2));
        assert_eq!(w.x, vec![1, 1, 4, 4]);
    }

    #[test]
    fn thm21_engine_rejects_constants() {
        let f5 = make_field(5, 1).unwrap();
        let spec = RsSpec::new(f5.clone(), 2).unwrap();
        let c = encode(&spec, &Poly::constant(&f5, 3)).unwrap();
        let sep = SepWitness {
            mode: Mode::Additive,
            field: f5,
            e: [3u32].into(),
            f: [0u32].into(),
            w1: 1,
            w2: 1,
        };
        assert!(matches!(
            witness_from_separable_image(&c, &sep),
            Err(CollusionError::ConstantWord)
        ));
    }

    #[test]
    fn thm21_engine_additive_with_zero() {
        // c = ev(x^4 + x) over GF(16): image is an additive subgroup of order
        // 4 (zero included since the kernel F_4 meets the evaluation points).
        let f16 = make_field(2, 4).unwrap();
        let spec = RsSpec::new(f16.clone(), 5).unwrap();
        let mut coeffs = vec![0u32; 5];
        coeffs[4] = 1;
        coeffs[1] = 1;
        let c = encode(&spec, &Poly::from_codes(&f16, coeffs).unwrap()).unwrap();
        let image = c.image();
        assert_eq!(image.len(), 4);
        let basis = crate::field::independent_subset(&f16, &image.iter().copied().collect::<Vec<_>>());
        let sep = crate::separability::witness_add_subgroups(&f16, &basis, 2, 2)
            .unwrap()
            .unwrap();
        assert!(check_witness(&image, &sep));
        let w = witness_from_separable_image(&c, &sep).unwrap();
        assert!(w.verify(2, 2));
        // and the materialized RS code really fails separation on this pair
        let m1: Vec<&[u32]> = w.u1.iter().map(|v| v.as_slice()).collect();
        assert!(in_descendant(&w.x, &m1).unwrap());
    }

    #[test]
    fn prop_chain_on_small_codes() {
        // TA => IPP => (w,w)-separating, exhaustively for q <= 3, n <= 3.
        for (q, n) in [(2u32, 2usize), (2, 3), (3, 2)] {
            let f = make_field(q, 1).unwrap();
            let all_words: Vec<Vec<u32>> = {
                let mut out = Vec::new();
                let total = (q as u64).pow(n as u32);
                for t in 0..total {
                    let mut w = Vec::with_capacity(n);
                    let mut v = t;
                    for _ in 0..n {
                        w.push((v % q as u64) as u32);
                        v /= q as u64;
                    }
                    out.push(w);
                }
                out
            };
            // all subsets of the word space of size 2..=4 as codes
            let total = all_words.len();
            for mask in 1u32..(1 << total) {
                let words: Vec<Vec<u32>> = (0..total)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| all_words[i].clone())
                    .collect();
                if words.len() < 2 || words.len() > 4 {
                    continue;
                }
                let code = ExplicitCode::new(f.clone(), words).unwrap();
                let ta = matches!(is_ta(&code, 2, 1 << 32), TaOutcome::Holds);
                let ipp = matches!(is_ipp(&code, 2, 1 << 32), IppOutcome::Holds);
                let sep = matches!(is_separating(&code, 2, 2, 1 << 32), SeparatingOutcome::Holds);
                if ta {
                    assert!(ipp, "TA without IPP at q={q} n={n} mask={mask}");
                }
                if ipp {
                    assert!(sep, "IPP without separation at q={q} n={n} mask={mask}");
                }
            }
        }
    }

    #[test]
    fn separating_agrees_with_naive() {
        // Cross-check against direct descendant-set intersection.
        let f3 = make_field(3, 1).unwrap();
        let mut seed = 7u64;
        let mut rnd = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) as usize
        };
        for _ in 0..40 {
            let n = 2 + rnd() % 3;
            let count = 2 + rnd() % 4;
            let mut words = BTreeSet::new();
            while words.len() < count {
                words.insert((0..n).map(|_| (rnd() % 3) as u32).collect::<Vec<u32>>());
            }
            let code = ExplicitCode::new(f3.clone(), words.into_iter().collect()).unwrap();
            let fast = matches!(is_separating(&code, 2, 2, 1 << 32), SeparatingOutcome::Holds);
            // naive: materialize descendant sets
            let coals = coalitions(code.len(), 2);
            let mut naive = true;
            'outer: for u1 in &coals {
                for u2 in &coals {
                    if u1.iter().any(|i| u2.contains(i)) {
                        continue;
                    }
                    let m1: Vec<&[u32]> = u1.iter().map(|&i| code.words()[i].as_slice()).collect();
                    let m2: Vec<&[u32]> = u2.iter().map(|&i| code.words()[i].as_slice()).collect();
                    let d1: BTreeSet<Vec<u32>> = descendant_set(&m1, 1 << 20).unwrap().collect();
                    if descendant_set(&m2, 1 << 20).unwrap().any(|x| d1.contains(&x)) {
                        naive = false;
                        break 'outer;
                    }
                }
            }
            assert_eq!(fast, naive);
        }
    }
}
