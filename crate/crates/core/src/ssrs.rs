//! Cyclotomic cosets and the binary dimension of subspace subcodes of
//! Reed-Solomon codes over GF(2^m).
//!
//! For C = RS_k(2^m) and a v-dimensional GF(2)-subspace S, the subcode of
//! words with every component in S is a GF(2)-linear space. Its dimension
//! K(C,S) is computed here exactly, as m*k minus the GF(2) rank of the
//! constraint system "every component's projection onto a complement of S
//! vanishes"; the classical coset lower bound
//! L(k,v) = sum_j max(d_j*(a_j - (m-v)), 0) is computed alongside with its
//! per-coset breakdown. The subcode is called trivial when its dimension is
//! at most v (only constant-like words), which is what the classifier's
//! subcode rule must rule out.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitMatrix;
use crate::field::{self, Field, FieldError};
use crate::rs::Poly;
use crate::separability::{floor_log, lemma31_hypothesis, BracketReading};

/// Caps for the exact rank computation.
pub const EXACT_M_CAP: u32 = 12;
pub const EXACT_K_CAP: u64 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SsrsError {
    #[error("parameters out of range: m={m}, k={k}, v={v}")]
    BadParams { m: u32, k: u64, v: u32 },
    #[error("exact computation capped at m <= {EXACT_M_CAP}, k <= {EXACT_K_CAP}")]
    CapExceeded,
    #[error("subspace subcodes are computed over characteristic 2 only")]
    NotBinary,
    #[error("GF(2^{v}) is a subfield of GF(2^{m}) only when v divides m")]
    NoSubfield { v: u32, m: u32 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// One orbit of multiplication by 2 on residues mod n = 2^m - 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclotomicCoset {
    pub leader: u64,
    pub elements: Vec<u64>,
    pub d: u32,
}

/// Cosets mod 2^m - 1, cached per m; they partition {0, .., n-1} and each is
/// closed under doubling.
pub fn cyclotomic_cosets(m: u32) -> Arc<Vec<CyclotomicCoset>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<CyclotomicCoset>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&m) {
        return hit.clone();
    }
    assert!(m >= 2, "cosets need m >= 2");
    let n = (1u64 << m) - 1;
    let mut seen = vec![false; n as usize];
    let mut cosets = Vec::new();
    for leader in 0..n {
        if seen[leader as usize] {
            continue;
        }
        let mut elements = Vec::new();
        let mut x = leader;
        loop {
            seen[x as usize] = true;
            elements.push(x);
            x = x * 2 % n;
            if x == leader {
                break;
            }
        }
        elements.sort_unstable();
        let d = elements.len() as u32;
        cosets.push(CyclotomicCoset { leader, elements, d });
    }
    let arc = Arc::new(cosets);
    cache.lock().unwrap().insert(m, arc.clone());
    arc
}

/// Per-coset contribution to the lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetRow {
    pub j: u64,
    pub d: u32,
    pub e: u64,
    pub a: u64,
    pub term: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SsrsDims {
    pub m: u32,
    pub k: u64,
    pub v: u32,
    pub lower_bound: u64,
    pub exact: Option<u64>,
    pub rows: Vec<CosetRow>,
}

/// L(k,v): the coset-sum lower bound on the binary dimension, with its
/// per-coset table. Degree indices J = {1..k} are counted as residues mod n.
pub fn lower_bound_l(m: u32, k: u64, v: u32) -> Result<SsrsDims, SsrsError> {
    let n = (1u64 << m) - 1;
    if m < 2 || k < 1 || k > n || v > m {
        return Err(SsrsError::BadParams { m, k, v });
    }
    let cosets = cyclotomic_cosets(m);
    let mut rows = Vec::with_capacity(cosets.len());
    let mut total = 0u64;
    for coset in cosets.iter() {
        let mut e = 0u64;
        for &x in &coset.elements {
            let first = if x == 0 { n } else { x };
            if first <= k {
                e += (k - first) / n + 1;
            }
        }
        debug_assert_eq!(m as u64 * e % coset.d as u64, 0);
        let a = m as u64 * e / coset.d as u64;
        let slack = (m - v) as u64;
        let term = if a > slack { coset.d as u64 * (a - slack) } else { 0 };
        total += term;
        rows.push(CosetRow { j: coset.leader, d: coset.d, e, a, term });
    }
    Ok(SsrsDims { m, k, v, lower_bound: total, exact: None, rows })
}

/// First v polynomial-basis vectors: the canonical v-dimensional subspace
/// (codes 1, 2, 4, ...). L(k,v) depends only on v, so this is the default S.
pub fn canonical_subspace_basis(field: &Field, v: u32) -> Vec<u32> {
    field::canonical_basis_codes(field, v)
}

/// Generator of the multiplicative group of the subfield GF(2^v) inside
/// GF(2^m); requires v | m.
pub fn subfield_generator(field: &Field, v: u32) -> Result<u32, SsrsError> {
    if field.p() != 2 {
        return Err(SsrsError::NotBinary);
    }
    let m = field.m();
    if v == 0 || m % v != 0 {
        return Err(SsrsError::NoSubfield { v, m });
    }
    let sub_order = (1u64 << v) - 1;
    Ok(field.alpha_pow((field.q() - 1) / sub_order))
}

/// GF(2)-basis of the subfield GF(2^v) inside GF(2^m); requires v | m.
pub fn subfield_basis(field: &Field, v: u32) -> Result<Vec<u32>, SsrsError> {
    let g = subfield_generator(field, v)?;
    let sub_order = (1u64 << v) - 1;
    let elems: Vec<u32> = (0..sub_order).map(|i| field.pow_code(g, i)).collect();
    let basis = field::independent_subset(field, &elems);
    debug_assert_eq!(basis.len() as u32, v);
    Ok(basis)
}

/// The binary constraint system for "the word indexed by f has every
/// component in S", rows indexed by (evaluation point, complement
/// functional), columns by the m*k coefficient bits of f. With `shift = 0`
/// the word is ev(f) (frequency support {0..k-1}); with `shift = 1` it is
/// ev(x*f) (support {1..k}), the convention the coset lower bound belongs to.
fn constraint_matrix(
    field: &Field,
    k: u64,
    s_basis: &[u32],
    shift: u64,
) -> Result<BitMatrix, SsrsError> {
    if field.p() != 2 {
        return Err(SsrsError::NotBinary);
    }
    let m = field.m();
    if m > EXACT_M_CAP || k > EXACT_K_CAP {
        return Err(SsrsError::CapExceeded);
    }
    let n = field.q() - 1;
    if k < 1 || k > n {
        return Err(SsrsError::BadParams { m, k, v: s_basis.len() as u32 });
    }
    let v = field::gfp_rank(field, s_basis);
    if v as usize != s_basis.len() {
        return Err(SsrsError::Field(FieldError::FieldMismatch));
    }

    // Functionals vanishing exactly on S: the nullspace of the basis rows.
    let mut smat = BitMatrix::zero(s_basis.len(), m as usize);
    for (r, &b) in s_basis.iter().enumerate() {
        for c in 0..m {
            if b >> c & 1 == 1 {
                smat.set(r, c as usize, true);
            }
        }
    }
    let functionals: Vec<u32> = smat
        .nullspace_basis()
        .into_iter()
        .map(|bits| {
            bits.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (u32::from(b) << i))
        })
        .collect();
    debug_assert_eq!(functionals.len() as u32, m - v);

    let rows = n as usize * functionals.len();
    let cols = (m as u64 * k) as usize;
    let mut mat = BitMatrix::zero(rows, cols);
    let mut row = 0usize;
    for i in 0..n {
        // alpha^(i*j) for the k coefficient slots
        for &phi in &functionals {
            for j in 0..k {
                let point_pow = field.alpha_pow(i * (j + shift) % n);
                for b in 0..m {
                    let entry = field.mul_code(1 << b, point_pow);
                    if (entry & phi).count_ones() % 2 == 1 {
                        mat.set(row, (j * m as u64 + b as u64) as usize, true);
                    }
                }
            }
            row += 1;
        }
    }
    Ok(mat)
}

fn exact_dim(field: &Field, k: u64, s_basis: &[u32], shift: u64) -> Result<u64, SsrsError> {
    if s_basis.len() as u32 == field.m() {
        return Ok(field.m() as u64 * k); // no constraints
    }
    if s_basis.is_empty() {
        return Ok(0); // only the zero word: a nonzero low-degree f has < n roots
    }
    let mat = constraint_matrix(field, k, s_basis, shift)?;
    let rank = mat.rank() as u64;
    Ok(field.m() as u64 * k - rank)
}

/// Exact binary dimension of the subspace subcode of the shifted-spectrum
/// code {ev(x*f) : f in P_k}. This is the quantity the coset lower bound
/// [`lower_bound_l`] actually bounds (L <= K holds; it fails for the plain
/// evaluation code already at m=2, k=2, v=1).
pub fn exact_k(field: &Field, k: u64, s_basis: &[u32]) -> Result<u64, SsrsError> {
    exact_dim(field, k, s_basis, 1)
}

/// Exact binary dimension of the subspace subcode of the plain evaluation
/// code RS_k = {ev(f) : deg f < k}; this is the code the classifier's
/// witnesses must live in.
pub fn exact_k_eval(field: &Field, k: u64, s_basis: &[u32]) -> Result<u64, SsrsError> {
    exact_dim(field, k, s_basis, 0)
}

/// A non-constant polynomial f with every component of ev(f) in S, when the
/// evaluation code's subspace subcode is non-trivial. Deterministic: first
/// qualifying nullspace basis vector.
pub fn eval_subcode_nonconstant_poly(
    field: &Field,
    k: u64,
    s_basis: &[u32],
) -> Result<Option<Poly>, SsrsError> {
    if s_basis.is_empty() {
        return Ok(None);
    }
    let m = field.m() as u64;
    if s_basis.len() as u32 == field.m() {
        // whole field: x itself qualifies when k >= 2
        if k >= 2 {
            return Ok(Some(Poly::x(field)));
        }
        return Ok(None);
    }
    let mat = constraint_matrix(field, k, s_basis, 0)?;
    for bits in mat.nullspace_basis() {
        let mut coeffs = vec![0u32; k as usize];
        for (col, &b) in bits.iter().enumerate() {
            if b {
                let j = col as u64 / m;
                let bit = col as u64 % m;
                coeffs[j as usize] |= 1 << bit;
            }
        }
        let poly = Poly::from_codes(field, coeffs).expect("codes in range");
        if !poly.is_constant() {
            return Ok(Some(poly));
        }
    }
    Ok(None)
}

/// Triviality test: the subcode is non-trivial when its dimension exceeds v.
/// The lower bound decides affirmatively; `refine_exact` escalates to the
/// rank computation when the bound alone says no.
pub fn is_nontrivial(m: u32, k: u64, v: u32, refine_exact: bool) -> Result<bool, SsrsError> {
    let dims = lower_bound_l(m, k, v)?;
    if dims.lower_bound > v as u64 {
        return Ok(true);
    }
    if !refine_exact {
        return Ok(false);
    }
    let field = field::make_field(2, m).map_err(SsrsError::Field)?;
    let basis = canonical_subspace_basis(&field, v);
    Ok(exact_k(&field, k, &basis)? > v as u64)
}

/// Largest v with 2^v <= w1*w2 such that GF(2^v) passes the three-branch
/// separability test under the given bracket reading.
pub fn best_v(w1: u64, w2: u64, reading: BracketReading) -> Option<u32> {
    let vmax = floor_log(2, w1.saturating_mul(w2));
    (1..=vmax)
        .rev()
        .find(|&v| lemma31_hypothesis(2, v, w1, w2, reading).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::rs::{encode, RsSpec};

    #[test]
    fn coset_examples() {
        let c11 = cyclotomic_cosets(11);
        let first = c11.iter().find(|c| c.leader == 1).unwrap();
        assert_eq!(first.elements, vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024]);
        assert_eq!(first.d, 11);

        for m in 2..=16 {
            let cosets = cyclotomic_cosets(m);
            let zero = cosets.iter().find(|c| c.leader == 0).unwrap();
            assert_eq!(zero.elements, vec![0]);
        }

        let c4 = cyclotomic_cosets(4);
        let five = c4.iter().find(|c| c.leader == 5).unwrap();
        assert_eq!(five.elements, vec![5, 10]);
        assert_eq!(five.d, 2);
    }

    #[test]
    fn cosets_partition_and_divide() {
        for m in 2..=16 {
            let n = (1u64 << m) - 1;
            let cosets = cyclotomic_cosets(m);
            let mut seen = std::collections::BTreeSet::new();
            for c in cosets.iter() {
                assert_eq!(c.leader, *c.elements.iter().min().unwrap());
                assert_eq!(m % c.d, 0, "d must divide m");
                for &x in &c.elements {
                    assert!(c.elements.contains(&(x * 2 % n)), "closed under doubling");
                    assert!(seen.insert(x), "cosets overlap at {x}");
                }
            }
            assert_eq!(seen.len() as u64, n);
        }
    }

    #[test]
    fn lower_bound_examples() {
        // j=1 contributes 11, everything else clamps to zero.
        let dims = lower_bound_l(11, 16, 7).unwrap();
        let first = dims.rows.iter().find(|r| r.j == 1).unwrap();
        assert_eq!((first.d, first.e, first.a, first.term), (11, 5, 5, 11));
        assert_eq!(dims.lower_bound, 11);

        let dims = lower_bound_l(7, 4, 5).unwrap();
        let first = dims.rows.iter().find(|r| r.j == 1).unwrap();
        assert_eq!(first.term, 7);
        assert_eq!(dims.lower_bound, 7);

        for m in 2..=10u32 {
            let n = (1u64 << m) - 1;
            for k in [1u64, 2, 3, n / 2, n - 1, n] {
                if k < 1 {
                    continue;
                }
                assert_eq!(
                    lower_bound_l(m, k, m).unwrap().lower_bound,
                    m as u64 * k,
                    "L(k, m) = mk at m={m} k={k}"
                );
            }
        }
    }

    #[test]
    fn lower_bound_monotone() {
        for m in [4u32, 6, 9] {
            let n = (1u64 << m) - 1;
            for k in 1..n.min(24) {
                for v in 0..m {
                    let a = lower_bound_l(m, k, v).unwrap().lower_bound;
                    let b = lower_bound_l(m, k, v + 1).unwrap().lower_bound;
                    assert!(a <= b, "monotone in v at m={m} k={k} v={v}");
                    let c = lower_bound_l(m, k + 1, v).unwrap().lower_bound;
                    assert!(a <= c, "monotone in k at m={m} k={k} v={v}");
                }
            }
        }
    }

    #[test]
    fn exact_k_edges() {
        let f = make_field(2, 4).unwrap();
        let full = canonical_subspace_basis(&f, 4);
        assert_eq!(exact_k(&f, 3, &full).unwrap(), 12);
        assert_eq!(exact_k(&f, 3, &[]).unwrap(), 0);
    }

    #[test]
    fn exact_k_matches_enumeration() {
        // Count words inside S^n directly, under both spectrum conventions,
        // and compare dimensions.
        for m in 2..=4u32 {
            let f = make_field(2, m).unwrap();
            let n = f.q() - 1;
            for k in 1..=3u64.min(n) {
                for v in 0..=m {
                    let basis = canonical_subspace_basis(&f, v);
                    let sset: std::collections::BTreeSet<u32> =
                        field::span_codes(&f, &basis);
                    let spec = RsSpec::new(f.clone(), k).unwrap();
                    let words = crate::rs::enumerate_codewords(&spec, 1 << 20).unwrap();
                    // plain evaluation code ev(f)
                    let kdim_eval = exact_k_eval(&f, k, &basis).unwrap();
                    let count = words
                        .iter()
                        .filter(|c| c.components().iter().all(|x| sset.contains(x)))
                        .count() as u64;
                    assert_eq!(1u64 << kdim_eval, count, "eval m={m} k={k} v={v}");
                    // shifted spectrum ev(x*f): scale position i by alpha^i
                    let kdim = exact_k(&f, k, &basis).unwrap();
                    let count = words
                        .iter()
                        .filter(|c| {
                            c.components()
                                .iter()
                                .enumerate()
                                .all(|(i, &x)| sset.contains(&f.mul_code(f.alpha_pow(i as u64), x)))
                        })
                        .count() as u64;
                    assert_eq!(1u64 << kdim, count, "shifted m={m} k={k} v={v}");
                }
            }
        }
    }

    #[test]
    fn exact_k_dominates_lower_bound() {
        for m in 2..=6u32 {
            let f = make_field(2, m).unwrap();
            let n = f.q() - 1;
            for k in 1..=8u64.min(n) {
                for v in 0..=m {
                    let basis = canonical_subspace_basis(&f, v);
                    let kdim = exact_k(&f, k, &basis).unwrap();
                    let l = lower_bound_l(m, k, v).unwrap().lower_bound;
                    assert!(l <= kdim, "L <= K at m={m} k={k} v={v}: {l} vs {kdim}");
                }
            }
        }
    }

    #[test]
    fn exact_k_monotone_in_subspace() {
        let f = make_field(2, 5).unwrap();
        for k in [2u64, 4, 7] {
            for v in 0..5u32 {
                let small = canonical_subspace_basis(&f, v);
                let big = canonical_subspace_basis(&f, v + 1);
                let a = exact_k(&f, k, &small).unwrap();
                let b = exact_k(&f, k, &big).unwrap();
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn example_dimension_bound() {
        // k=16 over GF(2^11) with a 7-dimensional subspace: at least 11.
        let f = make_field(2, 11).unwrap();
        let basis = canonical_subspace_basis(&f, 7);
        let kdim = exact_k(&f, 16, &basis).unwrap();
        assert!(kdim >= 11, "exact K = {kdim}");
        assert!(kdim >= lower_bound_l(11, 16, 7).unwrap().lower_bound);
    }

    #[test]
    fn nontrivial_examples() {
        assert!(is_nontrivial(11, 16, 7, false).unwrap());
        assert!(!is_nontrivial(9, 7, 6, false).unwrap());
        for m in 2..=6 {
            assert!(is_nontrivial(m, 2, m, false).unwrap());
        }
    }

    #[test]
    fn best_v_examples() {
        assert_eq!(best_v(12, 12, BracketReading::Floor), Some(7));
        assert_eq!(best_v(2, 2, BracketReading::Floor), Some(2));
        assert_eq!(best_v(7, 7, BracketReading::Floor), Some(5));
        // the readings can disagree on which v qualifies first
        assert_eq!(best_v(3, 3, BracketReading::Floor), Some(2));
        assert_eq!(best_v(3, 3, BracketReading::Rational), Some(3));
    }

    #[test]
    fn eval_subcode_poly_is_in_subcode() {
        let f = make_field(2, 6).unwrap();
        let basis = canonical_subspace_basis(&f, 5);
        assert!(exact_k_eval(&f, 3, &basis).unwrap() > 5);
        let poly = eval_subcode_nonconstant_poly(&f, 3, &basis).unwrap().unwrap();
        assert!(!poly.is_constant());
        let spec = RsSpec::new(f.clone(), 3).unwrap();
        let c = encode(&spec, &poly).unwrap();
        let sset = field::span_codes(&f, &basis);
        assert!(c.components().iter().all(|x| sset.contains(x)));
        assert!(c.image().len() >= 2);
    }

    #[test]
    fn subfield_embedding() {
        let f = make_field(2, 6).unwrap();
        let g = subfield_generator(&f, 3).unwrap();
        assert_eq!(f.order_code(g).unwrap(), 7);
        let basis = subfield_basis(&f, 3).unwrap();
        assert_eq!(basis.len(), 3);
        // the span is multiplicatively closed
        let span = field::span_codes(&f, &basis);
        for &a in &span {
            for &b in &span {
                assert!(span.contains(&f.mul_code(a, b)));
            }
        }
        assert!(subfield_generator(&f, 4).is_err());
    }
}
