//! Reed-Solomon codes by polynomial evaluation.
//!
//! RS_k(q) is the set of evaluation vectors (f(alpha^0), ..., f(alpha^(q-2)))
//! of all polynomials of degree < k, a [q-1, k, q-k] MDS code. Codes are never
//! materialized as full word lists except under an explicit guard; everything
//! else works symbolically on polynomials.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RsError {
    #[error("dimension k = {k} outside 1..={max}")]
    BadDimension { k: u64, max: u64 },
    #[error("polynomial degree {deg} is not below k = {k}")]
    DegreeTooHigh { deg: usize, k: u64 },
    #[error("materializing {size} codewords exceeds the guard {guard}")]
    GuardExceeded { size: u128, guard: u128 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Parameters of RS_k(q): length n = q-1 and minimum distance d = q-k are
/// implied by MDS-ness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsSpec {
    field: Field,
    k: u64,
}

impl RsSpec {
    pub fn new(field: Field, k: u64) -> Result<Self, RsError> {
        let max = field.q() - 1;
        if k < 1 || k > max {
            return Err(RsError::BadDimension { k, max });
        }
        Ok(RsSpec { field, k })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.field.q() - 1
    }

    pub fn d(&self) -> u64 {
        self.field.q() - self.k
    }
}

/// Dense polynomial over a field, coefficient codes lowest degree first.
/// The top coefficient is nonzero unless the polynomial is zero (empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn from_codes(field: &Field, mut coeffs: Vec<u32>) -> Result<Self, RsError> {
        for &c in &coeffs {
            if c as u64 >= field.q() {
                return Err(RsError::Field(FieldError::CodeRange {
                    code: c as u64,
                    q: field.q(),
                }));
            }
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(Poly { field: field.clone(), coeffs })
    }

    pub fn from_elements(field: &Field, coeffs: &[FieldElement]) -> Result<Self, RsError> {
        for e in coeffs {
            if e.field() != field {
                return Err(RsError::Field(FieldError::FieldMismatch));
            }
        }
        Poly::from_codes(field, coeffs.iter().map(|e| e.code()).collect())
    }

    pub fn zero(field: &Field) -> Self {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn constant(field: &Field, c: u32) -> Self {
        Poly::from_codes(field, vec![c]).expect("constant in range")
    }

    /// The monomial x.
    pub fn x(field: &Field) -> Self {
        Poly { field: field.clone(), coeffs: vec![0, 1] }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Horner evaluation at a code.
    pub fn eval_code(&self, x: u32) -> u32 {
        let f = &self.field;
        let mut acc = 0u32;
        for &c in self.coeffs.iter().rev() {
            acc = f.add_code(f.mul_code(acc, x), c);
        }
        acc
    }

    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement, RsError> {
        if x.field() != &self.field {
            return Err(RsError::Field(FieldError::FieldMismatch));
        }
        Ok(self
            .field
            .element(self.eval_code(x.code()) as u64)
            .expect("eval stays in field"))
    }

    pub fn add(&self, other: &Poly) -> Result<Poly, RsError> {
        if other.field != self.field {
            return Err(RsError::Field(FieldError::FieldMismatch));
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u32; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *slot = self.field.add_code(a, b);
        }
        Poly::from_codes(&self.field, out)
    }

    /// Scalar multiple c * f.
    pub fn scale(&self, c: u32) -> Poly {
        let coeffs = self.coeffs.iter().map(|&a| self.field.mul_code(a, c)).collect();
        Poly::from_codes(&self.field, coeffs).expect("codes stay in range")
    }
}

/// An evaluation vector of length n = q-1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Codeword {
    #[serde(skip)]
    field: Field,
    components: Vec<u32>,
}

impl Codeword {
    pub fn from_codes(field: &Field, components: Vec<u32>) -> Result<Self, RsError> {
        if components.len() as u64 != field.q() - 1 {
            return Err(RsError::Field(FieldError::CodeRange {
                code: components.len() as u64,
                q: field.q(),
            }));
        }
        Ok(Codeword { field: field.clone(), components })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn components(&self) -> &[u32] {
        &self.components
    }

    /// Im c: the set of component values.
    pub fn image(&self) -> BTreeSet<u32> {
        self.components.iter().copied().collect()
    }
}

/// Evaluates f at alpha^0, ..., alpha^(q-2). Errors if deg f >= k.
pub fn encode(spec: &RsSpec, f: &Poly) -> Result<Codeword, RsError> {
    if f.field() != spec.field() {
        return Err(RsError::Field(FieldError::FieldMismatch));
    }
    if let Some(deg) = f.degree() {
        if deg as u64 >= spec.k() {
            return Err(RsError::DegreeTooHigh { deg, k: spec.k() });
        }
    }
    let field = spec.field();
    let n = spec.n();
    let mut components = Vec::with_capacity(n as usize);
    for i in 0..n {
        components.push(f.eval_code(field.alpha_pow(i)));
    }
    Ok(Codeword { field: field.clone(), components })
}

/// Im f = f(F_q): the exact image of f over the whole field (including f(0)).
pub fn image(f: &Poly) -> BTreeSet<u32> {
    let field = f.field();
    let mut out = BTreeSet::new();
    for x in 0..field.q() {
        out.insert(f.eval_code(x as u32));
    }
    out
}

/// The threshold dimension ceil((q-1)/(w1*w2)) + 1: the smallest k at which
/// the distance bound d > n - n/(w1*w2) fails, hence the dimension to test.
pub fn threshold_k(q: u64, w1: u64, w2: u64) -> u64 {
    debug_assert!(w1 >= 1 && w2 >= 1 && q >= 2);
    (q - 1).div_ceil(w1 * w2) + 1
}

/// k - 1 < (q-1)/(w1*w2), in exact integer arithmetic. Equivalent to the
/// distance inequality d > n - n/(w1*w2) for RS_k(q).
pub fn distance_bound_equiv(q: u64, k: u64, w1: u64, w2: u64) -> bool {
    debug_assert!(k >= 1 && k <= q - 1);
    (k - 1) * w1 * w2 < q - 1
}

/// The same inequality computed on the distance side, d * w > n * (w - 1)
/// with w = w1*w2, d = q-k, n = q-1; used to cross-check the equivalence.
pub fn distance_bound_direct(q: u64, k: u64, w1: u64, w2: u64) -> bool {
    let n = q - 1;
    let d = q - k;
    let w = w1 * w2;
    d * w > n * w - n
}

/// All q^k codewords of RS_k(q), guarded. Enumeration order follows the
/// radix-q coefficient counter, so it is deterministic.
pub fn enumerate_codewords(spec: &RsSpec, guard: u128) -> Result<Vec<Codeword>, RsError> {
    let q = spec.field().q() as u128;
    let size = q.checked_pow(spec.k() as u32).unwrap_or(u128::MAX);
    if size > guard {
        return Err(RsError::GuardExceeded { size, guard });
    }
    let field = spec.field();
    let k = spec.k() as usize;
    let mut coeffs = vec![0u32; k];
    let mut out = Vec::with_capacity(size as usize);
    loop {
        let f = Poly::from_codes(field, coeffs.clone())?;
        out.push(encode(spec, &f)?);
        let mut i = 0;
        loop {
            if i == k {
                return Ok(out);
            }
            coeffs[i] += 1;
            if (coeffs[i] as u64) < field.q() {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}
