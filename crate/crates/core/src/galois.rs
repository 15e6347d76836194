//! Exact arithmetic in GF(p^n) for the Bush orthogonal-array construction.
//!
//! Elements are polynomials over GF(p) of degree < n, encoded as integers
//! in [0, q) via base-p digits with the constant coefficient least
//! significant. That integer encoding is the canonical element <-> symbol
//! map used by the orthogonal arrays, so the enumeration order
//! 0, 1, ..., q-1 is fixed.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a supported prime power (supported: q <= 9)")]
    UnsupportedOrder(u32),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("elements belong to different fields")]
    MixedFields,
    #[error("value {0} out of range for GF({1})")]
    ValueOutOfRange(u32, u32),
}

/// A fixed finite field GF(p^n), q = p^n <= 9.
///
/// The modulus is fixed per order: GF(4): x^2+x+1, GF(8): x^3+x+1,
/// GF(9): x^2+1. Prime fields use plain integer arithmetic mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    p: u32,
    n: u32,
    /// modulus coefficients, constant first, including the leading 1
    modulus: Vec<u32>,
}

impl Field {
    /// Builds the field of order q; q must be a prime power <= 9.
    pub fn new(q: u32) -> Result<Field, FieldError> {
        let (p, n, modulus) = match q {
            2 | 3 | 5 | 7 => (q, 1, vec![0, 1]),
            4 => (2, 2, vec![1, 1, 1]),  // x^2 + x + 1
            8 => (2, 3, vec![1, 1, 0, 1]), // x^3 + x + 1
            9 => (3, 2, vec![1, 0, 1]),  // x^2 + 1
            _ => return Err(FieldError::UnsupportedOrder(q)),
        };
        let f = Field { p, n, modulus };
        debug_assert!(f.n == 1 || f.modulus_is_irreducible());
        Ok(f)
    }

    pub fn order(&self) -> u32 {
        self.p.pow(self.n)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn element(&self, value: u32) -> Result<FieldElement, FieldError> {
        if value >= self.order() {
            return Err(FieldError::ValueOutOfRange(value, self.order()));
        }
        Ok(FieldElement {
            field: self.clone(),
            value,
        })
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0).unwrap()
    }

    pub fn one(&self) -> FieldElement {
        self.element(1).unwrap()
    }

    /// All q elements in canonical order 0, 1, ..., q-1.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order()).map(|v| self.element(v).unwrap())
    }

    fn digits(&self, v: u32) -> Vec<u32> {
        let mut out = vec![0; self.n as usize];
        let mut v = v;
        for d in out.iter_mut() {
            *d = v % self.p;
            v /= self.p;
        }
        out
    }

    fn pack(&self, digits: &[u32]) -> u32 {
        digits
            .iter()
            .rev()
            .fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    pub(crate) fn add_values(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.pack(&sum)
    }

    pub(crate) fn neg_value(&self, a: u32) -> u32 {
        let da = self.digits(a);
        let neg: Vec<u32> = da.iter().map(|&x| (self.p - x) % self.p).collect();
        self.pack(&neg)
    }

    pub(crate) fn mul_values(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let n = self.n as usize;
        // schoolbook product, then reduce modulo the modulus
        let mut prod = vec![0u32; 2 * n - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for i in (n..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            // x^i = x^(i-n) * (x^n mod modulus); x^n = -(lower modulus part)
            for j in 0..n {
                let m = self.modulus[j];
                prod[i - n + j] = (prod[i - n + j] + c * ((self.p - m % self.p) % self.p)) % self.p;
            }
        }
        self.pack(&prod[..n])
    }

    pub(crate) fn inv_value(&self, a: u32) -> Result<u32, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero(self.order()));
        }
        // a^(q-2) by repeated multiplication; q <= 9 keeps this trivial
        let mut acc = 1u32;
        for _ in 0..self.order() - 2 {
            acc = self.mul_values(acc, a);
        }
        Ok(acc)
    }

    /// Trial division by every monic polynomial of degree <= n/2.
    fn modulus_is_irreducible(&self) -> bool {
        let n = self.n as usize;
        let p = self.p;
        for deg in 1..=n / 2 {
            // monic divisor: x^deg + lower coefficients
            let count = p.pow(deg as u32);
            for low in 0..count {
                let mut divisor: Vec<u32> = {
                    let mut v = Vec::with_capacity(deg + 1);
                    let mut x = low;
                    for _ in 0..deg {
                        v.push(x % p);
                        x /= p;
                    }
                    v.push(1);
                    v
                };
                if poly_rem_is_zero(&self.modulus, &mut divisor, p) {
                    return false;
                }
            }
        }
        true
    }
}

fn poly_rem_is_zero(num: &[u32], div: &mut Vec<u32>, p: u32) -> bool {
    while div.last() == Some(&0) {
        div.pop();
    }
    let mut rem: Vec<u32> = num.to_vec();
    let d = div.len() - 1;
    while rem.len() > d {
        let lead = *rem.last().unwrap() % p;
        if lead != 0 {
            let shift = rem.len() - 1 - d;
            for (j, &c) in div.iter().enumerate() {
                let idx = shift + j;
                rem[idx] = (rem[idx] + (p - (lead * c) % p) % p) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c % p == 0)
}

/// An element of a fixed field, carrying its field spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    fn check_same(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::MixedFields);
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same(other)?;
        self.field.element(self.field.add_values(self.value, other.value))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same(other)?;
        self.field.element(self.field.mul_values(self.value, other.value))
    }

    pub fn neg(&self) -> FieldElement {
        self.field.element(self.field.neg_value(self.value)).unwrap()
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        self.field.element(self.field.inv_value(self.value)?)
    }
}
