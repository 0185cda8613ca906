//! Finite fields F_{p^e} presented concretely as F_p[x]/(m(x)).
//!
//! A `FieldSpec` pins down the presentation (characteristic and monic
//! irreducible modulus) and precomputes the Frobenius x -> x^p as a matrix so
//! that coefficient-wise powering is cheap in sweeps. Elements are fixed-width
//! coefficient vectors against that spec, shared via `Arc`.
//!
//! Everything is deterministic: element enumeration follows the integer code
//! order (low coefficient = least significant digit), and square roots use
//! the code-first non-square when Tonelli-Shanks needs one.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::irred;
use crate::modq;
use crate::poly::Poly;

#[derive(Debug)]
pub struct FieldSpec {
    p: u64,
    e: usize,
    order: u64,
    modulus: Poly,
    /// -m_j mod p for j < e: the expansion of x^e in lower powers.
    red_row: Vec<u64>,
    /// Row i is x^(i*p) mod m, so Frobenius is a matrix-vector product.
    frob_rows: Vec<Vec<u64>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

impl FieldSpec {
    pub fn new(p: u64, modulus: Poly) -> Result<Arc<FieldSpec>> {
        if modulus.q() != p {
            return Err(Error::FieldMismatch { expected: p, got: modulus.q() });
        }
        if !modulus.is_monic() || modulus.deg() < 1 {
            return Err(Error::domain("field modulus must be monic of positive degree"));
        }
        if !irred::is_irreducible(&modulus) {
            return Err(Error::domain(format!("field modulus {modulus} is reducible")));
        }
        let e = modulus.deg();
        let order = p
            .checked_pow(e as u32)
            .filter(|&n| n < (1 << 62))
            .ok_or_else(|| Error::domain("field order too large"))?;
        let red_row: Vec<u64> = (0..e).map(|j| modq::neg(modulus.coeff(j), p)).collect();
        let mut frob_rows = Vec::with_capacity(e);
        let x = Poly::var(p);
        for i in 0..e {
            let r = x.powmod((i as u64) * p, &modulus)?;
            let mut row = vec![0u64; e];
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = r.coeff(j);
            }
            frob_rows.push(row);
        }
        Ok(Arc::new(FieldSpec { p, e, order, modulus, red_row, frob_rows }))
    }

    /// The field F_q itself, as F_q[x]/(x - 0) ... i.e. modulus x.
    pub fn prime_field(p: u64) -> Result<Arc<FieldSpec>> {
        FieldSpec::new(p, Poly::var(p))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn extension_degree(&self) -> usize {
        self.e
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement { spec: self.clone(), c: vec![0; self.e] }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.scalar(1)
    }

    pub fn scalar(self: &Arc<Self>, c: u64) -> FieldElement {
        let mut v = vec![0; self.e];
        v[0] = c % self.p;
        FieldElement { spec: self.clone(), c: v }
    }

    /// The residue class of x.
    pub fn gen(self: &Arc<Self>) -> FieldElement {
        self.element_from_poly(&Poly::var(self.p))
    }

    pub fn element_from_poly(self: &Arc<Self>, f: &Poly) -> FieldElement {
        let r = f.rem(&self.modulus).expect("nonzero modulus");
        let mut v = vec![0; self.e];
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = r.coeff(j);
        }
        FieldElement { spec: self.clone(), c: v }
    }

    pub fn element_from_code(self: &Arc<Self>, mut code: u64) -> FieldElement {
        debug_assert!(code < self.order);
        let mut v = vec![0; self.e];
        for slot in v.iter_mut() {
            *slot = code % self.p;
            code /= self.p;
        }
        FieldElement { spec: self.clone(), c: v }
    }

    /// All field elements in code order.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(move |code| self.element_from_code(code))
    }
}

#[derive(Clone)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    c: Vec<u64>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec) && self.c == other.c
    }
}
impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.spec.p.hash(state);
        self.c.hash(state);
    }
}

impl std::fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F[{}^{}]({})", self.spec.p, self.spec.e, crate::parse::format_poly(&self.to_poly(), 'x'))
    }
}

impl FieldElement {
    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&c| c == 0)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_coeffs(self.spec.p, self.c.iter().copied())
    }

    pub fn code(&self) -> u64 {
        let mut code = 0u64;
        for &c in self.c.iter().rev() {
            code = code * self.spec.p + c;
        }
        code
    }

    fn check_spec(&self, other: &FieldElement) {
        debug_assert!(
            Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec,
            "elements of different fields"
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.check_spec(other);
        let p = self.spec.p;
        let c = self.c.iter().zip(&other.c).map(|(&a, &b)| modq::add(a, b, p)).collect();
        FieldElement { spec: self.spec.clone(), c }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.check_spec(other);
        let p = self.spec.p;
        let c = self.c.iter().zip(&other.c).map(|(&a, &b)| modq::sub(a, b, p)).collect();
        FieldElement { spec: self.spec.clone(), c }
    }

    pub fn neg(&self) -> FieldElement {
        let p = self.spec.p;
        let c = self.c.iter().map(|&a| modq::neg(a, p)).collect();
        FieldElement { spec: self.spec.clone(), c }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.check_spec(other);
        let spec = &self.spec;
        let (p, e) = (spec.p, spec.e);
        let mut acc = vec![0u64; 2 * e - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                let slot = &mut acc[i + j];
                *slot = (*slot + a * b) % p;
            }
        }
        // fold x^(e+k) = x^k * (x^e mod m) from the top down
        for i in (e..acc.len()).rev() {
            let c = acc[i];
            if c == 0 {
                continue;
            }
            acc[i] = 0;
            for (j, &r) in spec.red_row.iter().enumerate() {
                if r != 0 {
                    let slot = &mut acc[i - e + j];
                    *slot = (*slot + c * r) % p;
                }
            }
        }
        acc.truncate(e);
        FieldElement { spec: spec.clone(), c: acc }
    }

    pub fn square(&self) -> FieldElement {
        self.mul(self)
    }

    pub fn mul_scalar(&self, s: u64) -> FieldElement {
        let p = self.spec.p;
        let s = s % p;
        let c = self.c.iter().map(|&a| modq::mul(a, s, p)).collect();
        FieldElement { spec: self.spec.clone(), c }
    }

    pub fn pow(&self, mut exp: u64) -> FieldElement {
        let mut acc = self.spec.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.square();
            exp >>= 1;
        }
        acc
    }

    /// Frobenius x -> x^p via the precomputed matrix.
    pub fn frob(&self) -> FieldElement {
        let spec = &self.spec;
        let mut out = vec![0u64; spec.e];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &r) in spec.frob_rows[i].iter().enumerate() {
                if r != 0 {
                    let slot = &mut out[j];
                    *slot = (*slot + a * r) % spec.p;
                }
            }
        }
        FieldElement { spec: spec.clone(), c: out }
    }

    /// x -> x^(p^s).
    pub fn frob_pow(&self, s: usize) -> FieldElement {
        let mut out = self.clone();
        for _ in 0..s % self.spec.e.max(1) {
            out = out.frob();
        }
        out
    }

    pub fn inv(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        let (g, u, _) = self.to_poly().ext_gcd(&self.spec.modulus);
        debug_assert!(g.is_one(), "modulus is irreducible so the gcd is 1");
        Some(self.spec.element_from_poly(&u))
    }

    pub fn is_square(&self) -> bool {
        if self.is_zero() || self.spec.p == 2 {
            return true;
        }
        self.pow((self.spec.order - 1) / 2) == self.spec.one()
    }

    /// Deterministic square root: direct exponent when the order allows,
    /// Tonelli-Shanks with the code-first non-square otherwise.
    pub fn sqrt(&self) -> Option<FieldElement> {
        let n = self.spec.order;
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.spec.p == 2 {
            return Some(self.pow(n / 2));
        }
        if !self.is_square() {
            return None;
        }
        if n % 4 == 3 {
            return Some(self.pow((n + 1) / 4));
        }
        // Tonelli-Shanks
        let one = self.spec.one();
        let mut m = n - 1;
        let mut s = 0u32;
        while m % 2 == 0 {
            m /= 2;
            s += 1;
        }
        let z = self
            .spec
            .elements()
            .find(|z| !z.is_zero() && !z.is_square())
            .expect("odd-order field has non-squares");
        let mut big_m = s;
        let mut c = z.pow(m);
        let mut t = self.pow(m);
        let mut r = self.pow((m + 1) / 2);
        while t != one {
            let mut i = 0u32;
            let mut t2 = t.clone();
            while t2 != one {
                t2 = t2.square();
                i += 1;
                debug_assert!(i < big_m, "element was certified square");
            }
            let b = c.pow(1u64 << (big_m - i - 1));
            big_m = i;
            c = b.square();
            t = t.mul(&c);
            r = r.mul(&b);
        }
        debug_assert!(r.square() == *self);
        Some(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn f9() -> Arc<FieldSpec> {
        FieldSpec::new(3, parse_poly("t^2+1", 3).unwrap()).unwrap()
    }

    fn f27() -> Arc<FieldSpec> {
        FieldSpec::new(3, parse_poly("t^3+2*t+1", 3).unwrap()).unwrap()
    }

    #[test]
    fn rejects_reducible_modulus() {
        assert!(FieldSpec::new(3, parse_poly("t^2+2", 3).unwrap()).is_err());
    }

    #[test]
    fn f9_unit_group() {
        let f = f9();
        let u = f.gen();
        // u^2 = -1, so u has order 4
        assert_eq!(u.square(), f.scalar(2));
        assert_eq!(u.pow(4), f.one());
        assert_ne!(u.pow(2), f.one());
        // the unit group is cyclic of order 8
        let gens = f
            .elements()
            .filter(|x| !x.is_zero() && (1..8).all(|k| x.pow(k) != f.one()))
            .count();
        assert_eq!(gens, 4); // phi(8)
    }

    #[test]
    fn inverses_and_frobenius() {
        for spec in [f9(), f27()] {
            for x in spec.elements() {
                match x.inv() {
                    None => assert!(x.is_zero()),
                    Some(y) => assert_eq!(x.mul(&y), spec.one()),
                }
                // Frobenius matrix agrees with plain powering
                assert_eq!(x.frob(), x.pow(3));
                // and is additive
                assert_eq!(
                    x.frob().add(&spec.gen().frob()),
                    x.add(&spec.gen()).frob()
                );
            }
        }
    }

    #[test]
    fn sqrt_exhaustive() {
        // f9 has order 1 mod 4 (Tonelli path), f27 has order 3 mod 4
        for spec in [f9(), f27()] {
            let mut square_count = 0;
            for x in spec.elements() {
                match x.sqrt() {
                    Some(r) => {
                        assert_eq!(r.square(), x);
                        square_count += 1;
                    }
                    None => {
                        assert!(!x.is_square());
                        assert!(spec.elements().all(|y| y.square() != x));
                    }
                }
            }
            assert_eq!(square_count as u64, (spec.order() - 1) / 2 + 1);
        }
    }

    #[test]
    fn element_codes_round_trip() {
        let spec = f27();
        for code in 0..27 {
            assert_eq!(spec.element_from_code(code).code(), code);
        }
        let x = spec.gen();
        assert_eq!(x.code(), 3);
    }
}
