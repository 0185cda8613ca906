//! Dense univariate polynomials over a prime field F_q.
//!
//! This is the universal scalar of the crate: discriminants, levels, Hecke
//! indices, lattice entries and norm values are all `Poly`. Coefficients are
//! stored low-to-high as residues mod q with no trailing zeros, so equality is
//! structural and the zero polynomial is the empty vector. The degree of the
//! zero polynomial is reported as `None` rather than a junk number.
//!
//! Extension coefficient fields live in [`crate::field`]; no operation in this
//! crate needs polynomials over an extension base, so `Poly` stays lean.

use crate::error::{Error, Result};
use crate::modq;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    q: u64,
    coeffs: Vec<u64>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Poly[q={}]({})", self.q, crate::parse::format_poly(self, 't'))
    }
}

impl Poly {
    /// Build from low-to-high coefficients, reducing mod q and trimming.
    pub fn from_coeffs(q: u64, coeffs: impl IntoIterator<Item = u64>) -> Poly {
        assert!(modq::validate_prime(q), "q must be a small prime, got {q}");
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % q).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { q, coeffs }
    }

    pub fn zero(q: u64) -> Poly {
        Poly::from_coeffs(q, [])
    }

    pub fn one(q: u64) -> Poly {
        Poly::from_coeffs(q, [1])
    }

    pub fn constant(q: u64, c: u64) -> Poly {
        Poly::from_coeffs(q, [c])
    }

    /// The monomial t.
    pub fn var(q: u64) -> Poly {
        Poly::from_coeffs(q, [0, 1])
    }

    pub fn monomial(q: u64, c: u64, deg: usize) -> Poly {
        let mut v = vec![0; deg + 1];
        v[deg] = c;
        Poly::from_coeffs(q, v)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of t^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with deg 0 = 0; panics on zero. Convenient in contexts where
    /// zero has already been excluded.
    pub fn deg(&self) -> usize {
        self.degree().expect("deg of zero polynomial")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> u64 {
        *self.coeffs.last().expect("leading coeff of zero polynomial")
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    fn check_q(&self, other: &Poly) {
        debug_assert_eq!(self.q, other.q, "mixed base fields");
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_q(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(modq::add(self.coeff(i), other.coeff(i), self.q));
        }
        Poly::trimmed(self.q, out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.check_q(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(modq::sub(self.coeff(i), other.coeff(i), self.q));
        }
        Poly::trimmed(self.q, out)
    }

    pub fn neg(&self) -> Poly {
        Poly::trimmed(self.q, self.coeffs.iter().map(|&c| modq::neg(c, self.q)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_q(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.q);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let c = &mut out[i + j];
                *c = (*c + a * b) % self.q;
            }
        }
        Poly::trimmed(self.q, out)
    }

    pub fn mul_scalar(&self, c: u64) -> Poly {
        let c = c % self.q;
        Poly::trimmed(self.q, self.coeffs.iter().map(|&a| modq::mul(a, c, self.q)).collect())
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![0; k];
        out.extend_from_slice(&self.coeffs);
        Poly { q: self.q, coeffs: out }
    }

    /// Scale to leading coefficient 1. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            None | Some(1) => self.clone(),
            Some(&lc) => self.mul_scalar(modq::inv(lc, self.q)),
        }
    }

    /// Euclidean division: self = q * d + r with deg r < deg d.
    pub fn divmod(&self, d: &Poly) -> Result<(Poly, Poly)> {
        self.check_q(d);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.coeffs.len() < d.coeffs.len() {
            return Ok((Poly::zero(self.q), self.clone()));
        }
        let q = self.q;
        let dd = d.coeffs.len() - 1;
        let lc_inv = modq::inv(d.leading_coeff(), q);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let f = modq::mul(c, lc_inv, q);
            quot[i - dd] = f;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[i - dd + j] = modq::sub(rem[i - dd + j], modq::mul(f, dc, q), q);
            }
        }
        rem.truncate(dd);
        Ok((Poly::trimmed(q, quot), Poly::trimmed(q, rem)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.divmod(d)?.1)
    }

    /// Quotient of an exact division; errors if a remainder is left.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.divmod(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::internal("inexact polynomial division"))
        }
    }

    pub fn divides(&self, other: &Poly) -> bool {
        !self.is_zero() && other.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.check_q(other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn gcd_many<'a>(polys: impl IntoIterator<Item = &'a Poly>, q: u64) -> Poly {
        let mut acc = Poly::zero(q);
        for p in polys {
            acc = acc.gcd(p);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    /// Extended Euclid: returns (g, u, v) with u*self + v*other = g, g monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        self.check_q(other);
        let q = self.q;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut u0, mut u1) = (Poly::one(q), Poly::zero(q));
        let (mut v0, mut v1) = (Poly::zero(q), Poly::one(q));
        while !r1.is_zero() {
            let (qt, r) = r0.divmod(&r1).expect("nonzero divisor");
            r0 = r1;
            r1 = r;
            let u = u0.sub(&qt.mul(&u1));
            u0 = u1;
            u1 = u;
            let v = v0.sub(&qt.mul(&v1));
            v0 = v1;
            v1 = v;
        }
        if r0.is_zero() {
            return (r0, u0, v0);
        }
        let lc_inv = modq::inv(r0.leading_coeff(), q);
        (r0.mul_scalar(lc_inv), u0.mul_scalar(lc_inv), v0.mul_scalar(lc_inv))
    }

    /// self^exp mod m by square-and-multiply.
    pub fn powmod(&self, mut exp: u64, m: &Poly) -> Result<Poly> {
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut base = self.rem(m)?;
        let mut acc = Poly::one(self.q).rem(m)?;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).rem(m)?;
            }
            base = base.mul(&base).rem(m)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Plain power, for parser use on small exponents.
    pub fn pow(&self, exp: u32) -> Poly {
        let mut acc = Poly::one(self.q);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: u64) -> u64 {
        let x = x % self.q;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + c) % self.q;
        }
        acc
    }

    /// Exact square root if self is a perfect square, else None.
    pub fn sqrt_exact(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let d = self.deg();
        if d % 2 != 0 {
            return None;
        }
        let q = self.q;
        let lc_root = modq::sqrt(self.leading_coeff(), q)?;
        let half = d / 2;
        let mut root = vec![0u64; half + 1];
        root[half] = lc_root;
        let top_inv = modq::inv(modq::mul(2, lc_root, q), q);
        // Match coefficients from the top down: coefficient of t^(2*half - k)
        // determines root[half - k] linearly once higher terms are known.
        for k in 1..=half {
            let mut conv = 0u64;
            for i in (half - k + 1)..=half {
                let j = 2 * half - k - i;
                if j > half || j >= i {
                    continue;
                }
                let term = modq::mul(root[i], root[j], q);
                conv = modq::add(conv, modq::add(term, term, q), q);
            }
            // include the i == j middle term when 2i = 2*half - k
            if k % 2 == 0 {
                let i = half - k / 2;
                conv = modq::add(conv, modq::mul(root[i], root[i], q), q);
            }
            let want = self.coeff(2 * half - k);
            root[half - k] = modq::mul(modq::sub(want, conv, q), top_inv, q);
        }
        let candidate = Poly::trimmed(q, root);
        if candidate.mul(&candidate) == *self {
            Some(candidate)
        } else {
            None
        }
    }

    fn trimmed(q: u64, mut coeffs: Vec<u64>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { q, coeffs }
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::parse::format_poly(self, 't'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3(coeffs: &[u64]) -> Poly {
        Poly::from_coeffs(3, coeffs.iter().copied())
    }

    #[test]
    fn degree_sentinel() {
        assert_eq!(Poly::zero(3).degree(), None);
        assert_eq!(Poly::one(3).degree(), Some(0));
        assert_eq!(Poly::var(3).degree(), Some(1));
    }

    #[test]
    fn divmod_worked_example() {
        // t^3 - t - 1 = t * (t^2 + 1) + (t + 2) over F_3
        let a = p3(&[2, 2, 0, 1]);
        let d = p3(&[1, 0, 1]);
        let (q, r) = a.divmod(&d).unwrap();
        assert_eq!(q, p3(&[0, 1]));
        assert_eq!(r, p3(&[2, 1]));
        assert_eq!(q.mul(&d).add(&r), a);
    }

    #[test]
    fn divmod_rejects_zero() {
        assert!(Poly::one(3).divmod(&Poly::zero(3)).is_err());
    }

    #[test]
    fn gcd_is_monic() {
        let a = p3(&[0, 2]); // 2t
        let b = p3(&[0, 0, 2]); // 2t^2
        assert_eq!(a.gcd(&b), Poly::var(3));
        assert!(Poly::zero(3).gcd(&Poly::zero(3)).is_zero());
    }

    #[test]
    fn ext_gcd_bezout() {
        let a = p3(&[2, 2, 0, 1]);
        let b = p3(&[1, 0, 1]);
        let (g, u, v) = a.ext_gcd(&b);
        assert_eq!(u.mul(&a).add(&v.mul(&b)), g);
        assert_eq!(g, Poly::one(3));
    }

    #[test]
    fn powmod_fermat() {
        // t^(q^d) = t mod any irreducible of degree d; try d=2, f = t^2+1
        let f = p3(&[1, 0, 1]);
        let t = Poly::var(3);
        assert_eq!(t.powmod(9, &f).unwrap(), t);
    }

    #[test]
    fn eval_horner() {
        let a = p3(&[1, 2, 0, 1]); // t^3 + 2t + 1
        assert_eq!(a.eval(0), 1);
        assert_eq!(a.eval(1), 1);
        assert_eq!(a.eval(2), 1); // 8 + 4 + 1 = 13 = 1 mod 3
    }

    #[test]
    fn sqrt_exact_roundtrip() {
        let a = p3(&[1, 2, 2, 1]);
        let sq = a.mul(&a);
        assert_eq!(sq.sqrt_exact(), Some(a.clone()));
        // 2 * a^2 is not a square over F_3 (2 is a non-residue)
        assert_eq!(sq.mul_scalar(2).sqrt_exact(), None);
        // odd degree is never a square
        assert_eq!(p3(&[0, 1]).sqrt_exact(), None);
        assert_eq!(Poly::zero(3).sqrt_exact(), Some(Poly::zero(3)));
    }

    #[test]
    fn sqrt_exact_even_degree_nonsquare() {
        // t^2 + 1 has square degree shape but is irreducible
        assert_eq!(p3(&[1, 0, 1]).sqrt_exact(), None);
    }
}
