//! Imaginary quadratic extensions K = F_q(t)(sqrt(D)) and their L-series.
//!
//! D is monic, irreducible and of odd degree, so the place at infinity
//! ramifies and the extension has a well-defined genus g = (deg D - 1)/2.
//! The quadratic character chi of K/F_q(t) is evaluated through the residue
//! symbol at each irreducible, the L-polynomial through plain character sums
//! over monic polynomials, and the class number either as L(1) or through a
//! local solution-count formula that is much faster in bulk sweeps.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::irred;
use crate::poly::Poly;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// The imaginary quadratic extension determined by a discriminant D.
#[derive(Clone, Debug)]
pub struct QuadExt {
    d: Poly,
    genus: usize,
}

impl QuadExt {
    pub fn new(d: Poly) -> Result<QuadExt> {
        if d.q() == 2 {
            return Err(Error::domain("even characteristic is not supported"));
        }
        if !d.is_monic() {
            return Err(Error::domain("discriminant must be monic"));
        }
        let deg = d.degree().ok_or_else(|| Error::domain("discriminant must be nonzero"))?;
        if deg % 2 == 0 {
            return Err(Error::domain("discriminant must have odd degree"));
        }
        if !irred::is_irreducible(&d) {
            return Err(Error::domain(format!("discriminant {d} must be irreducible")));
        }
        Ok(QuadExt { genus: (deg - 1) / 2, d })
    }

    pub fn q(&self) -> u64 {
        self.d.q()
    }

    pub fn discriminant(&self) -> &Poly {
        &self.d
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// chi at a monic irreducible: the residue symbol of D mod p.
    pub fn chi_at_prime(&self, p: &Poly) -> i32 {
        irred::legendre(&self.d, p)
    }

    pub fn splitting(&self, p: &Poly) -> Splitting {
        match self.chi_at_prime(p) {
            0 => Splitting::Ramified,
            1 => Splitting::Split,
            _ => Splitting::Inert,
        }
    }

    /// chi extended multiplicatively to all nonzero m (insensitive to the
    /// leading unit).
    pub fn chi(&self, m: &Poly) -> Result<i32> {
        let mut out = 1;
        for (p, e) in irred::factor(m)? {
            let s = self.chi_at_prime(&p);
            if e % 2 == 1 {
                out *= s;
            } else {
                out *= s * s; // keeps the 0 at the ramified place
            }
        }
        Ok(out)
    }

    /// Coefficients c_0..c_{2g} of the L-polynomial, where c_d is the sum of
    /// chi over monic polynomials of degree d.
    pub fn l_polynomial(&self) -> Vec<i64> {
        let q = self.q();
        let g = self.genus;
        // irreducibles up to degree g suffice for trial division of degree
        // <= 2g candidates; anything with no such factor is irreducible
        let small_primes: Vec<Poly> = (1..=g).flat_map(|d| irred::monic_irreducibles(q, d)).collect();
        let mut chi_memo: HashMap<u64, i32> = HashMap::new();
        chi_memo.insert(irred::poly_code(&Poly::one(q)), 1);
        let mut prime_chi: HashMap<u64, i32> = HashMap::new();
        let mut coeffs = vec![0i64; 2 * g + 1];
        coeffs[0] = 1;
        for d in 1..=2 * g {
            let mut sum = 0i64;
            for m in irred::monic_polys(q, d) {
                sum += self.chi_memoized(&m, &small_primes, &mut chi_memo, &mut prime_chi) as i64;
            }
            coeffs[d] = sum;
        }
        coeffs
    }

    fn chi_memoized(
        &self,
        m: &Poly,
        small_primes: &[Poly],
        memo: &mut HashMap<u64, i32>,
        prime_chi: &mut HashMap<u64, i32>,
    ) -> i32 {
        let code = irred::poly_code(m);
        if let Some(&v) = memo.get(&code) {
            return v;
        }
        let deg = m.deg();
        let mut value = None;
        for p in small_primes.iter().take_while(|p| 2 * p.deg() <= deg) {
            if p.divides(m) {
                let rest = m.div_exact(p).expect("p divides m");
                let pc = irred::poly_code(p);
                let s = *prime_chi.entry(pc).or_insert_with(|| self.chi_at_prime(p));
                value = Some(s * self.chi_memoized(&rest, small_primes, memo, prime_chi));
                break;
            }
        }
        let v = value.unwrap_or_else(|| {
            // no factor of degree <= deg/2, so m is irreducible
            *prime_chi.entry(code).or_insert_with(|| self.chi_at_prime(m))
        });
        memo.insert(code, v);
        v
    }

    /// Class number as L(1).
    pub fn class_number(&self) -> u64 {
        ClassNumberEngine::new(self.q(), self.genus).class_number(&self.d)
    }

    /// The interval [(sqrt q - 1)^2g, (sqrt q + 1)^2g] that must contain the
    /// class number.
    pub fn hasse_interval(&self) -> (f64, f64) {
        let s = (self.q() as f64).sqrt();
        let e = 2 * self.genus as i32;
        ((s - 1.0).powi(e), (s + 1.0).powi(e))
    }
}

/// Bulk class-number evaluator for all discriminants of a fixed genus.
///
/// Counts reduced ideal representatives (a, b) with b^2 = D mod a and
/// deg b < deg a <= g. For each monic a the number of admissible b is the
/// product over distinct irreducible factors p of a of (1 + chi(p)), since D
/// is a unit mod p and square roots lift uniquely through p-power moduli.
/// Only the residue symbols at irreducibles of degree <= g are needed, which
/// makes sweeps over thousands of discriminants cheap.
pub struct ClassNumberEngine {
    q: u64,
    genus: usize,
    primes: Vec<Poly>,
    /// distinct prime factors (as indices into `primes`) of every monic a of
    /// degree <= genus
    terms: Vec<Vec<usize>>,
}

impl ClassNumberEngine {
    pub fn new(q: u64, genus: usize) -> ClassNumberEngine {
        let primes: Vec<Poly> = (1..=genus).flat_map(|d| irred::monic_irreducibles(q, d)).collect();
        let mut terms = Vec::new();
        for e in 0..=genus {
            for a in irred::monic_polys(q, e) {
                let mut rest = a;
                let mut factors = Vec::new();
                for (i, p) in primes.iter().enumerate() {
                    if p.deg() > rest.degree().unwrap_or(0) {
                        break;
                    }
                    if p.divides(&rest) {
                        factors.push(i);
                        while p.divides(&rest) {
                            rest = rest.div_exact(p).expect("p divides rest");
                        }
                    }
                }
                debug_assert!(rest.is_one(), "a of degree <= genus fully factors");
                terms.push(factors);
            }
        }
        ClassNumberEngine { q, genus, primes, terms }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn class_number(&self, d: &Poly) -> u64 {
        debug_assert_eq!(d.q(), self.q);
        debug_assert_eq!(d.deg(), 2 * self.genus + 1);
        let chi: Vec<u64> = self
            .primes
            .iter()
            .map(|p| {
                let s = irred::legendre(d, p);
                debug_assert!(s != 0, "irreducible D has no small prime divisors");
                (1 + s) as u64
            })
            .collect();
        self.terms
            .iter()
            .map(|fs| fs.iter().map(|&i| chi[i]).product::<u64>())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn quad(s: &str, q: u64) -> QuadExt {
        QuadExt::new(parse_poly(s, q).unwrap()).unwrap()
    }

    /// Independent slow count of reduced pairs (a, b), b^2 = D mod a, by
    /// brute-force sweep over all b.
    fn reduced_pair_count(ext: &QuadExt) -> u64 {
        let q = ext.q();
        let mut count = 0;
        for e in 0..=ext.genus() {
            for a in irred::monic_polys(q, e) {
                let nb = irred::place_norm(q, e);
                for bc in 0..nb {
                    let b = irred::poly_from_code(q, bc);
                    if b.degree().map(|d| d < e).unwrap_or(true)
                        && b.mul(&b).sub(ext.discriminant()).rem(&a).unwrap().is_zero()
                    {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn validates_discriminants() {
        assert!(QuadExt::new(parse_poly("t^2+1", 3).unwrap()).is_err()); // even degree
        assert!(QuadExt::new(parse_poly("t^3+t", 3).unwrap()).is_err()); // reducible
        assert!(QuadExt::new(parse_poly("2*t+1", 3).unwrap()).is_err()); // not monic
        assert!(QuadExt::new(parse_poly("t", 3).unwrap()).is_ok());
    }

    #[test]
    fn l_polynomial_worked_examples() {
        assert_eq!(quad("t^3-t-1", 3).l_polynomial(), vec![1, -3, 3]);
        assert_eq!(quad("t^3+2*t+1", 3).l_polynomial(), vec![1, 3, 3]);
        assert_eq!(quad("t", 3).l_polynomial(), vec![1]);
    }

    #[test]
    fn class_numbers_match_all_routes() {
        for q in [3u64, 5] {
            for d in irred::monic_irreducibles(q, 3) {
                let ext = QuadExt::new(d).unwrap();
                let via_l: i64 = ext.l_polynomial().iter().sum();
                let via_engine = ext.class_number();
                let via_brute = reduced_pair_count(&ext);
                assert_eq!(via_l as u64, via_engine, "D={}", ext.discriminant());
                assert_eq!(via_engine, via_brute, "D={}", ext.discriminant());
                assert!(via_engine >= 1);
            }
        }
        // one bigger genus as well
        for d in irred::monic_irreducibles(3, 5).into_iter().take(6) {
            let ext = QuadExt::new(d).unwrap();
            let via_l: i64 = ext.l_polynomial().iter().sum();
            assert_eq!(via_l as u64, ext.class_number(), "D={}", ext.discriminant());
            assert_eq!(ext.class_number(), reduced_pair_count(&ext), "D={}", ext.discriminant());
        }
    }

    #[test]
    fn functional_equation() {
        for d in irred::monic_irreducibles(3, 5).into_iter().take(8) {
            let ext = QuadExt::new(d).unwrap();
            let c = ext.l_polynomial();
            let g = ext.genus() as i64;
            let q = ext.q() as i64;
            for dd in 0..=ext.genus() {
                let scale = q.pow((g - dd as i64) as u32);
                assert_eq!(
                    c[2 * ext.genus() - dd],
                    scale * c[dd],
                    "functional equation at degree {dd} for D={}",
                    ext.discriminant()
                );
            }
        }
    }

    #[test]
    fn character_sums_vanish_beyond_conductor() {
        // for deg m >= deg D the full character sum is zero
        let ext = quad("t^3-t-1", 3);
        for deg in 3..=4 {
            let total: i64 = irred::monic_polys(3, deg)
                .iter()
                .map(|m| ext.chi(m).unwrap() as i64)
                .sum();
            assert_eq!(total, 0, "degree {deg}");
        }
    }

    #[test]
    fn class_number_within_hasse_interval() {
        for d in irred::monic_irreducibles(3, 7).into_iter().step_by(40) {
            let ext = QuadExt::new(d).unwrap();
            let h = ext.class_number() as f64;
            let (lo, hi) = ext.hasse_interval();
            assert!(lo <= h && h <= hi, "h={h} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn chi_is_multiplicative() {
        let ext = quad("t^3+2*t+1", 3);
        let polys: Vec<Poly> = (1..30).map(|c| irred::poly_from_code(3, c)).collect();
        for a in &polys {
            for b in &polys {
                assert_eq!(
                    ext.chi(&a.mul(b)).unwrap(),
                    ext.chi(a).unwrap() * ext.chi(b).unwrap()
                );
            }
        }
        // ramified place
        assert_eq!(ext.chi(ext.discriminant()).unwrap(), 0);
    }

    #[test]
    fn inert_split_examples() {
        let ext = quad("t", 3);
        let inert_p = parse_poly("t^3+2*t+1", 3).unwrap();
        let split_p = parse_poly("t^3-t-1", 3).unwrap();
        assert_eq!(ext.splitting(&inert_p), Splitting::Inert);
        assert_eq!(ext.splitting(&split_p), Splitting::Split);
        assert_eq!(ext.splitting(ext.discriminant()), Splitting::Ramified);
        assert_eq!(ext.chi(&parse_poly("t+1", 3).unwrap()).unwrap(), -1);
    }
}
