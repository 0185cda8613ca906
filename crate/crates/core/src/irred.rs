//! Irreducibility, factorization and quadratic residue symbols in F_q[t].
//!
//! Polynomials of degree d are also addressed by an integer code
//! sum(c_i * q^i), so "first" and "sorted" always mean the same thing across
//! the crate: ascending degree, then ascending code (which is lexicographic
//! from the top coefficient down).

use crate::error::{Error, Result};
use crate::poly::Poly;

/// q^deg, the size of the residue field at a place of that degree.
pub fn place_norm(q: u64, deg: usize) -> u64 {
    q.checked_pow(deg as u32).expect("place norm overflows u64")
}

/// Integer code of a polynomial: sum of c_i * q^i.
pub fn poly_code(p: &Poly) -> u64 {
    let mut code: u64 = 0;
    for &c in p.coeffs().iter().rev() {
        code = code
            .checked_mul(p.q())
            .and_then(|v| v.checked_add(c))
            .expect("poly code overflows u64");
    }
    code
}

pub fn poly_from_code(q: u64, mut code: u64) -> Poly {
    let mut coeffs = Vec::new();
    while code > 0 {
        coeffs.push(code % q);
        code /= q;
    }
    Poly::from_coeffs(q, coeffs)
}

/// All monic polynomials of the given degree, in code order.
pub fn monic_polys(q: u64, deg: usize) -> Vec<Poly> {
    let base = place_norm(q, deg);
    (0..base).map(|low| poly_from_code(q, base + low)).collect()
}

/// All monic irreducibles of the given degree, in code order.
pub fn monic_irreducibles(q: u64, deg: usize) -> Vec<Poly> {
    if deg == 0 {
        return Vec::new();
    }
    // Trial division: a reducible polynomial of degree d has a monic
    // irreducible factor of degree <= d/2.
    let mut smaller: Vec<Poly> = Vec::new();
    for d in 1..=deg / 2 {
        smaller.extend(monic_irreducibles(q, d));
    }
    monic_polys(q, deg)
        .into_iter()
        .filter(|f| !smaller.iter().any(|p| p.divides(f)))
        .collect()
}

/// Deterministic irreducibility test via Frobenius iteration: f of degree n
/// is irreducible iff t^(q^n) = t mod f and gcd(t^(q^(n/r)) - t, f) = 1 for
/// every prime r dividing n.
pub fn is_irreducible(f: &Poly) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let q = f.q();
    let t = Poly::var(q);
    // frob[i] = t^(q^(i+1)) mod f
    let mut frob = Vec::with_capacity(n);
    let mut cur = t.rem(f).expect("nonzero modulus");
    for _ in 0..n {
        cur = cur.powmod(q, f).expect("nonzero modulus");
        frob.push(cur.clone());
    }
    if frob[n - 1] != t.rem(f).expect("nonzero modulus") {
        return false;
    }
    for r in prime_divisors(n as u64) {
        let m = n / r as usize;
        if !frob[m - 1].sub(&t).gcd(f).is_one() {
            return false;
        }
    }
    true
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Monic irreducible factors with multiplicities, sorted by (degree, code).
/// The unit (leading coefficient) is dropped; recover it from the input.
pub fn factor(f: &Poly) -> Result<Vec<(Poly, u32)>> {
    if f.is_zero() {
        return Err(Error::domain("cannot factor the zero polynomial"));
    }
    let q = f.q();
    let mut rem = f.monic();
    let mut out: Vec<(Poly, u32)> = Vec::new();
    let mut d = 1;
    while rem.degree() > Some(0) {
        if 2 * d > rem.deg() {
            // what's left is irreducible
            out.push((rem.clone(), 1));
            break;
        }
        for p in monic_irreducibles(q, d) {
            let mut mult = 0;
            while p.divides(&rem) {
                rem = rem.div_exact(&p)?;
                mult += 1;
            }
            if mult > 0 {
                out.push((p, mult));
            }
            if rem.degree() == Some(0) {
                break;
            }
        }
        d += 1;
    }
    Ok(out)
}

/// Quadratic residue symbol of a mod the monic irreducible p, via the Euler
/// criterion a^((|p|-1)/2): +1 for nonzero squares, -1 for non-squares, 0
/// when p divides a.
pub fn legendre(a: &Poly, p: &Poly) -> i32 {
    debug_assert!(p.is_monic() && is_irreducible(p), "legendre needs a monic irreducible modulus");
    let q = a.q();
    let r = a.rem(p).expect("nonzero modulus");
    if r.is_zero() {
        return 0;
    }
    let exp = (place_norm(q, p.deg()) - 1) / 2;
    let e = r.powmod(exp, p).expect("nonzero modulus");
    if e.is_one() {
        1
    } else if e == Poly::constant(q, q - 1) {
        -1
    } else {
        panic!("Euler criterion returned a non-unit; modulus is not irreducible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mobius(d: u64) -> i64 {
        let mut rest = d;
        let mut sign = 1i64;
        for p in prime_divisors(d) {
            rest /= p;
            if rest % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        sign
    }

    fn mobius_irreducible_count(q: u64, n: u64) -> u64 {
        // (1/n) * sum over d | n of mu(d) q^(n/d)
        let total: i64 = (1..=n)
            .filter(|d| n % d == 0)
            .map(|d| mobius(d) * place_norm(q, (n / d) as usize) as i64)
            .sum();
        (total / n as i64) as u64
    }

    #[test]
    fn irreducible_counts_match_mobius() {
        for q in [3u64, 5] {
            for n in 1..=5usize {
                let listed = monic_irreducibles(q, n);
                assert_eq!(
                    listed.len() as u64,
                    mobius_irreducible_count(q, n as u64),
                    "q={q} deg={n}"
                );
                for f in &listed {
                    assert!(is_irreducible(f), "{f} should be irreducible");
                }
            }
        }
        assert_eq!(monic_irreducibles(3, 6).len(), 116);
    }

    #[test]
    fn irreducibility_spot_checks() {
        let q3 = |s: &str| crate::parse::parse_poly(s, 3).unwrap();
        assert!(is_irreducible(&q3("t^2+1")));
        assert!(is_irreducible(&q3("t^3+2*t+1")));
        assert!(is_irreducible(&q3("t^3-t-1")));
        assert!(is_irreducible(&q3("t^4+t^3+t^2+t+1")));
        assert!(!is_irreducible(&q3("t^2-t")));
        assert!(!is_irreducible(&q3("t^2+2")));
        let q5 = |s: &str| crate::parse::parse_poly(s, 5).unwrap();
        assert!(!is_irreducible(&q5("t^2+1")));
        assert!(is_irreducible(&q5("t^2+2")));
    }

    #[test]
    fn factor_recovers_multiplicities() {
        let q3 = |s: &str| crate::parse::parse_poly(s, 3).unwrap();
        let f = q3("t^2+1").mul(&q3("(t+2)^2")).mul_scalar(2);
        let factors = factor(&f).unwrap();
        assert_eq!(factors, vec![(q3("t+2"), 2), (q3("t^2+1"), 1)]);
        let back = factors
            .iter()
            .fold(Poly::one(3), |acc, (p, e)| acc.mul(&p.pow(*e)));
        assert_eq!(back.mul_scalar(2), f);
    }

    #[test]
    fn legendre_frozen_values() {
        let q3 = |s: &str| crate::parse::parse_poly(s, 3).unwrap();
        let p0 = q3("t^3+2*t+1");
        assert_eq!(legendre(&q3("t"), &p0), -1);
        assert_eq!(legendre(&Poly::constant(3, 2), &q3("t")), -1);
        assert_eq!(legendre(&Poly::one(3), &q3("t+1")), 1);
        assert_eq!(legendre(&p0, &p0), 0);
        // chi_K(t^2+1) for K generated by sqrt(t^3-t-1)
        assert_eq!(legendre(&q3("t^3-t-1"), &q3("t^2+1")), -1);
    }

    #[test]
    fn legendre_is_multiplicative() {
        let p = crate::parse::parse_poly("t^2+1", 3).unwrap();
        let polys: Vec<Poly> = (1..20).map(|c| poly_from_code(3, c)).collect();
        for a in &polys {
            for b in &polys {
                assert_eq!(
                    legendre(&a.mul(b), &p),
                    legendre(a, &p) * legendre(b, &p),
                    "a={a} b={b}"
                );
            }
        }
    }

    #[test]
    fn code_round_trip() {
        for code in 0..200u64 {
            assert_eq!(poly_code(&poly_from_code(3, code)), code);
        }
        let monics = monic_polys(3, 2);
        assert_eq!(monics.len(), 9);
        assert!(monics.iter().all(|f| f.is_monic() && f.deg() == 2));
        let codes: Vec<u64> = monics.iter().map(poly_code).collect();
        let mut sorted = codes.clone();
        sorted.sort();
        assert_eq!(codes, sorted);
    }
}
