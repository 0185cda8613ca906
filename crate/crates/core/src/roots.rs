//! Complex roots of low-degree polynomials, accurate enough for strict
//! absolute-value tests on the roots.
//!
//! Integer polynomials are first split into squarefree factors with Yun's
//! algorithm (exact integer arithmetic, primitive pseudo-remainder gcd), so
//! the numeric stage only ever sees simple roots and Newton's method restores
//! full double precision even when the original polynomial had repeated
//! roots. Polynomials with genuinely complex coefficients get the plain
//! simultaneous-iteration path, which is adequate for looser tolerances.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots of an integer polynomial (coefficients in ascending order) together
/// with their multiplicities. The multiplicities sum to the degree.
pub fn integer_poly_roots(coeffs: &[i64]) -> Result<Vec<(Complex64, u32)>> {
    let f: Vec<i128> = trim(coeffs.iter().map(|&c| c as i128).collect());
    if f.len() <= 1 {
        return Err(Error::domain(
            "root finding needs a polynomial of positive degree",
        ));
    }
    let mut out = Vec::new();
    let mut total = 0u32;
    for (factor, mult) in yun_squarefree(&f)? {
        for root in simple_roots(&to_complex(&factor))? {
            out.push((root, mult));
            total += mult;
        }
    }
    if total as usize != f.len() - 1 {
        return Err(Error::internal(format!(
            "squarefree split lost roots: {} of {}",
            total,
            f.len() - 1
        )));
    }
    Ok(out)
}

/// Roots (with multiplicity, listed repeatedly) of a complex polynomial.
pub fn complex_poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut f = coeffs.to_vec();
    while f.last().is_some_and(|c| c.norm() < 1e-300) {
        f.pop();
    }
    if f.len() <= 1 {
        return Err(Error::domain(
            "root finding needs a polynomial of positive degree",
        ));
    }
    simple_roots(&f)
}

fn trim(mut v: Vec<i128>) -> Vec<i128> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn to_complex(f: &[i128]) -> Vec<Complex64> {
    f.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect()
}

fn derivative(f: &[i128]) -> Vec<i128> {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as i128 * c)
        .collect()
}

fn content(f: &[i128]) -> i128 {
    f.iter().fold(0i128, |acc, &c| int_gcd(acc, c.abs())).max(1)
}

fn int_gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a } else { int_gcd(b, a % b) }
}

/// Primitive part with positive leading coefficient.
fn primitive(f: Vec<i128>) -> Vec<i128> {
    let f = trim(f);
    if f.is_empty() {
        return f;
    }
    let mut c = content(&f);
    if *f.last().unwrap() < 0 {
        c = -c;
    }
    f.into_iter().map(|x| x / c).collect()
}

/// Scalar multiple of the remainder of a by b (b nonzero): fraction-free
/// elimination with a content reduction each round to keep coefficients
/// small. Only the remainder's direction matters to the gcd chain.
fn pseudo_rem(a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    let mut r = a.to_vec();
    let lb = *b.last().unwrap();
    while r.len() >= b.len() {
        let lr = *r.last().unwrap();
        let shift = r.len() - b.len();
        for c in r.iter_mut() {
            *c = c.checked_mul(lb).ok_or_else(overflow)?;
        }
        for (i, &bc) in b.iter().enumerate() {
            let sub = bc.checked_mul(lr).ok_or_else(overflow)?;
            r[shift + i] = r[shift + i].checked_sub(sub).ok_or_else(overflow)?;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
        let c = content(&r);
        for x in r.iter_mut() {
            *x /= c;
        }
    }
    Ok(r)
}

fn overflow() -> Error {
    Error::domain("coefficient overflow in exact squarefree split")
}

/// Primitive gcd of two integer polynomials.
fn int_poly_gcd(a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    let mut a = primitive(a.to_vec());
    let mut b = primitive(b.to_vec());
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = primitive(pseudo_rem(&a, &b)?);
        a = b;
        b = r;
    }
    Ok(a)
}

/// Exact quotient of integer polynomials, failing if the division is inexact.
fn int_poly_div(a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    let mut r = a.to_vec();
    let lb = *b.last().unwrap();
    let mut q = vec![0i128; a.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() {
        let lr = *r.last().unwrap();
        if lr % lb != 0 {
            return Err(Error::internal("inexact integer polynomial division"));
        }
        let c = lr / lb;
        let shift = r.len() - b.len();
        q[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] -= c * bc;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    if !r.is_empty() {
        return Err(Error::internal("inexact integer polynomial division"));
    }
    Ok(trim(q))
}

/// Yun's squarefree decomposition: returns (factor, multiplicity) pairs with
/// each factor squarefree and pairwise coprime.
fn yun_squarefree(f: &[i128]) -> Result<Vec<(Vec<i128>, u32)>> {
    let f = primitive(f.to_vec());
    let df = derivative(&f);
    let g = int_poly_gcd(&f, &df)?;
    if g.len() <= 1 {
        return Ok(vec![(f, 1)]);
    }
    let mut out = Vec::new();
    let mut b = int_poly_div(&f, &g)?;
    let mut c = int_poly_div(&df, &g)?;
    let mut i = 1u32;
    loop {
        let db = derivative(&b);
        let d: Vec<i128> = sub_poly(&c, &db);
        if b.len() <= 1 {
            break;
        }
        let a = int_poly_gcd(&b, &d)?;
        if a.len() > 1 {
            out.push((a.clone(), i));
        }
        b = int_poly_div(&b, &a)?;
        c = int_poly_div(&d, &a)?;
        i += 1;
    }
    Ok(out)
}

fn sub_poly(a: &[i128], b: &[i128]) -> Vec<i128> {
    let n = a.len().max(b.len());
    let mut r = vec![0i128; n];
    for (i, item) in r.iter_mut().enumerate() {
        *item = a.get(i).copied().unwrap_or(0) - b.get(i).copied().unwrap_or(0);
    }
    trim(r)
}

fn eval(f: &[Complex64], z: Complex64) -> Complex64 {
    f.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_deriv(f: &[Complex64], z: Complex64) -> Complex64 {
    f.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (i, &c)| {
            acc * z + c * i as f64
        })
}

/// Durand-Kerner simultaneous iteration followed by a Newton polish.
/// Assumes (but does not require) simple roots; convergence is checked.
fn simple_roots(f: &[Complex64]) -> Result<Vec<Complex64>> {
    let lead = *f.last().unwrap();
    let monic: Vec<Complex64> = f.iter().map(|&c| c / lead).collect();
    let n = monic.len() - 1;
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    let mut converged = false;
    for _ in 0..600 {
        let mut delta_max = 0.0f64;
        for k in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    let mut diff = z[k] - z[j];
                    if diff.norm() < 1e-30 {
                        diff += Complex64::new(1e-12, 1e-12);
                    }
                    den *= diff;
                }
            }
            let step = eval(&monic, z[k]) / den;
            z[k] -= step;
            delta_max = delta_max.max(step.norm());
        }
        if delta_max < 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::internal(
            "root iteration did not converge in 600 rounds",
        ));
    }
    for root in z.iter_mut() {
        for _ in 0..6 {
            let d = eval_deriv(&monic, *root);
            if d.norm() < 1e-30 {
                break;
            }
            *root -= eval(&monic, *root) / d;
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_roots_are_deflated_exactly() {
        // (x - 1)^3 (x + 2)
        let f = [-2i64, 5, -3, -1, 1];
        let mut roots = integer_poly_roots(&f).unwrap();
        roots.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());
        assert_eq!(roots.len(), 2);
        let (r0, m0) = roots[0];
        let (r1, m1) = roots[1];
        assert_eq!((m0, m1), (1, 3));
        assert!((r0 - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((r1 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn quadratic_with_conjugate_pair() {
        // 3u^2 - 3u + 1: both roots on |u| = 1/sqrt(3).
        let roots = integer_poly_roots(&[1, -3, 3]).unwrap();
        assert_eq!(roots.len(), 2);
        for (r, m) in roots {
            assert_eq!(m, 1);
            assert!((r.norm() - 1.0 / 3.0f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn high_multiplicity_tower() {
        // (x - 2)^4 (x + 1)^2 = expand
        // (x-2)^4 = x^4 - 8x^3 + 24x^2 - 32x + 16
        // (x+1)^2 = x^2 + 2x + 1
        let a = [16i128, -32, 24, -8, 1];
        let b = [1i128, 2, 1];
        let mut f = [0i128; 7];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                f[i + j] += x * y;
            }
        }
        let coeffs: Vec<i64> = f.iter().map(|&c| c as i64).collect();
        let mut roots = integer_poly_roots(&coeffs).unwrap();
        roots.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].1, 2);
        assert_eq!(roots[1].1, 4);
        assert!((roots[0].0.re + 1.0).abs() < 1e-10);
        assert!((roots[1].0.re - 2.0).abs() < 1e-10);
    }

    #[test]
    fn complex_coefficients() {
        // (x - i)(x - 2) = x^2 - (2 + i)x + 2i
        let i = Complex64::new(0.0, 1.0);
        let f = [2.0 * i, -(Complex64::new(2.0, 0.0) + i), Complex64::new(1.0, 0.0)];
        let mut roots = complex_poly_roots(&f).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - i).norm() < 1e-10);
        assert!((roots[1] - Complex64::new(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn rejects_constants() {
        assert!(integer_poly_roots(&[5]).is_err());
        assert!(complex_poly_roots(&[Complex64::new(1.0, 0.0)]).is_err());
    }
}
