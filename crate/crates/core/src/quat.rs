//! The definite quaternion algebra over F_q(t).
//!
//! For an odd prime power q and a monic irreducible P of odd degree, the
//! algebra has basis 1, i, j, k over F_q(t) with
//!
//! ```text
//! i^2 = delta,   j^2 = P,   k = ij = -ji,
//! ```
//!
//! where delta is a fixed non-square in F_q. These relations force the
//! algebra to ramify exactly at P and at the infinite place: the norm form
//! is anisotropic over the completion at infinity (degree parities of the
//! four diagonal terms cannot collide) and over the residue field of P
//! (delta stays a non-square in an odd-degree extension). Elements are kept
//! as four numerators over a common monic denominator in lowest terms, so
//! structural equality is semantic equality.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::irred::is_irreducible;
use crate::modq;
use crate::poly::Poly;

/// The ambient quaternion algebra: base field size, the finite ramified
/// place, and the scalar non-square used for `i^2`.
#[derive(Debug)]
pub struct QuatAlgebra {
    q: u64,
    p0: Poly,
    delta: u64,
}

impl QuatAlgebra {
    /// Builds the algebra ramified at `p0` and infinity.
    ///
    /// `p0` must be monic, irreducible, and of odd degree at least 3; the
    /// base characteristic must be an odd prime.
    pub fn new(q: u64, p0: Poly) -> Result<Arc<QuatAlgebra>> {
        if !modq::validate_prime(q) {
            return Err(Error::domain(format!("base size {q} is not prime")));
        }
        if q == 2 {
            return Err(Error::domain("even characteristic is not supported"));
        }
        if p0.q() != q {
            return Err(Error::FieldMismatch {
                expected: q,
                got: p0.q(),
            });
        }
        if !p0.is_monic() {
            return Err(Error::domain("ramified place must be monic"));
        }
        if !is_irreducible(&p0) {
            return Err(Error::domain("ramified place must be irreducible"));
        }
        if p0.deg() % 2 == 0 {
            return Err(Error::domain(
                "even-degree place gives unsupported ramification (infinity would split)",
            ));
        }
        if p0.deg() < 3 {
            return Err(Error::domain("ramified place must have degree at least 3"));
        }
        let delta = (2..q)
            .find(|&c| !modq::is_square(c, q))
            .expect("odd prime field has a non-square");
        Ok(Arc::new(QuatAlgebra { q, p0, delta }))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// The finite ramified place.
    pub fn p0(&self) -> &Poly {
        &self.p0
    }

    /// The non-square scalar with `i^2 = delta`.
    pub fn delta(&self) -> u64 {
        self.delta
    }

    fn same_algebra(&self, other: &QuatAlgebra) -> bool {
        self.q == other.q && self.delta == other.delta && self.p0 == other.p0
    }

    /// Element with the given coordinate numerators and denominator.
    pub fn quat(
        self: &Arc<Self>,
        nums: [Poly; 4],
        den: Poly,
    ) -> Result<Quat> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        for n in &nums {
            if n.q() != self.q {
                return Err(Error::FieldMismatch {
                    expected: self.q,
                    got: n.q(),
                });
            }
        }
        if den.q() != self.q {
            return Err(Error::FieldMismatch {
                expected: self.q,
                got: den.q(),
            });
        }
        Ok(Quat::normalized(Arc::clone(self), nums, den))
    }

    /// Element with polynomial coordinates (denominator one).
    pub fn integral(self: &Arc<Self>, nums: [Poly; 4]) -> Quat {
        Quat::normalized(Arc::clone(self), nums, Poly::one(self.q))
    }

    /// The scalar `c` as an element.
    pub fn scalar(self: &Arc<Self>, c: Poly) -> Quat {
        let zero = Poly::zero(self.q);
        Quat::normalized(
            Arc::clone(self),
            [c, zero.clone(), zero.clone(), zero],
            Poly::one(self.q),
        )
    }

    pub fn zero(self: &Arc<Self>) -> Quat {
        self.scalar(Poly::zero(self.q))
    }

    pub fn one(self: &Arc<Self>) -> Quat {
        self.scalar(Poly::one(self.q))
    }

    pub fn gen_i(self: &Arc<Self>) -> Quat {
        let z = Poly::zero(self.q);
        self.integral([z.clone(), Poly::one(self.q), z.clone(), z])
    }

    pub fn gen_j(self: &Arc<Self>) -> Quat {
        let z = Poly::zero(self.q);
        self.integral([z.clone(), z.clone(), Poly::one(self.q), z])
    }

    pub fn gen_k(self: &Arc<Self>) -> Quat {
        let z = Poly::zero(self.q);
        self.integral([z.clone(), z.clone(), z, Poly::one(self.q)])
    }
}

/// An element of the quaternion algebra: coordinates with respect to
/// 1, i, j, k as numerators over one monic denominator, in lowest terms.
#[derive(Clone, Debug)]
pub struct Quat {
    alg: Arc<QuatAlgebra>,
    nums: [Poly; 4],
    den: Poly,
}

impl PartialEq for Quat {
    fn eq(&self, other: &Quat) -> bool {
        self.alg.same_algebra(&other.alg) && self.nums == other.nums && self.den == other.den
    }
}

impl Eq for Quat {}

impl Quat {
    fn normalized(alg: Arc<QuatAlgebra>, nums: [Poly; 4], den: Poly) -> Quat {
        debug_assert!(!den.is_zero());
        let q = alg.q;
        let mut g = den.clone();
        for n in &nums {
            g = g.gcd(n);
        }
        let (nums, den) = if g.is_one() {
            (nums, den)
        } else {
            (
                nums.map(|n| n.div_exact(&g).expect("gcd divides numerator")),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        // Scale the numerators so the denominator is monic.
        let lead = den.leading_coeff();
        if lead == 1 {
            Quat { alg, nums, den }
        } else {
            let inv = modq::inv(lead, q);
            Quat {
                alg,
                nums: nums.map(|n| n.mul_scalar(inv)),
                den: den.monic(),
            }
        }
    }

    pub fn algebra(&self) -> &Arc<QuatAlgebra> {
        &self.alg
    }

    /// Coordinate numerators with respect to 1, i, j, k.
    pub fn nums(&self) -> &[Poly; 4] {
        &self.nums
    }

    /// Common monic denominator.
    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.nums.iter().all(|n| n.is_zero())
    }

    /// True when all coordinates are polynomials.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &Quat) -> Quat {
        debug_assert!(self.alg.same_algebra(&other.alg));
        let nums = [0, 1, 2, 3].map(|g| {
            self.nums[g]
                .mul(&other.den)
                .add(&other.nums[g].mul(&self.den))
        });
        Quat::normalized(Arc::clone(&self.alg), nums, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &Quat) -> Quat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Quat {
        Quat {
            alg: Arc::clone(&self.alg),
            nums: self.nums.clone().map(|n| n.neg()),
            den: self.den.clone(),
        }
    }

    /// Multiplies by the rational function `num/den`.
    pub fn scale(&self, num: &Poly, den: &Poly) -> Result<Quat> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Quat::normalized(
            Arc::clone(&self.alg),
            self.nums.clone().map(|n| n.mul(num)),
            self.den.mul(den),
        ))
    }

    pub fn mul(&self, other: &Quat) -> Quat {
        debug_assert!(self.alg.same_algebra(&other.alg));
        let q = self.alg.q;
        let delta = &Poly::constant(q, self.alg.delta);
        let p0 = &self.alg.p0;
        let dp = &delta.mul(p0);
        let [x0, x1, x2, x3] = &self.nums;
        let [y0, y1, y2, y3] = &other.nums;
        let z0 = x0
            .mul(y0)
            .add(&delta.mul(&x1.mul(y1)))
            .add(&p0.mul(&x2.mul(y2)))
            .sub(&dp.mul(&x3.mul(y3)));
        let z1 = x0
            .mul(y1)
            .add(&x1.mul(y0))
            .sub(&p0.mul(&x2.mul(y3)))
            .add(&p0.mul(&x3.mul(y2)));
        let z2 = x0
            .mul(y2)
            .add(&x2.mul(y0))
            .add(&delta.mul(&x1.mul(y3)))
            .sub(&delta.mul(&x3.mul(y1)));
        let z3 = x0
            .mul(y3)
            .add(&x3.mul(y0))
            .add(&x1.mul(y2))
            .sub(&x2.mul(y1));
        Quat::normalized(
            Arc::clone(&self.alg),
            [z0, z1, z2, z3],
            self.den.mul(&other.den),
        )
    }

    /// Standard involution: negates the i, j, k coordinates.
    pub fn conj(&self) -> Quat {
        Quat {
            alg: Arc::clone(&self.alg),
            nums: [
                self.nums[0].clone(),
                self.nums[1].neg(),
                self.nums[2].neg(),
                self.nums[3].neg(),
            ],
            den: self.den.clone(),
        }
    }

    /// Reduced trace as a fraction `(numerator, monic denominator)`.
    pub fn trd(&self) -> (Poly, Poly) {
        reduce_fraction(self.nums[0].mul_scalar(2), self.den.clone())
    }

    /// Reduced norm as a fraction `(numerator, monic denominator)`.
    pub fn nrd(&self) -> (Poly, Poly) {
        let num = self.nrd_numerator();
        reduce_fraction(num, self.den.mul(&self.den))
    }

    /// Reduced norm of the numerator vector alone (denominator ignored).
    pub fn nrd_numerator(&self) -> Poly {
        let q = self.alg.q;
        let delta = &Poly::constant(q, self.alg.delta);
        let p0 = &self.alg.p0;
        let [x0, x1, x2, x3] = &self.nums;
        x0.mul(x0)
            .sub(&delta.mul(&x1.mul(x1)))
            .sub(&p0.mul(&x2.mul(x2)))
            .add(&delta.mul(p0).mul(&x3.mul(x3)))
    }

    /// Trace of `self * conj(other)`, the bilinear form polarizing the norm.
    /// Requires integral inputs; the result is then a polynomial.
    pub fn pair(&self, other: &Quat) -> Poly {
        debug_assert!(self.is_integral() && other.is_integral());
        let prod = self.mul(&other.conj());
        debug_assert!(prod.is_integral());
        prod.nums[0].mul_scalar(2)
    }

    pub fn inverse(&self) -> Result<Quat> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let nn = self.nrd_numerator();
        // conj(x)/nrd(x) = (den * conj numerators) / nrd numerator.
        let c = self.conj();
        Ok(Quat::normalized(
            Arc::clone(&self.alg),
            c.nums.map(|n| n.mul(&self.den)),
            nn,
        ))
    }
}

fn reduce_fraction(num: Poly, den: Poly) -> (Poly, Poly) {
    debug_assert!(!den.is_zero());
    let g = num.gcd(&den);
    let (num, den) = if g.is_one() {
        (num, den)
    } else {
        (
            num.div_exact(&g).expect("gcd divides"),
            den.div_exact(&g).expect("gcd divides"),
        )
    };
    let lead = den.leading_coeff();
    if lead == 1 {
        (num, den)
    } else {
        let inv = modq::inv(lead, den.q());
        (num.mul_scalar(inv), den.monic())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn algebra() -> Arc<QuatAlgebra> {
        QuatAlgebra::new(3, parse_poly("t^3 + 2*t + 1", 3).unwrap()).unwrap()
    }

    fn sample(alg: &Arc<QuatAlgebra>, seed: u64) -> Quat {
        // Small deterministic pseudo-random element with a denominator.
        let q = alg.q();
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 33) % (q * q * q)
        };
        let nums = [0; 4].map(|_| crate::irred::poly_from_code(q, next()));
        let den = crate::irred::poly_from_code(q, next() + 1);
        alg.quat(nums, den).unwrap()
    }

    #[test]
    fn validates_inputs() {
        let p = parse_poly("t^3 + 2*t + 1", 3).unwrap();
        assert!(QuatAlgebra::new(4, p.clone()).is_err());
        assert!(QuatAlgebra::new(2, parse_poly("t^3 + t + 1", 2).unwrap()).is_err());
        // Reducible.
        assert!(QuatAlgebra::new(3, parse_poly("t^3 + t^2", 3).unwrap()).is_err());
        // Even degree ramifies incompatibly.
        assert!(QuatAlgebra::new(3, parse_poly("t^4 + t + 2", 3).unwrap()).is_err());
        // Degree too small for the experiments.
        assert!(QuatAlgebra::new(3, parse_poly("t", 3).unwrap()).is_err());
        assert!(QuatAlgebra::new(3, p).is_ok());
    }

    #[test]
    fn picks_smallest_nonsquare() {
        assert_eq!(algebra().delta(), 2);
        let q5 = QuatAlgebra::new(5, parse_poly("t^3 + t + 1", 5).unwrap()).unwrap();
        assert_eq!(q5.delta(), 2);
    }

    #[test]
    fn basis_relations() {
        let alg = algebra();
        let (i, j, k) = (alg.gen_i(), alg.gen_j(), alg.gen_k());
        let delta = alg.scalar(Poly::constant(3, alg.delta()));
        let p0 = alg.scalar(alg.p0().clone());
        assert_eq!(i.mul(&i), delta);
        assert_eq!(j.mul(&j), p0);
        assert_eq!(i.mul(&j), k);
        assert_eq!(j.mul(&i), k.neg());
        assert_eq!(k.mul(&k), delta.mul(&p0).neg());
        assert_eq!(i.mul(&k), delta.mul(&j));
        assert_eq!(k.mul(&i), delta.mul(&j).neg());
        assert_eq!(j.mul(&k), p0.mul(&i).neg());
        assert_eq!(k.mul(&j), p0.mul(&i));
    }

    #[test]
    fn norm_and_trace_of_basis() {
        let alg = algebra();
        let (i, j, k) = (alg.gen_i(), alg.gen_j(), alg.gen_k());
        let one = Poly::one(3);
        assert_eq!(i.trd(), (Poly::zero(3), one.clone()));
        assert_eq!(i.nrd(), (Poly::constant(3, 3 - alg.delta()), one.clone()));
        assert_eq!(j.nrd(), (alg.p0().neg(), one.clone()));
        assert_eq!(
            k.nrd(),
            (alg.p0().mul_scalar(alg.delta()), one.clone())
        );
        let x = alg
            .quat(
                [
                    parse_poly("t+1", 3).unwrap(),
                    parse_poly("2", 3).unwrap(),
                    parse_poly("t", 3).unwrap(),
                    Poly::zero(3),
                ],
                parse_poly("t", 3).unwrap(),
            )
            .unwrap();
        let (tn, td) = x.trd();
        assert_eq!(tn, parse_poly("2*t+2", 3).unwrap());
        assert_eq!(td, parse_poly("t", 3).unwrap());
    }

    #[test]
    fn mul_is_associative_and_norm_multiplicative() {
        let alg = algebra();
        for seed in 0..6u64 {
            let x = sample(&alg, 3 * seed + 1);
            let y = sample(&alg, 3 * seed + 2);
            let z = sample(&alg, 3 * seed + 3);
            assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            let (an, ad) = x.mul(&y).nrd();
            let (bn, bd) = x.nrd();
            let (cn, cd) = y.nrd();
            // Fractions are reduced and monic-denominator, so cross-multiplied
            // equality is exact.
            assert_eq!(an.mul(&bd).mul(&cd), bn.mul(&cn).mul(&ad));
            assert_eq!(x.mul(&y).conj(), y.conj().mul(&x.conj()));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let alg = algebra();
        for seed in 0..6u64 {
            let x = sample(&alg, seed + 11);
            if x.is_zero() {
                continue;
            }
            let inv = x.inverse().unwrap();
            assert_eq!(x.mul(&inv), alg.one());
            assert_eq!(inv.mul(&x), alg.one());
        }
        assert!(alg.zero().inverse().is_err());
    }

    #[test]
    fn representation_is_reduced() {
        let alg = algebra();
        let t = parse_poly("t", 3).unwrap();
        let x = alg
            .quat(
                [t.mul(&t), t.clone(), t.mul_scalar(2), Poly::zero(3)],
                t.mul_scalar(2),
            )
            .unwrap();
        // Common factor t is stripped and the leftover scalar denominator 2
        // is absorbed into the numerators: (t + i + 2j)/2 = 2t + 2i + j.
        assert_eq!(x.den(), &Poly::one(3));
        assert_eq!(x.nums()[0], t.mul_scalar(2));
        assert_eq!(x.nums()[1], Poly::constant(3, 2));
        assert_eq!(x.nums()[2], Poly::one(3));
    }
}
