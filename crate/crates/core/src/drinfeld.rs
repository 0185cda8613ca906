//! Twisted polynomials and rank-2 Drinfeld modules over finite A-fields:
//! supersingularity testing, the supersingular j-locus of a prime, and a
//! class-number-one complex multiplication demonstration.
//!
//! The twisted polynomial ring L{tau} multiplies by the rule tau c = c^q tau.
//! A rank-2 module is pinned down by phi_t = theta + g tau + Delta tau^2 with
//! Delta nonzero; phi extends to all of F_q[t] as an F_q-algebra map, and
//! supersingularity at the characteristic prime is read off the coefficients
//! of its image.

use std::sync::Arc;

use rayon::prelude::*;

use crate::classes::Rational;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::irred::{factor, monic_irreducibles};
use crate::poly::Poly;

/// Coefficient ring for twisted polynomials: enough structure to multiply,
/// apply the q-power map, and embed prime-field scalars.
pub trait TauCoeff: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// The q-power map of the base ring.
    fn frobenius(&self) -> Self;
    /// The image of a prime-field scalar in the ring.
    fn scalar(&self, c: u64) -> Self;
    fn invert(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
}

impl TauCoeff for FieldElement {
    fn zero(&self) -> Self {
        self.spec().zero()
    }

    fn add(&self, other: &Self) -> Self {
        FieldElement::add(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        FieldElement::mul(self, other)
    }

    fn frobenius(&self) -> Self {
        self.frob()
    }

    fn scalar(&self, c: u64) -> Self {
        self.spec().scalar(c)
    }

    fn invert(&self) -> Option<Self> {
        self.inv()
    }

    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
}

impl TauCoeff for Poly {
    fn zero(&self) -> Self {
        Poly::zero(self.q())
    }

    fn add(&self, other: &Self) -> Self {
        Poly::add(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        Poly::mul(self, other)
    }

    fn frobenius(&self) -> Self {
        // Coefficients are fixed by the q-power map, so c(x)^q = c(x^q).
        self.pow(self.q() as u32)
    }

    fn scalar(&self, c: u64) -> Self {
        Poly::constant(self.q(), c)
    }

    fn invert(&self) -> Option<Self> {
        let c = match self.degree() {
            Some(0) => self.coeff(0),
            _ => return None,
        };
        let q = self.q();
        (1..q)
            .find(|&u| u * c % q == 1)
            .map(|u| Poly::constant(q, u))
    }

    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
}

/// A twisted polynomial sum c_i tau^i with coefficients in `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedPoly<C: TauCoeff> {
    coeffs: Vec<C>,
}

impl<C: TauCoeff> TwistedPoly<C> {
    pub fn new(coeffs: Vec<C>) -> TwistedPoly<C> {
        let mut coeffs = coeffs;
        while coeffs.last().map(TauCoeff::is_zero) == Some(true) {
            coeffs.pop();
        }
        TwistedPoly { coeffs }
    }

    pub fn zero() -> TwistedPoly<C> {
        TwistedPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> TwistedPoly<C> {
        TwistedPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of tau^i, padding with zero above the degree.
    pub fn coeff(&self, i: usize) -> C {
        match self.coeffs.get(i) {
            Some(c) => c.clone(),
            None => self
                .coeffs
                .first()
                .map(TauCoeff::zero)
                .expect("coefficient queried on the empty zero polynomial"),
        }
    }

    pub fn deg_tau(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &TwistedPoly<C>) -> TwistedPoly<C> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let c = match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.push(c);
        }
        TwistedPoly::new(out)
    }

    /// Product under tau c = c^q tau: the tau^(i+j) term picks up
    /// a_i b_j^(q^i).
    pub fn mul(&self, other: &TwistedPoly<C>) -> TwistedPoly<C> {
        if self.is_zero() || other.is_zero() {
            return TwistedPoly::zero();
        }
        let zero = self.coeffs[0].zero();
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        let mut twisted: Vec<C> = other.coeffs.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                for b in twisted.iter_mut() {
                    *b = b.frobenius();
                }
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in twisted.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        TwistedPoly::new(out)
    }
}

/// A rank-2 Drinfeld module phi_t = theta + g tau + Delta tau^2 over an
/// A-field where t acts as theta.
#[derive(Clone, Debug)]
pub struct DrinfeldModule<C: TauCoeff> {
    pub theta: C,
    pub g: C,
    pub delta: C,
}

impl<C: TauCoeff> DrinfeldModule<C> {
    pub fn new(theta: C, g: C, delta: C) -> Result<DrinfeldModule<C>> {
        if delta.is_zero() {
            return Err(Error::domain("rank-2 modules need a nonzero tau^2 term"));
        }
        Ok(DrinfeldModule { theta, g, delta })
    }

    pub fn phi_t(&self) -> TwistedPoly<C> {
        TwistedPoly::new(vec![self.theta.clone(), self.g.clone(), self.delta.clone()])
    }

    /// Image of a polynomial under the module map, by Horner over its
    /// t-adic digits. The result has tau-degree exactly 2 deg a.
    pub fn phi_a(&self, a: &Poly) -> Result<TwistedPoly<C>> {
        if a.is_zero() {
            return Err(Error::domain("the module map is evaluated on nonzero input"));
        }
        let step = self.phi_t();
        let mut acc = TwistedPoly::zero();
        for &digit in a.coeffs().iter().rev() {
            acc = acc.mul(&step);
            if digit != 0 {
                acc = acc.add(&TwistedPoly::constant(self.theta.scalar(digit)));
            }
        }
        debug_assert_eq!(acc.deg_tau(), Some(2 * a.deg()));
        Ok(acc)
    }

    /// The isomorphism invariant g^(q+1) / Delta.
    pub fn j_invariant(&self, q: u64) -> Result<C> {
        let mut power = self.g.clone();
        for _ in 0..q {
            power = power.mul(&self.g);
        }
        let inverse = self
            .delta
            .invert()
            .ok_or_else(|| Error::domain("tau^2 coefficient is not invertible"))?;
        Ok(power.mul(&inverse))
    }
}

/// Supersingularity over a finite A-field whose characteristic is `p0`:
/// the image of p0 must be purely inseparable, i.e. every coefficient of
/// tau^i with i < 2 deg p0 vanishes. The classical single-coefficient
/// criterion (the tau^(deg p0) term alone) is computed alongside and any
/// disagreement is reported as an internal error.
pub fn is_supersingular(module: &DrinfeldModule<FieldElement>, p0: &Poly) -> Result<bool> {
    let mut value = module.theta.zero();
    for &digit in p0.coeffs().iter().rev() {
        value = value.mul(&module.theta).add(&module.theta.scalar(digit));
    }
    if !value.is_zero() {
        return Err(Error::domain(
            "the A-field characteristic does not match: theta is not a root of p0",
        ));
    }
    let image = module.phi_a(p0)?;
    let d = p0.deg();
    let inseparable = (0..2 * d).all(|i| image.coeff(i).is_zero());
    let hasse_vanishes = image.coeff(d).is_zero();
    if inseparable != hasse_vanishes {
        return Err(Error::internal(
            "supersingularity criteria disagree: pure inseparability vs the middle coefficient",
        ));
    }
    Ok(inseparable)
}

/// The supersingular j-locus of a prime: j-values in the quadratic extension
/// of the residue field, with weight q + 1 at j = 0 and 1 elsewhere.
pub struct SupersingularSet {
    pub field: Arc<FieldSpec>,
    pub theta: FieldElement,
    pub points: Vec<(FieldElement, u64)>,
}

impl SupersingularSet {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn mass(&self) -> Rational {
        self.points
            .iter()
            .map(|(_, w)| Rational::new(1, *w as i128))
            .fold(Rational::zero(), Rational::add)
    }
}

/// Enumerate the supersingular j-invariants of `p0` by sweeping every j in
/// the quadratic extension of its residue field with one representative
/// module per j: (g, Delta) = (j, j^q) for j nonzero and (0, 1) for j = 0.
pub fn supersingular_j_enum(q: u64, p0: &Poly) -> Result<SupersingularSet> {
    if p0.q() != q {
        return Err(Error::FieldMismatch {
            expected: q,
            got: p0.q(),
        });
    }
    if !p0.is_monic() || p0.deg() < 3 || p0.deg() % 2 == 0 || !crate::irred::is_irreducible(p0) {
        return Err(Error::domain(
            "the supersingular sweep expects a monic irreducible prime of odd degree at least 3",
        ));
    }
    let d = p0.deg();
    let modulus = monic_irreducibles(q, 2 * d)
        .into_iter()
        .next()
        .ok_or_else(|| Error::internal("no irreducible of the doubled degree"))?;
    let field = FieldSpec::new(q, modulus)?;
    let theta = field
        .elements()
        .find(|x| {
            let mut value = field.zero();
            for &digit in p0.coeffs().iter().rev() {
                value = value.mul(x).add(&field.scalar(digit));
            }
            value.is_zero()
        })
        .ok_or_else(|| Error::internal("the quadratic extension misses a root of the prime"))?;

    let all: Vec<FieldElement> = field.elements().collect();
    let verdicts: Result<Vec<Option<(FieldElement, u64)>>> = all
        .par_iter()
        .map(|j| {
            let (g, delta, weight) = if j.is_zero() {
                (field.zero(), field.one(), q + 1)
            } else {
                (j.clone(), j.frob(), 1)
            };
            let module = DrinfeldModule::new(theta.clone(), g, delta)?;
            Ok(is_supersingular(&module, p0)?.then(|| (j.clone(), weight)))
        })
        .collect();
    let points: Vec<(FieldElement, u64)> = verdicts?.into_iter().flatten().collect();
    Ok(SupersingularSet {
        field,
        theta,
        points,
    })
}

/// The Carlitz-square demonstration module: over F_q[x] with t acting as
/// x^2, the module phi_t = x^2 + (x + x^q) tau + tau^2 is the square of the
/// Carlitz module psi_x = x + tau and so has multiplication by all of
/// F_q[x].
pub fn cm_carlitz(q: u64) -> Result<DrinfeldModule<Poly>> {
    if q < 3 || q % 2 == 0 {
        return Err(Error::domain("the demonstration needs an odd base field"));
    }
    let x = Poly::var(q);
    let theta = x.mul(&x);
    let g = x.add(&x.pow(q as u32));
    DrinfeldModule::new(theta, g, Poly::one(q))
}

/// The Carlitz module psi_x = x + tau that commutes with `cm_carlitz`.
pub fn carlitz_action(q: u64) -> TwistedPoly<Poly> {
    TwistedPoly::new(vec![Poly::var(q), Poly::one(q)])
}

/// A module over F_q[x] reduced at a prime above `p0`: the residue field is
/// F_q[x] modulo a factor of p0(x^2), quadratic over the residue field of p0
/// when p0 stays inert in the x-extension and of the same degree when it
/// splits.
pub struct ReducedModule {
    pub module: DrinfeldModule<FieldElement>,
    pub residue_prime: Poly,
    pub split: bool,
}

/// Reduce an F_q[x]-coefficient module at the first prime above `p0`.
pub fn reduce_module(module: &DrinfeldModule<Poly>, p0: &Poly) -> Result<ReducedModule> {
    let q = p0.q();
    if !p0.is_monic() || !crate::irred::is_irreducible(p0) {
        return Err(Error::domain("reduction expects a monic irreducible prime"));
    }
    if *p0 == Poly::var(q) {
        return Err(Error::domain(
            "the prime t ramifies in the x-extension and is rejected",
        ));
    }
    // p0(x^2), whose factors are the primes above p0.
    let mut spread = vec![0u64; 2 * p0.deg() + 1];
    for (i, &c) in p0.coeffs().iter().enumerate() {
        spread[2 * i] = c;
    }
    let doubled = Poly::from_coeffs(q, spread);
    let factors = factor(&doubled)?;
    let split = factors.len() > 1;
    debug_assert!(factors.iter().all(|(_, e)| *e == 1));
    let residue_prime = factors
        .into_iter()
        .map(|(f, _)| f)
        .min_by_key(crate::irred::poly_code)
        .ok_or_else(|| Error::internal("the doubled prime lost its factors"))?;
    let field = FieldSpec::new(q, residue_prime.clone())?;
    let reduced = DrinfeldModule::new(
        field.element_from_poly(&module.theta),
        field.element_from_poly(&module.g),
        field.element_from_poly(&module.delta),
    )?;
    Ok(ReducedModule {
        module: reduced,
        residue_prime,
        split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ramified_class_number;
    use crate::irred::poly_code;
    use crate::lseries::QuadExt;
    use crate::parse::parse_poly;

    fn f9() -> Arc<FieldSpec> {
        let modulus = monic_irreducibles(3, 2).into_iter().next().unwrap();
        FieldSpec::new(3, modulus).unwrap()
    }

    #[test]
    fn twisted_products_follow_the_commutation_rule() {
        let field = f9();
        for code in 0..field.order() {
            let u = field.element_from_code(code);
            let tau = TwistedPoly::new(vec![field.zero(), field.one()]);
            let left = tau.mul(&TwistedPoly::constant(u.clone()));
            let expected =
                TwistedPoly::new(vec![field.zero(), u.mul(&u).mul(&u)]);
            assert_eq!(left, expected);
        }

        // (x + tau)^2 = x^2 + (x + x^q) tau + tau^2 over F_3[x].
        let psi = carlitz_action(3);
        let square = psi.mul(&psi);
        let x = Poly::var(3);
        assert_eq!(square.coeff(0), x.mul(&x));
        assert_eq!(square.coeff(1), x.add(&x.pow(3)));
        assert_eq!(square.coeff(2), Poly::one(3));

        let triples = [(1u64, 5u64, 7u64), (4, 2, 8), (3, 6, 1)];
        for (a, b, c) in triples {
            let u = TwistedPoly::new(vec![
                field.element_from_code(a),
                field.element_from_code(b),
            ]);
            let v = TwistedPoly::new(vec![
                field.element_from_code(c),
                field.element_from_code(a),
            ]);
            let w = TwistedPoly::new(vec![
                field.element_from_code(b),
                field.element_from_code(c),
            ]);
            assert_eq!(u.mul(&v).mul(&w), u.mul(&v.mul(&w)));
        }
    }

    #[test]
    fn module_images_are_ring_maps() {
        let field = f9();
        let module = DrinfeldModule::new(
            field.gen(),
            field.element_from_code(5),
            field.element_from_code(7),
        )
        .unwrap();
        let pairs = [("t^2 + 1", "t + 2"), ("t^3 + 2*t", "t^2 + t + 1")];
        for (a, b) in pairs {
            let a = parse_poly(a, 3).unwrap();
            let b = parse_poly(b, 3).unwrap();
            let sum = module.phi_a(&a.add(&b)).unwrap();
            assert_eq!(sum, module.phi_a(&a).unwrap().add(&module.phi_a(&b).unwrap()));
            let product = module.phi_a(&a.mul(&b)).unwrap();
            assert_eq!(
                product,
                module.phi_a(&a).unwrap().mul(&module.phi_a(&b).unwrap())
            );
            let image = module.phi_a(&a).unwrap();
            assert_eq!(image.deg_tau(), Some(2 * a.deg()));
            assert!(!image.coeff(2 * a.deg()).is_zero());
            // Constant coefficient is a(theta).
            let mut value = field.zero();
            for &digit in a.coeffs().iter().rev() {
                value = value.mul(&module.theta).add(&field.scalar(digit));
            }
            assert_eq!(image.coeff(0), value);
        }

        // The tau^2 coefficient of phi_{t^2}.
        let square = module.phi_a(&parse_poly("t^2", 3).unwrap()).unwrap();
        let q2 = 9;
        let expected = module
            .theta
            .mul(&module.delta)
            .add(&module.g.pow(3 + 1))
            .add(&module.delta.mul(&module.theta.pow(q2)));
        assert_eq!(square.coeff(2), expected);
    }

    #[test]
    fn j_invariants_and_twists() {
        let field = f9();
        let one = DrinfeldModule::new(field.zero(), field.one(), field.one()).unwrap();
        assert_eq!(one.j_invariant(3).unwrap(), field.one());
        let zero_j = DrinfeldModule::new(field.zero(), field.zero(), field.one()).unwrap();
        assert!(zero_j.j_invariant(3).unwrap().is_zero());

        let module = DrinfeldModule::new(
            field.gen(),
            field.element_from_code(4),
            field.element_from_code(6),
        )
        .unwrap();
        let j = module.j_invariant(3).unwrap();
        for code in 1..field.order() {
            let c = field.element_from_code(code);
            let twisted = DrinfeldModule::new(
                module.theta.clone(),
                c.pow(2).mul(&module.g),
                c.pow(8).mul(&module.delta),
            )
            .unwrap();
            assert_eq!(twisted.j_invariant(3).unwrap(), j);
        }
    }

    #[test]
    fn cubic_supersingular_loci_match_the_class_counts() {
        for p0 in monic_irreducibles(3, 3) {
            let set = supersingular_j_enum(3, &p0).unwrap();
            assert_eq!(set.count() as u64, ramified_class_number(3, 3).unwrap());
            assert_eq!(set.mass(), Rational::new(13, 4));
            let weights: Vec<u64> = set.points.iter().map(|(_, w)| *w).collect();
            assert_eq!(weights.iter().filter(|&&w| w == 4).count(), 1);
            assert!(set.points.iter().any(|(j, _)| j.is_zero()));

            // The locus is stable under the norm-of-p0 power map.
            let codes: Vec<u64> = set.points.iter().map(|(j, _)| j.code()).collect();
            for (j, _) in &set.points {
                let conj = j.frob_pow(p0.deg());
                assert!(codes.contains(&conj.code()), "prime {p0}");
            }
        }
    }

    #[test]
    fn cm_reduction_matches_the_splitting_behavior() {
        let module = cm_carlitz(3).unwrap();
        let x = Poly::var(3);
        assert_eq!(module.theta, x.mul(&x));
        assert_eq!(module.g, x.add(&x.pow(3)));
        let j = module.j_invariant(3).unwrap();
        assert_eq!(j, module.g.pow(4));

        // Multiplication by the Carlitz action: psi phi_t = phi_t psi.
        let psi = carlitz_action(3);
        assert_eq!(psi.mul(&module.phi_t()), module.phi_t().mul(&psi));

        let base = QuadExt::new(Poly::var(3)).unwrap();
        for p0 in monic_irreducibles(3, 3) {
            let reduced = reduce_module(&module, &p0).unwrap();
            let inert = base.chi_at_prime(&p0) == -1;
            assert_eq!(reduced.split, !inert, "prime {p0}");
            if inert {
                assert_eq!(reduced.residue_prime.deg(), 2 * p0.deg());
            } else {
                assert_eq!(reduced.residue_prime.deg(), p0.deg());
            }
            // The reduced j-invariant is the reduction of j.
            let expected = FieldSpec::new(3, reduced.residue_prime.clone())
                .unwrap()
                .element_from_poly(&j);
            assert_eq!(reduced.module.j_invariant(3).unwrap(), expected);
            assert_eq!(
                is_supersingular(&reduced.module, &p0).unwrap(),
                inert,
                "prime {p0}"
            );
        }

        // The named small cases: one inert prime reducing supersingular and
        // one split prime reducing ordinary, with the expected residue field.
        let inert_prime = parse_poly("t^3 + 2*t + 1", 3).unwrap();
        assert_eq!(base.chi_at_prime(&inert_prime), -1);
        let reduced = reduce_module(&module, &inert_prime).unwrap();
        assert_eq!(
            poly_code(&reduced.residue_prime),
            poly_code(&parse_poly("t^6 + 2*t^2 + 1", 3).unwrap())
        );
        assert!(is_supersingular(&reduced.module, &inert_prime).unwrap());

        let split_prime = parse_poly("t^3 - t - 1", 3).unwrap();
        assert_eq!(base.chi_at_prime(&split_prime), 1);
        let reduced = reduce_module(&module, &split_prime).unwrap();
        assert!(!is_supersingular(&reduced.module, &split_prime).unwrap());

        assert!(reduce_module(&module, &Poly::var(3)).is_err());
    }

    #[test]
    fn quintic_supersingular_locus() {
        let p0 = parse_poly("t^5 + 2*t + 1", 3).unwrap();
        let set = supersingular_j_enum(3, &p0).unwrap();
        assert_eq!(set.count() as u64, ramified_class_number(3, 5).unwrap());
        assert_eq!(set.mass(), Rational::new(121, 4));
    }
}
