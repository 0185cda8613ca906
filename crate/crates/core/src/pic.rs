//! Divisor class groups of imaginary quadratic extensions K = F_q(t)(y),
//! y^2 = D(t), in Mumford representation.
//!
//! A class is stored as its unique reduced representative (a, b): a monic of
//! degree at most the genus, deg b < deg a, and a | b^2 - D.  Composition is
//! Cantor's algorithm followed by reduction.  `PicBasis` computes the full
//! abelian group structure (elementary divisors, generators, and coordinates
//! for every class) by repeatedly extracting an element of maximal order in
//! the quotient by the subgroup generated so far; `Character` evaluates the
//! dual group with exact rational phase arithmetic.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::irred;
use crate::lseries::{QuadExt, Splitting};
use crate::poly::Poly;

/// A reduced Mumford pair (a, b) representing one divisor class.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Divisor {
    a: Poly,
    b: Poly,
}

impl Divisor {
    pub fn a(&self) -> &Poly {
        &self.a
    }

    pub fn b(&self) -> &Poly {
        &self.b
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one()
    }
}

impl fmt::Debug for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// The divisor class group Pic(O_D) of an imaginary quadratic extension.
pub struct PicGroup {
    ext: QuadExt,
}

impl PicGroup {
    pub fn new(ext: QuadExt) -> PicGroup {
        PicGroup { ext }
    }

    pub fn ext(&self) -> &QuadExt {
        &self.ext
    }

    pub fn q(&self) -> u64 {
        self.ext.q()
    }

    pub fn identity(&self) -> Divisor {
        let q = self.q();
        Divisor {
            a: Poly::one(q),
            b: Poly::zero(q),
        }
    }

    /// Reduce a semi-reduced pair (a | b^2 - D assumed) to the canonical
    /// representative of its class.
    fn reduce_pair(&self, mut a: Poly, mut b: Poly) -> Divisor {
        let d = self.ext.discriminant();
        let genus = self.ext.genus();
        a = a.monic();
        b = b.rem(&a).expect("reduce_pair: zero modulus");
        while a.deg() > genus {
            let num = d.sub(&b.mul(&b));
            let next_a = num
                .div_exact(&a)
                .expect("reduce_pair: a must divide b^2 - D")
                .monic();
            let next_b = b.neg().rem(&next_a).expect("reduce_pair: zero modulus");
            a = next_a;
            b = next_b;
        }
        debug_assert!(b.mul(&b).sub(d).rem(&a).unwrap().is_zero());
        Divisor { a, b }
    }

    /// Build the class of a validated pair. Fails unless a is monic, nonzero,
    /// and divides b^2 - D.
    pub fn class_of_pair(&self, a: &Poly, b: &Poly) -> Result<Divisor> {
        if a.q() != self.q() || b.q() != self.q() {
            return Err(Error::FieldMismatch {
                expected: self.q(),
                got: if a.q() != self.q() { a.q() } else { b.q() },
            });
        }
        if a.is_zero() {
            return Err(Error::domain("pair must have a nonzero a-part"));
        }
        if !a.is_monic() {
            return Err(Error::domain("pair must have a monic a-part"));
        }
        let resid = b.mul(b).sub(self.ext.discriminant()).rem(a)?;
        if !resid.is_zero() {
            return Err(Error::domain(format!(
                "pair ({a}, {b}) does not satisfy b^2 = D mod a"
            )));
        }
        Ok(self.reduce_pair(a.clone(), b.clone()))
    }

    /// The class of the prime above a split monic irreducible v: the ideal
    /// generated by v and b + y where b is a square root of D mod v.
    pub fn split_prime_class(&self, v: &Poly) -> Result<Divisor> {
        match self.ext.splitting(v) {
            Splitting::Split => {}
            Splitting::Inert => {
                return Err(Error::domain(format!("{v} is inert, not split")));
            }
            Splitting::Ramified => {
                return Err(Error::domain(format!("{v} is ramified, not split")));
            }
        }
        let fv = FieldSpec::new(self.q(), v.clone())?;
        let d_res = fv.element_from_poly(self.ext.discriminant());
        let root = d_res
            .sqrt()
            .ok_or_else(|| Error::internal("split place has no square root of D"))?;
        self.class_of_pair(v, &root.to_poly())
    }

    /// Cantor composition of two classes, fully reduced.
    pub fn compose(&self, x: &Divisor, y: &Divisor) -> Divisor {
        let d = self.ext.discriminant();
        let (d0, e1, e2) = x.a.ext_gcd(&y.a);
        let bsum = x.b.add(&y.b);
        let (g, c1, c2) = d0.ext_gcd(&bsum);
        // g = s1*a1 + s2*a2 + s3*(b1 + b2)
        let s1 = c1.mul(&e1);
        let s2 = c1.mul(&e2);
        let s3 = c2;
        let a3 = x
            .a
            .mul(&y.a)
            .div_exact(&g.mul(&g))
            .expect("compose: gcd^2 must divide a1*a2");
        let num = s1
            .mul(&x.a)
            .mul(&y.b)
            .add(&s2.mul(&y.a).mul(&x.b))
            .add(&s3.mul(&x.b.mul(&y.b).add(d)));
        let b3 = num
            .div_exact(&g)
            .expect("compose: gcd must divide the b-numerator")
            .rem(&a3)
            .expect("compose: zero modulus");
        self.reduce_pair(a3, b3)
    }

    pub fn neg(&self, x: &Divisor) -> Divisor {
        if x.a.deg() == 0 {
            return self.identity();
        }
        Divisor {
            b: x.b.neg().rem(&x.a).expect("neg: zero modulus"),
            a: x.a.clone(),
        }
    }

    pub fn pow(&self, x: &Divisor, n: u64) -> Divisor {
        let mut acc = self.identity();
        let mut base = x.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.compose(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.compose(&base, &base);
            }
        }
        acc
    }

    /// Every reduced divisor, in a fixed deterministic order.
    pub fn all_reduced(&self) -> Vec<Divisor> {
        let q = self.q();
        let d = self.ext.discriminant();
        let mut out = vec![self.identity()];
        for deg_a in 1..=self.ext.genus() {
            for a in irred::monic_polys(q, deg_a) {
                let count = q.pow(deg_a as u32);
                for code in 0..count {
                    let b = irred::poly_from_code(q, code);
                    if b.mul(&b).sub(d).rem(&a).unwrap().is_zero() {
                        out.push(Divisor { a: a.clone(), b });
                    }
                }
            }
        }
        out
    }

    /// Order of a class, given the group order.
    pub fn order_of(&self, x: &Divisor, group_order: u64) -> u64 {
        for e in divisors_ascending(group_order) {
            if self.pow(x, e).is_identity() {
                return e;
            }
        }
        unreachable!("element order must divide the group order")
    }
}

/// Ascending list of divisors of n.
fn divisors_ascending(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Full structure of a divisor class group: elementary divisors in a
/// descending divisibility chain, matching generators, and coordinates for
/// every class.
pub struct PicBasis {
    divisors: Vec<u64>,
    generators: Vec<Divisor>,
    index: HashMap<Divisor, Vec<u64>>,
    class_count: u64,
}

impl PicBasis {
    /// Compute the group structure. Fails if the class number exceeds `cap`.
    pub fn new(group: &PicGroup, cap: u64) -> Result<PicBasis> {
        let h = group.ext().class_number();
        if h > cap {
            return Err(Error::domain(format!(
                "class number {h} exceeds the structure cap {cap}"
            )));
        }
        let all = group.all_reduced();
        if all.len() as u64 != h {
            return Err(Error::internal(format!(
                "reduced divisor count {} disagrees with class number {h}",
                all.len()
            )));
        }

        let mut divisors: Vec<u64> = Vec::new();
        let mut generators: Vec<Divisor> = Vec::new();
        // Coordinates over the generators found so far, for every element of
        // the subgroup they span.
        let mut span: HashMap<Divisor, Vec<u64>> = HashMap::new();
        span.insert(group.identity(), Vec::new());

        while (span.len() as u64) < h {
            // Element of maximal order in G / span.
            let mut best: Option<(Divisor, u64)> = None;
            for x in &all {
                if let Some((_, lmax)) = &best {
                    if span.contains_key(&group.pow(x, *lmax)) {
                        continue;
                    }
                }
                let ord = group.order_of(x, h);
                let qord = divisors_ascending(ord)
                    .into_iter()
                    .find(|e| span.contains_key(&group.pow(x, *e)))
                    .expect("order in the quotient divides the order in G");
                match &best {
                    Some((_, lmax)) if qord <= *lmax => {}
                    _ => best = Some((x.clone(), qord)),
                }
            }
            let (x, e) = best.expect("a proper subgroup misses some element");
            if let Some(prev) = divisors.last() {
                if prev % e != 0 {
                    return Err(Error::internal(format!(
                        "elementary divisor chain broken: {e} does not divide {prev}"
                    )));
                }
            }
            // x^e lands in the span; correct x by the e-th root of that
            // landing point so the new generator has exact order e.
            let landing = group.pow(&x, e);
            let coords = span
                .get(&landing)
                .expect("x^e lies in the span by choice of e")
                .clone();
            let mut gen = x;
            for (j, m) in coords.iter().enumerate() {
                if m % e != 0 {
                    return Err(Error::internal(format!(
                        "structure correction failed: coordinate {m} not divisible by {e}"
                    )));
                }
                let shift = (divisors[j] - m / e) % divisors[j];
                gen = group.compose(&gen, &group.pow(&generators[j], shift));
            }
            debug_assert!(group.pow(&gen, e).is_identity());

            // Extend the span table by the e cosets of the new generator.
            let mut extended = HashMap::with_capacity(span.len() * e as usize);
            let mut power = group.identity();
            for p in 0..e {
                for (elem, c) in &span {
                    let mut cc = c.clone();
                    cc.push(p);
                    extended.insert(group.compose(elem, &power), cc);
                }
                if p + 1 < e {
                    power = group.compose(&power, &gen);
                }
            }
            span = extended;
            divisors.push(e);
            generators.push(gen);
        }

        if span.len() as u64 != h {
            return Err(Error::internal(
                "span table does not exhaust the class group".to_string(),
            ));
        }
        Ok(PicBasis {
            divisors,
            generators,
            index: span,
            class_count: h,
        })
    }

    pub fn class_number(&self) -> u64 {
        self.class_count
    }

    pub fn elementary_divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn generators(&self) -> &[Divisor] {
        &self.generators
    }

    /// Coordinates of a class with respect to the generators.
    pub fn coords_of(&self, x: &Divisor) -> Result<&[u64]> {
        self.index
            .get(x)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::internal(format!("class {x} missing from the index")))
    }

    /// All classes with their coordinates, in a deterministic order.
    pub fn classes(&self) -> Vec<(&Divisor, &[u64])> {
        let mut rows: Vec<(&Divisor, &[u64])> = self
            .index
            .iter()
            .map(|(d, c)| (d, c.as_slice()))
            .collect();
        rows.sort_by_key(|(_, c)| c.to_vec());
        rows
    }

    /// The exponent of the group (1 for the trivial group).
    pub fn exponent(&self) -> u64 {
        self.divisors.first().copied().unwrap_or(1)
    }
}

/// A character of the class group, written against a `PicBasis`: the value on
/// coordinates (c_j) is exp(2 pi i sum_j n_j c_j / d_j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    divisors: Vec<u64>,
    exponents: Vec<u64>,
    lead: u64,
}

impl Character {
    /// All characters of the group, principal character first.
    pub fn all(basis: &PicBasis) -> Vec<Character> {
        let divisors = basis.elementary_divisors().to_vec();
        let lead = basis.exponent();
        let mut out = Vec::with_capacity(basis.class_number() as usize);
        let mut exps = vec![0u64; divisors.len()];
        loop {
            out.push(Character {
                divisors: divisors.clone(),
                exponents: exps.clone(),
                lead,
            });
            let mut j = divisors.len();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                exps[j] += 1;
                if exps[j] < divisors[j] {
                    break;
                }
                exps[j] = 0;
            }
        }
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&n| n == 0)
    }

    /// The phase of the value on `coords`, as an exact residue mod `lead`:
    /// the value is exp(2 pi i phase / lead).
    pub fn phase(&self, coords: &[u64]) -> u64 {
        assert_eq!(coords.len(), self.divisors.len(), "coordinate arity");
        let mut num = 0u64;
        for ((&n, &c), &d) in self
            .exponents
            .iter()
            .zip(coords)
            .zip(&self.divisors)
        {
            // n*c*(lead/d) mod lead, with every factor below 2^32 in practice.
            num = (num + n * c % self.lead * (self.lead / d)) % self.lead;
        }
        num
    }

    pub fn value(&self, coords: &[u64]) -> Complex64 {
        let num = self.phase(coords);
        Complex64::from_polar(1.0, TAU * num as f64 / self.lead as f64)
    }

    /// Whether the character is trivial on the subgroup generated by the
    /// classes with the given coordinate vectors. Exact integer test.
    pub fn is_trivial_on(&self, subgroup_gens: &[&[u64]]) -> bool {
        subgroup_gens.iter().all(|c| self.phase(c) == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn group(q: u64, d: &str) -> PicGroup {
        PicGroup::new(QuadExt::new(parse_poly(d, q).unwrap()).unwrap())
    }

    #[test]
    fn trivial_group_structure() {
        let g = group(3, "t^3 + 2*t + 2");
        assert_eq!(g.ext().class_number(), 1);
        let all = g.all_reduced();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_identity());
        let basis = PicBasis::new(&g, 5000).unwrap();
        assert!(basis.elementary_divisors().is_empty());
        assert_eq!(basis.class_number(), 1);
        assert_eq!(Character::all(&basis).len(), 1);
    }

    #[test]
    fn cyclic_order_seven() {
        let g = group(3, "t^3 + 2*t + 1");
        assert_eq!(g.ext().class_number(), 7);
        assert_eq!(g.all_reduced().len(), 7);

        let t = parse_poly("t", 3).unwrap();
        let one = Poly::one(3);
        let x = g.class_of_pair(&t, &one).unwrap();
        assert_eq!(g.order_of(&x, 7), 7);

        let basis = PicBasis::new(&g, 5000).unwrap();
        assert_eq!(basis.elementary_divisors(), &[7]);
        assert_eq!(basis.index.len(), 7);
        // The generator reproduces every class through its powers.
        let gen = &basis.generators()[0];
        for p in 0..7 {
            let coords = basis.coords_of(&g.pow(gen, p)).unwrap();
            assert_eq!(coords, &[p]);
        }
    }

    #[test]
    fn group_laws_hold() {
        let g = group(3, "t^5 + t^4 + t^2 + 1");
        let h = g.ext().class_number();
        let all = g.all_reduced();
        assert_eq!(all.len() as u64, h);
        // Deterministic strided sample of triples.
        let n = all.len();
        for step in 1..4usize {
            for i in (0..n).step_by(3 + step) {
                let x = &all[i];
                let y = &all[(i * 5 + step) % n];
                let z = &all[(i * 11 + 2 * step) % n];
                let left = g.compose(&g.compose(x, y), z);
                let right = g.compose(x, &g.compose(y, z));
                assert_eq!(left, right);
                assert!(g.compose(x, &g.neg(x)).is_identity());
                assert_eq!(g.compose(x, &g.identity()), *x);
            }
        }
        for x in &all {
            assert!(g.pow(x, h).is_identity());
        }
    }

    #[test]
    fn structure_matches_class_number() {
        for (q, d) in [
            (3, "t^5 + t^4 + t^2 + 1"),
            (3, "t^5 + 2*t + 1"),
            (3, "t^5 + t^4 + 2*t + 1"),
            (5, "t^3 + t + 1"),
            (5, "t^3 + 3*t + 2"),
        ] {
            let g = group(q, d);
            let h = g.ext().class_number();
            let basis = PicBasis::new(&g, 5000).unwrap();
            assert_eq!(
                basis.elementary_divisors().iter().product::<u64>().max(1),
                h,
                "product of elementary divisors for {d} over F_{q}"
            );
            for w in basis.elementary_divisors().windows(2) {
                assert_eq!(w[0] % w[1], 0, "divisibility chain for {d}");
            }
            assert_eq!(basis.index.len() as u64, h);
            for (j, gen) in basis.generators().iter().enumerate() {
                assert_eq!(g.order_of(gen, h), basis.elementary_divisors()[j]);
            }
            // Coordinates invert the odometer: rebuild a sample of classes.
            for (cls, coords) in basis.classes().into_iter().step_by(7) {
                let mut acc = g.identity();
                for (j, &c) in coords.iter().enumerate() {
                    acc = g.compose(&acc, &g.pow(&basis.generators()[j], c));
                }
                assert_eq!(&acc, cls);
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        let g = group(3, "t^3 + 2*t + 1");
        let basis = PicBasis::new(&g, 5000).unwrap();
        let chars = Character::all(&basis);
        assert_eq!(chars.len(), 7);
        assert!(chars[0].is_principal());
        let coords: Vec<Vec<u64>> = basis
            .classes()
            .into_iter()
            .map(|(_, c)| c.to_vec())
            .collect();
        for (i, a) in chars.iter().enumerate() {
            for (j, b) in chars.iter().enumerate() {
                let sum: Complex64 = coords
                    .iter()
                    .map(|c| a.value(c) * b.value(c).conj())
                    .sum();
                let expect = if i == j { 7.0 } else { 0.0 };
                assert!(
                    (sum.re - expect).abs() < 1e-9 && sum.im.abs() < 1e-9,
                    "orthogonality of characters {i}, {j}: {sum}"
                );
            }
        }
        // Only the principal character is trivial on a generating subgroup.
        let gen_coords = basis.coords_of(&basis.generators()[0]).unwrap();
        let trivial: Vec<bool> = chars
            .iter()
            .map(|c| c.is_trivial_on(&[gen_coords]))
            .collect();
        assert_eq!(trivial.iter().filter(|&&b| b).count(), 1);
        assert!(trivial[0]);
    }

    #[test]
    fn split_prime_classes() {
        let g = group(3, "t^3 + 2*t + 1");
        let t = parse_poly("t", 3).unwrap();
        // D = 1 mod t, so t splits and the square root of D mod t is 1 or 2.
        let cls = g.split_prime_class(&t).unwrap();
        assert_eq!(g.order_of(&cls, 7), 7);
        // The two primes above t are conjugate classes: the other root of
        // D mod t gives the inverse class.
        let other = g.class_of_pair(&t, &parse_poly("2", 3).unwrap()).unwrap();
        assert!(g.compose(&cls, &other).is_identity());

        // Inert and ramified places are rejected.
        let p0 = parse_poly("t^3 + 2*t + 1", 3).unwrap();
        assert!(g.split_prime_class(&p0).is_err());
        let inert = parse_poly("t^3 + 2*t + 2", 3).unwrap();
        assert!(g.split_prime_class(&inert).is_err());
    }

    #[test]
    fn class_of_pair_validates() {
        let g = group(3, "t^3 + 2*t + 1");
        let t = parse_poly("t", 3).unwrap();
        let zero = Poly::zero(3);
        // b^2 - D = -D is not divisible by t (D has constant term 1).
        assert!(g.class_of_pair(&t, &zero).is_err());
        assert!(g.class_of_pair(&zero, &zero).is_err());
    }
}
