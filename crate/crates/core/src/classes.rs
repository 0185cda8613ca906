//! Left ideal classes of a maximal order in the definite quaternion
//! algebra.
//!
//! Enumeration walks the graph whose edges are the ideals of prime norm:
//! from a representative I with right order O, every left O-ideal J of
//! norm (T) yields the neighbour I * J, and neighbours are merged by the
//! exact principality test from the lattice layer. The walk stops when the
//! accumulated unit weights reach the exact mass
//!
//! ```text
//! sum_i 1/w_i = (|P_0| - 1) / (q^2 - 1),
//! ```
//!
//! which certifies completeness; overshooting the mass is impossible for a
//! correct equivalence test and is reported as an internal error.
//!
//! Ideals of prime norm at a split place come from the residue algebra
//! O/TO, which is a 2x2 matrix algebra over the residue field. The code
//! finds an isotropic vector of the norm form, converts it to an
//! idempotent, builds matrix units, and reads off the projective line of
//! rank-one generators. At the ramified place the norm form degenerates
//! instead: its bilinear radical is the unique two-sided ideal.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::irred::monic_irreducibles;
use crate::lattice::{left_class_witness, QLattice};
use crate::poly::Poly;
use crate::quat::{Quat, QuatAlgebra};

/// Exact rational number with reduced representation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Rational {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd_i128(num.abs(), den.abs()).max(1);
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn zero() -> Rational {
        Rational { num: 0, den: 1 }
    }

    pub fn add(self, other: Rational) -> Rational {
        Rational::new(
            self.num * other.den + other.num * self.den,
            self.den * other.den,
        )
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn as_integer(&self) -> Option<i128> {
        (self.den == 1).then_some(self.num)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn gt(&self, other: &Rational) -> bool {
        self.num * other.den > other.num * self.den
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd_i128(b, a % b)
    }
}

/// Total mass of the ideal classes for a ramified place of given degree.
pub fn class_mass(q: u64, deg_p0: usize) -> Rational {
    let norm = (q as i128).pow(deg_p0 as u32);
    Rational::new(norm - 1, (q as i128) * (q as i128) - 1)
}

/// Class number of the order from the mass and the elliptic correction.
pub fn ramified_class_number(q: u64, deg_p0: usize) -> Result<u64> {
    let mass = class_mass(q, deg_p0);
    let parity = if deg_p0 % 2 == 1 { 2 } else { 0 };
    let elliptic = Rational::new(q as i128 * parity, 2 * (q as i128 + 1));
    let h = mass.add(elliptic);
    let n = h
        .as_integer()
        .ok_or_else(|| Error::internal("class number formula gave a non-integer"))?;
    Ok(n as u64)
}

/// One ideal class: an integral representative of small norm, its right
/// order, and that order's unit data.
pub struct IdealClass {
    pub ideal: QLattice,
    pub right_order: QLattice,
    pub units: Vec<Quat>,
    pub weight: u64,
}

/// The full set of left ideal classes of the standard maximal order.
pub struct ClassSet {
    alg: Arc<QuatAlgebra>,
    pub classes: Vec<IdealClass>,
    pub mass: Rational,
}

impl ClassSet {
    pub fn algebra(&self) -> &Arc<QuatAlgebra> {
        &self.alg
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class equivalent to the given left ideal.
    pub fn class_of(&self, ideal: &QLattice) -> Result<Option<(usize, Quat)>> {
        for (idx, class) in self.classes.iter().enumerate() {
            if let Some(witness) = left_class_witness(ideal, &class.ideal)? {
                return Ok(Some((idx, witness)));
            }
        }
        Ok(None)
    }

    pub fn enumerate(alg: &Arc<QuatAlgebra>) -> Result<ClassSet> {
        let q = alg.q();
        let target = class_mass(q, alg.p0().deg());
        let standard = QLattice::standard_order(alg);
        let mut classes = vec![make_class(standard.clone())?];
        let mut mass = Rational::new(1, classes[0].weight as i128);

        let mut degree = 1usize;
        let mut ts: Vec<Poly> = prime_list(q, degree, alg.p0());
        let mut processed = 0usize;
        while mass != target {
            if mass.gt(&target) {
                return Err(Error::internal("class mass exceeded its exact target"));
            }
            if processed == classes.len() {
                degree += 1;
                if degree > 4 {
                    return Err(Error::internal(
                        "class graph failed to close at small prime norms",
                    ));
                }
                ts.extend(prime_list(q, degree, alg.p0()));
                processed = 0;
                continue;
            }
            let rep = classes[processed].ideal.clone();
            let order = classes[processed].right_order.clone();
            processed += 1;
            for t in &ts {
                for j in ideals_of_norm(&order, t)? {
                    let candidate = rep.mul(&j)?;
                    let mut known = false;
                    for class in &classes {
                        if left_class_witness(&candidate, &class.ideal)?.is_some() {
                            known = true;
                            break;
                        }
                    }
                    if known {
                        continue;
                    }
                    let class = make_class(reduce_representative(candidate)?)?;
                    mass = mass.add(Rational::new(1, class.weight as i128));
                    classes.push(class);
                }
            }
        }

        let expected = ramified_class_number(q, alg.p0().deg())?;
        if classes.len() as u64 != expected {
            return Err(Error::internal(format!(
                "found {} classes but the formula gives {}",
                classes.len(),
                expected
            )));
        }
        Ok(ClassSet {
            alg: Arc::clone(alg),
            classes,
            mass,
        })
    }

    /// Rebuilds a class set from stored representative ideals, re-deriving
    /// orders and unit weights and re-checking the mass certificate, so a
    /// corrupted or stale store can never masquerade as a valid set.
    pub fn from_ideals(alg: &Arc<QuatAlgebra>, ideals: Vec<QLattice>) -> Result<ClassSet> {
        let standard = QLattice::standard_order(alg);
        let mut classes = Vec::with_capacity(ideals.len());
        let mut mass = Rational::zero();
        for ideal in ideals {
            if !ideal.is_integral() || ideal.left_order()? != standard {
                return Err(Error::internal(
                    "stored ideal is not an integral left ideal of the standard order",
                ));
            }
            let class = make_class(ideal)?;
            mass = mass.add(Rational::new(1, class.weight as i128));
            classes.push(class);
        }
        if mass != class_mass(alg.q(), alg.p0().deg()) {
            return Err(Error::internal("stored classes fail the mass certificate"));
        }
        let expected = ramified_class_number(alg.q(), alg.p0().deg())?;
        if classes.len() as u64 != expected {
            return Err(Error::internal(
                "stored class count disagrees with the class number formula",
            ));
        }
        Ok(ClassSet {
            alg: Arc::clone(alg),
            classes,
            mass,
        })
    }
}

fn prime_list(q: u64, degree: usize, p0: &Poly) -> Vec<Poly> {
    monic_irreducibles(q, degree)
        .into_iter()
        .filter(|t| t != p0)
        .collect()
}

fn make_class(ideal: QLattice) -> Result<IdealClass> {
    let right_order = ideal.right_order()?;
    let units = right_order.units()?;
    let q = ideal.algebra().q();
    let count = units.len() as u64;
    if count % (q - 1) != 0 {
        return Err(Error::internal("unit count not divisible by q - 1"));
    }
    Ok(IdealClass {
        ideal,
        right_order,
        units,
        weight: count / (q - 1),
    })
}

/// Replaces a representative by an equivalent integral ideal of minimal
/// norm: I * conj(x) / nrd(I) for a shortest vector x of I.
fn reduce_representative(ideal: QLattice) -> Result<QLattice> {
    debug_assert!(ideal.is_integral());
    let reduced = ideal.reduced_basis()?;
    let x = reduced.vector(0);
    let (norm, norm_den) = ideal.nrd();
    debug_assert!(norm_den.is_one());
    let q = ideal.algebra().q();
    let factor = x.conj().scale(&Poly::one(q), &norm)?;
    let gens: Vec<Quat> = ideal.basis().iter().map(|b| b.mul(&factor)).collect();
    QLattice::from_generators(ideal.algebra(), &gens)
}

/// All left ideals of the order with norm (t), for monic irreducible t.
///
/// At a split place there are |t| + 1 of them, the lines of the residue
/// matrix algebra; at the ramified place there is exactly one, the radical
/// of the degenerate norm form.
pub fn ideals_of_norm(order: &QLattice, t: &Poly) -> Result<Vec<QLattice>> {
    if !t.is_monic() || !crate::irred::is_irreducible(t) {
        return Err(Error::domain("norm must be a monic irreducible polynomial"));
    }
    if t == order.algebra().p0() {
        return Ok(vec![two_sided_at_ramified(order)?]);
    }
    let view = ResidueView::new(order, t)?;
    let iso = view.isotropic_vector()?;
    let e11 = view.idempotent_from(iso)?;
    let (e12, _e21) = view.matrix_units(&e11)?;

    let mut ideals = Vec::new();
    // Lines (a : b) of the projective line: a = 1 with b running over the
    // residue field, then (0 : 1).
    let f = view.field();
    for code in 0..f.order() {
        let b = f.element_from_code(code);
        let x = view.vec_add(&e11, &view.vec_scale(&e12, &b));
        ideals.push(view.lift_line_ideal(&x, t)?);
    }
    ideals.push(view.lift_line_ideal(&e12, t)?);

    for (a, i) in ideals.iter().enumerate() {
        for j in &ideals[(a + 1)..] {
            if i == j {
                return Err(Error::internal("residue lines produced equal ideals"));
            }
        }
    }
    Ok(ideals)
}

/// The unique two-sided ideal of norm (P_0): the lift of the bilinear
/// radical of the norm form modulo the ramified place.
pub fn two_sided_at_ramified(order: &QLattice) -> Result<QLattice> {
    let alg = order.algebra();
    let p0 = alg.p0().clone();
    let view = ResidueView::new(order, &p0)?;
    let radical = view.bilinear_radical();
    if radical.len() != 2 {
        return Err(Error::internal(format!(
            "norm form radical at the ramified place has rank {}",
            radical.len()
        )));
    }
    let mut gens: Vec<Quat> = radical
        .iter()
        .map(|v| view.lift_vector(v))
        .collect();
    for b in order.basis() {
        gens.push(b.scale(&p0, &Poly::one(alg.q()))?);
    }
    let ideal = QLattice::from_generators(alg, &gens)?;
    let (nn, nd) = ideal.nrd();
    if nn != p0 || !nd.is_one() {
        return Err(Error::internal("two-sided ideal has the wrong norm"));
    }
    debug_assert_eq!(ideal.left_order()?, *order);
    debug_assert_eq!(ideal.right_order()?, *order);
    debug_assert_eq!(
        ideal.mul(&ideal)?,
        order.scale(&p0, &Poly::one(alg.q()))?
    );
    Ok(ideal)
}

type FVec = [FieldElement; 4];

/// The order reduced modulo a prime: structure constants, traces, and the
/// norm form, all over the residue field.
struct ResidueView<'a> {
    order: &'a QLattice,
    field: Arc<FieldSpec>,
    structure: [[FVec; 4]; 4],
    traces: [FieldElement; 4],
    norms: [FieldElement; 4],
    pairings: [[FieldElement; 4]; 4],
    one: FVec,
}

impl<'a> ResidueView<'a> {
    fn new(order: &'a QLattice, t: &Poly) -> Result<ResidueView<'a>> {
        let alg = order.algebra();
        let q = alg.q();
        let field = FieldSpec::new(q, t.clone())?;
        let den = order.den().clone();
        let den_sq = den.mul(&den);
        let scaled = order.scaled_basis();

        let reduce = |p: &Poly| field.element_from_poly(p);
        let exact = |p: &Poly, d: &Poly, what: &str| -> Result<Poly> {
            p.div_exact(d)
                .map_err(|_| Error::internal(format!("order data not integral: {what}")))
        };

        let mut structure: [[FVec; 4]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| field.zero())));
        for g in 0..4 {
            for h in 0..4 {
                let prod = scaled[g].mul(&scaled[h]);
                let as_order_elt = prod.scale(&Poly::one(q), &den_sq)?;
                let coords = order.coords_of(&as_order_elt).ok_or_else(|| {
                    Error::internal("order is not closed under multiplication")
                })?;
                structure[g][h] = [
                    reduce(&coords[0]),
                    reduce(&coords[1]),
                    reduce(&coords[2]),
                    reduce(&coords[3]),
                ];
            }
        }

        let mut traces: [FieldElement; 4] = std::array::from_fn(|_| field.zero());
        let mut norms: [FieldElement; 4] = std::array::from_fn(|_| field.zero());
        let mut pairings: [[FieldElement; 4]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| field.zero()));
        for g in 0..4 {
            let (tn, td) = scaled[g].trd();
            debug_assert!(td.is_one());
            traces[g] = reduce(&exact(&tn, &den, "trace")?);
            norms[g] = reduce(&exact(&scaled[g].nrd_numerator(), &den_sq, "norm")?);
            for h in 0..4 {
                if g < h {
                    let b = exact(&scaled[g].pair(&scaled[h]), &den_sq, "pairing")?;
                    pairings[g][h] = reduce(&b);
                    pairings[h][g] = pairings[g][h].clone();
                }
            }
        }

        let one_coords = order
            .coords_of(&alg.one())
            .ok_or_else(|| Error::internal("order does not contain one"))?;
        let one = [
            reduce(&one_coords[0]),
            reduce(&one_coords[1]),
            reduce(&one_coords[2]),
            reduce(&one_coords[3]),
        ];

        Ok(ResidueView {
            order,
            field,
            structure,
            traces,
            norms,
            pairings,
            one,
        })
    }

    fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    fn vec_zero(&self) -> FVec {
        std::array::from_fn(|_| self.field.zero())
    }

    fn vec_is_zero(&self, v: &FVec) -> bool {
        v.iter().all(FieldElement::is_zero)
    }

    fn vec_add(&self, u: &FVec, v: &FVec) -> FVec {
        std::array::from_fn(|g| u[g].add(&v[g]))
    }

    fn vec_sub(&self, u: &FVec, v: &FVec) -> FVec {
        std::array::from_fn(|g| u[g].sub(&v[g]))
    }

    fn vec_scale(&self, u: &FVec, c: &FieldElement) -> FVec {
        std::array::from_fn(|g| u[g].mul(c))
    }

    fn vec_mul(&self, u: &FVec, v: &FVec) -> FVec {
        let mut out = self.vec_zero();
        for g in 0..4 {
            if u[g].is_zero() {
                continue;
            }
            for h in 0..4 {
                if v[h].is_zero() {
                    continue;
                }
                let c = u[g].mul(&v[h]);
                for l in 0..4 {
                    if self.structure[g][h][l].is_zero() {
                        continue;
                    }
                    out[l] = out[l].add(&c.mul(&self.structure[g][h][l]));
                }
            }
        }
        out
    }

    fn vec_trd(&self, u: &FVec) -> FieldElement {
        let mut s = self.field.zero();
        for g in 0..4 {
            s = s.add(&u[g].mul(&self.traces[g]));
        }
        s
    }

    /// Norm form evaluated on residue coordinates.
    fn quad(&self, u: &FVec) -> FieldElement {
        let mut s = self.field.zero();
        for g in 0..4 {
            if u[g].is_zero() {
                continue;
            }
            s = s.add(&u[g].square().mul(&self.norms[g]));
            for h in (g + 1)..4 {
                if u[h].is_zero() {
                    continue;
                }
                s = s.add(&u[g].mul(&u[h]).mul(&self.pairings[g][h]));
            }
        }
        s
    }

    /// Polarization B(u, v) = Q(u + v) - Q(u) - Q(v).
    fn bilinear(&self, u: &FVec, v: &FVec) -> FieldElement {
        let mut s = self.field.zero();
        for g in 0..4 {
            for h in 0..4 {
                if u[g].is_zero() || v[h].is_zero() {
                    continue;
                }
                let coeff = if g == h {
                    self.norms[g].mul_scalar(2)
                } else {
                    self.pairings[g.min(h)][g.max(h)].clone()
                };
                s = s.add(&u[g].mul(&v[h]).mul(&coeff));
            }
        }
        s
    }

    /// Basis of the radical of the polarization, as residue vectors.
    fn bilinear_radical(&self) -> Vec<FVec> {
        // Rows of the Gram matrix of B; kernel by Gaussian elimination.
        let mut rows: Vec<FVec> = Vec::new();
        for g in 0..4 {
            let e: FVec = std::array::from_fn(|h| {
                if h == g {
                    self.field.one()
                } else {
                    self.field.zero()
                }
            });
            rows.push(std::array::from_fn(|h| {
                let eh: FVec = std::array::from_fn(|l| {
                    if l == h {
                        self.field.one()
                    } else {
                        self.field.zero()
                    }
                });
                self.bilinear(&e, &eh)
            }));
        }
        // Kernel of the 4x4 matrix `rows` (x * rows = 0 columns view): the
        // matrix is symmetric, so row kernel and column kernel agree.
        let mut augmented: Vec<(FVec, FVec)> = (0..4)
            .map(|g| {
                let id: FVec = std::array::from_fn(|h| {
                    if h == g {
                        self.field.one()
                    } else {
                        self.field.zero()
                    }
                });
                (rows[g].clone(), id)
            })
            .collect();
        let mut rank_cols: Vec<usize> = Vec::new();
        let mut row = 0usize;
        for col in 0..4 {
            let pivot = (row..4).find(|&r| !augmented[r].0[col].is_zero());
            let Some(p) = pivot else { continue };
            augmented.swap(row, p);
            let inv = augmented[row].0[col].inv().expect("pivot nonzero");
            augmented[row].0 = self.vec_scale(&augmented[row].0, &inv);
            augmented[row].1 = self.vec_scale(&augmented[row].1, &inv);
            for r in 0..4 {
                if r == row || augmented[r].0[col].is_zero() {
                    continue;
                }
                let c = augmented[r].0[col].clone();
                augmented[r].0 = self.vec_sub(&augmented[r].0, &self.vec_scale(&augmented[row].0, &c));
                augmented[r].1 = self.vec_sub(&augmented[r].1, &self.vec_scale(&augmented[row].1, &c));
            }
            rank_cols.push(col);
            row += 1;
        }
        augmented[row..].iter().map(|(_, u)| u.clone()).collect()
    }

    /// A nonzero isotropic vector of the norm form over the residue field.
    fn isotropic_vector(&self) -> Result<FVec> {
        // Diagonalize by congruence, tracking the new basis vectors.
        let mut basis: Vec<FVec> = (0..4)
            .map(|g| {
                std::array::from_fn(|h| {
                    if h == g {
                        self.field.one()
                    } else {
                        self.field.zero()
                    }
                })
            })
            .collect();
        for s in 0..4 {
            if self.quad(&basis[s]).is_zero() {
                if let Some(h) = ((s + 1)..4).find(|&h| !self.quad(&basis[h]).is_zero()) {
                    basis.swap(s, h);
                } else if let Some(h) =
                    ((s + 1)..4).find(|&h| !self.bilinear(&basis[s], &basis[h]).is_zero())
                {
                    basis[s] = self.vec_add(&basis[s].clone(), &basis[h]);
                } else {
                    // Orthogonal to everything remaining: genuinely isotropic.
                    return Ok(basis[s].clone());
                }
            }
            let a = self.quad(&basis[s]);
            let two_a_inv = a.mul_scalar(2).inv().expect("nonzero in odd characteristic");
            for h in (s + 1)..4 {
                let b = self.bilinear(&basis[s], &basis[h]);
                if b.is_zero() {
                    continue;
                }
                let lambda = b.mul(&two_a_inv);
                basis[h] = self.vec_sub(&basis[h], &self.vec_scale(&basis[s], &lambda));
            }
        }
        let diag: Vec<FieldElement> = basis.iter().map(|v| self.quad(v)).collect();
        if let Some(g) = diag.iter().position(FieldElement::is_zero) {
            return Ok(basis[g].clone());
        }
        // Ternary subform a0 y0^2 + a1 y1^2 + a2 y2^2 is isotropic over any
        // finite field; solve for y2 by square root.
        let a2_inv = diag[2].inv().expect("diagonal entry nonzero");
        for c0 in 0..self.field.order() {
            for c1 in 0..self.field.order() {
                if c0 == 0 && c1 == 0 {
                    continue;
                }
                let y0 = self.field.element_from_code(c0);
                let y1 = self.field.element_from_code(c1);
                let partial = diag[0]
                    .mul(&y0.square())
                    .add(&diag[1].mul(&y1.square()));
                let rhs = partial.neg().mul(&a2_inv);
                if let Some(y2) = rhs.sqrt() {
                    let mut v = self.vec_scale(&basis[0], &y0);
                    v = self.vec_add(&v, &self.vec_scale(&basis[1], &y1));
                    v = self.vec_add(&v, &self.vec_scale(&basis[2], &y2));
                    debug_assert!(self.quad(&v).is_zero());
                    return Ok(v);
                }
            }
        }
        Err(Error::internal(
            "ternary form claimed anisotropic over a finite field",
        ))
    }

    /// Converts a norm-zero vector into a rank-one idempotent.
    fn idempotent_from(&self, mut u: FVec) -> Result<FVec> {
        if self.vec_is_zero(&u) {
            return Err(Error::internal("isotropic vector is zero"));
        }
        if self.vec_trd(&u).is_zero() {
            let mut fixed = None;
            for l in 0..4 {
                let e: FVec = std::array::from_fn(|h| {
                    if h == l {
                        self.field.one()
                    } else {
                        self.field.zero()
                    }
                });
                let cand = self.vec_mul(&u, &e);
                if !self.vec_trd(&cand).is_zero() {
                    fixed = Some(cand);
                    break;
                }
            }
            u = fixed.ok_or_else(|| {
                Error::internal("nilpotent zero divisor could not be rotated to nonzero trace")
            })?;
        }
        let t_inv = self
            .vec_trd(&u)
            .inv()
            .expect("trace is nonzero by construction");
        let e = self.vec_scale(&u, &t_inv);
        let e2 = self.vec_mul(&e, &e);
        if e2 != e {
            return Err(Error::internal("rank-one element failed to be idempotent"));
        }
        Ok(e)
    }

    /// Matrix units (E12, E21) complementing the idempotent E11.
    fn matrix_units(&self, e11: &FVec) -> Result<(FVec, FVec)> {
        let e22 = self.vec_sub(&self.one, e11);
        let mut e12 = None;
        for l in 0..4 {
            let e: FVec = std::array::from_fn(|h| {
                if h == l {
                    self.field.one()
                } else {
                    self.field.zero()
                }
            });
            let cand = self.vec_mul(&self.vec_mul(e11, &e), &e22);
            if !self.vec_is_zero(&cand) {
                e12 = Some(cand);
                break;
            }
        }
        let e12 = e12.ok_or_else(|| Error::internal("corner space E11*A*E22 is zero"))?;
        for l in 0..4 {
            let e: FVec = std::array::from_fn(|h| {
                if h == l {
                    self.field.one()
                } else {
                    self.field.zero()
                }
            });
            let cand = self.vec_mul(&self.vec_mul(&e22, &e), e11);
            let c = self.vec_trd(&self.vec_mul(&e12, &cand));
            if c.is_zero() {
                continue;
            }
            let e21 = self.vec_scale(&cand, &c.inv().expect("nonzero"));
            debug_assert_eq!(self.vec_mul(&e12, &e21), *e11);
            debug_assert_eq!(self.vec_mul(&e21, &e12), e22);
            return Ok((e12, e21));
        }
        Err(Error::internal("no complementary matrix unit found"))
    }

    /// Lifts residue coordinates to an element of the order.
    fn lift_vector(&self, v: &FVec) -> Quat {
        let alg = self.order.algebra();
        let q = alg.q();
        let basis = self.order.basis();
        let mut out = alg.zero();
        for g in 0..4 {
            if v[g].is_zero() {
                continue;
            }
            let c = v[g].to_poly();
            out = out.add(&basis[g].scale(&c, &Poly::one(q)).expect("unit denominator"));
        }
        out
    }

    /// The left ideal O * x + O * t for a rank-one residue generator x.
    fn lift_line_ideal(&self, x: &FVec, t: &Poly) -> Result<QLattice> {
        let alg = self.order.algebra();
        let q = alg.q();
        let lifted = self.lift_vector(x);
        let basis = self.order.basis();
        let mut gens = Vec::with_capacity(8);
        for b in &basis {
            gens.push(b.mul(&lifted));
        }
        for b in &basis {
            gens.push(b.scale(t, &Poly::one(q))?);
        }
        let ideal = QLattice::from_generators(alg, &gens)?;
        let (nn, nd) = ideal.nrd();
        if nn != *t || !nd.is_one() {
            return Err(Error::internal("line ideal has the wrong norm"));
        }
        Ok(ideal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn algebra(p0: &str) -> Arc<QuatAlgebra> {
        QuatAlgebra::new(3, parse_poly(p0, 3).unwrap()).unwrap()
    }

    #[test]
    fn mass_and_class_number_formulas() {
        assert_eq!(class_mass(3, 3), Rational::new(13, 4));
        assert_eq!(class_mass(3, 5), Rational::new(121, 4));
        assert_eq!(class_mass(5, 3), Rational::new(31, 6));
        assert_eq!(ramified_class_number(3, 3).unwrap(), 4);
        assert_eq!(ramified_class_number(3, 5).unwrap(), 31);
        assert_eq!(ramified_class_number(5, 3).unwrap(), 6);
    }

    #[test]
    fn line_ideals_at_a_split_prime() {
        let alg = algebra("t^3 - t - 1");
        let order = QLattice::standard_order(&alg);
        let t = parse_poly("t", 3).unwrap();
        let ideals = ideals_of_norm(&order, &t).unwrap();
        assert_eq!(ideals.len(), 4);
        for ideal in &ideals {
            assert!(ideal.is_integral());
            assert_eq!(ideal.nrd(), (t.clone(), Poly::one(3)));
            assert_eq!(ideal.left_order().unwrap(), order);
        }
    }

    #[test]
    fn ramified_prime_gives_one_two_sided_ideal() {
        let alg = algebra("t^3 - t - 1");
        let order = QLattice::standard_order(&alg);
        let ideals = ideals_of_norm(&order, alg.p0()).unwrap();
        assert_eq!(ideals.len(), 1);
        let j = alg.gen_j();
        let gens: Vec<Quat> = order.basis().iter().map(|b| b.mul(&j)).collect();
        let expected = QLattice::from_generators(&alg, &gens).unwrap();
        assert_eq!(ideals[0], expected);
    }

    #[test]
    fn cubic_class_sets() {
        for p0 in ["t^3 - t - 1", "t^3 + 2*t + 1"] {
            let alg = algebra(p0);
            let set = ClassSet::enumerate(&alg).unwrap();
            assert_eq!(set.len(), 4);
            assert_eq!(set.mass, Rational::new(13, 4));
            let mut weights: Vec<u64> = set.classes.iter().map(|c| c.weight).collect();
            assert_eq!(weights[0], 4); // the principal class comes first
            weights.sort();
            assert_eq!(weights, vec![1, 1, 1, 4]);
            assert_eq!(set.classes[0].ideal, QLattice::standard_order(&alg));
            for class in &set.classes {
                assert!(class.ideal.is_integral());
            }
            // Pairwise inequivalent.
            for i in 0..set.len() {
                for j in (i + 1)..set.len() {
                    assert!(left_class_witness(&set.classes[i].ideal, &set.classes[j].ideal)
                        .unwrap()
                        .is_none());
                }
            }
        }
    }

    #[test]
    fn quinary_field_class_set() {
        let alg = QuatAlgebra::new(5, parse_poly("t^3 + t + 1", 5).unwrap()).unwrap();
        let set = ClassSet::enumerate(&alg).unwrap();
        assert_eq!(set.len(), 6);
        assert_eq!(set.mass, Rational::new(31, 6));
    }

    #[test]
    fn quintic_class_set() {
        let alg = algebra("t^5 + 2*t + 1");
        assert!(crate::irred::is_irreducible(alg.p0()));
        let set = ClassSet::enumerate(&alg).unwrap();
        assert_eq!(set.len(), 31);
        assert_eq!(set.mass, Rational::new(121, 4));
    }
}
