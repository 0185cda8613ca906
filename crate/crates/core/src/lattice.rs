//! Full-rank lattices in the definite quaternion algebra.
//!
//! A lattice is stored as a canonical Hermite normal form over F_q[t]: four
//! echelon rows with monic pivots and reduced above-pivot entries, together
//! with one monic denominator, the whole five-tuple in lowest terms. Two
//! lattices are equal as sets exactly when their stored forms are equal,
//! which makes ideal-class bookkeeping purely structural.
//!
//! The other half of this module is reduction of a basis with respect to
//! the norm form. Because the algebra is definite, the norm form is
//! anisotropic over the completion at infinity, and a short computation
//! with binary subforms shows the ultrametric Cauchy-Schwarz bound
//! 2 deg B(u, v) <= deg nrd(u) + deg nrd(v) for independent u, v. The
//! reduction loop below drives every pair to the strictly orthogonal state
//! deg B(b_g, b_h) < min(deg nrd(b_g), deg nrd(b_h)) and makes the diagonal
//! residue form on each degree-parity class anisotropic over F_q. Those two
//! certificates together force the degree identity
//!
//! ```text
//! deg nrd(sum c_g b_g) = max_g (2 deg c_g + deg nrd(b_g)),
//! ```
//!
//! which turns "all elements of bounded norm degree" into a finite
//! coordinate box and makes minimal-norm questions exact. In particular a
//! left module over a maximal order is principal if and only if its reduced
//! basis attains the degree of its norm ideal, which is the equivalence
//! test used throughout class enumeration.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::irred::poly_code;
use crate::modq;
use crate::poly::Poly;
use crate::quat::{Quat, QuatAlgebra};

/// Row-echelon Hermite normal form over F_q[t].
///
/// Returns the nonzero rows with strictly increasing pivot columns, monic
/// pivots, and above-pivot entries reduced modulo their pivot. The result
/// is the canonical basis of the row span.
pub fn hnf_rows(rows: Vec<Vec<Poly>>) -> Vec<Vec<Poly>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut active: Vec<Vec<Poly>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|e| !e.is_zero()))
        .collect();
    let mut result: Vec<Vec<Poly>> = Vec::new();
    for col in 0..width {
        loop {
            let mut nonzero: Vec<usize> = (0..active.len())
                .filter(|&r| !active[r][col].is_zero())
                .collect();
            if nonzero.is_empty() {
                break;
            }
            if nonzero.len() == 1 {
                let mut pivot = active.swap_remove(nonzero[0]);
                let lead = pivot[col].leading_coeff();
                if lead != 1 {
                    let inv = modq::inv(lead, pivot[col].q());
                    for e in &mut pivot {
                        *e = e.mul_scalar(inv);
                    }
                }
                result.push(pivot);
                break;
            }
            // Euclidean step: reduce every entry in this column against the
            // one of minimal degree.
            nonzero.sort_by_key(|&r| active[r][col].deg());
            let p = nonzero[0];
            for &r in &nonzero[1..] {
                let (quo, _) = active[r][col]
                    .divmod(&active[p][col])
                    .expect("pivot entry is nonzero");
                for cidx in 0..width {
                    let sub = quo.mul(&active[p][cidx]);
                    active[r][cidx] = active[r][cidx].sub(&sub);
                }
            }
            active.retain(|r| r.iter().any(|e| !e.is_zero()));
        }
    }
    debug_assert!(active.is_empty());
    // Reduce entries above each pivot.
    let pivots: Vec<usize> = result
        .iter()
        .map(|r| r.iter().position(|e| !e.is_zero()).expect("nonzero row"))
        .collect();
    for i in 0..result.len() {
        for j in (i + 1)..result.len() {
            let pc = pivots[j];
            if result[i][pc].deg_lt(&result[j][pc]) {
                continue;
            }
            let (quo, _) = result[i][pc]
                .divmod(&result[j][pc])
                .expect("pivot entry is nonzero");
            for cidx in pc..width {
                let sub = quo.mul(&result[j][cidx]);
                result[i][cidx] = result[i][cidx].sub(&sub);
            }
        }
    }
    result
}

impl Poly {
    fn deg_lt(&self, other: &Poly) -> bool {
        match (self.degree(), other.degree()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a < b,
        }
    }
}

/// Kernel of the A-linear form v -> sum v_g c_g on A^n, as canonical HNF
/// rows. The rank is n minus one when some c_g is nonzero.
pub fn linear_form_kernel(q: u64, coeffs: &[Poly]) -> Vec<Vec<Poly>> {
    let n = coeffs.len();
    let mut pairs: Vec<(Poly, Vec<Poly>)> = coeffs
        .iter()
        .enumerate()
        .map(|(g, c)| {
            let mut unit = vec![Poly::zero(q); n];
            unit[g] = Poly::one(q);
            (c.clone(), unit)
        })
        .collect();
    loop {
        let mut nonzero: Vec<usize> = (0..n).filter(|&g| !pairs[g].0.is_zero()).collect();
        if nonzero.len() <= 1 {
            break;
        }
        nonzero.sort_by_key(|&g| pairs[g].0.deg());
        let p = nonzero[0];
        let (pc, pu) = (pairs[p].0.clone(), pairs[p].1.clone());
        for &r in &nonzero[1..] {
            let (quo, rem) = pairs[r].0.divmod(&pc).expect("nonzero pivot");
            pairs[r].0 = rem;
            for g in 0..n {
                let sub = quo.mul(&pu[g]);
                pairs[r].1[g] = pairs[r].1[g].sub(&sub);
            }
        }
    }
    let kernel: Vec<Vec<Poly>> = pairs
        .into_iter()
        .filter(|(c, _)| c.is_zero())
        .map(|(_, u)| u)
        .collect();
    hnf_rows(kernel)
}

/// A full-rank fractional lattice, canonically represented.
#[derive(Clone, Debug)]
pub struct QLattice {
    alg: Arc<QuatAlgebra>,
    rows: [[Poly; 4]; 4],
    den: Poly,
}

impl PartialEq for QLattice {
    fn eq(&self, other: &QLattice) -> bool {
        self.alg.q() == other.alg.q()
            && self.alg.delta() == other.alg.delta()
            && self.alg.p0() == other.alg.p0()
            && self.rows == other.rows
            && self.den == other.den
    }
}

impl Eq for QLattice {}

impl QLattice {
    /// Lattice spanned by the given elements; they must span a rank-4
    /// A-module.
    pub fn from_generators(alg: &Arc<QuatAlgebra>, gens: &[Quat]) -> Result<QLattice> {
        let q = alg.q();
        let mut den = Poly::one(q);
        for g in gens {
            let d = g.den();
            den = den.mul(d).div_exact(&den.gcd(d)).expect("gcd divides");
        }
        let rows: Vec<Vec<Poly>> = gens
            .iter()
            .map(|g| {
                let scale = den.div_exact(g.den()).expect("lcm divisible");
                g.nums().iter().map(|n| n.mul(&scale)).collect()
            })
            .collect();
        let echelon = hnf_rows(rows);
        if echelon.len() != 4 {
            return Err(Error::internal(format!(
                "lattice generators have rank {} instead of 4",
                echelon.len()
            )));
        }
        Ok(Self::normalized(alg, echelon, den))
    }

    fn normalized(alg: &Arc<QuatAlgebra>, echelon: Vec<Vec<Poly>>, den: Poly) -> QLattice {
        let mut content = den.clone();
        for r in &echelon {
            for e in r {
                content = content.gcd(e);
            }
        }
        let strip = |p: &Poly| -> Poly {
            if content.is_one() {
                p.clone()
            } else {
                p.div_exact(&content).expect("content divides")
            }
        };
        let rows: Vec<[Poly; 4]> = echelon
            .iter()
            .map(|r| [strip(&r[0]), strip(&r[1]), strip(&r[2]), strip(&r[3])])
            .collect();
        let den = strip(&den);
        debug_assert!(den.is_monic());
        let rows: [[Poly; 4]; 4] = rows.try_into().expect("four echelon rows");
        QLattice {
            alg: Arc::clone(alg),
            rows,
            den,
        }
    }

    /// The standard maximal order with basis 1, i, j, k.
    ///
    /// Its trace Gram matrix is diagonal, its reduced discriminant is the
    /// ideal of the ramified place, and maximality follows.
    pub fn standard_order(alg: &Arc<QuatAlgebra>) -> QLattice {
        let q = alg.q();
        let mut rows: Vec<Vec<Poly>> = Vec::new();
        for g in 0..4 {
            let mut row = vec![Poly::zero(q); 4];
            row[g] = Poly::one(q);
            rows.push(row);
        }
        Self::normalized(alg, rows, Poly::one(q))
    }

    pub fn algebra(&self) -> &Arc<QuatAlgebra> {
        &self.alg
    }

    pub fn rows(&self) -> &[[Poly; 4]; 4] {
        &self.rows
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// The basis as algebra elements (rows divided by the denominator).
    pub fn basis(&self) -> [Quat; 4] {
        [0, 1, 2, 3].map(|g| {
            self.alg
                .quat(self.rows[g].clone(), self.den.clone())
                .expect("stored rows are valid")
        })
    }

    /// The basis rows as integral elements, ignoring the denominator.
    pub fn scaled_basis(&self) -> [Quat; 4] {
        [0, 1, 2, 3].map(|g| self.alg.integral(self.rows[g].clone()))
    }

    /// Product lattice, spanned by all pairwise products.
    pub fn mul(&self, other: &QLattice) -> Result<QLattice> {
        let a = self.basis();
        let b = other.basis();
        let mut gens = Vec::with_capacity(16);
        for x in &a {
            for y in &b {
                gens.push(x.mul(y));
            }
        }
        QLattice::from_generators(&self.alg, &gens)
    }

    /// Image under the standard involution.
    pub fn conj(&self) -> QLattice {
        let rows: Vec<Vec<Poly>> = self
            .rows
            .iter()
            .map(|r| vec![r[0].clone(), r[1].neg(), r[2].neg(), r[3].neg()])
            .collect();
        let echelon = hnf_rows(rows);
        debug_assert_eq!(echelon.len(), 4);
        Self::normalized(&self.alg, echelon, self.den.clone())
    }

    /// Multiplies the lattice by the rational scalar `num/den`.
    pub fn scale(&self, num: &Poly, den: &Poly) -> Result<QLattice> {
        if num.is_zero() || den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let rows: Vec<Vec<Poly>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.mul(num)).collect())
            .collect();
        let echelon = hnf_rows(rows);
        Ok(Self::normalized(&self.alg, echelon, self.den.mul(den)))
    }

    /// Monic generator of the norm ideal of the scaled (integral) rows.
    pub fn scaled_norm(&self) -> Poly {
        let b = self.scaled_basis();
        let mut g = Poly::zero(self.alg.q());
        for x in &b {
            g = g.gcd(&x.nrd_numerator());
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                g = g.gcd(&b[i].pair(&b[j]));
            }
        }
        g
    }

    /// Norm ideal generator as a reduced fraction `(monic num, monic den)`.
    pub fn nrd(&self) -> (Poly, Poly) {
        let num = self.scaled_norm();
        let den = self.den.mul(&self.den);
        let g = num.gcd(&den);
        (
            num.div_exact(&g).expect("gcd divides"),
            den.div_exact(&g).expect("gcd divides"),
        )
    }

    /// Degree of the norm ideal as an integer (negative for truly
    /// fractional lattices).
    pub fn nrd_degree(&self) -> i64 {
        self.scaled_norm().deg() as i64 - 2 * self.den.deg() as i64
    }

    /// Inverse lattice `conj(self) / nrd(self)`.
    pub fn inverse(&self) -> Result<QLattice> {
        let (nn, nd) = self.nrd();
        self.conj().scale(&nd, &nn)
    }

    /// Right order `{x : self * x <= self}`, computed as `inverse * self`.
    pub fn right_order(&self) -> Result<QLattice> {
        let o = self.inverse()?.mul(self)?;
        debug_assert!(o.contains(&self.alg.one()));
        Ok(o)
    }

    /// Left order `{x : x * self <= self}`, computed as `self * inverse`.
    pub fn left_order(&self) -> Result<QLattice> {
        let o = self.mul(&self.inverse()?)?;
        debug_assert!(o.contains(&self.alg.one()));
        Ok(o)
    }

    /// A-coordinates of `x` with respect to the basis, when `x` lies in the
    /// lattice.
    pub fn coords_of(&self, x: &Quat) -> Option<[Poly; 4]> {
        let q = self.alg.q();
        // Solve mu * rows = den * nums exactly, then require x.den | mu.
        let target: Vec<Poly> = x.nums().iter().map(|n| n.mul(&self.den)).collect();
        let mut mu = [
            Poly::zero(q),
            Poly::zero(q),
            Poly::zero(q),
            Poly::zero(q),
        ];
        for col in 0..4 {
            let mut rhs = target[col].clone();
            for g in 0..col {
                rhs = rhs.sub(&mu[g].mul(&self.rows[g][col]));
            }
            let pivot = &self.rows[col][col];
            let (quo, rem) = rhs.divmod(pivot).expect("pivot is monic");
            if !rem.is_zero() {
                return None;
            }
            mu[col] = quo;
        }
        if x.den().is_one() {
            return Some(mu);
        }
        let mut out = [
            Poly::zero(q),
            Poly::zero(q),
            Poly::zero(q),
            Poly::zero(q),
        ];
        for g in 0..4 {
            let (quo, rem) = mu[g].divmod(x.den()).expect("denominator nonzero");
            if !rem.is_zero() {
                return None;
            }
            out[g] = quo;
        }
        Some(out)
    }

    pub fn contains(&self, x: &Quat) -> bool {
        self.coords_of(x).is_some()
    }

    /// Reduced basis of the scaled (integral) lattice.
    pub fn reduced_basis(&self) -> Result<ReducedBasis> {
        reduce_quats(self.scaled_basis().to_vec())
    }

    /// For a left module over a maximal order: a generator when principal.
    ///
    /// The module is principal exactly when its reduced basis attains the
    /// degree of the norm ideal, and the attaining vector is a generator.
    pub fn principal_generator(&self) -> Result<Option<Quat>> {
        let reduced = self.reduced_basis()?;
        let target = self.scaled_norm().deg();
        if reduced.norm_degree(0) != target {
            return Ok(None);
        }
        let gen = reduced.vector(0);
        Ok(Some(gen.scale(&Poly::one(self.alg.q()), &self.den)?))
    }

    /// All units (norm in F_q^x) of an order, as algebra elements.
    pub fn units(&self) -> Result<Vec<Quat>> {
        let q = self.alg.q();
        let reduced = self.reduced_basis()?;
        let den2 = self.den.mul(&self.den);
        let mut out = Vec::new();
        for lambda in 1..q {
            let target = den2.mul_scalar(lambda);
            for u in reduced.elements_with_norm(&target)? {
                out.push(u.scale(&Poly::one(q), &self.den)?);
            }
        }
        Ok(out)
    }

    /// Unit weight: number of units divided by q - 1.
    pub fn unit_weight(&self) -> Result<u64> {
        let count = self.units()?.len() as u64;
        let q = self.alg.q();
        if count % (q - 1) != 0 {
            return Err(Error::internal("unit count not divisible by q - 1"));
        }
        Ok(count / (q - 1))
    }

    /// Basis of the trace-zero sublattice `{x in L : trd(x) = 0}` as
    /// integral elements together with the common denominator.
    pub fn trace_zero_basis(&self) -> (Vec<Quat>, Poly) {
        let q = self.alg.q();
        let traces: Vec<Poly> = self.rows.iter().map(|r| r[0].mul_scalar(2)).collect();
        let kernel = linear_form_kernel(q, &traces);
        let vecs: Vec<Quat> = kernel
            .iter()
            .map(|lam| {
                let mut coords = [
                    Poly::zero(q),
                    Poly::zero(q),
                    Poly::zero(q),
                    Poly::zero(q),
                ];
                for (g, l) in lam.iter().enumerate() {
                    for c in 0..4 {
                        coords[c] = coords[c].add(&l.mul(&self.rows[g][c]));
                    }
                }
                self.alg.integral(coords)
            })
            .collect();
        debug_assert!(vecs.iter().all(|v| v.nums()[0].is_zero()));
        (vecs, self.den.clone())
    }
}

/// Witness for left equivalence: an element `b` with `lhs = rhs * b`, when
/// the two lattices are left-equivalent (same left order assumed).
pub fn left_class_witness(lhs: &QLattice, rhs: &QLattice) -> Result<Option<Quat>> {
    let quotient = rhs.inverse()?.mul(lhs)?;
    quotient.principal_generator()
}

/// A norm-reduced basis of an integral lattice of rank 3 or 4, carrying the
/// orthogonality certificate that validates the degree identity.
pub struct ReducedBasis {
    vecs: Vec<Quat>,
    nrds: Vec<Poly>,
}

/// Reduces a list of independent integral elements against the norm form.
pub fn reduce_quats(vecs: Vec<Quat>) -> Result<ReducedBasis> {
    if vecs.is_empty() {
        return Err(Error::domain("cannot reduce an empty basis"));
    }
    let q = vecs[0].algebra().q();
    let mut vecs = vecs;
    debug_assert!(vecs.iter().all(|v| v.is_integral()));
    let mut iterations = 0usize;
    'outer: loop {
        iterations += 1;
        if iterations > 10_000 {
            return Err(Error::internal("norm reduction failed to converge"));
        }
        if vecs.iter().any(Quat::is_zero) {
            return Err(Error::internal("norm reduction produced a zero vector"));
        }
        let mut nrds: Vec<Poly> = vecs.iter().map(Quat::nrd_numerator).collect();
        let mut order: Vec<usize> = (0..vecs.len()).collect();
        order.sort_by(|&a, &b| {
            nrds[a]
                .deg()
                .cmp(&nrds[b].deg())
                .then_with(|| coord_key(&vecs[a]).cmp(&coord_key(&vecs[b])))
        });
        vecs = order.iter().map(|&g| vecs[g].clone()).collect();
        nrds = order.iter().map(|&g| nrds[g].clone()).collect();

        // Stage 1: size-reduce pairs until every off-diagonal pairing has
        // degree below the smaller norm degree.
        for i in 0..vecs.len() {
            for j in (i + 1)..vecs.len() {
                let b = vecs[i].pair(&vecs[j]);
                if b.is_zero() || b.deg() < nrds[i].deg() {
                    continue;
                }
                let (c, _) = b.divmod(&nrds[i].mul_scalar(2)).expect("norm nonzero");
                debug_assert!(!c.is_zero());
                let shifted = vecs[i].scale(&c, &Poly::one(q))?;
                vecs[j] = vecs[j].sub(&shifted);
                continue 'outer;
            }
        }

        // Stage 2: the residue form on each degree-parity class must be
        // anisotropic over F_q; otherwise a shorter vector exists and
        // replaces the longer one. A binary residue <l_g, l_h> is isotropic
        // exactly when -l_g * l_h is a square.
        for g in 0..vecs.len() {
            for h in 0..vecs.len() {
                if g == h || nrds[g].deg() % 2 != nrds[h].deg() % 2 || nrds[g].deg() > nrds[h].deg()
                {
                    continue;
                }
                let lg = nrds[g].leading_coeff();
                let lh = nrds[h].leading_coeff();
                let ratio = modq::mul(modq::neg(lh, q), modq::inv(lg, q), q);
                if let Some(c) = modq::sqrt(ratio, q) {
                    let shift = (nrds[h].deg() - nrds[g].deg()) / 2;
                    let factor = Poly::monomial(q, c, shift);
                    let v = vecs[h].add(&vecs[g].scale(&factor, &Poly::one(q))?);
                    if v.is_zero() || v.nrd_numerator().deg() >= nrds[h].deg() {
                        return Err(Error::internal(
                            "residue isotropy did not shorten the basis vector",
                        ));
                    }
                    vecs[h] = v;
                    continue 'outer;
                }
            }
        }

        // Stage 3: three vectors can never share a parity class, because a
        // diagonal ternary form over F_q is isotropic even when all its
        // binary subforms are not; replace along a ternary isotropy vector.
        for parity in 0..2usize {
            let class: Vec<usize> = (0..vecs.len())
                .filter(|&g| nrds[g].deg() % 2 == parity)
                .collect();
            if class.len() < 3 {
                continue;
            }
            let leads: Vec<u64> = class[..3].iter().map(|&g| nrds[g].leading_coeff()).collect();
            let iso = ternary_isotropy(&leads, q).ok_or_else(|| {
                Error::internal("ternary residue form claimed anisotropic over a finite field")
            })?;
            let support: Vec<(usize, u64)> = class[..3]
                .iter()
                .zip(iso)
                .filter(|(_, c)| *c != 0)
                .map(|(&g, c)| (g, c))
                .collect();
            let top = support
                .iter()
                .map(|&(g, _)| nrds[g].deg())
                .max()
                .expect("isotropy has support");
            let heavy = support
                .iter()
                .rev()
                .find(|&&(g, _)| nrds[g].deg() == top)
                .expect("maximal member exists")
                .0;
            let mut v = vecs[heavy].algebra().zero();
            for &(g, c) in &support {
                let factor = Poly::monomial(q, c, (top - nrds[g].deg()) / 2);
                v = v.add(&vecs[g].scale(&factor, &Poly::one(q))?);
            }
            if v.is_zero() || v.nrd_numerator().deg() >= top {
                return Err(Error::internal(
                    "ternary isotropy did not shorten the basis vector",
                ));
            }
            vecs[heavy] = v;
            continue 'outer;
        }

        // Converged: re-derive and verify the certificate.
        for i in 0..vecs.len() {
            for j in (i + 1)..vecs.len() {
                let b = vecs[i].pair(&vecs[j]);
                let bound = nrds[i].deg().min(nrds[j].deg());
                if !b.is_zero() && b.deg() >= bound {
                    return Err(Error::internal("reduced basis failed the pairing bound"));
                }
            }
        }
        return Ok(ReducedBasis { vecs, nrds });
    }
}

fn coord_key(v: &Quat) -> Vec<u64> {
    let mut key = Vec::new();
    for n in v.nums() {
        key.push(n.coeffs().len() as u64);
        key.extend_from_slice(n.coeffs());
    }
    key
}

fn ternary_isotropy(leads: &[u64], q: u64) -> Option<[u64; 3]> {
    for c0 in 0..q {
        for c1 in 0..q {
            for c2 in 0..q {
                if c0 == 0 && c1 == 0 && c2 == 0 {
                    continue;
                }
                let mut s = 0;
                for (c, l) in [c0, c1, c2].iter().zip(leads) {
                    s = modq::add(s, modq::mul(modq::mul(*c, *c, q), *l, q), q);
                }
                if s == 0 {
                    return Some([c0, c1, c2]);
                }
            }
        }
    }
    None
}

impl ReducedBasis {
    pub fn rank(&self) -> usize {
        self.vecs.len()
    }

    pub fn vector(&self, g: usize) -> Quat {
        self.vecs[g].clone()
    }

    pub fn norm_degree(&self, g: usize) -> usize {
        self.nrds[g].deg()
    }

    fn box_shape(&self, max_deg: usize) -> Option<Vec<u64>> {
        let q = self.vecs[0].algebra().q();
        let mut shape = Vec::with_capacity(self.vecs.len());
        let mut total: u128 = 1;
        for n in &self.nrds {
            let slots = if n.deg() > max_deg {
                1 // only the zero coefficient
            } else {
                (max_deg - n.deg()) / 2 + 2
            };
            let size = (q as u128).pow(slots as u32 - 1);
            total = total.saturating_mul(size);
            shape.push(size as u64);
        }
        if total > 200_000_000 {
            return None;
        }
        Some(shape)
    }

    /// Walks every element with norm degree at most `max_deg`, including
    /// zero, calling the visitor with the element and its norm. Returning
    /// false stops the walk early.
    fn walk_norm_box(
        &self,
        max_deg: usize,
        visit: &mut dyn FnMut(&[Poly], &Poly) -> bool,
    ) -> Result<()> {
        let q = self.vecs[0].algebra().q();
        let shape = self
            .box_shape(max_deg)
            .ok_or_else(|| Error::domain("norm box too large to enumerate"))?;
        let rank = self.vecs.len();
        let mut pair = vec![vec![Poly::zero(q); rank]; rank];
        for g in 0..rank {
            for h in (g + 1)..rank {
                pair[g][h] = self.vecs[g].pair(&self.vecs[h]);
            }
        }
        let mut codes = vec![0u64; rank];
        let mut coeffs: Vec<Poly> = vec![Poly::zero(q); rank];
        loop {
            let mut nrd = Poly::zero(q);
            for g in 0..rank {
                if coeffs[g].is_zero() {
                    continue;
                }
                let cg = &coeffs[g];
                nrd = nrd.add(&cg.mul(cg).mul(&self.nrds[g]));
                for h in (g + 1)..rank {
                    if coeffs[h].is_zero() || pair[g][h].is_zero() {
                        continue;
                    }
                    nrd = nrd.add(&cg.mul(&coeffs[h]).mul(&pair[g][h]));
                }
            }
            if !visit(&coeffs, &nrd) {
                return Ok(());
            }
            // Odometer step.
            let mut g = 0;
            loop {
                if g == rank {
                    return Ok(());
                }
                codes[g] += 1;
                if codes[g] < shape[g] {
                    coeffs[g] = crate::irred::poly_from_code(q, codes[g]);
                    break;
                }
                codes[g] = 0;
                coeffs[g] = Poly::zero(q);
                g += 1;
            }
        }
    }

    /// Counts elements by exact norm value, over all norm degrees up to
    /// `max_deg`. Keys are polynomial codes; zero is skipped.
    pub fn norm_counts(&self, max_deg: usize) -> Result<HashMap<u64, u64>> {
        let mut counts = HashMap::new();
        self.walk_norm_box(max_deg, &mut |coeffs, nrd| {
            if coeffs.iter().any(|c| !c.is_zero()) {
                *counts.entry(poly_code(nrd)).or_insert(0) += 1;
            }
            true
        })?;
        Ok(counts)
    }

    /// All elements whose norm equals `target` exactly.
    pub fn elements_with_norm(&self, target: &Poly) -> Result<Vec<Quat>> {
        let mut out = Vec::new();
        if target.is_zero() {
            return Ok(out);
        }
        self.walk_norm_box(target.deg(), &mut |coeffs, nrd| {
            if nrd == target && coeffs.iter().any(|c| !c.is_zero()) {
                out.push(self.combine(coeffs));
            }
            true
        })?;
        Ok(out)
    }

    /// First element (in odometer order) whose norm equals `target` and
    /// which the filter accepts. Stops the walk as soon as one is found.
    pub fn search_norm(
        &self,
        target: &Poly,
        accept: &mut dyn FnMut(&Quat) -> bool,
    ) -> Result<Option<Quat>> {
        let mut found = None;
        if target.is_zero() {
            return Ok(found);
        }
        self.walk_norm_box(target.deg(), &mut |coeffs, nrd| {
            if nrd == target && coeffs.iter().any(|c| !c.is_zero()) {
                let candidate = self.combine(coeffs);
                if accept(&candidate) {
                    found = Some(candidate);
                    return false;
                }
            }
            true
        })?;
        Ok(found)
    }

    /// First element (in odometer order) whose norm equals `target`.
    pub fn first_element_with_norm(&self, target: &Poly) -> Result<Option<Quat>> {
        let mut found = None;
        if target.is_zero() {
            return Ok(found);
        }
        self.walk_norm_box(target.deg(), &mut |coeffs, nrd| {
            if nrd == target && coeffs.iter().any(|c| !c.is_zero()) {
                found = Some(self.combine(coeffs));
                return false;
            }
            true
        })?;
        Ok(found)
    }

    fn combine(&self, coeffs: &[Poly]) -> Quat {
        let q = self.vecs[0].algebra().q();
        let mut acc = self.vecs[0].algebra().zero();
        for (c, v) in coeffs.iter().zip(&self.vecs) {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&v.scale(c, &Poly::one(q)).expect("unit denominator"));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn algebra() -> Arc<QuatAlgebra> {
        QuatAlgebra::new(3, parse_poly("t^3 - t - 1", 3).unwrap()).unwrap()
    }

    #[test]
    fn standard_order_shape() {
        let alg = algebra();
        let r = QLattice::standard_order(&alg);
        assert!(r.is_integral());
        assert_eq!(r.nrd(), (Poly::one(3), Poly::one(3)));
        assert!(r.contains(&alg.one()));
        assert!(r.contains(&alg.gen_k()));
        let half_i = alg
            .quat(
                [
                    Poly::zero(3),
                    Poly::one(3),
                    Poly::zero(3),
                    Poly::zero(3),
                ],
                parse_poly("t", 3).unwrap(),
            )
            .unwrap();
        assert!(!r.contains(&half_i));
        assert_eq!(r.right_order().unwrap(), r);
        assert_eq!(r.left_order().unwrap(), r);
    }

    #[test]
    fn hnf_is_canonical_under_generator_changes() {
        let alg = algebra();
        let r = QLattice::standard_order(&alg);
        let b = r.basis();
        // Mangle the generating set: sums, scalar multiples, redundancy.
        let gens = vec![
            b[0].add(&b[1]),
            b[1].clone(),
            b[2].scale(&parse_poly("t^2+1", 3).unwrap(), &Poly::one(3)).unwrap(),
            b[2].clone(),
            b[3].add(&b[0]),
            b[3].clone(),
        ];
        let same = QLattice::from_generators(&alg, &gens).unwrap();
        assert_eq!(same, r);
    }

    #[test]
    fn unit_group_of_standard_order() {
        let alg = algebra();
        let r = QLattice::standard_order(&alg);
        let units = r.units().unwrap();
        // Norm form a^2 - delta b^2 on the constant block is anisotropic, so
        // all 8 nonzero constant pairs (a, b) are units.
        assert_eq!(units.len(), 8);
        assert_eq!(r.unit_weight().unwrap(), 4);
        for u in &units {
            let (n, d) = u.nrd();
            assert!(d.is_one() && n.is_constant() && !n.is_zero());
        }
    }

    #[test]
    fn two_sided_ideal_squares_to_the_ramified_place() {
        let alg = algebra();
        let r = QLattice::standard_order(&alg);
        let j = alg.gen_j();
        let gens: Vec<Quat> = r.basis().iter().map(|b| b.mul(&j)).collect();
        let rj = QLattice::from_generators(&alg, &gens).unwrap();
        assert_eq!(rj.nrd(), (alg.p0().clone(), Poly::one(3)));
        let square = rj.mul(&rj).unwrap();
        assert_eq!(square, r.scale(alg.p0(), &Poly::one(3)).unwrap());
        assert_eq!(rj.left_order().unwrap(), r);
        assert_eq!(rj.right_order().unwrap(), r);
    }

    #[test]
    fn coords_roundtrip() {
        let alg = algebra();
        let r = QLattice::standard_order(&alg);
        let x = alg.integral([
            parse_poly("t^2", 3).unwrap(),
            parse_poly("2*t", 3).unwrap(),
            Poly::one(3),
            parse_poly("t+2", 3).unwrap(),
        ]);
        let coords = r.coords_of(&x).unwrap();
        assert_eq!(coords[0], parse_poly("t^2", 3).unwrap());
        assert_eq!(coords[3], parse_poly("t+2", 3).unwrap());
    }

    #[test]
    fn reduced_basis_degree_identity_on_a_box() {
        let alg = algebra();
        let r = QLattice::standard_order(&alg);
        let reduced = r.reduced_basis().unwrap();
        // Brute-force count of elements with each norm degree versus the
        // box walk, over a small degree window.
        let counts = reduced.norm_counts(4).unwrap();
        let mut direct: HashMap<u64, u64> = HashMap::new();
        let b = r.basis();
        for code0 in 0..27u64 {
            for code1 in 0..27u64 {
                for code2 in 0..3u64 {
                    for code3 in 0..3u64 {
                        let coeffs = [
                            crate::irred::poly_from_code(3, code0),
                            crate::irred::poly_from_code(3, code1),
                            crate::irred::poly_from_code(3, code2),
                            crate::irred::poly_from_code(3, code3),
                        ];
                        if coeffs.iter().all(|c| c.is_zero()) {
                            continue;
                        }
                        let mut x = alg.zero();
                        for (c, v) in coeffs.iter().zip(&b) {
                            x = x.add(&v.scale(c, &Poly::one(3)).unwrap());
                        }
                        let (n, d) = x.nrd();
                        assert!(d.is_one());
                        if n.deg() <= 4 {
                            *direct.entry(poly_code(&n)).or_insert(0) += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(counts, direct);
    }

    #[test]
    fn principal_module_is_detected_with_witness() {
        let alg = algebra();
        let r = QLattice::standard_order(&alg);
        let x = alg.integral([
            Poly::one(3),
            Poly::one(3),
            parse_poly("t", 3).unwrap(),
            Poly::zero(3),
        ]);
        let gens: Vec<Quat> = r.basis().iter().map(|b| b.mul(&x)).collect();
        let ideal = QLattice::from_generators(&alg, &gens).unwrap();
        let gen = ideal.principal_generator().unwrap().expect("principal");
        // The generator must regenerate the ideal.
        let regen: Vec<Quat> = r.basis().iter().map(|b| b.mul(&gen)).collect();
        assert_eq!(QLattice::from_generators(&alg, &regen).unwrap(), ideal);
        let witness = left_class_witness(&ideal, &r).unwrap().expect("equivalent");
        let transported: Vec<Quat> = r.basis().iter().map(|b| b.mul(&witness)).collect();
        assert_eq!(QLattice::from_generators(&alg, &transported).unwrap(), ideal);
    }

    #[test]
    fn trace_zero_embedding_witness() {
        let alg = algebra();
        let r = QLattice::standard_order(&alg);
        let (vecs, den) = r.trace_zero_basis();
        assert!(den.is_one());
        assert_eq!(vecs.len(), 3);
        let reduced = reduce_quats(vecs).unwrap();
        // y = t*i + k squares to D = t^3 + 2t^2 + 2t + 2 (norm -D).
        let d = parse_poly("t^3 + 2*t^2 + 2*t + 2", 3).unwrap();
        assert!(crate::irred::is_irreducible(&d));
        let y = reduced.first_element_with_norm(&d.neg()).unwrap().unwrap();
        let (tn, _) = y.trd();
        assert!(tn.is_zero());
        assert_eq!(y.mul(&y), alg.scalar(d));
    }

    #[test]
    fn kernel_of_linear_form_is_canonical() {
        let coeffs = vec![
            parse_poly("2", 3).unwrap(),
            parse_poly("t", 3).unwrap(),
            parse_poly("t^2+1", 3).unwrap(),
        ];
        let kernel = linear_form_kernel(3, &coeffs);
        assert_eq!(kernel.len(), 2);
        for row in &kernel {
            let mut s = Poly::zero(3);
            for (r, c) in row.iter().zip(&coeffs) {
                s = s.add(&r.mul(c));
            }
            assert!(s.is_zero());
        }
    }
}
