//! Gross points for a ramified quaternion order: embeddings of imaginary
//! quadratic rings into the right orders of the ideal classes, the class
//! group action on those embeddings, and the distribution statistics the
//! action produces.
//!
//! A point is a pair (class index, y) where y is a trace-zero element of the
//! class's right order squaring to the quadratic discriminant; points are
//! considered up to conjugation by units of that order. The class group of
//! the quadratic ring acts through left ideals J = O a + O (b + y), and every
//! orbit statistic below is an exact finite computation, with floating point
//! entering only in the final spectral summaries.

use std::collections::HashSet;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::brandt::EigenForm;
use crate::classes::ClassSet;
use crate::error::{Error, Result};
use crate::irred::monic_irreducibles;
use crate::lattice::{reduce_quats, QLattice};
use crate::lseries::QuadExt;
use crate::pic::{Character, Divisor, PicBasis, PicGroup};
use crate::poly::Poly;
use crate::quat::Quat;

/// One Gross point: an ideal class index together with a trace-zero element
/// of that class's right order squaring to the quadratic discriminant.
#[derive(Clone, Debug)]
pub struct GrossPoint {
    pub class_index: usize,
    pub witness: Quat,
}

impl GrossPoint {
    /// The point with the opposite square root (the other embedding of the
    /// same quadratic ring through -y).
    pub fn flipped(&self) -> GrossPoint {
        GrossPoint {
            class_index: self.class_index,
            witness: self.witness.neg(),
        }
    }
}

fn push_poly_digits(p: &Poly, out: &mut Vec<u64>) {
    let coeffs = p.coeffs();
    out.push(coeffs.len() as u64);
    out.extend_from_slice(coeffs);
}

fn serialize_conjugate(class_index: usize, y: &Quat) -> Vec<u64> {
    let mut out = Vec::with_capacity(24);
    out.push(class_index as u64);
    push_poly_digits(y.den(), &mut out);
    for num in y.nums() {
        push_poly_digits(num, &mut out);
    }
    out
}

/// Canonical key of a point modulo unit conjugacy: the least serialization
/// of u y u^-1 over the units u of the class's right order.
pub fn point_key(set: &ClassSet, point: &GrossPoint) -> Vec<u64> {
    let units = &set.classes[point.class_index].units;
    let mut best: Option<Vec<u64>> = None;
    for u in units {
        let conj = u
            .mul(&point.witness)
            .mul(&u.inverse().expect("units are invertible"));
        let key = serialize_conjugate(point.class_index, &conj);
        match &best {
            Some(b) if *b <= key => {}
            _ => best = Some(key),
        }
    }
    best.expect("orders have at least the scalar units")
}

/// All embeddings of the quadratic ring with discriminant `d` into the
/// class's right order, one representative per unit-conjugacy orbit.
pub fn embeddings_in_class(
    set: &ClassSet,
    class_index: usize,
    d: &Poly,
) -> Result<Vec<GrossPoint>> {
    let q = set.algebra().q();
    let class = &set.classes[class_index];
    let (vecs, den) = class.right_order.trace_zero_basis();
    let reduced = reduce_quats(vecs)?;
    // y has trace zero, so y^2 = d exactly when nrd(y) = -d; on the scaled
    // lattice the target becomes -d den^2.
    let target = d.mul(&den.mul(&den)).neg();
    let raw = reduced.elements_with_norm(&target)?;
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut reps = Vec::new();
    for scaled in &raw {
        let y = scaled.scale(&Poly::one(q), &den)?;
        let point = GrossPoint {
            class_index,
            witness: y,
        };
        if seen.insert(point_key(set, &point)) {
            reps.push(point);
        }
    }
    // Units act on embeddings with scalar stabilizer, so every conjugacy
    // orbit has exactly weight-many elements.
    if raw.len() as u64 != reps.len() as u64 * class.weight {
        return Err(Error::internal(format!(
            "embedding orbit sizes are off: {} raw, {} orbits, weight {}",
            raw.len(),
            reps.len(),
            class.weight
        )));
    }
    Ok(reps)
}

/// Embedding multiplicities per ideal class, by direct enumeration.
pub fn embedding_counts(set: &ClassSet, d: &Poly) -> Result<Vec<u64>> {
    (0..set.len())
        .map(|i| Ok(embeddings_in_class(set, i, d)?.len() as u64))
        .collect()
}

/// Transport a point by an ideal class of its quadratic ring, given in
/// Mumford form (a, b). The landing ideal class and the conjugated witness
/// are exact; the square and the membership of the result are verified.
pub fn pic_action(set: &ClassSet, point: &GrossPoint, by: &Divisor) -> Result<GrossPoint> {
    let alg = set.algebra();
    let q = alg.q();
    let class = &set.classes[point.class_index];
    let order = &class.right_order;
    let y = &point.witness;

    let square = y.mul(y);
    if !square.den().is_one() || square.nums()[1..].iter().any(|c| !c.is_zero()) {
        return Err(Error::domain(
            "point witness does not square to an integral scalar",
        ));
    }
    let disc = square.nums()[0].clone();
    let rem = by.b().mul(by.b()).sub(&disc).rem(by.a())?;
    if !rem.is_zero() {
        return Err(Error::domain(
            "divisor is incompatible with the point discriminant",
        ));
    }

    // J = O a + O (b + y) is a left O-ideal of norm (a) stable under right
    // multiplication by y.
    let shift = alg.scalar(by.b().clone()).add(y);
    let mut gens = Vec::with_capacity(8);
    for e in order.basis() {
        gens.push(e.scale(by.a(), &Poly::one(q))?);
        gens.push(e.mul(&shift));
    }
    let module = QLattice::from_generators(alg, &gens)?;
    debug_assert_eq!(module.nrd(), (by.a().clone(), Poly::one(q)));

    let candidate = class.ideal.mul(&module)?;
    let (landing, beta) = set
        .class_of(&candidate)?
        .ok_or_else(|| Error::internal("transported ideal matches no class"))?;
    let transported = beta.mul(y).mul(&beta.inverse()?);

    let back = transported.mul(&transported);
    if back.sub(&square) != alg.zero() {
        return Err(Error::internal(
            "transported witness does not square to the discriminant",
        ));
    }
    if !set.classes[landing].right_order.contains(&transported) {
        return Err(Error::internal(
            "transported witness escapes the landing order",
        ));
    }
    Ok(GrossPoint {
        class_index: landing,
        witness: transported,
    })
}

/// Mixed-radix rank of a coordinate vector, last coordinate fastest.
pub fn flat_index(divisors: &[u64], coords: &[u64]) -> usize {
    assert_eq!(divisors.len(), coords.len(), "coordinate arity");
    let mut flat = 0usize;
    for (&d, &c) in divisors.iter().zip(coords) {
        flat = flat * d as usize + c as usize;
    }
    flat
}

/// Inverse of `flat_index`.
pub fn coords_from_flat(divisors: &[u64], mut flat: usize) -> Vec<u64> {
    let mut coords = vec![0u64; divisors.len()];
    for (j, &d) in divisors.iter().enumerate().rev() {
        coords[j] = (flat % d as usize) as u64;
        flat /= d as usize;
    }
    coords
}

/// One orbit of the class group on Gross points: landing classes in odometer
/// order over the group coordinates, per-class counts, and the points
/// themselves. Distinctness of all points certifies the action is free.
pub struct Orbit {
    landing: Vec<usize>,
    counts: Vec<u64>,
    points: Vec<GrossPoint>,
    keys: HashSet<Vec<u64>>,
}

impl Orbit {
    pub fn size(&self) -> u64 {
        self.landing.len() as u64
    }

    /// Landing class per group element, aligned with `flat_index` over the
    /// elementary divisors.
    pub fn landing(&self) -> &[usize] {
        &self.landing
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn points(&self) -> &[GrossPoint] {
        &self.points
    }

    pub fn contains(&self, set: &ClassSet, point: &GrossPoint) -> bool {
        self.keys.contains(&point_key(set, point))
    }
}

/// Fixed data for one discriminant: the class set together with the
/// quadratic class group structure.
pub struct GrossScene<'a> {
    set: &'a ClassSet,
    pic: PicGroup,
    basis: PicBasis,
}

impl<'a> GrossScene<'a> {
    /// Validates the discriminant (monic irreducible of odd degree, with the
    /// quaternion ramified prime staying inert in the quadratic extension)
    /// and computes the class group structure.
    pub fn new(set: &'a ClassSet, d: &Poly) -> Result<GrossScene<'a>> {
        let alg = set.algebra();
        if d.q() != alg.q() {
            return Err(Error::FieldMismatch {
                expected: alg.q(),
                got: d.q(),
            });
        }
        let ext = QuadExt::new(d.clone())?;
        if ext.chi_at_prime(alg.p0()) != -1 {
            return Err(Error::domain(format!(
                "the ramified prime {} is not inert in the quadratic extension by {}",
                alg.p0(),
                d
            )));
        }
        let pic = PicGroup::new(ext);
        let basis = PicBasis::new(&pic, 1_000_000)?;
        Ok(GrossScene { set, pic, basis })
    }

    pub fn set(&self) -> &ClassSet {
        self.set
    }

    pub fn pic(&self) -> &PicGroup {
        &self.pic
    }

    pub fn basis(&self) -> &PicBasis {
        &self.basis
    }

    pub fn discriminant(&self) -> &Poly {
        self.pic.ext().discriminant()
    }

    pub fn class_number(&self) -> u64 {
        self.basis.class_number()
    }

    /// First point in class-index order, found by an early-exit norm search
    /// on each trace-zero lattice.
    pub fn base_point(&self) -> Result<GrossPoint> {
        let q = self.set.algebra().q();
        let d = self.discriminant().clone();
        for class_index in 0..self.set.len() {
            let class = &self.set.classes[class_index];
            let (vecs, den) = class.right_order.trace_zero_basis();
            let reduced = reduce_quats(vecs)?;
            let target = d.mul(&den.mul(&den)).neg();
            if let Some(scaled) = reduced.first_element_with_norm(&target)? {
                return Ok(GrossPoint {
                    class_index,
                    witness: scaled.scale(&Poly::one(q), &den)?,
                });
            }
        }
        Err(Error::internal(
            "no embedding found in any class, against the mass count",
        ))
    }

    /// Walk the full class group orbit of a starting point. Generators are
    /// applied once per odometer step, so the walk costs at most twice the
    /// class number in transports.
    pub fn orbit(&self, start: &GrossPoint) -> Result<Orbit> {
        let divisors = self.basis.elementary_divisors();
        let generators = self.basis.generators();
        let rank = divisors.len();
        let h = self.class_number() as usize;

        let mut chain: Vec<GrossPoint> = vec![start.clone(); rank + 1];
        let mut coords = vec![0u64; rank];
        let mut landing = Vec::with_capacity(h);
        let mut points = Vec::with_capacity(h);
        let mut keys: HashSet<Vec<u64>> = HashSet::with_capacity(h);
        let mut counts = vec![0u64; self.set.len()];

        loop {
            let current = chain[rank].clone();
            if !keys.insert(point_key(self.set, &current)) {
                return Err(Error::internal(
                    "class group action revisited a point mid-orbit",
                ));
            }
            counts[current.class_index] += 1;
            landing.push(current.class_index);
            points.push(current);

            // Odometer step, last coordinate fastest; chain[j + 1] always
            // holds the first j + 1 generator powers applied to the start.
            let mut j = rank;
            loop {
                if j == 0 {
                    debug_assert_eq!(landing.len(), h);
                    return Ok(Orbit {
                        landing,
                        counts,
                        points,
                        keys,
                    });
                }
                j -= 1;
                coords[j] += 1;
                if coords[j] < divisors[j] {
                    chain[j + 1] = pic_action(self.set, &chain[j + 1], &generators[j])?;
                    for l in (j + 2)..=rank {
                        chain[l] = chain[l - 1].clone();
                    }
                    break;
                }
                coords[j] = 0;
            }
        }
    }

    /// A point outside the given orbit: the flipped start when that already
    /// lies outside, otherwise the first embedding in class-index order
    /// whose conjugacy key is new.
    pub fn opposite_seed(&self, taken: &Orbit) -> Result<GrossPoint> {
        let start = &taken.points()[0];
        let flipped = start.flipped();
        if !taken.contains(self.set, &flipped) {
            return Ok(flipped);
        }
        let q = self.set.algebra().q();
        let d = self.discriminant().clone();
        for class_index in 0..self.set.len() {
            let class = &self.set.classes[class_index];
            let (vecs, den) = class.right_order.trace_zero_basis();
            let reduced = reduce_quats(vecs)?;
            let target = d.mul(&den.mul(&den)).neg();
            let hit = reduced.search_norm(&target, &mut |scaled| {
                let y = scaled
                    .scale(&Poly::one(q), &den)
                    .expect("unit denominator");
                let point = GrossPoint {
                    class_index,
                    witness: y,
                };
                !taken.contains(self.set, &point)
            })?;
            if let Some(scaled) = hit {
                return Ok(GrossPoint {
                    class_index,
                    witness: scaled.scale(&Poly::one(q), &den)?,
                });
            }
        }
        Err(Error::internal(
            "every embedding lies in one orbit, against the mass count",
        ))
    }

    /// Both orbits: the one through the base point, then the one through a
    /// seed outside it. Checks that they are disjoint and exhaust the
    /// expected number of points.
    pub fn tagged_orbits(&self) -> Result<(Orbit, Orbit)> {
        let plus = self.orbit(&self.base_point()?)?;
        let minus = self.orbit(&self.opposite_seed(&plus)?)?;
        if plus.size() != minus.size() {
            return Err(Error::internal("orbit sizes disagree"));
        }
        if plus.keys.intersection(&minus.keys).next().is_some() {
            return Err(Error::internal("orbits are not disjoint"));
        }
        Ok((plus, minus))
    }

    /// One scan row: both orbits, their per-class counts and multiplicities,
    /// and the discrepancy statistics of the base orbit.
    pub fn scan_row(&self) -> Result<ScanRow> {
        let started = Instant::now();
        let (plus, minus) = self.tagged_orbits()?;
        let multiplicities: Vec<u64> = plus
            .counts()
            .iter()
            .zip(minus.counts())
            .map(|(a, b)| a + b)
            .collect();
        let degree = self.discriminant().deg();
        let row = ScanRow {
            discriminant: self.discriminant().clone(),
            degree,
            class_number: self.class_number(),
            counts: plus.counts().to_vec(),
            opposite_counts: minus.counts().to_vec(),
            multiplicities,
            discrepancy: discrepancy(self.set, plus.counts()),
            envelope: equidistribution_envelope(self.set.algebra().q(), degree),
            runtime_ms: started.elapsed().as_millis() as u64,
        };
        Ok(row)
    }
}

/// The stationary measure on classes: mu_i proportional to 1/w_i.
pub fn class_measure(set: &ClassSet) -> Vec<f64> {
    let mass = set.mass.to_f64();
    set.classes
        .iter()
        .map(|c| 1.0 / (c.weight as f64 * mass))
        .collect()
}

/// Maximum deviation of normalized landing counts from the stationary
/// measure.
pub fn discrepancy(set: &ClassSet, counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let measure = class_measure(set);
    counts
        .iter()
        .zip(&measure)
        .map(|(&n, &mu)| (n as f64 / total as f64 - mu).abs())
        .fold(0.0, f64::max)
}

/// The decay envelope q^(5/4) ||D||^(-1/4) against which discrepancies are
/// scored.
pub fn equidistribution_envelope(q: u64, degree: usize) -> f64 {
    (q as f64).powf(1.25 - degree as f64 / 4.0)
}

/// Weyl sum of an eigenform along an orbit, twisted by a class group
/// character.
pub fn weyl_sum(form: &EigenForm, orbit: &Orbit, basis: &PicBasis, chi: &Character) -> Complex64 {
    let divisors = basis.elementary_divisors();
    let mut acc = Complex64::new(0.0, 0.0);
    for (flat, &class) in orbit.landing().iter().enumerate() {
        let coords = coords_from_flat(divisors, flat);
        acc += chi.value(&coords) * form.coords[class];
    }
    acc
}

/// Residual of the exact spectral reconstruction of subgroup landing counts:
/// counting points of the orbit that land in a class while ranging over a
/// subgroup equals the subgroup-trivial character average of eigenform Weyl
/// sums. The subgroup is given by the coordinate vectors of its elements.
pub fn spectral_residual(
    set: &ClassSet,
    forms: &[EigenForm],
    orbit: &Orbit,
    basis: &PicBasis,
    subgroup: &[Vec<u64>],
) -> f64 {
    let divisors = basis.elementary_divisors();
    let h = basis.class_number() as f64;
    let mut direct = vec![0u64; set.len()];
    for coords in subgroup {
        direct[orbit.landing()[flat_index(divisors, coords)]] += 1;
    }

    let gens: Vec<&[u64]> = subgroup.iter().map(Vec::as_slice).collect();
    let chars: Vec<Character> = Character::all(basis)
        .into_iter()
        .filter(|chi| chi.is_trivial_on(&gens))
        .collect();
    let scale = subgroup.len() as f64 / h;

    let mut residual = 0.0f64;
    let mut spectral = vec![Complex64::new(0.0, 0.0); set.len()];
    for chi in &chars {
        for form in forms {
            let w = weyl_sum(form, orbit, basis, chi);
            for (i, acc) in spectral.iter_mut().enumerate() {
                *acc += w * form.coords[i];
            }
        }
    }
    for (i, acc) in spectral.iter().enumerate() {
        let predicted = scale * acc.re;
        residual = residual.max((direct[i] as f64 - predicted).abs());
        residual = residual.max((scale * acc.im).abs());
    }
    residual
}

/// Residual of the Bessel identity: for each class indicator, the squared
/// eigenform coefficients sum to the class weight.
pub fn bessel_residual(set: &ClassSet, forms: &[EigenForm]) -> f64 {
    let mut worst = 0.0f64;
    for (i, class) in set.classes.iter().enumerate() {
        let w = class.weight as f64;
        let total: f64 = forms.iter().map(|f| w * f.coords[i] * f.coords[i]).sum();
        worst = worst.max((total - w).abs());
    }
    worst
}

/// Relative residual of Parseval over the character group: the squared Weyl
/// sums of a form against all characters average to the squared form values
/// along the orbit.
pub fn weyl_parseval_residual(form: &EigenForm, orbit: &Orbit, basis: &PicBasis) -> f64 {
    let h = basis.class_number() as f64;
    let lhs: f64 = Character::all(basis)
        .iter()
        .map(|chi| weyl_sum(form, orbit, basis, chi).norm_sqr())
        .sum();
    let rhs: f64 = h * orbit
        .landing()
        .iter()
        .map(|&c| form.coords[c] * form.coords[c])
        .sum::<f64>();
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}

/// One row of the equidistribution scan.
pub struct ScanRow {
    pub discriminant: Poly,
    pub degree: usize,
    pub class_number: u64,
    pub counts: Vec<u64>,
    pub opposite_counts: Vec<u64>,
    pub multiplicities: Vec<u64>,
    pub discrepancy: f64,
    pub envelope: f64,
    pub runtime_ms: u64,
}

/// Monic irreducibles of the given degree in which the quaternion ramified
/// prime stays inert, in code order.
pub fn inert_discriminants(set: &ClassSet, degree: usize) -> Result<Vec<Poly>> {
    let alg = set.algebra();
    let mut out = Vec::new();
    for d in monic_irreducibles(alg.q(), degree) {
        let ext = QuadExt::new(d.clone())?;
        if ext.chi_at_prime(alg.p0()) == -1 {
            out.push(d);
        }
    }
    Ok(out)
}

/// Orbit scan over every inert discriminant of the given odd degrees, rows
/// ordered by degree and then by code.
pub fn equidist_scan(set: &ClassSet, degrees: &[usize]) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::new();
    for &degree in degrees {
        if degree % 2 == 0 {
            return Err(Error::domain(
                "imaginary discriminants have odd degree",
            ));
        }
        let discs = inert_discriminants(set, degree)?;
        let batch: Result<Vec<ScanRow>> = discs
            .par_iter()
            .map(|d| GrossScene::new(set, d)?.scan_row())
            .collect();
        rows.extend(batch?);
    }
    Ok(rows)
}

/// Least-squares slope of y against x. None with fewer than two distinct
/// abscissas.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Log-log slope of the per-degree average discrepancy against the norm of
/// the discriminant.
pub fn equidist_slope(q: u64, rows: &[ScanRow]) -> Option<f64> {
    let mut degrees: Vec<usize> = rows.iter().map(|r| r.degree).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let points: Vec<(f64, f64)> = degrees
        .iter()
        .map(|&deg| {
            let of_degree: Vec<&ScanRow> = rows.iter().filter(|r| r.degree == deg).collect();
            let avg = of_degree.iter().map(|r| r.discrepancy).sum::<f64>()
                / of_degree.len() as f64;
            (
                deg as f64 * (q as f64).ln(),
                avg.max(1e-300).ln(),
            )
        })
        .collect();
    least_squares_slope(&points)
}

/// Support summary for one scanned degree: how many inert discriminants
/// exist, how many have points in every class, and which classes are missed
/// by all of them.
pub struct DegreeSupport {
    pub degree: usize,
    pub inert: usize,
    pub full: usize,
    pub missing_everywhere: Vec<usize>,
}

/// Result of the minimal-degree full-support search.
pub struct SurjectivityReport {
    pub minimal_degree: Option<usize>,
    pub witness: Option<Poly>,
    pub degrees: Vec<DegreeSupport>,
}

/// Scan odd degrees in order for the first discriminant whose points cover
/// every ideal class, stopping after the first degree that contains one.
pub fn surjectivity_scan(set: &ClassSet, max_degree: usize) -> Result<SurjectivityReport> {
    let mut report = SurjectivityReport {
        minimal_degree: None,
        witness: None,
        degrees: Vec::new(),
    };
    let mut degree = 1usize;
    while degree <= max_degree {
        let discs = inert_discriminants(set, degree)?;
        let mut full = 0usize;
        let mut hit_somewhere = vec![false; set.len()];
        for d in &discs {
            let scene = GrossScene::new(set, d)?;
            let (plus, minus) = scene.tagged_orbits()?;
            let mut covered = true;
            for i in 0..set.len() {
                if plus.counts()[i] + minus.counts()[i] > 0 {
                    hit_somewhere[i] = true;
                } else {
                    covered = false;
                }
            }
            if covered {
                full += 1;
                if report.witness.is_none() {
                    report.minimal_degree = Some(degree);
                    report.witness = Some(d.clone());
                }
            }
        }
        let missing_everywhere: Vec<usize> = (0..set.len())
            .filter(|&i| !hit_somewhere[i])
            .collect();
        report.degrees.push(DegreeSupport {
            degree,
            inert: discs.len(),
            full,
            missing_everywhere,
        });
        if report.witness.is_some() {
            break;
        }
        degree += 2;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brandt::eigenbasis;
    use crate::parse::parse_poly;
    use crate::quat::QuatAlgebra;

    fn class_set(p0: &str) -> ClassSet {
        let alg = QuatAlgebra::new(3, parse_poly(p0, 3).unwrap()).unwrap();
        ClassSet::enumerate(&alg).unwrap()
    }

    fn first_inert(set: &ClassSet, degree: usize, pred: impl Fn(&QuadExt) -> bool) -> Poly {
        inert_discriminants(set, degree)
            .unwrap()
            .into_iter()
            .find(|d| pred(&QuadExt::new(d.clone()).unwrap()))
            .expect("an inert discriminant with the requested property")
    }

    #[test]
    fn flat_coordinates_roundtrip() {
        let divisors = [6u64, 2, 2];
        for flat in 0..24 {
            let coords = coords_from_flat(&divisors, flat);
            assert_eq!(flat_index(&divisors, &coords), flat);
        }
        assert_eq!(flat_index(&[], &[]), 0);
        assert_eq!(coords_from_flat(&[], 0), Vec::<u64>::new());
    }

    #[test]
    fn direct_embedding_counts_match_twice_the_class_number() {
        let set = class_set("t^3 + 2*t + 1");
        for degree in [1usize, 3] {
            for d in inert_discriminants(&set, degree).unwrap() {
                let h = QuadExt::new(d.clone()).unwrap().class_number();
                let m = embedding_counts(&set, &d).unwrap();
                assert_eq!(m.iter().sum::<u64>(), 2 * h, "discriminant {d}");

                let scene = GrossScene::new(&set, &d).unwrap();
                let (plus, minus) = scene.tagged_orbits().unwrap();
                assert_eq!(plus.size(), h);
                assert_eq!(minus.size(), h);
                let from_orbits: Vec<u64> = plus
                    .counts()
                    .iter()
                    .zip(minus.counts())
                    .map(|(a, b)| a + b)
                    .collect();
                assert_eq!(from_orbits, m, "discriminant {d}");
            }
        }
    }

    #[test]
    fn class_group_action_composes() {
        let set = class_set("t^3 - t - 1");
        let d = first_inert(&set, 3, |ext| ext.class_number() > 1);
        let scene = GrossScene::new(&set, &d).unwrap();
        let start = scene.base_point().unwrap();
        let start_key = point_key(&set, &start);

        let identity = scene.pic().identity();
        let fixed = pic_action(&set, &start, &identity).unwrap();
        assert_eq!(point_key(&set, &fixed), start_key);

        let gen = scene.basis().generators()[0].clone();
        let forward = pic_action(&set, &start, &gen).unwrap();
        let back = pic_action(&set, &forward, &scene.pic().neg(&gen)).unwrap();
        assert_eq!(point_key(&set, &back), start_key);

        let twice = pic_action(&set, &forward, &gen).unwrap();
        let squared = scene.pic().compose(&gen, &gen);
        let direct = pic_action(&set, &start, &squared).unwrap();
        assert_eq!(point_key(&set, &twice), point_key(&set, &direct));
    }

    #[test]
    fn spectral_identity_bessel_and_parseval() {
        let set = class_set("t^3 - t - 1");
        let forms = eigenbasis(&set).unwrap();
        assert!(bessel_residual(&set, &forms) < 1e-8);

        let d = first_inert(&set, 3, |ext| ext.class_number() > 1);
        let scene = GrossScene::new(&set, &d).unwrap();
        let (plus, minus) = scene.tagged_orbits().unwrap();

        let full: Vec<Vec<u64>> = scene
            .basis()
            .classes()
            .iter()
            .map(|(_, c)| c.to_vec())
            .collect();
        let trivial = vec![vec![0u64; scene.basis().elementary_divisors().len()]];

        for orbit in [&plus, &minus] {
            for subgroup in [&full, &trivial] {
                let residual =
                    spectral_residual(&set, &forms, orbit, scene.basis(), subgroup);
                assert!(residual < 1e-8, "residual {residual}");
            }
            for form in &forms {
                let parseval = weyl_parseval_residual(form, orbit, scene.basis());
                assert!(parseval < 1e-9, "parseval residual {parseval}");
            }
        }
    }

    #[test]
    fn scan_rows_are_consistent() {
        let set = class_set("t^3 - t - 1");
        let rows = equidist_scan(&set, &[3, 5]).unwrap();
        assert!(!rows.is_empty());
        let mut last = (0usize, None::<Poly>);
        for row in &rows {
            assert_eq!(row.counts.iter().sum::<u64>(), row.class_number);
            assert_eq!(row.opposite_counts.iter().sum::<u64>(), row.class_number);
            let m: Vec<u64> = row
                .counts
                .iter()
                .zip(&row.opposite_counts)
                .map(|(a, b)| a + b)
                .collect();
            assert_eq!(m, row.multiplicities);
            let expected = equidistribution_envelope(3, row.degree);
            assert!((row.envelope - expected).abs() < 1e-15);
            assert!(row.degree >= last.0);
            last = (row.degree, Some(row.discriminant.clone()));
        }
        assert!(equidist_slope(3, &rows).is_some());
    }

    #[test]
    fn surjectivity_scan_finds_a_witness() {
        let set = class_set("t^3 + 2*t + 1");
        let report = surjectivity_scan(&set, 7).unwrap();
        let degree = report.minimal_degree.expect("a full-support degree");
        let witness = report.witness.expect("a witness discriminant");
        assert_eq!(witness.deg(), degree);

        let scene = GrossScene::new(&set, &witness).unwrap();
        let (plus, minus) = scene.tagged_orbits().unwrap();
        for i in 0..set.len() {
            assert!(plus.counts()[i] + minus.counts()[i] > 0);
        }
        let final_row = report.degrees.last().unwrap();
        assert_eq!(final_row.degree, degree);
        assert!(final_row.full >= 1);
        assert!(final_row.missing_everywhere.is_empty());
        for row in &report.degrees {
            assert!(row.full <= row.inert);
        }
    }
}
