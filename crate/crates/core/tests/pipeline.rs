//! End-to-end flows through the public interface: each test composes several
//! modules the way a downstream caller would, with no access to crate
//! internals. The heavy sweeps live in the command-line verification suite;
//! these pin the cross-module contracts on small fixed scenarios.

use ffquat::brandt::{brandt_matrix, eigenbasis, HeckeLadder};
use ffquat::classes::{class_mass, ClassSet};
use ffquat::drinfeld::{cm_carlitz, is_supersingular, reduce_module, supersingular_j_enum};
use ffquat::gross::{bessel_residual, embedding_counts, spectral_residual, GrossScene};
use ffquat::irred::monic_irreducibles;
use ffquat::lseries::QuadExt;
use ffquat::parse::parse_poly;
use ffquat::pic::{Character, PicBasis, PicGroup};
use ffquat::quat::QuatAlgebra;
use ffquat::rankin::{central_bound_check, RankinFamily};
use ffquat::{Error, Poly};

fn fixed(text: &str) -> Poly {
    parse_poly(text, 3).expect("fixture polynomial")
}

fn class_set(p0: &str) -> ClassSet {
    let alg = QuatAlgebra::new(3, fixed(p0)).expect("algebra");
    ClassSet::enumerate(&alg).expect("class enumeration")
}

#[test]
fn quadratic_field_invariants_compose() {
    let ext = QuadExt::new(fixed("t^3+2*t+1")).expect("imaginary quadratic extension");
    assert_eq!(ext.genus(), 1);
    assert_eq!(ext.l_polynomial(), vec![1, 3, 3]);
    assert_eq!(ext.class_number(), 7);

    // The character is completely multiplicative on monic polynomials.
    let a = fixed("t+1");
    let b = fixed("t^2+1");
    let ab = a.mul(&b);
    assert_eq!(
        ext.chi(&ab).unwrap(),
        ext.chi(&a).unwrap() * ext.chi(&b).unwrap()
    );

    // Degree-seven discriminants satisfy the functional equation of their
    // count polynomial: coefficients pair across the middle with a power of q.
    let big = QuadExt::new(fixed("t^7+2*t^2+1")).expect("degree-seven extension");
    let l = big.l_polynomial();
    let g = big.genus();
    assert_eq!(l.len(), 2 * g + 1);
    for d in 0..=g {
        let expected = 3i64.pow((g - d) as u32) * l[d];
        assert_eq!(l[2 * g - d], expected);
    }
    let (low, high) = big.hasse_interval();
    let h = big.class_number() as f64;
    assert!(low <= h && h <= high);
}

#[test]
fn class_enumeration_feeds_hecke_operators() {
    let set = class_set("t^3-t-1");
    assert_eq!(set.len(), 4);
    let mass = class_mass(3, 3);
    let total = set
        .classes
        .iter()
        .map(|c| ffquat::classes::Rational::new(1, c.weight as i128))
        .fold(ffquat::classes::Rational::zero(), |a, b| a.add(b));
    assert_eq!((total.num(), total.den()), (mass.num(), mass.den()));

    // A prime operator away from the ramified prime has constant row sums
    // |T| + 1 and is self-adjoint for the weighted inner product.
    let t = fixed("t");
    let m = brandt_matrix(&set, &t).expect("degree-one operator");
    for row in &m {
        assert_eq!(row.iter().sum::<u64>(), 4);
    }
    for i in 0..4 {
        for j in 0..4 {
            let wi = set.classes[i].weight;
            let wj = set.classes[j].weight;
            assert_eq!(wj * m[i][j], wi * m[j][i]);
        }
    }

    // Operators at distinct primes commute.
    let m2 = brandt_matrix(&set, &fixed("t+1")).expect("second operator");
    let prod = |a: &Vec<Vec<u64>>, b: &Vec<Vec<u64>>| -> Vec<Vec<u64>> {
        (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum())
                    .collect()
            })
            .collect()
    };
    assert_eq!(prod(&m, &m2), prod(&m2, &m));

    // The simultaneous eigenbasis has a single Perron vector, and every
    // cuspidal eigenvalue respects the |a| <= 2 sqrt |T| bound.
    let forms = eigenbasis(&set).expect("eigenbasis");
    assert_eq!(forms.iter().filter(|f| f.eisenstein).count(), 1);
    for form in forms.iter().filter(|f| !f.eisenstein) {
        let mut ladder = HeckeLadder::new(&set, form.anchor()).expect("ladder");
        let a = ladder.eigenvalue(&t, form).expect("eigenvalue");
        assert!(a.abs() <= 2.0 * 3f64.sqrt() + 1e-9);
    }
}

#[test]
fn gross_scene_orbits_match_lattice_counts() {
    let set = class_set("t^3-t-1");
    let d = fixed("t^3+2*t+1");
    let scene = GrossScene::new(&set, &d).expect("scene");
    assert_eq!(scene.class_number(), 7);

    let (main, opposite) = scene.tagged_orbits().expect("orbits");
    assert_eq!(main.size(), 7);
    assert_eq!(opposite.size(), 7);

    // Orbit landing tallies agree with counting embeddings class by class.
    let row = scene.scan_row().expect("scan row");
    assert_eq!(row.multiplicities.iter().sum::<u64>(), 14);
    let direct = embedding_counts(&set, &d).expect("direct counts");
    assert_eq!(row.multiplicities, direct);

    // The eigenform expansion reconstructs the landing counts exactly and
    // the squared coefficients resolve each class weight.
    let forms = eigenbasis(&set).expect("eigenbasis");
    let basis = scene.basis();
    let full: Vec<Vec<u64>> = basis.classes().iter().map(|(_, c)| c.to_vec()).collect();
    for orbit in [&main, &opposite] {
        let r = spectral_residual(&set, &forms, orbit, basis, &full);
        assert!(r <= 1e-8, "spectral residual {r:e}");
    }
    assert!(bessel_residual(&set, &forms) <= 1e-8);
}

#[test]
fn class_group_composition_is_a_group_law() {
    let ext = QuadExt::new(fixed("t^3+2*t+1")).expect("extension");
    let pic = PicGroup::new(ext);
    let basis = PicBasis::new(&pic, 1_000_000).expect("basis");
    assert_eq!(basis.class_number(), 7);
    assert_eq!(basis.elementary_divisors(), &[7]);

    let g = basis.generators()[0].clone();
    assert!(pic.pow(&g, 7).is_identity());
    let split = pic.compose(&pic.pow(&g, 3), &pic.pow(&g, 4));
    assert!(split.is_identity());
    assert!(pic.compose(&g, &pic.neg(&g)).is_identity());

    // Character orthogonality: a nonprincipal character sums to zero over
    // the group, the principal one to the group order.
    for chi in Character::all(&basis) {
        let mut total = num_complex::Complex64::new(0.0, 0.0);
        for (_, coords) in basis.classes() {
            total += chi.value(coords);
        }
        let expected = if chi.is_principal() { 7.0 } else { 0.0 };
        assert!((total.re - expected).abs() < 1e-12 && total.im.abs() < 1e-12);
    }
}

#[test]
fn supersingular_locus_mirrors_the_class_set() {
    for p0 in monic_irreducibles(3, 3) {
        let locus = supersingular_j_enum(3, &p0).expect("locus");
        assert_eq!(locus.count(), 4);
        let mass = locus.mass();
        let expected = class_mass(3, 3);
        assert_eq!((mass.num(), mass.den()), (expected.num(), expected.den()));
        let mut weights: Vec<u64> = locus.points.iter().map(|(_, w)| *w).collect();
        weights.sort_unstable();
        assert_eq!(weights, vec![1, 1, 1, 4]);
    }
}

#[test]
fn carlitz_cm_reduction_tracks_the_splitting() {
    let module = cm_carlitz(3).expect("CM module");
    let ext = QuadExt::new(Poly::var(3)).expect("rational CM field");
    for deg in 1..=2 {
        for p0 in monic_irreducibles(3, deg) {
            if ext.chi_at_prime(&p0) == 0 {
                continue; // ramified prime of the CM field
            }
            let reduced = reduce_module(&module, &p0).expect("reduction");
            let ss = is_supersingular(&reduced.module, &p0).expect("criterion");
            assert_eq!(ss, ext.chi_at_prime(&p0) == -1);
        }
    }
}

#[test]
fn rankin_expansion_terminates_and_passes_its_bounds() {
    let set = class_set("t^3+2*t+1");
    let ext = QuadExt::new(fixed("t")).expect("extension");
    let pic = PicGroup::new(ext);
    let basis = PicBasis::new(&pic, 1_000_000).expect("basis");
    let forms = eigenbasis(&set).expect("eigenbasis");
    let form = forms.iter().find(|f| !f.eisenstein).expect("cusp form");

    let mut family = RankinFamily::new(&set, form, &pic, &basis).expect("family");
    let chi = Character::all(&basis).remove(0);
    let l = family.polynomial(&chi).expect("convolution polynomial");

    assert_eq!(l.degree, 3);
    assert!(l.central_value() > 0.0);
    assert!(l.critical_line_defect().expect("zeros") <= 1e-9);

    // First coefficient of the logarithmic derivative against the first
    // series coefficient, and the closed central-value bound.
    let c = l.log_deriv_coeffs(4).expect("log derivative");
    assert!((c[1] + 3f64.ln() * l.coefficients[1]).abs() <= 1e-9);
    let bound = central_bound_check(&l).expect("bound");
    assert!(bound.holds && !bound.skipped);
}

#[test]
fn invalid_requests_fail_as_domain_errors() {
    // An even-degree discriminant does not give an imaginary extension.
    match QuadExt::new(fixed("t^2+1")) {
        Err(Error::Domain(_)) => {}
        other => panic!("even degree accepted: {other:?}"),
    }

    // The algebra requires an odd prime base field.
    match QuatAlgebra::new(2, parse_poly("t^3+t+1", 2).unwrap()) {
        Err(Error::Domain(_)) => {}
        other => panic!("q = 2 accepted: {other:?}"),
    }

    // Parse errors carry the offending position.
    match parse_poly("t^3+2t", 3) {
        Err(Error::Parse { pos, .. }) => assert!(pos > 0),
        other => panic!("implicit product accepted: {other:?}"),
    }

    // The convolution family refuses a ramified prime that splits.
    let ext = QuadExt::new(fixed("t")).expect("extension");
    let split_p0 = monic_irreducibles(3, 3)
        .into_iter()
        .find(|p| ext.chi_at_prime(p) == 1)
        .expect("a split cubic prime");
    let alg = QuatAlgebra::new(3, split_p0).expect("algebra at a split prime");
    let set = ClassSet::enumerate(&alg).expect("classes");
    let pic = PicGroup::new(QuadExt::new(fixed("t")).unwrap());
    let basis = PicBasis::new(&pic, 1_000_000).expect("basis");
    let forms = eigenbasis(&set).expect("eigenbasis");
    let form = forms.iter().find(|f| !f.eisenstein).expect("cusp form");
    match RankinFamily::new(&set, form, &pic, &basis) {
        Err(Error::Domain(_)) => {}
        Err(other) => panic!("split prime rejected for the wrong reason: {other}"),
        Ok(_) => panic!("split prime accepted"),
    }
}
