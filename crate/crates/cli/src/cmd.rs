//! One function per subcommand. Each builds its objects from the library,
//! renders the primary output into a string, and hands it to the sink.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use ffquat::brandt::{brandt_matrix, eigenbasis, EigenForm, HeckeLadder};
use ffquat::classes::ClassSet;
use ffquat::drinfeld::{
    carlitz_action, cm_carlitz, is_supersingular, reduce_module, supersingular_j_enum,
};
use ffquat::gross::{coords_from_flat, flat_index, GrossScene, ScanRow};
use ffquat::irred::{monic_irreducibles, place_norm};
use ffquat::lseries::QuadExt;
use ffquat::parse::{format_poly, parse_poly};
use ffquat::pic::{Character, PicBasis, PicGroup};
use ffquat::quat::QuatAlgebra;
use ffquat::rankin::{
    central_bound_check, period_ratio_scan, CentralBoundReport, PeriodRatioScan, RankinFamily,
    RankinReport,
};
use ffquat::roots::integer_poly_roots;
use ffquat::{Error, Poly};

use ffquat_cli::{cache, checks};

use crate::output::{json_line, mass_str, poly_str, scan_csv_header, scan_csv_row, Format, Render, Sink};
use crate::{AlgOpts, ExtOpts, IoOpts};

fn domain(msg: impl Into<String>) -> anyhow::Error {
    Error::domain(msg).into()
}

fn check_prime_field(q: u64) -> anyhow::Result<()> {
    let prime = q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0);
    if !prime || q == 2 {
        return Err(domain(format!("q = {q} is not an odd prime")));
    }
    Ok(())
}

fn parse_arg(q: u64, text: &str, role: &str) -> anyhow::Result<Poly> {
    parse_poly(text, q).map_err(|e| domain(format!("{role} = {text:?}: {e}")))
}

fn resolve_algebra(opts: &AlgOpts) -> anyhow::Result<Arc<QuatAlgebra>> {
    check_prime_field(opts.q)?;
    let p0 = parse_arg(opts.q, &opts.p0, "--P0")?;
    let alg = QuatAlgebra::new(opts.q, p0)?;
    if let Some(delta) = opts.delta {
        if delta != alg.delta() {
            return Err(domain(format!(
                "the algebra over F_{} is built on delta = {}, not {delta}",
                opts.q,
                alg.delta()
            )));
        }
    }
    Ok(alg)
}

fn load_classes(opts: &AlgOpts, alg: &Arc<QuatAlgebra>) -> anyhow::Result<ClassSet> {
    cache::load_or_build(alg, opts.cache_dir.as_deref())
}

fn pick_format(io: &IoOpts, default: Render, allowed: &[Render]) -> anyhow::Result<Render> {
    let render = io.format.map(Format::render).unwrap_or(default);
    if allowed.contains(&render) {
        Ok(render)
    } else {
        Err(domain("this command does not support that output format"))
    }
}

// --- lseries / classnum ----------------------------------------------------

#[derive(Serialize)]
struct LseriesOut {
    q: u64,
    d: String,
    degree: usize,
    genus: usize,
    l_polynomial: Vec<i64>,
    class_number: u64,
    hasse_low: f64,
    hasse_high: f64,
    critical_defect: f64,
}

fn lseries_data(ext: &ExtOpts) -> anyhow::Result<LseriesOut> {
    check_prime_field(ext.q)?;
    let d = parse_arg(ext.q, &ext.d, "--D")?;
    let quad = QuadExt::new(d.clone())?;
    let l_polynomial = quad.l_polynomial();
    let mut critical_defect = 0.0f64;
    if quad.genus() > 0 {
        let target = (ext.q as f64).powf(-0.5);
        for (root, _) in integer_poly_roots(&l_polynomial)? {
            critical_defect = critical_defect.max((root.norm() - target).abs());
        }
    }
    let (hasse_low, hasse_high) = quad.hasse_interval();
    Ok(LseriesOut {
        q: ext.q,
        d: poly_str(&d),
        degree: d.deg(),
        genus: quad.genus(),
        l_polynomial,
        class_number: quad.class_number(),
        hasse_low,
        hasse_high,
        critical_defect,
    })
}

pub fn lseries(ext: &ExtOpts, io: &IoOpts) -> anyhow::Result<()> {
    let format = pick_format(io, Render::Json, &[Render::Json, Render::Text])?;
    let data = lseries_data(ext)?;
    let body = match format {
        Render::Json => json_line(&data)?,
        _ => {
            let coeffs: Vec<String> = data.l_polynomial.iter().map(i64::to_string).collect();
            format!(
                "q={} D={} genus={} L=[{}] h={} defect={:.1e}\n",
                data.q,
                data.d,
                data.genus,
                coeffs.join(","),
                data.class_number,
                data.critical_defect
            )
        }
    };
    Sink::new(io.out.clone()).write(&body)
}

pub fn classnum(ext: &ExtOpts, io: &IoOpts) -> anyhow::Result<()> {
    let format = pick_format(io, Render::Text, &[Render::Text, Render::Json])?;
    let data = lseries_data(ext)?;
    let body = match format {
        Render::Json => {
            #[derive(Serialize)]
            struct ClassnumOut {
                q: u64,
                d: String,
                class_number: u64,
            }
            json_line(&ClassnumOut {
                q: data.q,
                d: data.d,
                class_number: data.class_number,
            })?
        }
        _ => format!("{}\n", data.class_number),
    };
    Sink::new(io.out.clone()).write(&body)
}

// --- quat classes -----------------------------------------------------------

pub fn quat_classes(alg: &AlgOpts, io: &IoOpts) -> anyhow::Result<()> {
    let format = pick_format(io, Render::Text, &[Render::Text, Render::Json])?;
    let algebra = resolve_algebra(alg)?;
    let set = load_classes(alg, &algebra)?;
    let weights: Vec<u64> = set.classes.iter().map(|c| c.weight).collect();
    let body = match format {
        Render::Json => {
            #[derive(Serialize)]
            struct ClassesOut {
                q: u64,
                p0: String,
                delta: u64,
                n: usize,
                weights: Vec<u64>,
                mass: String,
            }
            json_line(&ClassesOut {
                q: algebra.q(),
                p0: poly_str(algebra.p0()),
                delta: algebra.delta(),
                n: set.len(),
                weights,
                mass: mass_str(&set.mass),
            })?
        }
        _ => {
            let weights: Vec<String> = weights.iter().map(u64::to_string).collect();
            format!(
                "n={}, weights {}, mass {}\n",
                set.len(),
                weights.join(","),
                mass_str(&set.mass)
            )
        }
    };
    Sink::new(io.out.clone()).write(&body)
}

// --- brandt ------------------------------------------------------------------

#[derive(Serialize)]
struct SpectrumOut {
    eisenstein: bool,
    value: f64,
}

#[derive(Serialize)]
struct OperatorOut {
    t: String,
    norm: u64,
    matrix: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    spectrum: Vec<SpectrumOut>,
}

#[derive(Serialize)]
struct BrandtOut {
    q: u64,
    p0: String,
    n: usize,
    weights: Vec<u64>,
    operators: Vec<OperatorOut>,
}

pub fn brandt(
    alg: &AlgOpts,
    t: Option<&str>,
    deg_max: usize,
    tol: f64,
    io: &IoOpts,
) -> anyhow::Result<()> {
    pick_format(io, Render::Json, &[Render::Json])?;
    let algebra = resolve_algebra(alg)?;
    let set = load_classes(alg, &algebra)?;
    let q = algebra.q();

    let ts: Vec<Poly> = match t {
        Some(text) => vec![parse_arg(q, text, "--T")?],
        None => (1..=deg_max)
            .flat_map(|deg| monic_irreducibles(q, deg))
            .filter(|t| t != algebra.p0())
            .collect(),
    };
    if ts.is_empty() {
        return Err(domain("no operator primes selected"));
    }

    let forms = eigenbasis(&set)?;
    let mut ladders: Vec<HeckeLadder> = forms
        .iter()
        .map(|f| HeckeLadder::new(&set, f.anchor()))
        .collect::<ffquat::Result<_>>()?;

    let mut operators = Vec::with_capacity(ts.len());
    for t in &ts {
        let matrix = brandt_matrix(&set, t)?;
        let row_sums: Vec<u64> = matrix.iter().map(|row| row.iter().sum()).collect();
        let mut spectrum = Vec::with_capacity(forms.len());
        for (form, ladder) in forms.iter().zip(&mut ladders) {
            let value = ladder.eigenvalue(t, form)?;
            if !form.eisenstein && t != algebra.p0() {
                let bound = 2.0 * (place_norm(q, t.deg()) as f64).sqrt() + tol;
                if value.abs() > bound {
                    return Err(Error::internal(format!(
                        "cuspidal eigenvalue {value} at T = {} escapes the bound {bound}",
                        poly_str(t)
                    ))
                    .into());
                }
            }
            spectrum.push(SpectrumOut {
                eisenstein: form.eisenstein,
                value,
            });
        }
        operators.push(OperatorOut {
            t: poly_str(t),
            norm: place_norm(q, t.deg()),
            matrix,
            row_sums,
            spectrum,
        });
    }

    let body = json_line(&BrandtOut {
        q,
        p0: poly_str(algebra.p0()),
        n: set.len(),
        weights: set.classes.iter().map(|c| c.weight).collect(),
        operators,
    })?;
    Sink::new(io.out.clone()).write(&body)
}

// --- gross -------------------------------------------------------------------

#[derive(Serialize)]
struct SubgroupOut {
    order: u64,
    index: u64,
    counts: Vec<u64>,
}

#[derive(Serialize)]
struct ScanRowOut {
    d: String,
    deg_d: usize,
    class_number: u64,
    counts: Vec<u64>,
    opposite_counts: Vec<u64>,
    multiplicities: Vec<u64>,
    discrepancy: f64,
    envelope: f64,
    runtime_ms: u64,
}

impl ScanRowOut {
    fn from_row(row: &ScanRow) -> ScanRowOut {
        ScanRowOut {
            d: poly_str(&row.discriminant),
            deg_d: row.degree,
            class_number: row.class_number,
            counts: row.counts.clone(),
            opposite_counts: row.opposite_counts.clone(),
            multiplicities: row.multiplicities.clone(),
            discrepancy: row.discrepancy,
            envelope: row.envelope,
            runtime_ms: row.runtime_ms,
        }
    }
}

/// Subgroup of the class group as the full list of coordinate vectors over
/// the elementary-divisor basis: the whole group, the identity alone, or
/// the closure of the generators in a spec like "1,0;0,2".
fn subgroup_elements(spec: &str, divisors: &[u64]) -> anyhow::Result<Vec<Vec<u64>>> {
    let rank = divisors.len();
    let total: u64 = divisors.iter().product();
    match spec {
        "pic" => Ok((0..total as usize)
            .map(|flat| coords_from_flat(divisors, flat))
            .collect()),
        "trivial" => Ok(vec![vec![0; rank]]),
        _ => {
            let mut gens: Vec<Vec<u64>> = Vec::new();
            for part in spec.split(';') {
                let coords: Vec<u64> = part
                    .split(',')
                    .map(|c| c.trim().parse::<u64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| domain(format!("unreadable subgroup generator {part:?}")))?;
                if coords.len() != rank {
                    return Err(domain(format!(
                        "subgroup generators need {rank} coordinates, one per elementary divisor"
                    )));
                }
                gens.push(coords.iter().zip(divisors).map(|(c, m)| c % m).collect());
            }
            let identity = vec![0u64; rank];
            let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
            seen.insert(identity.clone());
            let mut frontier = vec![identity];
            while let Some(x) = frontier.pop() {
                for g in &gens {
                    let y: Vec<u64> = x
                        .iter()
                        .zip(g)
                        .zip(divisors)
                        .map(|((a, b), m)| (a + b) % m)
                        .collect();
                    if seen.insert(y.clone()) {
                        frontier.push(y);
                    }
                }
            }
            Ok(seen.into_iter().collect())
        }
    }
}

pub fn gross(
    alg: &AlgOpts,
    d: &str,
    subgroup: Option<&str>,
    eta: Option<f64>,
    io: &IoOpts,
) -> anyhow::Result<()> {
    let format = pick_format(io, Render::Csv, &[Render::Csv, Render::Json])?;
    let algebra = resolve_algebra(alg)?;
    let set = load_classes(alg, &algebra)?;
    let d = parse_arg(algebra.q(), d, "--D")?;
    let scene = GrossScene::new(&set, &d)?;
    let row = scene.scan_row()?;

    if format == Render::Csv {
        if subgroup.is_some() {
            return Err(domain("subgroup counts are reported in --format json only"));
        }
        let body = format!(
            "{}\n{}\n",
            scan_csv_header(set.len()),
            scan_csv_row(algebra.q(), algebra.p0(), &row)
        );
        return Sink::new(io.out.clone()).write(&body);
    }

    let subgroup_report = match subgroup {
        None => None,
        Some(spec) => {
            let basis = scene.basis();
            let elements = subgroup_elements(spec, basis.elementary_divisors())?;
            let order = elements.len() as u64;
            let index = basis.class_number() / order;
            if let Some(eta) = eta {
                let cap = (algebra.q() as f64).powf(eta * d.deg() as f64);
                if index as f64 > cap {
                    return Err(domain(format!(
                        "subgroup index {index} exceeds |D|^eta = {cap:.3}"
                    )));
                }
            }
            let (orbit, _) = scene.tagged_orbits()?;
            let mut counts = vec![0u64; set.len()];
            for coords in &elements {
                counts[orbit.landing()[flat_index(basis.elementary_divisors(), coords)]] += 1;
            }
            Some(SubgroupOut {
                order,
                index,
                counts,
            })
        }
    };

    #[derive(Serialize)]
    struct GrossOut {
        q: u64,
        p0: String,
        #[serde(flatten)]
        row: ScanRowOut,
        n: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        subgroup: Option<SubgroupOut>,
    }
    let body = json_line(&GrossOut {
        q: algebra.q(),
        p0: poly_str(algebra.p0()),
        row: ScanRowOut::from_row(&row),
        n: set.len(),
        subgroup: subgroup_report,
    })?;
    Sink::new(io.out.clone()).write(&body)
}

// --- equidist ----------------------------------------------------------------

pub fn equidist(alg: &AlgOpts, deg_min: usize, deg_max: usize, io: &IoOpts) -> anyhow::Result<()> {
    let format = pick_format(io, Render::Csv, &[Render::Csv, Render::Json])?;
    if deg_min < 1 || deg_min > deg_max {
        return Err(domain("the degree range is empty"));
    }
    let degrees: Vec<usize> = (deg_min..=deg_max).filter(|deg| deg % 2 == 1).collect();
    if degrees.is_empty() {
        return Err(domain("no odd degrees in the range"));
    }
    let algebra = resolve_algebra(alg)?;
    let set = load_classes(alg, &algebra)?;
    let rows = ffquat::gross::equidist_scan(&set, &degrees)?;
    let slope = ffquat::gross::equidist_slope(algebra.q(), &rows);

    let body = match format {
        Render::Json => {
            #[derive(Serialize)]
            struct EquidistOut {
                q: u64,
                p0: String,
                degrees: Vec<usize>,
                rows: Vec<ScanRowOut>,
                slope: Option<f64>,
            }
            json_line(&EquidistOut {
                q: algebra.q(),
                p0: poly_str(algebra.p0()),
                degrees,
                rows: rows.iter().map(ScanRowOut::from_row).collect(),
                slope,
            })?
        }
        _ => {
            match slope {
                Some(s) => eprintln!("note: least-squares discrepancy slope {s:.4}"),
                None => eprintln!("note: too few degrees for a slope"),
            }
            let mut body = scan_csv_header(set.len());
            body.push('\n');
            for row in &rows {
                body.push_str(&scan_csv_row(algebra.q(), algebra.p0(), row));
                body.push('\n');
            }
            body
        }
    };
    Sink::new(io.out.clone()).write(&body)
}

// --- surjectivity ------------------------------------------------------------

pub fn surjectivity(alg: &AlgOpts, deg_max: usize, io: &IoOpts) -> anyhow::Result<()> {
    let format = pick_format(io, Render::Json, &[Render::Json, Render::Text])?;
    let algebra = resolve_algebra(alg)?;
    let set = load_classes(alg, &algebra)?;
    let report = ffquat::gross::surjectivity_scan(&set, deg_max)?;

    let body = match format {
        Render::Json => {
            #[derive(Serialize)]
            struct DegreeOut {
                degree: usize,
                inert: usize,
                full: usize,
                missing_everywhere: Vec<usize>,
            }
            #[derive(Serialize)]
            struct SurjectivityOut {
                q: u64,
                p0: String,
                max_degree: usize,
                minimal_degree: Option<usize>,
                witness: Option<String>,
                degrees: Vec<DegreeOut>,
            }
            json_line(&SurjectivityOut {
                q: algebra.q(),
                p0: poly_str(algebra.p0()),
                max_degree: deg_max,
                minimal_degree: report.minimal_degree,
                witness: report.witness.as_ref().map(poly_str),
                degrees: report
                    .degrees
                    .iter()
                    .map(|d| DegreeOut {
                        degree: d.degree,
                        inert: d.inert,
                        full: d.full,
                        missing_everywhere: d.missing_everywhere.clone(),
                    })
                    .collect(),
            })?
        }
        _ => {
            let mut body = String::new();
            for d in &report.degrees {
                let missing: Vec<String> =
                    d.missing_everywhere.iter().map(usize::to_string).collect();
                body.push_str(&format!(
                    "degree {}: {} inert, {} with full support; never met: [{}]\n",
                    d.degree,
                    d.inert,
                    d.full,
                    missing.join(",")
                ));
            }
            match (&report.minimal_degree, &report.witness) {
                (Some(deg), Some(witness)) => body.push_str(&format!(
                    "minimal full-support degree: {deg} (D = {})\n",
                    poly_str(witness)
                )),
                _ => body.push_str(&format!("no full-support discriminant up to degree {deg_max}\n")),
            }
            body
        }
    };
    Sink::new(io.out.clone()).write(&body)
}

// --- drinfeld ss --------------------------------------------------------------

pub fn drinfeld_ss(alg: &AlgOpts, io: &IoOpts) -> anyhow::Result<()> {
    let format = pick_format(io, Render::Text, &[Render::Text, Render::Json])?;
    check_prime_field(alg.q)?;
    let p0 = parse_arg(alg.q, &alg.p0, "--P0")?;
    let locus = supersingular_j_enum(alg.q, &p0)?;

    let body = match format {
        Render::Json => {
            #[derive(Serialize)]
            struct PointOut {
                j: String,
                code: u64,
                weight: u64,
            }
            #[derive(Serialize)]
            struct LocusOut {
                q: u64,
                p0: String,
                field_order: u64,
                modulus: String,
                count: usize,
                mass: String,
                points: Vec<PointOut>,
            }
            json_line(&LocusOut {
                q: alg.q,
                p0: poly_str(&p0),
                field_order: locus.field.order(),
                modulus: format_poly(locus.field.modulus(), 'x'),
                count: locus.count(),
                mass: mass_str(&locus.mass()),
                points: locus
                    .points
                    .iter()
                    .map(|(j, weight)| PointOut {
                        j: format_poly(&j.to_poly(), 'x'),
                        code: j.code(),
                        weight: *weight,
                    })
                    .collect(),
            })?
        }
        _ => {
            let mut body = format!(
                "n={}, mass {}, field F_{} = F_{}[x]/({})\n",
                locus.count(),
                mass_str(&locus.mass()),
                locus.field.order(),
                alg.q,
                format_poly(locus.field.modulus(), 'x')
            );
            for (j, weight) in &locus.points {
                body.push_str(&format!(
                    "j={} weight={weight}\n",
                    format_poly(&j.to_poly(), 'x')
                ));
            }
            body
        }
    };
    Sink::new(io.out.clone()).write(&body)
}

// --- cm-demo -------------------------------------------------------------------

pub fn cm_demo(q: u64, deg_max: usize, io: &IoOpts) -> anyhow::Result<()> {
    let format = pick_format(io, Render::Text, &[Render::Text, Render::Json])?;
    check_prime_field(q)?;
    let module = cm_carlitz(q)?;
    let extra = carlitz_action(q);
    let phi_t = module.phi_t();
    let commutes = phi_t.mul(&extra) == extra.mul(&phi_t);
    let j = module.j_invariant(q)?;
    let cm_field = QuadExt::new(Poly::var(q))?;

    #[derive(Serialize)]
    struct CmRow {
        p0: String,
        chi: i32,
        split: Option<bool>,
        supersingular: Option<bool>,
        agrees: Option<bool>,
    }
    let mut rows = Vec::new();
    for deg in 1..=deg_max {
        for p0 in monic_irreducibles(q, deg) {
            let chi = cm_field.chi_at_prime(&p0);
            if chi == 0 {
                rows.push(CmRow {
                    p0: poly_str(&p0),
                    chi,
                    split: None,
                    supersingular: None,
                    agrees: None,
                });
                continue;
            }
            let reduced = reduce_module(&module, &p0)?;
            let ss = is_supersingular(&reduced.module, &p0)?;
            let agrees = (reduced.split == (chi == 1)) && (ss == (chi == -1));
            rows.push(CmRow {
                p0: poly_str(&p0),
                chi,
                split: Some(reduced.split),
                supersingular: Some(ss),
                agrees: Some(agrees),
            });
        }
    }

    let body = match format {
        Render::Json => {
            #[derive(Serialize)]
            struct CmDemoOut {
                q: u64,
                g: String,
                delta: String,
                j: String,
                commutes: bool,
                reductions: Vec<CmRow>,
            }
            json_line(&CmDemoOut {
                q,
                g: poly_str(&module.g),
                delta: poly_str(&module.delta),
                j: poly_str(&j),
                commutes,
                reductions: rows,
            })?
        }
        _ => {
            let mut body = format!(
                "module over F_{q}[t]: g = {}, delta = {}, j = {}\n",
                poly_str(&module.g),
                poly_str(&module.delta),
                poly_str(&j)
            );
            body.push_str(&format!(
                "the extra endomorphism commutes with the t-action: {commutes}\n"
            ));
            for row in &rows {
                match (row.split, row.supersingular, row.agrees) {
                    (Some(split), Some(ss), Some(agrees)) => body.push_str(&format!(
                        "p0={}: chi={:+} {} {} {}\n",
                        row.p0,
                        row.chi,
                        if split { "split" } else { "inert" },
                        if ss { "supersingular" } else { "ordinary" },
                        if agrees { "agrees" } else { "DISAGREES" }
                    )),
                    _ => body.push_str(&format!("p0={}: ramified\n", row.p0)),
                }
            }
            body
        }
    };
    Sink::new(io.out.clone()).write(&body)
}

// --- rankin ---------------------------------------------------------------------

fn select_form(
    forms: &[EigenForm],
    requested: Option<usize>,
) -> anyhow::Result<(usize, &EigenForm)> {
    match requested {
        Some(index) => {
            let form = forms.get(index).ok_or_else(|| {
                domain(format!("the spectral basis has {} forms", forms.len()))
            })?;
            Ok((index, form))
        }
        None => forms
            .iter()
            .enumerate()
            .find(|(_, f)| !f.eisenstein)
            .ok_or_else(|| domain("no cuspidal eigenform at this level")),
    }
}

pub fn rankin(
    alg: &AlgOpts,
    d: &str,
    chi_id: usize,
    form_id: Option<usize>,
    tol: f64,
    slow: bool,
    io: &IoOpts,
) -> anyhow::Result<()> {
    pick_format(io, Render::Json, &[Render::Json])?;
    let algebra = resolve_algebra(alg)?;
    let set = load_classes(alg, &algebra)?;
    let d = parse_arg(algebra.q(), d, "--D")?;

    let forms = eigenbasis(&set)?;
    let (form_index, form) = select_form(&forms, form_id)?;

    let pic = PicGroup::new(QuadExt::new(d.clone())?);
    let basis = PicBasis::new(&pic, 1_000_000)?;
    let characters = Character::all(&basis);
    let chi = characters.get(chi_id).ok_or_else(|| {
        domain(format!(
            "character index {chi_id} out of range: the class group has order {}",
            basis.class_number()
        ))
    })?;

    let mut family = RankinFamily::new(&set, form, &pic, &basis)?;
    let polynomial = family.polynomial(chi)?;
    let critical_defect = polynomial.critical_line_defect()?;
    if critical_defect > tol {
        return Err(Error::internal(format!(
            "zeros stray {critical_defect:.3e} from the critical line (tolerance {tol:.1e})"
        ))
        .into());
    }
    let central_bound = central_bound_check(&polynomial)?;

    let period_scan: Option<PeriodRatioScan> = if slow {
        let scene = GrossScene::new(&set, &d)?;
        Some(period_ratio_scan(&scene, &mut family)?)
    } else {
        None
    };

    let report = RankinReport {
        q: algebra.q(),
        p0: poly_str(algebra.p0()),
        discriminant: poly_str(&d),
        chi_id,
        form_id: form_index,
        degree: polynomial.degree,
        coefficients: polynomial.coefficients.clone(),
        central_value: polynomial.central_value(),
        bound_lhs: central_bound.lhs,
        bound_rhs: central_bound.rhs,
        degree_ratio: polynomial.degree as f64 / (algebra.p0().deg() + d.deg()) as f64,
    };

    #[derive(Serialize)]
    struct RankinOut {
        #[serde(flatten)]
        report: RankinReport,
        critical_defect: f64,
        central_bound: CentralBoundReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        period_scan: Option<PeriodRatioScan>,
    }
    let body = json_line(&RankinOut {
        report,
        critical_defect,
        central_bound,
        period_scan,
    })?;
    Sink::new(io.out.clone()).write(&body)
}

// --- selftest --------------------------------------------------------------------

pub fn selftest(
    q: u64,
    level: checks::Level,
    deg_max: Option<usize>,
    surj_max: Option<usize>,
    slow: bool,
) -> anyhow::Result<u8> {
    let reports = checks::run_suite(&checks::SuiteConfig {
        q,
        level,
        deg_max,
        surj_max,
        slow,
    })?;
    let mut failed = 0usize;
    let mut skipped = 0usize;
    println!("verification suite, level {level}");
    for report in &reports {
        let tag = match report.status {
            checks::Status::Ok => "ok  ",
            checks::Status::Fail => {
                failed += 1;
                "FAIL"
            }
            checks::Status::Skip => {
                skipped += 1;
                "skip"
            }
        };
        println!("{tag} {:<22} {}", report.name, report.detail);
    }
    println!(
        "summary: {} passed, {failed} failed, {skipped} skipped",
        reports.len() - failed - skipped
    );
    Ok(if failed > 0 { 1 } else { 0 })
}
