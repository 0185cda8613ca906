//! Rankin convolutions of a cuspidal Brandt eigenform with a class group
//! character of an imaginary quadratic extension.
//!
//! The convolution is assembled as an Euler product over places of the
//! rational function field and collapses to a polynomial in q^(-s); the
//! module detects that polynomial, evaluates central values, checks the
//! critical-line location of the roots, and carries the explicit
//! central-value bound together with the kernel inequalities it rests on.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::brandt::{EigenForm, HeckeLadder};
use crate::classes::ClassSet;
use crate::error::{Error, Result};
use crate::gross::{coords_from_flat, GrossScene};
use crate::irred::{monic_irreducibles, poly_code};
use crate::pic::{Character, PicBasis, PicGroup};
use crate::poly::Poly;
use crate::roots::complex_poly_roots;

/// Hecke eigenvalues of one cuspidal eigenform, extracted on demand from a
/// single anchored matrix row per prime and cached by prime code.
pub struct HeckeSystem<'a> {
    set: &'a ClassSet,
    form: EigenForm,
    ladder: HeckeLadder<'a>,
    cache: HashMap<u64, f64>,
}

impl<'a> HeckeSystem<'a> {
    pub fn new(set: &'a ClassSet, form: &EigenForm) -> Result<HeckeSystem<'a>> {
        if form.eisenstein {
            return Err(Error::domain(
                "the Rankin expansion needs a cuspidal eigenform",
            ));
        }
        let ladder = HeckeLadder::new(set, form.anchor())?;
        Ok(HeckeSystem {
            set,
            form: form.clone(),
            ladder,
            cache: HashMap::new(),
        })
    }

    pub fn set(&self) -> &ClassSet {
        self.set
    }

    pub fn form(&self) -> &EigenForm {
        &self.form
    }

    /// Eigenvalue at a monic irreducible. At the ramified prime of the
    /// algebra the value is snapped to the sign it must be; everywhere else
    /// it is checked against the Ramanujan bound.
    pub fn eigenvalue(&mut self, v: &Poly) -> Result<f64> {
        let code = poly_code(v);
        if let Some(&cached) = self.cache.get(&code) {
            return Ok(cached);
        }
        let raw = self.ladder.eigenvalue(v, &self.form)?;
        let q = self.set.algebra().q() as f64;
        let value = if v == self.set.algebra().p0() {
            if (raw.abs() - 1.0).abs() > 1e-6 {
                return Err(Error::internal(format!(
                    "eigenvalue {raw} at the ramified prime is not a sign",
                )));
            }
            raw.signum()
        } else {
            let bound = 2.0 * q.powf(v.deg() as f64 / 2.0) + 1e-9;
            if raw.abs() > bound {
                return Err(Error::internal(format!(
                    "eigenvalue {raw} at degree {} breaks the Ramanujan bound",
                    v.deg()
                )));
            }
            raw
        };
        self.cache.insert(code, value);
        Ok(value)
    }
}

/// Splitting data of one finite place together with the normalized
/// eigenvalue there. Character values enter only at split places; the prime
/// above an inert place and the prime above the ramified place are both
/// principal, so their character values are pinned to 1.
enum PlaceKind {
    Split { chi_coords: Vec<u64> },
    Inert,
    Ramified,
}

struct PlaceData {
    stride: usize,
    kind: PlaceKind,
    lambda_hat: f64,
}

/// Everything fixed about the convolutions of one (eigenform, quadratic
/// extension) pair: the eigenvalue system plus the place table, extended
/// lazily as larger degree caps are requested.
pub struct RankinFamily<'a> {
    sys: HeckeSystem<'a>,
    pic: &'a PicGroup,
    basis: &'a PicBasis,
    places: Vec<PlaceData>,
    built_deg: usize,
}

impl<'a> RankinFamily<'a> {
    pub fn new(
        set: &'a ClassSet,
        form: &EigenForm,
        pic: &'a PicGroup,
        basis: &'a PicBasis,
    ) -> Result<RankinFamily<'a>> {
        let q = set.algebra().q();
        if pic.q() != q {
            return Err(Error::FieldMismatch {
                expected: q,
                got: pic.q(),
            });
        }
        if pic.ext().chi_at_prime(set.algebra().p0()) != -1 {
            return Err(Error::domain(
                "the ramified prime of the algebra must stay inert in the quadratic extension",
            ));
        }
        Ok(RankinFamily {
            sys: HeckeSystem::new(set, form)?,
            pic,
            basis,
            places: Vec::new(),
            built_deg: 0,
        })
    }

    pub fn system(&mut self) -> &mut HeckeSystem<'a> {
        &mut self.sys
    }

    pub fn form(&self) -> &EigenForm {
        self.sys.form()
    }

    fn discriminant(&self) -> &Poly {
        self.pic.ext().discriminant()
    }

    fn extend_places(&mut self, cap: usize) -> Result<()> {
        let q = self.sys.set.algebra().q();
        let p0 = self.sys.set.algebra().p0().clone();
        for deg in self.built_deg + 1..=cap {
            for v in monic_irreducibles(q, deg) {
                if v == p0 {
                    continue;
                }
                let kind = match self.pic.ext().chi_at_prime(&v) {
                    1 => {
                        let class = self.pic.split_prime_class(&v)?;
                        PlaceKind::Split {
                            chi_coords: self.basis.coords_of(&class)?.to_vec(),
                        }
                    }
                    -1 => PlaceKind::Inert,
                    _ => PlaceKind::Ramified,
                };
                let lambda = self.sys.eigenvalue(&v)?;
                let lambda_hat = lambda / (q as f64).powf(deg as f64 / 2.0);
                self.places.push(PlaceData {
                    stride: deg,
                    kind,
                    lambda_hat,
                });
            }
        }
        self.built_deg = self.built_deg.max(cap);
        Ok(())
    }

    /// Expansion coefficients b(0..=cap) of the convolution twisted by
    /// `chi`: the product of the inverse local factors of every place of
    /// degree at most cap, inverted as a power series. Exact (up to float
    /// arithmetic) in that range.
    pub fn coefficients(&mut self, chi: &Character, cap: usize) -> Result<Vec<f64>> {
        self.extend_places(cap)?;
        let q = self.sys.set.algebra().q() as f64;
        let mut denom = vec![0.0; cap + 1];
        denom[0] = 1.0;
        // The place at infinity ramifies in an odd-degree extension and the
        // form's eigenvalue there is 1.
        mul_in_place(&mut denom, &[1.0, -q.powf(-0.5)], 1);
        // The ramified prime of the algebra is inert in the extension, the
        // prime above it is principal, and the squared eigenvalue is 1, so
        // its factor closes to a fixed binomial.
        let d0 = self.sys.set.algebra().p0().deg();
        if 2 * d0 <= cap {
            mul_in_place(&mut denom, &[1.0, -q.powi(-(d0 as i32))], 2 * d0);
        }
        for place in &self.places {
            if place.stride > cap {
                continue;
            }
            let lh = place.lambda_hat;
            let factor: Vec<f64> = match &place.kind {
                PlaceKind::Split { chi_coords } => {
                    let c = chi.value(chi_coords);
                    let re_c = c.re;
                    let re_c2 = (c * c).re;
                    // Product of the two conjugate quadratic factors; the
                    // unit character values only survive through these real
                    // combinations.
                    vec![
                        1.0,
                        -2.0 * lh * re_c,
                        lh * lh + 2.0 * re_c2,
                        -2.0 * lh * re_c,
                        1.0,
                    ]
                }
                PlaceKind::Inert => vec![1.0, 0.0, -(lh * lh - 2.0), 0.0, 1.0],
                PlaceKind::Ramified => vec![1.0, -lh, 1.0],
            };
            mul_in_place(&mut denom, &factor, place.stride);
        }
        Ok(invert_series(&denom))
    }

    /// Detects the polynomial the twisted convolution collapses to. The
    /// degree cap starts just past the predicted degree and doubles while
    /// the tail has not been observed to vanish.
    pub fn polynomial(&mut self, chi: &Character) -> Result<RankinL> {
        let deg_p0 = self.sys.set.algebra().p0().deg();
        let deg_d = self.discriminant().deg();
        let mut cap = predicted_degree(deg_p0, deg_d) + 2;
        loop {
            let coefficients = self.coefficients(chi, cap)?;
            let peak = coefficients.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let degree = coefficients
                .iter()
                .rposition(|b| b.abs() > 1e-6 * peak)
                .unwrap_or(0);
            if cap - degree >= 2 {
                return Ok(RankinL {
                    q: self.sys.set.algebra().q(),
                    coefficients,
                    degree,
                });
            }
            if cap >= 24 {
                return Err(Error::domain(
                    "the expansion tail stayed loud past every feasible degree cap",
                ));
            }
            cap = (2 * cap).min(24);
        }
    }
}

/// Empirical degree law of the detected polynomials; used only to seed the
/// detection cap, never asserted.
pub fn predicted_degree(deg_p0: usize, deg_d: usize) -> usize {
    (2 * (deg_p0 + deg_d)).saturating_sub(5).max(1)
}

/// In-place truncated multiplication of a power series by a polynomial in
/// x^stride whose constant term is 1.
fn mul_in_place(acc: &mut [f64], factor: &[f64], stride: usize) {
    debug_assert_eq!(factor[0], 1.0);
    for n in (0..acc.len()).rev() {
        let mut sum = acc[n];
        for (k, &f) in factor.iter().enumerate().skip(1) {
            let off = k * stride;
            if off > n {
                break;
            }
            sum += f * acc[n - off];
        }
        acc[n] = sum;
    }
}

/// Truncated inverse of a power series with constant term 1.
fn invert_series(denom: &[f64]) -> Vec<f64> {
    debug_assert_eq!(denom[0], 1.0);
    let mut out = vec![0.0; denom.len()];
    out[0] = 1.0;
    for n in 1..denom.len() {
        let mut sum = 0.0;
        for k in 1..=n {
            sum += denom[k] * out[n - k];
        }
        out[n] = -sum;
    }
    out
}

/// A twisted convolution collapsed to the polynomial it equals: expansion
/// coefficients in x = q^(-s), with every root on |x| = q^(-1/2).
#[derive(Clone, Debug, Serialize)]
pub struct RankinL {
    pub q: u64,
    /// b(0..=cap); entries past `degree` are the observed silent tail.
    pub coefficients: Vec<f64>,
    /// Last index whose coefficient is above the relative tail threshold.
    pub degree: usize,
}

impl RankinL {
    /// Value at the center s = 1/2 of the functional equation.
    pub fn central_value(&self) -> f64 {
        let scale = (self.q as f64).powf(-0.5);
        let mut x = 1.0;
        let mut total = 0.0;
        for b in &self.coefficients[..=self.degree] {
            total += b * x;
            x *= scale;
        }
        total
    }

    /// Loudest coefficient past the detected degree.
    pub fn tail_peak(&self) -> f64 {
        self.coefficients[self.degree + 1..]
            .iter()
            .fold(0.0f64, |a, b| a.max(b.abs()))
    }

    /// Roots in the variable x = q^(-s).
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.degree == 0 {
            return Ok(Vec::new());
        }
        let coeffs: Vec<Complex64> = self.coefficients[..=self.degree]
            .iter()
            .map(|&b| Complex64::new(b, 0.0))
            .collect();
        complex_poly_roots(&coeffs)
    }

    /// Largest deviation of any root modulus from q^(-1/2).
    pub fn critical_line_defect(&self) -> Result<f64> {
        let target = (self.q as f64).powf(-0.5);
        Ok(self
            .roots()?
            .iter()
            .map(|u| (u.norm() - target).abs())
            .fold(0.0, f64::max))
    }

    /// Coefficients c(1..=n_max) of the logarithmic derivative in q^(-s):
    /// c(n) = log(q) * sum of the n-th powers of the inverse roots. Index 0
    /// is unused and zero.
    pub fn log_deriv_coeffs(&self, n_max: usize) -> Result<Vec<f64>> {
        let gammas: Vec<Complex64> = self.roots()?.iter().map(|u| u.inv()).collect();
        let logq = (self.q as f64).ln();
        let mut out = vec![0.0; n_max + 1];
        let mut powers = vec![Complex64::new(1.0, 0.0); gammas.len()];
        for c in out.iter_mut().skip(1) {
            for (p, g) in powers.iter_mut().zip(&gammas) {
                *p *= g;
            }
            *c = logq * powers.iter().map(|p| p.re).sum::<f64>();
        }
        Ok(out)
    }
}

/// Sum of the divisors of n.
pub fn sigma(n: u64) -> u64 {
    (1..=n).filter(|d| n % d == 0).sum()
}

/// Largest margin by which any |c(n)|, 1 <= n <= n_max, exceeds its
/// envelope log(q)(1 + 2 deg_p0 + 4 sigma(n) q^n). Nonpositive when the
/// bound holds everywhere.
pub fn log_deriv_bound_defect(c: &[f64], q: u64, deg_p0: usize, n_max: usize) -> f64 {
    let logq = (q as f64).ln();
    let mut worst = f64::NEG_INFINITY;
    for n in 1..=n_max.min(c.len() - 1) {
        let envelope =
            logq * (1.0 + 2.0 * deg_p0 as f64 + 4.0 * sigma(n as u64) as f64 * (q as f64).powi(n as i32));
        worst = worst.max(c[n].abs() - envelope);
    }
    worst
}

/// Outcome of the explicit central-value bound: log|L(1/2)| against
/// 3m/(2h) plus the short logarithmic-derivative sum at s0 = 1/2 + 1/(h log q),
/// where h = ceil(log_q(m/2)).
#[derive(Clone, Debug, Serialize)]
pub struct CentralBoundReport {
    pub degree: usize,
    pub window: u64,
    pub s0: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub skipped: bool,
}

pub fn central_bound_check(l: &RankinL) -> Result<CentralBoundReport> {
    let m = l.degree;
    if m < 3 {
        return Ok(CentralBoundReport {
            degree: m,
            window: 0,
            s0: f64::NAN,
            lhs: f64::NAN,
            rhs: f64::NAN,
            holds: true,
            skipped: true,
        });
    }
    let qf = l.q as f64;
    let logq = qf.ln();
    let h = ((m as f64 / 2.0).ln() / logq - 1e-12).ceil().max(1.0) as u64;
    let s0 = 0.5 + 1.0 / (h as f64 * logq);
    let c = l.log_deriv_coeffs(h as usize)?;
    let mut sum = 0.0;
    for (n, cn) in c.iter().enumerate().skip(1) {
        sum += cn * ((h - n as u64) as f64 * logq) / (n as f64 * qf.powf(n as f64 * s0));
    }
    let rhs = 3.0 * m as f64 / (2.0 * h as f64) + sum / (h as f64 * logq * logq);
    let lhs = l.central_value().abs().ln();
    Ok(CentralBoundReport {
        degree: m,
        window: h,
        s0,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
        skipped: false,
    })
}

/// Re(1/(1 - e^(-t - i*theta)) - 1/2) = (1 - e^(-2t)) / (2 |1 - e^(-t-i*theta)|^2).
fn disc_kernel(theta: f64, t: f64) -> f64 {
    let r = (-t).exp();
    let denom = 1.0 - 2.0 * r * theta.cos() + r * r;
    (1.0 - r * r) / (2.0 * denom)
}

/// Closed form of the integral of the disc kernel over x in [0, t]:
/// t/2 + log|1 - e^(-t-i*theta)| - log|1 - e^(-i*theta)|.
fn disc_kernel_integral(theta: f64, t: f64) -> f64 {
    let edge = |s: f64| {
        let r = (-s).exp();
        0.5 * (1.0 - 2.0 * r * theta.cos() + r * r).ln()
    };
    t / 2.0 + edge(t) - edge(0.0)
}

/// Simpson quadrature of the same integral.
fn disc_kernel_integral_numeric(theta: f64, t: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let hstep = t / n as f64;
    let mut total = disc_kernel(theta, 0.0) + disc_kernel(theta, t);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        total += weight * disc_kernel(theta, i as f64 * hstep);
    }
    total * hstep / 3.0
}

/// The sharp theta-uniform constant c(t) with
/// integral >= c(t) * endpoint value: c(t) = 2 log(cosh(t/2)) / tanh(t/2),
/// attained exactly at theta = pi.
pub fn kernel_sharp_constant(t: f64) -> f64 {
    2.0 * (t / 2.0).cosh().ln() / (t / 2.0).tanh()
}

/// Quadrature sweep of the disc-kernel inequality over a deterministic
/// (theta, t) grid.
#[derive(Clone, Debug, Serialize)]
pub struct KernelInequalityReport {
    pub samples: usize,
    /// Smallest value of integral - c(t) * endpoint over the grid;
    /// nonnegative when the inequality holds everywhere sampled.
    pub worst_margin: f64,
    /// Largest gap between the closed form and Simpson quadrature.
    pub max_quadrature_gap: f64,
    /// |integral - c(t) * endpoint| at theta = pi, where equality is exact.
    pub equality_gap: f64,
}

pub fn kernel_inequality_report() -> KernelInequalityReport {
    let mut worst_margin = f64::INFINITY;
    let mut max_gap = 0.0f64;
    let mut samples = 0;
    for i in 0..10 {
        let theta = std::f64::consts::PI * (i + 1) as f64 / 10.0;
        for j in 0..10 {
            let t = 0.09 * (j + 1) as f64;
            let closed = disc_kernel_integral(theta, t);
            let numeric = disc_kernel_integral_numeric(theta, t, 200);
            max_gap = max_gap.max((closed - numeric).abs());
            let margin = closed - kernel_sharp_constant(t) * disc_kernel(theta, t);
            worst_margin = worst_margin.min(margin);
            samples += 1;
        }
    }
    let mut equality_gap = 0.0f64;
    for j in 0..10 {
        let t = 0.09 * (j + 1) as f64;
        let gap = disc_kernel_integral(std::f64::consts::PI, t)
            - kernel_sharp_constant(t) * disc_kernel(std::f64::consts::PI, t);
        equality_gap = equality_gap.max(gap.abs());
    }
    KernelInequalityReport {
        samples,
        worst_margin,
        max_quadrature_gap: max_gap,
        equality_gap,
    }
}

/// Pointwise sweep of the tail-weight inequality
/// y / |1 - y e^(-i*theta)|^2 <= (log q)^(-1) (s0 - 1/2)^(-1) Re(1/(1 - e^(i*theta)/y0))
/// with y = q^(s-1/2), y0 = q^(s0-1/2), over deterministic (theta, s0, s)
/// triples with s > s0 > 1/2.
#[derive(Clone, Debug, Serialize)]
pub struct TailInequalityReport {
    pub samples: usize,
    /// Smallest value of rhs - lhs; nonnegative when the bound holds.
    pub worst_margin: f64,
}

pub fn tail_inequality_report(q: u64) -> TailInequalityReport {
    let qf = q as f64;
    let logq = qf.ln();
    let mut worst = f64::INFINITY;
    let mut samples = 0;
    for i in 0..10 {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / 5.0;
        for &a in &[0.3, 0.7] {
            let s0 = 0.5 + a / logq;
            for &off in &[0.04, 0.2, 1.0, 5.0, 25.0] {
                let s = s0 + off;
                let y = qf.powf(s - 0.5);
                let lhs = y / ((1.0 - y * theta.cos()).powi(2) + (y * theta.sin()).powi(2));
                let y0 = qf.powf(s0 - 0.5);
                let z = Complex64::new(1.0, 0.0)
                    - Complex64::new(theta.cos(), theta.sin()) / y0;
                let rhs = (1.0 / z).re / (logq * (s0 - 0.5));
                worst = worst.min(rhs - lhs);
                samples += 1;
            }
        }
    }
    TailInequalityReport {
        samples,
        worst_margin: worst,
    }
}

/// Period ratios over the full character group of one scene: the squared
/// conjugate-twisted Weyl sums of the eigenform against the central values.
/// The ratio is character-free, so its relative spread measures the
/// consistency of both pipelines at once.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodRatioScan {
    pub ratios: Vec<f64>,
    pub central_values: Vec<f64>,
    pub weyl_norms: Vec<f64>,
    /// (max - min) / mean of the ratios.
    pub spread: f64,
    /// q^((deg D + 1)/2) divided by the mean ratio.
    pub petersson_norm: f64,
}

pub fn period_ratio_scan(scene: &GrossScene, family: &mut RankinFamily) -> Result<PeriodRatioScan> {
    if scene.set().algebra().p0() != family.sys.set.algebra().p0()
        || scene.set().algebra().q() != family.sys.set.algebra().q()
    {
        return Err(Error::domain(
            "the scene and the convolution family live over different algebras",
        ));
    }
    if scene.discriminant() != family.discriminant() {
        return Err(Error::domain(
            "the scene and the convolution family use different discriminants",
        ));
    }
    let (plus, _minus) = scene.tagged_orbits()?;
    let set = scene.set();
    // Weighted form values w_i * f(e_i), where the f(e_i) are normalized by
    // sum w_i f(e_i)^2 = 1; the orbit sum weights every landing by its
    // class weight.
    let weighted: Vec<f64> = family
        .form()
        .coords
        .iter()
        .zip(&set.classes)
        .map(|(c, class)| c * (class.weight as f64).sqrt())
        .collect();
    let divisors = scene.basis().elementary_divisors().to_vec();

    let mut ratios = Vec::new();
    let mut central_values = Vec::new();
    let mut weyl_norms = Vec::new();
    for chi in Character::all(scene.basis()) {
        let mut w = Complex64::new(0.0, 0.0);
        for (flat, &class) in plus.landing().iter().enumerate() {
            let coords = coords_from_flat(&divisors, flat);
            w += chi.value(&coords).conj() * weighted[class];
        }
        let wsq = w.norm_sqr();
        let l = family.polynomial(&chi)?;
        let central = l.central_value();
        if central < -1e-6 {
            return Err(Error::internal(
                "negative central value breaks the period identity",
            ));
        }
        central_values.push(central);
        weyl_norms.push(wsq);
        if wsq <= 1e-8 {
            if central.abs() > 1e-6 {
                return Err(Error::internal(
                    "vanishing period sum against a nonvanishing central value",
                ));
            }
            continue;
        }
        if central.abs() <= 1e-9 {
            return Err(Error::internal(
                "vanishing central value against a nonzero period sum",
            ));
        }
        ratios.push(wsq / central);
    }
    if ratios.is_empty() {
        return Err(Error::internal("every period sum vanished along the orbit"));
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max = ratios.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min = ratios.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let deg_d = scene.discriminant().deg();
    Ok(PeriodRatioScan {
        ratios,
        central_values,
        weyl_norms,
        spread: (max - min) / mean,
        petersson_norm: (scene.set().algebra().q() as f64).powf((deg_d as f64 + 1.0) / 2.0) / mean,
    })
}

/// Flat JSON row describing one computed convolution polynomial.
#[derive(Clone, Debug, Serialize)]
pub struct RankinReport {
    pub q: u64,
    pub p0: String,
    pub discriminant: String,
    pub chi_id: usize,
    pub form_id: usize,
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub central_value: f64,
    pub bound_lhs: f64,
    pub bound_rhs: f64,
    /// Detected degree against deg P0 + deg D.
    pub degree_ratio: f64,
}
