//! Brandt matrices and their eigenforms.
//!
//! The entry B(T)_ij counts lattice points: with I_i, I_j integral class
//! representatives and M = conj(I_j) * I_i, it is the number of x in M
//! whose reduced norm generates T * nrd(I_i) * nrd(I_j), divided by the
//! unit order w_j (q - 1) of the left order of M. The raw counts are
//! symmetric in (i, j) because conjugation swaps them, so the matrix
//! S_ij = counts_ij / ((q-1) sqrt(w_i w_j)) is symmetric, and B has row
//! sums |T| + 1 away from the ramified place.
//!
//! Counting uses the degree identity of reduced bases. For a quaternary
//! lattice the coefficient box grows quickly with the norm degree, so the
//! counter first looks for an exact orthogonal splitting M = L1 + L2 into
//! rank-two blocks. Each block's norm values are tabulated once per degree
//! bound and targets are answered by convolving the two tables, which
//! turns a q^(2T)-size sweep into two q^T sweeps. When no rank-two
//! splitting exists the counter falls back to a 1 + 3 splitting and
//! finally to a direct walk of the full box.

use std::collections::HashMap;

use crate::classes::ClassSet;
use crate::error::{Error, Result};
use crate::irred::{monic_irreducibles, poly_code, poly_from_code};
use crate::lattice::{hnf_rows, reduce_quats, QLattice, ReducedBasis};
use crate::poly::Poly;
use crate::quat::Quat;

/// Counts elements of a fixed integral lattice by exact norm value.
pub struct NormCounter {
    shape: CounterShape,
    q: u64,
}

enum CounterShape {
    Split {
        blocks: [ReducedBasis; 2],
        tables: Option<(usize, Vec<u32>, Vec<u32>)>,
    },
    Flat(ReducedBasis),
}

impl NormCounter {
    /// Builds a counter for the integral lattice `m`.
    pub fn new(m: &QLattice) -> Result<NormCounter> {
        if !m.is_integral() {
            return Err(Error::internal("norm counter needs an integral lattice"));
        }
        let q = m.algebra().q();
        let reduced = m.reduced_basis()?;
        if let Some(blocks) = orthogonal_split(m, &reduced)? {
            return Ok(NormCounter {
                shape: CounterShape::Split {
                    blocks,
                    tables: None,
                },
                q,
            });
        }
        Ok(NormCounter {
            shape: CounterShape::Flat(reduced),
            q,
        })
    }

    /// Number of lattice elements with nrd = lambda * target over all
    /// scalars lambda in F_q^x, for a monic target.
    pub fn count_norm_class(&mut self, target: &Poly) -> Result<u64> {
        debug_assert!(target.is_monic());
        let q = self.q;
        let mut total = 0u64;
        for lambda in 1..q {
            total += self.count_exact(&target.mul_scalar(lambda))?;
        }
        Ok(total)
    }

    fn count_exact(&mut self, target: &Poly) -> Result<u64> {
        let deg = target.deg();
        let q = self.q;
        match &mut self.shape {
            CounterShape::Split { blocks, tables } => {
                let rebuild = match tables {
                    Some((built, _, _)) => *built < deg,
                    None => true,
                };
                if rebuild {
                    let t0 = block_table(&blocks[0], deg, q)?;
                    let t1 = block_table(&blocks[1], deg, q)?;
                    *tables = Some((deg, t0, t1));
                }
                let (_, t0, t1) = tables.as_ref().expect("tables built");
                let tcode = poly_code(target);
                let mut total = 0u64;
                for (vcode, &count) in t0.iter().enumerate() {
                    if count == 0 {
                        continue;
                    }
                    let rest = code_sub(tcode, vcode as u64, q);
                    if let Some(&other) = t1.get(rest as usize) {
                        total += count as u64 * other as u64;
                    }
                }
                Ok(total)
            }
            CounterShape::Flat(reduced) => {
                let counts = reduced.norm_counts(deg)?;
                Ok(counts.get(&poly_code(target)).copied().unwrap_or(0))
            }
        }
    }
}

/// Digit-wise difference of polynomial codes over F_q.
fn code_sub(a: u64, b: u64, q: u64) -> u64 {
    let mut a = a;
    let mut b = b;
    let mut out = 0u64;
    let mut place = 1u64;
    while a > 0 || b > 0 {
        let da = a % q;
        let db = b % q;
        out += ((da + q - db) % q) * place;
        place *= q;
        a /= q;
        b /= q;
    }
    out
}

/// Table of norm values on a rank <= 2 block, indexed by polynomial code,
/// covering all elements of norm degree at most `max_deg` (zero included).
fn block_table(block: &ReducedBasis, max_deg: usize, q: u64) -> Result<Vec<u32>> {
    let mut table = vec![0u32; (q as usize).pow(max_deg as u32 + 1)];
    let rank = block.rank();
    let nrds: Vec<Poly> = (0..rank).map(|g| {
        let v = block.vector(g);
        v.nrd_numerator()
    }).collect();
    let pair01 = if rank == 2 {
        block.vector(0).pair(&block.vector(1))
    } else {
        Poly::zero(q)
    };
    let slots = |n: &Poly| -> u64 {
        if n.deg() > max_deg {
            1
        } else {
            q.pow(((max_deg - n.deg()) / 2 + 1) as u32)
        }
    };
    let size0 = slots(&nrds[0]);
    let size1 = if rank == 2 { slots(&nrds[1]) } else { 1 };
    for c0 in 0..size0 {
        let p0 = poly_from_code(q, c0);
        let v0 = p0.mul(&p0).mul(&nrds[0]);
        for c1 in 0..size1 {
            let value = if rank == 2 {
                let p1 = poly_from_code(q, c1);
                let mut v = v0.add(&p1.mul(&p1).mul(&nrds[1]));
                if !pair01.is_zero() && !p0.is_zero() && !p1.is_zero() {
                    v = v.add(&p0.mul(&p1).mul(&pair01));
                }
                v
            } else {
                v0.clone()
            };
            debug_assert!(value.is_zero() || value.deg() <= max_deg);
            table[poly_code(&value) as usize] += 1;
        }
    }
    Ok(table)
}

/// Tries to split the lattice as an exact orthogonal sum of two rank-two
/// sublattices, returning their reduced bases.
fn orthogonal_split(m: &QLattice, reduced: &ReducedBasis) -> Result<Option<[ReducedBasis; 2]>> {
    let basis: Vec<Quat> = (0..4).map(|g| reduced.vector(g)).collect();
    for g in 0..4 {
        for h in (g + 1)..4 {
            let l2 = pairing_kernel(m, &[basis[g].clone(), basis[h].clone()])?;
            if l2.len() != 2 {
                continue;
            }
            let l1 = pairing_kernel(m, &l2)?;
            if l1.len() != 2 {
                continue;
            }
            // The two blocks must recover the whole lattice.
            let mut gens = l1.clone();
            gens.extend(l2.iter().cloned());
            let sum = QLattice::from_generators(m.algebra(), &gens);
            let Ok(sum) = sum else { continue };
            if sum != *m {
                continue;
            }
            debug_assert!(l1
                .iter()
                .all(|u| l2.iter().all(|v| u.pair(v).is_zero())));
            let b1 = reduce_quats(l1)?;
            let b2 = reduce_quats(l2)?;
            return Ok(Some([b1, b2]));
        }
    }
    Ok(None)
}

/// Sublattice of `m` orthogonal (under the norm pairing) to every element
/// of `us`, as integral elements.
fn pairing_kernel(m: &QLattice, us: &[Quat]) -> Result<Vec<Quat>> {
    let q = m.algebra().q();
    let basis = m.scaled_basis();
    // Coordinate rows of the current kernel, starting from the full space.
    let mut rows: Vec<Vec<Poly>> = (0..4)
        .map(|g| {
            let mut r = vec![Poly::zero(q); 4];
            r[g] = Poly::one(q);
            r
        })
        .collect();
    for u in us {
        // Value of the pairing against u on each current generator.
        let values: Vec<Poly> = rows
            .iter()
            .map(|r| {
                let mut x = m.algebra().zero();
                for (c, b) in r.iter().zip(&basis) {
                    if c.is_zero() {
                        continue;
                    }
                    x = x.add(&b.scale(c, &Poly::one(q)).expect("unit denominator"));
                }
                x.pair(u)
            })
            .collect();
        let kernel = crate::lattice::linear_form_kernel(q, &values);
        rows = kernel
            .iter()
            .map(|lam| {
                let mut combo = vec![Poly::zero(q); 4];
                for (l, r) in lam.iter().zip(&rows) {
                    for c in 0..4 {
                        combo[c] = combo[c].add(&l.mul(&r[c]));
                    }
                }
                combo
            })
            .collect();
        rows = hnf_rows(rows);
    }
    Ok(rows
        .iter()
        .map(|r| {
            let mut x = m.algebra().zero();
            for (c, b) in r.iter().zip(&basis) {
                if c.is_zero() {
                    continue;
                }
                x = x.add(&b.scale(c, &Poly::one(q)).expect("unit denominator"));
            }
            x
        })
        .collect())
}

/// Pair data reused across Brandt computations: the integral product
/// lattice, its monic norm, and a counter.
struct PairCounter {
    counter: NormCounter,
    norm: Poly,
}

fn pair_counter(set: &ClassSet, i: usize, j: usize) -> Result<PairCounter> {
    let m = set.classes[j].ideal.conj().mul(&set.classes[i].ideal)?;
    if !m.is_integral() {
        return Err(Error::internal("product of integral ideals is not integral"));
    }
    let (norm, nd) = m.nrd();
    debug_assert!(nd.is_one());
    Ok(PairCounter {
        counter: NormCounter::new(&m)?,
        norm,
    })
}

/// The Brandt matrix B(T) as exact integers.
pub fn brandt_matrix(set: &ClassSet, t: &Poly) -> Result<Vec<Vec<u64>>> {
    if !t.is_monic() || !crate::irred::is_irreducible(t) {
        return Err(Error::domain(
            "Brandt matrices are indexed by monic irreducible norms",
        ));
    }
    let q = set.algebra().q();
    let n = set.len();
    let ramified = t == set.algebra().p0();
    let mut counts = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut pc = pair_counter(set, i, j)?;
            let target = t.mul(&pc.norm);
            let c = pc.counter.count_norm_class(&target)?;
            counts[i][j] = c;
            counts[j][i] = c;
        }
    }
    let mut matrix = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let unit_order = set.classes[j].weight * (q - 1);
            if counts[i][j] % unit_order != 0 {
                return Err(Error::internal(
                    "lattice point count not divisible by the unit order",
                ));
            }
            matrix[i][j] = counts[i][j] / unit_order;
        }
    }
    let expected_row_sum = if ramified {
        1
    } else {
        t.q().pow(t.deg() as u32) + 1
    };
    for row in &matrix {
        let sum: u64 = row.iter().sum();
        if sum != expected_row_sum {
            return Err(Error::internal(format!(
                "Brandt row sum {sum} differs from {expected_row_sum}",
            )));
        }
    }
    Ok(matrix)
}

/// Symmetric model S = W^(-1/2) B W^(1/2) of a Brandt matrix.
pub fn symmetric_model(set: &ClassSet, matrix: &[Vec<u64>]) -> Vec<Vec<f64>> {
    let n = set.len();
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let wi = set.classes[i].weight as f64;
            let wj = set.classes[j].weight as f64;
            s[i][j] = matrix[i][j] as f64 * (wj / wi).sqrt();
        }
    }
    s
}

/// One Hecke eigenform in the symmetric model: a unit eigenvector of every
/// Brandt matrix at once.
#[derive(Clone, Debug)]
pub struct EigenForm {
    /// Components of the unit vector in the symmetric model.
    pub coords: Vec<f64>,
    /// Whether this is the Eisenstein (Perron) vector.
    pub eisenstein: bool,
}

impl EigenForm {
    /// Index of the component of largest absolute value.
    pub fn anchor(&self) -> usize {
        let mut best = 0;
        for (i, c) in self.coords.iter().enumerate() {
            if c.abs() > self.coords[best].abs() {
                best = i;
            }
        }
        best
    }
}

/// Simultaneous eigenbasis of the Brandt family, refined across prime
/// norms of increasing degree until every eigenvalue cluster is simple.
pub fn eigenbasis(set: &ClassSet) -> Result<Vec<EigenForm>> {
    let q = set.algebra().q();
    let n = set.len();
    let mut ts: Vec<Poly> = Vec::new();
    for degree in 1..=3 {
        ts.extend(
            monic_irreducibles(q, degree)
                .into_iter()
                .filter(|t| t != set.algebra().p0()),
        );
    }
    let first = symmetric_model(set, &brandt_matrix(set, &ts[0])?);
    let (mut values, mut vectors) = jacobi_eigen(&first);
    sort_eigenpairs(&mut values, &mut vectors);
    let mut clusters = cluster(&values);

    for t in &ts[1..] {
        if clusters.iter().all(|c| c.len() == 1) {
            break;
        }
        let s = symmetric_model(set, &brandt_matrix(set, t)?);
        let mut new_clusters = Vec::new();
        for c in &clusters {
            if c.len() == 1 {
                new_clusters.push(c.clone());
                continue;
            }
            // Project S onto the cluster subspace and rediagonalize there.
            let k = c.len();
            let mut small = vec![vec![0.0; k]; k];
            for (a, &ia) in c.iter().enumerate() {
                for (b, &ib) in c.iter().enumerate() {
                    let mut acc = 0.0;
                    for p in 0..n {
                        for r in 0..n {
                            acc += vectors[ia][p] * s[p][r] * vectors[ib][r];
                        }
                    }
                    small[a][b] = acc;
                }
            }
            let (mut sub_values, sub_vectors) = jacobi_eigen(&small);
            let mut rotated: Vec<Vec<f64>> = Vec::with_capacity(k);
            for v in &sub_vectors {
                let mut w = vec![0.0; n];
                for (a, &ia) in c.iter().enumerate() {
                    for p in 0..n {
                        w[p] += v[a] * vectors[ia][p];
                    }
                }
                rotated.push(w);
            }
            let mut perm: Vec<usize> = (0..k).collect();
            perm.sort_by(|&a, &b| sub_values[b].partial_cmp(&sub_values[a]).expect("finite"));
            let base = new_clusters.iter().map(|c: &Vec<usize>| c.len()).sum::<usize>();
            sub_values = perm.iter().map(|&p| sub_values[p]).collect();
            for (offset, &p) in perm.iter().enumerate() {
                vectors[base + offset] = rotated[p].clone();
            }
            for sub in cluster(&sub_values) {
                new_clusters.push(sub.iter().map(|&x| base + x).collect());
            }
        }
        clusters = new_clusters;
    }
    if clusters.iter().any(|c| c.len() > 1) {
        return Err(Error::internal(
            "eigenvalue clusters stayed degenerate through degree three",
        ));
    }

    // Canonical signs and Eisenstein detection.
    let mass: f64 = (0..n).map(|i| 1.0 / set.classes[i].weight as f64).sum();
    let eis: Vec<f64> = (0..n)
        .map(|i| 1.0 / (set.classes[i].weight as f64).sqrt() / mass.sqrt())
        .collect();
    let mut forms = Vec::with_capacity(n);
    for v in vectors.iter_mut() {
        let anchor = (0..n)
            .max_by(|&a, &b| v[a].abs().partial_cmp(&v[b].abs()).expect("finite"))
            .expect("nonempty");
        if v[anchor] < 0.0 {
            for c in v.iter_mut() {
                *c = -*c;
            }
        }
        let overlap: f64 = v.iter().zip(&eis).map(|(a, b)| a * b).sum();
        forms.push(EigenForm {
            coords: v.clone(),
            eisenstein: overlap.abs() > 0.99,
        });
    }
    if forms.iter().filter(|f| f.eisenstein).count() != 1 {
        return Err(Error::internal("expected exactly one Eisenstein form"));
    }
    Ok(forms)
}

fn cluster(values: &[f64]) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if let Some(last) = clusters.last_mut() {
            let prev = values[*last.last().expect("nonempty")];
            if (prev - v).abs() <= 1e-8 * (1.0 + prev.abs()) {
                last.push(i);
                continue;
            }
        }
        clusters.push(vec![i]);
    }
    clusters
}

fn sort_eigenpairs(values: &mut Vec<f64>, vectors: &mut Vec<Vec<f64>>) {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite"));
    *values = perm.iter().map(|&p| values[p]).collect();
    *vectors = perm.iter().map(|&p| vectors[p].clone()).collect();
}

/// Cyclic Jacobi diagonalization of a symmetric matrix. Returns the
/// eigenvalues and the corresponding orthonormal eigenvectors (as rows).
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = matrix
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &x| m.max(x.abs()))
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for r in (p + 1)..n {
                off = off.max(a[p][r].abs());
            }
        }
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                if a[p][r].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * a[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let apk = a[p][k];
                    let ark = a[r][k];
                    a[p][k] = c * apk - s * ark;
                    a[r][k] = s * apk + c * ark;
                }
                for k in 0..n {
                    let akp = a[k][p];
                    let akr = a[k][r];
                    a[k][p] = c * akp - s * akr;
                    a[k][r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let vpk = v[p][k];
                    let vrk = v[r][k];
                    v[p][k] = c * vpk - s * vrk;
                    v[r][k] = s * vpk + c * vrk;
                }
            }
        }
    }
    let values: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    (values, v)
}

/// Hecke eigenvalue extraction from a single matrix row, with cached
/// counters per class pair. The anchor row is fixed per ladder.
pub struct HeckeLadder<'a> {
    set: &'a ClassSet,
    anchor: usize,
    pairs: Vec<PairCounter>,
    rows: HashMap<u64, Vec<u64>>,
}

impl<'a> HeckeLadder<'a> {
    pub fn new(set: &'a ClassSet, anchor: usize) -> Result<HeckeLadder<'a>> {
        let pairs = (0..set.len())
            .map(|j| pair_counter(set, anchor, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(HeckeLadder {
            set,
            anchor,
            pairs,
            rows: HashMap::new(),
        })
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    /// Raw counts of the anchor row of B(T)'s numerator.
    fn count_row(&mut self, t: &Poly) -> Result<Vec<u64>> {
        let code = poly_code(t);
        if let Some(row) = self.rows.get(&code) {
            return Ok(row.clone());
        }
        let mut row = Vec::with_capacity(self.set.len());
        for pc in &mut self.pairs {
            let target = t.mul(&pc.norm);
            row.push(pc.counter.count_norm_class(&target)?);
        }
        self.rows.insert(code, row.clone());
        Ok(row)
    }

    /// Eigenvalue of B(T) on an eigenform, via the anchor component.
    pub fn eigenvalue(&mut self, t: &Poly, form: &EigenForm) -> Result<f64> {
        let q = self.set.algebra().q();
        let row = self.count_row(t)?;
        let wi = self.set.classes[self.anchor].weight as f64;
        let mut acc = 0.0;
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let wj = self.set.classes[j].weight as f64;
            acc += c as f64 / ((q - 1) as f64 * (wi * wj).sqrt()) * form.coords[j];
        }
        let pivot = form.coords[self.anchor];
        if pivot.abs() < 1e-9 {
            return Err(Error::internal("eigenform vanishes at the ladder anchor"));
        }
        Ok(acc / pivot)
    }
}
