//! Certification of projective 2-designs, SICs, MUBs, tight frames and
//! unitary 2-designs. Every check reports a max-norm residual and passes iff
//! that residual is within the tolerance.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::GroupTable;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{czero, norm_sqr, Real, C};
use crate::states::{PureState, StateSet};

pub const DEFAULT_TOL: f64 = 1e-8;
const MAX_DETAILS: usize = 16;
/// Exhaustive pairwise frame potential is limited to q <= this.
pub const MAX_EXHAUSTIVE_Q: usize = 5;
/// The full twirl tensor has d^8 entries; limited to d <= this.
pub const MAX_TWIRL_DIM: usize = 5;
/// Number of random pairs in sampled frame-potential mode.
pub const DEFAULT_SAMPLED_PAIRS: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub test: String,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    /// Named scalar results (constants, counts, scalings).
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
    /// Conditions worth calling out that are not failures by themselves.
    #[serde(default)]
    pub flags: Vec<String>,
    /// A bounded list of the worst violations.
    #[serde(default)]
    pub details: Vec<String>,
}

impl DesignReport {
    fn new(test: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            test: test.into(),
            pass: residual <= tolerance,
            residual,
            tolerance,
            metrics: BTreeMap::new(),
            flags: Vec::new(),
            details: Vec::new(),
        }
    }

    fn metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.into(), value);
        self
    }

    fn detail(&mut self, msg: String) {
        if self.details.len() < MAX_DETAILS {
            self.details.push(msg);
        }
    }
}

/// Sum of `f(item)` over fixed-size chunks, combined in chunk order so the
/// floating-point result does not depend on the thread count.
fn chunked_sum<I: Sync, A: Send>(
    items: &[I],
    chunk: usize,
    zero: impl Fn() -> A + Sync,
    add_item: impl Fn(&mut A, &I) + Sync,
    merge: impl Fn(&mut A, A),
) -> A {
    let partials: Vec<A> = items
        .par_chunks(chunk.max(1))
        .map(|c| {
            let mut acc = zero();
            for item in c {
                add_item(&mut acc, item);
            }
            acc
        })
        .collect();
    let mut total = zero();
    for p in partials {
        merge(&mut total, p);
    }
    total
}

/// Unordered pairs `(a, b)` with `a <= b`, in a fixed order.
fn sym_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect()
}

/// `T = sum_j (|psi_j><psi_j|)^{(x)2}` against `c P_sym` with `c = 2N / (d(d+1))`.
///
/// Both operators are supported on the symmetric subspace and their entries
/// only depend on unordered index pairs, so the comparison runs over those.
pub fn check_2design<T: Real>(set: &StateSet<T>, tol: f64) -> Result<DesignReport> {
    let d = set.dim()?;
    let n = set.len();
    let pairs = sym_pairs(d);
    let m = pairs.len();
    // upper triangle of the m x m block, row-major
    let tri = m * (m + 1) / 2;
    let sums = chunked_sum(
        &set.states,
        256,
        || vec![czero::<T>(); tri],
        |acc, s| {
            let a = s.amplitudes();
            let w: Vec<C<T>> = pairs.iter().map(|&(x, y)| a[x] * a[y]).collect();
            let mut k = 0;
            for i in 0..m {
                let wi = w[i];
                for wj in &w[i..] {
                    acc[k] = acc[k] + wi * wj.conj();
                    k += 1;
                }
            }
        },
        |total, part| {
            for (t, p) in total.iter_mut().zip(part) {
                *t = *t + p;
            }
        },
    );
    let constant = 2.0 * n as f64 / (d * (d + 1)) as f64;
    let mut residual = 0.0f64;
    let mut worst = (0, 0);
    let mut k = 0;
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for j in i..m {
            let target = if i != j {
                0.0
            } else if a == b {
                constant
            } else {
                constant / 2.0
            };
            let dev = (sums[k] - Complex::new(T::lit(target), T::zero()))
                .norm()
                .as_f64();
            if dev > residual {
                residual = dev;
                worst = (i, j);
            }
            k += 1;
        }
    }
    let mut r = DesignReport::new("design2", residual, tol)
        .metric("constant", constant)
        .metric("states", n as f64)
        .metric("dim", d as f64);
    if !r.pass {
        r.detail(format!(
            "largest deviation at pair-indices {:?} / {:?}",
            pairs[worst.0], pairs[worst.1]
        ));
    }
    if r.pass && n < d * d {
        r.flags
            .push("fewer than d^2 states cannot form a 2-design".into());
    }
    Ok(r)
}

/// Pairwise squared overlaps `1/(d+1)` and exactly `d^2` states.
pub fn check_sic<T: Real>(set: &StateSet<T>, tol: f64) -> Result<DesignReport> {
    let d = set.dim()?;
    let n = set.len();
    let target = 1.0 / (d + 1) as f64;
    let mut residual = 0.0f64;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let o = set.states[i].overlap(&set.states[j]).as_f64();
            let dev = (o - target).abs();
            residual = residual.max(dev);
            if dev > tol && violations.len() < MAX_DETAILS {
                violations.push(format!("|<{i}|{j}>|^2 = {o}"));
            }
        }
    }
    let count_ok = n == d * d;
    if !count_ok {
        residual = residual.max(1.0);
    }
    let mut r = DesignReport::new("sic", residual, tol)
        .metric("states", n as f64)
        .metric("dim", d as f64)
        .metric("target_overlap", target);
    if !count_ok {
        r.detail(format!("CountMismatch: {n} states, a SIC needs {}", d * d));
    }
    for v in violations {
        r.detail(v);
    }
    Ok(r)
}

/// Orthonormal bases of size `d` with all cross-basis squared overlaps `1/d`.
pub fn check_mub<T: Real>(set: &StateSet<T>, tol: f64) -> Result<DesignReport> {
    let d = set.dim()?;
    let bases = set.bases()?;
    if let Some(b) = bases.iter().find(|b| b.len() != d) {
        return Err(Error::BadGrouping(format!(
            "basis of size {} in dimension {d}",
            b.len()
        )));
    }
    let target = 1.0 / d as f64;
    let mut ortho = 0.0f64;
    let mut cross = 0.0f64;
    let mut details = Vec::new();
    for (bi, basis) in bases.iter().enumerate() {
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                let v = a.inner(b);
                ortho = ortho.max(
                    (v - Complex::new(T::lit(expected), T::zero()))
                        .norm()
                        .as_f64(),
                );
            }
        }
        for (bj, other) in bases.iter().enumerate().skip(bi + 1) {
            for a in basis.iter() {
                for b in other.iter() {
                    let o = a.overlap(b).as_f64();
                    let dev = (o - target).abs();
                    if dev > tol && details.len() < MAX_DETAILS {
                        details.push(format!("bases {bi}/{bj}: overlap {o}"));
                    }
                    cross = cross.max(dev);
                }
            }
        }
    }
    let count = bases.len();
    let mut r = DesignReport::new("mub", ortho.max(cross), tol)
        .metric("bases", count as f64)
        .metric("max_bases", (d + 1) as f64)
        .metric("orthonormality_residual", ortho)
        .metric("unbiasedness_residual", cross)
        .metric("complete", if count == d + 1 { 1.0 } else { 0.0 });
    if count < d + 1 {
        r.flags
            .push(format!("incomplete: {count} of {} bases", d + 1));
    }
    if count > d + 1 {
        r.flags
            .push(format!("{count} bases exceed the maximum of {}", d + 1));
    }
    for msg in details {
        r.detail(msg);
    }
    Ok(r)
}

/// `sum_j P_j = (N/d) I`.
pub fn check_tight_frame<T: Real>(set: &StateSet<T>, tol: f64) -> Result<DesignReport> {
    let d = set.dim()?;
    let n = set.len();
    let sum = chunked_sum(
        &set.states,
        256,
        || CMatrix::<T>::zeros(d, d),
        |acc, s| {
            let a = s.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    acc[(i, j)] = acc[(i, j)] + a[i] * a[j].conj();
                }
            }
        },
        |total, part| *total = &*total + &part,
    );
    let bound = n as f64 / d as f64;
    let residual = sum
        .max_abs_diff(&CMatrix::identity(d).scale_real(T::lit(bound)))
        .as_f64();
    let mut r = DesignReport::new("frame", residual, tol)
        .metric("frame_bound", bound)
        .metric("povm_scaling", d as f64 / n as f64);
    if n < d {
        r.detail(format!("{n} states cannot span dimension {d}"));
    }
    Ok(r)
}

/// Runs a check by its command-line name.
pub fn run_check<T: Real>(name: &str, set: &StateSet<T>, tol: f64) -> Result<DesignReport> {
    match name {
        "design2" => check_2design(set, tol),
        "sic" => check_sic(set, tol),
        "mub" => check_mub(set, tol),
        "frame" => check_tight_frame(set, tol),
        other => Err(Error::Malformed(format!(
            "unknown test {other:?}; expected mub, design2, sic or frame"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FramePotential {
    pub value: f64,
    pub mode: String,
    pub pairs: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standard_error: Option<f64>,
}

/// `(1/K^2) sum_{i,j} |tr(U_i^dagger U_j)|^4`, exhaustively.
pub fn frame_potential<T: Real>(unitaries: &[CMatrix<T>]) -> FramePotential {
    let k = unitaries.len();
    let rows: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|i| {
            let ui = &unitaries[i];
            let mut row = norm_sqr(ui.inner(ui)).as_f64().powi(2);
            for uj in &unitaries[i + 1..] {
                row += 2.0 * norm_sqr(ui.inner(uj)).as_f64().powi(2);
            }
            row
        })
        .collect();
    let total: f64 = rows.iter().sum();
    FramePotential {
        value: total / (k * k) as f64,
        mode: "exhaustive".into(),
        pairs: (k * k) as u64,
        standard_error: None,
    }
}

/// Frame potential of a group table; exhaustive only for `q <= 5`.
pub fn unitary_2design_potential<T: Real>(g: &GroupTable<T>) -> Result<FramePotential> {
    if g.dim() > MAX_EXHAUSTIVE_Q {
        return Err(Error::TooLarge(format!(
            "{} elements; use sampled mode for q > {MAX_EXHAUSTIVE_Q}",
            g.len()
        )));
    }
    let us: Vec<CMatrix<T>> = g.elements.iter().map(|e| e.unitary.clone()).collect();
    Ok(frame_potential(&us))
}

/// Frame potential of a group from `(1/K) sum_U |tr U|^4`. Right-multiplying
/// by a fixed element permutes a group, so the pairwise double sum collapses
/// to a single sum; this is exact at every supported q.
pub fn group_frame_potential<T: Real>(g: &GroupTable<T>) -> FramePotential {
    let terms: Vec<f64> = g
        .elements
        .par_iter()
        .map(|e| norm_sqr(e.unitary.trace()).as_f64().powi(2))
        .collect();
    let k = terms.len();
    FramePotential {
        value: terms.iter().sum::<f64>() / k as f64,
        mode: "group".into(),
        pairs: k as u64,
        standard_error: None,
    }
}

/// Frame potential from uniformly random ordered pairs, with its standard error.
pub fn unitary_2design_potential_sampled<T: Real>(
    g: &GroupTable<T>,
    pairs: u64,
    rng: &mut impl Rng,
) -> FramePotential {
    let k = g.len();
    let draws: Vec<(usize, usize)> = (0..pairs)
        .map(|_| (rng.random_range(0..k), rng.random_range(0..k)))
        .collect();
    let values: Vec<f64> = draws
        .par_iter()
        .map(|&(i, j)| {
            norm_sqr(g.elements[i].unitary.inner(&g.elements[j].unitary))
                .as_f64()
                .powi(2)
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    FramePotential {
        value: mean,
        mode: "sampled".into(),
        pairs,
        standard_error: Some((var / n).sqrt()),
    }
}

/// Direct two-fold twirl check: for every matrix unit `A = |ab><cd|` on the
/// bipartite space, `(1/K) sum (U(x)U) A (U(x)U)^dagger` is compared with the
/// Haar twirl `alpha I + beta SWAP`.
pub fn unitary_2design_twirl<T: Real>(unitaries: &[CMatrix<T>], tol: f64) -> Result<DesignReport> {
    let d = unitaries
        .first()
        .map(|u| u.rows())
        .ok_or(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        })?;
    if d > MAX_TWIRL_DIM {
        return Err(Error::TooLarge(format!(
            "twirl tensor for d = {d} has d^8 entries"
        )));
    }
    let d2 = d * d;
    let d4 = d2 * d2;
    // moment[(i a j b), (k c l d)] = sum_U U_ia U_jb conj(U_kc U_ld)
    let moment = chunked_sum(
        unitaries,
        16,
        || vec![czero::<T>(); d4 * d4],
        |acc, u| {
            let mut w = Vec::with_capacity(d4);
            for i in 0..d {
                for a in 0..d {
                    for j in 0..d {
                        for b in 0..d {
                            w.push(u[(i, a)] * u[(j, b)]);
                        }
                    }
                }
            }
            for (x, &wx) in w.iter().enumerate() {
                let row = &mut acc[x * d4..(x + 1) * d4];
                for (r, wy) in row.iter_mut().zip(&w) {
                    *r = *r + wx * wy.conj();
                }
            }
        },
        |total, part| {
            for (t, p) in total.iter_mut().zip(part) {
                *t = *t + p;
            }
        },
    );
    let k = unitaries.len() as f64;
    let dd = d as f64;
    let denom = dd * dd - 1.0;
    let idx = |i: usize, a: usize, j: usize, b: usize| ((i * d + a) * d + j) * d + b;
    let mut residual = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    // A = |a b><c e|
                    let tr_a = if a == c && b == e { 1.0 } else { 0.0 };
                    let tr_as = if c == b && e == a { 1.0 } else { 0.0 };
                    let alpha = (tr_a - tr_as / dd) / denom;
                    let beta = (tr_as - tr_a / dd) / denom;
                    for i in 0..d {
                        for j in 0..d {
                            for kk in 0..d {
                                for l in 0..d {
                                    let got =
                                        moment[idx(i, a, j, b) * d4 + idx(kk, c, l, e)] / T::lit(k);
                                    let want = alpha * f64::from((i == kk && j == l) as u8)
                                        + beta * f64::from((i == l && j == kk) as u8);
                                    residual = residual.max(
                                        (got - Complex::new(T::lit(want), T::zero()))
                                            .norm()
                                            .as_f64(),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(DesignReport::new("unitary_twirl", residual, tol)
        .metric("elements", k)
        .metric("dim", dd))
}

/// Largest deviation of any state from unit norm; used to sanity-check input files.
pub fn max_norm_deviation<T: Real>(states: &[PureState<T>]) -> f64 {
    states
        .iter()
        .map(|s| {
            (s.amplitudes()
                .iter()
                .map(|&z| norm_sqr(z))
                .sum::<T>()
                .sqrt()
                - T::one())
            .abs()
            .as_f64()
        })
        .fold(0.0, f64::max)
}
