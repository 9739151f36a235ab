//! The restricted Clifford group over GF(q).
//!
//! A restricted Clifford unitary `U` conjugates `D_u` to a phase times
//! `D_{F u}` with `F` in SL(2, q). For odd `q` a closed-form `U_F` with
//! trivial phases exists; for even `q` we solve for it as the one-dimensional
//! intertwiner space of the displacements over an F_p-basis of `F_q^2`.
//! The collineation group (unitaries modulo global phase) is enumerated by a
//! breadth-first closure over two SL(2, q) lifts and two displacements.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement, FieldSpec, PhasePoint};
use crate::hw::HwGroup;
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::scalar::{modulus, tolerance, unit_phase, Real, C};

/// Largest q for which the group is enumerated.
pub const MAX_GROUP_Q: usize = 9;

/// Entrywise tolerance used when matching conjugates against displacements.
pub const CLIFFORD_TOL: f64 = 1e-8;

/// `[[alpha, beta], [gamma, delta]]` with determinant 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sl2Matrix {
    pub alpha: FieldElement,
    pub beta: FieldElement,
    pub gamma: FieldElement,
    pub delta: FieldElement,
}

impl Sl2Matrix {
    pub fn new(
        f: &Field,
        alpha: FieldElement,
        beta: FieldElement,
        gamma: FieldElement,
        delta: FieldElement,
    ) -> Result<Self> {
        if [alpha, beta, gamma, delta]
            .iter()
            .any(|e| e.tag() != f.tag())
        {
            return Err(Error::FieldMismatch);
        }
        let m = Self {
            alpha,
            beta,
            gamma,
            delta,
        };
        let det = m.det(f);
        if det != f.one() {
            return Err(Error::NotSl2(det.index() as u32));
        }
        Ok(m)
    }

    /// From element indices `[[a, b], [c, d]]`.
    pub fn from_indices(f: &Field, m: [[usize; 2]; 2]) -> Result<Self> {
        for row in m {
            for e in row {
                f.element(e as u64)?;
            }
        }
        Self::new(
            f,
            f.elem(m[0][0]),
            f.elem(m[0][1]),
            f.elem(m[1][0]),
            f.elem(m[1][1]),
        )
    }

    pub fn identity(f: &Field) -> Self {
        Self {
            alpha: f.one(),
            beta: f.zero(),
            gamma: f.zero(),
            delta: f.one(),
        }
    }

    pub fn det(&self, f: &Field) -> FieldElement {
        f.sub(f.mul(self.alpha, self.delta), f.mul(self.beta, self.gamma))
    }

    pub fn mul(&self, f: &Field, o: &Self) -> Self {
        Self {
            alpha: f.add(f.mul(self.alpha, o.alpha), f.mul(self.beta, o.gamma)),
            beta: f.add(f.mul(self.alpha, o.beta), f.mul(self.beta, o.delta)),
            gamma: f.add(f.mul(self.gamma, o.alpha), f.mul(self.delta, o.gamma)),
            delta: f.add(f.mul(self.gamma, o.beta), f.mul(self.delta, o.delta)),
        }
    }

    pub fn inverse(&self, f: &Field) -> Self {
        Self {
            alpha: self.delta,
            beta: f.neg(self.beta),
            gamma: f.neg(self.gamma),
            delta: self.alpha,
        }
    }

    /// `F u` for a column vector `u`.
    pub fn apply(&self, f: &Field, u: PhasePoint) -> PhasePoint {
        PhasePoint {
            u1: f.add(f.mul(self.alpha, u.u1), f.mul(self.beta, u.u2)),
            u2: f.add(f.mul(self.gamma, u.u1), f.mul(self.delta, u.u2)),
        }
    }

    pub fn indices(&self) -> [[usize; 2]; 2] {
        [
            [self.alpha.index(), self.beta.index()],
            [self.gamma.index(), self.delta.index()],
        ]
    }

    /// Uniformly random element of SL(2, q).
    pub fn random(f: &Field, rng: &mut impl rand::Rng) -> Self {
        let q = f.q();
        loop {
            let m = [
                [rng.random_range(0..q), rng.random_range(0..q)],
                [rng.random_range(0..q), rng.random_range(0..q)],
            ];
            if let Ok(s) = Self::from_indices(f, m) {
                return s;
            }
        }
    }
}

impl fmt::Debug for Sl2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.indices())
    }
}

/// Two generators of SL(2, q): `diag(nu, nu^-1)` and `[[-1, 1], [-1, 0]]`
/// for q > 3, `[[1, 1], [0, 1]]` and `[[0, 1], [-1, 0]]` for q = 2, 3.
pub fn sl2_generators(f: &Field) -> (Sl2Matrix, Sl2Matrix) {
    let (zero, one) = (f.zero(), f.one());
    let minus_one = f.neg(one);
    if f.q() <= 3 {
        (
            Sl2Matrix {
                alpha: one,
                beta: one,
                gamma: zero,
                delta: one,
            },
            Sl2Matrix {
                alpha: zero,
                beta: one,
                gamma: minus_one,
                delta: zero,
            },
        )
    } else {
        let nu = f.primitive_element();
        let nu_inv = f.inv(nu).expect("primitive element is nonzero");
        (
            Sl2Matrix {
                alpha: nu,
                beta: zero,
                gamma: zero,
                delta: nu_inv,
            },
            Sl2Matrix {
                alpha: minus_one,
                beta: one,
                gamma: minus_one,
                delta: zero,
            },
        )
    }
}

/// Closure of a set of SL(2, q) matrices under multiplication.
pub fn sl2_closure(f: &Field, gens: &[Sl2Matrix]) -> Vec<Sl2Matrix> {
    let id = Sl2Matrix::identity(f);
    let mut seen: HashSet<Sl2Matrix> = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(m) = queue.pop_front() {
        for g in gens {
            let next = g.mul(f, &m);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    out
}

/// Closed-form `U_F` for odd q, satisfying `U_F D_u U_F^dagger = D_{F u}`:
///
/// * `beta = 0`: `sum_x |alpha x> tau^{tr(alpha gamma x^2)} <x|`
/// * `beta != 0`: `q^{-1/2} sum_{x,y} |x> tau^{tr[beta^{-1}(alpha y^2 - 2xy + delta x^2)]} <y|`
pub fn appleby_unitary<T: Real>(hw: &HwGroup<T>, m: &Sl2Matrix) -> Result<CMatrix<T>> {
    let f = hw.field();
    if f.p() == 2 {
        return Err(Error::EvenCharacteristic(f.q() as u64));
    }
    let det = m.det(f);
    if det != f.one() {
        return Err(Error::NotSl2(det.index() as u32));
    }
    let q = f.q();
    let ring = hw.ring();
    let mut u = CMatrix::zeros(q, q);
    if m.beta.is_zero() {
        let ag = f.mul(m.alpha, m.gamma);
        for x in f.elements() {
            let e = f.trace(f.mul(ag, f.mul(x, x)));
            u[(f.mul(m.alpha, x).index(), x.index())] = ring.tau_pow(e as i64);
        }
    } else {
        let beta_inv = f.inv(m.beta)?;
        let two = f.from_int(2);
        let norm = T::one() / T::from_usize_lossy(q).sqrt();
        for x in f.elements() {
            for y in f.elements() {
                let quad = f.add(
                    f.sub(f.mul(m.alpha, f.mul(y, y)), f.mul(two, f.mul(x, y))),
                    f.mul(m.delta, f.mul(x, x)),
                );
                let e = f.trace(f.mul(beta_inv, quad));
                u[(x.index(), y.index())] = ring.tau_pow(e as i64).scale(norm);
            }
        }
    }
    Ok(u)
}

/// F_p-basis of `F_q^2`: `(x^k, 0)` and `(0, x^k)` for `k < n`.
pub fn prime_basis_points(f: &Field) -> Vec<PhasePoint> {
    let basis = f.prime_basis();
    basis
        .iter()
        .map(|&e| PhasePoint {
            u1: e,
            u2: f.zero(),
        })
        .chain(basis.iter().map(|&e| PhasePoint {
            u1: f.zero(),
            u2: e,
        }))
        .collect()
}

/// Finds a unitary `U` with `U D_b U^dagger = c_b D_{F b}` on an F_p-basis.
///
/// For each basis label the admissible phases `c_b` are the `2p`-th roots of
/// unity compatible with `D_b^p` and `D_{F b}^p`; assignments are tried in
/// lexicographic order and the first one whose intertwiner space is
/// one-dimensional is taken. The result is checked against every label and
/// returned with its global phase fixed as in [`normalize_phase`].
pub fn synthesize_unitary<T: Real>(hw: &HwGroup<T>, m: &Sl2Matrix) -> Result<CMatrix<T>> {
    let f = hw.field();
    let det = m.det(f);
    if det != f.one() {
        return Err(Error::NotSl2(det.index() as u32));
    }
    let q = f.q();
    let p = f.p() as i64;
    let ring = hw.ring();
    let basis = prime_basis_points(f);

    let candidates: Vec<Vec<i64>> = basis
        .iter()
        .map(|&b| {
            let s_b = hw.get(b).power_p_exponent(p as u32) as i64;
            let s_fb = hw.get(m.apply(f, b)).power_p_exponent(p as u32) as i64;
            (0..2 * p)
                .filter(|k| (k * p - (s_b - s_fb)).rem_euclid(2 * p) == 0)
                .collect()
        })
        .collect();

    let n = q * q;
    let mut choice = vec![0usize; basis.len()];
    loop {
        let mut gram = CMatrix::<T>::zeros(n, n);
        for (bi, &b) in basis.iter().enumerate() {
            let db = hw.get(b);
            let dfb = hw.get(m.apply(f, b));
            let c = ring.zeta_pow(candidates[bi][choice[bi]]);
            let mut inv = vec![0usize; q];
            for (k, &row) in dfb.perm.iter().enumerate() {
                inv[row] = k;
            }
            for (i, &k) in inv.iter().enumerate() {
                let y = -(c * ring.zeta_pow(dfb.zeta_exps[k] as i64));
                for j in 0..q {
                    let x = ring.zeta_pow(db.zeta_exps[j] as i64);
                    let col_a = i * q + db.perm[j];
                    let col_b = k * q + j;
                    let mut terms: [(usize, C<T>); 2] = [(col_a, x), (col_b, y)];
                    let count = if col_a == col_b {
                        terms[0].1 = x + y;
                        1
                    } else {
                        2
                    };
                    for (ca, va) in &terms[..count] {
                        for (cb, vb) in &terms[..count] {
                            gram[(*ca, *cb)] = gram[(*ca, *cb)] + va.conj() * *vb;
                        }
                    }
                }
            }
        }
        let eig = hermitian_eigen(&gram);
        let scale = eig.values.last().copied().unwrap_or(T::one()).max(T::one());
        let tiny = tolerance::<T>(1e-9) * scale;
        if eig.values[0].abs() <= tiny && (n == 1 || eig.values[1] > T::lit(1e-6) * scale) {
            let v = eig.vectors.column(0);
            let s = T::from_usize_lossy(q).sqrt();
            let mut u = CMatrix::from_fn(q, q, |i, j| v[i * q + j].scale(s));
            // Newton-Schulz steps towards the nearest unitary
            for _ in 0..2 {
                let correction = &CMatrix::identity(q).scale_real(T::lit(3.0)) - &u.adjoint_mul(&u);
                u = u.matmul(&correction).scale_real(T::lit(0.5));
            }
            let u = normalize_phase(&u);
            if u.unitarity_residual() > tolerance::<T>(CLIFFORD_TOL) {
                return Err(Error::SynthesisFailed(format!(
                    "solution for {m:?} is not unitary"
                )));
            }
            let res = conjugation_residual(hw, &u, m);
            if res > tolerance::<T>(CLIFFORD_TOL) {
                return Err(Error::SynthesisFailed(format!(
                    "solution for {m:?} misses the conjugation contract by {res}"
                )));
            }
            return Ok(u);
        }
        // next assignment in mixed radix
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return Err(Error::SynthesisFailed(format!(
                    "no phase assignment gives a unique intertwiner for {m:?}"
                )));
            }
            choice[pos] += 1;
            if choice[pos] < candidates[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Largest over all labels `u` of `min_c max |U D_u U^dagger - c D_{F u}|`.
pub fn conjugation_residual<T: Real>(hw: &HwGroup<T>, u: &CMatrix<T>, m: &Sl2Matrix) -> T {
    let f = hw.field();
    f.points()
        .map(|pt| conjugation_residual_at(hw, u, m, pt))
        .fold(T::zero(), T::max)
}

/// Conjugation residual for one label.
pub fn conjugation_residual_at<T: Real>(
    hw: &HwGroup<T>,
    u: &CMatrix<T>,
    m: &Sl2Matrix,
    pt: PhasePoint,
) -> T {
    let f = hw.field();
    let conj = u.matmul(&hw.get(pt).matrix).matmul(&u.adjoint());
    let target = &hw.get(m.apply(f, pt)).matrix;
    let c = target.inner(&conj).unscale(T::from_usize_lossy(f.q()));
    // a unit phase is required, not just any scalar
    conj.max_abs_diff(&target.scale(unit_phase(c)))
        .max((modulus(c) - T::one()).abs())
}

/// Symplectic map induced by a Clifford unitary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InducedMap {
    /// F_q-linear, so a restricted Clifford element.
    Restricted(Sl2Matrix),
    /// Only F_p-linear: images of the F_p-basis from [`prime_basis_points`].
    FpLinear(Vec<(PhasePoint, PhasePoint)>),
}

/// Recovers the label map of `u` by conjugating the F_p-basis displacements.
pub fn induced_symplectic<T: Real>(hw: &HwGroup<T>, u: &CMatrix<T>) -> Result<InducedMap> {
    let f = hw.field();
    let q = f.q();
    if u.rows() != q || u.cols() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            got: u.rows(),
        });
    }
    let tol = tolerance::<T>(CLIFFORD_TOL);
    let mut images = Vec::new();
    for b in prime_basis_points(f) {
        let conj = u.matmul(&hw.get(b).matrix).matmul(&u.adjoint());
        let (v, c, res) = hw
            .identify(&conj)
            .ok_or_else(|| Error::NotClifford("empty matrix".into()))?;
        if res > tol || (modulus(c) - T::one()).abs() > tol {
            return Err(Error::NotClifford(format!(
                "conjugate of D{b:?} is not a displacement (residual {res})"
            )));
        }
        images.push((b, v));
    }
    let e1 = images[0].1;
    let e2 = images[f.n() as usize].1;
    let candidate = Sl2Matrix {
        alpha: e1.u1,
        beta: e2.u1,
        gamma: e1.u2,
        delta: e2.u2,
    };
    let linear = images.iter().all(|&(b, v)| candidate.apply(f, b) == v);
    if linear && candidate.det(f) == f.one() {
        Ok(InducedMap::Restricted(candidate))
    } else {
        Ok(InducedMap::FpLinear(images))
    }
}

/// Divides out the phase of the largest-modulus entry (first in row-major
/// order among entries within `1e-6` of the maximum).
pub fn normalize_phase<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let data = m.as_slice();
    let max = data.iter().fold(T::zero(), |acc, &z| acc.max(modulus(z)));
    let cut = max - T::lit(1e-6);
    match data.iter().find(|&&z| modulus(z) >= cut) {
        Some(&pivot) if max > T::zero() => m.scale(unit_phase(pivot).conj()),
        _ => m.clone(),
    }
}

/// Hashable fingerprint of a matrix modulo global phase: the phase-normalized
/// entries rounded to six decimals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MatrixFingerprint(Box<[i32]>);

pub fn matrix_fingerprint<T: Real>(m: &CMatrix<T>) -> MatrixFingerprint {
    fingerprint_normalized(&normalize_phase(m))
}

fn fingerprint_normalized<T: Real>(m: &CMatrix<T>) -> MatrixFingerprint {
    let round = |v: T| (v.as_f64() * 1e6).round() as i32;
    MatrixFingerprint(
        m.as_slice()
            .iter()
            .flat_map(|z| [round(z.re), round(z.im)])
            .collect(),
    )
}

/// One collineation of the restricted Clifford group.
#[derive(Clone, Debug)]
pub struct CliffordElement<T: Real> {
    pub symplectic: Sl2Matrix,
    /// `v` with `unitary ~ D_v R_F`, where `R_F` is the reference lift of the
    /// label: the closed form for odd q, the first product carrying the label
    /// found by the search for even q.
    pub displacement_part: PhasePoint,
    /// Phase-normalized, see [`normalize_phase`].
    pub unitary: CMatrix<T>,
    /// Generator indices; the unitary is `G[w0] G[w1] ... G[wk]` up to phase.
    pub word: Vec<u8>,
}

/// Generator names in word order.
pub const GENERATOR_NAMES: [&str; 4] = ["S1", "S2", "X", "Z"];

/// The enumerated collineation group, sorted by fingerprint.
#[derive(Clone, Debug)]
pub struct GroupTable<T: Real> {
    hw: HwGroup<T>,
    pub generators: Vec<CMatrix<T>>,
    pub generator_labels: Vec<Sl2Matrix>,
    pub elements: Vec<CliffordElement<T>>,
    references: HashMap<Sl2Matrix, CMatrix<T>>,
    index: HashMap<(Sl2Matrix, PhasePoint), usize>,
}

/// `q^3 (q^2 - 1)`.
pub fn restricted_clifford_order(q: usize) -> usize {
    q * q * q * (q * q - 1)
}

/// The two SL(2, q) generator lifts: closed form for odd q, synthesized otherwise.
pub fn generator_unitaries<T: Real>(hw: &HwGroup<T>) -> Result<(Vec<CMatrix<T>>, Vec<Sl2Matrix>)> {
    let f = hw.field();
    let (g1, g2) = sl2_generators(f);
    let lift = |m: &Sl2Matrix| {
        if f.p() == 2 {
            synthesize_unitary(hw, m)
        } else {
            appleby_unitary(hw, m).map(|u| normalize_phase(&u))
        }
    };
    let id = Sl2Matrix::identity(f);
    Ok((
        vec![
            lift(&g1)?,
            lift(&g2)?,
            hw.get(f.point(1, 0)).matrix.clone(),
            hw.get(f.point(0, 1)).matrix.clone(),
        ],
        vec![g1, g2, id, id],
    ))
}

/// Reference lift `R_F` of a label: the closed form for odd q (phase-normalized).
fn closed_form_reference<T: Real>(hw: &HwGroup<T>, label: &Sl2Matrix) -> Result<CMatrix<T>> {
    appleby_unitary(hw, label).map(|u| normalize_phase(&u))
}

/// `v` with `u ~ D_v r`, if `u r^dagger` is a displacement up to a unit phase.
fn displacement_against<T: Real>(
    hw: &HwGroup<T>,
    u: &CMatrix<T>,
    r: &CMatrix<T>,
) -> Option<PhasePoint> {
    let tol = tolerance::<T>(CLIFFORD_TOL);
    match hw.identify(&u.matmul(&r.adjoint())) {
        Some((v, c, res)) if res <= tol && (modulus(c) - T::one()).abs() <= tol => Some(v),
        _ => None,
    }
}

/// Breadth-first closure over the four generators modulo global phase.
///
/// A collineation is determined by its label `F` and its displacement part
/// `v`, so those exact integers key the dedup. Every new element is stored as
/// the phase-normalized product `D_v R_F`, which keeps rounding error from
/// growing with the search depth.
pub fn enumerate_group<T: Real>(hw: &HwGroup<T>) -> Result<GroupTable<T>> {
    let f = hw.field();
    let q = f.q();
    if q > MAX_GROUP_Q {
        return Err(Error::UnsupportedQ(q as u64));
    }
    let (generators, labels) = generator_unitaries(hw)?;
    let expected = restricted_clifford_order(q);
    let budget = 2 * expected;
    let even = f.p() == 2;

    struct Node<T: Real> {
        unitary: CMatrix<T>,
        label: Sl2Matrix,
        part: PhasePoint,
        word: Vec<u8>,
        fp: MatrixFingerprint,
    }

    let id_label = Sl2Matrix::identity(f);
    let id = CMatrix::identity(q);
    let mut references: HashMap<Sl2Matrix, CMatrix<T>> = HashMap::from([(id_label, id.clone())]);
    let origin = f.point(0, 0);
    let mut nodes = vec![Node {
        fp: fingerprint_normalized(&id),
        unitary: id,
        label: id_label,
        part: origin,
        word: Vec::new(),
    }];
    let mut index: HashMap<(Sl2Matrix, PhasePoint), usize> =
        HashMap::from([((id_label, origin), 0)]);
    let mut frontier = vec![0usize];

    let (gens, labs) = (&generators, &labels);
    while !frontier.is_empty() {
        let products: Vec<(usize, u8, Sl2Matrix, CMatrix<T>)> = frontier
            .par_iter()
            .flat_map_iter(|&i| {
                let node = &nodes[i];
                gens.iter().enumerate().map(move |(g, gen)| {
                    (
                        i,
                        g as u8,
                        labs[g].mul(f, &node.label),
                        gen.matmul(&node.unitary),
                    )
                })
            })
            .collect();
        // new labels get a reference; for even q the first product seen with the label
        for (_, _, label, u) in &products {
            if !references.contains_key(label) {
                let r = if even {
                    normalize_phase(u)
                } else {
                    closed_form_reference(hw, label)?
                };
                references.insert(*label, r);
            }
        }
        let parts: Vec<Option<PhasePoint>> = products
            .par_iter()
            .map(|(_, _, label, u)| displacement_against(hw, u, &references[label]))
            .collect();
        let mut next = Vec::new();
        for ((parent, g, label, _), part) in products.into_iter().zip(parts) {
            let Some(part) = part else {
                return Err(Error::NotClifford(format!(
                    "product of generator {g} and word {:?} is not D_v R_F",
                    nodes[parent].word
                )));
            };
            if index.contains_key(&(label, part)) {
                continue;
            }
            if nodes.len() >= budget {
                return Err(Error::BudgetExceeded { budget });
            }
            let mut word = Vec::with_capacity(nodes[parent].word.len() + 1);
            word.push(g);
            word.extend_from_slice(&nodes[parent].word);
            index.insert((label, part), nodes.len());
            next.push(nodes.len());
            nodes.push(Node {
                unitary: CMatrix::zeros(0, 0),
                label,
                part,
                word,
                fp: MatrixFingerprint(Box::new([])),
            });
        }
        let fresh: Vec<(CMatrix<T>, MatrixFingerprint)> = next
            .par_iter()
            .map(|&i| {
                let u = normalize_phase(
                    &hw.get(nodes[i].part)
                        .matrix
                        .matmul(&references[&nodes[i].label]),
                );
                let fp = fingerprint_normalized(&u);
                (u, fp)
            })
            .collect();
        for (&i, (u, fp)) in next.iter().zip(fresh) {
            nodes[i].unitary = u;
            nodes[i].fp = fp;
        }
        next.sort_by(|&a, &b| nodes[a].fp.cmp(&nodes[b].fp));
        frontier = next;
    }

    nodes.sort_by(|a, b| a.fp.cmp(&b.fp));
    let mut elements = Vec::with_capacity(nodes.len());
    let mut index = HashMap::with_capacity(nodes.len());
    for (i, node) in nodes.into_iter().enumerate() {
        index.insert((node.label, node.part), i);
        elements.push(CliffordElement {
            symplectic: node.label,
            displacement_part: node.part,
            unitary: node.unitary,
            word: node.word,
        });
    }
    Ok(GroupTable {
        hw: hw.clone(),
        generators,
        generator_labels: labels,
        elements,
        references,
        index,
    })
}

impl<T: Real> GroupTable<T> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn hw(&self) -> &HwGroup<T> {
        &self.hw
    }

    pub fn field(&self) -> &Field {
        self.hw.field()
    }

    pub fn dim(&self) -> usize {
        self.hw.dim()
    }

    /// Position of a unitary in the table, modulo global phase. The label and
    /// displacement part locate the candidate, which must then match `u` up to
    /// a unit phase.
    pub fn lookup(&self, u: &CMatrix<T>) -> Option<usize> {
        let InducedMap::Restricted(label) = induced_symplectic(&self.hw, u).ok()? else {
            return None;
        };
        let part = displacement_against(&self.hw, u, self.references.get(&label)?)?;
        let i = *self.index.get(&(label, part))?;
        let (res, c) = self.elements[i].unitary.phase_aligned_residual(u);
        let tol = tolerance::<T>(CLIFFORD_TOL);
        (res <= tol && (modulus(c) - T::one()).abs() <= tol).then_some(i)
    }

    /// Reference lift `R_F` used for the displacement parts.
    pub fn reference(&self, label: &Sl2Matrix) -> Option<&CMatrix<T>> {
        self.references.get(label)
    }

    pub fn contains(&self, u: &CMatrix<T>) -> bool {
        self.lookup(u).is_some()
    }

    pub fn identity_index(&self) -> usize {
        self.lookup(&CMatrix::identity(self.dim()))
            .expect("identity is always enumerated")
    }

    /// Product of the generators along a word.
    pub fn evaluate_word(&self, word: &[u8]) -> CMatrix<T> {
        word.iter().fold(CMatrix::identity(self.dim()), |acc, &g| {
            acc.matmul(&self.generators[g as usize])
        })
    }

    pub fn export(&self, dump_matrices: bool) -> GroupTableFile {
        let f = self.field();
        GroupTableFile {
            q: f.q(),
            field: f.spec(),
            order: self.len(),
            expected_order: restricted_clifford_order(f.q()),
            generators: GENERATOR_NAMES
                .iter()
                .zip(&self.generator_labels)
                .zip(&self.generators)
                .map(|((name, label), u)| GeneratorRecord {
                    name: name.to_string(),
                    symplectic: label.indices(),
                    matrix: dump_matrices.then(|| u.to_pairs()),
                })
                .collect(),
            elements: self
                .elements
                .iter()
                .map(|e| ElementRecord {
                    symplectic: e.symplectic.indices(),
                    displacement: e.displacement_part.indices(),
                    word: e.word.clone(),
                    matrix: dump_matrices.then(|| e.unitary.to_pairs()),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub name: String,
    pub symplectic: [[usize; 2]; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementRecord {
    pub symplectic: [[usize; 2]; 2],
    pub displacement: [usize; 2],
    pub word: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

/// JSON form of a [`GroupTable`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupTableFile {
    pub q: usize,
    pub field: FieldSpec,
    pub order: usize,
    pub expected_order: usize,
    pub generators: Vec<GeneratorRecord>,
    pub elements: Vec<ElementRecord>,
}

/// A unit scalar `e^{i theta}` times the identity, for planting phase tests.
pub fn phase_times<T: Real>(m: &CMatrix<T>, theta: f64) -> CMatrix<T> {
    m.scale(Complex::new(T::lit(theta.cos()), T::lit(theta.sin())))
}
