//! Pure states modulo phase, the canonical MUB and the Hesse SIC.

use std::collections::HashMap;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldSpec};
use crate::hw::{maximal_abelian_subgroup, HwGroup};
use crate::linalg::{dot, joint_eigenbasis, normalized, CMatrix};
use crate::scalar::{modulus, norm_sqr, tolerance, unit_phase, Real, C};

/// Entries below this modulus are skipped when fixing the gauge.
pub const GAUGE_EPS: f64 = 1e-9;

/// Eigenvalue clustering tolerance for joint diagonalization.
pub const EIGEN_TOL: f64 = 1e-8;

/// Unit vector whose first entry of modulus above [`GAUGE_EPS`] is real positive.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T: Real> {
    amplitudes: Vec<C<T>>,
}

impl<T: Real> PureState<T> {
    /// Normalizes and gauge-fixes `amplitudes`.
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self> {
        let mut amplitudes = normalized(&amplitudes)?;
        let eps = T::lit(GAUGE_EPS);
        if let Some(&pivot) = amplitudes.iter().find(|&&z| modulus(z) > eps) {
            let phase = unit_phase(pivot).conj();
            for z in &mut amplitudes {
                *z = *z * phase;
            }
            // the pivot is real positive by construction; drop rounding residue
            if let Some(z) = amplitudes.iter_mut().find(|z| modulus(**z) > eps) {
                *z = Complex::new(modulus(*z), T::zero());
            }
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut a = vec![Complex::new(T::zero(), T::zero()); dim];
        a[k] = Complex::new(T::one(), T::zero());
        Self { amplitudes: a }
    }

    /// Haar-random state: normalized vector of independent complex Gaussians.
    pub fn random(dim: usize, rng: &mut impl Rng) -> Self {
        loop {
            let a: Vec<C<T>> = (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex::new(T::lit(re), T::lit(im))
                })
                .collect();
            if let Ok(s) = Self::new(a) {
                return s;
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        dot(&self.amplitudes, &other.amplitudes)
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &Self) -> T {
        norm_sqr(self.inner(other))
    }

    pub fn apply(&self, u: &CMatrix<T>) -> Result<Self> {
        Self::new(u.matvec(&self.amplitudes))
    }

    pub fn scaled(&self, phase: C<T>) -> Vec<C<T>> {
        self.amplitudes.iter().map(|&z| z * phase).collect()
    }

    pub fn projector(&self) -> CMatrix<T> {
        let a = &self.amplitudes;
        CMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj())
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.amplitudes
            .iter()
            .map(|z| [z.re.as_f64(), z.im.as_f64()])
            .collect()
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&[re, im]| Complex::new(T::lit(re), T::lit(im)))
                .collect(),
        )
    }
}

/// Fingerprint of a state modulo phase: gauge-fixed amplitudes rounded to six
/// decimals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateFingerprint(Box<[i32]>);

pub fn fingerprint<T: Real>(s: &PureState<T>) -> StateFingerprint {
    // re-gauge in case the amplitudes were produced elsewhere
    let fixed = PureState::new(s.amplitudes.clone()).unwrap_or_else(|_| s.clone());
    let round = |v: T| (v.as_f64() * 1e6).round() as i32;
    StateFingerprint(
        fixed
            .amplitudes
            .iter()
            .flat_map(|z| [round(z.re), round(z.im)])
            .collect(),
    )
}

/// How a state in a [`StateSet`] came about.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateLabel {
    Basis { basis: usize, index: usize },
    Word(Vec<u8>),
    Index(usize),
}

/// An ordered set of states, distinct modulo phase, optionally grouped into bases.
#[derive(Clone, Debug)]
pub struct StateSet<T: Real> {
    pub q: usize,
    pub field: Option<FieldSpec>,
    pub states: Vec<PureState<T>>,
    pub labels: Vec<StateLabel>,
    /// Sizes of consecutive groups (bases); `None` for a flat set.
    pub grouping: Option<Vec<usize>>,
    pub provenance: String,
}

impl<T: Real> StateSet<T> {
    pub fn flat(q: usize, states: Vec<PureState<T>>, provenance: impl Into<String>) -> Self {
        let labels = (0..states.len()).map(StateLabel::Index).collect();
        Self {
            q,
            field: None,
            states,
            labels,
            grouping: None,
            provenance: provenance.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Dimension of the states (all states must agree).
    pub fn dim(&self) -> Result<usize> {
        let d = self.states.first().map(|s| s.dim()).unwrap_or(self.q);
        if let Some(s) = self.states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
        Ok(d)
    }

    /// Consecutive slices according to the grouping.
    pub fn bases(&self) -> Result<Vec<&[PureState<T>]>> {
        let grouping = self
            .grouping
            .as_ref()
            .ok_or_else(|| Error::BadGrouping("state set is not grouped into bases".into()))?;
        if grouping.iter().sum::<usize>() != self.states.len() {
            return Err(Error::BadGrouping(format!(
                "group sizes {grouping:?} do not add up to {} states",
                self.states.len()
            )));
        }
        let mut out = Vec::with_capacity(grouping.len());
        let mut start = 0;
        for &g in grouping {
            out.push(&self.states[start..start + g]);
            start += g;
        }
        Ok(out)
    }

    /// Whether no two states coincide modulo phase.
    pub fn is_distinct(&self) -> bool {
        let mut index = StateIndex::new();
        self.states.iter().all(|s| index.insert(s).1)
    }

    pub fn projectors(&self) -> Vec<CMatrix<T>> {
        self.states.iter().map(|s| s.projector()).collect()
    }
}

/// Joint eigenbases of the `q + 1` ray subgroups, in ray order.
///
/// Within a basis, states are sorted by their eigenvalue tuple over the
/// subgroup elements, each eigenvalue recorded as its exponent `k` in
/// `e^{i pi k / p}`.
pub fn canonical_mub<T: Real>(hw: &HwGroup<T>) -> Result<StateSet<T>> {
    let f = hw.field();
    let q = f.q();
    let p = f.p() as f64;
    let tol = tolerance::<T>(EIGEN_TOL);
    let mut states = Vec::with_capacity(q * (q + 1));
    let mut labels = Vec::with_capacity(q * (q + 1));
    for (b, ray) in f.rays().iter().enumerate() {
        let group = maximal_abelian_subgroup(hw, ray);
        let ops: Vec<CMatrix<T>> = group.matrices().into_iter().skip(1).collect();
        let basis = joint_eigenbasis(&ops, tol)?;
        if basis.len() != q {
            return Err(Error::DegeneracyUnresolved(q - basis.len() + 1));
        }
        let mut keyed: Vec<(Vec<i64>, PureState<T>)> = basis
            .into_iter()
            .map(|je| {
                let key = je
                    .values
                    .iter()
                    .map(|l| {
                        let angle = l.im.as_f64().atan2(l.re.as_f64());
                        ((angle * p / std::f64::consts::PI).round() as i64).rem_euclid(2 * p as i64)
                    })
                    .collect();
                Ok((key, PureState::new(je.vector)?))
            })
            .collect::<Result<_>>()?;
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        for (i, (_, s)) in keyed.into_iter().enumerate() {
            states.push(s);
            labels.push(StateLabel::Basis { basis: b, index: i });
        }
    }
    Ok(StateSet {
        q,
        field: Some(f.spec()),
        states,
        labels,
        grouping: Some(vec![q; q + 1]),
        provenance: format!("canonical MUB, q = {q}"),
    })
}

/// `(0, 1, -1) / sqrt(2)`.
pub fn hesse_fiducial<T: Real>() -> PureState<T> {
    let s = T::lit(0.5).sqrt();
    PureState::new(vec![
        Complex::new(T::zero(), T::zero()),
        Complex::new(s, T::zero()),
        Complex::new(-s, T::zero()),
    ])
    .expect("unit vector")
}

/// The nine states `D_u |fiducial>` over `u` in `F_3^2`.
pub fn hesse_sic<T: Real>() -> StateSet<T> {
    let f = Field::new(3, 1).expect("GF(3)");
    let hw = HwGroup::<T>::new(&f);
    let fid = hesse_fiducial::<T>();
    let mut index = StateIndex::new();
    let mut states = Vec::new();
    let mut labels = Vec::new();
    for d in hw.all() {
        let s = PureState::new(d.apply(hw.ring(), fid.amplitudes())).expect("unitary image");
        if index.insert(&s).1 {
            labels.push(StateLabel::Index(d.point.index(3)));
            states.push(s);
        }
    }
    StateSet {
        q: 3,
        field: Some(f.spec()),
        states,
        labels,
        grouping: None,
        provenance: "Hesse SIC".into(),
    }
}

const INDEX_GRID: f64 = 1e-4;
const INDEX_COORDS: usize = 3;
/// Two states are identified when `1 - |<a|b>|^2` is below this.
pub const SAME_STATE_TOL: f64 = 1e-9;

/// Dedup structure for states modulo phase.
///
/// States are bucketed by the rounded moduli of their first few amplitudes
/// (phase-invariant), neighbouring buckets are probed, and candidates are
/// confirmed by fidelity. Unlike hashing a rounded fingerprint this never
/// splits one state across a rounding boundary.
#[derive(Clone, Debug, Default)]
pub struct StateIndex<T: Real> {
    buckets: HashMap<Vec<i64>, Vec<usize>>,
    states: Vec<PureState<T>>,
}

impl<T: Real> StateIndex<T> {
    pub fn new() -> Self {
        Self {
            buckets: HashMap::new(),
            states: Vec::new(),
        }
    }

    fn key(s: &PureState<T>) -> Vec<i64> {
        s.amplitudes
            .iter()
            .take(INDEX_COORDS)
            .map(|&z| (norm_sqr(z).as_f64() / INDEX_GRID).floor() as i64)
            .collect()
    }

    pub fn find(&self, s: &PureState<T>) -> Option<usize> {
        let key = Self::key(s);
        let k = key.len();
        let one = T::one();
        let tol = tolerance::<T>(SAME_STATE_TOL);
        for code in 0..3usize.pow(k as u32) {
            let mut probe = key.clone();
            let mut c = code;
            for slot in probe.iter_mut() {
                *slot += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(list) = self.buckets.get(&probe) {
                for &i in list {
                    if one - self.states[i].overlap(s) <= tol {
                        return Some(i);
                    }
                }
            }
        }
        None
    }

    /// Inserts if absent; returns the position and whether it was new.
    pub fn insert(&mut self, s: &PureState<T>) -> (usize, bool) {
        if let Some(i) = self.find(s) {
            return (i, false);
        }
        let i = self.states.len();
        self.buckets.entry(Self::key(s)).or_default().push(i);
        self.states.push(s.clone());
        (i, true)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[PureState<T>] {
        &self.states
    }

    pub fn into_states(self) -> Vec<PureState<T>> {
        self.states
    }
}

/// Whether two sets contain the same states modulo phase.
pub fn same_state_sets<T: Real>(a: &[PureState<T>], b: &[PureState<T>]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut index = StateIndex::new();
    for s in a {
        index.insert(s);
    }
    index.len() == a.len() && b.iter().all(|s| index.find(s).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ORDERS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

    fn mub(q: u64) -> (HwGroup<f64>, StateSet<f64>) {
        let hw = HwGroup::new(&Field::of_order(q).unwrap());
        let m = canonical_mub(&hw).unwrap();
        (hw, m)
    }

    #[test]
    fn gauge_is_canonical() {
        let s = PureState::<f64>::new(vec![
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 3.0),
            Complex::new(4.0, 0.0),
        ])
        .unwrap();
        assert_eq!(s.amplitudes()[1], Complex::new(0.6, 0.0));
        assert!((s.amplitudes()[2] - Complex::new(0.0, -0.8)).norm() < 1e-15);
        assert!(matches!(
            PureState::<f64>::new(vec![Complex::new(0.0, 0.0); 3]),
            Err(Error::ZeroState)
        ));
    }

    #[test]
    fn fingerprint_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = PureState::<f64>::random(5, &mut rng);
        for theta in [0.3, 1.0, -2.5, std::f64::consts::PI] {
            let rotated = PureState::new(s.scaled(Complex::from_polar(1.0, theta))).unwrap();
            assert_eq!(fingerprint(&rotated), fingerprint(&s));
        }
        assert_ne!(
            fingerprint(&PureState::<f64>::basis(2, 0)),
            fingerprint(&PureState::<f64>::basis(2, 1))
        );
    }

    #[test]
    fn qubit_mub() {
        let (_, m) = mub(2);
        assert_eq!(m.len(), 6);
        let s = 0.5f64.sqrt();
        let expect = |v: [C<f64>; 2]| {
            m.states
                .iter()
                .any(|st| 1.0 - st.overlap(&PureState::new(v.to_vec()).unwrap()) < 1e-12)
        };
        let c = |re, im| Complex::new(re, im);
        for v in [
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0)],
            [c(s, 0.0), c(s, 0.0)],
            [c(s, 0.0), c(-s, 0.0)],
            [c(s, 0.0), c(0.0, s)],
            [c(s, 0.0), c(0.0, -s)],
        ] {
            assert!(expect(v));
        }
    }

    #[test]
    fn mub_structure_all_q() {
        for q in ORDERS {
            let (hw, m) = mub(q);
            let qn = q as usize;
            assert_eq!(m.len(), qn * (qn + 1));
            let bases = m.bases().unwrap();
            let f = hw.field();
            for (b, ray) in f.rays().iter().enumerate() {
                // eigenvector of every subgroup element
                for s in bases[b] {
                    for pt in &ray.points {
                        let v = hw.get(*pt).apply(hw.ring(), s.amplitudes());
                        let lambda = dot(s.amplitudes(), &v);
                        let res = v
                            .iter()
                            .zip(s.amplitudes())
                            .map(|(a, b)| (a - lambda * b).norm())
                            .fold(0.0, f64::max);
                        assert!(res < 1e-9 && (lambda.norm() - 1.0).abs() < 1e-9);
                    }
                }
                for (i, a) in bases[b].iter().enumerate() {
                    for (j, c) in bases[b].iter().enumerate() {
                        let expected = if i == j { 1.0 } else { 0.0 };
                        assert!((a.inner(c).norm() - expected).abs() < 1e-10);
                    }
                }
            }
            for (x, bx) in bases.iter().enumerate() {
                for by in &bases[x + 1..] {
                    for a in bx.iter() {
                        for c in by.iter() {
                            assert!((a.overlap(c) - 1.0 / q as f64).abs() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn z_ray_basis_is_computational() {
        for q in ORDERS {
            let (hw, m) = mub(q);
            let z_ray = hw
                .field()
                .rays()
                .iter()
                .position(|r| r.representative.indices() == [0, 1])
                .unwrap();
            let bases = m.bases().unwrap();
            for s in bases[z_ray] {
                assert!(s.amplitudes().iter().filter(|z| z.norm() > 1e-9).count() == 1);
            }
        }
    }

    #[test]
    fn hw_acts_transitively_on_each_basis() {
        let (hw, m) = mub(5);
        let bases = m.bases().unwrap();
        for basis in &bases {
            let start = &basis[0];
            let mut index = StateIndex::new();
            for d in hw.all() {
                index.insert(&PureState::new(d.apply(hw.ring(), start.amplitudes())).unwrap());
            }
            assert!(same_state_sets(index.states(), basis));
        }
    }

    #[test]
    fn recomputed_with_reversed_elements_gives_same_fingerprints() {
        let hw = HwGroup::<f64>::new(&Field::of_order(9).unwrap());
        let f = hw.field();
        let reference = canonical_mub(&hw).unwrap();
        let mut fps: Vec<_> = reference.states.iter().map(fingerprint).collect();
        fps.sort();
        let mut again = Vec::new();
        for ray in f.rays() {
            let mut ops: Vec<CMatrix<f64>> = maximal_abelian_subgroup(&hw, &ray)
                .matrices()
                .into_iter()
                .skip(1)
                .collect();
            ops.reverse();
            for je in joint_eigenbasis(&ops, 1e-8).unwrap() {
                again.push(fingerprint(&PureState::new(je.vector).unwrap()));
            }
        }
        again.sort();
        assert_eq!(fps, again);
    }

    #[test]
    fn hesse_sic_overlaps() {
        let sic = hesse_sic::<f64>();
        assert_eq!(sic.len(), 9);
        let fid = hesse_fiducial::<f64>();
        assert!((fid.amplitudes()[1].re - 0.5f64.sqrt()).abs() < 1e-15);
        for (i, a) in sic.states.iter().enumerate() {
            for (j, b) in sic.states.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.25 };
                assert!((a.overlap(b) - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn state_index_dedups_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut index = StateIndex::<f64>::new();
        let states: Vec<_> = (0..50).map(|_| PureState::random(4, &mut rng)).collect();
        for s in &states {
            assert!(index.insert(s).1);
        }
        for s in &states {
            let rotated = PureState::new(s.scaled(Complex::from_polar(1.0, 1.234))).unwrap();
            assert!(!index.insert(&rotated).1);
        }
        assert_eq!(index.len(), 50);
    }

    #[test]
    fn single_precision_mub() {
        let hw = HwGroup::<f32>::new(&Field::of_order(4).unwrap());
        let m = canonical_mub(&hw).unwrap();
        let bases = m.bases().unwrap();
        for a in bases[0] {
            for b in bases[1] {
                assert!((a.overlap(b) - 0.25).abs() < 1e-5);
            }
        }
    }
}
