//! Heisenberg-Weyl displacement operators over GF(q).
//!
//! The computational basis `|x>` is indexed by field elements in their integer
//! order. All phases that occur are powers of `zeta = e^{i pi / p}`:
//! `omega = zeta^2` and `tau = -e^{i pi/p} = zeta^(p+1)`. Displacements are
//! monomial matrices, so they are stored exactly as a permutation plus one
//! `zeta` exponent per column, with the dense matrix cached next to it.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gf::{Field, PhasePoint, Ray};
use crate::linalg::CMatrix;
use crate::scalar::{czero, Real, C};

/// Roots of unity for characteristic `p`.
#[derive(Clone, Debug)]
pub struct PhaseRing<T: Real> {
    p: u32,
    /// `zeta^k` for `k` in `0..2p`.
    zeta_powers: Vec<C<T>>,
}

impl<T: Real> PhaseRing<T> {
    pub fn new(p: u32) -> Self {
        let two_p = 2 * p as usize;
        let zeta_powers = (0..two_p)
            .map(|k| {
                // reduce exactly-known angles so that e.g. zeta^p is exactly -1
                let num = k as f64;
                let angle = std::f64::consts::PI * num / p as f64;
                let (s, c) = angle.sin_cos();
                let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
                Complex::new(T::lit(snap(c)), T::lit(snap(s)))
            })
            .collect();
        Self { p, zeta_powers }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// `zeta^k` with `k` taken mod `2p`.
    #[inline]
    pub fn zeta_pow(&self, k: i64) -> C<T> {
        self.zeta_powers[k.rem_euclid(2 * self.p as i64) as usize]
    }

    /// `omega = e^{2 pi i / p}`.
    pub fn omega(&self) -> C<T> {
        self.zeta_pow(2)
    }

    /// `tau = -e^{i pi / p}`.
    pub fn tau(&self) -> C<T> {
        self.zeta_pow(self.p as i64 + 1)
    }

    #[inline]
    pub fn omega_pow(&self, k: i64) -> C<T> {
        self.zeta_pow(2 * k)
    }

    #[inline]
    pub fn tau_pow(&self, k: i64) -> C<T> {
        self.zeta_pow((self.p as i64 + 1) * k)
    }
}

/// `X_u |x> = |x + u>`.
pub fn shift_matrix<T: Real>(f: &Field, u: usize) -> CMatrix<T> {
    let q = f.q();
    let u = f.elem(u);
    let mut m = CMatrix::zeros(q, q);
    for x in f.elements() {
        m[(f.add(x, u).index(), x.index())] = Complex::new(T::one(), T::zero());
    }
    m
}

/// `Z_u |x> = omega^{tr(u x)} |x>`.
pub fn phase_matrix<T: Real>(f: &Field, ring: &PhaseRing<T>, u: usize) -> CMatrix<T> {
    let q = f.q();
    let u = f.elem(u);
    let mut m = CMatrix::zeros(q, q);
    for x in f.elements() {
        m[(x.index(), x.index())] = ring.omega_pow(f.trace(f.mul(u, x)) as i64);
    }
    m
}

/// `D_u = tau^{tr(u1 u2)} X_{u1} Z_{u2}`.
#[derive(Clone, Debug)]
pub struct Displacement<T: Real> {
    pub point: PhasePoint,
    /// `tr(u1 u2)` lifted to `[0, p)`, the exponent of the `tau` prefactor.
    pub phase_exp: u32,
    /// Column `x` has its single nonzero entry in row `perm[x]`.
    pub perm: Vec<usize>,
    /// That entry is `zeta^{zeta_exps[x]}`.
    pub zeta_exps: Vec<u32>,
    pub matrix: CMatrix<T>,
}

impl<T: Real> Displacement<T> {
    pub fn new(f: &Field, ring: &PhaseRing<T>, u: PhasePoint) -> Self {
        let q = f.q();
        let p = f.p();
        let two_p = 2 * p;
        let phase_exp = f.trace(f.mul(u.u1, u.u2));
        let mut perm = Vec::with_capacity(q);
        let mut zeta_exps = Vec::with_capacity(q);
        let mut matrix = CMatrix::zeros(q, q);
        for x in f.elements() {
            let row = f.add(x, u.u1).index();
            let e = ((p + 1) * phase_exp + 2 * f.trace(f.mul(u.u2, x))) % two_p;
            perm.push(row);
            zeta_exps.push(e);
            matrix[(row, x.index())] = ring.zeta_pow(e as i64);
        }
        Self {
            point: u,
            phase_exp,
            perm,
            zeta_exps,
            matrix,
        }
    }

    pub fn apply(&self, ring: &PhaseRing<T>, v: &[C<T>]) -> Vec<C<T>> {
        let mut out = vec![czero(); v.len()];
        for (x, &amp) in v.iter().enumerate() {
            out[self.perm[x]] = ring.zeta_pow(self.zeta_exps[x] as i64) * amp;
        }
        out
    }

    /// Exponent `e` with `D_u^p = zeta^e I`. It is 0 for odd `p`; for `p = 2`
    /// it can be 0 or 2 (that is, `D_u^2 = +-I`).
    pub fn power_p_exponent(&self, p: u32) -> u32 {
        // D^p maps x to x + p u1 = x; accumulate phases along the cycle from 0
        let mut x = 0;
        let mut e = 0;
        for _ in 0..p {
            e += self.zeta_exps[x];
            x = self.perm[x];
        }
        e % (2 * p)
    }
}

/// All `q^2` displacement operators of a field, indexed by point encoding.
#[derive(Clone, Debug)]
pub struct HwGroup<T: Real> {
    field: Field,
    ring: PhaseRing<T>,
    displacements: Vec<Displacement<T>>,
}

impl<T: Real> HwGroup<T> {
    pub fn new(field: &Field) -> Self {
        let ring = PhaseRing::new(field.p());
        let displacements = field
            .points()
            .map(|u| Displacement::new(field, &ring, u))
            .collect();
        Self {
            field: field.clone(),
            ring,
            displacements,
        }
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn ring(&self) -> &PhaseRing<T> {
        &self.ring
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.field.q()
    }

    #[inline]
    pub fn get(&self, u: PhasePoint) -> &Displacement<T> {
        &self.displacements[u.index(self.field.q())]
    }

    pub fn all(&self) -> &[Displacement<T>] {
        &self.displacements
    }

    /// Displacement for `u`, checking that the point belongs to this field.
    pub fn displacement(&self, u: PhasePoint) -> Result<&Displacement<T>> {
        if u.u1.tag() != self.field.tag() || u.u2.tag() != self.field.tag() {
            return Err(Error::FieldMismatch);
        }
        Ok(self.get(u))
    }

    /// Label `v` and phase `c` with `m = c D_v`, if `m` is a multiple of a
    /// displacement. The returned residual is `max |m - c D_v|`.
    pub fn identify(&self, m: &CMatrix<T>) -> Option<(PhasePoint, C<T>, T)> {
        let q = self.dim();
        // D_v |0> is proportional to |v1>
        let v1 = (0..q).max_by(|&a, &b| {
            m[(a, 0)]
                .norm_sqr()
                .partial_cmp(&m[(b, 0)].norm_sqr())
                .unwrap()
        })?;
        let qt = T::from_usize_lossy(q);
        let (mut best, mut best_overlap) = (None, T::zero());
        for v2 in 0..q {
            let d = self.get(self.field.point(v1, v2));
            let overlap = d.matrix.inner(m);
            if overlap.norm() > best_overlap {
                best_overlap = overlap.norm();
                best = Some((d, overlap.unscale(qt)));
            }
        }
        let (d, c) = best?;
        let residual = m.max_abs_diff(&d.matrix.scale(c));
        Some((d.point, c, residual))
    }
}

/// `<u, v> = tr(u2 v1 - u1 v2)`, lifted to `[0, p)`.
pub fn symplectic_form(f: &Field, u: PhasePoint, v: PhasePoint) -> Result<u32> {
    for e in [u.u1, u.u2, v.u1, v.u2] {
        if e.tag() != f.tag() {
            return Err(Error::FieldMismatch);
        }
    }
    Ok(f.trace(f.sub(f.mul(u.u2, v.u1), f.mul(u.u1, v.u2))))
}

/// The `q` pairwise-commuting displacements on one ray.
#[derive(Clone, Debug)]
pub struct AbelianSubgroup<T: Real> {
    pub ray: PhasePoint,
    /// Ordered like `Ray::points`; element 0 is the identity.
    pub elements: Vec<Displacement<T>>,
}

impl<T: Real> AbelianSubgroup<T> {
    pub fn matrices(&self) -> Vec<CMatrix<T>> {
        self.elements.iter().map(|d| d.matrix.clone()).collect()
    }
}

pub fn maximal_abelian_subgroup<T: Real>(hw: &HwGroup<T>, ray: &Ray) -> AbelianSubgroup<T> {
    AbelianSubgroup {
        ray: ray.representative,
        elements: ray.points.iter().map(|&u| hw.get(u).clone()).collect(),
    }
}
