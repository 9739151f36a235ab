//! Exact arithmetic in GF(p^n).
//!
//! Elements are encoded as integers in `[0, q)` whose base-`p` digits are the
//! coefficients of the polynomial representative, lowest degree first. So for
//! GF(9) with modulus `x^2 + 2x + 2`, the element `x + 2` has index `2 + 3*1 = 5`.
//! Multiplication goes through discrete-log tables keyed by the smallest
//! primitive element.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_TABLE_ORDER: u64 = 1 << 20;
const ADD_TABLE_LIMIT: u32 = 256;

/// Immutable, cheaply clonable description of GF(p^n).
#[derive(Clone)]
pub struct Field {
    inner: Arc<FieldInner>,
}

struct FieldInner {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    tag: u64,
    primitive: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
}

/// An element of a particular [`Field`]. Carries the field's tag so mixed-field
/// arithmetic can be rejected.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    tag: u64,
    index: u32,
}

impl FieldElement {
    #[inline]
    pub fn index(self) -> usize {
        self.index as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.index == 0
    }

    #[inline]
    pub fn tag(self) -> u64 {
        self.tag
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.index)
    }
}

/// A vector `(u1, u2)` in `F_q^2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePoint {
    pub u1: FieldElement,
    pub u2: FieldElement,
}

impl PhasePoint {
    pub fn new(u1: FieldElement, u2: FieldElement) -> Result<Self> {
        if u1.tag != u2.tag {
            return Err(Error::FieldMismatch);
        }
        Ok(Self { u1, u2 })
    }

    /// Integer encoding `u1 + q * u2`.
    #[inline]
    pub fn index(self, q: usize) -> usize {
        self.u1.index() + q * self.u2.index()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.u1.is_zero() && self.u2.is_zero()
    }

    pub fn indices(self) -> [usize; 2] {
        [self.u1.index(), self.u2.index()]
    }
}

impl fmt::Debug for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u1.index, self.u2.index)
    }
}

/// A one-dimensional subspace of `F_q^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray {
    /// Nonzero point whose first nonzero coordinate is 1.
    pub representative: PhasePoint,
    /// `a * representative` for `a` in index order, so `points[0]` is zero.
    pub points: Vec<PhasePoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// JSON description of a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    /// Coefficients, lowest degree first, monic.
    pub modulus: Vec<u32>,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, n)` if it is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut m = q;
    let mut n = 0;
    while m.is_multiple_of(p) {
        m /= p;
        n += 1;
    }
    (m == 1).then_some((p as u32, n))
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

// Dense polynomials over F_p, lowest degree first, used only while building tables.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
            let dr = r.len() - 1;
            let c = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
            if c != 0 {
                for (i, &mi) in m.iter().enumerate() {
                    let k = dr - dm + i;
                    r[k] = ((r[k] as u64 + (p - c) as u64 * mi as u64) % p as u64) as u32;
                }
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut prod = vec![0u32; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + ai as u64 * bj as u64) % p as u64) as u32;
            }
        }
        rem(&prod, m, p)
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        // p is prime, so a^(p-2) is the inverse
        let mut result = 1u64;
        let mut base = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        result as u32
    }

    pub fn is_zero(a: &[u32]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    /// All monic polynomials of degree `d`.
    pub fn monics(d: usize, p: u32) -> impl Iterator<Item = Vec<u32>> {
        let count = (p as u64).pow(d as u32);
        (0..count).map(move |mut k| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..d {
                c.push((k % p as u64) as u32);
                k /= p as u64;
            }
            c.push(1);
            c
        })
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let deg = m.len() - 1;
        if deg == 0 {
            return false;
        }
        for d in 1..=deg / 2 {
            for f in monics(d, p) {
                if is_zero(&rem(m, &f, p)) {
                    return false;
                }
            }
        }
        true
    }
}

impl Field {
    /// GF(p^n) with the default modulus: the first primitive polynomial in
    /// Conway order (`x^2+x+1`, `x^3+x+1`, `x^2+2x+2` for q = 4, 8, 9). For
    /// `n = 1` the modulus is `x - g` with `g` the smallest primitive root.
    pub fn new(p: u32, n: u32) -> Result<Self> {
        Self::check_params(p, n)?;
        let modulus = if n == 1 {
            let g = smallest_primitive_root(p);
            vec![(p - g) % p, 1]
        } else {
            default_modulus(p, n)
        };
        Self::build(p, n, modulus)
    }

    /// GF(q) for a prime power `q`.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, n) = prime_power(q).ok_or(Error::NonPrime(q))?;
        Self::new(p, n)
    }

    /// GF(p^n) with a caller-supplied monic modulus (lowest degree first).
    pub fn with_modulus(p: u32, n: u32, modulus: &[u32]) -> Result<Self> {
        Self::check_params(p, n)?;
        if modulus.len() != n as usize + 1
            || modulus[n as usize] != 1
            || modulus.iter().any(|&c| c >= p)
        {
            return Err(Error::BadModulus {
                expected: n,
                got: modulus.to_vec(),
            });
        }
        if !poly::is_irreducible(modulus, p) {
            return Err(Error::ReducibleModulus(modulus.to_vec()));
        }
        Self::build(p, n, modulus.to_vec())
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        Self::with_modulus(spec.p, spec.n, &spec.modulus)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p(),
            n: self.n(),
            modulus: self.inner.modulus.clone(),
        }
    }

    fn check_params(p: u32, n: u32) -> Result<()> {
        if !is_prime(p as u64) {
            return Err(Error::NonPrime(p as u64));
        }
        if !(1..=4).contains(&n) {
            return Err(Error::UnsupportedDegree(n));
        }
        let q = (p as u64).pow(n);
        if q > MAX_TABLE_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
        Ok(())
    }

    fn build(p: u32, n: u32, modulus: Vec<u32>) -> Result<Self> {
        let q = p.pow(n);
        let digits = |mut k: u32| -> Vec<u32> {
            let mut c = Vec::with_capacity(n as usize);
            for _ in 0..n {
                c.push(k % p);
                k /= p;
            }
            c
        };
        let encode = |c: &[u32]| -> u32 { c.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let mul = |a: u32, b: u32| -> u32 {
            let mut r = poly::mul_mod(&digits(a), &digits(b), &modulus, p);
            r.resize(n as usize, 0);
            encode(&r)
        };
        let pow = |a: u32, mut e: u64| -> u32 {
            let mut result = 1u32;
            let mut base = a;
            while e > 0 {
                if e & 1 == 1 {
                    result = mul(result, base);
                }
                base = mul(base, base);
                e >>= 1;
            }
            result
        };

        let group = (q - 1) as u64;
        let factors = prime_factors(group);
        let primitive = (1..q)
            .find(|&g| pow(g, group) == 1 && factors.iter().all(|&r| pow(g, group / r) != 1))
            .ok_or_else(|| Error::ReducibleModulus(modulus.clone()))?;

        let mut exp = Vec::with_capacity(group as usize);
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for k in 0..group as u32 {
            exp.push(x);
            log[x as usize] = k;
            x = mul(x, primitive);
        }
        if x != 1 {
            return Err(Error::ReducibleModulus(modulus));
        }

        let add_digits = |a: u32, b: u32| -> u32 {
            let (da, db) = (digits(a), digits(b));
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            encode(&s)
        };
        let neg: Vec<u32> = (0..q)
            .map(|a| encode(&digits(a).iter().map(|&d| (p - d) % p).collect::<Vec<_>>()))
            .collect();
        let add = (q <= ADD_TABLE_LIMIT).then(|| {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = add_digits(a, b);
                }
            }
            t
        });

        let mut trace = vec![0u32; q as usize];
        for a in 1..q {
            let mut t = 0u32;
            let mut frob = a;
            for _ in 0..n {
                t = add_digits(t, frob);
                frob = pow(frob, p as u64);
            }
            debug_assert!(t < p, "trace must land in the prime subfield");
            trace[a as usize] = t;
        }

        let tag = {
            let mut h = std::collections::hash_map::DefaultHasher::new();
            (p, n, &modulus).hash(&mut h);
            h.finish()
        };

        Ok(Self {
            inner: Arc::new(FieldInner {
                p,
                n,
                q,
                modulus,
                tag,
                primitive,
                exp,
                log,
                trace,
                add,
                neg,
            }),
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.inner.n
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.inner.q as usize
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    #[inline]
    pub fn tag(&self) -> u64 {
        self.inner.tag
    }

    /// Element with the given integer index.
    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index >= self.inner.q as u64 {
            return Err(Error::ElementOutOfRange {
                index,
                q: self.inner.q as u64,
            });
        }
        Ok(self.elem(index as usize))
    }

    /// Unchecked version of [`Field::element`]; panics when out of range.
    #[inline]
    pub fn elem(&self, index: usize) -> FieldElement {
        assert!(
            index < self.q(),
            "element index {index} out of range for GF({})",
            self.q()
        );
        FieldElement {
            tag: self.inner.tag,
            index: index as u32,
        }
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// The prime-subfield element `k mod p`.
    pub fn from_int(&self, k: i64) -> FieldElement {
        self.elem(k.rem_euclid(self.inner.p as i64) as usize)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q()).map(move |i| self.elem(i))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.q()).map(move |i| self.elem(i))
    }

    #[inline]
    fn owns(&self, a: FieldElement) -> bool {
        a.tag == self.inner.tag
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.owns(a) && self.owns(b));
        let i = &self.inner;
        let index = match &i.add {
            Some(t) => t[(a.index * i.q + b.index) as usize],
            None => {
                let (mut x, mut y, mut out, mut place) = (a.index, b.index, 0, 1);
                for _ in 0..i.n {
                    out += ((x % i.p + y % i.p) % i.p) * place;
                    x /= i.p;
                    y /= i.p;
                    place *= i.p;
                }
                out
            }
        };
        FieldElement { tag: i.tag, index }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        debug_assert!(self.owns(a));
        FieldElement {
            tag: self.inner.tag,
            index: self.inner.neg[a.index as usize],
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.owns(a) && self.owns(b));
        let i = &self.inner;
        if a.index == 0 || b.index == 0 {
            return self.zero();
        }
        let k = (i.log[a.index as usize] + i.log[b.index as usize]) % (i.q - 1);
        FieldElement {
            tag: i.tag,
            index: i.exp[k as usize],
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.index == 0 {
            return Err(Error::DivisionByZero);
        }
        let i = &self.inner;
        let k = (i.q - 1 - i.log[a.index as usize]) % (i.q - 1);
        Ok(FieldElement {
            tag: i.tag,
            index: i.exp[k as usize],
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return self.one();
        }
        if a.index == 0 {
            return self.zero();
        }
        let i = &self.inner;
        let k = (i.log[a.index as usize] as u64 * (e % (i.q as u64 - 1))) % (i.q as u64 - 1);
        FieldElement {
            tag: i.tag,
            index: i.exp[k as usize],
        }
    }

    /// Checked binary arithmetic: rejects foreign elements and division by zero.
    pub fn arith(&self, a: FieldElement, b: FieldElement, op: ArithOp) -> Result<FieldElement> {
        if !self.owns(a) || !self.owns(b) {
            return Err(Error::FieldMismatch);
        }
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Sub => Ok(self.sub(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
        }
    }

    /// Field trace down to F_p, lifted to the integer representative in `[0, p)`.
    #[inline]
    pub fn trace(&self, x: FieldElement) -> u32 {
        debug_assert!(self.owns(x));
        self.inner.trace[x.index as usize]
    }

    /// Smallest-index generator of the multiplicative group.
    pub fn primitive_element(&self) -> FieldElement {
        self.elem(self.inner.primitive as usize)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let group = self.inner.q as u64 - 1;
        let k = self.inner.log[a.index as usize] as u64;
        Ok(group / gcd(group, k))
    }

    pub fn point(&self, u1: usize, u2: usize) -> PhasePoint {
        PhasePoint {
            u1: self.elem(u1),
            u2: self.elem(u2),
        }
    }

    /// Point with encoding `u1 + q * u2`.
    pub fn point_from_index(&self, index: usize) -> PhasePoint {
        let q = self.q();
        self.point(index % q, index / q)
    }

    pub fn points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.q() * self.q()).map(move |i| self.point_from_index(i))
    }

    pub fn scale_point(&self, a: FieldElement, u: PhasePoint) -> PhasePoint {
        PhasePoint {
            u1: self.mul(a, u.u1),
            u2: self.mul(a, u.u2),
        }
    }

    pub fn add_points(&self, u: PhasePoint, v: PhasePoint) -> PhasePoint {
        PhasePoint {
            u1: self.add(u.u1, v.u1),
            u2: self.add(u.u2, v.u2),
        }
    }

    /// The `q + 1` rays of `F_q^2`, sorted by the encoding of their
    /// representative. For q = 2 this gives `(1,0), (0,1), (1,1)`.
    pub fn rays(&self) -> Vec<Ray> {
        let q = self.q();
        let mut reps: Vec<PhasePoint> = (0..q).map(|m| self.point(1, m)).collect();
        reps.push(self.point(0, 1));
        reps.sort_by_key(|r| r.index(q));
        reps.into_iter()
            .map(|rep| Ray {
                representative: rep,
                points: self.elements().map(|a| self.scale_point(a, rep)).collect(),
            })
            .collect()
    }

    /// Additive basis `1, x, .., x^(n-1)` of GF(q) over F_p.
    pub fn prime_basis(&self) -> Vec<FieldElement> {
        (0..self.n())
            .map(|k| self.elem(self.p().pow(k) as usize))
            .collect()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn smallest_primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let group = (p - 1) as u64;
    let factors = prime_factors(group);
    let pow = |g: u64, mut e: u64| {
        let (mut r, mut b) = (1u64, g);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r
    };
    (2..p)
        .find(|&g| factors.iter().all(|&r| pow(g as u64, group / r) != 1))
        .expect("prime has a primitive root")
}

/// First monic primitive polynomial of degree `n` in Conway order: the
/// coefficient of `x^(n-i)` is compared through `(-1)^i a mod p`.
fn default_modulus(p: u32, n: u32) -> Vec<u32> {
    let n = n as usize;
    let q = (p as u64).pow(n as u32);
    let group = q - 1;
    let factors = prime_factors(group);
    let total = (p as u64).pow(n as u32);
    for key in 0..total {
        // key digits, most significant first, are the transformed coefficients
        let mut c = vec![0u32; n + 1];
        c[n] = 1;
        let mut k = key;
        for i in (1..=n).rev() {
            let m = (k % p as u64) as u32;
            k /= p as u64;
            c[n - i] = if i % 2 == 0 { m } else { (p - m) % p };
        }
        if c[0] == 0 || !poly::is_irreducible(&c, p) {
            continue;
        }
        // x must have order exactly q - 1
        let x = vec![0, 1];
        let pow = |mut e: u64| {
            let mut r = vec![1u32];
            let mut b = x.clone();
            while e > 0 {
                if e & 1 == 1 {
                    r = poly::mul_mod(&r, &b, &c, p);
                }
                b = poly::mul_mod(&b, &b, &c, p);
                e >>= 1;
            }
            poly::trim(&mut r);
            r
        };
        if factors.iter().all(|&r| pow(group / r) != vec![1]) {
            return c;
        }
    }
    unreachable!("every finite field has a primitive polynomial")
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p(), self.n(), self.modulus())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.inner.tag == other.inner.tag && self.inner.modulus == other.inner.modulus
    }
}

impl Eq for Field {}
