use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mubkit::clifford::{appleby_unitary, conjugation_residual_at, enumerate_group, Sl2Matrix};
use mubkit::designs::{check_2design, check_mub, check_sic, run_check};
use mubkit::gf::{Field, PhasePoint};
use mubkit::hw::symplectic_form;
use mubkit::linalg::{hermitian_eigen, CMatrix};
use mubkit::orbits::orbit;
use mubkit::states::{canonical_mub, fingerprint, hesse_sic, PureState, StateIndex, StateSet};
use mubkit::HwGroup64;

const QS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

fn field_and_elements() -> impl Strategy<Value = (u64, usize, usize, usize)> {
    prop::sample::select(QS.to_vec()).prop_flat_map(|q| {
        let r = 0..q as usize;
        (Just(q), r.clone(), r.clone(), r)
    })
}

fn point_pair() -> impl Strategy<Value = (u64, [usize; 4], u64)> {
    (prop::sample::select(QS.to_vec()), any::<u64>()).prop_flat_map(|(q, seed)| {
        let r = 0..q as usize;
        (Just(q), [r.clone(), r.clone(), r.clone(), r], Just(seed))
    })
}

fn rephased(states: &[PureState<f64>], thetas: &[f64]) -> Vec<PureState<f64>> {
    states
        .iter()
        .zip(thetas.iter().cycle())
        .map(|(s, &t)| PureState::new(s.scaled(Complex::from_polar(1.0, t))).unwrap())
        .collect()
}

/// Orthonormal basis from the eigenvectors of a random Hermitian matrix.
fn random_basis(d: usize, rng: &mut ChaCha8Rng) -> Vec<PureState<f64>> {
    let g: Vec<PureState<f64>> = (0..d).map(|_| PureState::random(d, rng)).collect();
    let m = CMatrix::from_fn(d, d, |i, j| g[i].amplitudes()[j]);
    let h = m.hermitian_part();
    let e = hermitian_eigen(&h);
    (0..d)
        .map(|k| PureState::new(e.vectors.column(k)).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms((q, a, b, c) in field_and_elements()) {
        let f = Field::of_order(q).unwrap();
        let (a, b, c) = (f.elem(a), f.elem(b), f.elem(c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !b.is_zero() {
            prop_assert_eq!(f.mul(f.div(a, b).unwrap(), b), a);
        }
        prop_assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % f.p());
        // Frobenius fixes the trace
        prop_assert_eq!(f.trace(f.pow(a, f.p() as u64)), f.trace(a));
    }

    #[test]
    fn symplectic_form_is_bilinear_and_alternating((q, [a, b, c, d], _) in point_pair()) {
        let f = Field::of_order(q).unwrap();
        let u = f.point(a, b);
        let v = f.point(c, d);
        let p = f.p();
        let w = symplectic_form(&f, u, v).unwrap();
        prop_assert_eq!(symplectic_form(&f, u, u).unwrap(), 0);
        prop_assert_eq!((w + symplectic_form(&f, v, u).unwrap()) % p, 0);
        let uv = f.add_points(u, v);
        prop_assert_eq!(symplectic_form(&f, uv, v).unwrap(), w);
    }

    #[test]
    fn sl2_preserves_the_form((q, [a, b, c, d], seed) in point_pair()) {
        let f = Field::of_order(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Sl2Matrix::random(&f, &mut rng);
        prop_assert_eq!(m.det(&f), f.one());
        let (u, v) = (f.point(a, b), f.point(c, d));
        prop_assert_eq!(symplectic_form(&f, m.apply(&f, u), m.apply(&f, v)).unwrap(), symplectic_form(&f, u, v).unwrap());
        let inv = m.inverse(&f);
        prop_assert_eq!(inv.apply(&f, m.apply(&f, u)), u);
    }

    #[test]
    fn fingerprints_ignore_global_phase(seed in any::<u64>(), d in 2usize..10, theta in 0.0f64..std::f64::consts::TAU) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = PureState::<f64>::random(d, &mut rng);
        let t = PureState::new(s.scaled(Complex::from_polar(1.0, theta))).unwrap();
        prop_assert_eq!(fingerprint(&s), fingerprint(&t));
        let mut idx = StateIndex::new();
        idx.insert(&s);
        prop_assert_eq!(idx.find(&t), Some(0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn appleby_contract_at_random_points(q in prop::sample::select(vec![3u64, 5, 7, 9]), seed in any::<u64>()) {
        let hw = HwGroup64::new(&Field::of_order(q).unwrap());
        let f = hw.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Sl2Matrix::random(&f, &mut rng);
        let u = appleby_unitary(&hw, &m).unwrap();
        prop_assert!(u.unitarity_residual() < 1e-10);
        for k in [0, 1, (seed as usize) % (f.q() * f.q())] {
            let pt: PhasePoint = f.point_from_index(k);
            prop_assert!(conjugation_residual_at(&hw, &u, &m, pt) < 1e-8);
        }
    }

    #[test]
    fn design_checks_are_phase_invariant(thetas in prop::collection::vec(0.0f64..std::f64::consts::TAU, 1..12), q in prop::sample::select(vec![2u64, 3, 4, 5])) {
        let mub = canonical_mub(&HwGroup64::new(&Field::of_order(q).unwrap())).unwrap();
        let mut sets = vec![mub];
        sets.push(hesse_sic());
        for set in sets {
            let mut rotated = set.clone();
            rotated.states = rephased(&set.states, &thetas);
            for name in ["design2", "sic", "frame", "mub"] {
                match (run_check(name, &set, 1e-8), run_check(name, &rotated, 1e-8)) {
                    (Ok(a), Ok(b)) => {
                        prop_assert_eq!(a.pass, b.pass);
                        prop_assert!((a.residual - b.residual).abs() < 1e-12);
                    }
                    (Err(_), Err(_)) => prop_assert!(set.grouping.is_none()),
                    _ => prop_assert!(false, "check {} disagreed on error", name),
                }
            }
        }
    }
}

#[test]
fn lower_bound_law_on_constructed_sets() {
    let mut sets: Vec<StateSet<f64>> = QS
        .iter()
        .map(|&q| canonical_mub(&HwGroup64::new(&Field::of_order(q).unwrap())).unwrap())
        .collect();
    sets.push(hesse_sic());
    for set in &sets {
        let d = set.dim().unwrap();
        let design = check_2design(set, 1e-8).unwrap();
        assert!(design.pass);
        assert!(set.len() >= d * d);
        assert_eq!(set.len() == d * d, check_sic(set, 1e-8).unwrap().pass);
    }
}

#[test]
fn lower_bound_law_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..100 {
        let d = 2 + k % 4;
        let n = 1 + k % (d * d + 4);
        let states = (0..n)
            .map(|_| PureState::<f64>::random(d, &mut rng))
            .collect();
        let set = StateSet::flat(d, states, "random");
        let r = check_2design(&set, 1e-8).unwrap();
        assert!(!r.pass);
        assert!(!check_sic(&set, 1e-8).unwrap().pass);
    }
}

#[test]
fn orbits_are_2designs() {
    for q in [2u64, 3, 4] {
        let g = enumerate_group(&HwGroup64::new(&Field::of_order(q).unwrap())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(q);
        for _ in 0..5 {
            let o = orbit(&PureState::random(q as usize, &mut rng), &g).unwrap();
            let set = o.to_state_set(q as usize, "orbit");
            let r = check_2design(&set, 1e-7).unwrap();
            assert!(r.pass, "q={q}: {r:?}");
            assert_eq!(g.len() % o.len(), 0);
        }
    }
}

#[test]
fn full_sets_of_bases_are_designs_iff_unbiased() {
    for q in [2u64, 3, 4] {
        let d = q as usize;
        let mub = canonical_mub(&HwGroup64::new(&Field::of_order(q).unwrap())).unwrap();
        assert!(check_mub(&mub, 1e-8).unwrap().pass);
        assert!(check_2design(&mub, 1e-8).unwrap().pass);

        let mut rng = ChaCha8Rng::seed_from_u64(40 + q);
        // one basis swapped for a random orthonormal basis
        let mut mixed = mub.clone();
        let fresh = random_basis(d, &mut rng);
        mixed.states.splice(d..2 * d, fresh);
        // all bases random
        let mut random = mub.clone();
        random.states = (0..=d).flat_map(|_| random_basis(d, &mut rng)).collect();
        for set in [mixed, random] {
            assert!(set.is_distinct());
            assert!(!check_mub(&set, 1e-8).unwrap().pass);
            assert!(!check_2design(&set, 1e-8).unwrap().pass);
        }
    }
}

#[test]
fn random_bases_are_orthonormal() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = random_basis(4, &mut rng);
    for (i, x) in b.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((x.inner(y) - Complex::new(want, 0.0)).norm() < 1e-10);
        }
    }
}
