use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::ltimodel::{
    error_system, gramians_limited, gramians_unlimited, h2_norm_squared, h2w_norm_squared, poles,
    transfer_eval, Side, StateSpace,
};
use crate::matfun::{eigenvalues, FrequencyBand, RealMatrix};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_stable(n: usize, m: usize, p: usize, seed: u64) -> StateSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let shift = crate::matfun::spectral_abscissa(&a) + 0.3;
    a -= RealMatrix::identity(n, n) * shift;
    let b = RealMatrix::from_fn(n, m, |_, _| rng.random_range(-1.0..1.0));
    let cm = RealMatrix::from_fn(p, n, |_, _| rng.random_range(-1.0..1.0));
    StateSpace::new(a, b, cm).unwrap()
}

fn scalar_sys() -> StateSpace {
    StateSpace::new(
        RealMatrix::from_element(1, 1, -1.0),
        RealMatrix::from_element(1, 1, 1.0),
        RealMatrix::from_element(1, 1, 1.0),
    )
    .unwrap()
}

fn assert_scalar_rom(rom: &StateSpace) {
    // a 1-state realisation is unique up to the scaling of B and C
    assert!((rom.a()[(0, 0)] + 1.0).abs() < 1e-12);
    assert!((rom.b()[(0, 0)] * rom.c()[(0, 0)] - 1.0).abs() < 1e-12);
}

fn two_points() -> InterpolationSet {
    InterpolationSet::scalar(vec![c(1.0, 0.0), c(2.0, 0.0)], Side::Input).unwrap()
}

#[test]
fn pork_self_recovery() {
    let interp = InterpolationSet::scalar(vec![c(1.0, 0.0)], Side::Input).unwrap();
    let rep = pork(&scalar_sys(), &interp).unwrap();
    assert_scalar_rom(&rep.rom);
    assert_eq!(rep.method, Method::Pork);
}

#[test]
fn pork_mirror_poles_and_energy_identity() {
    let sys = random_stable(10, 1, 1, 11);
    let pts = vec![c(0.5, 0.0), c(1.0, 2.0), c(1.0, -2.0), c(3.0, 0.0)];
    let interp = InterpolationSet::scalar(pts.clone(), Side::Input).unwrap();
    let rep = pork(&sys, &interp).unwrap();
    let want: Vec<Complex64> = pts.iter().map(|z| -z).collect();
    assert!(pole_set_distance(&poles(&rep.rom), &want) < 1e-8);
    let err = h2_norm_squared(&error_system(&sys, &rep.rom).unwrap()).unwrap();
    let full = h2_norm_squared(&sys).unwrap();
    let rom = h2_norm_squared(&rep.rom).unwrap();
    assert!((err - full + rom).abs() <= 1e-6 * full);
    assert!(rep.interpolation_residuals.iter().all(|&r| r < 1e-8));
}

#[test]
fn flpork_self_recovery() {
    let interp = InterpolationSet::scalar(vec![c(1.0, 0.0)], Side::Input).unwrap();
    let band = FrequencyBand::new(0.0, 1.0).unwrap();
    let rep = flpork(&scalar_sys(), &interp, &band).unwrap();
    assert_scalar_rom(&rep.rom);
    assert!(rep.energy_identity_gap.unwrap() <= 1e-10);
}

#[test]
fn flpork_mirror_poles_n12() {
    let sys = random_stable(12, 1, 1, 12);
    let band = FrequencyBand::new(0.0, 3.0).unwrap();
    let rep = flpork(&sys, &two_points(), &band).unwrap();
    assert!(pole_set_distance(&poles(&rep.rom), &[c(-1.0, 0.0), c(-2.0, 0.0)]) < 1e-8);
    // energy identity with all three norms from Gramians
    let err = h2w_norm_squared(&error_system(&sys, &rep.rom).unwrap(), &band).unwrap();
    let full = h2w_norm_squared(&sys, &band).unwrap();
    let rom = h2w_norm_squared(&rep.rom, &band).unwrap();
    assert!((err - full + rom).abs() <= 1e-6 * full);
    assert!(rep.interpolation_residuals.iter().all(|&r| r < 1e-6));
}

#[test]
fn flpork_rom_gramian_is_inverse_pseudo_gramian() {
    let sys = random_stable(9, 2, 2, 13);
    let band = FrequencyBand::new(0.5, 4.0).unwrap();
    let pts = vec![c(0.7, 1.0), c(0.7, -1.0), c(2.0, 0.0)];
    let interp = InterpolationSet::with_default_directions(&sys, pts, Side::Input).unwrap();
    let rep = flpork(&sys, &interp, &band).unwrap();
    let g = gramians_limited(&rep.rom, &band).unwrap();
    let prod = &g.p * rep.pseudo_gramian.as_ref().unwrap();
    assert!((prod - RealMatrix::identity(3, 3)).norm() < 1e-7);
}

#[test]
fn flpork_preserves_paper_mode() {
    let lambda = c(-0.2748, 4.4888);
    // a mode plus two faster real poles and a second pair
    let mut a = RealMatrix::zeros(6, 6);
    a[(0, 0)] = lambda.re;
    a[(0, 1)] = lambda.im;
    a[(1, 0)] = -lambda.im;
    a[(1, 1)] = lambda.re;
    a[(2, 2)] = -1.0;
    a[(2, 3)] = 9.0;
    a[(3, 2)] = -9.0;
    a[(3, 3)] = -1.0;
    a[(4, 4)] = -3.0;
    a[(5, 5)] = -6.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let q = RealMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0)).qr().q();
    let sys = StateSpace::new(
        q.transpose() * a * &q,
        RealMatrix::from_fn(6, 1, |i, _| 1.0 + i as f64 * 0.1),
        RealMatrix::from_fn(1, 6, |_, j| 0.5 - j as f64 * 0.2),
    )
    .unwrap();
    let interp = mirror_interpolation(&[lambda, lambda.conj()], None, Side::Input).unwrap();
    assert_eq!(interp.points()[0], c(0.2748, 4.4888));
    let band = FrequencyBand::new(0.0, 8.93).unwrap();
    let rep = flpork(&sys, &interp, &band).unwrap();
    assert!(pole_set_distance(&poles(&rep.rom), &[lambda, lambda.conj()]) < 1e-8);
    let modal = modal_truncation(&sys, &[lambda, lambda.conj()]).unwrap();
    assert!(pole_set_distance(&poles(&modal.rom), &poles(&rep.rom)) < 1e-8);
}

#[test]
fn oflpork_self_recovery() {
    let interp = InterpolationSet::scalar(vec![c(1.0, 0.0)], Side::Output).unwrap();
    let band = FrequencyBand::new(0.0, 1.0).unwrap();
    let rep = oflpork(&scalar_sys(), &interp, &band).unwrap();
    assert_scalar_rom(&rep.rom);
}

#[test]
fn oflpork_mirror_poles_and_energy_identity() {
    let sys = random_stable(12, 1, 1, 14);
    let band = FrequencyBand::new(0.0, 3.0).unwrap();
    let interp = InterpolationSet::scalar(vec![c(1.0, 0.0), c(2.0, 0.0)], Side::Output).unwrap();
    let rep = oflpork(&sys, &interp, &band).unwrap();
    assert!(pole_set_distance(&poles(&rep.rom), &[c(-1.0, 0.0), c(-2.0, 0.0)]) < 1e-8);
    let err = h2w_norm_squared(&error_system(&sys, &rep.rom).unwrap(), &band).unwrap();
    let full = h2w_norm_squared(&sys, &band).unwrap();
    let rom = h2w_norm_squared(&rep.rom, &band).unwrap();
    assert!((err - full + rom).abs() <= 1e-6 * full);
    let g = gramians_limited(&rep.rom, &band).unwrap();
    assert!((&g.q * rep.pseudo_gramian.as_ref().unwrap() - RealMatrix::identity(2, 2)).norm() < 1e-7);
    assert!(rep.interpolation_residuals.iter().all(|&r| r < 1e-6));
}

#[test]
fn oflpork_is_dual_flpork() {
    let sys = random_stable(8, 2, 3, 15);
    let band = FrequencyBand::new(0.2, 5.0).unwrap();
    let pts = vec![c(0.4, 0.0), c(1.0, 2.5), c(1.0, -2.5)];
    let out = InterpolationSet::with_default_directions(&sys, pts.clone(), Side::Output).unwrap();
    let inp = InterpolationSet::new(pts, out.directions().to_vec(), Side::Input).unwrap();
    let primal = oflpork(&sys, &out, &band).unwrap();
    let dual = flpork(&sys.dual(), &inp, &band).unwrap();
    // same transfer function up to transposition
    for k in 0..6 {
        let s = c(0.2 * k as f64, 1.3 * k as f64 - 2.0);
        let g = transfer_eval(&primal.rom, s).unwrap();
        let gd = transfer_eval(&dual.rom, s).unwrap().transpose();
        assert!((&g - &gd).norm() <= 1e-8 * g.norm());
    }
}

#[test]
fn flpork_rejects_unstable_and_left_points() {
    let sys = random_stable(5, 1, 1, 16);
    let band = FrequencyBand::new(0.0, 1.0).unwrap();
    let left = InterpolationSet::scalar(vec![c(-1.0, 0.0)], Side::Input).unwrap();
    assert_eq!(flpork(&sys, &left, &band).unwrap_err().name(), "InvalidInterpolation");
    let unstable = StateSpace::new(
        RealMatrix::from_element(1, 1, 0.5),
        RealMatrix::from_element(1, 1, 1.0),
        RealMatrix::from_element(1, 1, 1.0),
    )
    .unwrap();
    let one = InterpolationSet::scalar(vec![c(1.0, 0.0)], Side::Input).unwrap();
    assert_eq!(flpork(&unstable, &one, &band).unwrap_err().name(), "NotStable");
    let out = InterpolationSet::scalar(vec![c(1.0, 0.0)], Side::Output).unwrap();
    assert_eq!(flpork(&sys, &out, &band).unwrap_err().name(), "InvalidInterpolation");
}

#[test]
fn flbt_full_order_is_similarity() {
    let sys = random_stable(6, 2, 1, 17);
    let band = FrequencyBand::new(0.0, 4.0).unwrap();
    let rep = flbt(&sys, 6, &band).unwrap();
    for k in 0..10 {
        let s = c(0.1 * k as f64, 0.9 * k as f64 - 4.0);
        let g = transfer_eval(&sys, s).unwrap();
        let gr = transfer_eval(&rep.rom, s).unwrap();
        assert!((&g - &gr).norm() <= 1e-8 * g.norm());
    }
}

#[test]
fn flbt_hankel_values_match_eigen_oracle() {
    let sys = random_stable(10, 1, 1, 18);
    let band = FrequencyBand::new(0.0, 2.0).unwrap();
    let rep = flbt(&sys, 4, &band).unwrap();
    let g = gramians_limited(&sys, &band).unwrap();
    let mut oracle: Vec<f64> = eigenvalues(&(&g.p * &g.q)).iter().map(|z| z.re.max(0.0).sqrt()).collect();
    oracle.sort_by(|x, y| y.total_cmp(x));
    // trailing values sit below the sqrt(eps) resolution of the oracle
    for (h, o) in rep.hankel_values.iter().zip(&oracle).take(4) {
        assert!((h - o).abs() <= 1e-8 * oracle[0]);
    }
    // balanced: the reduced Gramians are diag(σ̄₁..σ̄_r) up to truncation
    assert_eq!(rep.rom.order(), 4);
}

#[test]
fn flbt_keeps_in_band_mode() {
    // modes at 0.5 and 50 rad/s, band [0,2]
    let mut a = RealMatrix::zeros(4, 4);
    for (k, w) in [(0, 0.5), (2, 50.0)] {
        a[(k, k)] = -0.05 * w;
        a[(k, k + 1)] = w;
        a[(k + 1, k)] = -w;
        a[(k + 1, k + 1)] = -0.05 * w;
    }
    let sys = StateSpace::new(a, RealMatrix::from_element(4, 1, 1.0), RealMatrix::from_element(1, 4, 1.0)).unwrap();
    let band = FrequencyBand::new(0.0, 2.0).unwrap();
    let rep = flbt(&sys, 2, &band).unwrap();
    let kept: Vec<f64> = poles(&rep.rom).iter().map(|z| z.im.abs()).collect();
    assert!(kept.iter().all(|&w| (w - 0.5).abs() < 0.05), "kept {kept:?}");
    // brute force over the two block truncations
    let block = |k: usize| {
        let idx = [k, k + 1];
        StateSpace::new(
            RealMatrix::from_fn(2, 2, |i, j| sys.a()[(idx[i], idx[j])]),
            RealMatrix::from_element(2, 1, 1.0),
            RealMatrix::from_element(1, 2, 1.0),
        )
        .unwrap()
    };
    let errs: Vec<f64> = [0, 2]
        .iter()
        .map(|&k| h2w_norm_squared(&error_system(&sys, &block(k)).unwrap(), &band).unwrap())
        .collect();
    assert!(errs[0] < errs[1]);
}

#[test]
fn flbt_rejects_bad_orders() {
    let sys = random_stable(4, 1, 1, 19);
    let band = FrequencyBand::new(0.0, 1.0).unwrap();
    assert!(flbt(&sys, 0, &band).is_err());
    assert!(flbt(&sys, 5, &band).is_err());
}

#[test]
fn pork_uses_unlimited_gramian() {
    let sys = random_stable(7, 1, 1, 20);
    let interp = two_points();
    let rep = pork(&sys, &interp).unwrap();
    let g = gramians_unlimited(&rep.rom).unwrap();
    let prod = &g.p * rep.pseudo_gramian.as_ref().unwrap();
    assert!((prod - RealMatrix::identity(2, 2)).norm() < 1e-8);
}

#[test]
fn mimo_default_directions_are_interpolated() {
    let sys = random_stable(10, 2, 2, 21);
    let band = FrequencyBand::new(0.0, 2.0).unwrap();
    let pts = vec![c(0.3, 1.2), c(0.3, -1.2), c(1.5, 0.0)];
    let interp = InterpolationSet::with_default_directions(&sys, pts, Side::Input).unwrap();
    for d in interp.directions() {
        assert!((d.norm() - 1.0).abs() < 1e-12);
    }
    let rep = flpork(&sys, &interp, &band).unwrap();
    assert!(rep.interpolation_residuals.iter().all(|&r| r < 1e-6));
}
