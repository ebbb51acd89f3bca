use super::*;
use crate::frames::{build_frame, Family, FrameSpec, Normalization};
use crate::safari::{derive_scaled, derive_translated, legs_oracle, Measure};
use rand_chacha::ChaCha8Rng;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn random_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| uniform(&mut rng)).collect()
}

fn pair(a: Matrix, b: Vec<f64>) -> SsmPair {
    SsmPair::from_parts(a, b, Measure::scaled(), 0).unwrap()
}

fn legs(n: usize, delta: f64) -> DiscreteSsm {
    bilinear_discretize(&legs_oracle(n), delta).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn zero_dynamics() {
    let ssm = bilinear_discretize(&pair(Matrix::zeros(3, 3), vec![1.0, 2.0, 3.0]), 0.1).unwrap();
    assert!(ssm.abar().sub(&Matrix::identity(3)).unwrap().max_abs() < 1e-15);
    assert!(max_diff(ssm.bbar(), &[0.1, 0.2, 0.3]) < 1e-15);
}

#[test]
fn scalar_hand_case() {
    let ssm = bilinear_discretize(&pair(Matrix::identity(1), vec![0.7]), 2.0).unwrap();
    assert!(ssm.abar()[(0, 0)].abs() < 1e-15);
    assert!((ssm.bbar()[0] - 0.7).abs() < 1e-15);
}

#[test]
fn singular_resolvent() {
    let err = bilinear_discretize(&pair(Matrix::from_diag(&[-2.0]), vec![1.0]), 1.0).unwrap_err();
    assert!(matches!(err, Error::Singular));
}

#[test]
fn legs_is_stable() {
    assert!(legs(8, 0.01).spectral_radius() < 1.0);
}

#[test]
fn default_delta_in_range() {
    for seed in 0..50 {
        let d = default_delta(seed);
        assert!((DELTA_RANGE.0..=DELTA_RANGE.1).contains(&d));
    }
    assert_eq!(default_delta(3), default_delta(3));
}

#[test]
fn zero_input_zero_state() {
    let traj = run(&legs(4, 0.05), &[0.0; 50], None).unwrap();
    assert_eq!(traj.states.max_abs(), 0.0);
}

#[test]
fn impulse_matches_jacobian() {
    let ssm = legs(6, 0.02);
    let mut u = vec![0.0; 40];
    u[0] = 1.0;
    let h = run(&ssm, &u, None).unwrap().final_state;
    let g = jacobian(&ssm, 40).unwrap();
    assert!(max_diff(&h, &g.column(0)) < 1e-14);
    assert_eq!(g.column(39), ssm.bbar());
    let single = jacobian(&ssm, 1).unwrap();
    assert_eq!(single.column(0), ssm.bbar());
}

#[test]
fn superposition_and_shift() {
    let ssm = legs(8, 0.03);
    let u1 = random_vec(200, 1);
    let u2 = random_vec(200, 2);
    let sum: Vec<f64> = u1.iter().zip(&u2).map(|(a, b)| a + b).collect();
    let h1 = run(&ssm, &u1, None).unwrap().states;
    let h2 = run(&ssm, &u2, None).unwrap().states;
    let hs = run(&ssm, &sum, None).unwrap().states;
    let combined = h1.add(&h2).unwrap();
    assert!(hs.sub(&combined).unwrap().max_abs() <= 1e-9 * combined.max_abs());

    let shift = 17;
    let mut shifted = vec![0.0; shift];
    shifted.extend_from_slice(&u1[..200 - shift]);
    let hsh = run(&ssm, &shifted, None).unwrap().states;
    for k in shift..200 {
        assert!(max_diff(hsh.row(k), h1.row(k - shift)) <= 1e-9);
    }
}

#[test]
fn kernel_cases() {
    let ssm = bilinear_discretize(&pair(Matrix::from_diag(&[0.5, 1.0]), vec![1.0, -1.0]), 0.2).unwrap();
    let c = Matrix::from_rows(&[vec![2.0, 3.0]]).unwrap();
    let k = kernel(&ssm, 5, Some(&c)).unwrap();
    assert!((k[0][0] - (2.0 * ssm.bbar()[0] + 3.0 * ssm.bbar()[1])).abs() < 1e-15);
    let k = kernel(&ssm, 6, None).unwrap();
    for (l, kl) in k.iter().enumerate() {
        for n in 0..2 {
            let expect = ssm.abar()[(n, n)].powi(l as i32) * ssm.bbar()[n];
            assert!((kl[n] - expect).abs() < 1e-14);
        }
    }
}

#[test]
fn kernel_convolution_reproduces_run() {
    let ssm = legs(16, 0.01);
    let c = Matrix::from_fn(3, 16, |i, j| ((i + 1) * (j + 2)) as f64 / 40.0);
    let t = 256;
    let k = kernel(&ssm, t, Some(&c)).unwrap();
    for trial in 0..10 {
        let u = random_vec(t, 100 + trial);
        let h = run(&ssm, &u, None).unwrap().final_state;
        let y = c.mul_vec(&h);
        let mut conv = vec![0.0; 3];
        for (j, uj) in u.iter().enumerate() {
            for p in 0..3 {
                conv[p] += k[t - 1 - j][p] * uj;
            }
        }
        assert!(max_diff(&conv, &y) <= 1e-8);
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    let t = 256;
    for family in Family::WAVELETS.iter().chain([Family::Legendre].iter()) {
        let frame = build_frame(&FrameSpec::new(*family, 32, t)).unwrap();
        for pair in [derive_scaled(&frame).unwrap(), derive_translated(&frame, 1.0).unwrap()] {
            let ssm = bilinear_discretize(&pair, 1.0 / (t - 1) as f64).unwrap();
            let g = jacobian(&ssm, t).unwrap();
            let u = random_vec(t, 7);
            let base = run(&ssm, &u, None).unwrap().final_state;
            for col in [0, 31, 128, 255] {
                let mut up = u.clone();
                up[col] += 1e-6;
                let h = run(&ssm, &up, None).unwrap().final_state;
                let fd: Vec<f64> = h.iter().zip(&base).map(|(a, b)| (a - b) / 1e-6).collect();
                assert!(max_diff(&fd, &g.column(col)) <= 1e-5, "{family} col {col}");
            }
        }
    }
}

#[test]
fn divergence_is_reported() {
    let ssm = bilinear_discretize(&pair(Matrix::from_diag(&[-1.0]), vec![1.0]), 1.0).unwrap();
    let err = run(&ssm, &[1.0; 100], None).unwrap_err();
    assert!(matches!(err, Error::Overflow { .. }));
}

#[test]
fn decoding_inverts_weighted_analysis() {
    let frame = build_frame(&FrameSpec::new(Family::Morlet, 24, 512)).unwrap();
    let dt = frame.grid().dt();
    let x = random_vec(24, 3);
    let f = frame.matrix().t_mul_vec(&x);
    let h: Vec<f64> = frame.matrix().mul_vec(&f).into_iter().map(|v| v * dt).collect();
    let back = decode_state(&h, &frame).unwrap();
    assert!(max_diff(&back, &f) <= 1e-6);
    assert!(decode_state(&[0.0; 24], &frame).unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn adaptive_legs_projects_constant() {
    let ssm = legs(8, 1.0).with_mode(SteppingMode::ScaledAdaptive);
    let h = run(&ssm, &vec![1.0; 4096], None).unwrap().final_state;
    let err: f64 = h.iter().enumerate().map(|(n, v)| (v - if n == 0 { 1.0 } else { 0.0 }).powi(2)).sum();
    assert!(err.sqrt() <= 0.05, "{h:?}");
}

#[test]
fn adaptive_legs_reconstructs_smooth_input() {
    let (n, t) = (64, 1024);
    let frame = build_frame(&FrameSpec::new(Family::Legendre, n, t).with_normalization(Normalization::Native)).unwrap();
    let ssm = bilinear_discretize(&derive_scaled(&frame).unwrap(), 1.0).unwrap().with_mode(SteppingMode::ScaledAdaptive);
    let grid = frame.grid();
    let u: Vec<f64> = (0..t)
        .map(|i| {
            let s = grid.point(i);
            libm::sin(2.0 * core::f64::consts::PI * 3.0 * s) + 0.5 * libm::cos(2.0 * core::f64::consts::PI * 7.0 * s)
        })
        .collect();
    let h = run(&ssm, &u, None).unwrap().final_state;
    let x = decode_state(&h, &frame).unwrap();
    let err: f64 = x.iter().zip(&u).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(err / norm <= 0.1, "{}", err / norm);
}

#[test]
fn energy_width_cases() {
    assert_eq!(energy_width(&[0.0, 0.0, 3.0, 0.0], 0.9), 1);
    assert_eq!(energy_width(&[1.0; 100], 0.9), 90);
    assert_eq!(energy_width(&[1.0; 7], 0.9), 7);
    assert_eq!(energy_width(&[0.0; 5], 0.9), 0);
    let g = Matrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 1.0]]).unwrap();
    let p = locality_profile(&g);
    assert_eq!(p.widths, vec![1, 3]);
    assert_eq!(p.mean_width, 2.0);
}

#[test]
fn decode_times_follow_measure() {
    let frame = build_frame(&FrameSpec::new(Family::Legendre, 2, 5)).unwrap();
    let scaled = decode_times(&frame, Measure::scaled(), 2.0);
    assert_eq!(scaled, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    let translated = decode_times(&frame, Measure::translated(0.5).unwrap(), 3.0);
    assert_eq!(translated, vec![2.5, 2.625, 2.75, 2.875, 3.0]);
}
