use ftsynth::noise::*;
use ftsynth_core::f2::PauliType;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn zero_rate_gives_no_errors_and_no_failures() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let e = sample_depolarizing(50, 0.0, &mut rng);
    assert!(e.x.iter().chain(&e.z).all(|&b| !b));
    let dec = decoder_for(3, 1.0, 1.0).unwrap();
    let pt = run_point(&dec, 0.0, 1000, 1, Convention::Total).unwrap();
    assert_eq!((pt.x_fails, pt.z_fails), (0, 0));
}

#[test]
fn marginals_match_the_convention() {
    let samples = 1_000_000u32;
    for (conv, p, per_pauli) in [(Convention::Total, 0.15, 0.05), (Convention::PerPauli, 0.05, 0.05)] {
        let total = conv.total(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (mut x_only, mut y, mut z_only) = (0u32, 0u32, 0u32);
        for _ in 0..samples {
            let e = sample_depolarizing(1, total, &mut rng);
            match (e.x[0], e.z[0]) {
                (true, false) => x_only += 1,
                (true, true) => y += 1,
                (false, true) => z_only += 1,
                _ => {}
            }
        }
        let sigma = (per_pauli * (1.0 - per_pauli) / samples as f64).sqrt();
        for count in [x_only, y, z_only] {
            let est = count as f64 / samples as f64;
            assert!((est - per_pauli).abs() < 3.0 * sigma, "{conv:?}: {est} vs {per_pauli}");
        }
    }
}

#[test]
fn rates_outside_the_simplex_are_rejected() {
    assert!(Convention::PerPauli.total(0.34).is_err());
    assert!(Convention::PerPauli.total(1.0 / 3.0).is_ok());
    assert!(Convention::Total.total(1.01).is_err());
    assert!(Convention::Total.total(-0.1).is_err());
    assert!(Convention::Total.total(f64::NAN).is_err());
}

#[test]
fn logical_representatives_register_as_failures() {
    let dec = decoder_for(3, 1.0, 1.0).unwrap();
    let code = &dec.code().code;
    let n = code.n();
    let mut xbar = vec![false; n];
    for &q in &code.logical_x {
        xbar[q] = true;
    }
    let mut zbar = vec![false; n];
    for &q in &code.logical_z {
        zbar[q] = true;
    }
    assert!(code.is_logical(PauliType::X, &xbar));
    assert!(code.is_logical(PauliType::Z, &zbar));
    // Logical operators have trivial syndrome, so decoding leaves them.
    let out = decode_shot(&dec, &PauliError { x: xbar.clone(), z: vec![false; n] }).unwrap();
    assert_eq!(out, ShotOutcome { x_fail: true, z_fail: false });
    let out = decode_shot(&dec, &PauliError { x: vec![false; n], z: zbar }).unwrap();
    assert_eq!(out, ShotOutcome { x_fail: false, z_fail: true });
}

#[test]
fn counts_do_not_depend_on_thread_count() {
    let cfg = McConfig { ls: vec![3, 5], ps: vec![0.1], shots: 3000, seed: 42, ..McConfig::default() };
    let one = run_monte_carlo(&cfg, Some(1), |_| {}).unwrap();
    let two = run_monte_carlo(&cfg, Some(2), |_| {}).unwrap();
    let again = run_monte_carlo(&cfg, None, |_| {}).unwrap();
    assert_eq!(one, two);
    assert_eq!(one, again);
    let other = run_monte_carlo(&McConfig { seed: 43, ..cfg }, None, |_| {}).unwrap();
    assert_ne!(one, other);
}

#[test]
fn z_failures_are_rarer_at_low_noise() {
    let dec = decoder_for(3, 1.0, 1.0).unwrap();
    let pt = run_point(&dec, 0.01, 100_000, 5, Convention::Total).unwrap();
    assert!(pt.plz < pt.plx, "{pt:?}");
    assert!(pt.x_fails > 0);
}

#[test]
fn failure_rates_grow_with_noise() {
    let dec = decoder_for(3, 1.0, 1.0).unwrap();
    let pts: Vec<McPoint> = [0.02, 0.06, 0.1, 0.14, 0.18]
        .iter()
        .map(|&p| run_point(&dec, p, 20_000, 9, Convention::Total).unwrap())
        .collect();
    for w in pts.windows(2) {
        for t in [PauliType::X, PauliType::Z] {
            let (a, b) = (&w[0], &w[1]);
            let se = |pt: &McPoint| match t {
                PauliType::X => pt.se_x,
                PauliType::Z => pt.se_z,
            };
            assert!(b.rate(t) + 3.0 * (se(a) + se(b)) >= a.rate(t), "{a:?} {b:?}");
        }
    }
}

#[test]
fn points_carry_binomial_errors() {
    let pt = McPoint::new(3, 0.1, 400, 100, 0);
    assert_eq!(pt.plx, 0.25);
    assert!((pt.se_x - (0.25f64 * 0.75 / 400.0).sqrt()).abs() < 1e-15);
    assert_eq!(pt.se_z, 0.0);
}

#[test]
fn csv_round_trip() {
    let pts = vec![McPoint::new(3, 0.08, 1000, 12, 3), McPoint::new(5, 0.125, 1000, 40, 0)];
    let mut buf = Vec::new();
    write_csv(&mut buf, &pts).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), "L,p,shots,x_fails,z_fails,plx,plz,se_x,se_z");
    assert_eq!(read_csv(&buf[..]).unwrap(), pts);
}
