use cv_postselect::emulator::{emulate, ExperimentParams};

fn lossless() -> ExperimentParams {
    ExperimentParams {
        v_in_plus_snl: 1.0,
        v_in_minus_snl: 1.0,
        anc_sqz_db: -6.0,
        anc_antisqz_db: Some(6.0),
        eta_vis: 1.0,
        eta_det: 1.0,
        eta_hom: 1.0,
        gate_elec_db: -300.0,
        hom_elec_db: -300.0,
        x0_snl: 0.1,
        n_samples: 1_000_000,
        ..ExperimentParams::default()
    }
}

#[test]
fn lossless_estimates_match_gaussian_prediction() {
    let e = emulate(&lossless()).unwrap();
    let (s, p) = (&e.stats, &e.prediction);
    let within = |est: f64, pred: f64, se: f64| (est - pred).abs() < 3.0 * se;
    assert!(
        within(s.fidelity_est, p.fidelity, s.fidelity_se),
        "{} vs {}",
        s.fidelity_est,
        p.fidelity
    );
    for i in 0..2 {
        assert!(
            within(s.v_out[i], p.v_out[i], s.v_out_se[i]),
            "V[{i}] {} vs {}",
            s.v_out[i],
            p.v_out[i]
        );
    }
    assert!(within(
        s.gains.g_plus.unwrap(),
        p.gains.g_plus.unwrap(),
        s.gains_se[0].unwrap()
    ));
    assert!(within(
        s.gains.g_minus.unwrap(),
        p.gains.g_minus.unwrap(),
        s.gains_se[1].unwrap()
    ));
    assert!(within(s.purity_norm, p.purity_norm, s.purity_norm_se));
}

#[test]
fn selection_improves_purity() {
    let e = emulate(&ExperimentParams::default()).unwrap();
    assert!(e.stats.purity_norm > e.unselected_purity_norm);
    assert!(e.stats.antisqueezing_assumed);
}

#[test]
fn fidelity_does_not_drop_as_threshold_tightens() {
    let mut prev: Option<(f64, f64)> = None;
    for x0 in [0.1, 0.03, 0.01] {
        let s = emulate(&ExperimentParams {
            x0_snl: x0,
            ..ExperimentParams::default()
        })
        .unwrap()
        .stats;
        if let Some((f, se)) = prev {
            assert!(s.fidelity_est >= f - 3.0 * (se * se + s.fidelity_se * s.fidelity_se).sqrt());
        }
        prev = Some((s.fidelity_est, s.fidelity_se));
    }
}

#[test]
fn seeded_runs_are_identical() {
    let p = ExperimentParams {
        n_samples: 500_000,
        x0_snl: 0.1,
        ..ExperimentParams::default()
    };
    assert_eq!(emulate(&p).unwrap(), emulate(&p).unwrap());
}

#[test]
fn strong_lossless_ancilla_reaches_ideal_gains() {
    let p = ExperimentParams {
        anc_sqz_db: -30.0,
        anc_antisqz_db: Some(30.0),
        x0_snl: 0.5,
        gamma_plus_wig: 1.0,
        gamma_minus_wig: 1.0,
        n_input_samples: 1_000_000,
        ..lossless()
    };
    let s = emulate(&p).unwrap().stats;
    let (gp, gm) = (s.gains.g_plus.unwrap(), s.gains.g_minus.unwrap());
    assert!(
        (gp - 2.0).abs() < 3.0 * s.gains_se[0].unwrap() + 0.01,
        "{gp}"
    );
    assert!(
        (gm - 0.5).abs() < 3.0 * s.gains_se[1].unwrap() + 0.01,
        "{gm}"
    );
}
