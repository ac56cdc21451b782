use fd_sense::vanet::{
    simulate, simulate_traced, sweep_density, DecisionModel, DuplexMode, Fading, VanetScenario,
};
use proptest::prelude::*;

fn scenario(density: f64, mode: DuplexMode, seed: u64) -> VanetScenario {
    VanetScenario {
        density,
        mode,
        seed,
        sim_duration: 1.0,
        ..VanetScenario::default()
    }
}

#[test]
fn empty_network() {
    for mode in [DuplexMode::Hd, DuplexMode::FdCd] {
        let m = simulate(&scenario(0.0, mode, 1)).unwrap();
        assert_eq!(m.total_collision_time, 0.0);
        assert_eq!(m.normalized_throughput, 0.0);
        assert_eq!(m.attempts, 0);
    }
}

#[test]
fn lone_vehicle_without_false_alarms() {
    // 0.3 vehicles/km on a 2 km road; pick a seed that places exactly one.
    let seed = (0..1000)
        .find(|&s| {
            simulate_traced(&scenario(0.3, DuplexMode::Hd, s))
                .unwrap()
                .positions
                .len()
                == 1
        })
        .unwrap();
    let s = VanetScenario {
        pf_override: Some(0.0),
        ..scenario(0.3, DuplexMode::FdCd, seed)
    };
    let trace = simulate_traced(&s).unwrap();
    let m = trace.metrics;
    assert_eq!(m.total_collision_time, 0.0);
    assert_eq!(m.false_alarms, 0);
    assert_eq!(m.normalized_throughput, 1.0);
    // One CAM per interval, each on air for the full packet.
    assert_eq!(m.attempts, 10);
    assert_eq!(trace.airtime[0].success, m.attempts * trace.packet_slots);
    let duty = trace.airtime[0].success as f64 / trace.total_slots as f64;
    assert!((duty - s.packet_duration / s.cam_interval).abs() < 1e-12);
}

#[test]
fn sparse_network_fd_matches_hd_without_false_alarms() {
    for seed in 0..10 {
        let hd = simulate(&scenario(2.0, DuplexMode::Hd, seed)).unwrap();
        if hd.collisions > 0 {
            continue;
        }
        let fd = simulate(&VanetScenario {
            pf_override: Some(0.0),
            ..scenario(2.0, DuplexMode::FdCd, seed)
        })
        .unwrap();
        assert_eq!(fd.normalized_throughput, hd.normalized_throughput);
        assert_eq!(fd.attempts, hd.attempts);
        assert_eq!(fd.total_collision_time, 0.0);
    }
}

#[test]
fn deterministic_given_seed() {
    let s = scenario(80.0, DuplexMode::FdCd, 42);
    assert_eq!(simulate(&s).unwrap(), simulate(&s).unwrap());
    let other = simulate(&scenario(80.0, DuplexMode::FdCd, 43)).unwrap();
    assert_ne!(simulate(&s).unwrap(), other);
}

#[test]
fn throughput_nonincreasing_in_false_alarm_rate() {
    let mut last = f64::INFINITY;
    for pf in [0.0, 0.01, 0.1, 0.3] {
        let base = VanetScenario {
            pf_override: Some(pf),
            ..scenario(100.0, DuplexMode::FdCd, 5)
        };
        let t = sweep_density(&base, &[100.0], &[DuplexMode::FdCd], 5).unwrap();
        let thr = t.summary()[0].throughput.mean;
        assert!(thr <= last, "pf={pf}: {thr} > {last}");
        last = thr;
    }
}

#[test]
fn sample_level_decisions_agree_with_analytic() {
    let run = |decisions| {
        let base = VanetScenario {
            decisions,
            sim_duration: 0.2,
            ..scenario(100.0, DuplexMode::FdCd, 9)
        };
        sweep_density(&base, &[100.0], &[DuplexMode::FdCd], 4)
            .unwrap()
            .summary()[0]
    };
    let a = run(DecisionModel::Analytic);
    let s = run(DecisionModel::SampleLevel);
    let rate = |x: &fd_sense::vanet::DensitySummary| x.false_alarms.mean / x.attempts.mean;
    assert!(
        (rate(&a) - rate(&s)).abs() < 0.05,
        "{} vs {}",
        rate(&a),
        rate(&s)
    );
}

#[test]
fn rayleigh_fading_runs() {
    let s = VanetScenario {
        fading: Fading::RayleighBlock,
        ..scenario(100.0, DuplexMode::FdCd, 3)
    };
    let hd = simulate(&VanetScenario {
        mode: DuplexMode::Hd,
        ..s.clone()
    })
    .unwrap();
    let fd = simulate(&s).unwrap();
    assert!(fd.total_collision_time <= hd.total_collision_time);
}

#[test]
fn sweep_rows_are_sorted_and_paired() {
    let base = scenario(0.0, DuplexMode::Hd, 11);
    let t = sweep_density(
        &base,
        &[50.0, 0.0, 25.0],
        &[DuplexMode::FdCd, DuplexMode::Hd],
        3,
    )
    .unwrap();
    assert_eq!(t.rows.len(), 18);
    for w in t.rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!((a.density, a.mode, a.replicate) < (b.density, b.mode, b.replicate));
    }
    let zero = t
        .summary()
        .into_iter()
        .filter(|s| s.density == 0.0)
        .collect::<Vec<_>>();
    assert_eq!(zero.len(), 2);
    assert!(zero
        .iter()
        .all(|s| s.collision_time.mean == 0.0 && s.throughput.mean == 0.0));
    let mut csv = Vec::new();
    t.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "density,mode,replicate,collision_time_s,throughput,attempts,collisions,detected,false_alarms"
    );
}

#[test]
fn rejects_bad_scenarios() {
    let bad = [
        VanetScenario {
            density: -1.0,
            ..VanetScenario::default()
        },
        VanetScenario {
            sensing_time: 1e-3,
            ..VanetScenario::default()
        },
        VanetScenario {
            pf_override: Some(1.5),
            ..VanetScenario::default()
        },
        VanetScenario {
            sim_duration: 0.0,
            ..VanetScenario::default()
        },
    ];
    for s in bad {
        assert_eq!(simulate(&s).unwrap_err().exit_code(), 2, "{s:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn airtime_is_conserved(density in 0.0f64..200.0, seed in any::<u64>(), fd in any::<bool>()) {
        let mode = if fd { DuplexMode::FdCd } else { DuplexMode::Hd };
        let trace = simulate_traced(&VanetScenario {
            sim_duration: 0.5,
            ..scenario(density, mode, seed)
        })
        .unwrap();
        for ledger in &trace.airtime {
            prop_assert_eq!(ledger.total(), trace.total_slots);
        }
        let m = trace.metrics;
        prop_assert!((0.0..=1.0).contains(&m.normalized_throughput));
        prop_assert!(m.detected_collisions <= m.collisions);
        let packet = trace.packet_slots as f64 * trace.slot_duration;
        prop_assert!(m.total_collision_time <= m.attempts as f64 * packet + 1e-12);
        if mode == DuplexMode::Hd {
            prop_assert_eq!(m.detected_collisions + m.false_alarms, 0);
        }
    }

    #[test]
    fn fd_never_collides_longer_than_hd(density in 1.0f64..200.0, seed in any::<u64>()) {
        let hd = simulate(&scenario(density, DuplexMode::Hd, seed)).unwrap();
        let fd = simulate(&scenario(density, DuplexMode::FdCd, seed)).unwrap();
        prop_assert!(fd.total_collision_time <= hd.total_collision_time,
            "fd {} hd {}", fd.total_collision_time, hd.total_collision_time);
    }
}
