use lastmile_safety::*;
use proptest::prelude::*;

fn class_strategy() -> impl Strategy<Value = Class> {
    prop_oneof![Just(Class::Green), Just(Class::Blue), Just(Class::Red)]
}

#[test]
fn scripted_files_round_trip_and_replay() {
    for case in scripted_interactions() {
        let text = case.scenario.to_text();
        let parsed = Scenario::parse(&text).unwrap();
        let out = run_scenario(&parsed, &ClassifierParams::default(), &ConstantVelocity).unwrap();
        assert_eq!(out.phases, case.expected.to_vec(), "{}", case.name);
        for track in &out.tracks {
            let entries = track
                .label_history
                .iter()
                .enumerate()
                .filter(|(i, (_, c))| c.is_reactive() && (*i == 0 || track.label_history[i - 1].1 != *c))
                .count();
            let emitted = out.events.iter().filter(|e| e.track_id == track.id).count();
            assert_eq!(entries, emitted, "{} track {}", case.name, track.id);
        }
    }
}

#[test]
fn interaction_ends_beyond_radius() {
    let text = "V 0 0 0\nV 1 0.001 0\nP 0 1 5 5\nP 0.4 1 5 30\nP 0.8 1 5 5\n";
    let out = run_scenario(&Scenario::parse(text).unwrap(), &ClassifierParams::default(), &ConstantVelocity).unwrap();
    assert_eq!(out.tracks[0].label_history.len(), 1);
}

proptest! {
    #[test]
    fn red_whenever_too_close(x in -0.35f64..0.35, y in -0.35f64..0.35, vx in -3.0f64..3.0, vy in -3.0f64..3.0) {
        let path = VehiclePath::straight(Vec2::default(), Vec2::new(1.0, 0.0), 0.0, 10.0);
        let mut track = PedestrianTrack::new(0);
        for k in 0..8 {
            let t = 0.4 * k as f64 - 2.8;
            track.observe(t, Vec2::new(x + vx * t, y + vy * t)).unwrap();
        }
        // At t = 0 the pedestrian is at (x, y), within 0.5 m of the vehicle.
        let a = classify(&track, &path, &ClassifierParams::default(), &ConstantVelocity).unwrap();
        prop_assert_eq!(a.class, Class::Red);
    }

    #[test]
    fn classification_is_pure(px in -15.0f64..15.0, py in -15.0f64..15.0, vx in -2.0f64..2.0, vy in -2.0f64..2.0) {
        let path = VehiclePath::straight(Vec2::default(), Vec2::new(1.2, 0.0), 0.0, 30.0);
        let mut track = PedestrianTrack::new(3);
        for k in 0..8 {
            track.observe(0.4 * k as f64, Vec2::new(px + vx * 0.4 * k as f64, py + vy * 0.4 * k as f64)).unwrap();
        }
        let p = ClassifierParams::default();
        prop_assert_eq!(classify(&track, &path, &p, &ConstantVelocity), classify(&track, &path, &p, &ConstantVelocity));
    }

    #[test]
    fn vocalizer_fires_on_reactive_entries(seq in proptest::collection::vec(class_strategy(), 0..40)) {
        let labels: Vec<(f64, Class)> = seq.iter().enumerate().map(|(i, &c)| (i as f64, c)).collect();
        let events = vocalizer_events(1, &labels);
        let mut prev = None;
        let mut expected = Vec::new();
        for &(t, c) in &labels {
            if c != Class::Green && prev != Some(c) {
                expected.push((t, c));
            }
            prev = Some(c);
        }
        prop_assert_eq!(events.iter().map(|e| (e.time, e.class)).collect::<Vec<_>>(), expected);
    }
}
