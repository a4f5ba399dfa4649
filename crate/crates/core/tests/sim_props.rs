mod common;

use proptest::prelude::*;
use vinelock_core::*;

fn command_strategy() -> impl Strategy<Value = Command> {
    prop_oneof![
        4 => (0.5..600.0f64).prop_map(|delta_len| Command::Grow { delta_len }),
        2 => (prop_oneof![Just(Side::Left), Just(Side::Right), Just(Side::None)], 0.0..15.0f64)
            .prop_map(|(side, tension)| Command::SetTension { side, tension }),
        1 => (0.5..12.0f64).prop_map(|gauge| Command::SetPressure { gauge }),
    ]
}

fn locked_material(state: &VineState) -> f64 {
    common::material(&state.locked, state.design.beam_radius)
}

/// Checks the immutability of already-locked geometry across one command:
/// earlier primitives are bit-identical and the last one can only have been
/// extended at the same curvature.
fn assert_passive(before: &[ShapePrimitive], after: &[ShapePrimitive]) -> Result<(), TestCaseError> {
    prop_assert!(after.len() >= before.len());
    if let Some((last, prefix)) = before.split_last() {
        prop_assert_eq!(prefix, &after[..prefix.len()]);
        let now = after[prefix.len()];
        match (*last, now) {
            (ShapePrimitive::Line { length: a }, ShapePrimitive::Line { length: b }) => prop_assert!(b >= a),
            (
                ShapePrimitive::Arc { radius: r0, angle: a0, turn: t0 },
                ShapePrimitive::Arc { radius: r1, angle: a1, turn: t1 },
            ) => {
                prop_assert_eq!((r0, t0), (r1, t1));
                prop_assert!(a1 >= a0);
            }
            (a, b) => prop_assert!(false, "locked primitive changed kind: {a:?} -> {b:?}"),
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn invariants_hold_for_any_command_sequence(
        cmds in prop::collection::vec(command_strategy(), 0..40),
        disturbance in any::<bool>(),
    ) {
        let design = DesignParams::default();
        let kappa_max = design.max_curvature() * (1.0 + 1e-12);
        let mut state = new_session(design, 5.0).unwrap().with_disturbance(disturbance);
        for cmd in &cmds {
            let before = state.clone();
            match state.apply(cmd) {
                Ok(events) => {
                    for e in &events {
                        prop_assert!(e.at_len <= state.everted_len);
                    }
                }
                Err(SimError::SessionFinished(_)) => {
                    prop_assert!(before.finished);
                    prop_assert_eq!(&state, &before);
                    continue;
                }
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
            prop_assert!(state.check_invariants().is_ok(), "{:?}", state.check_invariants());
            // independent bookkeeping checks
            prop_assert!((state.unlocked_len - state.everted_len.min(design.leg_len)).abs() < 1e-9);
            prop_assert!((locked_material(&state) + state.unlocked_len - state.everted_len).abs() < 1e-6);
            prop_assert!(state.everted_len <= design.max_length);
            prop_assert!(state.unlocked_curvature.abs() <= kappa_max);
            prop_assert!(state.locked.iter().all(|p| p.curvature().abs() <= kappa_max));

            let passive = match cmd {
                Command::Grow { .. } | Command::SetPressure { .. } => true,
                Command::SetTension { tension, .. } => !disturbance || *tension == 0.0,
            };
            if passive {
                assert_passive(&before.locked, &state.locked)?;
            }
        }
    }

    #[test]
    fn identical_sequences_give_identical_states(cmds in prop::collection::vec(command_strategy(), 0..30)) {
        let run = || {
            let mut s = new_session(DesignParams::default(), 7.0).unwrap().with_disturbance(true);
            for c in &cmds {
                let _ = s.apply(c);
            }
            s
        };
        let (a, b) = (run(), run());
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn window_bookkeeping_example() {
    let design = DesignParams { leg_len: 200.0, ..DesignParams::default() };
    let mut s = new_session(design, 7.0).unwrap();
    s.apply(&Command::Grow { delta_len: 500.0 }).unwrap();
    assert_eq!(s.locked, vec![ShapePrimitive::line(300.0)]);
    assert_eq!(s.unlocked_len, 200.0);
    assert_eq!(s.unlocked_curvature, 0.0);
}

#[test]
fn full_tension_grow_locks_minimum_radius_quarter_turn() {
    let design = DesignParams::default();
    let r_min = design.min_bend_radius();
    let mut s = new_session(design, 7.0).unwrap();
    s.apply(&Command::SetTension { side: Side::Left, tension: design.stiffness.t_full }).unwrap();
    let quarter = growth_for_bend(r_min, design.beam_radius, std::f64::consts::FRAC_PI_2).unwrap();
    s.apply(&Command::Grow { delta_len: quarter + design.leg_len }).unwrap();
    match s.locked.as_slice() {
        [ShapePrimitive::Arc { radius, angle, turn: Turn::Left }] => {
            assert!((radius - r_min).abs() < 1e-9);
            assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
        other => panic!("unexpected locked shape {other:?}"),
    }
}
