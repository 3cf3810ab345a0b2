use cli_harness::config::strict_window_message;
use cli_harness::rng::{trial_rng, Stream};
use cli_harness::{validate_config, Command, ExperimentConfig};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn missing_seed_defaults_to_zero() {
    let cfg = validate_config(r#"{"command": "modes"}"#).unwrap();
    assert_eq!(cfg.seed, 0);
    assert_eq!(cfg.command, Command::Modes);
    assert_eq!(cfg.index_scan.trials, 50);
    assert_eq!((cfg.frame.t, cfg.frame.p), (16.0, 2.0));
}

#[test]
fn strict_window_rejects_small_t() {
    let raw = r#"{"command": "iterate", "strict": true, "frame": {"T": 8, "P": 3}}"#;
    let err = validate_config(raw).unwrap_err().0;
    assert!(err.contains("P < T^(1/5) = 1.5157 violated"), "{err}");
    assert!(err.contains("(2.30, 1.52) is empty"), "{err}");
    assert!(err.contains("without --strict"), "{err}");
    // relaxed regime accepts it when s is under the threshold
    let raw = r#"{"command": "iterate", "frame": {"T": 8, "P": 3, "frak_r": 0.25, "s": 1e-4}}"#;
    validate_config(raw).unwrap();
    // commands without a frame ignore the strict window
    validate_config(r#"{"command": "modes", "strict": true, "frame": {"T": 8, "P": 3}}"#).unwrap();
    assert!(strict_window_message(1024.0, 3.5).is_none());
}

#[test]
fn precondition_errors() {
    let bad = [
        r#"{"command": "iterate", "frame": {"s": 1.0}}"#,
        r#"{"command": "iterate", "frame": {"frak_r": 0.5}}"#,
        r#"{"command": "iterate", "frame": {"P": 20}}"#,
        r#"{"command": "modes", "modes": {"points": 4}}"#,
        r#"{"command": "modes", "colour": 1}"#,
        r#"{"seed": 1}"#,
        r#"{"command": "nope"}"#,
        "[1, 2]",
    ];
    for raw in bad {
        assert!(validate_config(raw).is_err(), "{raw}");
    }
    let err = validate_config(r#"{"command": "iterate", "frame": {"s": 1.0}}"#).unwrap_err().0;
    assert!(err.contains("above the threshold"), "{err}");
}

#[test]
fn full_config_echo_matches_input() {
    let cfg = validate_config(r#"{"command": "deform", "seed": 3}"#).unwrap();
    let echo = cfg.to_json();
    let again = validate_config(&echo).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(again.to_json(), echo);
}

#[test]
fn trial_streams_do_not_depend_on_order() {
    let draw = |trial| trial_rng(9, Stream::IndexScan, trial).random::<u64>();
    let forward: Vec<u64> = (0..8).map(draw).collect();
    let backward: Vec<u64> = (0..8).rev().map(draw).collect();
    assert!(forward.iter().eq(backward.iter().rev()));
    let mut sorted = forward.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), 8);
    assert_ne!(draw(0), trial_rng(9, Stream::Adjoint, 0).random::<u64>());
    assert_ne!(draw(0), trial_rng(10, Stream::IndexScan, 0).random::<u64>());
}

proptest! {
    #[test]
    fn validate_emit_validate_is_idempotent(
        seed in any::<u64>(),
        trials in 1usize..100,
        t in 8.0f64..64.0,
        frac in 0.0f64..1.0,
        steps in 1usize..12,
    ) {
        let raw = serde_json::json!({
            "command": "iterate",
            "seed": seed,
            "index_scan": {"trials": trials},
            "frame": {"T": t, "P": 1.0 + frac * (t - 1.0) * 0.5},
            "iterate": {"steps": steps},
        });
        let cfg: ExperimentConfig = validate_config(&raw.to_string()).unwrap();
        let again = validate_config(&cfg.to_json()).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.seed, seed);
    }
}
