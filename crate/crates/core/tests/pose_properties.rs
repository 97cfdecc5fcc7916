use mnmdtw::pose::unflatten_xy;
use mnmdtw::{
    flatten, generate_squat, normalize, select_group, z_normalize, AxisSelection, Landmark, LandmarkFrame,
    LimbGroupMap, Normalization, PoseSequence, SquatParams, LANDMARK_COUNT,
};
use proptest::prelude::*;

fn pose_sequence(max_frames: usize) -> impl Strategy<Value = PoseSequence> {
    let landmark = (
        -800.0f64..800.0,
        -800.0f64..800.0,
        prop::option::of(-5.0f64..5.0),
        prop::option::of(0.0f64..=1.0),
    )
        .prop_map(|(x, y, z, visibility)| Landmark { x, y, z, visibility });
    let frame = prop::collection::vec(landmark, LANDMARK_COUNT).prop_map(|l| LandmarkFrame::new(l).unwrap());
    prop::collection::vec(frame, 2..=max_frames).prop_map(|f| PoseSequence::new(f, 30.0).unwrap())
}

fn channel(seq: &PoseSequence, col: usize) -> Vec<f64> {
    flatten(seq, AxisSelection::Both).rows().map(|r| r[col]).collect()
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn max_abs_diff(a: &PoseSequence, b: &PoseSequence) -> f64 {
    let (a, b) = (flatten(a, AxisSelection::Both), flatten(b, AxisSelection::Both));
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn z_normalized_channels_are_standard(seq in pose_sequence(12)) {
        let out = z_normalize(&seq).unwrap();
        for col in 0..2 * LANDMARK_COUNT {
            let (mean, std) = mean_std(&channel(&out.sequence, col));
            prop_assert!(mean.abs() < 1e-9, "column {} mean {}", col, mean);
            let constant = out.constant_channels.iter().any(|c| c.landmark == Some(col / 2));
            if !constant {
                prop_assert!((std - 1.0).abs() < 1e-9, "column {} std {}", col, std);
            }
        }
    }

    #[test]
    fn normalization_is_idempotent(seq in pose_sequence(12)) {
        for mode in [Normalization::PerChannel, Normalization::PerAxis, Normalization::Pose] {
            let once = normalize(&seq, mode).unwrap().sequence;
            let twice = normalize(&once, mode).unwrap().sequence;
            prop_assert!(max_abs_diff(&once, &twice) < 1e-9, "{}", mode);
        }
    }

    #[test]
    fn z_and_visibility_pass_through(seq in pose_sequence(6)) {
        let out = z_normalize(&seq).unwrap().sequence;
        for (a, b) in seq.frames().iter().zip(out.frames()) {
            for (la, lb) in a.landmarks().iter().zip(b.landmarks()) {
                prop_assert_eq!(la.z, lb.z);
                prop_assert_eq!(la.visibility, lb.visibility);
            }
        }
    }

    #[test]
    fn pose_normalization_keeps_shape(seq in pose_sequence(8), scale in 0.1f64..10.0, dx in -500.0f64..500.0, dy in -500.0f64..500.0) {
        // a camera move and zoom changes nothing after normalization
        let moved: Vec<LandmarkFrame> = seq
            .frames()
            .iter()
            .map(|f| {
                let l = f.landmarks().iter().map(|l| Landmark { x: l.x * scale + dx, y: l.y * scale + dy, ..*l }).collect();
                LandmarkFrame::new(l).unwrap()
            })
            .collect();
        let moved = PoseSequence::new(moved, seq.fps()).unwrap();
        let a = normalize(&seq, Normalization::Pose).unwrap().sequence;
        let b = normalize(&moved, Normalization::Pose).unwrap().sequence;
        prop_assert!(max_abs_diff(&a, &b) < 1e-9);
    }

    #[test]
    fn flatten_round_trips_exactly(seq in pose_sequence(6)) {
        let xy = unflatten_xy(&flatten(&seq, AxisSelection::Both)).unwrap();
        for (frame, row) in seq.frames().iter().zip(&xy) {
            let expected: Vec<(f64, f64)> = frame.landmarks().iter().map(|l| (l.x, l.y)).collect();
            prop_assert_eq!(&expected, row);
        }
        let x = flatten(&seq, AxisSelection::X);
        prop_assert_eq!(x.dims(), LANDMARK_COUNT);
        prop_assert_eq!(x.row(0)[5], seq.frames()[0].landmark(5).x);
    }
}

/// Two frames where every entry holds its own column index.
fn labelled_columns() -> PoseSequence {
    let frame = LandmarkFrame::new(
        (0..LANDMARK_COUNT)
            .map(|l| Landmark::xy((2 * l) as f64, (2 * l + 1) as f64))
            .collect(),
    )
    .unwrap();
    PoseSequence::new(vec![frame.clone(), frame], 30.0).unwrap()
}

#[test]
fn groups_partition_all_66_columns() {
    let m = flatten(&labelled_columns(), AxisSelection::Both);
    let map = LimbGroupMap::default();
    let mut seen = Vec::new();
    let mut dims = Vec::new();
    for name in map.names() {
        let g = select_group(&m, name, AxisSelection::Both, &map).unwrap();
        dims.push((name.to_string(), g.dims()));
        seen.extend(g.row(0).iter().map(|&c| c as usize));
        for (axis, parity) in [(AxisSelection::X, 0), (AxisSelection::Y, 1)] {
            let single = select_group(&m, name, axis, &map).unwrap();
            assert_eq!(single.dims() * 2, g.dims());
            assert!(single.row(0).iter().all(|&c| c as usize % 2 == parity));
        }
    }
    let expected: Vec<(String, usize)> = [
        ("head", 22),
        ("torso", 8),
        ("left_arm", 10),
        ("right_arm", 10),
        ("left_leg", 8),
        ("right_leg", 8),
    ]
    .iter()
    .map(|&(n, d)| (n.to_string(), d))
    .collect();
    assert_eq!(dims, expected);
    seen.sort_unstable();
    assert_eq!(seen, (0..66).collect::<Vec<_>>());
}

#[test]
fn unknown_group_and_wrong_width_are_errors() {
    let m = flatten(&labelled_columns(), AxisSelection::Both);
    let map = LimbGroupMap::default();
    assert!(select_group(&m, "tail", AxisSelection::Both, &map).is_err());
    let x_only = flatten(&labelled_columns(), AxisSelection::X);
    assert!(select_group(&x_only, "head", AxisSelection::X, &map).is_err());
}

#[test]
fn per_channel_normalization_erases_fixed_feet() {
    // The feet never move, so per-channel statistics reduce the ankle, heel
    // and toe x channels to zero whatever the stance width. The pose-level
    // mode keeps the difference.
    let clip = |stance| {
        generate_squat(&SquatParams {
            stance_width: stance,
            jitter_std: 0.0,
            ..SquatParams::correct()
        })
        .unwrap()
    };
    let (narrow, wide) = (clip(1.0), clip(1.6));
    for l in [27, 29, 31] {
        let col = 2 * l;
        let a = channel(&z_normalize(&narrow).unwrap().sequence, col);
        let b = channel(&z_normalize(&wide).unwrap().sequence, col);
        assert!(a.iter().chain(&b).all(|v| v.abs() < 1e-9));
        let a = channel(&normalize(&narrow, Normalization::Pose).unwrap().sequence, col);
        let b = channel(&normalize(&wide, Normalization::Pose).unwrap().sequence, col);
        assert!((a[0] - b[0]).abs() > 0.2, "landmark {l}: {} vs {}", a[0], b[0]);
    }
}
