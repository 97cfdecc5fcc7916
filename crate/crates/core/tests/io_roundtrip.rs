use std::path::Path;

use mnmdtw::io::{
    baseline_to_string, landmarks_to_string, parse_baseline, parse_landmarks, read_landmarks, write_landmarks,
};
use mnmdtw::{
    compute_baseline, generate_cohort, generate_squat, Landmark, LandmarkFrame, LimbGroupMap, PipelineConfig,
    PoseSequence, SquatParams, LANDMARK_COUNT,
};
use proptest::prelude::*;

fn pose_sequence() -> impl Strategy<Value = PoseSequence> {
    let landmark = (
        -1e4f64..1e4,
        -1e4f64..1e4,
        prop::option::of(-1e3f64..1e3),
        prop::option::of(0.0f64..=1.0),
    )
        .prop_map(|(x, y, z, visibility)| Landmark { x, y, z, visibility });
    let frame = prop::collection::vec(landmark, LANDMARK_COUNT).prop_map(|l| LandmarkFrame::new(l).unwrap());
    (
        prop::collection::vec(frame, 2..6),
        1.0f64..240.0,
        prop::option::of("[a-z0-9 _\"\\\\-]{0,12}"),
    )
        .prop_map(|(frames, fps, label)| {
            let seq = PoseSequence::new(frames, fps).unwrap();
            match label {
                Some(l) => seq.with_label(l),
                None => seq,
            }
        })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 * a.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn landmark_text_is_a_fixed_point(seq in pose_sequence()) {
        let text = landmarks_to_string(&seq);
        let back = parse_landmarks(&text, Path::new("mem")).unwrap();
        prop_assert_eq!(landmarks_to_string(&back), text);
        prop_assert_eq!(&back.label, &seq.label);
        prop_assert_eq!(back.len(), seq.len());
        for (fa, fb) in seq.frames().iter().zip(back.frames()) {
            for (a, b) in fa.landmarks().iter().zip(fb.landmarks()) {
                prop_assert!(close(a.x, b.x) && close(a.y, b.y));
                prop_assert_eq!(a.z.is_some(), b.z.is_some());
                prop_assert_eq!(a.visibility.is_some(), b.visibility.is_some());
            }
        }
    }
}

#[test]
fn generated_clip_survives_disk_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("clip.json");
    let seq = generate_squat(&SquatParams::mistake2()).unwrap().with_label("mistake2");
    write_landmarks(&seq, &path).unwrap();
    let back = read_landmarks(&path).unwrap();
    assert_eq!(back.label.as_deref(), Some("mistake2"));
    assert_eq!(back.source, seq.source);
    assert_eq!(back.len(), seq.len());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), landmarks_to_string(&back));
    // nothing left behind besides the target
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn baseline_round_trip_is_exact() {
    let map = LimbGroupMap::default();
    let gold = generate_squat(&SquatParams::correct()).unwrap();
    let controls = generate_cohort(
        &SquatParams {
            seed: 9,
            ..SquatParams::correct()
        },
        3,
        1,
    )
    .unwrap();
    let table = compute_baseline(&controls, &gold, &map, &PipelineConfig::default()).unwrap();
    let back = parse_baseline(&baseline_to_string(&table), Path::new("mem")).unwrap();
    assert_eq!(back, table);
}

#[test]
fn schema_errors_name_the_frame() {
    let seq = generate_squat(&SquatParams {
        duration_frames: 12,
        ..SquatParams::correct()
    })
    .unwrap();
    let text = landmarks_to_string(&seq);
    // drop the last landmark of frame 3 (the fourth frame line)
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let frame_lines: Vec<usize> = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with("[{"))
        .map(|(i, _)| i)
        .collect();
    let line = &mut lines[frame_lines[3]];
    let cut = line.rfind(", {").unwrap();
    let tail = if line.ends_with(',') { "]," } else { "]" };
    line.truncate(cut);
    line.push_str(tail);
    let err = parse_landmarks(&lines.join("\n"), Path::new("short.json"))
        .unwrap_err()
        .to_string();
    assert!(err.contains("frame 3"), "{err}");
    assert!(err.contains("short.json"), "{err}");
}
