//! Parametric stick-figure squats.
//!
//! The body is built in a 3D body frame (x lateral with +x on the subject's
//! left, y up, z forward, units of metres) and projected onto a frontal
//! camera. Each leg is a two-segment chain from a fixed ankle to the hip; the
//! knee bends forward out of the ankle-hip line. The upper body is rigid,
//! rides on the pelvis and pitches forward as the knees bend. Camera yaw is
//! modelled as a per-side horizontal scale: the side nearer the camera
//! appears wider.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::pose::{Landmark, LandmarkFrame, PoseSequence, LANDMARK_COUNT};

pub const SHOULDER_WIDTH: f64 = 0.40;
pub const HIP_WIDTH: f64 = 0.28;
/// Shin and thigh share one length.
pub const LEG_SEGMENT: f64 = 0.45;
pub const ANKLE_HEIGHT: f64 = 0.08;
/// Pelvis center to shoulder line.
pub const TORSO_LENGTH: f64 = 0.52;
/// Shoulder line to head center.
pub const NECK_TO_HEAD: f64 = 0.24;
/// Forward torso pitch per degree of knee flexion.
pub const TORSO_LEAN_RATIO: f64 = 0.5;
/// Strength of the near/far side scale difference under yaw.
pub const PERSPECTIVE: f64 = 0.5;

pub const PIXELS_PER_METRE: f64 = 400.0;
const IMAGE_CENTER_X: f64 = 960.0;
const GROUND_Y: f64 = 940.0;

/// Largest relative speed change [`generate_cohort`] draws.
pub const TEMPO_SPREAD: f64 = 0.15;

/// Fraction of the clip spent going down; the same time is spent coming up
/// and the rest is held at the bottom.
const DESCENT_FRACTION: f64 = 0.4;

type Vec3 = [f64; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct SquatParams {
    /// Fraction of a 90 degree knee bend reached at the bottom, in (0, 1].
    pub depth: f64,
    /// Ankle separation as a multiple of shoulder separation, at least 1.
    pub stance_width: f64,
    /// Frames of the clip before any tempo change, at least 10.
    pub duration_frames: usize,
    /// Standard deviation of per-coordinate Gaussian noise, in metres.
    pub jitter_std: f64,
    pub seed: u64,
    /// Camera yaw in degrees; positive turns the subject's left side toward the camera.
    pub camera_yaw: f64,
    /// Playback speed; the clip is linearly resampled to
    /// `round(duration_frames / tempo)` frames.
    pub tempo: f64,
    pub fps: f64,
}

impl Default for SquatParams {
    fn default() -> Self {
        Self::correct()
    }
}

impl SquatParams {
    /// Full-depth squat with feet at shoulder width.
    pub fn correct() -> Self {
        Self {
            depth: 1.0,
            stance_width: 1.0,
            duration_frames: 90,
            jitter_std: 0.01,
            seed: 0,
            camera_yaw: 20.0,
            tempo: 1.0,
            fps: 30.0,
        }
    }

    /// Feet too wide.
    pub fn mistake1() -> Self {
        Self {
            stance_width: 1.6,
            ..Self::correct()
        }
    }

    /// Not going deep enough.
    pub fn mistake2() -> Self {
        Self {
            depth: 0.5,
            ..Self::correct()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "correct" => Some(Self::correct()),
            "mistake1" => Some(Self::mistake1()),
            "mistake2" => Some(Self::mistake2()),
            _ => None,
        }
    }

    pub fn output_frames(&self) -> usize {
        (self.duration_frames as f64 / self.tempo).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.depth > 0.0 && self.depth <= 1.0) {
            return bad(format!("depth must be in (0, 1], got {}", self.depth));
        }
        if !(self.stance_width.is_finite() && self.stance_width >= 1.0) {
            return bad(format!("stance_width must be >= 1, got {}", self.stance_width));
        }
        if self.duration_frames < 10 {
            return bad(format!("duration_frames must be >= 10, got {}", self.duration_frames));
        }
        if !(self.jitter_std.is_finite() && self.jitter_std >= 0.0) {
            return bad(format!("jitter_std must be >= 0, got {}", self.jitter_std));
        }
        if !(self.camera_yaw.is_finite() && self.camera_yaw.abs() < 90.0) {
            return bad(format!("camera_yaw must be within (-90, 90), got {}", self.camera_yaw));
        }
        if !(self.tempo.is_finite() && self.tempo > 0.0) || self.output_frames() < 2 {
            return bad(format!("tempo {} leaves fewer than 2 frames", self.tempo));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return bad(format!("fps must be positive, got {}", self.fps));
        }
        // the ankle-hip distance at the bottom must still span the lateral offset
        let lateral = (self.stance_width * SHOULDER_WIDTH - HIP_WIDTH).abs() / 2.0;
        if ankle_hip_distance(bottom_knee_angle(self.depth)) <= lateral {
            return bad(format!(
                "stance_width {} is too wide for the leg geometry",
                self.stance_width
            ));
        }
        Ok(())
    }
}

fn bottom_knee_angle(depth: f64) -> f64 {
    180.0 - 90.0 * depth
}

/// Ankle-hip distance for a knee angle in degrees (law of cosines).
fn ankle_hip_distance(knee_angle: f64) -> f64 {
    let l = LEG_SEGMENT;
    (2.0 * l * l * (1.0 - knee_angle.to_radians().cos())).sqrt()
}

/// Bend progress in [0, 1] at normalized time `t` in [0, 1].
fn bend_profile(t: f64) -> f64 {
    let ramp = |u: f64| 0.5 * (1.0 - (std::f64::consts::PI * u).cos());
    if t < DESCENT_FRACTION {
        ramp(t / DESCENT_FRACTION)
    } else if t <= 1.0 - DESCENT_FRACTION {
        1.0
    } else {
        ramp((1.0 - t) / DESCENT_FRACTION)
    }
}

/// Knee angle in degrees at each frame of the clip before tempo resampling.
fn knee_angle_schedule(p: &SquatParams) -> impl Iterator<Item = f64> + '_ {
    let last = (p.duration_frames - 1) as f64;
    (0..p.duration_frames).map(move |k| 180.0 - 90.0 * p.depth * bend_profile(k as f64 / last))
}

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Upper-body points in the torso frame: (lateral, up from pelvis, forward).
fn upper_body_template() -> [(usize, Vec3); 25] {
    let t = TORSO_LENGTH;
    let h = TORSO_LENGTH + NECK_TO_HEAD;
    let s = SHOULDER_WIDTH / 2.0;
    let hip = HIP_WIDTH / 2.0;
    [
        (0, [0.0, h, 0.10]),
        (1, [0.015, h + 0.035, 0.085]),
        (2, [0.03, h + 0.035, 0.08]),
        (3, [0.045, h + 0.035, 0.07]),
        (4, [-0.015, h + 0.035, 0.085]),
        (5, [-0.03, h + 0.035, 0.08]),
        (6, [-0.045, h + 0.035, 0.07]),
        (7, [0.075, h + 0.01, 0.0]),
        (8, [-0.075, h + 0.01, 0.0]),
        (9, [0.025, h - 0.045, 0.085]),
        (10, [-0.025, h - 0.045, 0.085]),
        (11, [s, t, 0.0]),
        (12, [-s, t, 0.0]),
        (13, [s + 0.03, t - 0.28, 0.02]),
        (14, [-s - 0.03, t - 0.28, 0.02]),
        (15, [s + 0.04, t - 0.54, 0.06]),
        (16, [-s - 0.04, t - 0.54, 0.06]),
        (17, [s + 0.05, t - 0.62, 0.06]),
        (18, [-s - 0.05, t - 0.62, 0.06]),
        (19, [s + 0.035, t - 0.63, 0.08]),
        (20, [-s - 0.035, t - 0.63, 0.08]),
        (21, [s + 0.015, t - 0.60, 0.08]),
        (22, [-s - 0.015, t - 0.60, 0.08]),
        (23, [hip, 0.0, 0.0]),
        (24, [-hip, 0.0, 0.0]),
    ]
}

/// Body-frame positions of all 33 landmarks for one knee angle.
fn skeleton(knee_angle: f64, stance_width: f64) -> [Vec3; LANDMARK_COUNT] {
    let mut out = [[0.0; 3]; LANDMARK_COUNT];

    let reach = ankle_hip_distance(knee_angle);
    let mut pelvis_height = 0.0;
    for (side, knee, ankle, heel, toe) in [(1.0, 25, 27, 29, 31), (-1.0, 26, 28, 30, 32)] {
        let ankle_pos = [side * stance_width * SHOULDER_WIDTH / 2.0, ANKLE_HEIGHT, 0.0];
        let hip_x = side * HIP_WIDTH / 2.0;
        let dx = hip_x - ankle_pos[0];
        let rise = (reach * reach - dx * dx).sqrt();
        let hip_pos = [hip_x, ANKLE_HEIGHT + rise, 0.0];
        // the forward offset is perpendicular to the ankle-hip line, so both
        // segments keep length LEG_SEGMENT
        let bulge = (LEG_SEGMENT * LEG_SEGMENT - reach * reach / 4.0).max(0.0).sqrt();
        out[knee] = [
            (ankle_pos[0] + hip_pos[0]) / 2.0,
            (ankle_pos[1] + hip_pos[1]) / 2.0,
            bulge,
        ];
        out[ankle] = ankle_pos;
        out[heel] = add(ankle_pos, [0.0, -0.05, -0.06]);
        out[toe] = add(ankle_pos, [0.0, -0.07, 0.16]);
        pelvis_height = hip_pos[1];
    }

    let lean = (TORSO_LEAN_RATIO * (180.0 - knee_angle)).to_radians();
    let (sin, cos) = lean.sin_cos();
    for (index, [u, v, w]) in upper_body_template() {
        out[index] = [u, pelvis_height + v * cos - w * sin, v * sin + w * cos];
    }
    out
}

/// Body-frame landmark positions for every frame before tempo resampling
/// and noise. Exposed for kinematic checks.
pub fn body_frames(p: &SquatParams) -> Result<Vec<[Vec3; LANDMARK_COUNT]>> {
    p.validate()?;
    Ok(knee_angle_schedule(p).map(|a| skeleton(a, p.stance_width)).collect())
}

/// Knee angle (degrees) at each frame before tempo resampling, measured from
/// the left leg of [`body_frames`].
pub fn knee_angles(p: &SquatParams) -> Result<Vec<f64>> {
    Ok(body_frames(p)?
        .iter()
        .map(|b| {
            let (hip, knee, ankle) = (b[23], b[25], b[27]);
            let u = [hip[0] - knee[0], hip[1] - knee[1], hip[2] - knee[2]];
            let v = [ankle[0] - knee[0], ankle[1] - knee[1], ankle[2] - knee[2]];
            let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            let norm = |x: &Vec3| x.iter().map(|c| c * c).sum::<f64>().sqrt();
            (dot / (norm(&u) * norm(&v))).clamp(-1.0, 1.0).acos().to_degrees()
        })
        .collect())
}

/// Horizontal scale for each side of the body under camera yaw.
fn side_scales(yaw_degrees: f64) -> (f64, f64) {
    let (sin, cos) = yaw_degrees.to_radians().sin_cos();
    (cos * (1.0 + PERSPECTIVE * sin), cos * (1.0 - PERSPECTIVE * sin))
}

fn project(body: &[Vec3; LANDMARK_COUNT], yaw: f64) -> Vec<[f64; 3]> {
    let (left, right) = side_scales(yaw);
    body.iter()
        .map(|&[x, y, z]| {
            let scale = if x >= 0.0 { left } else { right };
            [
                IMAGE_CENTER_X + PIXELS_PER_METRE * scale * x,
                GROUND_Y - PIXELS_PER_METRE * y,
                PIXELS_PER_METRE * z,
            ]
        })
        .collect()
}

/// Linear interpolation of a frame sequence onto `len` evenly spaced samples
/// spanning the same time range.
pub fn resample_linear(frames: &[Vec<[f64; 3]>], len: usize) -> Vec<Vec<[f64; 3]>> {
    let src = frames.len();
    if src == len || src < 2 || len < 2 {
        return frames.iter().take(len.max(1)).cloned().collect();
    }
    let step = (src - 1) as f64 / (len - 1) as f64;
    (0..len)
        .map(|k| {
            let pos = k as f64 * step;
            let lo = (pos.floor() as usize).min(src - 2);
            let frac = pos - lo as f64;
            frames[lo]
                .iter()
                .zip(&frames[lo + 1])
                .map(|(a, b)| std::array::from_fn(|c| a[c] + frac * (b[c] - a[c])))
                .collect()
        })
        .collect()
}

/// Renders one squat clip. Deterministic for a given parameter set.
pub fn generate_squat(p: &SquatParams) -> Result<PoseSequence> {
    let bodies = body_frames(p)?;
    let mut frames: Vec<Vec<[f64; 3]>> = bodies.iter().map(|b| project(b, p.camera_yaw)).collect();
    if p.tempo != 1.0 {
        frames = resample_linear(&frames, p.output_frames());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let noise = Normal::new(0.0, p.jitter_std * PIXELS_PER_METRE).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let frames = frames
        .into_iter()
        .map(|pts| {
            let landmarks = pts
                .into_iter()
                .map(|[x, y, z]| {
                    let (dx, dy) = if p.jitter_std > 0.0 {
                        (noise.sample(&mut rng), noise.sample(&mut rng))
                    } else {
                        (0.0, 0.0)
                    };
                    Landmark {
                        x: x + dx,
                        y: y + dy,
                        z: Some(z),
                        visibility: Some(1.0),
                    }
                })
                .collect();
            LandmarkFrame::new(landmarks)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PoseSequence::new(frames, p.fps)?.with_source(format!(
        "synth:depth={},stance={},seed={}",
        p.depth, p.stance_width, p.seed
    )))
}

/// `n` clips that differ only by seed. Clip `i` uses seed
/// `base.seed + i * seed_stride` (wrapping); its seed also draws a tempo
/// factor within `1 ± TEMPO_SPREAD` of `base.tempo`.
pub fn generate_cohort(base: &SquatParams, n: usize, seed_stride: u64) -> Result<Vec<PoseSequence>> {
    base.validate()?;
    (0..n as u64)
        .map(|i| {
            let seed = base.seed.wrapping_add(i.wrapping_mul(seed_stride));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            let tempo = base.tempo * rng.random_range(1.0 - TEMPO_SPREAD..=1.0 + TEMPO_SPREAD);
            generate_squat(&SquatParams {
                seed,
                tempo,
                ..base.clone()
            })
        })
        .collect()
}
