//! Landmark sequences, their normalization, and conversion to DTW input.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limbs::LimbGroupMap;
use crate::series::MultiSeries;

/// Landmarks per frame in the 33-point body topology.
pub const LANDMARK_COUNT: usize = 33;

/// Columns of a sequence flattened with both axes.
pub const XY_DIMS: usize = 2 * LANDMARK_COUNT;

/// One tracked body point. `z` and `visibility` are carried through I/O but
/// never enter a distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub x: f64,
    pub y: f64,
    pub z: Option<f64>,
    pub visibility: Option<f64>,
}

impl Landmark {
    pub fn xy(x: f64, y: f64) -> Self {
        Self {
            x,
            y,
            z: None,
            visibility: None,
        }
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
        }
    }

    fn get_mut(&mut self, axis: Axis) -> &mut f64 {
        match axis {
            Axis::X => &mut self.x,
            Axis::Y => &mut self.y,
        }
    }
}

/// Exactly [`LANDMARK_COUNT`] landmarks with finite x and y.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFrame {
    landmarks: Vec<Landmark>,
}

impl LandmarkFrame {
    pub fn new(landmarks: Vec<Landmark>) -> Result<Self> {
        if landmarks.len() != LANDMARK_COUNT {
            return Err(Error::InvalidPose(format!(
                "expected {LANDMARK_COUNT} landmarks, got {}",
                landmarks.len()
            )));
        }
        if let Some(idx) = landmarks.iter().position(|l| !l.x.is_finite() || !l.y.is_finite()) {
            return Err(Error::InvalidPose(format!("landmark {idx} has non-finite x/y")));
        }
        Ok(Self { landmarks })
    }

    pub fn landmarks(&self) -> &[Landmark] {
        &self.landmarks
    }

    pub fn landmark(&self, index: usize) -> &Landmark {
        &self.landmarks[index]
    }
}

/// A recording: at least two frames sampled at `fps`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseSequence {
    frames: Vec<LandmarkFrame>,
    fps: f64,
    /// Free-form class tag such as `correct` or `mistake1`.
    pub label: Option<String>,
    /// Where the recording came from (file name, video, generator preset).
    pub source: Option<String>,
}

impl PoseSequence {
    pub fn new(frames: Vec<LandmarkFrame>, fps: f64) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::InvalidPose(format!(
                "need at least 2 frames, got {}",
                frames.len()
            )));
        }
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::InvalidPose(format!("fps must be positive, got {fps}")));
        }
        Ok(Self {
            frames,
            fps,
            label: None,
            source: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn frames(&self) -> &[LandmarkFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    /// Identifier used in reports: source, then label, then `fallback`.
    pub fn id_or<'a>(&'a self, fallback: &'a str) -> &'a str {
        self.source.as_deref().or(self.label.as_deref()).unwrap_or(fallback)
    }

    fn channel(&self, landmark: usize, axis: Axis) -> impl Iterator<Item = f64> + '_ {
        self.frames.iter().map(move |f| f.landmarks[landmark].get(axis))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }

    fn offset(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            other => Err(format!("unknown axis `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisSelection {
    X,
    Y,
    Both,
}

impl AxisSelection {
    pub fn axes(self) -> &'static [Axis] {
        match self {
            AxisSelection::X => &[Axis::X],
            AxisSelection::Y => &[Axis::Y],
            AxisSelection::Both => &Axis::BOTH,
        }
    }
}

impl From<Axis> for AxisSelection {
    fn from(axis: Axis) -> Self {
        match axis {
            Axis::X => AxisSelection::X,
            Axis::Y => AxisSelection::Y,
        }
    }
}

/// Which statistics z-normalization uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Mean and standard deviation per landmark and axis over all frames.
    /// Removes any static offset of a single landmark, stance width included.
    PerChannel,
    /// Mean and standard deviation per axis over all landmarks and frames.
    PerAxis,
    /// Mean per axis over all landmarks and frames, and one standard
    /// deviation pooled over both axes. The skeleton keeps its shape and
    /// aspect ratio; only camera position and subject scale are removed.
    #[default]
    Pose,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::PerChannel => "per-channel",
            Normalization::PerAxis => "per-axis",
            Normalization::Pose => "pose",
        })
    }
}

impl FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-channel" => Ok(Normalization::PerChannel),
            "per-axis" => Ok(Normalization::PerAxis),
            "pose" => Ok(Normalization::Pose),
            other => Err(format!("unknown normalization `{other}` (per-channel|per-axis|pose)")),
        }
    }
}

/// A channel whose standard deviation was zero and was only centered.
/// `landmark` is `None` for the whole-pose modes; `axis` is `None` when the
/// pooled spread of both axes was zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantChannel {
    pub landmark: Option<usize>,
    pub axis: Option<Axis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub sequence: PoseSequence,
    pub constant_channels: Vec<ConstantChannel>,
}

/// Population mean and standard deviation.
/// Population mean and standard deviation. The deviation of a constant
/// channel is exactly zero, not whatever rounding leaves after subtracting
/// a mean that is off by an ulp.
fn moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.iter().all(|&v| v == values[0]) {
        return (values[0], 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Standardizes x and y of every landmark over time: `(v - mean) / std`
/// with population statistics. z and visibility pass through unchanged.
pub fn z_normalize(seq: &PoseSequence) -> Result<Normalized> {
    normalize(seq, Normalization::PerChannel)
}

/// Standardizes x and y with the statistics selected by `mode`. Channels with
/// zero spread are centered only and reported in
/// [`Normalized::constant_channels`].
pub fn normalize(seq: &PoseSequence, mode: Normalization) -> Result<Normalized> {
    if seq.len() < 2 {
        return Err(Error::InvalidPose("need at least 2 frames to normalize".into()));
    }
    let mut out = seq.clone();
    let mut constant_channels = Vec::new();

    let apply = |out: &mut PoseSequence, landmarks: &[usize], axis: Axis, mean: f64, std: f64| {
        let scale = if std > 0.0 { std } else { 1.0 };
        for frame in &mut out.frames {
            for &l in landmarks {
                let v = frame.landmarks[l].get_mut(axis);
                *v = (*v - mean) / scale;
            }
        }
    };

    let all: Vec<usize> = (0..LANDMARK_COUNT).collect();
    let axis_values = |axis: Axis| -> Vec<f64> {
        seq.frames
            .iter()
            .flat_map(|f| f.landmarks.iter().map(move |l| l.get(axis)))
            .collect()
    };
    match mode {
        Normalization::PerChannel => {
            for landmark in 0..LANDMARK_COUNT {
                for axis in Axis::BOTH {
                    let values: Vec<f64> = seq.channel(landmark, axis).collect();
                    let (mean, std) = moments(&values);
                    if std == 0.0 {
                        constant_channels.push(ConstantChannel {
                            landmark: Some(landmark),
                            axis: Some(axis),
                        });
                    }
                    apply(&mut out, &[landmark], axis, mean, std);
                }
            }
        }
        Normalization::PerAxis => {
            for axis in Axis::BOTH {
                let (mean, std) = moments(&axis_values(axis));
                if std == 0.0 {
                    constant_channels.push(ConstantChannel {
                        landmark: None,
                        axis: Some(axis),
                    });
                }
                apply(&mut out, &all, axis, mean, std);
            }
        }
        Normalization::Pose => {
            let stats = Axis::BOTH.map(|axis| moments(&axis_values(axis)));
            // equal sample counts per axis, so the pooled variance is the mean of both
            let std = ((stats[0].1.powi(2) + stats[1].1.powi(2)) / 2.0).sqrt();
            if std == 0.0 {
                constant_channels.push(ConstantChannel {
                    landmark: None,
                    axis: None,
                });
            }
            for (axis, (mean, _)) in Axis::BOTH.into_iter().zip(stats) {
                apply(&mut out, &all, axis, mean, std);
            }
        }
    }

    for c in &constant_channels {
        log::warn!(
            "{}: zero variance in {}{}, centered only",
            seq.id_or("sequence"),
            c.axis.map_or("x/y".to_string(), |a| format!("{a} channel")),
            c.landmark.map(|l| format!(" of landmark {l}")).unwrap_or_default()
        );
    }
    Ok(Normalized {
        sequence: out,
        constant_channels,
    })
}

/// Column of `(landmark, axis)` in a series flattened with both axes.
pub fn xy_column(landmark: usize, axis: Axis) -> usize {
    2 * landmark + axis.offset()
}

/// One row per frame; columns are landmark-major, axis-minor
/// (`l0.x, l0.y, l1.x, ...` for both axes).
pub fn flatten(seq: &PoseSequence, axes: AxisSelection) -> MultiSeries {
    let axes = axes.axes();
    let dims = LANDMARK_COUNT * axes.len();
    let mut values = Vec::with_capacity(seq.len() * dims);
    for frame in &seq.frames {
        for lm in &frame.landmarks {
            values.extend(axes.iter().map(|&a| lm.get(a)));
        }
    }
    MultiSeries::new(values, seq.len(), dims).expect("validated frames flatten to a finite, non-empty series")
}

/// Inverse of [`flatten`] with both axes: per frame, the `(x, y)` of each landmark.
pub fn unflatten_xy(m: &MultiSeries) -> Result<Vec<Vec<(f64, f64)>>> {
    if m.dims() != XY_DIMS {
        return Err(Error::AxisUnavailable {
            expected: XY_DIMS,
            actual: m.dims(),
        });
    }
    Ok(m.rows()
        .map(|row| row.chunks_exact(2).map(|c| (c[0], c[1])).collect())
        .collect())
}

/// Columns of one limb group from a series produced by
/// `flatten(_, AxisSelection::Both)`. The result has `t_l` columns for a
/// single axis and `2 * t_l` for both.
pub fn select_group(m: &MultiSeries, group: &str, axes: AxisSelection, map: &LimbGroupMap) -> Result<MultiSeries> {
    if m.dims() != XY_DIMS {
        return Err(Error::AxisUnavailable {
            expected: XY_DIMS,
            actual: m.dims(),
        });
    }
    let group = map.get(group).ok_or_else(|| Error::UnknownGroup(group.to_string()))?;
    let columns: Vec<usize> = group
        .landmarks
        .iter()
        .flat_map(|&l| axes.axes().iter().map(move |&a| xy_column(l, a)))
        .collect();
    m.select_columns(&columns)
}
