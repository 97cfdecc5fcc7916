//! Two-layer scoring of a test recording against a gold standard.
//!
//! Layer one aligns the full 66-channel pose of the test to the gold
//! timeline. Layer two runs a DTW per limb group and axis on the aligned
//! data. Raw distances are divided by the mean raw distance of a control
//! cohort of correct executions, so a score near 1 means "as close to the
//! gold standard as a correct execution usually is".

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::dtw::{dtw, project_onto_reference};
use crate::error::{Error, Result};
use crate::limbs::LimbGroupMap;
use crate::pose::{flatten, normalize, select_group, Axis, AxisSelection, Normalization, PoseSequence, XY_DIMS};
use crate::series::MultiSeries;

pub const DEFAULT_THRESHOLD: f64 = 1.0;
pub const DEFAULT_BASELINE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LimbAxis {
    pub group: String,
    pub axis: Axis,
}

impl LimbAxis {
    pub fn new(group: impl Into<String>, axis: Axis) -> Self {
        Self {
            group: group.into(),
            axis,
        }
    }
}

/// One value per (group, axis), in limb-map order with x before y.
pub type RawScores = IndexMap<LimbAxis, f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub normalization: Normalization,
    /// Scores at or below this are good.
    pub threshold: f64,
    /// Substituted for a zero baseline mean.
    pub baseline_epsilon: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            normalization: Normalization::default(),
            threshold: DEFAULT_THRESHOLD,
            baseline_epsilon: DEFAULT_BASELINE_EPSILON,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "threshold must be positive, got {}",
                self.threshold
            )));
        }
        if !(self.baseline_epsilon.is_finite() && self.baseline_epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "baseline epsilon must be positive, got {}",
                self.baseline_epsilon
            )));
        }
        Ok(())
    }
}

/// Normalizes a recording and flattens it to its 66 x/y channels.
pub fn prepare(seq: &PoseSequence, normalization: Normalization) -> Result<MultiSeries> {
    let normalized = normalize(seq, normalization)?;
    Ok(flatten(&normalized.sequence, AxisSelection::Both))
}

/// Aligns `test` onto the timeline of `gold` with one DTW over all x/y
/// channels. Both sequences are expected to be normalized already. The
/// result has one row per gold frame.
pub fn synchronize(test: &PoseSequence, gold: &PoseSequence) -> Result<MultiSeries> {
    synchronize_series(&flatten(test, AxisSelection::Both), &flatten(gold, AxisSelection::Both))
}

/// [`synchronize`] on already flattened series.
pub fn synchronize_series(test: &MultiSeries, gold: &MultiSeries) -> Result<MultiSeries> {
    let alignment = dtw(gold, test)?;
    project_onto_reference(&alignment.path, test, gold.len())
}

/// Per-group, per-axis DTW distances between a synchronized test and the gold series.
pub fn score(synced_test: &MultiSeries, gold: &MultiSeries, map: &LimbGroupMap) -> Result<RawScores> {
    for m in [synced_test, gold] {
        if m.dims() != XY_DIMS {
            return Err(Error::AxisUnavailable {
                expected: XY_DIMS,
                actual: m.dims(),
            });
        }
    }
    if synced_test.len() != gold.len() {
        return Err(Error::DimensionMismatch {
            left: synced_test.len(),
            right: gold.len(),
        });
    }
    let mut raw = RawScores::with_capacity(2 * map.groups().len());
    for name in map.names() {
        for axis in Axis::BOTH {
            let t = select_group(synced_test, name, axis.into(), map)?;
            let g = select_group(gold, name, axis.into(), map)?;
            raw.insert(LimbAxis::new(name, axis), dtw(&t, &g)?.distance);
        }
    }
    Ok(raw)
}

/// Raw per-limb distances of `test` against `gold`, both given as raw recordings.
pub fn raw_distances(
    test: &PoseSequence,
    gold: &PoseSequence,
    map: &LimbGroupMap,
    normalization: Normalization,
) -> Result<RawScores> {
    let gold = prepare(gold, normalization)?;
    let test = prepare(test, normalization)?;
    score(&synchronize_series(&test, &gold)?, &gold, map)
}

/// Mean raw distance of a control cohort, per (group, axis).
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineTable {
    pub entries: RawScores,
    pub cohort_size: usize,
    pub normalization: Normalization,
    /// Entries whose mean was zero and were replaced by the epsilon floor.
    pub floored: Vec<LimbAxis>,
}

impl BaselineTable {
    /// Averages per-control raw distances, flooring zero means at `epsilon`.
    pub fn from_raw(controls: &[RawScores], normalization: Normalization, epsilon: f64) -> Result<Self> {
        let first = controls.first().ok_or(Error::EmptyCohort)?;
        let n = controls.len() as f64;
        let mut entries = RawScores::with_capacity(first.len());
        let mut floored = Vec::new();
        for key in first.keys() {
            let mut sum = 0.0;
            for c in controls {
                sum += c.get(key).copied().ok_or_else(|| Error::MissingBaseline {
                    group: key.group.clone(),
                    axis: key.axis.to_string(),
                })?;
            }
            let mut mean = sum / n;
            if mean <= 0.0 {
                log::warn!(
                    "baseline for ({}, {}) is zero, using epsilon {epsilon:e}",
                    key.group,
                    key.axis
                );
                floored.push(key.clone());
                mean = epsilon;
            }
            entries.insert(key.clone(), mean);
        }
        Ok(Self {
            entries,
            cohort_size: controls.len(),
            normalization,
            floored,
        })
    }

    pub fn get(&self, group: &str, axis: Axis) -> Option<f64> {
        self.entries.get(&LimbAxis::new(group, axis)).copied()
    }

    /// Errors unless every (group, axis) of `map` has an entry.
    pub fn check_covers(&self, map: &LimbGroupMap) -> Result<()> {
        for name in map.names() {
            for axis in Axis::BOTH {
                if self.get(name, axis).is_none() {
                    return Err(Error::MissingBaseline {
                        group: name.to_string(),
                        axis: axis.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Scores every control against `gold` and averages the raw distances.
pub fn compute_baseline(
    controls: &[PoseSequence],
    gold: &PoseSequence,
    map: &LimbGroupMap,
    config: &PipelineConfig,
) -> Result<BaselineTable> {
    config.validate()?;
    if controls.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let gold = prepare(gold, config.normalization)?;
    let raws = controls
        .iter()
        .map(|c| {
            let test = prepare(c, config.normalization)?;
            score(&synchronize_series(&test, &gold)?, &gold, map)
        })
        .collect::<Result<Vec<_>>>()?;
    BaselineTable::from_raw(&raws, config.normalization, config.baseline_epsilon)
}

/// Element-wise `raw / baseline` over the keys of `raw`.
pub fn normalized_scores(raw: &RawScores, baseline: &BaselineTable) -> Result<RawScores> {
    raw.iter()
        .map(|(key, &r)| {
            let b = baseline.entries.get(key).ok_or_else(|| Error::MissingBaseline {
                group: key.group.clone(),
                axis: key.axis.to_string(),
            })?;
            Ok((key.clone(), r / b))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub group: String,
    pub axis: Axis,
    pub raw: f64,
    pub baseline: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupVerdict {
    pub group: String,
    /// Both axis scores at or below the threshold.
    pub good: bool,
}

/// Normalized per-limb scores of one test recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub gold_id: String,
    pub test_id: String,
    pub threshold: f64,
    pub normalization: Normalization,
    pub rows: Vec<ScoreRow>,
    pub verdicts: Vec<GroupVerdict>,
}

impl ScoreReport {
    /// Assembles a report from raw distances and a baseline.
    pub fn from_raw(
        raw: &RawScores,
        baseline: &BaselineTable,
        threshold: f64,
        gold_id: impl Into<String>,
        test_id: impl Into<String>,
    ) -> Result<Self> {
        let scores = normalized_scores(raw, baseline)?;
        let rows: Vec<ScoreRow> = raw
            .iter()
            .map(|(key, &r)| ScoreRow {
                group: key.group.clone(),
                axis: key.axis,
                raw: r,
                baseline: baseline.entries[key],
                score: scores[key],
            })
            .collect();
        let mut verdicts: Vec<GroupVerdict> = Vec::new();
        for row in &rows {
            let ok = row.score <= threshold;
            match verdicts.iter_mut().find(|v| v.group == row.group) {
                Some(v) => v.good &= ok,
                None => verdicts.push(GroupVerdict {
                    group: row.group.clone(),
                    good: ok,
                }),
            }
        }
        Ok(Self {
            gold_id: gold_id.into(),
            test_id: test_id.into(),
            threshold,
            normalization: baseline.normalization,
            rows,
            verdicts,
        })
    }

    fn row(&self, group: &str, axis: Axis) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.group == group && r.axis == axis)
    }

    pub fn score(&self, group: &str, axis: Axis) -> Option<f64> {
        self.row(group, axis).map(|r| r.score)
    }

    pub fn raw(&self, group: &str, axis: Axis) -> Option<f64> {
        self.row(group, axis).map(|r| r.raw)
    }

    pub fn is_good(&self, group: &str) -> Option<bool> {
        self.verdicts.iter().find(|v| v.group == group).map(|v| v.good)
    }

    pub fn mean_score(&self) -> f64 {
        self.rows.iter().map(|r| r.score).sum::<f64>() / self.rows.len() as f64
    }
}

/// Full pipeline for one test recording.
pub fn evaluate(
    test: &PoseSequence,
    gold: &PoseSequence,
    baseline: &BaselineTable,
    map: &LimbGroupMap,
    config: &PipelineConfig,
) -> Result<ScoreReport> {
    config.validate()?;
    baseline.check_covers(map)?;
    if baseline.normalization != config.normalization {
        return Err(Error::InvalidConfig(format!(
            "baseline was computed with {} normalization, pipeline uses {}",
            baseline.normalization, config.normalization
        )));
    }
    let raw = raw_distances(test, gold, map, config.normalization)?;
    ScoreReport::from_raw(&raw, baseline, config.threshold, gold.id_or("gold"), test.id_or("test"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pose::{xy_column, Landmark, LandmarkFrame};

    /// A smooth deterministic recording with distinct per-channel motion.
    fn wavy(frames: usize, phase: f64) -> PoseSequence {
        let frames = (0..frames)
            .map(|f| {
                let t = f as f64 / 10.0 + phase;
                LandmarkFrame::new(
                    (0..33)
                        .map(|l| {
                            let l = l as f64;
                            Landmark::xy(
                                100.0 + 5.0 * l + (t + l).sin() * 3.0,
                                300.0 - 4.0 * l + (0.7 * t + l).cos() * 2.0,
                            )
                        })
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        PoseSequence::new(frames, 30.0).unwrap()
    }

    fn unit_baseline(map: &LimbGroupMap) -> BaselineTable {
        let raw: RawScores = map
            .names()
            .flat_map(|g| Axis::BOTH.map(|a| (LimbAxis::new(g, a), 1.0)))
            .collect();
        BaselineTable::from_raw(&[raw], Normalization::Pose, DEFAULT_BASELINE_EPSILON).unwrap()
    }

    #[test]
    fn identity_scores_are_zero() {
        let map = LimbGroupMap::default();
        let gold = wavy(20, 0.0);
        let report = evaluate(&gold, &gold, &unit_baseline(&map), &map, &PipelineConfig::default()).unwrap();
        assert_eq!(report.rows.len(), 12);
        assert!(report.rows.iter().all(|r| r.raw == 0.0 && r.score == 0.0));
        assert!(report.verdicts.iter().all(|v| v.good));
    }

    #[test]
    fn synchronize_identity_and_half_speed() {
        let gold = normalize(&wavy(15, 0.0), Normalization::Pose).unwrap().sequence;
        let flat = flatten(&gold, AxisSelection::Both);
        assert_eq!(synchronize(&gold, &gold).unwrap(), flat);

        let doubled: Vec<LandmarkFrame> = gold.frames().iter().flat_map(|f| [f.clone(), f.clone()]).collect();
        let slow = PoseSequence::new(doubled, 30.0).unwrap();
        let synced = synchronize(&slow, &gold).unwrap();
        assert_eq!(synced.len(), gold.len());
        for (a, b) in synced.as_slice().iter().zip(flat.as_slice()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn perturbing_one_group_is_local() {
        let map = LimbGroupMap::default();
        let gold = prepare(&wavy(12, 0.3), Normalization::Pose).unwrap();
        let leg_x: Vec<usize> = map
            .get("left_leg")
            .unwrap()
            .landmarks
            .iter()
            .map(|&l| xy_column(l, Axis::X))
            .collect();
        let mut values = gold.as_slice().to_vec();
        for row in values.chunks_exact_mut(gold.dims()) {
            for &c in &leg_x {
                row[c] += 0.25;
            }
        }
        let test = MultiSeries::new(values, gold.len(), gold.dims()).unwrap();
        let raw = score(&test, &gold, &map).unwrap();
        for (key, &v) in &raw {
            if key == &LimbAxis::new("left_leg", Axis::X) {
                assert!(v > 0.0);
            } else {
                assert_eq!(v, 0.0, "{key:?}");
            }
        }
    }

    #[test]
    fn baseline_is_the_mean_and_floors_zero() {
        let key = LimbAxis::new("head", Axis::X);
        let zero = LimbAxis::new("head", Axis::Y);
        let a: RawScores = [(key.clone(), 2.0), (zero.clone(), 0.0)].into_iter().collect();
        let b: RawScores = [(key.clone(), 4.0), (zero.clone(), 0.0)].into_iter().collect();
        let table = BaselineTable::from_raw(&[a, b], Normalization::Pose, 1e-9).unwrap();
        assert_eq!(table.get("head", Axis::X), Some(3.0));
        assert_eq!(table.get("head", Axis::Y), Some(1e-9));
        assert_eq!(table.floored, vec![zero]);
        assert_eq!(table.cohort_size, 2);
        assert!(matches!(
            BaselineTable::from_raw(&[], Normalization::Pose, 1e-9),
            Err(Error::EmptyCohort)
        ));
    }

    #[test]
    fn gold_as_its_own_control_floors_everything() {
        let map = LimbGroupMap::default();
        let gold = wavy(10, 0.0);
        let table = compute_baseline(std::slice::from_ref(&gold), &gold, &map, &PipelineConfig::default()).unwrap();
        assert_eq!(table.floored.len(), 12);
        assert!(table.entries.values().all(|&v| v == DEFAULT_BASELINE_EPSILON));
        assert!(matches!(
            compute_baseline(&[], &gold, &map, &PipelineConfig::default()),
            Err(Error::EmptyCohort)
        ));
    }

    #[test]
    fn missing_baseline_entry_is_an_error() {
        let map = LimbGroupMap::default();
        let mut table = unit_baseline(&map);
        table.entries.shift_remove(&LimbAxis::new("torso", Axis::Y));
        let gold = wavy(8, 0.0);
        assert!(matches!(
            evaluate(&gold, &gold, &table, &map, &PipelineConfig::default()),
            Err(Error::MissingBaseline { .. })
        ));
    }

    #[test]
    fn normalization_mismatch_is_rejected() {
        let map = LimbGroupMap::default();
        let gold = wavy(8, 0.0);
        let config = PipelineConfig {
            normalization: Normalization::PerChannel,
            ..Default::default()
        };
        assert!(matches!(
            evaluate(&gold, &gold, &unit_baseline(&map), &map, &config),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn verdict_uses_worst_axis() {
        let map = LimbGroupMap::default();
        let baseline = unit_baseline(&map);
        let mut raw = baseline.entries.clone();
        raw.insert(LimbAxis::new("head", Axis::Y), 1.5);
        raw.insert(LimbAxis::new("torso", Axis::X), 1.0);
        let report = ScoreReport::from_raw(&raw, &baseline, 1.0, "g", "t").unwrap();
        assert_eq!(report.is_good("head"), Some(false));
        assert_eq!(report.is_good("torso"), Some(true));
        let lenient = ScoreReport::from_raw(&raw, &baseline, 2.0, "g", "t").unwrap();
        assert_eq!(lenient.is_good("head"), Some(true));
    }

    #[test]
    fn score_rejects_bad_shapes() {
        let map = LimbGroupMap::default();
        let a = prepare(&wavy(6, 0.0), Normalization::Pose).unwrap();
        let b = prepare(&wavy(7, 0.0), Normalization::Pose).unwrap();
        assert!(matches!(score(&a, &b, &map), Err(Error::DimensionMismatch { .. })));
        let narrow = a.select_columns(&[0, 1]).unwrap();
        assert!(matches!(score(&narrow, &a, &map), Err(Error::AxisUnavailable { .. })));
    }
}
