use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pose::LANDMARK_COUNT;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimbGroup {
    pub name: String,
    pub landmarks: Vec<usize>,
}

/// Named, non-overlapping groups of landmark indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimbGroupMap {
    groups: Vec<LimbGroup>,
}

impl LimbGroupMap {
    pub fn new(groups: Vec<LimbGroup>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidGroupMap("no groups".into()));
        }
        let mut owner: [Option<&str>; LANDMARK_COUNT] = [None; LANDMARK_COUNT];
        for (k, g) in groups.iter().enumerate() {
            if g.landmarks.is_empty() {
                return Err(Error::InvalidGroupMap(format!("group `{}` is empty", g.name)));
            }
            if groups[..k].iter().any(|other| other.name == g.name) {
                return Err(Error::InvalidGroupMap(format!("duplicate group name `{}`", g.name)));
            }
            for &l in &g.landmarks {
                let slot = owner
                    .get_mut(l)
                    .ok_or_else(|| Error::InvalidGroupMap(format!("landmark {l} in `{}` is out of range", g.name)))?;
                if let Some(prev) = slot {
                    return Err(Error::InvalidGroupMap(format!(
                        "landmark {l} is in both `{prev}` and `{}`",
                        g.name
                    )));
                }
                *slot = Some(&g.name);
            }
        }
        Ok(Self { groups })
    }

    pub fn groups(&self) -> &[LimbGroup] {
        &self.groups
    }

    pub fn get(&self, name: &str) -> Option<&LimbGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().map(|g| g.name.as_str())
    }
}

impl Default for LimbGroupMap {
    /// Head, torso, both arms and both legs of the 33-point topology.
    fn default() -> Self {
        let g = |name: &str, landmarks: &[usize]| LimbGroup {
            name: name.to_string(),
            landmarks: landmarks.to_vec(),
        };
        Self::new(vec![
            g("head", &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]),
            g("torso", &[11, 12, 23, 24]),
            g("left_arm", &[13, 15, 17, 19, 21]),
            g("right_arm", &[14, 16, 18, 20, 22]),
            g("left_leg", &[25, 27, 29, 31]),
            g("right_leg", &[26, 28, 30, 32]),
        ])
        .expect("default grouping is a valid partition")
    }
}
