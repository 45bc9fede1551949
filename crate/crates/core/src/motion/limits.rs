//! Per-DoF and per-segment biomechanical limits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motion::skeleton::SkeletonDefinition;
use crate::scalar::Real;

fn unit_weight<T: Real>() -> T {
    T::one()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DofLimit<T> {
    pub dof: String,
    /// Degrees.
    pub rom_min: T,
    /// Degrees.
    pub rom_max: T,
    /// Degrees per second.
    pub angular_velocity_max: T,
    /// Degrees per second squared.
    pub angular_acceleration_max: T,
    /// Squared jerk accumulated over the smoothness window, (deg/s³)².
    pub jerk_energy_max: T,
    #[serde(default = "unit_weight")]
    pub weight: T,
}

impl<T: Real> DofLimit<T> {
    /// Half of the range of motion.
    pub fn half_range(&self) -> T {
        T::lit(0.5) * (self.rom_max - self.rom_min)
    }

    pub fn midpoint(&self) -> T {
        T::lit(0.5) * (self.rom_max + self.rom_min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SegmentLimit<T> {
    pub segment: String,
    /// Meters per second.
    pub linear_velocity_max: T,
    #[serde(default = "unit_weight")]
    pub weight: T,
}

/// Limit table whose DoF rows follow the skeleton's joint-angle column order and whose
/// segment rows follow the skeleton's segment order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LimitTable<T> {
    pub dofs: Vec<DofLimit<T>>,
    pub segments: Vec<SegmentLimit<T>>,
}

impl<T: Real> LimitTable<T> {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let table: Self = serde_json::from_str(text).map_err(Error::from_json)?;
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: T| x.is_finite() && x > T::zero();
        for d in &self.dofs {
            if !(d.rom_min.is_finite() && d.rom_max.is_finite() && d.rom_min < d.rom_max) {
                return Err(Error::Validation(format!("DoF '{}' requires rom_min < rom_max", d.dof)));
            }
            if !(positive(d.angular_velocity_max)
                && positive(d.angular_acceleration_max)
                && positive(d.jerk_energy_max))
            {
                return Err(Error::Validation(format!("DoF '{}' has a non-positive kinematic limit", d.dof)));
            }
        }
        for s in &self.segments {
            if !positive(s.linear_velocity_max) {
                return Err(Error::Validation(format!("segment '{}' has a non-positive velocity limit", s.segment)));
            }
        }
        check_weights(self.dofs.iter().map(|d| d.weight), "DoF")?;
        check_weights(self.segments.iter().map(|s| s.weight), "segment")?;
        Ok(())
    }

    /// Validates the table and checks that its rows line up with `skeleton`.
    pub fn check_against(&self, skeleton: &SkeletonDefinition<T>) -> Result<()> {
        self.validate()?;
        let names = skeleton.dof_names();
        if names.len() != self.dofs.len() || names.iter().zip(&self.dofs).any(|(n, d)| *n != d.dof) {
            return Err(Error::Schema("limit table DoF rows do not match the skeleton DoF order".into()));
        }
        if skeleton.segments.len() != self.segments.len()
            || skeleton.segments.iter().zip(&self.segments).any(|(s, l)| s.name != l.segment)
        {
            return Err(Error::Schema("limit table segment rows do not match the skeleton segment order".into()));
        }
        Ok(())
    }

    pub fn dof(&self, name: &str) -> Option<&DofLimit<T>> {
        self.dofs.iter().find(|d| d.dof == name)
    }

    /// Every limit multiplied by `factor`: magnitudes scale directly, ROM intervals widen
    /// or shrink about their midpoint.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        if !(factor.is_finite() && factor > T::zero()) {
            return Err(Error::Config(format!("limit scale must be positive, got {factor}")));
        }
        let dofs = self
            .dofs
            .iter()
            .map(|d| {
                let (mid, half) = (d.midpoint(), d.half_range() * factor);
                DofLimit {
                    dof: d.dof.clone(),
                    rom_min: mid - half,
                    rom_max: mid + half,
                    angular_velocity_max: d.angular_velocity_max * factor,
                    angular_acceleration_max: d.angular_acceleration_max * factor,
                    jerk_energy_max: d.jerk_energy_max * factor,
                    weight: d.weight,
                }
            })
            .collect();
        let segments = self
            .segments
            .iter()
            .map(|s| SegmentLimit {
                segment: s.segment.clone(),
                linear_velocity_max: s.linear_velocity_max * factor,
                weight: s.weight,
            })
            .collect();
        Ok(Self { dofs, segments })
    }
}

fn check_weights<T: Real>(weights: impl Iterator<Item = T>, what: &str) -> Result<()> {
    let mut sum = T::zero();
    let mut any = false;
    for w in weights {
        if !(w.is_finite() && w >= T::zero()) {
            return Err(Error::Validation(format!("{what} weights must be nonnegative")));
        }
        sum = sum + w;
        any = true;
    }
    if any && sum <= T::zero() {
        return Err(Error::Validation(format!("{what} weights must have a positive sum")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(min: f64, max: f64) -> DofLimit<f64> {
        DofLimit {
            dof: "knee".into(),
            rom_min: min,
            rom_max: max,
            angular_velocity_max: 700.0,
            angular_acceleration_max: 15000.0,
            jerk_energy_max: 4.5e11,
            weight: 1.0,
        }
    }

    #[test]
    fn inverted_rom_is_rejected() {
        let t = LimitTable { dofs: vec![row(10.0, 5.0)], segments: vec![] };
        assert!(matches!(t.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn zero_weight_sum_is_rejected() {
        let mut r = row(0.0, 120.0);
        r.weight = 0.0;
        let t = LimitTable { dofs: vec![r], segments: vec![] };
        assert!(matches!(t.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn scaling_widens_about_midpoint() {
        let t = LimitTable { dofs: vec![row(0.0, 120.0)], segments: vec![] };
        let s = t.scaled(2.0).unwrap();
        assert_eq!((s.dofs[0].rom_min, s.dofs[0].rom_max), (-60.0, 180.0));
        assert_eq!(s.dofs[0].angular_velocity_max, 1400.0);
        assert!(t.scaled(0.0).is_err());
    }
}
