use super::NetError;
use crate::cga::{interpolate_as, Multivector, VersorKind};
use crate::skinning::PoseSample;
use std::collections::BTreeMap;

/// Receiver-side per-bone timelines rendered at a fixed delay behind now.
///
/// Bones are buffered independently so that deltas carrying only some bones
/// still contribute samples. Between two samples the bone is interpolated;
/// outside the buffered range the nearest sample is held.
#[derive(Debug, Clone)]
pub struct JitterBuffer {
    delay_ms: f64,
    timelines: Vec<BTreeMap<u32, Multivector>>,
    last_rendered: Option<PoseSample>,
}

impl JitterBuffer {
    pub fn new(bone_count: usize, delay_ms: f64) -> Self {
        Self { delay_ms, timelines: vec![BTreeMap::new(); bone_count], last_rendered: None }
    }

    pub fn delay_ms(&self) -> f64 {
        self.delay_ms
    }

    pub fn bone_count(&self) -> usize {
        self.timelines.len()
    }

    pub fn insert_pose(&mut self, timestamp_ms: u32, pose: &PoseSample) -> Result<(), NetError> {
        if pose.bone_count() != self.timelines.len() {
            return Err(NetError::BoneCountMismatch { expected: self.timelines.len(), got: pose.bone_count() });
        }
        for (line, m) in self.timelines.iter_mut().zip(pose.motors()) {
            line.insert(timestamp_ms, *m);
        }
        Ok(())
    }

    pub fn insert_bone(&mut self, bone: usize, timestamp_ms: u32, motor: Multivector) -> Result<(), NetError> {
        let n = self.timelines.len();
        let line = self.timelines.get_mut(bone).ok_or(NetError::BoneCountMismatch { expected: n, got: bone + 1 })?;
        line.insert(timestamp_ms, motor);
        Ok(())
    }

    pub fn last_rendered(&self) -> Option<&PoseSample> {
        self.last_rendered.as_ref()
    }

    /// Pose at `now_ms - delay`. Fails with `EmptyBuffer` until every bone
    /// has at least one sample.
    pub fn render(&mut self, now_ms: f64) -> Result<PoseSample, NetError> {
        let at = now_ms - self.delay_ms;
        let mut motors = Vec::with_capacity(self.timelines.len());
        for line in &self.timelines {
            motors.push(sample_line(line, at)?);
        }
        let pose = PoseSample::from_trusted(motors);
        self.last_rendered = Some(pose.clone());
        Ok(pose)
    }

    /// Drops samples that can no longer bracket a render at or after
    /// `now_ms - delay`.
    pub fn prune(&mut self, now_ms: f64) {
        let at = now_ms - self.delay_ms;
        if at < 0.0 {
            return;
        }
        let at = at.floor() as u32;
        for line in &mut self.timelines {
            if let Some((&keep, _)) = line.range(..=at).next_back() {
                *line = line.split_off(&keep);
            }
        }
    }
}

fn sample_line(line: &BTreeMap<u32, Multivector>, at: f64) -> Result<Multivector, NetError> {
    let key = if at <= 0.0 { 0 } else { at.floor().min(u32::MAX as f64) as u32 };
    let below = line.range(..=key).next_back();
    let above = line.range(key..).find(|(t, _)| **t as f64 >= at);
    match (below, above) {
        (Some((&ta, a)), Some((&tb, b))) => {
            if ta == tb || at <= ta as f64 {
                return Ok(*a);
            }
            let t = (at - ta as f64) / (tb as f64 - ta as f64);
            interpolate_as(a, b, t, VersorKind::Motor).map_err(NetError::from)
        }
        (Some((_, a)), None) => Ok(*a),
        (None, Some((_, b))) => Ok(*b),
        (None, None) => Err(NetError::EmptyBuffer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cga::{translator, Vec3};

    fn tpose(x: f64) -> PoseSample {
        PoseSample::new(vec![translator(Vec3::new(x, 0.0, 0.0))]).unwrap()
    }

    #[test]
    fn empty_buffer_errors() {
        let mut jb = JitterBuffer::new(1, 100.0);
        assert!(matches!(jb.render(500.0), Err(NetError::EmptyBuffer)));
    }

    #[test]
    fn renders_samples_and_midpoints() {
        let mut jb = JitterBuffer::new(1, 100.0);
        jb.insert_pose(1000, &tpose(0.0)).unwrap();
        jb.insert_pose(1500, &tpose(2.0)).unwrap();
        assert_eq!(jb.render(1100.0).unwrap(), tpose(0.0));
        let mid = jb.render(1350.0).unwrap();
        assert!(mid.motors()[0].max_abs_diff(&tpose(1.0).motors()[0]) < 1e-12);
        // Past the newest sample the buffer holds rather than extrapolates.
        assert_eq!(jb.render(9000.0).unwrap(), tpose(2.0));
        assert_eq!(jb.render(0.0).unwrap(), tpose(0.0));
    }

    #[test]
    fn prune_keeps_bracketing_sample() {
        let mut jb = JitterBuffer::new(1, 0.0);
        for k in 0..10 {
            jb.insert_pose(k * 100, &tpose(k as f64)).unwrap();
        }
        jb.prune(450.0);
        let mid = jb.render(450.0).unwrap();
        assert!(mid.motors()[0].max_abs_diff(&tpose(4.5).motors()[0]) < 1e-12);
    }
}
