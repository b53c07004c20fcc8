use super::{Cluster, ParticleBody, SoftError};
use crate::cga::Vec3;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TearReport {
    /// Indices of clusters created by the tear.
    pub new_clusters: Vec<usize>,
    /// Particles that left every cluster.
    pub detached: Vec<usize>,
}

impl TearReport {
    pub fn is_empty(&self) -> bool {
        self.new_clusters.is_empty() && self.detached.is_empty()
    }
}

impl ParticleBody {
    fn rest_rms_radius(&self, cluster: usize) -> f64 {
        let c = &self.clusters[cluster];
        let sum: f64 = c.indices.iter().map(|&i| (self.rest[i] - c.rest_centroid).norm_squared()).sum();
        (sum / c.indices.len() as f64).sqrt()
    }

    /// Splits off particles whose distance to their goal exceeds
    /// `threshold` times their rest distance to the cluster centroid. The rest
    /// distance is floored at half the cluster's RMS rest radius so particles
    /// near the centroid do not tear on any centroid shift.
    ///
    /// Torn particles of a cluster form one new cluster, or become free
    /// particles when they cannot form a valid cluster. A remainder that is no
    /// longer a valid cluster is freed as well, and a cluster whose particles
    /// all tear is dissolved. Freed particles stay in any other cluster.
    pub fn tear(&mut self, threshold: f64) -> Result<TearReport, SoftError> {
        if !(threshold > 1.0) || !threshold.is_finite() {
            return Err(SoftError::InvalidParameter(format!("tear threshold {threshold} must exceed 1")));
        }
        let positions = self.positions();
        let weights = self.weights();
        let mut splits = Vec::new();
        for ci in 0..self.clusters.len() {
            let fit = self.fit(ci, &positions, &weights)?;
            let c = &self.clusters[ci];
            let floor = 0.5 * self.rest_rms_radius(ci);
            let torn: Vec<usize> = c
                .indices
                .iter()
                .copied()
                .filter(|&i| {
                    let q = self.rest[i] - c.rest_centroid;
                    let goal: Vec3 = fit.centroid + fit.rotation * q * fit.scale;
                    (positions[i] - goal).norm() > threshold * q.norm().max(floor)
                })
                .collect();
            if !torn.is_empty() {
                splits.push((ci, torn, fit.rotation));
            }
        }
        let mut report = TearReport::default();
        if splits.is_empty() {
            return Ok(report);
        }
        let mut kept = Vec::with_capacity(self.clusters.len());
        let mut added = Vec::new();
        let mut freed = Vec::new();
        let mut next = splits.iter().peekable();
        for (ci, cluster) in std::mem::take(&mut self.clusters).into_iter().enumerate() {
            let Some((_, torn, rotation)) = next.next_if(|s| s.0 == ci) else {
                kept.push(cluster);
                continue;
            };
            let remainder: Vec<usize> = cluster.indices.iter().copied().filter(|i| !torn.contains(i)).collect();
            if remainder.is_empty() {
                // Entirely over-strained: the cluster breaks up.
                freed.extend(torn.iter().copied());
                continue;
            }
            if self.cluster_is_valid(&remainder) {
                kept.push(Cluster { indices: remainder, ..cluster });
            } else {
                freed.extend(remainder);
            }
            if self.cluster_is_valid(torn) {
                added.push(Cluster { indices: torn.clone(), rest_centroid: Vec3::zeros(), rotation: *rotation });
            } else {
                freed.extend(torn.iter().copied());
            }
        }
        let first_new = kept.len();
        kept.extend(added);
        report.new_clusters = (first_new..kept.len()).collect();
        self.clusters = kept;
        self.refresh_clusters();
        let members = self.memberships();
        freed.sort_unstable();
        freed.dedup();
        report.detached = freed.into_iter().filter(|&i| members[i] == 0).collect();
        Ok(report)
    }
}

impl ParticleBody {
    /// Connected pieces: particles sharing a cluster are connected; a particle
    /// in no cluster is its own piece. Pieces are sorted by lowest index.
    pub fn pieces(&self) -> Vec<Vec<usize>> {
        let n = self.particles.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for c in &self.clusters {
            for w in c.indices.windows(2) {
                let (a, b) = (root(&mut parent, w[0]), root(&mut parent, w[1]));
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let r = root(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Particle, ParticleBody};
    use crate::cga::Vec3;

    fn block() -> ParticleBody {
        let mut ps = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    ps.push(Particle::new(Vec3::new(i as f64, j as f64, k as f64), 1.0));
                }
            }
        }
        ParticleBody::new(ps, None, 0.5, 0.0).unwrap()
    }

    #[test]
    fn rest_body_does_not_tear() {
        let mut b = block();
        assert!(b.tear(2.0).unwrap().is_empty());
        assert_eq!(b.clusters().len(), 1);
    }

    #[test]
    fn far_particle_is_detached() {
        let mut b = block();
        let c = b.clusters()[0].rest_centroid();
        let p = b.particles()[0].position;
        b.set_position(0, c + (p - c) * 10.0).unwrap();
        let r = b.tear(2.0).unwrap();
        assert_eq!(r.detached, vec![0], "{r:?}");
        assert_eq!(b.clusters().len(), 1);
        assert_eq!(b.clusters()[0].indices().len(), 26);
        assert!(b.rest_centroid_defect() < 1e-12);
    }
}
