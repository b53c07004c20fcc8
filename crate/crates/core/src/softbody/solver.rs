use super::{ParticleBody, ShapeMatchState, SoftError, COLLINEAR, POLAR_MAX_ITER, POLAR_TOLERANCE};
use crate::cga::{rotor_from_quaternion, Vec3};
use nalgebra::{Matrix3, Rotation3, UnitQuaternion};

pub(super) struct Fit {
    pub(super) rotation: Rotation3<f64>,
    pub(super) centroid: Vec3,
    pub(super) scale: f64,
}

impl ParticleBody {
    pub(super) fn fit(&self, cluster: usize, points: &[Vec3], weights: &[f64]) -> Result<Fit, SoftError> {
        let c = &self.clusters[cluster];
        let centroid = Self::weighted_mean(&c.indices, points, weights);
        let mut a = Matrix3::zeros();
        let mut qq = 0.0;
        for &i in &c.indices {
            let q = self.rest[i] - c.rest_centroid;
            a += (points[i] - centroid) * q.transpose() * weights[i];
            qq += weights[i] * q.norm_squared();
        }
        let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
        sv.sort_by(|x, y| y.total_cmp(x));
        if !(sv[0] > 0.0) || sv[1] <= COLLINEAR * sv[0] {
            return Err(SoftError::DegenerateCluster { cluster });
        }
        let rotation = Rotation3::from_matrix_eps(&a, POLAR_TOLERANCE, POLAR_MAX_ITER, c.rotation);
        let scale = if self.dilation { (rotation.matrix().transpose() * a).trace() / qq } else { 1.0 };
        Ok(Fit { rotation, centroid, scale })
    }

    fn state_from(&self, cluster: usize, fit: &Fit) -> ShapeMatchState {
        ShapeMatchState {
            rotor: rotor_from_quaternion(&UnitQuaternion::from_rotation_matrix(&fit.rotation)),
            centroid: fit.centroid,
            rest_centroid: self.clusters[cluster].rest_centroid,
            scale: self.dilation.then_some(fit.scale),
        }
    }

    /// Best-fit rotation and centroid of one cluster at the current positions.
    pub fn shape_match(&self, cluster: usize) -> Result<ShapeMatchState, SoftError> {
        if cluster >= self.clusters.len() {
            return Err(SoftError::InvalidParameter(format!("cluster {cluster} does not exist")));
        }
        let fit = self.fit(cluster, &self.positions(), &self.weights())?;
        Ok(self.state_from(cluster, &fit))
    }

    /// Mass-weighted rigid fit of the whole body against its rest shape,
    /// ignoring cluster structure. Scale is fitted when dilation is enabled.
    pub fn rigid_fit(&self) -> Result<ShapeMatchState, SoftError> {
        let masses: Vec<f64> = self.particles.iter().map(|p| p.mass).collect();
        let all: Vec<usize> = (0..self.particles.len()).collect();
        let whole = super::Cluster {
            indices: all.clone(),
            rest_centroid: Self::weighted_mean(&all, &self.rest, &masses),
            rotation: self.clusters.first().map(|c| c.rotation).unwrap_or_else(Rotation3::identity),
        };
        let mut probe = self.clone();
        probe.clusters = vec![whole];
        let fit = probe.fit(0, &self.positions(), &masses)?;
        Ok(probe.state_from(0, &fit))
    }

    /// Per-particle mean of `goal - x` over the particle's clusters.
    fn corrections(&mut self, points: &[Vec3], update_seeds: bool) -> Result<Vec<Vec3>, SoftError> {
        let weights = self.weights();
        let counts = self.memberships();
        let mut out = vec![Vec3::zeros(); points.len()];
        for ci in 0..self.clusters.len() {
            let fit = self.fit(ci, points, &weights)?;
            let c = &self.clusters[ci];
            for &i in &c.indices {
                let goal = fit.centroid + fit.rotation * (self.rest[i] - c.rest_centroid) * fit.scale;
                out[i] += (goal - points[i]) / counts[i] as f64;
            }
            if update_seeds {
                self.clusters[ci].rotation = fit.rotation;
            }
        }
        Ok(out)
    }

    /// `goal - x` per particle at the current positions.
    pub fn goal_corrections(&self) -> Result<Vec<Vec3>, SoftError> {
        self.clone().corrections(&self.positions(), false)
    }

    /// `½ Σ m |goal - x|²` at the current positions.
    pub fn deformation_energy(&self) -> Result<f64, SoftError> {
        let d = self.goal_corrections()?;
        Ok(self.particles.iter().zip(&d).map(|(p, d)| 0.5 * p.mass * d.norm_squared()).sum())
    }

    /// Rigid-body velocity field of a cluster (linear + angular momentum fit).
    fn rigid_velocities(&self, cluster: usize, points: &[Vec3], weights: &[f64]) -> Vec<Vec3> {
        let c = &self.clusters[cluster];
        let w: f64 = c.indices.iter().map(|&i| weights[i]).sum();
        let centroid = Self::weighted_mean(&c.indices, points, weights);
        let lin = c.indices.iter().map(|&i| self.particles[i].velocity * weights[i]).sum::<Vec3>() / w;
        let mut l = Vec3::zeros();
        let mut inertia = Matrix3::zeros();
        for &i in &c.indices {
            let r = points[i] - centroid;
            l += r.cross(&(self.particles[i].velocity - lin)) * weights[i];
            inertia += (Matrix3::identity() * r.norm_squared() - r * r.transpose()) * weights[i];
        }
        let omega = inertia.try_inverse().map(|inv| inv * l).unwrap_or_else(Vec3::zeros);
        c.indices.iter().map(|&i| lin + omega.cross(&(points[i] - centroid))).collect()
    }

    /// One semi-implicit step.
    ///
    /// Order: gravity, handle and grab servos, prediction, shape-matching
    /// velocity correction `α (g - x) / dt`, rigid-relative damping, position
    /// update, collisions. Servo velocities act for this step only.
    pub fn step(&mut self, dt: f64, gravity: Vec3) -> Result<(), SoftError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(SoftError::InvalidDt(dt));
        }
        let n = self.particles.len();
        let mut servo = vec![Vec3::zeros(); n];
        if let Some(h) = self.center {
            let pull = (h.target - self.centroid()) * h.strength;
            for s in &mut servo {
                *s += pull;
            }
        }
        for (_, g) in &self.grabs {
            servo[g.index] += (g.target - self.particles[g.index].position) * g.strength;
        }
        for p in self.particles.iter_mut().filter(|p| !p.pinned) {
            p.velocity += gravity * dt;
        }
        let predicted: Vec<Vec3> = self
            .particles
            .iter()
            .zip(&servo)
            .map(|(p, s)| if p.pinned { p.position } else { p.position + (p.velocity + s) * dt })
            .collect();
        let corr = self.corrections(&predicted, true)?;
        for (p, d) in self.particles.iter_mut().zip(&corr) {
            if !p.pinned {
                p.velocity += d * (self.stiffness / dt);
            }
        }
        if self.damping > 0.0 {
            let weights = self.weights();
            let counts = self.memberships();
            let mut dv = vec![Vec3::zeros(); n];
            for ci in 0..self.clusters.len() {
                let rigid = self.rigid_velocities(ci, &predicted, &weights);
                for (&i, vr) in self.clusters[ci].indices.iter().zip(rigid) {
                    dv[i] += (vr - self.particles[i].velocity) / counts[i] as f64;
                }
            }
            for (p, d) in self.particles.iter_mut().zip(&dv) {
                if !p.pinned {
                    p.velocity += d * self.damping;
                }
            }
        }
        for (p, s) in self.particles.iter_mut().zip(&servo) {
            if !p.pinned {
                p.position += (p.velocity + s) * dt;
            }
        }
        self.collide();
        Ok(())
    }

    fn collide(&mut self) {
        for p in self.particles.iter_mut().filter(|p| !p.pinned) {
            if let Some(h) = self.ground {
                if p.position.y < h {
                    p.position.y = h;
                    p.velocity.y = p.velocity.y.max(0.0);
                }
            }
            for s in &self.spheres {
                let d = p.position - s.center;
                let dist = d.norm();
                if dist < s.radius && dist > 0.0 {
                    let normal = d / dist;
                    p.position = s.center + normal * s.radius;
                    let vn = p.velocity.dot(&normal);
                    if vn < 0.0 {
                        p.velocity -= normal * vn;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Particle, ParticleBody, SoftError};
    use crate::cga::{rotor, translator, Vec3};

    fn cube(n: usize, spacing: f64) -> ParticleBody {
        let mut ps = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    ps.push(Particle::new(Vec3::new(i as f64, j as f64, k as f64) * spacing, 1.0));
                }
            }
        }
        ParticleBody::new(ps, None, 0.5, 0.0).unwrap()
    }

    #[test]
    fn rest_is_a_fixed_point() {
        let mut b = cube(3, 0.1);
        let before = b.clone();
        for _ in 0..10 {
            b.step(1.0 / 60.0, Vec3::zeros()).unwrap();
        }
        for (p, q) in b.particles().iter().zip(before.particles()) {
            assert!((p.position - q.position).norm() < 1e-12);
            assert!(p.velocity.norm() < 1e-12);
        }
    }

    #[test]
    fn rotated_body_extracts_the_rotor() {
        let mut b = cube(3, 0.1);
        let r = rotor(Vec3::new(1.0, 2.0, 2.0) / 3.0, 1.1).unwrap();
        b.transform(&(translator(Vec3::new(0.3, -1.0, 2.0)) * r), false).unwrap();
        let s = b.shape_match(0).unwrap();
        assert!(s.rotor.max_abs_diff(&r).min(s.rotor.max_abs_diff(&-r)) < 1e-8);
        assert!(b.deformation_energy().unwrap() < 1e-20);
    }

    #[test]
    fn free_fall_is_rigid() {
        let mut b = cube(3, 0.1);
        for _ in 0..30 {
            b.step(1.0 / 60.0, Vec3::new(0.0, -9.81, 0.0)).unwrap();
        }
        let v0 = b.particles()[0].velocity;
        assert!(b.particles().iter().all(|p| (p.velocity - v0).norm() < 1e-12));
        assert!((v0.y + 9.81 * 0.5).abs() < 1e-9);
    }

    #[test]
    fn collinear_cluster_is_rejected() {
        let ps = (0..4).map(|i| Particle::new(Vec3::new(i as f64, 0.0, 0.0), 1.0)).collect();
        assert_eq!(ParticleBody::new(ps, None, 0.5, 0.0).unwrap_err(), SoftError::DegenerateCluster { cluster: 0 });
        assert!(matches!(cube(2, 1.0).step(0.0, Vec3::zeros()), Err(SoftError::InvalidDt(_))));
    }

    #[test]
    fn pinned_particles_do_not_move() {
        let mut b = cube(3, 0.1);
        b.set_pinned(0, true).unwrap();
        let p0 = b.particles()[0].position;
        for _ in 0..50 {
            b.step(1.0 / 60.0, Vec3::new(0.0, -9.81, 0.0)).unwrap();
        }
        assert_eq!(b.particles()[0].position, p0);
    }
}
