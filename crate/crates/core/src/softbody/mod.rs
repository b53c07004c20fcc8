//! Shape-matching particle soft bodies with a centre handle, per-particle
//! grabs and strain-based tearing.

pub mod file;
mod solver;
mod tear;

pub use tear::TearReport;

use crate::cga::{translator, CgaError, Multivector, Vec3};
use nalgebra::{Matrix3, Rotation3};
use thiserror::Error;

/// Polar decomposition stops when the angular update falls below this.
pub const POLAR_TOLERANCE: f64 = 1e-10;
/// Iteration cap of the polar decomposition.
pub const POLAR_MAX_ITER: usize = 32;
/// A cluster is collinear when its second singular value is below this
/// fraction of the first.
pub const COLLINEAR: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SoftError {
    #[error("time step must be finite and positive, got {0}")]
    InvalidDt(f64),
    #[error("particle index {index} out of range ({count} particles)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("cluster {cluster} is degenerate (collinear or coincident particles)")]
    DegenerateCluster { cluster: usize },
    #[error("particle {index}: mass must be finite and positive, got {mass}")]
    BadMass { index: usize, mass: f64 },
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Cga(#[from] CgaError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub position: Vec3,
    pub velocity: Vec3,
    pub mass: f64,
    pub pinned: bool,
}

impl Particle {
    pub fn new(position: Vec3, mass: f64) -> Self {
        Self { position, velocity: Vec3::zeros(), mass, pinned: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    indices: Vec<usize>,
    rest_centroid: Vec3,
    rotation: Rotation3<f64>,
}

impl Cluster {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn rest_centroid(&self) -> Vec3 {
        self.rest_centroid
    }
}

/// Servo that pulls the body centroid toward a target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterHandle {
    pub target: Vec3,
    pub strength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grab {
    pub index: usize,
    pub target: Vec3,
    pub strength: f64,
}

/// Identifies a grab for later release.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GrabId(u64);

/// Best rigid (optionally scaled) fit of a cluster: `x = c + s R (x0 - c0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeMatchState {
    pub rotor: Multivector,
    pub centroid: Vec3,
    pub rest_centroid: Vec3,
    pub scale: Option<f64>,
}

impl ShapeMatchState {
    /// Motor `T(c) R T(-c0)` taking rest positions to the fitted pose. Scale
    /// is not included.
    pub fn motor(&self) -> Multivector {
        translator(self.centroid) * self.rotor * translator(-self.rest_centroid)
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        crate::cga::rotor_to_quaternion(&self.rotor).to_rotation_matrix().into_inner()
    }

    /// Goal position of a particle with rest position `rest`.
    pub fn goal(&self, rest: Vec3) -> Vec3 {
        self.centroid + self.rotation() * (rest - self.rest_centroid) * self.scale.unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleBody {
    particles: Vec<Particle>,
    rest: Vec<Vec3>,
    clusters: Vec<Cluster>,
    stiffness: f64,
    damping: f64,
    dilation: bool,
    ground: Option<f64>,
    spheres: Vec<Sphere>,
    center: Option<CenterHandle>,
    grabs: Vec<(GrabId, Grab)>,
    next_grab: u64,
}

impl ParticleBody {
    /// Rest shape is the initial particle layout. `clusters = None` puts every
    /// particle in one cluster.
    pub fn new(
        particles: Vec<Particle>,
        clusters: Option<Vec<Vec<usize>>>,
        stiffness: f64,
        damping: f64,
    ) -> Result<Self, SoftError> {
        if !(stiffness > 0.0 && stiffness <= 1.0) {
            return Err(SoftError::InvalidParameter(format!("stiffness {stiffness} not in (0, 1]")));
        }
        if !(0.0..1.0).contains(&damping) {
            return Err(SoftError::InvalidParameter(format!("damping {damping} not in [0, 1)")));
        }
        for (index, p) in particles.iter().enumerate() {
            if !(p.mass > 0.0) || !p.mass.is_finite() {
                return Err(SoftError::BadMass { index, mass: p.mass });
            }
            if !p.position.iter().chain(p.velocity.iter()).all(|c| c.is_finite()) {
                return Err(SoftError::InvalidBody(format!("particle {index} has non-finite state")));
            }
        }
        let n = particles.len();
        let lists = clusters.unwrap_or_else(|| vec![(0..n).collect()]);
        let mut body = Self {
            rest: particles.iter().map(|p| p.position).collect(),
            particles,
            clusters: Vec::new(),
            stiffness,
            damping,
            dilation: false,
            ground: None,
            spheres: Vec::new(),
            center: None,
            grabs: Vec::new(),
            next_grab: 0,
        };
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            if let Some(&index) = list.iter().find(|&&i| i >= n) {
                return Err(SoftError::IndexOutOfRange { index, count: n });
            }
            body.clusters.push(Cluster {
                indices: list,
                rest_centroid: Vec3::zeros(),
                rotation: Rotation3::identity(),
            });
        }
        body.refresh_clusters();
        for c in 0..body.clusters.len() {
            if !body.cluster_is_valid(&body.clusters[c].indices) {
                return Err(SoftError::DegenerateCluster { cluster: c });
            }
        }
        Ok(body)
    }

    pub fn with_ground(mut self, height: f64) -> Self {
        self.ground = Some(height);
        self
    }

    pub fn with_sphere(mut self, sphere: Sphere) -> Self {
        self.spheres.push(sphere);
        self
    }

    /// Enables the uniform scale term of the shape match.
    pub fn with_dilation(mut self, enabled: bool) -> Self {
        self.dilation = enabled;
        self
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn particle_count(&self) -> usize {
        self.particles.len()
    }

    pub fn rest(&self) -> &[Vec3] {
        &self.rest
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn dilation(&self) -> bool {
        self.dilation
    }

    pub fn ground(&self) -> Option<f64> {
        self.ground
    }

    pub fn spheres(&self) -> &[Sphere] {
        &self.spheres
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.particles.iter().map(|p| p.position).collect()
    }

    fn check_index(&self, index: usize) -> Result<(), SoftError> {
        if index >= self.particles.len() {
            return Err(SoftError::IndexOutOfRange { index, count: self.particles.len() });
        }
        Ok(())
    }

    pub fn set_position(&mut self, index: usize, position: Vec3) -> Result<(), SoftError> {
        self.check_index(index)?;
        self.particles[index].position = position;
        Ok(())
    }

    pub fn set_velocity(&mut self, index: usize, velocity: Vec3) -> Result<(), SoftError> {
        self.check_index(index)?;
        self.particles[index].velocity = velocity;
        Ok(())
    }

    pub fn set_pinned(&mut self, index: usize, pinned: bool) -> Result<(), SoftError> {
        self.check_index(index)?;
        self.particles[index].pinned = pinned;
        if pinned {
            self.particles[index].velocity = Vec3::zeros();
        }
        Ok(())
    }

    /// Moves every particle (and rotates its velocity) by a rigid motor.
    /// With `include_rest` the rest shape moves too.
    pub fn transform(&mut self, motor: &Multivector, include_rest: bool) -> Result<(), SoftError> {
        let (lin, t) = crate::cga::versor_to_affine(motor)?;
        for p in &mut self.particles {
            p.position = lin * p.position + t;
            p.velocity = lin * p.velocity;
        }
        if include_rest {
            for r in &mut self.rest {
                *r = lin * *r + t;
            }
            self.refresh_clusters();
        }
        Ok(())
    }

    /// Adds a velocity servo `strength (target - x)` on one particle.
    pub fn grab_particle(&mut self, index: usize, target: Vec3, strength: f64) -> Result<GrabId, SoftError> {
        self.check_index(index)?;
        if !(strength >= 0.0) || !strength.is_finite() {
            return Err(SoftError::InvalidParameter(format!("grab strength {strength}")));
        }
        let id = GrabId(self.next_grab);
        self.next_grab += 1;
        self.grabs.push((id, Grab { index, target, strength }));
        Ok(id)
    }

    /// Moves an existing grab's target.
    pub fn move_grab(&mut self, id: GrabId, target: Vec3) -> bool {
        match self.grabs.iter_mut().find(|(g, _)| *g == id) {
            Some((_, g)) => {
                g.target = target;
                true
            }
            None => false,
        }
    }

    pub fn release_grab(&mut self, id: GrabId) -> bool {
        let before = self.grabs.len();
        self.grabs.retain(|(g, _)| *g != id);
        self.grabs.len() != before
    }

    pub fn grabs(&self) -> impl Iterator<Item = &Grab> {
        self.grabs.iter().map(|(_, g)| g)
    }

    /// Uniform velocity servo `strength (target - centroid)` on every free
    /// particle.
    pub fn set_center_target(&mut self, target: Vec3, strength: f64) -> Result<(), SoftError> {
        if !(strength >= 0.0) || !strength.is_finite() {
            return Err(SoftError::InvalidParameter(format!("center strength {strength}")));
        }
        self.center = Some(CenterHandle { target, strength });
        Ok(())
    }

    pub fn clear_center_target(&mut self) {
        self.center = None;
    }

    pub fn center_handle(&self) -> Option<CenterHandle> {
        self.center
    }

    /// Mass-weighted centroid of all particles.
    pub fn centroid(&self) -> Vec3 {
        let m: f64 = self.particles.iter().map(|p| p.mass).sum();
        self.particles.iter().map(|p| p.position * p.mass).sum::<Vec3>() / m
    }

    pub fn momentum(&self) -> Vec3 {
        self.particles.iter().map(|p| p.velocity * p.mass).sum()
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.particles.iter().map(|p| 0.5 * p.mass * p.velocity.norm_squared()).sum()
    }

    /// Number of clusters containing each particle.
    fn memberships(&self) -> Vec<usize> {
        let mut counts = vec![0; self.particles.len()];
        for c in &self.clusters {
            for &i in &c.indices {
                counts[i] += 1;
            }
        }
        counts
    }

    /// Shape-matching weight of each particle: its mass split evenly across
    /// the clusters that contain it.
    fn weights(&self) -> Vec<f64> {
        self.memberships()
            .iter()
            .zip(&self.particles)
            .map(|(&n, p)| if n == 0 { 0.0 } else { p.mass / n as f64 })
            .collect()
    }

    fn weighted_mean(indices: &[usize], points: &[Vec3], weights: &[f64]) -> Vec3 {
        let w: f64 = indices.iter().map(|&i| weights[i]).sum();
        indices.iter().map(|&i| points[i] * weights[i]).sum::<Vec3>() / w
    }

    /// Recomputes rest centroids after membership or rest-shape changes.
    fn refresh_clusters(&mut self) {
        let weights = self.weights();
        for c in &mut self.clusters {
            c.rest_centroid = Self::weighted_mean(&c.indices, &self.rest, &weights);
        }
    }

    /// At least three particles whose rest layout is not collinear.
    fn cluster_is_valid(&self, indices: &[usize]) -> bool {
        if indices.len() < 3 {
            return false;
        }
        let c = indices.iter().map(|&i| self.rest[i]).sum::<Vec3>() / indices.len() as f64;
        let mut cov = Matrix3::zeros();
        for &i in indices {
            let q = self.rest[i] - c;
            cov += q * q.transpose();
        }
        let mut ev: Vec<f64> = cov.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev[0] > 0.0 && ev[1] > COLLINEAR * COLLINEAR * ev[0]
    }

    /// Largest difference between a stored rest centroid and a fresh
    /// mass-weighted mean.
    pub fn rest_centroid_defect(&self) -> f64 {
        let weights = self.weights();
        self.clusters
            .iter()
            .map(|c| (c.rest_centroid - Self::weighted_mean(&c.indices, &self.rest, &weights)).norm())
            .fold(0.0, f64::max)
    }
}
