//! Synthetic distortion generator: derive a deformed point-set from a static
//! one by a known affine map, optionally followed by per-point Gaussian
//! jitter (a stand-in for free-form deformation in self-tests).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{AffineParams, Point2, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistortionKind {
    /// Pure affine map; the ground truth describes the output exactly.
    Affine,
    /// Affine map plus per-point Gaussian noise; the ground truth is the
    /// affine part only.
    PerturbedAffine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    pub kind: DistortionKind,
    pub scale: f64,
    pub rotation: f64,
    pub tx: f64,
    pub ty: f64,
    /// Per-coordinate noise standard deviation; must be 0 for pure affine.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl DistortionSpec {
    /// Pure affine distortion from elementary parts.
    pub fn affine(scale: f64, rotation: f64, tx: f64, ty: f64) -> Self {
        DistortionSpec {
            kind: DistortionKind::Affine,
            scale,
            rotation,
            tx,
            ty,
            noise_sigma: 0.0,
            seed: 0,
        }
    }

    /// Affine distortion followed by Gaussian jitter.
    pub fn perturbed(scale: f64, rotation: f64, tx: f64, ty: f64, noise_sigma: f64, seed: u64) -> Self {
        DistortionSpec {
            kind: DistortionKind::PerturbedAffine,
            scale,
            rotation,
            tx,
            ty,
            noise_sigma,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if self.kind == DistortionKind::Affine && self.noise_sigma != 0.0 {
            return Err(Error::InvalidConfig(
                "pure affine distortion requires noise sigma 0".into(),
            ));
        }
        Ok(())
    }
}

/// Apply the distortion to `s`, returning the deformed set and the
/// ground-truth affine component.
pub fn generate_distortion(s: &PointSet, spec: &DistortionSpec) -> Result<(PointSet, AffineParams)> {
    spec.validate()?;
    let truth = AffineParams::from_elementary(spec.scale, spec.rotation, spec.tx, spec.ty)?;
    let mut deformed = truth.warp(s);
    if spec.kind == DistortionKind::PerturbedAffine {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let noisy: Vec<Point2> = deformed
            .iter()
            .map(|p| {
                let dx: f64 = rng.sample(StandardNormal);
                let dy: f64 = rng.sample(StandardNormal);
                Point2::new(p.x + spec.noise_sigma * dx, p.y + spec.noise_sigma * dy)
            })
            .collect();
        deformed = PointSet::new(noisy)?;
    }
    Ok((deformed, truth))
}
