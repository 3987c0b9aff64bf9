//! Profile curves of surfaces of revolution and the exact reference objects
//! they are compared against.

pub mod catenoid;
pub mod curve;
pub mod density;
pub mod pointwise;
pub mod polyline;
pub mod reaper;

pub use catenoid::{
    catenoid_profile, half_width, normal_offset, profile_half_width, CatenoidSpec, Dimension,
    Sampling, Truncation,
};
pub use curve::{CurveMode, Orientation, ProfileCurve};
pub use density::{gaussian_density, DensityReport, Probe};
pub use pointwise::{point_geometry, PointGeometry};
pub use reaper::GrimReaperSpec;

use crate::error::{Error, Result};

/// Supremum over the samples of `curve` of the planar distance to the profile
/// of `spec`, measured against a dense reference polyline covering the
/// curve's height range. Returns the distance and the sample attaining it.
pub fn sup_distance_to_catenoid(curve: &ProfileCurve, spec: &CatenoidSpec) -> Result<(f64, usize)> {
    let reference = CatenoidReference::covering(spec, curve)?;
    Ok(reference.sup_distance(curve))
}

/// A dense catenoid polyline prepared for repeated distance queries.
pub struct CatenoidReference {
    pub spec: CatenoidSpec,
    pub points: Vec<[f64; 2]>,
}

impl CatenoidReference {
    pub fn new(spec: &CatenoidSpec, truncation: Truncation, spacing: f64) -> Result<Self> {
        Ok(Self {
            spec: *spec,
            points: spec.reference_polyline(truncation, spacing)?,
        })
    }

    /// Reference dense enough for `curve` and reaching above its highest sample.
    pub fn covering(spec: &CatenoidSpec, curve: &ProfileCurve) -> Result<Self> {
        let (lo, hi) = curve.bbox();
        let r = spec.radius;
        let y_top = hi[1].max(1.5 * r) + r;
        let mut truncation = Truncation::Height(y_top);
        if spec.n.get() == 2 {
            let x_extent = lo[0].abs().max(hi[0].abs()) + r;
            if x_extent > spec.abscissa(y_top)? {
                truncation = Truncation::Abscissa(x_extent);
            }
        }
        let spacing = (curve.length() / curve.len() as f64 / 4.0).clamp(1e-4 * r, 0.0025 * r);
        let reference = Self::new(spec, truncation, spacing)?;
        let (rlo, rhi) = bbox(&reference.points);
        if hi[0] < rlo[0] || lo[0] > rhi[0] {
            return Err(Error::EmptyOverlap);
        }
        Ok(reference)
    }

    pub fn index(&self) -> polyline::PolylineIndex<'_> {
        polyline::PolylineIndex::new(&self.points)
    }

    pub fn sup_distance(&self, curve: &ProfileCurve) -> (f64, usize) {
        polyline::sup_distance(&curve.points, &self.index())
    }
}

fn bbox(points: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}
