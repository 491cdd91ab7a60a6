//! Deterministic generator of synthetic aligned-anatomy volumes.
//!
//! Each volume holds `num_classes - 1` nested soft-edged ellipses whose size
//! and position vary smoothly along the slice axis, so corresponding slices
//! of different volumes show similar content by construction. Volumes differ
//! only by small per-volume center offsets and a multiplicative intensity
//! gain, both driven by a per-volume ChaCha8 stream derived from
//! `(seed, volume index)`. The same spec therefore always yields
//! byte-identical datasets.

use std::io::Write;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::parallel;
use crate::rng;
use crate::voldata::Volume;

/// Minimum intensity gap between any foreground-labeled voxel and the mean
/// background intensity of its slice (before the per-volume gain, which
/// scales both sides equally and never drops below 0.5).
pub const CONTRAST_FLOOR: f64 = 0.05;

const BG_BASE: f64 = 0.08;
const BG_RAMP: f64 = 0.04;
const STRUCT_VALUE_LO: f64 = 0.35;
const STRUCT_VALUE_HI: f64 = 0.65;
/// Soft-edge width in normalized ellipse-distance units. Intensity fades
/// from the structure value at rho = 1 to background at rho = 1 + EDGE;
/// labels stop at rho = 1, so labeled voxels carry the full structure value.
const EDGE: f64 = 0.15;
/// Smallest value of the per-slice radius profile.
const PROF_MIN: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub num_volumes: usize,
    pub shape: (usize, usize, usize),
    pub num_classes: usize,
    pub seed: u64,
    /// Fraction of the in-plane size used for random per-volume center offsets.
    pub inter_subject_jitter: f64,
    /// Per-volume multiplicative intensity spread: gain in `1 +/- jitter`.
    pub intensity_jitter: f64,
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        let (d, h, w) = self.shape;
        if self.num_volumes == 0 {
            return Err(Error::config("num_volumes must be positive"));
        }
        if d < 4 || h < 16 || w < 16 {
            return Err(Error::config(format!(
                "shape {:?} too small; need D >= 4, H >= 16, W >= 16",
                self.shape
            )));
        }
        if self.num_classes < 2 {
            return Err(Error::config("num_classes must be at least 2"));
        }
        if !(0.0..=0.3).contains(&self.inter_subject_jitter) {
            return Err(Error::config("inter_subject_jitter must be in [0, 0.3]"));
        }
        if !(0.0..=0.5).contains(&self.intensity_jitter) {
            return Err(Error::config("intensity_jitter must be in [0, 0.5]"));
        }
        // The innermost structure must stay at least one pixel wide at the
        // thinnest point of the slice profile.
        let structures = self.num_classes - 1;
        let (ax, ay) = semi_axes(h, w, structures, structures);
        if ax.min(ay) * PROF_MIN < 1.0 {
            return Err(Error::config(format!(
                "shape {:?} too small to host {structures} nested structures",
                self.shape
            )));
        }
        Ok(())
    }
}

/// Base in-plane semi-axes of structure `k` (1-indexed; larger `k` is more
/// deeply nested and smaller).
fn semi_axes(h: usize, w: usize, k: usize, structures: usize) -> (f64, f64) {
    let frac = (structures - k + 1) as f64 / structures as f64;
    let ax = 0.42 * (w as f64 / 2.0) * frac;
    let ay = 0.38 * (h as f64 / 2.0) * frac;
    (ax, ay)
}

/// Per-slice radius modulation: a half-sine bump with a gentle tilt along
/// the slice axis, in [PROF_MIN, 1].
fn profile(d: usize, depth: usize) -> f64 {
    let t = (d as f64 + 0.5) / depth as f64;
    (0.5 + 0.5 * (std::f64::consts::PI * t).sin()) * (0.8 + 0.2 * t)
}

/// Smooth in-plane center drift along the slice axis.
fn drift(d: usize, depth: usize, h: usize, w: usize) -> (f64, f64) {
    let t = (d as f64 + 0.5) / depth as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    (
        0.04 * w as f64 * (two_pi * t).sin(),
        0.04 * h as f64 * (two_pi * t).cos(),
    )
}

/// Generate the full dataset described by `spec`. Volumes are independent
/// given their per-volume stream, so generation is data-parallel.
pub fn generate_dataset(spec: &PhantomSpec) -> Result<Vec<Volume>> {
    spec.validate()?;
    let volumes = parallel::map_indexed(spec.num_volumes, |v| generate_volume(spec, v));
    Ok(volumes)
}

fn generate_volume(spec: &PhantomSpec, index: usize) -> Volume {
    let (depth, h, w) = spec.shape;
    let structures = spec.num_classes - 1;
    let mut rng = rng::indexed_stream(spec.seed, "phantom", index as u64);
    let jx = spec.inter_subject_jitter * w as f64 * (rng.random::<f64>() * 2.0 - 1.0);
    let jy = spec.inter_subject_jitter * h as f64 * (rng.random::<f64>() * 2.0 - 1.0);
    let gain = 1.0 + spec.intensity_jitter * (rng.random::<f64>() * 2.0 - 1.0);

    let values: Vec<f64> = (1..=structures)
        .map(|k| {
            if structures == 1 {
                STRUCT_VALUE_LO
            } else {
                STRUCT_VALUE_LO
                    + (STRUCT_VALUE_HI - STRUCT_VALUE_LO) * (k - 1) as f64
                        / (structures - 1) as f64
            }
        })
        .collect();

    let mut voxels = vec![0f32; depth * h * w];
    let mut labels = vec![0u8; depth * h * w];
    for d in 0..depth {
        let prof = profile(d, depth);
        let (dx, dy) = drift(d, depth, h, w);
        let cx = w as f64 / 2.0 + jx + dx;
        let cy = h as f64 / 2.0 + jy + dy;
        for y in 0..h {
            for x in 0..w {
                let mut value = BG_BASE + BG_RAMP * x as f64 / (w - 1) as f64;
                let mut label = 0u8;
                for k in 1..=structures {
                    let (ax, ay) = semi_axes(h, w, k, structures);
                    let rx = (x as f64 - cx) / (ax * prof);
                    let ry = (y as f64 - cy) / (ay * prof);
                    let rho = (rx * rx + ry * ry).sqrt();
                    let coverage = ((1.0 + EDGE - rho) / EDGE).clamp(0.0, 1.0);
                    value += coverage * (values[k - 1] - value);
                    if rho <= 1.0 {
                        label = k as u8;
                    }
                }
                let idx = (d * h + y) * w + x;
                voxels[idx] = (value * gain).clamp(0.0, 1.0) as f32;
                labels[idx] = label;
            }
        }
    }

    Volume {
        id: format!("vol_{index:03}"),
        shape: spec.shape,
        spacing: [1.0, 1.0, 1.0],
        voxels,
        labels: Some(labels),
    }
}

// --- dataset manifest ------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Pretrain,
    Test,
}

impl Split {
    fn as_str(self) -> &'static str {
        match self {
            Split::Pretrain => "pretrain",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub split: Split,
}

/// Write the tab-separated manifest (`id<TAB>file<TAB>split` per line).
pub fn write_manifest(path: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for e in entries {
        writeln!(f, "{}\t{}\t{}", e.id, e.file, e.split.as_str())?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 {
            return Err(Error::data(format!(
                "manifest line {}: expected 3 tab-separated fields",
                lineno + 1
            )));
        }
        let split = match parts[2] {
            "pretrain" => Split::Pretrain,
            "test" => Split::Test,
            other => {
                return Err(Error::data(format!(
                    "manifest line {}: unknown split {other:?}",
                    lineno + 1
                )))
            }
        };
        entries.push(ManifestEntry {
            id: parts[0].to_string(),
            file: parts[1].to_string(),
            split,
        });
    }
    Ok(entries)
}

/// Load the volumes listed in a manifest, returning (pretrain, test) sets.
/// File paths are resolved relative to the manifest location.
pub fn load_dataset(manifest_path: impl AsRef<Path>) -> Result<(Vec<Volume>, Vec<Volume>)> {
    let manifest_path = manifest_path.as_ref();
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let entries = read_manifest(manifest_path)?;
    let mut pretrain = Vec::new();
    let mut test = Vec::new();
    for e in &entries {
        let v = crate::voldata::read_volume(dir.join(&e.file))?;
        match e.split {
            Split::Pretrain => pretrain.push(v),
            Split::Test => test.push(v),
        }
    }
    Ok((pretrain, test))
}

/// Normalized cross-correlation of two equally sized images.
pub fn ncc(a: &[f32], b: &[f32]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().map(|&v| v as f64).sum::<f64>() / n;
    let mb = b.iter().map(|&v| v as f64).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x as f64 - ma;
        let dy = y as f64 - mb;
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if va <= 0.0 || vb <= 0.0 {
        return 0.0;
    }
    cov / (va.sqrt() * vb.sqrt())
}
