//! Volume container, `.vol` file format, preprocessing and slice partitioning.
//!
//! A [`Volume`] is a stack of `D` in-plane slices of shape `H x W` with
//! per-axis millimeter spacing and an optional label field. Preprocessing
//! follows the usual pipeline for roughly aligned volumes: percentile min-max
//! normalization over the whole volume, slice-wise in-plane resampling to a
//! fixed pixel size, and center-anchored crop or zero-pad to a fixed image
//! size.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

pub const VOL_MAGIC: [u8; 4] = *b"SSLV";
pub const VOL_VERSION: u32 = 1;

/// 3D scalar field with optional labels. Voxels are stored row-major with
/// `w` fastest: index `(d, h, w) = (d * H + h) * W + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    pub id: String,
    pub shape: (usize, usize, usize), // (D, H, W)
    pub spacing: [f32; 3],            // mm per voxel along (d, h, w)
    pub voxels: Vec<f32>,
    pub labels: Option<Vec<u8>>,
}

impl Volume {
    pub fn new(
        id: impl Into<String>,
        shape: (usize, usize, usize),
        spacing: [f32; 3],
        voxels: Vec<f32>,
        labels: Option<Vec<u8>>,
    ) -> Result<Self> {
        let v = Volume {
            id: id.into(),
            shape,
            spacing,
            voxels,
            labels,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn num_voxels(&self) -> usize {
        self.shape.0 * self.shape.1 * self.shape.2
    }

    pub fn depth(&self) -> usize {
        self.shape.0
    }

    fn validate(&self) -> Result<()> {
        if self.num_voxels() != self.voxels.len() {
            return Err(Error::data(format!(
                "volume {}: voxel payload {} does not match shape {:?}",
                self.id,
                self.voxels.len(),
                self.shape
            )));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.num_voxels() {
                return Err(Error::data(format!(
                    "volume {}: label payload {} does not match shape {:?}",
                    self.id,
                    labels.len(),
                    self.shape
                )));
            }
        }
        if self.spacing.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::data(format!(
                "volume {}: spacing must be strictly positive, got {:?}",
                self.id, self.spacing
            )));
        }
        if self.voxels.iter().any(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "volume {}: non-finite voxel value",
                self.id
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn voxel(&self, d: usize, h: usize, w: usize) -> f32 {
        self.voxels[(d * self.shape.1 + h) * self.shape.2 + w]
    }

    /// Copy of slice `d` as a 2D image.
    pub fn slice(&self, d: usize) -> Slice2D {
        let (_, h, w) = self.shape;
        let start = d * h * w;
        Slice2D {
            h,
            w,
            data: self.voxels[start..start + h * w].to_vec(),
        }
    }

    /// Copy of the label slice `d`, if labels are present.
    pub fn label_slice(&self, d: usize) -> Option<LabelSlice2D> {
        let (_, h, w) = self.shape;
        self.labels.as_ref().map(|labels| {
            let start = d * h * w;
            LabelSlice2D {
                h,
                w,
                data: labels[start..start + h * w].to_vec(),
            }
        })
    }
}

/// Single 2D image (one slice of a volume).
#[derive(Debug, Clone, PartialEq)]
pub struct Slice2D {
    pub h: usize,
    pub w: usize,
    pub data: Vec<f32>,
}

impl Slice2D {
    pub fn zeros(h: usize, w: usize) -> Self {
        Slice2D {
            h,
            w,
            data: vec![0.0; h * w],
        }
    }

    #[inline]
    pub fn at(&self, y: usize, x: usize) -> f32 {
        self.data[y * self.w + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum::<f64>() / self.data.len() as f64
    }
}

/// Single 2D label map.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSlice2D {
    pub h: usize,
    pub w: usize,
    pub data: Vec<u8>,
}

impl LabelSlice2D {
    pub fn zeros(h: usize, w: usize) -> Self {
        LabelSlice2D {
            h,
            w,
            data: vec![0; h * w],
        }
    }

    #[inline]
    pub fn at(&self, y: usize, x: usize) -> u8 {
        self.data[y * self.w + x]
    }
}

/// Contiguous grouping of the `D` slices of a volume into `S` partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partitioning {
    pub num_slices: usize,
    pub bounds: Vec<std::ops::Range<usize>>,
}

impl Partitioning {
    pub fn num_partitions(&self) -> usize {
        self.bounds.len()
    }

    /// Partition index containing slice `d`.
    pub fn partition_of(&self, d: usize) -> usize {
        self.bounds
            .iter()
            .position(|r| r.contains(&d))
            .expect("slice index out of range")
    }
}

/// Group `num_slices` consecutive slices into `num_partitions` balanced,
/// contiguous ranges. Remainder slices go to the earliest partitions, so
/// lengths are non-increasing and differ by at most one.
pub fn partition_volume(num_slices: usize, num_partitions: usize) -> Result<Partitioning> {
    if num_partitions < 1 || num_partitions > num_slices {
        return Err(Error::config(format!(
            "partition count {num_partitions} must satisfy 1 <= S <= D = {num_slices}"
        )));
    }
    let base = num_slices / num_partitions;
    let rem = num_slices % num_partitions;
    let mut bounds = Vec::with_capacity(num_partitions);
    let mut start = 0;
    for s in 0..num_partitions {
        let len = base + usize::from(s < rem);
        bounds.push(start..start + len);
        start += len;
    }
    Ok(Partitioning {
        num_slices,
        bounds,
    })
}

/// Percentile of `values` using linear interpolation between order
/// statistics: rank `r = p/100 * (n-1)`, value `x[lo] + frac * (x[hi]-x[lo])`.
pub fn percentile(values: &[f32], p: f64) -> f64 {
    assert!(!values.is_empty());
    assert!((0.0..=100.0).contains(&p));
    let mut sorted: Vec<f32> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] as f64 + frac * (sorted[hi] as f64 - sorted[lo] as f64)
}

/// Whole-volume percentile min-max normalization: `(x - p1) / (p99 - p1)`,
/// clipped to `[0, 1]`. Labels pass through unchanged.
pub fn normalize_volume(v: &Volume) -> Result<Volume> {
    let p1 = percentile(&v.voxels, 1.0);
    let p99 = percentile(&v.voxels, 99.0);
    if !(p99 > p1) {
        return Err(Error::numeric(format!(
            "volume {}: degenerate intensity range, p1 = p99 = {p1}",
            v.id
        )));
    }
    let scale = 1.0 / (p99 - p1);
    let voxels = v
        .voxels
        .iter()
        .map(|&x| (((x as f64 - p1) * scale).clamp(0.0, 1.0)) as f32)
        .collect();
    Ok(Volume {
        id: v.id.clone(),
        shape: v.shape,
        spacing: v.spacing,
        voxels,
        labels: v.labels.clone(),
    })
}

/// Slice-wise in-plane resample to `target_spacing` (mm) followed by a
/// center-anchored crop or symmetric zero-pad to `target_size` (pixels).
/// Voxels are interpolated bilinearly, labels nearest-neighbour. The
/// through-plane axis is untouched.
pub fn resample_and_pad(
    v: &Volume,
    target_spacing: [f32; 2],
    target_size: (usize, usize),
) -> Result<Volume> {
    if target_spacing.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::config(format!(
            "target spacing must be positive, got {target_spacing:?}"
        )));
    }
    if target_size.0 == 0 || target_size.1 == 0 {
        return Err(Error::config(format!(
            "target size must be positive, got {target_size:?}"
        )));
    }
    let (depth, in_h, in_w) = v.shape;
    // In-plane size after resampling to the target pixel pitch.
    let res_h = ((in_h as f64 * v.spacing[1] as f64 / target_spacing[0] as f64).round() as usize)
        .max(1);
    let res_w = ((in_w as f64 * v.spacing[2] as f64 / target_spacing[1] as f64).round() as usize)
        .max(1);
    let (out_h, out_w) = target_size;

    let mut voxels = vec![0.0f32; depth * out_h * out_w];
    let mut labels = v
        .labels
        .as_ref()
        .map(|_| vec![0u8; depth * out_h * out_w]);

    for d in 0..depth {
        let slice = v.slice(d);
        let resampled = if res_h == in_h && res_w == in_w {
            slice
        } else {
            bilinear_resize(&v.slice(d), res_h, res_w)
        };
        let placed = center_crop_or_pad(&resampled, out_h, out_w);
        voxels[d * out_h * out_w..(d + 1) * out_h * out_w].copy_from_slice(&placed.data);

        if let Some(out_labels) = labels.as_mut() {
            let lab = v.label_slice(d).expect("labels present");
            let resampled = if res_h == in_h && res_w == in_w {
                lab
            } else {
                nearest_resize_labels(&lab, res_h, res_w)
            };
            let placed = center_crop_or_pad_labels(&resampled, out_h, out_w);
            out_labels[d * out_h * out_w..(d + 1) * out_h * out_w].copy_from_slice(&placed.data);
        }
    }

    Volume::new(
        v.id.clone(),
        (depth, out_h, out_w),
        [v.spacing[0], target_spacing[0], target_spacing[1]],
        voxels,
        labels,
    )
}

/// Source coordinate for output pixel `i` under center-aligned resampling.
#[inline]
fn src_coord(i: usize, scale: f64) -> f64 {
    (i as f64 + 0.5) * scale - 0.5
}

pub(crate) fn bilinear_resize(img: &Slice2D, out_h: usize, out_w: usize) -> Slice2D {
    let scale_y = img.h as f64 / out_h as f64;
    let scale_x = img.w as f64 / out_w as f64;
    let mut out = Slice2D::zeros(out_h, out_w);
    for y in 0..out_h {
        let sy = src_coord(y, scale_y).clamp(0.0, (img.h - 1) as f64);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(img.h - 1);
        let fy = sy - y0 as f64;
        for x in 0..out_w {
            let sx = src_coord(x, scale_x).clamp(0.0, (img.w - 1) as f64);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(img.w - 1);
            let fx = sx - x0 as f64;
            let v00 = img.at(y0, x0) as f64;
            let v01 = img.at(y0, x1) as f64;
            let v10 = img.at(y1, x0) as f64;
            let v11 = img.at(y1, x1) as f64;
            let top = v00 + fx * (v01 - v00);
            let bot = v10 + fx * (v11 - v10);
            out.data[y * out_w + x] = (top + fy * (bot - top)) as f32;
        }
    }
    out
}

pub(crate) fn nearest_resize_labels(img: &LabelSlice2D, out_h: usize, out_w: usize) -> LabelSlice2D {
    let scale_y = img.h as f64 / out_h as f64;
    let scale_x = img.w as f64 / out_w as f64;
    let mut out = LabelSlice2D::zeros(out_h, out_w);
    for y in 0..out_h {
        let sy = src_coord(y, scale_y).round().clamp(0.0, (img.h - 1) as f64) as usize;
        for x in 0..out_w {
            let sx = src_coord(x, scale_x).round().clamp(0.0, (img.w - 1) as f64) as usize;
            out.data[y * out_w + x] = img.at(sy, sx);
        }
    }
    out
}

/// Offsets mapping a source extent onto a target extent with centers aligned:
/// returns (src_start, dst_start, copy_len).
fn center_span(src: usize, dst: usize) -> (usize, usize, usize) {
    if src >= dst {
        ((src - dst) / 2, 0, dst)
    } else {
        (0, (dst - src) / 2, src)
    }
}

fn center_crop_or_pad(img: &Slice2D, out_h: usize, out_w: usize) -> Slice2D {
    let mut out = Slice2D::zeros(out_h, out_w);
    let (sy, dy, copy_h) = center_span(img.h, out_h);
    let (sx, dx, copy_w) = center_span(img.w, out_w);
    for row in 0..copy_h {
        let src = (sy + row) * img.w + sx;
        let dst = (dy + row) * out_w + dx;
        out.data[dst..dst + copy_w].copy_from_slice(&img.data[src..src + copy_w]);
    }
    out
}

fn center_crop_or_pad_labels(img: &LabelSlice2D, out_h: usize, out_w: usize) -> LabelSlice2D {
    let mut out = LabelSlice2D::zeros(out_h, out_w);
    let (sy, dy, copy_h) = center_span(img.h, out_h);
    let (sx, dx, copy_w) = center_span(img.w, out_w);
    for row in 0..copy_h {
        let src = (sy + row) * img.w + sx;
        let dst = (dy + row) * out_w + dx;
        out.data[dst..dst + copy_w].copy_from_slice(&img.data[src..src + copy_w]);
    }
    out
}

// --- .vol container -------------------------------------------------------
//
// Little-endian layout: magic "SSLV", version u32 = 1, D/H/W u32, spacing
// 3 x f32 (mm), has_labels u8, voxel payload D*H*W x f32 row-major (w
// fastest), then D*H*W x u8 labels when has_labels = 1. No compression,
// no padding bytes.

struct CountingReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Read for CountingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.offset += n as u64;
        Ok(n)
    }
}

pub fn write_volume(v: &Volume, path: impl AsRef<Path>) -> Result<()> {
    v.validate()?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&VOL_MAGIC)?;
    w.write_u32::<LittleEndian>(VOL_VERSION)?;
    w.write_u32::<LittleEndian>(v.shape.0 as u32)?;
    w.write_u32::<LittleEndian>(v.shape.1 as u32)?;
    w.write_u32::<LittleEndian>(v.shape.2 as u32)?;
    for &s in &v.spacing {
        w.write_f32::<LittleEndian>(s)?;
    }
    w.write_u8(u8::from(v.labels.is_some()))?;
    for &x in &v.voxels {
        w.write_f32::<LittleEndian>(x)?;
    }
    if let Some(labels) = &v.labels {
        w.write_all(labels)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_volume(path: impl AsRef<Path>) -> Result<Volume> {
    let path = path.as_ref();
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "volume".to_string());
    let mut r = CountingReader {
        inner: BufReader::new(File::open(path)?),
        offset: 0,
    };

    let mut magic = [0u8; 4];
    read_exact_at(&mut r, &mut magic, "magic")?;
    if magic != VOL_MAGIC {
        return Err(Error::format(0, format!("bad magic {magic:?}, expected \"SSLV\"")));
    }
    let version = read_u32_at(&mut r, "version")?;
    if version != VOL_VERSION {
        return Err(Error::format(4, format!("unsupported format version {version}")));
    }
    let d = read_u32_at(&mut r, "depth")? as usize;
    let h = read_u32_at(&mut r, "height")? as usize;
    let w = read_u32_at(&mut r, "width")? as usize;
    if d == 0 || h == 0 || w == 0 {
        return Err(Error::format(8, format!("zero dimension in shape {d}x{h}x{w}")));
    }
    let mut spacing = [0f32; 3];
    for s in spacing.iter_mut() {
        let off = r.offset;
        *s = r
            .inner
            .read_f32::<LittleEndian>()
            .map_err(|e| Error::format(off, format!("truncated spacing: {e}")))?;
        r.offset += 4;
        if !(*s > 0.0) || !s.is_finite() {
            return Err(Error::format(off, format!("non-positive spacing {s}")));
        }
    }
    let off = r.offset;
    let has_labels = {
        let mut b = [0u8; 1];
        read_exact_at(&mut r, &mut b, "has_labels flag")?;
        b[0]
    };
    if has_labels > 1 {
        return Err(Error::format(off, format!("has_labels must be 0 or 1, got {has_labels}")));
    }

    let n = d * h * w;
    let mut voxels = vec![0f32; n];
    {
        let off = r.offset;
        let mut bytes = vec![0u8; n * 4];
        r.inner.read_exact(&mut bytes).map_err(|e| {
            Error::format(off, format!("truncated voxel payload ({n} voxels expected): {e}"))
        })?;
        r.offset += bytes.len() as u64;
        for (i, chunk) in bytes.chunks_exact(4).enumerate() {
            voxels[i] = f32::from_le_bytes(chunk.try_into().unwrap());
        }
    }
    let labels = if has_labels == 1 {
        let off = r.offset;
        let mut bytes = vec![0u8; n];
        r.inner.read_exact(&mut bytes).map_err(|e| {
            Error::format(off, format!("truncated label payload ({n} labels expected): {e}"))
        })?;
        r.offset += bytes.len() as u64;
        Some(bytes)
    } else {
        None
    };
    let off = r.offset;
    let mut trailing = [0u8; 1];
    if r.inner.read(&mut trailing)? != 0 {
        return Err(Error::format(off, "trailing bytes after payload"));
    }

    let volume = Volume::new(id, (d, h, w), spacing, voxels, labels)?;
    Ok(volume)
}

fn read_exact_at<R: Read>(r: &mut CountingReader<R>, buf: &mut [u8], what: &str) -> Result<()> {
    let off = r.offset;
    r.inner
        .read_exact(buf)
        .map_err(|e| Error::format(off, format!("truncated {what}: {e}")))?;
    r.offset += buf.len() as u64;
    Ok(())
}

fn read_u32_at<R: Read>(r: &mut CountingReader<R>, what: &str) -> Result<u32> {
    let off = r.offset;
    let v = r
        .inner
        .read_u32::<LittleEndian>()
        .map_err(|e| Error::format(off, format!("truncated {what}: {e}")))?;
    r.offset += 4;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn ramp_volume(n: usize) -> Volume {
        // n voxels with values 0..n-1 in a (1, 1, n) shape.
        Volume::new(
            "ramp",
            (1, 1, n),
            [1.0, 1.0, 1.0],
            (0..n).map(|i| i as f32).collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn vol_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.vol");
        let mut rng = rng::stream(11, "voltest");
        let (d, h, w) = (5, 9, 7);
        let voxels: Vec<f32> = (0..d * h * w).map(|_| rng.random::<f32>() * 3.0 - 1.0).collect();
        let labels: Vec<u8> = (0..d * h * w).map(|_| rng.random_range(0..4)).collect();
        let v = Volume::new("v", (d, h, w), [8.0, 1.25, 1.5], voxels, Some(labels)).unwrap();
        write_volume(&v, &path).unwrap();
        let back = read_volume(&path).unwrap();
        assert_eq!(v.shape, back.shape);
        assert_eq!(v.spacing, back.spacing);
        assert!(v
            .voxels
            .iter()
            .zip(&back.voxels)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(v.labels, back.labels);
    }

    #[test]
    fn zero_volume_round_trips_with_labels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.vol");
        let v = Volume::new(
            "z",
            (2, 2, 2),
            [1.0, 1.0, 1.0],
            vec![0.0; 8],
            Some(vec![0; 8]),
        )
        .unwrap();
        write_volume(&v, &path).unwrap();
        let back = read_volume(&path).unwrap();
        assert_eq!(back.voxels, vec![0.0; 8]);
        assert_eq!(back.labels, Some(vec![0; 8]));
    }

    #[test]
    fn bad_magic_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.vol");
        std::fs::write(&path, b"XXXXrest-of-file").unwrap();
        match read_volume(&path) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.vol");
        let v = ramp_volume(16);
        write_volume(&v, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 7]).unwrap();
        match read_volume(&path) {
            // header is 33 bytes; the voxel payload read starts right after
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 33),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn percentile_linear_interpolation() {
        // Ramp 0..999: rank = p/100 * 999.
        let values: Vec<f32> = (0..1000).map(|i| i as f32).collect();
        assert!((percentile(&values, 1.0) - 9.99).abs() < 1e-9);
        assert!((percentile(&values, 99.0) - 989.01).abs() < 1e-9);
        assert_eq!(percentile(&values, 0.0), 0.0);
        assert_eq!(percentile(&values, 100.0), 999.0);
    }

    #[test]
    fn normalize_ramp_matches_hand_computation() {
        let v = ramp_volume(1000);
        let out = normalize_volume(&v).unwrap();
        let p1 = 9.99;
        let p99 = 989.01;
        // Spot-check voxels against the affine map computed by hand.
        for k in [0usize, 10, 123, 500, 989, 999] {
            let expected = ((k as f64 - p1) / (p99 - p1)).clamp(0.0, 1.0);
            assert!(
                (out.voxels[k] as f64 - expected).abs() < 1e-6,
                "voxel {k}: {} vs {expected}",
                out.voxels[k]
            );
        }
        // The value at the 1st/99th percentile rank maps to 0/1.
        assert!((out.voxels[9] as f64) < 1e-6 + (9.0 - p1).abs() / (p99 - p1));
        let near_one = (989.0 - p1) / (p99 - p1);
        assert!((out.voxels[989] as f64 - near_one.clamp(0.0, 1.0)).abs() < 1e-6);
    }

    #[test]
    fn normalize_constant_volume_is_degenerate() {
        let v = Volume::new("c", (1, 2, 2), [1.0; 3], vec![5.0; 4], None).unwrap();
        match normalize_volume(&v) {
            Err(Error::Numeric(_)) => {}
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn normalize_output_is_clipped() {
        let mut rng = rng::stream(3, "clip");
        let voxels: Vec<f32> = (0..4096).map(|_| rng.random::<f32>() * 100.0 - 50.0).collect();
        let v = Volume::new("r", (4, 32, 32), [1.0; 3], voxels, None).unwrap();
        let out = normalize_volume(&v).unwrap();
        assert!(out.voxels.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn normalize_is_idempotent_up_to_tail_clipping() {
        let mut rng = rng::stream(17, "idem");
        let voxels: Vec<f32> = (0..8192).map(|_| rng.random::<f32>() * 7.0 - 2.0).collect();
        let v = Volume::new("r", (8, 32, 32), [1.0; 3], voxels, None).unwrap();
        let v1 = normalize_volume(&v).unwrap();
        let v2 = normalize_volume(&v1).unwrap();
        // Second-pass percentiles quantify how much the tail clip moved things.
        let q1 = percentile(&v1.voxels, 1.0);
        let q99 = percentile(&v1.voxels, 99.0);
        let bound = (q1.abs() + (1.0 - q99).abs()) / (q99 - q1) + 1e-6;
        let max_delta = v1
            .voxels
            .iter()
            .zip(&v2.voxels)
            .map(|(a, b)| (a - b).abs() as f64)
            .fold(0.0, f64::max);
        assert!(max_delta <= bound, "max delta {max_delta} > bound {bound}");
    }

    #[test]
    fn resample_identity_is_exact() {
        let mut rng = rng::stream(5, "resample");
        let voxels: Vec<f32> = (0..2 * 8 * 8).map(|_| rng.random()).collect();
        let labels: Vec<u8> = (0..2 * 8 * 8).map(|_| rng.random_range(0..3)).collect();
        let v = Volume::new("v", (2, 8, 8), [4.0, 1.5, 1.5], voxels, Some(labels)).unwrap();
        let out = resample_and_pad(&v, [1.5, 1.5], (8, 8)).unwrap();
        assert_eq!(v.voxels, out.voxels);
        assert_eq!(v.labels, out.labels);
    }

    #[test]
    fn symmetric_zero_pad_places_center() {
        // 4x4 ones, same spacing, target 6x6: ones in the centered 4x4 block.
        let v = Volume::new("v", (1, 4, 4), [1.0, 1.0, 1.0], vec![1.0; 16], None).unwrap();
        let out = resample_and_pad(&v, [1.0, 1.0], (6, 6)).unwrap();
        for y in 0..6 {
            for x in 0..6 {
                let expected = if (1..5).contains(&y) && (1..5).contains(&x) {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(out.voxel(0, y, x), expected, "at ({y},{x})");
            }
        }
    }

    #[test]
    fn acdc_parameters_are_accepted() {
        let v = Volume::new("v", (2, 20, 20), [8.0, 1.0, 1.0], vec![0.5; 800], None).unwrap();
        let out = resample_and_pad(&v, [1.367, 1.367], (192, 192)).unwrap();
        assert_eq!(out.shape, (2, 192, 192));
        assert_eq!(out.spacing[1], 1.367);
    }

    #[test]
    fn resample_labels_stay_in_input_set() {
        let mut rng = rng::stream(9, "labset");
        let voxels: Vec<f32> = (0..3 * 10 * 10).map(|_| rng.random()).collect();
        let labels: Vec<u8> = (0..3 * 10 * 10)
            .map(|_| *[0u8, 2, 5].iter().nth(rng.random_range(0..3)).unwrap())
            .collect();
        let v = Volume::new("v", (3, 10, 10), [5.0, 2.0, 2.0], voxels, Some(labels)).unwrap();
        let out = resample_and_pad(&v, [1.0, 1.0], (24, 24)).unwrap();
        for &l in out.labels.as_ref().unwrap() {
            assert!([0u8, 2, 5].contains(&l), "label {l} not in input set + 0");
        }
    }

    #[test]
    fn partition_examples() {
        assert_eq!(
            partition_volume(12, 4).unwrap().bounds,
            vec![0..3, 3..6, 6..9, 9..12]
        );
        assert_eq!(
            partition_volume(10, 4).unwrap().bounds,
            vec![0..3, 3..6, 6..8, 8..10]
        );
        assert!(matches!(partition_volume(3, 4), Err(Error::Config(_))));
        assert!(matches!(partition_volume(3, 0), Err(Error::Config(_))));
    }

    #[test]
    fn partition_invariants_hold_for_all_small_cases() {
        for d in 1..=64usize {
            for s in 1..=d {
                let p = partition_volume(d, s).unwrap();
                assert_eq!(p.bounds.len(), s);
                assert_eq!(p.bounds[0].start, 0);
                assert_eq!(p.bounds.last().unwrap().end, d);
                let lens: Vec<usize> = p.bounds.iter().map(|r| r.len()).collect();
                for w in p.bounds.windows(2) {
                    assert_eq!(w[0].end, w[1].start, "contiguous cover");
                }
                let min = lens.iter().min().unwrap();
                let max = lens.iter().max().unwrap();
                assert!(max - min <= 1);
                assert!(lens.windows(2).all(|w| w[0] >= w[1]), "non-increasing");
            }
        }
    }
}
