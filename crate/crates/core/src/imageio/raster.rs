//! PNG/JPEG ingestion.

use std::path::Path;

use image::DynamicImage;

use crate::error::{Error, Result};
use crate::geometry::ReferencePoint;
use crate::model::PolarObservation;

/// Intensities are rescaled to `[0, INTENSITY_MAX]`.
pub const INTENSITY_MAX: f64 = 10.0;

fn luminance(img: &DynamicImage) -> (usize, usize, Vec<f64>) {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let values = match img {
        DynamicImage::ImageLuma8(g) => g.pixels().map(|p| p.0[0] as f64).collect(),
        DynamicImage::ImageLumaA8(g) => g.pixels().map(|p| p.0[0] as f64).collect(),
        other => other
            .to_rgb8()
            .pixels()
            .map(|p| 0.2126 * p.0[0] as f64 + 0.7152 * p.0[1] as f64 + 0.0722 * p.0[2] as f64)
            .collect(),
    };
    (w, h, values)
}

/// Loads a PNG or JPEG as an observation about `center`.
///
/// Pixel `(col, row)` sits at `((col + 0.5) / w, 1 - (row + 0.5) / h)`, so row 0
/// is the top of the picture. Pixels are stored column by column, bottom to
/// top. Grey levels are mapped affinely onto `[0, 10]`; with a threshold the
/// result is then binarised (`>= threshold` becomes 1).
pub fn load_image(
    path: &Path,
    center: ReferencePoint,
    binarize_threshold: Option<f64>,
) -> Result<PolarObservation> {
    let img = image::open(path).map_err(|e| Error::ImageDecode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let (w, h, gray) = luminance(&img);
    observation_from_gray(w, h, &gray, center, binarize_threshold)
}

/// Builds an observation from row-major grey levels (`gray[row * w + col]`).
pub fn observation_from_gray(
    w: usize,
    h: usize,
    gray: &[f64],
    center: ReferencePoint,
    binarize_threshold: Option<f64>,
) -> Result<PolarObservation> {
    if w == 0 || h == 0 || gray.len() != w * h {
        return Err(Error::LengthMismatch(format!(
            "{} grey values for a {w}x{h} image",
            gray.len()
        )));
    }
    let lo = gray.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = gray.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::FlatImage);
    }
    let mut pts = Vec::with_capacity(w * h);
    let mut y = Vec::with_capacity(w * h);
    for col in 0..w {
        for row in (0..h).rev() {
            pts.push(((col as f64 + 0.5) / w as f64, 1.0 - (row as f64 + 0.5) / h as f64));
            let v = INTENSITY_MAX * (gray[row * w + col] - lo) / (hi - lo);
            y.push(match binarize_threshold {
                Some(t) => (v >= t) as u8 as f64,
                None => v,
            });
        }
    }
    PolarObservation::from_rect(&pts, y, center)
}
