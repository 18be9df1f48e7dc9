//! Reading images and observation files, writing fit results and SVG plots.

mod fit;
mod obs;
#[cfg(feature = "image-io")]
mod raster;
mod svg;

pub use fit::{parse_fit, read_fit, write_fit, FitRecord};
pub use obs::{
    format_observation, parse_mask, parse_observation, read_mask, read_observation,
    write_mask, write_observation, ObservationFile,
};
#[cfg(feature = "image-io")]
pub use raster::{load_image, observation_from_gray};
pub use svg::{render_svg, render_svg_string, SvgMode};

/// Membership bits per line in text outputs.
const BITS_PER_LINE: usize = 100;

fn bits_to_lines(bits: &[bool]) -> Vec<String> {
    bits.chunks(BITS_PER_LINE)
        .map(|c| c.iter().map(|&b| if b { '1' } else { '0' }).collect())
        .collect()
}

fn join_floats(values: &[f64]) -> String {
    let mut s = String::with_capacity(values.len() * 20);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&v.to_string());
    }
    s
}
