//! PNG and binary PPM (P6) decoding/encoding.

use std::io::Cursor;

use camlens_core::RgbImage;

use crate::error::{Error, Result};

const PNG_SIGNATURE: &[u8; 8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Ppm,
}

impl ImageFormat {
    /// Sniffs the format from magic bytes.
    pub fn detect(bytes: &[u8]) -> Option<ImageFormat> {
        if bytes.starts_with(PNG_SIGNATURE) {
            Some(ImageFormat::Png)
        } else if bytes.starts_with(b"P6") {
            Some(ImageFormat::Ppm)
        } else {
            None
        }
    }

    pub fn from_extension(path: &std::path::Path) -> Option<ImageFormat> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(ImageFormat::Png),
            "ppm" => Some(ImageFormat::Ppm),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Ppm => "ppm",
        }
    }

    pub fn mime(self) -> &'static str {
        match self {
            ImageFormat::Png => "image/png",
            ImageFormat::Ppm => "image/x-portable-pixmap",
        }
    }
}

/// Decodes PNG or P6 PPM into 8-bit RGB. Alpha channels are dropped.
pub fn decode_image(bytes: &[u8]) -> Result<RgbImage> {
    match ImageFormat::detect(bytes) {
        Some(ImageFormat::Png) => decode_png(bytes),
        Some(ImageFormat::Ppm) => decode_ppm(bytes),
        None => Err(Error::Decode(
            "unsupported image format (expected PNG or binary PPM \"P6\")".into(),
        )),
    }
}

pub fn encode_image(image: &RgbImage, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Png => encode_png(image),
        ImageFormat::Ppm => Ok(encode_ppm(image)),
    }
}

fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::Decode(format!("corrupt PNG: {e}")))?
        .into_rgb8();
    let (w, h) = decoded.dimensions();
    Ok(RgbImage::new(w as usize, h as usize, decoded.into_raw())?)
}

fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let buf = image::RgbImage::from_raw(
        img.width() as u32,
        img.height() as u32,
        img.pixels().to_vec(),
    )
    .ok_or_else(|| Error::Encode("pixel buffer does not match dims".into()))?;
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| Error::Encode(e.to_string()))?;
    Ok(out.into_inner())
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

/// Binary PPM. Samples with `maxval != 255` are rescaled to 8 bits;
/// `maxval > 255` uses two big-endian bytes per sample.
pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for (i, name) in ["width", "height", "maxval"].iter().enumerate() {
        pos = skip_space_and_comments(bytes, pos);
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Decode(format!(
                "truncated PPM header: missing {name}"
            )));
        }
        fields[i] = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Decode(format!("PPM {name} out of range")))?;
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Decode("truncated PPM header".into()));
    }
    pos += 1;

    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::Decode("PPM dims must be positive".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Decode(format!("PPM maxval {maxval} out of range")));
    }
    let sample_bytes = if maxval > 255 { 2 } else { 1 };
    let samples = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::Decode("PPM dims too large".into()))?;
    let raster = &bytes[pos..];
    if raster.len() < samples * sample_bytes {
        return Err(Error::Decode(format!(
            "PPM raster truncated: need {} bytes, got {}",
            samples * sample_bytes,
            raster.len()
        )));
    }
    let scale = |v: usize| ((v * 255 + maxval / 2) / maxval) as u8;
    let pixels = if sample_bytes == 1 {
        if maxval == 255 {
            raster[..samples].to_vec()
        } else {
            raster[..samples]
                .iter()
                .map(|&v| scale(v as usize))
                .collect()
        }
    } else {
        raster[..samples * 2]
            .chunks_exact(2)
            .map(|b| scale(u16::from_be_bytes([b[0], b[1]]) as usize))
            .collect()
    };
    Ok(RgbImage::new(width, height, pixels)?)
}

fn skip_space_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    while pos < bytes.len() {
        match bytes[pos] {
            b'#' => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            b if b.is_ascii_whitespace() => pos += 1,
            _ => break,
        }
    }
    pos
}
