//! Loading and saving of 8-bit grayscale rasters (PNG and binary PGM).

use std::fs;
use std::io::Write;
use std::path::Path;

use image::ImageDecoder;
use thiserror::Error;

use super::{BinaryMask, GrayImage, RasterError};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("file not found: {0}")]
    Missing(String),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("unsupported raster format: {0}")]
    UnsupportedFormat(String),
    #[error("raster content is not 8-bit grayscale: {0}")]
    NotGrayscale(String),
    #[error("malformed raster: {0}")]
    Malformed(String),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

/// Decoded 8-bit grayscale payload shared by both loaders.
fn load_bytes(path: &Path) -> Result<(usize, usize, Vec<u8>), LoadError> {
    let display = path.display().to_string();
    let raw = match fs::read(path) {
        Ok(raw) => raw,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(LoadError::Missing(display))
        }
        Err(e) => {
            return Err(LoadError::Io {
                path: display,
                source: e,
            })
        }
    };
    if raw.starts_with(&[0x89, b'P', b'N', b'G']) {
        decode_png(&raw, &display)
    } else if raw.starts_with(b"P5") {
        decode_pgm(&raw, &display)
    } else {
        Err(LoadError::UnsupportedFormat(display))
    }
}

fn decode_png(raw: &[u8], path: &str) -> Result<(usize, usize, Vec<u8>), LoadError> {
    let cursor = std::io::Cursor::new(raw);
    let decoder = image::codecs::png::PngDecoder::new(cursor)
        .map_err(|e| LoadError::Malformed(format!("{path}: {e}")))?;
    if decoder.color_type() != image::ColorType::L8 {
        return Err(LoadError::NotGrayscale(format!(
            "{path}: {:?}",
            decoder.color_type()
        )));
    }
    let (w, h) = decoder.dimensions();
    let mut buf = vec![0u8; decoder.total_bytes() as usize];
    decoder
        .read_image(&mut buf)
        .map_err(|e| LoadError::Malformed(format!("{path}: {e}")))?;
    Ok((w as usize, h as usize, buf))
}

/// Binary PGM (P5) with maxval 255, hand-decoded so samples pass through
/// untouched.
fn decode_pgm(raw: &[u8], path: &str) -> Result<(usize, usize, Vec<u8>), LoadError> {
    let mut pos = 2; // past "P5"
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comment lines
        loop {
            while pos < raw.len() && raw[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < raw.len() && raw[pos] == b'#' {
                while pos < raw.len() && raw[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < raw.len() && raw[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(LoadError::Malformed(format!("{path}: truncated header")));
        }
        let text = std::str::from_utf8(&raw[start..pos]).expect("digits are utf8");
        *field = text
            .parse()
            .map_err(|_| LoadError::Malformed(format!("{path}: bad header field")))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(LoadError::UnsupportedFormat(format!(
            "{path}: PGM maxval {maxval}, expected 255"
        )));
    }
    // exactly one whitespace byte separates header from samples
    if pos >= raw.len() || !raw[pos].is_ascii_whitespace() {
        return Err(LoadError::Malformed(format!("{path}: missing separator")));
    }
    pos += 1;
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| LoadError::Malformed(format!("{path}: dimension overflow")))?;
    let body = &raw[pos..];
    if body.len() < expected {
        return Err(LoadError::Malformed(format!(
            "{path}: expected {expected} samples, found {}",
            body.len()
        )));
    }
    Ok((width, height, body[..expected].to_vec()))
}

/// Loads an 8-bit grayscale raster, mapping intensities linearly to `[0, 1]`.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage, LoadError> {
    let (width, height, bytes) = load_bytes(path.as_ref())?;
    let data = bytes.iter().map(|&b| f64::from(b) / 255.0).collect();
    Ok(GrayImage::new(width, height, data)?)
}

/// Loads an 8-bit grayscale raster as a mask: pixel > 127 becomes `true`.
///
/// The >127 rule makes both 0/1 and 0/255 mask encodings load correctly.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask, LoadError> {
    let (width, height, bytes) = load_bytes(path.as_ref())?;
    let data = bytes.iter().map(|&b| b > 127).collect();
    Ok(BinaryMask::new(width, height, data)?)
}

#[derive(Debug, Error)]
pub enum SaveError {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("png encode failure on {path}: {source}")]
    Encode {
        path: String,
        source: image::ImageError,
    },
}

fn quantize(v: f64) -> u8 {
    (v * 255.0).round() as u8
}

/// Writes an image as 8-bit grayscale; `.pgm` extension selects binary PGM,
/// anything else gets PNG.
pub fn save_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<(), SaveError> {
    let bytes: Vec<u8> = img.data().iter().map(|&v| quantize(v)).collect();
    write_bytes(&bytes, img.width(), img.height(), path.as_ref())
}

/// Writes a mask as 8-bit grayscale with foreground 255, background 0.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<(), SaveError> {
    let bytes: Vec<u8> = mask
        .data()
        .iter()
        .map(|&v| if v { 255 } else { 0 })
        .collect();
    write_bytes(&bytes, mask.width(), mask.height(), path.as_ref())
}

fn write_bytes(bytes: &[u8], width: usize, height: usize, path: &Path) -> Result<(), SaveError> {
    let display = path.display().to_string();
    if path.extension().and_then(|e| e.to_str()) == Some("pgm") {
        let mut out = Vec::with_capacity(bytes.len() + 32);
        write!(out, "P5\n{width} {height}\n255\n").expect("vec write");
        out.extend_from_slice(bytes);
        fs::write(path, out).map_err(|source| SaveError::Io {
            path: display,
            source,
        })
    } else {
        image::save_buffer(
            path,
            bytes,
            width as u32,
            height as u32,
            image::ColorType::L8,
        )
        .map_err(|source| SaveError::Encode {
            path: display,
            source,
        })
    }
}
