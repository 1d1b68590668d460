//! Image, mask and raw-float file formats.
//!
//! * 8-bit grayscale PGM (P5) and PNG for images and masks.
//! * A raw float sidecar for real-valued images: 16-byte header (`"TXH0"`,
//!   `u32` width, `u32` height, `u32` reserved = 0, all little-endian) followed
//!   by `width * height` little-endian `f32` values, row-major.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageReader};

use crate::error::{CoreError, Result};
use crate::image::{GrayImage, RoiMask};

pub const SIDECAR_MAGIC: &[u8; 4] = b"TXH0";
pub const SIDECAR_EXTENSION: &str = "txh";

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let file_name = path
        .file_name()
        .ok_or_else(|| CoreError::format(path, "not a file path"))?
        .to_string_lossy()
        .into_owned();
    let tmp: PathBuf = path.with_file_name(format!(".{file_name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CoreError::io(path, e));
    }
    Ok(())
}

fn load_luma8(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let reader = ImageReader::open(path)
        .map_err(|e| CoreError::io(path, e))?
        .with_guessed_format()
        .map_err(|e| CoreError::io(path, e))?;
    let decoded = reader.decode().map_err(|e| CoreError::format(path, e.to_string()))?;
    let luma = decoded.to_luma8();
    let (w, h) = luma.dimensions();
    Ok((w as usize, h as usize, luma.into_raw()))
}

fn is_sidecar(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case(SIDECAR_EXTENSION))
}

/// Reads an image: PGM/PNG as 8-bit grayscale, `.txh` as a raw float sidecar.
pub fn read_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    if is_sidecar(path) {
        return read_sidecar(path);
    }
    let (w, h, raw) = load_luma8(path)?;
    GrayImage::from_u8(w, h, &raw).map_err(|e| CoreError::format(path, e.to_string()))
}

/// Reads a mask image; any nonzero pixel is foreground.
pub fn read_mask(path: impl AsRef<Path>) -> Result<RoiMask> {
    let path = path.as_ref();
    let (w, h, raw) = load_luma8(path)?;
    RoiMask::new(w, h, raw.iter().map(|&v| v != 0).collect()).map_err(|e| CoreError::format(path, e.to_string()))
}

/// Image intensities rounded and clamped to 8 bits.
pub fn to_u8_rounded(img: &GrayImage) -> Vec<u8> {
    img.data().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8).collect()
}

pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(pixels.len() + 32);
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(pixels, width as u32, height as u32, ExtendedColorType::L8)
        .map_err(|e| CoreError::invalid("pgm", e.to_string()))?;
    Ok(out)
}

/// Writes the image as an 8-bit P5 PGM (values rounded, clamped to `[0, 255]`).
pub fn write_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_pgm(img.width(), img.height(), &to_u8_rounded(img))?;
    write_atomic(path, &bytes)
}

/// Writes a mask as PGM with 0 = background and 255 = foreground.
pub fn write_mask(mask: &RoiMask, path: impl AsRef<Path>) -> Result<()> {
    let pixels: Vec<u8> = mask.data().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let bytes = encode_pgm(mask.width(), mask.height(), &pixels)?;
    write_atomic(path, &bytes)
}

pub fn encode_sidecar(img: &GrayImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + img.data().len() * 4);
    out.extend_from_slice(SIDECAR_MAGIC);
    out.extend_from_slice(&(img.width() as u32).to_le_bytes());
    out.extend_from_slice(&(img.height() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for &v in img.data() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn decode_sidecar(bytes: &[u8]) -> std::result::Result<GrayImage, String> {
    if bytes.len() < 16 || &bytes[..4] != SIDECAR_MAGIC {
        return Err("missing TXH0 header".into());
    }
    let word = |i: usize| u32::from_le_bytes([bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]]);
    let (w, h) = (word(4) as usize, word(8) as usize);
    let body = &bytes[16..];
    if body.len() != w * h * 4 {
        return Err(format!(
            "payload is {} bytes, expected {} for {w}x{h}",
            body.len(),
            w * h * 4
        ));
    }
    let data = body
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
        .collect();
    GrayImage::new(w, h, data).map_err(|e| e.to_string())
}

/// Writes the raw float sidecar. Values are narrowed to `f32`.
pub fn write_sidecar(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, &encode_sidecar(img))
}

pub fn read_sidecar(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| CoreError::io(path, e))?;
    decode_sidecar(&bytes).map_err(|reason| CoreError::format(path, reason))
}
