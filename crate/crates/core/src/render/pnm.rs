//! Binary PGM (P5) class maps and PPM (P6) color images.

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{Palette, PixelGrid, RgbImage};

#[derive(Debug, Error)]
pub enum PnmError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("truncated pixel data: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("unknown class id {class} at pixel {index}")]
    UnknownClass { class: u8, index: usize },
    #[error("color {rgb:?} at pixel {index} is not in the palette")]
    UnknownColor { rgb: [u8; 3], index: usize },
}

fn header(magic: &str, w: u32, h: u32) -> Vec<u8> {
    format!("{magic}\n{w} {h}\n255\n").into_bytes()
}

/// Parses `magic width height maxval` and returns them with the data offset.
fn parse_header(bytes: &[u8], magic: &[u8; 2]) -> Result<(u32, u32, usize), PnmError> {
    if bytes.len() < 2 || &bytes[..2] != magic {
        return Err(PnmError::Header(format!("expected magic {}", String::from_utf8_lossy(magic))));
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(PnmError::Header("unexpected end of header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap_or("");
        *field = text
            .parse()
            .map_err(|_| PnmError::Header(format!("expected a number at byte {start}")))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(PnmError::Header("missing whitespace after maxval".into())),
    }
    let [w, h, maxval] = fields;
    if w == 0 || h == 0 {
        return Err(PnmError::Header(format!("empty image {w}x{h}")));
    }
    if maxval != 255 {
        return Err(PnmError::Header(format!("maxval must be 255, got {maxval}")));
    }
    Ok((w, h, pos))
}

pub fn encode_classmap(grid: &PixelGrid) -> Vec<u8> {
    let mut out = header("P5", grid.width, grid.height);
    out.extend_from_slice(&grid.data);
    out
}

pub fn decode_classmap(bytes: &[u8]) -> Result<PixelGrid, PnmError> {
    let (width, height, off) = parse_header(bytes, b"P5")?;
    let expected = width as usize * height as usize;
    let data = &bytes[off..];
    if data.len() < expected {
        return Err(PnmError::Truncated { expected, found: data.len() });
    }
    let data = data[..expected].to_vec();
    if let Some(index) = data.iter().position(|&c| !Palette::is_valid(c)) {
        return Err(PnmError::UnknownClass { class: data[index], index });
    }
    Ok(PixelGrid { width, height, data })
}

pub fn encode_image(img: &RgbImage) -> Vec<u8> {
    let mut out = header("P6", img.width, img.height);
    out.extend_from_slice(&img.data);
    out
}

/// Decodes a P6 image back into classes through the palette.
pub fn decode_image(bytes: &[u8]) -> Result<PixelGrid, PnmError> {
    let (width, height, off) = parse_header(bytes, b"P6")?;
    let expected = 3 * width as usize * height as usize;
    let data = &bytes[off..];
    if data.len() < expected {
        return Err(PnmError::Truncated { expected, found: data.len() });
    }
    let mut classes = Vec::with_capacity(expected / 3);
    for (index, px) in data[..expected].chunks_exact(3).enumerate() {
        let rgb = [px[0], px[1], px[2]];
        classes.push(Palette::class_of_rgb(rgb).ok_or(PnmError::UnknownColor { rgb, index })?);
    }
    Ok(PixelGrid { width, height, data: classes })
}

pub fn write_classmap(grid: &PixelGrid, path: impl AsRef<Path>) -> Result<(), PnmError> {
    fs::write(path, encode_classmap(grid))?;
    Ok(())
}

pub fn read_classmap(path: impl AsRef<Path>) -> Result<PixelGrid, PnmError> {
    decode_classmap(&fs::read(path)?)
}

/// Writes the grid as a color image using the palette.
pub fn write_image(grid: &PixelGrid, _palette: &Palette, path: impl AsRef<Path>) -> Result<(), PnmError> {
    fs::write(path, encode_image(&RgbImage::from_grid(grid)))?;
    Ok(())
}

pub fn read_image(path: impl AsRef<Path>) -> Result<PixelGrid, PnmError> {
    decode_image(&fs::read(path)?)
}
