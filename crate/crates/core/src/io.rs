//! Shape loaders: the plain-text point-set format and PGM rasters.
//!
//! Point-set text:
//!
//! ```text
//! # comment
//! DIM 2
//! 0.0 0.0 1.0
//! 1.0 0.0 1.0
//! ```
//!
//! Each data line is `x y w` (2D) or `x y z w` (3D).

use std::path::Path;

use crate::error::{Error, Result};
use crate::moments::{load_image_as_pointset, GrayImage, WeightedPoint, WeightedPointSet};

pub fn parse_pointset(text: &str) -> Result<WeightedPointSet> {
    let mut dim: Option<usize> = None;
    let mut points = Vec::new();
    let mut offset = 0usize;
    for (lineno, raw_line) in text.split_inclusive('\n').enumerate() {
        let line_offset = offset;
        offset += raw_line.len();
        let line = raw_line.trim_end_matches(['\n', '\r']);
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let start = line_offset + (line.len() - trimmed.len());
        let at = |msg: String| Error::parse(start, format!("line {}: {msg}", lineno + 1));

        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match dim {
            None => {
                if fields.len() != 2 || fields[0] != "DIM" {
                    return Err(at("expected header `DIM <2|3>`".into()));
                }
                let d = match fields[1] {
                    "2" => 2,
                    "3" => 3,
                    other => return Err(at(format!("unsupported dimension `{other}`"))),
                };
                dim = Some(d);
            }
            Some(d) => {
                if fields.len() != d + 1 {
                    return Err(at(format!(
                        "expected {} numbers, found {}",
                        d + 1,
                        fields.len()
                    )));
                }
                let mut vals = [0.0f64; 4];
                for (slot, f) in vals.iter_mut().zip(&fields) {
                    *slot = f
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| at(format!("invalid number `{f}`")))?;
                }
                let w = vals[d];
                if w < 0.0 {
                    return Err(at(format!("negative weight {w}")));
                }
                let mut coords = [0.0; 3];
                coords[..d].copy_from_slice(&vals[..d]);
                points.push(WeightedPoint { coords, weight: w });
            }
        }
    }
    let dim = dim.ok_or_else(|| Error::parse(offset, "missing `DIM` header"))?;
    WeightedPointSet::new(dim, points)
}

/// Parses binary (`P5`) or ASCII (`P2`) PGM data.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.token()?;
    let binary = match magic.1 {
        b"P5" => true,
        b"P2" => false,
        _ => return Err(Error::parse(magic.0, "expected PGM magic `P5` or `P2`")),
    };
    let width = cur.number()?;
    let height = cur.number()?;
    cur.skip_ws_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.number()?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(
            maxval_at,
            format!("maxval {maxval} out of range 1..=65535"),
        ));
    }
    if width == 0 || height == 0 {
        return Err(Error::parse(maxval_at, "image has zero area"));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::parse(0, "image dimensions overflow"))?;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(Error::parse(cur.pos, "expected whitespace after maxval"));
        }
        cur.pos += 1;
        let bpp = if maxval > 255 { 2 } else { 1 };
        let need = count * bpp;
        let data = &bytes[cur.pos..];
        if data.len() < need {
            return Err(Error::parse(
                bytes.len(),
                format!("truncated raster: need {need} bytes, found {}", data.len()),
            ));
        }
        for i in 0..count {
            let v = if bpp == 2 {
                u16::from_be_bytes([data[2 * i], data[2 * i + 1]])
            } else {
                data[i] as u16
            };
            if v as usize > maxval {
                return Err(Error::parse(
                    cur.pos + i * bpp,
                    format!("sample {v} exceeds maxval"),
                ));
            }
            pixels.push(v);
        }
    } else {
        for _ in 0..count {
            cur.skip_ws_and_comments();
            let at = cur.pos;
            let v = cur.number()?;
            if v > maxval {
                return Err(Error::parse(at, format!("sample {v} exceeds maxval")));
            }
            pixels.push(v as u16);
        }
    }
    Ok(GrayImage {
        width,
        height,
        maxval: maxval as u16,
        pixels,
    })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<(usize, &'a [u8])> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "unexpected end of data"));
        }
        Ok((start, &self.bytes[start..self.pos]))
    }

    fn number(&mut self) -> Result<usize> {
        let (at, tok) = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::parse(at, "expected a nonnegative integer"))
    }
}

/// Loads a shape from disk, choosing the parser by content: PGM magic or point-set text.
pub fn load_shape(path: impl AsRef<Path>) -> Result<WeightedPointSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
        return Ok(load_image_as_pointset(&parse_pgm(&bytes)?));
    }
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::parse(e.valid_up_to(), "point-set file is not valid UTF-8"))?;
    parse_pointset(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pointset_with_comments_and_crlf() {
        let text = "# triangle\r\nDIM 2\r\n0 0 1\r\n1 0 1\r\n\r\n0 1 1.5\r\n";
        let ps = parse_pointset(text).unwrap();
        assert_eq!(ps.dim(), 2);
        assert_eq!(ps.len(), 3);
        assert_eq!(ps.points()[2].weight, 1.5);
    }

    #[test]
    fn parses_3d_pointset() {
        let ps = parse_pointset("DIM 3\n1 2 3 4\n").unwrap();
        assert_eq!(ps.points()[0].coords, [1.0, 2.0, 3.0]);
        assert_eq!(ps.points()[0].weight, 4.0);
    }

    #[test]
    fn pointset_errors_carry_offsets() {
        let err = parse_pointset("DIM 2\n0 0\n").unwrap_err();
        match err {
            Error::Parse { offset, message } => {
                assert_eq!(offset, 6);
                assert!(message.contains("line 2"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_pointset("0 0 1\n"),
            Err(Error::Parse { offset: 0, .. })
        ));
        assert!(matches!(
            parse_pointset("DIM 4\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_pointset("DIM 2\n0 x 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_pointset("DIM 2\n0 0 -1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_pointset("# nothing\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn parses_ascii_pgm() {
        let img = parse_pgm(b"P2\n# c\n2 1\n255\n1 1\n").unwrap();
        assert_eq!((img.width, img.height), (2, 1));
        assert_eq!(img.pixels, vec![1, 1]);
    }

    #[test]
    fn parses_binary_pgm_8_and_16_bit() {
        let mut data = b"P5\n1 1\n255\n".to_vec();
        data.push(7);
        assert_eq!(parse_pgm(&data).unwrap().pixels, vec![7]);

        let mut data = b"P5 2 1 65535\n".to_vec();
        data.extend_from_slice(&[0x01, 0x00, 0xff, 0xff]);
        assert_eq!(parse_pgm(&data).unwrap().pixels, vec![256, 65535]);
    }

    #[test]
    fn pgm_errors() {
        assert!(matches!(
            parse_pgm(b"P6\n1 1\n255\n"),
            Err(Error::Parse { offset: 0, .. })
        ));
        assert!(matches!(
            parse_pgm(b"P5\n2 2\n255\n\x01"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_pgm(b"P2\n1 1\n70000\n1"),
            Err(Error::Parse { offset: 7, .. })
        ));
        assert!(matches!(
            parse_pgm(b"P2\n1 1\n10\n11"),
            Err(Error::Parse { offset: 10, .. })
        ));
        assert!(matches!(
            parse_pgm(b"P2\n1 1\n10\n"),
            Err(Error::Parse { .. })
        ));
    }
}
