//! Minimal PGM (P2/P5) decoding and PGM/PPM encoding.
//!
//! Only what the toolkit needs: 8-bit grayscale in and out, plus binary PPM
//! (P6) for RGB overlays. Decode errors carry the byte offset at which the
//! problem was detected so malformed files can be diagnosed quickly.

use crate::raster::{GrayImage, RgbImage};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PnmError {
    #[error("byte {offset}: not a PGM file (expected magic P2 or P5)")]
    BadMagic { offset: usize },
    #[error("byte {offset}: unexpected end of input while reading {expected}")]
    UnexpectedEof { offset: usize, expected: &'static str },
    #[error("byte {offset}: invalid {expected} token")]
    InvalidToken { offset: usize, expected: &'static str },
    #[error("byte {offset}: image dimension is zero")]
    ZeroDimension { offset: usize },
    #[error("byte {offset}: maxval {value} unsupported (must be 1..=255)")]
    MaxvalOutOfRange { offset: usize, value: u64 },
    #[error("byte {offset}: raster truncated (expected {expected} bytes, found {found})")]
    TruncatedPayload {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("byte {offset}: sample value {value} exceeds maxval {maxval}")]
    SampleOutOfRange {
        offset: usize,
        value: u64,
        maxval: u16,
    },
    #[error("byte {offset}: declared image size is unreasonably large")]
    TooLarge { offset: usize },
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.buf.get(self.pos).copied()
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(b) = self.peek() {
            match b {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while let Some(c) = self.peek() {
                        self.pos += 1;
                        if c == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    /// Parses an unsigned decimal token, returning `(value, token_offset)`.
    fn parse_uint(&mut self, expected: &'static str) -> Result<(u64, usize), PnmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        let Some(first) = self.peek() else {
            return Err(PnmError::UnexpectedEof {
                offset: start,
                expected,
            });
        };
        if !first.is_ascii_digit() {
            return Err(PnmError::InvalidToken {
                offset: start,
                expected,
            });
        }
        let mut value: u64 = 0;
        while let Some(b) = self.peek() {
            if !b.is_ascii_digit() {
                break;
            }
            value = value * 10 + u64::from(b - b'0');
            if value > 1 << 40 {
                return Err(PnmError::TooLarge { offset: start });
            }
            self.pos += 1;
        }
        Ok((value, start))
    }
}

/// Decodes an 8-bit PGM image in either ASCII (P2) or binary (P5) form.
///
/// Header comments (`#` to end of line) are accepted. The maxval must be in
/// `1..=255` and every sample must be within it; the decoded image always has
/// exactly the declared dimensions.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, PnmError> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(PnmError::BadMagic { offset: 0 });
    }
    let binary = match bytes[1] {
        b'5' => true,
        b'2' => false,
        _ => return Err(PnmError::BadMagic { offset: 0 }),
    };
    let mut cur = Cursor { buf: bytes, pos: 2 };

    let (width, w_off) = cur.parse_uint("width")?;
    if width == 0 {
        return Err(PnmError::ZeroDimension { offset: w_off });
    }
    let (height, h_off) = cur.parse_uint("height")?;
    if height == 0 {
        return Err(PnmError::ZeroDimension { offset: h_off });
    }
    let (maxval, m_off) = cur.parse_uint("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(PnmError::MaxvalOutOfRange {
            offset: m_off,
            value: maxval,
        });
    }
    if width > 1 << 16 || height > 1 << 16 {
        return Err(PnmError::TooLarge { offset: w_off });
    }
    let npix = width as usize * height as usize;

    let data = if binary {
        match cur.peek() {
            Some(b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c) => cur.pos += 1,
            Some(_) => {
                return Err(PnmError::InvalidToken {
                    offset: cur.pos,
                    expected: "raster separator",
                })
            }
            None => {
                return Err(PnmError::UnexpectedEof {
                    offset: cur.pos,
                    expected: "raster separator",
                })
            }
        }
        let found = bytes.len() - cur.pos;
        if found < npix {
            return Err(PnmError::TruncatedPayload {
                offset: bytes.len(),
                expected: npix,
                found,
            });
        }
        let data = bytes[cur.pos..cur.pos + npix].to_vec();
        if maxval < 255 {
            if let Some(i) = data.iter().position(|&v| u64::from(v) > maxval) {
                return Err(PnmError::SampleOutOfRange {
                    offset: cur.pos + i,
                    value: u64::from(data[i]),
                    maxval: maxval as u16,
                });
            }
        }
        data
    } else {
        let mut data = Vec::with_capacity(npix);
        for _ in 0..npix {
            let (v, off) = cur.parse_uint("sample")?;
            if v > maxval {
                return Err(PnmError::SampleOutOfRange {
                    offset: off,
                    value: v,
                    maxval: maxval as u16,
                });
            }
            data.push(v as u8);
        }
        data
    };

    Ok(GrayImage::from_raw(width as u32, height as u32, data).expect("validated dimensions"))
}

/// Encodes a grayscale image as binary PGM with maxval 255.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    encode_pgm_with_maxval(img, 255)
}

/// Encodes a grayscale image as binary PGM with an explicit maxval, used for
/// label maps where the maxval doubles as the region count.
///
/// Panics if any pixel exceeds `maxval`.
pub fn encode_pgm_with_maxval(img: &GrayImage, maxval: u8) -> Vec<u8> {
    assert!(maxval > 0, "maxval must be positive");
    assert!(
        img.data().iter().all(|&v| v <= maxval),
        "pixel value exceeds declared maxval {maxval}"
    );
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    out.extend_from_slice(img.data());
    out
}

/// Encodes an RGB image as binary PPM (P6) with maxval 255.
pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}
