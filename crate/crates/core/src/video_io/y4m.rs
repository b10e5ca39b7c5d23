//! YUV4MPEG2 reader. Only the luma plane is kept; chroma bytes are skipped.

use std::io::{BufRead, Read};

use super::{check_factor, pool_u8, FrameRate, LumaVideo, PixelFormat, VideoMeta};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const SIGNATURE: &[u8] = b"YUV4MPEG2";
const FRAME_MARKER: &[u8] = b"FRAME";
const MAX_LINE: usize = 4096;

/// Stream parameters taken from the signature line.
#[derive(Debug, Clone, PartialEq)]
pub struct Y4mHeader {
    pub width: usize,
    pub height: usize,
    pub fps: FrameRate,
    pub pixel_format: PixelFormat,
    /// Raw `C` tag, `420jpeg` when absent.
    pub colorspace: String,
}

impl Y4mHeader {
    fn parse(line: &[u8]) -> Result<Self> {
        let line = std::str::from_utf8(line)
            .map_err(|_| Error::MalformedHeader("header is not ASCII".into()))?;
        let mut tokens = line.split_ascii_whitespace();
        if tokens.next().map(str::as_bytes) != Some(SIGNATURE) {
            return Err(Error::MalformedHeader("missing YUV4MPEG2 signature".into()));
        }
        let (mut width, mut height, mut fps) = (None, None, None);
        let mut colorspace = String::from("420jpeg");
        for token in tokens {
            let (tag, value) = token.split_at(1);
            match tag {
                "W" => width = Some(parse_dim(value, "W")?),
                "H" => height = Some(parse_dim(value, "H")?),
                "F" => {
                    let (n, d) = value
                        .split_once(':')
                        .ok_or_else(|| Error::MalformedHeader(format!("bad frame rate `{value}`")))?;
                    let n = n.parse().map_err(|_| Error::MalformedHeader(format!("bad frame rate `{value}`")))?;
                    let d = d.parse().map_err(|_| Error::MalformedHeader(format!("bad frame rate `{value}`")))?;
                    fps = Some(FrameRate::new(n, d).map_err(|e| Error::MalformedHeader(e.to_string()))?);
                }
                "C" => colorspace = value.to_string(),
                // interlacing, aspect ratio and extensions do not affect the luma layout
                "I" | "A" | "X" => {}
                _ => return Err(Error::MalformedHeader(format!("unknown parameter `{token}`"))),
            }
        }
        let pixel_format = match colorspace.as_str() {
            "420" | "420jpeg" | "420paldv" | "420mpeg2" => PixelFormat::Yuv420p,
            "mono" => PixelFormat::Gray8,
            other => return Err(Error::UnsupportedColorspace(other.to_string())),
        };
        Ok(Self {
            width: width.ok_or_else(|| Error::MalformedHeader("missing W".into()))?,
            height: height.ok_or_else(|| Error::MalformedHeader("missing H".into()))?,
            fps: fps.ok_or_else(|| Error::MalformedHeader("missing F".into()))?,
            pixel_format,
            colorspace,
        })
    }

    fn luma_bytes(&self) -> usize {
        self.width * self.height
    }

    fn chroma_bytes(&self) -> usize {
        self.pixel_format.frame_bytes(self.width, self.height) - self.luma_bytes()
    }
}

fn parse_dim(value: &str, tag: &str) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::MalformedHeader(format!("bad {tag} value `{value}`"))),
    }
}

/// Reads a newline-terminated line. Returns `None` on clean EOF before any byte.
fn read_line<R: BufRead>(reader: &mut R) -> Result<Option<Vec<u8>>> {
    let mut line = Vec::new();
    let n = reader.by_ref().take(MAX_LINE as u64).read_until(b'\n', &mut line)?;
    if n == 0 {
        return Ok(None);
    }
    if line.last() != Some(&b'\n') {
        return Err(Error::MalformedHeader("unterminated header line".into()));
    }
    line.pop();
    Ok(Some(line))
}

/// Frame-at-a-time Y4M reader.
pub struct Y4mReader<R> {
    reader: R,
    header: Y4mHeader,
    frames_read: usize,
}

impl<R: BufRead> Y4mReader<R> {
    pub fn new(mut reader: R) -> Result<Self> {
        let line = read_line(&mut reader)?
            .ok_or_else(|| Error::MalformedHeader("empty stream".into()))?;
        let header = Y4mHeader::parse(&line)?;
        Ok(Self { reader, header, frames_read: 0 })
    }

    pub fn header(&self) -> &Y4mHeader {
        &self.header
    }

    /// Fills `luma` with the next frame's luma plane. Returns `false` at end of stream.
    pub fn read_luma(&mut self, luma: &mut Vec<u8>) -> Result<bool> {
        let Some(marker) = read_line(&mut self.reader)? else {
            return Ok(false);
        };
        if !marker.starts_with(FRAME_MARKER)
            || marker.get(FRAME_MARKER.len()).is_some_and(|&b| b != b' ')
        {
            return Err(Error::MalformedHeader(format!(
                "expected FRAME marker before frame {}",
                self.frames_read
            )));
        }
        luma.resize(self.header.luma_bytes(), 0);
        self.reader.read_exact(luma).map_err(|e| self.truncated(e))?;
        let chroma = self.header.chroma_bytes() as u64;
        let skipped = std::io::copy(&mut self.reader.by_ref().take(chroma), &mut std::io::sink())?;
        if skipped != chroma {
            return Err(Error::TruncatedFrame(format!("frame {} is missing chroma bytes", self.frames_read)));
        }
        self.frames_read += 1;
        Ok(true)
    }

    fn truncated(&self, e: std::io::Error) -> Error {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::TruncatedFrame(format!("frame {} ends early", self.frames_read))
        } else {
            Error::Io(e)
        }
    }
}

/// Reads a whole Y4M stream, block-averaging luma by `downsample` as frames arrive.
pub fn read_y4m<T: Scalar, R: BufRead>(reader: R, downsample: usize) -> Result<(VideoMeta, LumaVideo<T>)> {
    let mut y4m = Y4mReader::new(reader)?;
    let header = y4m.header().clone();
    check_factor(header.width, header.height, downsample)?;
    let mut frames = Vec::new();
    let mut luma = Vec::new();
    while y4m.read_luma(&mut luma)? {
        frames.push(pool_u8(&luma, header.width, header.height, downsample));
    }
    if frames.is_empty() {
        return Err(Error::TruncatedFrame("stream contains no FRAME markers".into()));
    }
    let meta = VideoMeta {
        width: header.width,
        height: header.height,
        fps: header.fps,
        frame_count: frames.len(),
        pixel_format: header.pixel_format,
    };
    Ok((meta, LumaVideo::with_bit_depth(frames, header.fps, 8)?))
}

/// Parses a Y4M byte stream at native resolution.
pub fn parse_y4m<T: Scalar, R: BufRead>(reader: R) -> Result<(VideoMeta, LumaVideo<T>)> {
    read_y4m(reader, 1)
}
