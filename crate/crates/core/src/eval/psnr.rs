use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::video_io::{temporal_upsample_duplicate, LumaVideo, Plane};

/// Reported for frames with zero error.
pub const PSNR_CAP_DB: f64 = 100.0;
const PEAK: f64 = 255.0;

/// PSNR of one frame pair with an 8-bit peak, capped at [`PSNR_CAP_DB`].
pub fn psnr_frame<T: Scalar>(a: &Plane<T>, b: &Plane<T>) -> Result<f64> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let sse: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (x.to_f64_lossy() - y.to_f64_lossy()).powi(2))
        .sum();
    let mse = sse / a.data().len() as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (PEAK * PEAK / mse).log10()).min(PSNR_CAP_DB))
}

/// Frame-averaged PSNR. The lower-rate video is first brought to the
/// higher rate by frame duplication; frames past the shorter video are ignored.
pub fn psnr_video<T: Scalar>(ref_video: &LumaVideo<T>, dist: &LumaVideo<T>) -> Result<f64> {
    if (ref_video.width(), ref_video.height()) != (dist.width(), dist.height()) {
        return Err(Error::DimensionMismatch(format!(
            "reference is {}x{} but distorted is {}x{}",
            ref_video.width(),
            ref_video.height(),
            dist.width(),
            dist.height()
        )));
    }
    let (a, b);
    let (a, b) = if dist.fps() < ref_video.fps() {
        b = temporal_upsample_duplicate(dist, ref_video.fps())?;
        (ref_video, &b)
    } else if ref_video.fps() < dist.fps() {
        a = temporal_upsample_duplicate(ref_video, dist.fps())?;
        (&a, dist)
    } else {
        (ref_video, dist)
    };
    let per_frame = a
        .frames()
        .iter()
        .zip(b.frames())
        .map(|(x, y)| psnr_frame(x, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_frame.iter().sum::<f64>() / per_frame.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::video_io::FrameRate;

    fn constant(values: &[f64], fps: u64) -> LumaVideo<f64> {
        let frames = values.iter().map(|&v| Plane::filled(8, 6, v)).collect();
        LumaVideo::new(frames, FrameRate::integer(fps).unwrap()).unwrap()
    }

    #[test]
    fn identical_is_capped() {
        let v = constant(&[10.0, 20.0], 30);
        assert_eq!(psnr_video(&v, &v).unwrap(), PSNR_CAP_DB);
    }

    #[test]
    fn offset_of_ten() {
        let textured: Vec<Plane<f64>> = (0..4).map(|t| Plane::from_fn(8, 6, |x, y| (x * 20 + y * 3 + t) as f64)).collect();
        let r = LumaVideo::new(textured.clone(), FrameRate::integer(60).unwrap()).unwrap();
        let d = LumaVideo::new(textured.iter().map(|p| p.map(|v| v + 10.0)).collect(), FrameRate::integer(60).unwrap()).unwrap();
        let expected = 20.0 * (255.0f64 / 10.0).log10();
        assert!((psnr_video(&r, &d).unwrap() - expected).abs() < 1e-9);
        assert!((expected - 28.1308).abs() < 1e-4);
    }

    #[test]
    fn black_vs_white() {
        assert_eq!(psnr_video(&constant(&[0.0], 30), &constant(&[255.0], 30)).unwrap(), 0.0);
    }

    #[test]
    fn duplication_alignment_and_symmetry() {
        let r = constant(&[0.0, 1.0, 2.0, 3.0], 60);
        let d = constant(&[0.0, 2.0], 30);
        let forward = psnr_video(&r, &d).unwrap();
        assert_eq!(forward, psnr_video(&d, &r).unwrap());
        // frames 0 and 2 match, 1 and 3 are off by one
        let off = 10.0 * (255.0f64 * 255.0).log10();
        assert!((forward - (2.0 * PSNR_CAP_DB + 2.0 * off) / 4.0).abs() < 1e-9);
    }

    #[test]
    fn mismatch() {
        let a = constant(&[0.0], 30);
        let b = LumaVideo::new(vec![Plane::filled(4, 4, 0.0)], FrameRate::integer(30).unwrap()).unwrap();
        assert!(matches!(psnr_video(&a, &b), Err(Error::DimensionMismatch(_))));
    }
}
