use super::{Plane, RasterImage};

/// Source coordinate and blend weight for one output index, pixel-center aligned.
#[inline]
fn sample_position(dst: usize, dst_len: usize, src_len: usize) -> (usize, usize, f64) {
    if dst_len == src_len {
        return (dst, dst, 0.0);
    }
    let scale = src_len as f64 / dst_len as f64;
    let pos = ((dst as f64 + 0.5) * scale - 0.5).clamp(0.0, (src_len - 1) as f64);
    let i0 = pos.floor() as usize;
    let i1 = (i0 + 1).min(src_len - 1);
    (i0, i1, pos - i0 as f64)
}

/// Bilinear resize of a plane to exactly `width × height`.
pub fn resize_plane(p: &Plane, width: usize, height: usize) -> Plane {
    assert!(width > 0 && height > 0, "target size must be positive");
    if width == p.width() && height == p.height() {
        return p.clone();
    }
    let cols: Vec<_> = (0..width).map(|x| sample_position(x, width, p.width())).collect();
    let rows: Vec<_> = (0..height).map(|y| sample_position(y, height, p.height())).collect();
    Plane::from_fn(width, height, |x, y| {
        let (x0, x1, fx) = cols[x];
        let (y0, y1, fy) = rows[y];
        let top = p.get(x0, y0) * (1.0 - fx) + p.get(x1, y0) * fx;
        let bottom = p.get(x0, y1) * (1.0 - fx) + p.get(x1, y1) * fx;
        top * (1.0 - fy) + bottom * fy
    })
}

/// Channel-wise bilinear resize; identity when the size is unchanged.
pub fn resize(img: &RasterImage, width: usize, height: usize) -> RasterImage {
    if width == img.width() && height == img.height() {
        return img.clone();
    }
    let planes: Vec<Plane> = (0..img.channels())
        .map(|c| resize_plane(&img.channel(c), width, height))
        .collect();
    let mut data = Vec::with_capacity(width * height * planes.len());
    for i in 0..width * height {
        for p in &planes {
            data.push(p.data()[i]);
        }
    }
    RasterImage::new_unchecked(width, height, img.colorspace(), data)
}
