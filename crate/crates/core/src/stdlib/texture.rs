//! Texture images and nearest-neighbour, clamp-to-edge sampling.
//!
//! A coordinate `c` on an axis of `size` texels maps to texel
//! `min(floor(clamp(c, 0, 1) * size), size - 1)`, computed in binary32. Both
//! interpreters call these functions, so their samples agree bit for bit.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct TextureImage {
    pub width: u32,
    pub height: u32,
    /// 1 for 2D images, the slice count for 3D, 6 for cube maps.
    pub depth: u32,
    /// Row-major from texel (0,0), slice after slice.
    pub texels: Vec<[f32; 4]>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TextureError {
    #[error("texture header must be `W H` or `W H D` with positive integers")]
    BadHeader,
    #[error("texel line {line}: expected four numbers `R G B A`")]
    BadTexel { line: usize },
    #[error("expected {expected} texels, found {found}")]
    WrongCount { expected: usize, found: usize },
}

impl TextureImage {
    pub fn new(width: u32, height: u32, depth: u32, texels: Vec<[f32; 4]>) -> Result<Self, TextureError> {
        if width == 0 || height == 0 || depth == 0 {
            return Err(TextureError::BadHeader);
        }
        let expected = (width * height * depth) as usize;
        if texels.len() != expected {
            return Err(TextureError::WrongCount { expected, found: texels.len() });
        }
        Ok(TextureImage { width, height, depth, texels })
    }

    /// A `w`×`h` image filled with one color.
    pub fn solid(width: u32, height: u32, rgba: [f32; 4]) -> Self {
        TextureImage { width, height, depth: 1, texels: vec![rgba; (width * height) as usize] }
    }

    /// Parse the text format: a `W H` (or `W H D`) header line, then one
    /// `R G B A` line per texel, row-major from texel (0,0).
    pub fn parse(text: &str) -> Result<Self, TextureError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(TextureError::BadHeader)?;
        let dims: Vec<u32> = header
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| TextureError::BadHeader))
            .collect::<Result<_, _>>()?;
        let (w, h, d) = match dims[..] {
            [w, h] => (w, h, 1),
            [w, h, d] => (w, h, d),
            _ => return Err(TextureError::BadHeader),
        };
        let mut texels = Vec::with_capacity((w * h * d) as usize);
        for (idx, line) in lines {
            let nums: Vec<f32> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| TextureError::BadTexel { line: idx + 1 }))
                .collect::<Result<_, _>>()?;
            let [r, g, b, a] = nums[..] else { return Err(TextureError::BadTexel { line: idx + 1 }) };
            texels.push([r, g, b, a]);
        }
        TextureImage::new(w, h, d, texels)
    }

    pub fn to_text(&self) -> String {
        let mut s = if self.depth == 1 {
            format!("{} {}\n", self.width, self.height)
        } else {
            format!("{} {} {}\n", self.width, self.height, self.depth)
        };
        for t in &self.texels {
            s.push_str(&format!("{} {} {} {}\n", t[0], t[1], t[2], t[3]));
        }
        s
    }

    fn texel(&self, x: usize, y: usize, z: usize) -> [f32; 4] {
        let (w, h) = (self.width as usize, self.height as usize);
        self.texels[(z * h + y) * w + x]
    }

    pub fn sample_2d(&self, u: f32, v: f32) -> [f32; 4] {
        self.texel(texel_index(u, self.width), texel_index(v, self.height), 0)
    }

    pub fn sample_3d(&self, u: f32, v: f32, w: f32) -> [f32; 4] {
        self.texel(texel_index(u, self.width), texel_index(v, self.height), texel_index(w, self.depth))
    }

    /// Projective 2D lookup at `(x/w, y/w)`; `w == 0` yields all zeros.
    pub fn sample_2d_proj(&self, c: [f32; 4]) -> [f32; 4] {
        if c[3] == 0.0 {
            return [0.0; 4];
        }
        self.sample_2d(c[0] / c[3], c[1] / c[3])
    }

    pub fn sample_3d_proj(&self, c: [f32; 4]) -> [f32; 4] {
        if c[3] == 0.0 {
            return [0.0; 4];
        }
        self.sample_3d(c[0] / c[3], c[1] / c[3], c[2] / c[3])
    }

    /// Cube lookup by direction. The face is chosen by the major axis
    /// (ties prefer x, then y) in the order +X, -X, +Y, -Y, +Z, -Z, and the
    /// face coordinates follow the usual cube-map orientation table:
    ///
    /// | face | sc  | tc  | ma |
    /// |------|-----|-----|----|
    /// | +X   | -z  | -y  | x  |
    /// | -X   | +z  | -y  | x  |
    /// | +Y   | +x  | +z  | y  |
    /// | -Y   | +x  | -z  | y  |
    /// | +Z   | +x  | -y  | z  |
    /// | -Z   | -x  | -y  | z  |
    ///
    /// with `s = (sc/|ma| + 1)/2`, `t = (tc/|ma| + 1)/2`. A zero direction
    /// yields all zeros.
    pub fn sample_cube(&self, d: [f32; 3]) -> [f32; 4] {
        let [x, y, z] = d;
        let (ax, ay, az) = (x.abs(), y.abs(), z.abs());
        let (face, sc, tc, ma) = if ax >= ay && ax >= az {
            if x >= 0.0 { (0, -z, -y, ax) } else { (1, z, -y, ax) }
        } else if ay >= az {
            if y >= 0.0 { (2, x, z, ay) } else { (3, x, -z, ay) }
        } else if z >= 0.0 {
            (4, x, -y, az)
        } else {
            (5, -x, -y, az)
        };
        if ma == 0.0 || ma.is_nan() {
            return [0.0; 4];
        }
        let s = (sc / ma + 1.0) * 0.5;
        let t = (tc / ma + 1.0) * 0.5;
        let slice = face.min(self.depth as usize - 1);
        self.texel(texel_index(s, self.width), texel_index(t, self.height), slice)
    }
}

/// Nearest texel on an axis of `size` texels, clamped to the edge.
pub fn texel_index(coord: f32, size: u32) -> usize {
    let c = if coord.is_nan() { 0.0 } else { coord.clamp(0.0, 1.0) };
    let i = (c * size as f32).floor() as usize;
    i.min(size as usize - 1)
}

impl fmt::Display for TextureImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{} texture", self.width, self.height, self.depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient(w: u32, h: u32) -> TextureImage {
        let texels = (0..w * h).map(|i| [(i % w) as f32, (i / w) as f32, 0.0, 1.0]).collect();
        TextureImage::new(w, h, 1, texels).unwrap()
    }

    #[test]
    fn nearest_and_clamp() {
        let t = gradient(4, 2);
        assert_eq!(t.sample_2d(0.0, 0.0), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(t.sample_2d(0.3, 0.9), [1.0, 1.0, 0.0, 1.0]);
        assert_eq!(t.sample_2d(1.0, 1.0), [3.0, 1.0, 0.0, 1.0]);
        assert_eq!(t.sample_2d(-5.0, 7.0), [0.0, 1.0, 0.0, 1.0]);
        assert_eq!(t.sample_2d(f32::NAN, 0.0), [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn projection() {
        let t = gradient(4, 4);
        assert_eq!(t.sample_2d_proj([0.3, 0.6, 0.0, 1.0]), t.sample_2d(0.3, 0.6));
        assert_eq!(t.sample_2d_proj([0.6, 1.2, 5.0, 2.0]), t.sample_2d(0.3, 0.6));
        assert_eq!(t.sample_2d_proj([0.6, 1.2, 5.0, 0.0]), [0.0; 4]);
    }

    #[test]
    fn text_format_round_trip() {
        let t = gradient(3, 2);
        assert_eq!(TextureImage::parse(&t.to_text()).unwrap(), t);
        assert!(matches!(TextureImage::parse("2 2\n1 1 1 1\n"), Err(TextureError::WrongCount { .. })));
        assert!(matches!(TextureImage::parse("2\n"), Err(TextureError::BadHeader)));
        assert!(matches!(TextureImage::parse("1 1\n1 1 1\n"), Err(TextureError::BadTexel { line: 2 })));
    }

    #[test]
    fn cube_faces() {
        let texels = (0..6).map(|f| [f as f32, 0.0, 0.0, 1.0]).collect();
        let cube = TextureImage::new(1, 1, 6, texels).unwrap();
        let face = |d| cube.sample_cube(d)[0];
        assert_eq!(face([1.0, 0.2, 0.1]), 0.0);
        assert_eq!(face([-1.0, 0.2, 0.1]), 1.0);
        assert_eq!(face([0.1, 2.0, 0.1]), 2.0);
        assert_eq!(face([0.1, -2.0, 0.1]), 3.0);
        assert_eq!(face([0.1, 0.2, 3.0]), 4.0);
        assert_eq!(face([0.1, 0.2, -3.0]), 5.0);
        assert_eq!(cube.sample_cube([0.0; 3]), [0.0; 4]);
    }

    #[test]
    fn cube_face_coordinates() {
        // 2x2 faces: texel value encodes (face, x, y).
        let mut texels = Vec::new();
        for f in 0..6 {
            for y in 0..2 {
                for x in 0..2 {
                    texels.push([f as f32, x as f32, y as f32, 1.0]);
                }
            }
        }
        let cube = TextureImage::new(2, 2, 6, texels).unwrap();
        // +X face: s = (-z/|x| + 1)/2, t = (-y/|x| + 1)/2.
        assert_eq!(cube.sample_cube([1.0, -0.5, -0.5]), [0.0, 1.0, 1.0, 1.0]);
        assert_eq!(cube.sample_cube([1.0, 0.5, 0.5]), [0.0, 0.0, 0.0, 1.0]);
        // +Y face: s = (x/|y| + 1)/2, t = (z/|y| + 1)/2.
        assert_eq!(cube.sample_cube([0.5, 1.0, -0.5]), [2.0, 1.0, 0.0, 1.0]);
    }
}
