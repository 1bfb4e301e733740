//! Quantized convolution kernels with exact evaluation.
//!
//! Kernel taps are snapped to integer multiples of one power of two
//! (relative error ~2^-45), which lets the zero-DC constraint hold exactly:
//! after integer correction of the centre tap the taps sum to zero as real
//! numbers, so convolving any constant image yields an exact zero. Products
//! are split exactly ([`crate::exact::two_product`]) and accumulated in an
//! [`ExactSum`], so the response is the correctly rounded real convolution -
//! independent of tap order, which is what makes axis-aligned rotations and
//! flips of the input commute with the filters bit for bit.

use rayon::prelude::*;

use crate::exact::ExactSum;
use crate::imgio::GrayImage;

/// Square convolution kernel with dyadic taps, side `2 * radius + 1`.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    pub radius: usize,
    pub taps: Vec<f64>,
}

impl Kernel {
    /// Builds a kernel by sampling `f(dy, dx)` and quantizing. With
    /// `zero_dc` the taps are corrected to sum to exactly zero.
    pub fn from_fn(radius: usize, zero_dc: bool, mut f: impl FnMut(i64, i64) -> f64) -> Self {
        let side = 2 * radius + 1;
        let mut taps = Vec::with_capacity(side * side);
        let r = radius as i64;
        for dy in -r..=r {
            for dx in -r..=r {
                taps.push(f(dy, dx));
            }
        }
        quantize(&mut taps, zero_dc);
        Self { radius, taps }
    }

    pub fn tap(&self, dy: i64, dx: i64) -> f64 {
        let r = self.radius as i64;
        self.taps[((dy + r) * (2 * r + 1) + (dx + r)) as usize]
    }

    /// 90-degree counter-clockwise resampling of the tap grid.
    #[cfg(test)]
    pub fn rotate90(&self) -> Self {
        let r = self.radius as i64;
        Self::raw(self.radius, |dy, dx| self.tap(dx, -dy), r)
    }

    /// Transpose of the tap grid.
    pub fn transpose(&self) -> Self {
        let r = self.radius as i64;
        Self::raw(self.radius, |dy, dx| self.tap(dx, dy), r)
    }

    fn raw(radius: usize, f: impl Fn(i64, i64) -> f64, r: i64) -> Self {
        let side = 2 * radius + 1;
        let mut taps = Vec::with_capacity(side * side);
        for dy in -r..=r {
            for dx in -r..=r {
                taps.push(f(dy, dx));
            }
        }
        Self { radius, taps }
    }
}

/// Snaps taps onto a dyadic grid (largest magnitude ~2^44 quanta) and, for
/// zero-DC kernels, shifts the centre tap by the exact integer residue.
fn quantize(taps: &mut [f64], zero_dc: bool) {
    let max = taps.iter().fold(0.0f64, |m, &t| m.max(t.abs()));
    if max == 0.0 {
        return;
    }
    let quantum = 2f64.powi((max.log2().floor() as i32) - 44);
    let mut residue: i64 = 0;
    for t in taps.iter_mut() {
        let m = (*t / quantum).round();
        residue += m as i64;
        *t = m * quantum;
    }
    if zero_dc && residue != 0 {
        let centre = taps.len() / 2;
        // both operands sit on the same dyadic grid, so this is exact
        taps[centre] -= residue as f64 * quantum;
    }
}

/// Symmetric (edge-duplicating) reflection of an out-of-range index.
pub(crate) fn reflect(mut i: i64, n: i64) -> usize {
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Exact convolution with reflective boundary handling. The output value at
/// each pixel is the correctly rounded real dot product of the kernel with
/// the reflected neighbourhood.
pub(crate) fn convolve_exact(img: &GrayImage, kernel: &Kernel) -> Vec<f64> {
    convolve_exact_many(img, std::slice::from_ref(kernel))
        .pop()
        .expect("one kernel in, one response out")
}

/// Convolves several kernels of equal radius in one pass over the image.
pub(crate) fn convolve_exact_many(img: &GrayImage, kernels: &[Kernel]) -> Vec<Vec<f64>> {
    assert!(!kernels.is_empty());
    let radius = kernels[0].radius;
    assert!(kernels.iter().all(|k| k.radius == radius));
    let (w, h) = (img.width(), img.height());
    let side = 2 * radius + 1;
    let r = radius as i64;

    // reflected source columns for every (output col, dx)
    let col_map: Vec<usize> = (0..w as i64)
        .flat_map(|c| (-r..=r).map(move |dx| (c, dx)))
        .map(|(c, dx)| reflect(c + dx, w as i64))
        .collect();

    let mut outputs: Vec<Vec<f64>> = kernels.iter().map(|_| vec![0.0; w * h]).collect();
    // split into per-row bands so rayon can hand out disjoint slices
    let mut bands: Vec<Vec<&mut [f64]>> = outputs
        .iter_mut()
        .map(|o| o.chunks_mut(w).collect())
        .collect();
    let mut rows: Vec<(usize, Vec<&mut [f64]>)> = Vec::with_capacity(h);
    for row in (0..h).rev() {
        let slices: Vec<&mut [f64]> = bands
            .iter_mut()
            .map(|b| b.pop().expect("one slice per row"))
            .collect();
        rows.push((row, slices));
    }
    rows.reverse();

    let data = img.data();
    rows.into_par_iter().for_each(|(row, mut slices)| {
        let mut acc = ExactSum::new();
        let row_map: Vec<usize> = (-r..=r)
            .map(|dy| reflect(row as i64 + dy, h as i64) * w)
            .collect();
        for col in 0..w {
            let cmap = &col_map[col * side..(col + 1) * side];
            for (k, kernel) in kernels.iter().enumerate() {
                acc.reset();
                let mut tap = 0;
                for &row_base in &row_map {
                    for &src_col in cmap {
                        let t = kernel.taps[tap];
                        tap += 1;
                        if t != 0.0 {
                            acc.add_product(data[row_base + src_col], t);
                        }
                    }
                }
                slices[k][col] = acc.value();
            }
        }
    });
    outputs
}

/// Min-max rescale to `[0, 1]`; a flat response carries no structure and
/// maps to all zeros.
pub(crate) fn rescale_unit(values: &[f64]) -> Vec<f64> {
    let min = values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let max = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    if max > min {
        values.iter().map(|&v| (v - min) / (max - min)).collect()
    } else {
        vec![0.0; values.len()]
    }
}

/// Signed eigenvalues `(low, high)` of the symmetric matrix [[a, b], [b, c]].
///
/// Written so that swapping `a` and `c` while negating `b` (what a 90-degree
/// rotation does to second-derivative components) reproduces the identical
/// floating-point results.
pub(crate) fn eig2_signed(a: f64, b: f64, c: f64) -> (f64, f64) {
    let half_trace = 0.5 * (a + c);
    let half_gap = 0.5 * (a - c);
    let disc = (half_gap * half_gap + b * b).sqrt();
    (half_trace - disc, half_trace + disc)
}

/// Eigenvalues ordered by absolute value: `(|small|, |large|)` carriers.
pub(crate) fn eig2_by_magnitude(a: f64, b: f64, c: f64) -> (f64, f64) {
    let (lo, hi) = eig2_signed(a, b, c);
    if lo.abs() <= hi.abs() {
        (lo, hi)
    } else {
        (hi, lo)
    }
}

/// Trigonometric table for `n` orientations `k * pi / n`, built with exact
/// dihedral symmetry when `n` is even: only angles up to a quarter turn's
/// midpoint are evaluated, the rest reuse those values via `(c, s) -> (s, c)`
/// and `(c, s) -> (-s, c)`. Bank members related by 90-degree rotations or
/// axis flips then share bit-identical trig values.
pub(crate) fn orientation_table(n: usize) -> Vec<(f64, f64)> {
    let eval = |k: usize| {
        if 4 * k == n {
            // cos and sin of a quarter-turn midpoint must coincide exactly
            let v = std::f64::consts::FRAC_1_SQRT_2;
            return (v, v);
        }
        let theta = k as f64 * std::f64::consts::PI / n as f64;
        (theta.cos(), theta.sin())
    };
    if !n.is_multiple_of(2) {
        return (0..n).map(eval).collect();
    }
    let mut table: Vec<(f64, f64)> = Vec::with_capacity(n);
    for k in 0..n {
        let entry = if 4 * k <= n {
            eval(k)
        } else if 2 * k < n {
            // pi/2 - theta
            let (c, s) = table[n / 2 - k];
            (s, c)
        } else {
            // theta + pi/2
            let (c, s) = table[k - n / 2];
            (-s, c)
        };
        table.push(entry);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dc_kernel_kills_constant_images() {
        let kernel = Kernel::from_fn(3, true, |dy, dx| {
            (-((dy * dy + dx * dx) as f64) / 4.0).exp() * (dx * dx) as f64 - 0.3
        });
        let sum: f64 = kernel.taps.iter().sum();
        // quantized taps cancel exactly even in plain summation order
        assert_eq!(sum, 0.0);
        for value in [0.37, 1.0, 0.123456789] {
            let img = GrayImage::filled(9, 7, value);
            let out = convolve_exact(&img, &kernel);
            assert!(out.iter().all(|&v| v == 0.0), "value {value}");
        }
    }

    #[test]
    fn convolution_matches_naive_on_exact_inputs() {
        // dyadic image values and taps: naive summation is exact too
        let img = GrayImage::from_fn(8, 8, |r, c| ((r * 8 + c) % 16) as f64 / 16.0);
        let kernel = Kernel::from_fn(1, false, |dy, dx| (dy * 3 + dx) as f64 * 0.125);
        let out = convolve_exact(&img, &kernel);
        for r in 0..8i64 {
            for c in 0..8i64 {
                let mut expected = 0.0;
                for dy in -1..=1i64 {
                    for dx in -1..=1i64 {
                        let rr = reflect(r + dy, 8);
                        let cc = reflect(c + dx, 8);
                        expected += img.get(rr, cc) * kernel.tap(dy, dx);
                    }
                }
                let got = out[(r * 8 + c) as usize];
                assert!((got - expected).abs() < 1e-12, "({r},{c})");
            }
        }
    }

    #[test]
    fn rotating_kernel_and_image_commute_bitwise() {
        let img = GrayImage::from_fn(11, 11, |r, c| {
            let v = ((r * 31 + c * 17) % 97) as f64 / 97.0;
            v * v
        });
        let kernel = Kernel::from_fn(2, false, |dy, dx| {
            (-((dy * dy) as f64) / 3.0 - ((dx * dx) as f64) / 7.0).exp()
        });
        let out = convolve_exact(&img, &kernel);
        let out_rot = convolve_exact(&img.rotate90(), &kernel.rotate90());
        // rotate the flat response for comparison
        let h = img.height();
        let w = img.width();
        let rotated: Vec<f64> = {
            let mut v = vec![0.0; w * h];
            for r in 0..h {
                for c in 0..w {
                    // (r, c) in rotated image came from (c, w - 1 - r)
                    v[r * w + c] = out[c * w + (w - 1 - r)];
                }
            }
            v
        };
        assert!(out_rot
            .iter()
            .zip(&rotated)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn reflect_is_symmetric_padding() {
        assert_eq!(reflect(-1, 5), 0);
        assert_eq!(reflect(-2, 5), 1);
        assert_eq!(reflect(5, 5), 4);
        assert_eq!(reflect(6, 5), 3);
        assert_eq!(reflect(2, 5), 2);
    }

    #[test]
    fn rescale_maps_to_unit_interval() {
        let out = rescale_unit(&[2.0, 4.0, 3.0]);
        assert_eq!(out, vec![0.0, 1.0, 0.5]);
        assert_eq!(rescale_unit(&[7.0, 7.0]), vec![0.0, 0.0]);
        assert_eq!(rescale_unit(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn eig2_swap_negate_invariance() {
        let cases = [(0.3, -0.7, 1.1), (-2.0, 0.5, 2.0), (1e-3, 1e-8, -4.0)];
        for (a, b, c) in cases {
            let (lo1, hi1) = eig2_signed(a, b, c);
            let (lo2, hi2) = eig2_signed(c, -b, a);
            assert_eq!(lo1.to_bits(), lo2.to_bits());
            assert_eq!(hi1.to_bits(), hi2.to_bits());
        }
    }

    #[test]
    fn eig2_diagonal_matrix() {
        let (lo, hi) = eig2_signed(3.0, 0.0, -1.0);
        assert_eq!((lo, hi), (-1.0, 3.0));
        let (small, large) = eig2_by_magnitude(3.0, 0.0, -1.0);
        assert_eq!((small, large), (-1.0, 3.0));
    }

    #[test]
    fn orientation_table_has_exact_symmetries() {
        // signed zeros are interchangeable for kernel evaluation
        fn canon(x: f64) -> u64 {
            if x == 0.0 {
                0.0f64.to_bits()
            } else {
                x.to_bits()
            }
        }
        for n in [4usize, 6, 18] {
            let table = orientation_table(n);
            // values stay accurate
            for (k, &(c, s)) in table.iter().enumerate() {
                let theta = k as f64 * std::f64::consts::PI / n as f64;
                assert!((c - theta.cos()).abs() < 1e-12, "n {n} k {k}");
                assert!((s - theta.sin()).abs() < 1e-12, "n {n} k {k}");
            }
            // theta + pi/2 entries are exact (-s, c) images
            for k in 0..n / 2 {
                let (c, s) = table[k];
                let (c2, s2) = table[k + n / 2];
                assert_eq!(canon(c2), canon(-s), "n {n} k {k}");
                assert_eq!(canon(s2), canon(c), "n {n} k {k}");
            }
            // pi - theta entries are exact (-c, s) images
            for k in 1..n {
                let (c, s) = table[k];
                let (c2, s2) = table[n - k];
                assert_eq!(canon(c2), canon(-c), "n {n} k {k}");
                assert_eq!(canon(s2), canon(s), "n {n} k {k}");
            }
        }
    }
}
