//! Exact, order-independent accumulation of `f64` terms.
//!
//! [`ExactSum`] is a wide two's-complement fixed-point accumulator covering
//! the full finite `f64` range. Adding a finite `f64` is lossless, so the
//! final [`ExactSum::value`] is the correctly rounded real sum of all
//! terms, independent of the order in which they were added. The filter kernels in
//! [`crate::enhance`] rely on this for their bit-exact symmetry guarantees:
//! permuting convolution taps (as a rotation or flip does) cannot change the
//! result, and tap sets that cancel algebraically produce an exact zero.
//!
//! [`two_product`] splits a product `a * b` into rounded value plus exact
//! remainder, so dot products can be fed through the accumulator without any
//! per-term rounding at all.

/// Number of 64-bit limbs in the accumulator.
const LIMBS: usize = 38;

/// Exponent of bit 0 of limb 0. Bit `i` has weight `2^(LSB_EXP + i)`.
///
/// Covers `2^-1216 ..= 2^1215`: every finite `f64` down to the smallest
/// subnormal fits, with headroom for ~2^190 terms of the largest magnitude.
const LSB_EXP: i32 = -1216;

/// Absolute bit position carrying weight `2^-1074` (the subnormal quantum).
const SUBNORMAL_POS: usize = (-1074 - LSB_EXP) as usize;

/// Fixed-point accumulator holding an exact sum of `f64` terms.
#[derive(Clone)]
pub struct ExactSum {
    limbs: [u64; LIMBS],
}

impl Default for ExactSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSum {
    pub fn new() -> Self {
        Self { limbs: [0; LIMBS] }
    }

    pub fn reset(&mut self) {
        self.limbs = [0; LIMBS];
    }

    /// Adds a finite term. Infinite or NaN terms are rejected.
    #[inline]
    pub fn add(&mut self, x: f64) {
        let bits = x.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i32;
        debug_assert!(biased != 0x7ff, "non-finite term");
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e2) = if biased == 0 {
            if frac == 0 {
                return;
            }
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let pos = (e2 - LSB_EXP) as u32;
        let limb = (pos / 64) as usize;
        let shift = pos % 64;
        let lo = mant << shift;
        let hi = if shift == 0 {
            0
        } else {
            mant >> (64 - shift)
        };
        if bits >> 63 == 0 {
            self.add_chunk(limb, lo, hi);
        } else {
            self.sub_chunk(limb, lo, hi);
        }
    }

    /// Adds the exact product `a * b` (both parts of its Dekker split).
    #[inline]
    pub fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_product(a, b);
        self.add(p);
        self.add(e);
    }

    #[inline]
    fn add_chunk(&mut self, limb: usize, lo: u64, hi: u64) {
        let (r0, c0) = self.limbs[limb].overflowing_add(lo);
        self.limbs[limb] = r0;
        let (r1, c1a) = self.limbs[limb + 1].overflowing_add(hi);
        let (r1, c1b) = r1.overflowing_add(u64::from(c0));
        self.limbs[limb + 1] = r1;
        let mut carry = c1a || c1b;
        let mut i = limb + 2;
        // carry past the top limb wraps: the accumulator is two's complement
        while carry && i < LIMBS {
            let (r, c) = self.limbs[i].overflowing_add(1);
            self.limbs[i] = r;
            carry = c;
            i += 1;
        }
    }

    #[inline]
    fn sub_chunk(&mut self, limb: usize, lo: u64, hi: u64) {
        let (r0, b0) = self.limbs[limb].overflowing_sub(lo);
        self.limbs[limb] = r0;
        let (r1, b1a) = self.limbs[limb + 1].overflowing_sub(hi);
        let (r1, b1b) = r1.overflowing_sub(u64::from(b0));
        self.limbs[limb + 1] = r1;
        let mut borrow = b1a || b1b;
        let mut i = limb + 2;
        while borrow && i < LIMBS {
            let (r, b) = self.limbs[i].overflowing_sub(1);
            self.limbs[i] = r;
            borrow = b;
            i += 1;
        }
    }

    /// Correctly rounded value of the accumulated sum (round to nearest,
    /// ties to even). Exact zero sums return `+0.0`.
    pub fn value(&self) -> f64 {
        let negative = self.limbs[LIMBS - 1] >> 63 == 1;
        let mut mag = self.limbs;
        if negative {
            // two's complement negation
            let mut carry = true;
            for limb in mag.iter_mut() {
                *limb = !*limb;
                if carry {
                    let (r, c) = limb.overflowing_add(1);
                    *limb = r;
                    carry = c;
                }
            }
        }
        let Some(top) = mag.iter().rposition(|&l| l != 0) else {
            return 0.0;
        };
        let msb = 63 - mag[top].leading_zeros() as usize;
        let msb_pos = top * 64 + msb;
        let lead_exp = LSB_EXP + msb_pos as i32;
        debug_assert!(lead_exp <= 1023, "accumulator overflow");

        // lowest retained bit position
        let lo_pos = if lead_exp >= -1022 {
            msb_pos - 52
        } else {
            SUBNORMAL_POS
        };

        let mut mantissa = if msb_pos >= lo_pos {
            extract_bits(&mag, lo_pos, msb_pos)
        } else {
            0
        };
        let guard = lo_pos > 0 && bit_at(&mag, lo_pos - 1);
        let sticky = lo_pos > 1 && any_bit_below(&mag, lo_pos - 1);
        if guard && (sticky || mantissa & 1 == 1) {
            mantissa += 1;
        }

        let mut weight = LSB_EXP + lo_pos as i32;
        if mantissa == 1u64 << 53 {
            mantissa >>= 1;
            weight += 1;
        }

        let bits = if mantissa == 0 {
            0
        } else if mantissa < 1u64 << 52 {
            debug_assert_eq!(weight, -1074);
            mantissa
        } else {
            let exp_field = (weight + 1075) as u64;
            debug_assert!((1..=2046).contains(&exp_field));
            (exp_field << 52) | (mantissa & ((1u64 << 52) - 1))
        };
        f64::from_bits(bits | (u64::from(negative) << 63))
    }
}

/// Bits `lo..=hi` of the magnitude, as an integer (`hi - lo <= 63`).
fn extract_bits(mag: &[u64; LIMBS], lo: usize, hi: usize) -> u64 {
    debug_assert!(hi - lo <= 63);
    let limb = lo / 64;
    let shift = lo % 64;
    let mut v = mag[limb] >> shift;
    if shift != 0 && limb + 1 < LIMBS {
        v |= mag[limb + 1] << (64 - shift);
    }
    let width = hi - lo + 1;
    if width < 64 {
        v &= (1u64 << width) - 1;
    }
    v
}

fn bit_at(mag: &[u64; LIMBS], pos: usize) -> bool {
    mag[pos / 64] >> (pos % 64) & 1 == 1
}

fn any_bit_below(mag: &[u64; LIMBS], pos: usize) -> bool {
    let limb = pos / 64;
    let shift = pos % 64;
    if shift != 0 && mag[limb] & ((1u64 << shift) - 1) != 0 {
        return true;
    }
    mag[..limb].iter().any(|&l| l != 0)
}

/// Dekker/Veltkamp exact product: returns `(p, e)` with `p = fl(a * b)` and
/// `p + e == a * b` exactly.
///
/// Requires the product to stay in the normal range; with image intensities
/// in `[0, 1]` and bounded kernel taps this always holds.
#[inline]
pub fn two_product(a: f64, b: f64) -> (f64, f64) {
    const SPLIT: f64 = 134_217_729.0; // 2^27 + 1
    let p = a * b;
    let ta = SPLIT * a;
    let ahi = ta - (ta - a);
    let alo = a - ahi;
    let tb = SPLIT * b;
    let bhi = tb - (tb - b);
    let blo = b - bhi;
    let e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, e)
}
