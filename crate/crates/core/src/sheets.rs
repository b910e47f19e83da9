//! Sheet-increment sampling: independent Normal(0, area) draws over
//! rectangles, per-bin Wiener increments, and cumulative sheet surfaces.
//!
//! Draws come from a counter-based generator: each variate is a pure function
//! of (seed, key), so a draw tied to a (bin, step) pair reproduces regardless
//! of the order bins are visited in. Samplers split into per-path children
//! deterministically, which keeps parallel ensembles schedule-independent.

use crate::error::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: bijective avalanche mix.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn fold(state: u64, word: u64) -> u64 {
    mix64(state.wrapping_add(GOLDEN).wrapping_add(word))
}

const INV_2_53: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53

/// Seed of the independent child stream `stream` under `base`: a splittable
/// derivation, so extending an ensemble never perturbs existing paths.
pub fn derive_stream_seed(base: u64, stream: u64) -> u64 {
    mix64(base ^ fold(0x5851_F42D_4C95_7F2D, stream))
}

/// Keyed Gaussian sampler.
///
/// `keyed_normal` is stateless in the key; the sequential methods advance an
/// internal counter so successive draws are independent.
#[derive(Debug, Clone)]
pub struct SheetSampler {
    seed: u64,
    counter: u64,
}

/// Key channels, kept distinct so different noise families never collide.
pub mod channel {
    /// Sequential draws (rectangle increments, surfaces).
    pub const SEQUENTIAL: u64 = 0;
    /// Capture noise, keyed by (step, packet).
    pub const CAPTURE: u64 = 1;
    /// Transfer noise, keyed by (step, cell, ordered bin pair).
    pub const TRANSFER: u64 = 2;
    /// Source noise, keyed by (step, packet).
    pub const SOURCE: u64 = 3;
}

impl SheetSampler {
    pub fn new(seed: u64) -> Self {
        SheetSampler { seed, counter: 0 }
    }

    /// Deterministic child sampler for an independent stream (path index).
    /// Children of distinct indices never share draws with each other or the
    /// parent.
    pub fn split(&self, stream: u64) -> Self {
        SheetSampler {
            seed: derive_stream_seed(self.seed, stream),
            counter: 0,
        }
    }

    /// Standard normal draw fully determined by (seed, key).
    pub fn keyed_normal(&self, k0: u64, k1: u64, k2: u64, k3: u64) -> f64 {
        self.stream(k0, k1, k2).normal(k3)
    }

    /// Pre-fold the first three key words; the hot loops of the steppers
    /// reuse one stream per (channel, step, cell).
    pub fn stream(&self, k0: u64, k1: u64, k2: u64) -> KeyedStream {
        let mut s = mix64(self.seed ^ 0xA076_1D64_78BD_642F);
        s = fold(s, k0);
        s = fold(s, k1);
        s = fold(s, k2);
        KeyedStream { state: s }
    }

    /// Next sequential standard normal.
    pub fn next_normal(&mut self) -> f64 {
        let c = self.counter;
        self.counter += 1;
        self.keyed_normal(channel::SEQUENTIAL, c, 0, 0)
    }

    /// Sheet increment over a rectangle of the given area: Normal(0, area).
    pub fn rectangle_increment(&mut self, area: f64) -> Result<f64> {
        if !(area > 0.0) || !area.is_finite() {
            return Err(Error::invalid(format!("rectangle area must be positive, got {area}")));
        }
        Ok(area.sqrt() * self.next_normal())
    }

    /// Per-bin Wiener increment over one time step: `sqrt(dt) * eta`.
    ///
    /// The bin measure only gates the precondition; the normalized increment
    /// over a bin does not depend on the bin's size.
    pub fn wiener_increment(&mut self, bin_measure: f64, dt: f64) -> Result<f64> {
        if !(bin_measure > 0.0) || !bin_measure.is_finite() {
            return Err(Error::invalid(format!("bin measure must be positive, got {bin_measure}")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid(format!("time step must be positive, got {dt}")));
        }
        Ok(dt.sqrt() * self.next_normal())
    }

    /// Sample a sheet surface on `[0, extent_x] x [0, extent_t]` with
    /// `nx x nt` cells.
    pub fn sample_surface(&mut self, nx: usize, nt: usize, extent_x: f64, extent_t: f64) -> Result<SheetSurface> {
        SheetSurface::sample(self, nx, nt, extent_x, extent_t)
    }
}

/// A sampler with the leading key words already folded in. Draws remain pure
/// functions of (seed, full key), independent of evaluation order.
#[derive(Debug, Clone, Copy)]
pub struct KeyedStream {
    state: u64,
}

impl KeyedStream {
    /// Standard normal for the final key word.
    pub fn normal(&self, k3: u64) -> f64 {
        let s = fold(self.state, k3);
        let a = mix64(s ^ 0x8EBC_6AF0_9C88_C6E3);
        let b = mix64(s ^ 0x5899_65CC_7537_4CC3);
        // Box-Muller with u1 in (0,1], u2 in [0,1): bounded, never NaN.
        let u1 = ((a >> 11) + 1) as f64 * INV_2_53;
        let u2 = (b >> 11) as f64 * INV_2_53;
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Two independent standard normals for one key word (the cosine and
    /// sine halves of a Box-Muller pair); cheaper than two `normal` calls.
    pub fn normal_pair(&self, k3: u64) -> (f64, f64) {
        let s = fold(self.state, k3);
        let a = mix64(s ^ 0x8EBC_6AF0_9C88_C6E3);
        let b = mix64(s ^ 0x5899_65CC_7537_4CC3);
        let u1 = ((a >> 11) + 1) as f64 * INV_2_53;
        let u2 = (b >> 11) as f64 * INV_2_53;
        let r = (-2.0 * u1.ln()).sqrt();
        let (sin, cos) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        (r * cos, r * sin)
    }
}

/// Cumulative sheet values on a rectangular lattice.
///
/// Cell draws are quantized to a per-surface power-of-two step chosen so that
/// any partial sum of draws stays exactly representable. Rectangle increments
/// are therefore exact: the increment over a lattice-aligned rectangle equals
/// the sum of its constituent cell draws with no rounding, and the four-corner
/// combination of surface values reproduces it bit for bit.
#[derive(Debug, Clone)]
pub struct SheetSurface {
    nx: usize,
    nt: usize,
    extent_x: f64,
    extent_t: f64,
    scale: f64,
    cells: Vec<i64>,
    cum: Vec<i64>, // inclusive 2D prefix sums of cells
}

impl SheetSurface {
    fn sample(sampler: &mut SheetSampler, nx: usize, nt: usize, extent_x: f64, extent_t: f64) -> Result<Self> {
        if nx == 0 || nt == 0 {
            return Err(Error::invalid("surface needs at least one cell per axis"));
        }
        if !(extent_x > 0.0) || !(extent_t > 0.0) {
            return Err(Error::invalid("surface extents must be positive"));
        }
        let cell_area = (extent_x / nx as f64) * (extent_t / nt as f64);
        let sd = cell_area.sqrt();
        let ncells = nx * nt;
        // Quantization step 2^-k: the Box-Muller |z| bound is < 9, so
        // sum |cells| < ncells * 9.2 * sd * 2^k must stay below 2^51.
        let bound = 9.2 * sd * ncells as f64;
        let k = (51.0 - bound.log2()).floor().min(46.0);
        if k < 0.0 {
            return Err(Error::invalid("surface too large for exact accumulation"));
        }
        let scale = (-k).exp2();
        let inv_scale = k.exp2();

        let mut cells = vec![0i64; ncells];
        for cell in cells.iter_mut() {
            let z = sampler.next_normal();
            *cell = (z * sd * inv_scale).round() as i64;
        }
        let mut cum = vec![0i64; ncells];
        for ix in 0..nx {
            for it in 0..nt {
                let mut c = cells[ix * nt + it];
                if ix > 0 {
                    c += cum[(ix - 1) * nt + it];
                }
                if it > 0 {
                    c += cum[ix * nt + it - 1];
                }
                if ix > 0 && it > 0 {
                    c -= cum[(ix - 1) * nt + it - 1];
                }
                cum[ix * nt + it] = c;
            }
        }
        Ok(SheetSurface {
            nx,
            nt,
            extent_x,
            extent_t,
            scale,
            cells,
            cum,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn nt(&self) -> usize {
        self.nt
    }

    /// Coordinate of lattice node `ix` along the first axis.
    pub fn x_coord(&self, ix: usize) -> f64 {
        self.extent_x * ix as f64 / self.nx as f64
    }

    pub fn t_coord(&self, it: usize) -> f64 {
        self.extent_t * it as f64 / self.nt as f64
    }

    /// Sheet value W at lattice node (ix, it); zero along both axes.
    pub fn value(&self, ix: usize, it: usize) -> f64 {
        if ix == 0 || it == 0 {
            0.0
        } else {
            self.scale * self.cum[(ix - 1) * self.nt + it - 1] as f64
        }
    }

    /// Draw attached to cell (ix, it), `0 <= ix < nx`.
    pub fn cell_draw(&self, ix: usize, it: usize) -> f64 {
        self.scale * self.cells[ix * self.nt + it] as f64
    }

    /// Increment over the lattice-aligned rectangle of cells
    /// `[x0, x1) x [t0, t1)`; exactly the sum of the cell draws inside.
    pub fn increment(&self, x0: usize, x1: usize, t0: usize, t1: usize) -> Result<f64> {
        if x0 >= x1 || t0 >= t1 || x1 > self.nx || t1 > self.nt {
            return Err(Error::invalid(format!(
                "rectangle [{x0},{x1}) x [{t0},{t1}) not inside {}x{} lattice",
                self.nx, self.nt
            )));
        }
        let c = |ix: isize, it: isize| -> i64 {
            if ix < 0 || it < 0 {
                0
            } else {
                self.cum[ix as usize * self.nt + it as usize]
            }
        };
        let sum = c(x1 as isize - 1, t1 as isize - 1) - c(x0 as isize - 1, t1 as isize - 1)
            - c(x1 as isize - 1, t0 as isize - 1)
            + c(x0 as isize - 1, t0 as isize - 1);
        Ok(self.scale * sum as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let mut a = SheetSampler::new(42);
        let mut b = SheetSampler::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_normal().to_bits(), b.next_normal().to_bits());
        }
        let mut c = SheetSampler::new(43);
        assert_ne!(SheetSampler::new(42).next_normal(), c.next_normal());
    }

    #[test]
    fn split_streams_do_not_collide() {
        let parent = SheetSampler::new(7);
        let mut seen = std::collections::HashSet::new();
        for path in 0..64 {
            let mut child = parent.split(path);
            for _ in 0..16 {
                assert!(seen.insert(child.next_normal().to_bits()), "draw collision");
            }
        }
    }

    #[test]
    fn rectangle_increment_rejects_bad_area() {
        let mut s = SheetSampler::new(1);
        assert!(s.rectangle_increment(0.0).is_err());
        assert!(s.rectangle_increment(-1.0).is_err());
        assert!(s.rectangle_increment(f64::NAN).is_err());
    }

    #[test]
    fn degenerate_area_gives_negligible_draws() {
        let mut s = SheetSampler::new(11);
        for _ in 0..1000 {
            let d = s.rectangle_increment(1e-30).unwrap();
            assert!(d.abs() < 1e-10, "draw {d} too large for area 1e-30");
        }
    }

    #[test]
    fn wiener_increment_variance_matches_dt() {
        let mut s = SheetSampler::new(5);
        let dt = 0.125;
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..n {
            let w = s.wiener_increment(0.05, dt).unwrap();
            sum += w;
            sum2 += w * w;
        }
        let var = sum2 / n as f64 - (sum / n as f64).powi(2);
        assert!((var - dt).abs() < 0.03 * dt, "variance {var} vs dt {dt}");
        assert!(s.wiener_increment(0.0, dt).is_err());
        assert!(s.wiener_increment(0.05, 0.0).is_err());
    }

    #[test]
    fn distinct_keys_are_uncorrelated() {
        let s = SheetSampler::new(9);
        let n = 100_000u64;
        let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
        for step in 0..n {
            let a = s.keyed_normal(channel::CAPTURE, step, 3, 0);
            let b = s.keyed_normal(channel::CAPTURE, step, 4, 0);
            sa += a;
            sb += b;
            sab += a * b;
        }
        let n = n as f64;
        let corr = (sab / n - (sa / n) * (sb / n)).abs();
        assert!(corr < 0.01, "bins correlate: {corr}");
    }

    #[test]
    fn surface_axes_are_zero_and_single_cell_matches_draw() {
        let mut s = SheetSampler::new(3);
        let surf = s.sample_surface(1, 1, 1.0, 1.0).unwrap();
        assert_eq!(surf.value(0, 0), 0.0);
        assert_eq!(surf.value(1, 0), 0.0);
        assert_eq!(surf.value(0, 1), 0.0);
        assert_eq!(surf.value(1, 1), surf.cell_draw(0, 0));
    }

    #[test]
    fn increment_equals_cell_sum_exactly() {
        let mut s = SheetSampler::new(17);
        let surf = s.sample_surface(8, 6, 5.0, 5.0).unwrap();
        let inc = surf.increment(2, 7, 1, 5).unwrap();
        let mut direct = 0.0;
        for ix in 2..7 {
            for it in 1..5 {
                direct += surf.cell_draw(ix, it);
            }
        }
        assert_eq!(inc.to_bits(), direct.to_bits(), "increment must be the exact cell sum");
        // Four-corner combination of surface values reproduces it exactly too.
        let corners = surf.value(7, 5) - surf.value(7, 1) - surf.value(2, 5) + surf.value(2, 1);
        assert_eq!(inc.to_bits(), corners.to_bits());
    }

    #[test]
    fn disjoint_rectangles_add_exactly() {
        let mut s = SheetSampler::new(23);
        let surf = s.sample_surface(10, 10, 2.0, 3.0).unwrap();
        let whole = surf.increment(0, 10, 2, 8).unwrap();
        let left = surf.increment(0, 4, 2, 8).unwrap();
        let right = surf.increment(4, 10, 2, 8).unwrap();
        assert_eq!(whole.to_bits(), (left + right).to_bits());
    }

    #[test]
    fn corner_variance_matches_area() {
        // Var W(5,5) = 25 over many seeds.
        let n = 10_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for seed in 0..n {
            let mut s = SheetSampler::new(1000 + seed);
            let surf = s.sample_surface(20, 20, 5.0, 5.0).unwrap();
            let w = surf.value(20, 20);
            sum += w;
            sum2 += w * w;
        }
        let var = sum2 / n as f64 - (sum / n as f64).powi(2);
        assert!((var - 25.0).abs() < 0.05 * 25.0, "Var W(5,5) = {var}, want 25");
    }

    #[test]
    fn disjoint_increments_uncorrelated() {
        let n = 10_000;
        let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
        // |A| = |B| = 0.25 on a [0,1]^2 surface split into 4x4 cells.
        for seed in 0..n {
            let mut s = SheetSampler::new(50_000 + seed);
            let surf = s.sample_surface(4, 4, 1.0, 1.0).unwrap();
            let a = surf.increment(0, 2, 0, 2).unwrap();
            let b = surf.increment(2, 4, 2, 4).unwrap();
            sa += a;
            sb += b;
            sab += a * b;
        }
        let n = n as f64;
        let cov = (sab / n - (sa / n) * (sb / n)).abs();
        let tol = 0.01 * (0.25f64 * 0.25).sqrt().max(1e-12);
        // 0.01 * sqrt(|A| |B|) is about one standard error at this count.
        assert!(cov < 3.0 * tol, "cov {cov} exceeds {}", 3.0 * tol);
    }

    #[test]
    fn fourth_moment_separates_sheet_from_wiener_product() {
        // E[W(A)^4] = 3|A|^2 for sheet increments but 9|A|^2 for the product
        // of two independent Wiener increments over the same rectangle.
        let area: f64 = 2.0;
        let n = 1_000_000u64;
        let s = SheetSampler::new(77);
        let mut m4_sheet = 0.0;
        let mut m4_prod = 0.0;
        for i in 0..n {
            let w = area.sqrt() * s.keyed_normal(channel::SEQUENTIAL, i, 1, 0);
            m4_sheet += w.powi(4);
            let w1 = s.keyed_normal(channel::SEQUENTIAL, i, 2, 0);
            let w2 = s.keyed_normal(channel::SEQUENTIAL, i, 3, 0);
            let p = area.sqrt() * w1 * w2;
            m4_prod += p.powi(4);
        }
        let m4_sheet = m4_sheet / n as f64;
        let m4_prod = m4_prod / n as f64;
        let sheet_ratio = m4_sheet / (3.0 * area * area);
        let prod_ratio = m4_prod / (9.0 * area * area);
        assert!((sheet_ratio - 1.0).abs() < 0.05, "sheet ratio {sheet_ratio}");
        assert!((prod_ratio - 1.0).abs() < 0.05, "product ratio {prod_ratio}");
    }
}
