//! Uniform transverse grids and the complex fields sampled on them.
//!
//! Amplitudes use the probability normalization `sum |a_k|^2 dx = 1`, so a
//! [`Field1D`] carries units of m^-1/2 and a [`BiphotonField`] m^-1.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{require_positive, Error, Result};

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 16;

/// Uniform grid `x_k = (k - n/2) dx`, `k in [0, n)`. The optical axis is
/// sample `n/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n: usize,
    dx: f64,
}

impl Grid1D {
    /// Grid of `n` samples spanning a window of `width` meters.
    pub fn new(n: usize, width: f64) -> Result<Self> {
        if n < MIN_SAMPLES {
            return Err(Error::InvalidGrid("sample count must be at least 16"));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid("sample count must be even"));
        }
        let width = require_positive("grid width", width)?;
        Ok(Grid1D {
            n,
            dx: width / n as f64,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn width(&self) -> f64 {
        self.n as f64 * self.dx
    }

    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dx
    }

    pub fn coords(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.x(k))
    }

    /// Index of the sample nearest to `x`, or `None` when `x` falls outside
    /// the window `[x_0 - dx/2, x_{n-1} + dx/2)`.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        if !x.is_finite() {
            return None;
        }
        let k = libm::floor(x / self.dx + (self.n / 2) as f64 + 0.5);
        if k < 0.0 || k >= self.n as f64 {
            None
        } else {
            Some(k as usize)
        }
    }

    /// Spatial frequency (cycles per meter) of DFT bin `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.n as i64;
        let k = k as i64;
        let shifted = if k < n / 2 { k } else { k - n };
        shifted as f64 / (self.n as f64 * self.dx)
    }

    /// Nyquist frequency in cycles per meter.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.dx
    }
}

fn check_finite(amp: &[Complex64]) -> Result<()> {
    match amp.iter().position(|a| !(a.re.is_finite() && a.im.is_finite())) {
        Some(k) => Err(Error::NonFinite(k)),
        None => Ok(()),
    }
}

/// Complex scalar amplitude on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    grid: Grid1D,
    amp: Vec<Complex64>,
}

impl Field1D {
    pub fn new(grid: Grid1D, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != grid.n() {
            return Err(Error::ShapeMismatch {
                expected: grid.n(),
                got: amp.len(),
            });
        }
        check_finite(&amp)?;
        Ok(Field1D { grid, amp })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Field1D {
            grid,
            amp: alloc::vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    /// Samples `f(x_k)` on the grid.
    pub fn from_fn(grid: Grid1D, mut f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        let amp = grid.coords().map(&mut f).collect();
        Field1D::new(grid, amp)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amp(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn into_amp(self) -> Vec<Complex64> {
        self.amp
    }

    /// `sum_k |a_k|^2 dx`.
    pub fn norm2(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn normalize(&self) -> Result<Field1D> {
        let n2 = self.norm2();
        if !(n2 > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / libm::sqrt(n2), 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Field1D {
        Field1D {
            grid: self.grid,
            amp: self.amp.iter().map(|a| a * factor).collect(),
        }
    }

    /// Pointwise `|a_k|^2`.
    pub fn intensity(&self) -> Vec<f64> {
        self.amp.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn from_parts(grid: Grid1D, amp: Vec<Complex64>) -> Self {
        debug_assert_eq!(amp.len(), grid.n());
        Field1D { grid, amp }
    }
}

/// Joint two-photon amplitude `psi(x_s, x_i)`, stored row-major with one row
/// per signal sample (a row runs over the idler axis).
#[derive(Debug, Clone, PartialEq)]
pub struct BiphotonField {
    grid_s: Grid1D,
    grid_i: Grid1D,
    amp: Vec<Complex64>,
}

impl BiphotonField {
    pub fn new(grid_s: Grid1D, grid_i: Grid1D, amp: Vec<Complex64>) -> Result<Self> {
        let expected = grid_s.n() * grid_i.n();
        if amp.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: amp.len(),
            });
        }
        check_finite(&amp)?;
        Ok(BiphotonField {
            grid_s,
            grid_i,
            amp,
        })
    }

    pub fn from_fn(
        grid_s: Grid1D,
        grid_i: Grid1D,
        mut f: impl FnMut(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let mut amp = Vec::with_capacity(grid_s.n() * grid_i.n());
        for xs in grid_s.coords() {
            for xi in grid_i.coords() {
                amp.push(f(xs, xi));
            }
        }
        BiphotonField::new(grid_s, grid_i, amp)
    }

    /// Product state `f(x_s) g(x_i)`.
    pub fn product(signal: &Field1D, idler: &Field1D) -> Self {
        let mut amp = Vec::with_capacity(signal.amp.len() * idler.amp.len());
        for a in &signal.amp {
            amp.extend(idler.amp.iter().map(|b| a * b));
        }
        BiphotonField {
            grid_s: signal.grid,
            grid_i: idler.grid,
            amp,
        }
    }

    pub fn grid_s(&self) -> &Grid1D {
        &self.grid_s
    }

    pub fn grid_i(&self) -> &Grid1D {
        &self.grid_i
    }

    pub fn amp(&self) -> &[Complex64] {
        &self.amp
    }

    pub(crate) fn amp_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    #[inline]
    pub fn get(&self, s: usize, i: usize) -> Complex64 {
        self.amp[s * self.grid_i.n() + i]
    }

    /// Amplitudes over the idler axis at signal sample `s`.
    pub fn row(&self, s: usize) -> &[Complex64] {
        let ni = self.grid_i.n();
        &self.amp[s * ni..(s + 1) * ni]
    }

    /// Amplitudes over the signal axis at idler sample `i`.
    pub fn column(&self, i: usize) -> Vec<Complex64> {
        let ni = self.grid_i.n();
        (0..self.grid_s.n()).map(|s| self.amp[s * ni + i]).collect()
    }

    /// `sum |psi|^2 dx_s dx_i`.
    pub fn norm2(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid_s.dx() * self.grid_i.dx()
    }

    pub fn normalize(&self) -> Result<BiphotonField> {
        let n2 = self.norm2();
        if !(n2 > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(1.0 / libm::sqrt(n2)))
    }

    pub fn scaled(&self, factor: f64) -> BiphotonField {
        BiphotonField {
            grid_s: self.grid_s,
            grid_i: self.grid_i,
            amp: self.amp.iter().map(|a| a * factor).collect(),
        }
    }

    /// `sum_s |psi(x_s, x_i)|^2 dx_s` for every idler sample: the norm of
    /// each unnormalized conditional signal state.
    pub fn idler_marginal(&self) -> Vec<f64> {
        let ni = self.grid_i.n();
        let mut out = alloc::vec![0.0; ni];
        for row in self.amp.chunks_exact(ni) {
            for (acc, a) in out.iter_mut().zip(row) {
                *acc += a.norm_sqr();
            }
        }
        let dx = self.grid_s.dx();
        out.iter_mut().for_each(|v| *v *= dx);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_pitch_and_centering() {
        let g = Grid1D::new(1024, 10.24e-3).unwrap();
        assert!((g.dx() - 1.0e-5).abs() < 1e-18);
        let g = Grid1D::new(16, 1.6e-4).unwrap();
        assert!((g.x(0) + 8.0e-5).abs() < 1e-18);
        assert_eq!(g.x(8), 0.0);
        assert!((g.width() - 1.6e-4).abs() < 1e-18);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(Grid1D::new(15, 1.0).is_err());
        assert!(Grid1D::new(14, 1.0).is_err());
        assert!(Grid1D::new(17, 1.0).is_err());
        assert!(Grid1D::new(16, 0.0).is_err());
        assert!(Grid1D::new(16, -1.0).is_err());
        assert!(Grid1D::new(16, f64::NAN).is_err());
    }

    #[test]
    fn symmetric_coordinates_negate_exactly() {
        let g = Grid1D::new(1024, 20.48e-3).unwrap();
        for k in 1..g.n() {
            assert_eq!(g.x(k), -g.x(g.n() - k));
        }
    }

    #[test]
    fn nearest_index_and_window() {
        let g = Grid1D::new(16, 16.0).unwrap();
        assert_eq!(g.nearest_index(0.0), Some(8));
        assert_eq!(g.nearest_index(0.49), Some(8));
        assert_eq!(g.nearest_index(-8.0), Some(0));
        assert_eq!(g.nearest_index(7.4), Some(15));
        assert_eq!(g.nearest_index(-8.6), None);
        assert_eq!(g.nearest_index(7.6), None);
    }

    #[test]
    fn frequencies_wrap_at_half() {
        let g = Grid1D::new(16, 16.0).unwrap();
        assert_eq!(g.frequency(0), 0.0);
        assert!((g.frequency(1) - 1.0 / 16.0).abs() < 1e-15);
        assert!((g.frequency(8) + 0.5).abs() < 1e-15);
        assert!((g.frequency(15) + 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn norm2_cases() {
        let g = Grid1D::new(64, 6.4e-3).unwrap();
        assert_eq!(Field1D::zeros(g).norm2(), 0.0);

        let a = 1.0 / libm::sqrt(g.n() as f64 * g.dx());
        let f = Field1D::from_fn(g, |_| c(a, 0.0)).unwrap();
        assert!((f.norm2() - 1.0).abs() < 1e-12);

        let mut amp = alloc::vec![c(0.0, 0.0); 64];
        amp[17] = c(3.0, -4.0);
        let f = Field1D::new(g, amp).unwrap();
        assert!((f.norm2() - 25.0 * g.dx()).abs() < 1e-15);
    }

    #[test]
    fn normalize_behaviour() {
        let g = Grid1D::new(32, 1.0).unwrap();
        let f = Field1D::from_fn(g, |x| c(libm::exp(-x * x), 0.3 * x)).unwrap();
        let n1 = f.normalize().unwrap();
        assert!((n1.norm2() - 1.0).abs() < 1e-12);
        let n2 = n1.normalize().unwrap();
        for (a, b) in n1.amp().iter().zip(n2.amp()) {
            assert!((a - b).norm() < 1e-12);
        }
        let n7 = f.scaled(c(7.0, 0.0)).normalize().unwrap();
        for (a, b) in n1.amp().iter().zip(n7.amp()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(Field1D::zeros(g).normalize(), Err(Error::ZeroNorm));
    }

    #[test]
    fn field_validation() {
        let g = Grid1D::new(16, 1.0).unwrap();
        assert!(matches!(
            Field1D::new(g, alloc::vec![c(0.0, 0.0); 15]),
            Err(Error::ShapeMismatch { .. })
        ));
        let mut amp = alloc::vec![c(0.0, 0.0); 16];
        amp[3] = c(f64::INFINITY, 0.0);
        assert_eq!(Field1D::new(g, amp), Err(Error::NonFinite(3)));
    }

    #[test]
    fn biphoton_norm_splits_over_idler_samples() {
        let gs = Grid1D::new(32, 2.0).unwrap();
        let gi = Grid1D::new(16, 1.0).unwrap();
        let b = BiphotonField::from_fn(gs, gi, |xs, xi| {
            c(libm::exp(-(xs - xi) * (xs - xi)), xs * xi)
        })
        .unwrap();
        let marginal = b.idler_marginal();
        let total: f64 = marginal.iter().sum::<f64>() * gi.dx();
        assert!((total - b.norm2()).abs() < 1e-12 * b.norm2());
        let nb = b.normalize().unwrap();
        assert!((nb.norm2() - 1.0).abs() < 1e-12);
        assert_eq!(nb.row(3)[5], nb.get(3, 5));
        assert_eq!(nb.column(5)[3], nb.get(3, 5));
    }
}
