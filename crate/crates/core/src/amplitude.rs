//! Complex wave amplitudes on the (H, V) polarization basis.

use num_complex::Complex64;

/// A single complex wave amplitude.
pub type Amplitude = Complex64;

/// The two linear polarization axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolAxis {
    H,
    V,
}

/// Pair of complex amplitudes on the horizontal/vertical basis (Jones-vector role).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolarizedAmplitude {
    pub h: Amplitude,
    pub v: Amplitude,
}

impl PolarizedAmplitude {
    pub const ZERO: Self = Self {
        h: Amplitude::new(0.0, 0.0),
        v: Amplitude::new(0.0, 0.0),
    };

    pub fn new(h: Amplitude, v: Amplitude) -> Self {
        Self { h, v }
    }

    /// Unit-norm horizontally polarized wave.
    pub fn horizontal() -> Self {
        Self::new(Amplitude::new(1.0, 0.0), Amplitude::new(0.0, 0.0))
    }

    /// Unit-norm vertically polarized wave.
    pub fn vertical() -> Self {
        Self::new(Amplitude::new(0.0, 0.0), Amplitude::new(1.0, 0.0))
    }

    pub fn component(&self, axis: PolAxis) -> Amplitude {
        match axis {
            PolAxis::H => self.h,
            PolAxis::V => self.v,
        }
    }

    pub fn component_mut(&mut self, axis: PolAxis) -> &mut Amplitude {
        match axis {
            PolAxis::H => &mut self.h,
            PolAxis::V => &mut self.v,
        }
    }

    /// |h|^2 + |v|^2.
    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    /// Componentwise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::new(self.h.conj(), self.v.conj())
    }

    /// Unconjugated dot product `h1*h2 + v1*v2`.
    pub fn dot(&self, other: &Self) -> Amplitude {
        self.h * other.h + self.v * other.v
    }

    pub fn is_finite(&self) -> bool {
        self.h.re.is_finite()
            && self.h.im.is_finite()
            && self.v.re.is_finite()
            && self.v.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.h.norm_sqr() == 0.0 && self.v.norm_sqr() == 0.0
    }
}

impl core::ops::Add for PolarizedAmplitude {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.h + rhs.h, self.v + rhs.v)
    }
}

impl core::ops::AddAssign for PolarizedAmplitude {
    fn add_assign(&mut self, rhs: Self) {
        self.h += rhs.h;
        self.v += rhs.v;
    }
}

impl core::ops::Mul<Amplitude> for PolarizedAmplitude {
    type Output = Self;
    fn mul(self, rhs: Amplitude) -> Self {
        Self::new(self.h * rhs, self.v * rhs)
    }
}

/// 2x2 complex matrix acting on the (H, V) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jones {
    pub hh: Amplitude,
    pub hv: Amplitude,
    pub vh: Amplitude,
    pub vv: Amplitude,
}

impl Jones {
    pub const ZERO: Self = Self {
        hh: Amplitude::new(0.0, 0.0),
        hv: Amplitude::new(0.0, 0.0),
        vh: Amplitude::new(0.0, 0.0),
        vv: Amplitude::new(0.0, 0.0),
    };

    /// Scalar multiple of the identity: both polarizations scaled by `c`.
    pub fn scalar(c: Amplitude) -> Self {
        Self::diagonal(c, c)
    }

    /// Diagonal matrix: H scaled by `h`, V scaled by `v`.
    pub fn diagonal(h: Amplitude, v: Amplitude) -> Self {
        Self {
            hh: h,
            hv: Amplitude::new(0.0, 0.0),
            vh: Amplitude::new(0.0, 0.0),
            vv: v,
        }
    }

    /// Counter-clockwise rotation of the polarization plane by `theta` radians.
    pub fn rotation(theta: f64) -> Self {
        let (sin, cos) = (libm::sin(theta), libm::cos(theta));
        Self {
            hh: Amplitude::new(cos, 0.0),
            hv: Amplitude::new(-sin, 0.0),
            vh: Amplitude::new(sin, 0.0),
            vv: Amplitude::new(cos, 0.0),
        }
    }

    pub fn apply(&self, a: &PolarizedAmplitude) -> PolarizedAmplitude {
        PolarizedAmplitude::new(
            self.hh * a.h + self.hv * a.v,
            self.vh * a.h + self.vv * a.v,
        )
    }

    /// Matrix transpose (not conjugated).
    pub fn transpose(&self) -> Self {
        Self {
            hh: self.hh,
            hv: self.vh,
            vh: self.hv,
            vv: self.vv,
        }
    }

    pub fn coeff(&self, from: PolAxis, to: PolAxis) -> Amplitude {
        match (from, to) {
            (PolAxis::H, PolAxis::H) => self.hh,
            (PolAxis::V, PolAxis::H) => self.hv,
            (PolAxis::H, PolAxis::V) => self.vh,
            (PolAxis::V, PolAxis::V) => self.vv,
        }
    }
}
