//! The two exponential potentials, V(x) = +-V0 (e^{2|x|/a} - 1), and the
//! wavenumbers every other module derives from them.
//!
//! Units: the Schrödinger equation is written as psi'' + kappa (E - V) psi = 0
//! with kappa = 2 mu / hbar^2 (default 1). All wavenumbers scale as sqrt(kappa).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{imag_unit, re, Real};

fn check_positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {}",
            v.to_f64_lossy()
        )))
    }
}

/// Open well V(x) = V0 (e^{2|x|/a} - 1), V0 > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellParams<T> {
    pub v0: T,
    pub a: T,
    pub two_mu_over_hbar2: T,
}

impl<T: Real> WellParams<T> {
    pub fn new(v0: T, a: T) -> Result<Self> {
        Self::with_units(v0, a, T::one())
    }

    pub fn with_units(v0: T, a: T, two_mu_over_hbar2: T) -> Result<Self> {
        check_positive("v0", v0)?;
        check_positive("a", a)?;
        check_positive("two_mu_over_hbar2", two_mu_over_hbar2)?;
        Ok(Self {
            v0,
            a,
            two_mu_over_hbar2,
        })
    }

    /// q = sqrt(kappa V0).
    pub fn q(&self) -> T {
        (self.two_mu_over_hbar2 * self.v0).sqrt()
    }

    /// k = sqrt(kappa (E + V0)); requires E > -V0.
    pub fn k(&self, energy: T) -> Result<T> {
        if !(energy > -self.v0) {
            return Err(Error::EnergyBelowWellBottom {
                energy: energy.to_f64_lossy(),
                bottom: (-self.v0).to_f64_lossy(),
            });
        }
        Ok((self.two_mu_over_hbar2 * (energy + self.v0)).sqrt())
    }
}

/// Bottomless barrier V(x) = -U0 (e^{2|x|/a} - 1), U0 > 0. The barrier top is E = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams<T> {
    pub u0: T,
    pub a: T,
    pub two_mu_over_hbar2: T,
}

impl<T: Real> BarrierParams<T> {
    pub fn new(u0: T, a: T) -> Result<Self> {
        Self::with_units(u0, a, T::one())
    }

    pub fn with_units(u0: T, a: T, two_mu_over_hbar2: T) -> Result<Self> {
        check_positive("u0", u0)?;
        check_positive("a", a)?;
        check_positive("two_mu_over_hbar2", two_mu_over_hbar2)?;
        Ok(Self {
            u0,
            a,
            two_mu_over_hbar2,
        })
    }

    /// s = sqrt(kappa U0).
    pub fn s(&self) -> T {
        (self.two_mu_over_hbar2 * self.u0).sqrt()
    }

    /// p = sqrt(kappa (E - U0)) on the branch fixed for this crate: real and
    /// positive above U0, +i sqrt(kappa (U0 - E)) below it.
    pub fn p(&self, energy: T) -> Complex<T> {
        let d = self.two_mu_over_hbar2 * (energy - self.u0);
        if d >= T::zero() {
            re(d.sqrt())
        } else {
            imag_unit::<T>() * (-d).sqrt()
        }
    }
}

/// Wavenumbers at one energy. For the well `k_or_p` is k (real), for the
/// barrier it is p on the branch of [`BarrierParams::p`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumbers<T> {
    pub k_or_p: Complex<T>,
    pub q_or_s: T,
    /// Bessel order i * k_or_p * a.
    pub order: Complex<T>,
    /// Bessel argument at x = 0, q_or_s * a.
    pub lambda: T,
}

/// Operations shared by both potentials.
pub trait ExponentialPotential<T: Real> {
    fn potential_value(&self, x: T) -> T;
    fn wavenumbers(&self, energy: T) -> Result<Wavenumbers<T>>;
    /// Classical turning points (x1, x2) = (-x2, x2).
    fn turning_points(&self, energy: T) -> Result<(T, T)>;
    fn length(&self) -> T;
    fn two_mu_over_hbar2(&self) -> T;
}

impl<T: Real> ExponentialPotential<T> for WellParams<T> {
    fn potential_value(&self, x: T) -> T {
        self.v0 * ((T::lit(2.0) * x.abs() / self.a).exp() - T::one())
    }

    fn wavenumbers(&self, energy: T) -> Result<Wavenumbers<T>> {
        let k = re(self.k(energy)?);
        Ok(Wavenumbers {
            k_or_p: k,
            q_or_s: self.q(),
            order: imag_unit::<T>() * k * self.a,
            lambda: self.q() * self.a,
        })
    }

    fn turning_points(&self, energy: T) -> Result<(T, T)> {
        if !(energy > T::zero()) {
            return Err(Error::NoClassicalTurningPoints {
                energy: energy.to_f64_lossy(),
            });
        }
        let x2 = self.a * T::lit(0.5) * ((energy + self.v0) / self.v0).ln();
        Ok((-x2, x2))
    }

    fn length(&self) -> T {
        self.a
    }

    fn two_mu_over_hbar2(&self) -> T {
        self.two_mu_over_hbar2
    }
}

impl<T: Real> ExponentialPotential<T> for BarrierParams<T> {
    fn potential_value(&self, x: T) -> T {
        -self.u0 * ((T::lit(2.0) * x.abs() / self.a).exp() - T::one())
    }

    fn wavenumbers(&self, energy: T) -> Result<Wavenumbers<T>> {
        let p = self.p(energy);
        Ok(Wavenumbers {
            k_or_p: p,
            q_or_s: self.s(),
            order: imag_unit::<T>() * p * self.a,
            lambda: self.s() * self.a,
        })
    }

    fn turning_points(&self, energy: T) -> Result<(T, T)> {
        if !(energy < T::zero()) {
            return Err(Error::NoClassicalTurningPoints {
                energy: energy.to_f64_lossy(),
            });
        }
        let x2 = self.a * T::lit(0.5) * (T::one() - energy / self.u0).ln();
        Ok((-x2, x2))
    }

    fn length(&self) -> T {
        self.a
    }

    fn two_mu_over_hbar2(&self) -> T {
        self.two_mu_over_hbar2
    }
}

/// Either potential, as read from a config file or the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential<T> {
    Well(WellParams<T>),
    Barrier(BarrierParams<T>),
}

/// Uniform grid of `points` energies from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGridSpec<T> {
    pub start: T,
    pub stop: T,
    pub points: usize,
}

impl<T: Real> EnergyGridSpec<T> {
    pub fn new(start: T, stop: T, points: usize) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite()) || points == 0 {
            return Err(Error::InvalidParameter(
                "energy grid needs finite bounds and at least one point".into(),
            ));
        }
        if points > 1 && !(stop > start) {
            return Err(Error::InvalidParameter(
                "energy grid must be increasing".into(),
            ));
        }
        Ok(Self {
            start,
            stop,
            points,
        })
    }

    /// Grid with a given spacing; the last point is the first at or past `stop`.
    pub fn with_step(start: T, stop: T, step: T) -> Result<Self> {
        if !(step > T::zero()) {
            return Err(Error::InvalidParameter("grid step must be positive".into()));
        }
        let n = ((stop - start) / step).ceil().to_usize().unwrap_or(0) + 1;
        Self::new(start, start + step * T::lit((n - 1) as f64), n.max(2))
    }

    pub fn step(&self) -> T {
        if self.points < 2 {
            T::zero()
        } else {
            (self.stop - self.start) / T::lit((self.points - 1) as f64)
        }
    }

    pub fn energy(&self, i: usize) -> T {
        if i + 1 == self.points && self.points > 1 {
            self.stop
        } else {
            self.start + self.step() * T::lit(i as f64)
        }
    }

    pub fn energies(&self) -> Vec<T> {
        (0..self.points).map(|i| self.energy(i)).collect()
    }
}
