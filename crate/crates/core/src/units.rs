//! Domain units and parameter blocks shared by every model.
//!
//! Temperatures are stored in kelvin. Values quoted in °F are converted at
//! the boundary; temperature *differences* in °F scale by exactly 5/9.

use crate::error::{finite, positive, Result, VesError};

const KELVIN_OFFSET: f64 = 273.15;

/// Converts a temperature difference in °F to kelvin.
pub fn delta_f_to_delta_k(df: f64) -> f64 {
    df * 5.0 / 9.0
}

/// Absolute temperature, stored in kelvin.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Temperature(f64);

impl Temperature {
    pub fn from_kelvin(k: f64) -> Result<Self> {
        positive("temperature_k", k).map(Temperature)
    }

    pub fn from_celsius(c: f64) -> Result<Self> {
        finite("temperature_c", c)?;
        Self::from_kelvin(c + KELVIN_OFFSET)
    }

    pub fn from_fahrenheit(f: f64) -> Result<Self> {
        finite("temperature_f", f)?;
        Self::from_kelvin((f - 32.0) * 5.0 / 9.0 + KELVIN_OFFSET)
    }

    pub fn kelvin(self) -> f64 {
        self.0
    }

    pub fn celsius(self) -> f64 {
        self.0 - KELVIN_OFFSET
    }

    pub fn fahrenheit(self) -> f64 {
        (self.0 - KELVIN_OFFSET) * 9.0 / 5.0 + 32.0
    }

    /// Shifts by a difference in kelvin.
    pub fn offset(self, dk: f64) -> Result<Self> {
        Self::from_kelvin(self.0 + dk)
    }
}

/// Thermodynamic constants of moist air.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Specific heat of dry air, J/(kg·K).
    pub c_pa: f64,
    /// Specific heat of water vapor, J/(kg·K).
    pub c_pw: f64,
    /// Heat of evaporation of water at 0 °C, J/kg.
    pub g_h2o: f64,
    /// Specific gas constant of dry air, J/(kg·K).
    pub r_g: f64,
}

impl PhysicalConstants {
    pub fn new(c_pa: f64, c_pw: f64, g_h2o: f64, r_g: f64) -> Result<Self> {
        Ok(Self {
            c_pa: positive("c_pa", c_pa)?,
            c_pw: positive("c_pw", c_pw)?,
            g_h2o: positive("g_h2o", g_h2o)?,
            r_g: positive("r_g", r_g)?,
        })
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            c_pa: 1006.0,
            c_pw: 1860.0,
            g_h2o: 2.501e6,
            r_g: 287.055,
        }
    }
}

/// Lumped single-zone envelope and its comfort band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildingParams {
    /// Envelope resistance between zone and outdoors, K/W.
    pub r_th: f64,
    /// Zone thermal capacitance, J/K.
    pub c_th: f64,
    pub comfort_low: Temperature,
    pub comfort_high: Temperature,
}

impl BuildingParams {
    pub fn new(
        r_th: f64,
        c_th: f64,
        comfort_low: Temperature,
        comfort_high: Temperature,
    ) -> Result<Self> {
        positive("r_th", r_th)?;
        positive("c_th", c_th)?;
        if comfort_low >= comfort_high {
            return Err(VesError::InvalidParameter {
                name: "comfort_low",
                reason: format!(
                    "comfort_low ({} K) must be below comfort_high ({} K)",
                    comfort_low.kelvin(),
                    comfort_high.kelvin()
                ),
            });
        }
        Ok(Self {
            r_th,
            c_th,
            comfort_low,
            comfort_high,
        })
    }

    pub fn comfort_span(&self) -> f64 {
        self.comfort_high.kelvin() - self.comfort_low.kelvin()
    }
}

/// Air-handler fan, chiller and supply-air parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvacParams {
    /// Quadratic fan coefficient, W/(kg/s)².
    pub alpha_1f: f64,
    /// Linear fan coefficient, W/(kg/s). May be negative.
    pub alpha_2f: f64,
    pub cop: f64,
    pub t_sa: Temperature,
    /// Outside air ratio in [0, 1].
    pub r_oa: f64,
}

impl HvacParams {
    pub fn new(
        alpha_1f: f64,
        alpha_2f: f64,
        cop: f64,
        t_sa: Temperature,
        r_oa: f64,
    ) -> Result<Self> {
        positive("alpha_1f", alpha_1f)?;
        finite("alpha_2f", alpha_2f)?;
        positive("cop", cop)?;
        finite("r_oa", r_oa)?;
        if !(0.0..=1.0).contains(&r_oa) {
            return Err(VesError::RatioOutOfRange(r_oa));
        }
        Ok(Self {
            alpha_1f,
            alpha_2f,
            cop,
            t_sa,
            r_oa,
        })
    }

    pub fn with_r_oa(self, r_oa: f64) -> Result<Self> {
        Self::new(self.alpha_1f, self.alpha_2f, self.cop, self.t_sa, r_oa)
    }

    /// Minimum of the fan power curve over `[lo, hi]`.
    pub fn min_fan_power(&self, lo: f64, hi: f64) -> f64 {
        let fan = |m: f64| self.alpha_1f * m * m + self.alpha_2f * m;
        let vertex = (-self.alpha_2f / (2.0 * self.alpha_1f)).clamp(lo, hi);
        fan(lo).min(fan(hi)).min(fan(vertex))
    }

    /// Rejects parameter sets whose fan power goes negative on `[lo, hi]`.
    pub fn check_fan_range(&self, lo: f64, hi: f64) -> Result<()> {
        let min = self.min_fan_power(lo, hi);
        if min < 0.0 {
            return Err(VesError::InvalidParameter {
                name: "alpha_2f",
                reason: format!(
                    "fan power reaches {min:.3} W on the operating range [{lo:.4}, {hi:.4}] kg/s"
                ),
            });
        }
        Ok(())
    }
}

/// State of charge of the virtual battery, `(T_H - T) / (T_H - T_L)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Soc(f64);

impl Soc {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Unclamped SoC; values outside `[0, 1]` mean the comfort band is violated.
pub fn soc_raw(t: f64, b: &BuildingParams) -> f64 {
    (b.comfort_high.kelvin() - t) / b.comfort_span()
}

pub fn soc_from_temperature(t: Temperature, b: &BuildingParams) -> Result<Soc> {
    if t < b.comfort_low || t > b.comfort_high {
        return Err(VesError::ComfortViolation {
            temperature_k: t.kelvin(),
            low_k: b.comfort_low.kelvin(),
            high_k: b.comfort_high.kelvin(),
        });
    }
    Ok(Soc(soc_raw(t.kelvin(), b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn band() -> BuildingParams {
        BuildingParams::new(
            1.3e-3,
            3.4e7,
            Temperature::from_fahrenheit(70.0).unwrap(),
            Temperature::from_fahrenheit(74.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn soc_at_band_edges_and_midpoint() {
        let b = band();
        assert_eq!(
            soc_from_temperature(b.comfort_low, &b).unwrap().value(),
            1.0
        );
        assert_eq!(
            soc_from_temperature(b.comfort_high, &b).unwrap().value(),
            0.0
        );
        let mid = soc_from_temperature(Temperature::from_fahrenheit(72.0).unwrap(), &b).unwrap();
        assert_relative_eq!(mid.value(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn soc_outside_band_is_an_error() {
        let b = band();
        let hot = Temperature::from_fahrenheit(74.5).unwrap();
        assert!(matches!(
            soc_from_temperature(hot, &b),
            Err(VesError::ComfortViolation { .. })
        ));
    }

    #[test]
    fn delta_conversion() {
        assert_eq!(delta_f_to_delta_k(0.0), 0.0);
        assert_eq!(delta_f_to_delta_k(9.0), 5.0);
        assert_relative_eq!(delta_f_to_delta_k(17.0), 85.0 / 9.0, max_relative = 1e-15);
    }

    #[test]
    fn constructors_reject_non_finite() {
        assert!(Temperature::from_fahrenheit(f64::NAN).is_err());
        assert!(Temperature::from_kelvin(f64::INFINITY).is_err());
        assert!(PhysicalConstants::new(1006.0, f64::NAN, 2.5e6, 287.0).is_err());
        let t = Temperature::from_fahrenheit(55.0).unwrap();
        assert!(HvacParams::new(662.0, f64::NEG_INFINITY, 3.5, t, 1.0).is_err());
        assert!(HvacParams::new(-1.0, 0.0, 3.5, t, 1.0).is_err());
        assert!(matches!(
            HvacParams::new(662.0, 0.0, 3.5, t, 1.2),
            Err(VesError::RatioOutOfRange(_))
        ));
    }

    #[test]
    fn comfort_band_must_be_ordered() {
        let t = Temperature::from_fahrenheit(72.0).unwrap();
        assert!(BuildingParams::new(1e-3, 1e7, t, t).is_err());
    }

    #[test]
    fn fan_range_check_uses_curve_minimum() {
        let t = Temperature::from_fahrenheit(55.0).unwrap();
        let h = HvacParams::new(662.0, -576.0, 3.5, t, 1.0).unwrap();
        // Zero crossing at 576/662 ≈ 0.87 kg/s.
        assert!(h.check_fan_range(0.0, 4.54).is_err());
        assert!(h.check_fan_range(1.135, 4.54).is_ok());
    }

    proptest! {
        #[test]
        fn fahrenheit_round_trip(f in -100.0f64..300.0) {
            let t = Temperature::from_fahrenheit(f).unwrap();
            prop_assert!((t.fahrenheit() - f).abs() < 1e-9);
        }

        #[test]
        fn soc_is_affine_and_decreasing(x in 0.0f64..1.0, y in 0.0f64..1.0) {
            let b = band();
            let at = |s: f64| b.comfort_low.kelvin() + s * b.comfort_span();
            let sx = soc_from_temperature(Temperature::from_kelvin(at(x)).unwrap(), &b).unwrap().value();
            let sy = soc_from_temperature(Temperature::from_kelvin(at(y)).unwrap(), &b).unwrap().value();
            prop_assert!((sx - (1.0 - x)).abs() < 1e-9);
            if x + 1e-6 < y {
                prop_assert!(sx > sy);
            }
        }
    }
}
