use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_BOLTZMANN: f64 = 1.380_649e-23;

/// Bose–Einstein occupation `1 / (exp(ħω / k_B T) − 1)` of a bath mode at
/// angular frequency `omega` (rad/s) and temperature `temperature` (K).
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::param("omega", "angular frequency must be > 0"));
    }
    if !(temperature >= 0.0) {
        return Err(Error::param("temperature", "must be >= 0"));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(occupation_from_ratio(HBAR * omega / (K_BOLTZMANN * temperature)))
}

/// Occupation as a function of `x = ħω / k_B T`.
pub fn occupation_from_ratio(x: f64) -> f64 {
    1.0 / x.exp_m1()
}
