//! Sampled simulation output shared by the closed-form, numeric and
//! extended simulators.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    /// Time since the start of the run, s.
    pub t: f64,
    /// Zone temperature deviation from the baseline (or setpoint), K.
    pub t_tilde: f64,
    /// Zone temperature, K.
    pub t_zone: f64,
    /// Wall temperature, K; absent for single-capacitance models.
    pub t_wall: Option<f64>,
    /// Zone humidity ratio; absent for dry-air models.
    pub w_zone: Option<f64>,
    /// Supply airflow, kg/s.
    pub m_a: f64,
    /// HVAC electrical power, W.
    pub p_hvac: f64,
    /// Deviation from baseline power, W.
    pub p_tilde: f64,
    /// Unclamped state of charge.
    pub soc: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimTrace {
    pub samples: Vec<TraceSample>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&TraceSample> {
        self.samples.last()
    }

    /// Largest `|T~|` over all samples.
    pub fn max_abs_t_tilde(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.t_tilde.abs())
            .fold(0.0, f64::max)
    }
}
