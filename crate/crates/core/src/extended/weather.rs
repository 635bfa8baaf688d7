use std::io::Read;
use std::path::Path;

use crate::error::{Result, VesError};
use crate::units::{delta_f_to_delta_k, Temperature};

/// Outdoor conditions at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherSample {
    /// Outdoor air temperature, K.
    pub t_oa: f64,
    /// Outdoor humidity ratio.
    pub w_oa: f64,
}

/// Tabulated weather, linearly interpolated and held flat past either end.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    times: Vec<f64>,
    t_oa: Vec<f64>,
    w_oa: Vec<f64>,
}

impl WeatherSeries {
    /// Builds a series from times (s), temperatures (°F) and humidity ratios.
    pub fn new(times: Vec<f64>, t_oa_f: &[f64], w_oa: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != t_oa_f.len() || times.len() != w_oa.len() {
            return Err(VesError::Weather(
                "columns must be non-empty and of equal length".into(),
            ));
        }
        if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(VesError::Weather(format!(
                "time_s must be strictly increasing (row {} after {})",
                times[i + 1],
                times[i]
            )));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(VesError::Weather("time_s must be finite".into()));
        }
        if let Some(w) = w_oa.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(VesError::Weather(format!(
                "humidity ratio must be finite and nonnegative, got {w}"
            )));
        }
        let t_oa = t_oa_f
            .iter()
            .map(|f| Temperature::from_fahrenheit(*f).map(Temperature::kelvin))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| VesError::Weather(e.to_string()))?;
        Ok(Self { times, t_oa, w_oa })
    }

    /// Reads CSV with header `time_s,t_oa_f,w_oa`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| VesError::Weather(e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["time_s", "t_oa_f", "w_oa"] {
            return Err(VesError::Weather(format!(
                "expected header `time_s,t_oa_f,w_oa`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let (mut times, mut temps, mut hums) = (Vec::new(), Vec::new(), Vec::new());
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| VesError::Weather(format!("row {}: {e}", i + 1)))?;
            let field = |j: usize| -> Result<f64> {
                let raw = record.get(j).unwrap_or("");
                raw.parse().map_err(|_| {
                    VesError::Weather(format!("row {}: `{raw}` is not a number", i + 1))
                })
            };
            times.push(field(0)?);
            temps.push(field(1)?);
            hums.push(field(2)?);
        }
        Self::new(times, &temps, hums)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| VesError::Weather(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn at(&self, t: f64) -> WeatherSample {
        let i = self.times.partition_point(|x| *x <= t);
        if i == 0 {
            return WeatherSample {
                t_oa: self.t_oa[0],
                w_oa: self.w_oa[0],
            };
        }
        if i == self.times.len() {
            return WeatherSample {
                t_oa: self.t_oa[i - 1],
                w_oa: self.w_oa[i - 1],
            };
        }
        let f = (t - self.times[i - 1]) / (self.times[i] - self.times[i - 1]);
        let lerp = |v: &[f64]| v[i - 1] + f * (v[i] - v[i - 1]);
        WeatherSample {
            t_oa: lerp(&self.t_oa),
            w_oa: lerp(&self.w_oa),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weather {
    Constant(WeatherSample),
    /// Sinusoids sharing one period and peak time.
    Diurnal {
        mean_t_oa: Temperature,
        /// Temperature amplitude, K.
        amplitude_k: f64,
        mean_w_oa: f64,
        amplitude_w_oa: f64,
        period_s: f64,
        /// Time of the daily maximum, s after the run starts.
        peak_s: f64,
    },
    Series(WeatherSeries),
}

impl Weather {
    /// 80 ± 10 °F and 0.010 ± 0.002 humidity ratio over 24 h, peaking
    /// 15 h after the start.
    pub fn synthetic_diurnal() -> Self {
        Weather::Diurnal {
            mean_t_oa: Temperature::from_fahrenheit(80.0).expect("finite constant"),
            amplitude_k: delta_f_to_delta_k(10.0),
            mean_w_oa: 0.010,
            amplitude_w_oa: 0.002,
            period_s: 86_400.0,
            peak_s: 15.0 * 3600.0,
        }
    }

    pub fn constant(t_oa: Temperature, w_oa: f64) -> Self {
        Weather::Constant(WeatherSample {
            t_oa: t_oa.kelvin(),
            w_oa,
        })
    }

    pub fn at(&self, t: f64) -> WeatherSample {
        match self {
            Weather::Constant(s) => *s,
            Weather::Diurnal {
                mean_t_oa,
                amplitude_k,
                mean_w_oa,
                amplitude_w_oa,
                period_s,
                peak_s,
            } => {
                let c = (std::f64::consts::TAU * (t - peak_s) / period_s).cos();
                WeatherSample {
                    t_oa: mean_t_oa.kelvin() + amplitude_k * c,
                    w_oa: mean_w_oa + amplitude_w_oa * c,
                }
            }
            Weather::Series(s) => s.at(t),
        }
    }
}
