//! Virtual energy storage from commercial building HVAC: models, round-trip
//! efficiency of square-wave power deviations, and a higher-fidelity
//! closed-loop simulator.

pub mod analytic;
pub mod error;
pub mod extended;
pub mod hvac;
pub mod ode;
pub mod rte;
pub mod sweep;
pub mod trace;
pub mod units;
pub mod verify;

pub use analytic::{
    airflow_for_power, steady_state_temps, ves_coefficients, ChargeDischargeFlows, Mode, Phase,
    Sign, VesCoefficients,
};
pub use error::{Result, VesError};
pub use hvac::{
    chiller_power, fan_power, hvac_power, moist_air_enthalpy, solve_baseline, AirState,
    AmbientConditions, AssumptionChecks, BaselineInput, BaselinePoint, Plant,
};
pub use rte::{
    critical_half_period, recovery_bound, recovery_time, rte_vs_n, rte_vs_tp, run_square_wave,
    square_wave_result, Recovery, RteResult, RunOptions, ScheduleSpec,
};
pub use trace::{SimTrace, TraceSample};
pub use units::{BuildingParams, HvacParams, PhysicalConstants, Soc, Temperature};
