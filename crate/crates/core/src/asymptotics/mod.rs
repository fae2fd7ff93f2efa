//! Regime classification, predicted scaling exponents, frequency sweeps,
//! slope fits, limit-profile distances and mass-map inversion.

mod distance;
mod exponents;
mod fit;
mod massmap;
mod regime;
mod sweep;

pub use distance::{profile_distance, rescale_to_limit, DistanceMode};
pub use exponents::{predicted_exponents, Exponent, ExponentTable, Limit, Observable, Prediction};
pub use fit::{default_windows, fit_against, fit_exponent, least_squares, write_fits, Fit, FITS_HEADER};
pub use massmap::{mass_map_invert, mass_map_roots, Inversion, MassRoot, MASS_TOL};
pub use regime::{classify_regime, rationalize, Exact, Family, FiniteMass, MassLimit, PClass, QClass, Rational, RegimeInfo};
pub use sweep::{
    log_spaced, read_records, run_sweep, write_records, RecordsFile, Sweep, SweepPlan, SweepRecord, RECORDS_HEADER,
};
