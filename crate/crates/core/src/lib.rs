//! Entanglement and Bell nonlocality harvested from the vacuum of a free
//! scalar field by two causally disconnected Unruh–DeWitt detectors.
//!
//! The numerical core (`quadrature`, `windows`, `amplitudes`, `state`) is
//! generic over [`Real`]; the aliases below fix it to `f64` (standard) or
//! `f128` (extended). `oracle` and `experiments` work in `f64`.

pub mod amplitudes;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod state;
pub mod sum;
pub mod windows;

pub use amplitudes::{compute_amplitudes, compute_amplitudes_f64, AmplitudeSet, DetectorConfig, PairConfig};
pub use error::{Error, Result};
pub use quadrature::{QuadConfig, QuadResult, TailPolicy};
pub use scalar::{f128, Precision, Real};
pub use state::{bell_report, build_state, horodecki_m, negativity, BellReport, FilterPair, TwoQubitState};
pub use windows::{select_gaps, SelectedGaps, WindowKind, WindowSpec};

pub type WindowSpec64 = WindowSpec<f64>;
pub type DetectorConfig64 = DetectorConfig<f64>;
pub type PairConfig64 = PairConfig<f64>;
pub type AmplitudeSet64 = AmplitudeSet<f64>;
pub type TwoQubitState64 = TwoQubitState<f64>;
pub type BellReport64 = BellReport<f64>;

pub type WindowSpec128 = WindowSpec<f128>;
pub type DetectorConfig128 = DetectorConfig<f128>;
pub type PairConfig128 = PairConfig<f128>;
pub type AmplitudeSet128 = AmplitudeSet<f128>;
pub type TwoQubitState128 = TwoQubitState<f128>;
pub type BellReport128 = BellReport<f128>;
