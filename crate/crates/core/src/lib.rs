//! Generating curves of parabolic linear Weingarten surfaces in the upper
//! half-space model of hyperbolic 3-space: arc-length ODE tracing with event
//! detection, analytic constant-curvature oracles, geometric feature
//! measurement, regime classification with verification, and export to
//! CSV/JSON/SVG/OBJ.

pub mod analysis;
pub mod classify;
pub mod closedform;
pub mod emit;
pub mod odetrace;
pub mod params;
mod quad;
pub mod suite;

pub use analysis::{FeatureSet, IntersectionRecord, PrincipalCurvaturePair};
pub use classify::{ClassificationReport, VerificationOutcome};
pub use odetrace::{CurveState, GeneratingCurve, TerminationReason, TraceOptions};
pub use params::{InitialConditions, RegimeLabel, WeingartenSpec};
