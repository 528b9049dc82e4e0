//! Exact and numerical machinery around the Ramanujan differential system
//! and periods of principally polarized complex tori.
//!
//! The crate splits into these subsystems:
//!
//! - [`series`]: truncated multivariate Laurent series over exact rationals,
//!   the theta derivations, Eisenstein q-expansions, and the monomial
//!   substitution homomorphism;
//! - [`poly`]: sparse multivariate polynomials and reduced rational
//!   functions with an exact multivariate gcd;
//! - [`charts`]: the three explicit genus-one charts, the Ramanujan vector
//!   field, the Gauss-Manin connection matrices with their normative
//!   identities, and the exact series verification suites;
//! - [`symplectic`]: complex and exact-integer symplectic linear algebra on
//!   the Siegel upper half-space, including the leaf frames;
//! - [`periods`]: de Rham classes in period coordinates, symplectic-Hodge
//!   bases, and period matrices;
//! - [`flows`]: the exact nilpotent group flow, numeric integration of the
//!   genus-one system, the twisted-equation residual, and the density probe;
//! - [`hilbert`]: real quadratic fields with trace-dual bases and the
//!   real-multiplication compatibility checks.

pub mod charts;
pub mod flows;
pub mod hilbert;
pub mod periods;
pub mod poly;
pub mod series;
pub mod symplectic;

pub use charts::{Chart, ChartVectorField, ConnectionMatrix, SeriesCheck, SeriesCheckReport};
pub use flows::{DensityReport, FlowParameters, OdeState};
pub use hilbert::{HilbertTau, QuadFieldContext, QuadFieldElement};
pub use periods::{DeRhamClass, HodgeBasis, PeriodData, PolarizedTorus};
pub use poly::{PolyExpr, RationalFunctionExpr};
pub use series::{eisenstein_series, ExponentTuple, SeriesError, TruncatedLaurentSeries};
pub use symplectic::{
    CMatrix, IntegerSymplectic, SiegelPoint, SymplecticElement, Tolerances, TWO_PI_I,
};
