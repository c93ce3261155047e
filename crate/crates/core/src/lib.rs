//! Fixed-precision p-adic arithmetic, truncated power series with the
//! `φ`, `ψ`, `∂` operators, Iwasawa-algebra elements over `Γ = Δ × Γ_1`,
//! local ε-factors and the rank-one cyclotomic regulator.

pub mod crystalline;
pub mod cyclo;
pub mod epsilon;
pub mod error;
pub mod iwasawa;
pub mod oracle;
pub mod padic;
pub mod regulator;
pub mod ring;
pub mod series;
pub mod suite;
pub mod unramified;

pub use cyclo::CycloElt;
pub use error::{Error, Result};
pub use padic::{PadicCtx, PadicScalar};
pub use ring::Coefficient;
pub use series::{Series, Tail, TruncSeries};
pub use unramified::{UnramField, UnramifiedElt};
