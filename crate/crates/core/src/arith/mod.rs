//! Exact arithmetic substrate: integers, finite fields, dense polynomials.

pub mod factor;
pub mod field;
pub mod padic;
pub mod intpoly;
pub mod bipoly;
pub mod multimod;
pub mod ntheory;
pub mod resultant;
pub mod roots;
pub mod upoly;

pub use bipoly::BiPoly;
pub use factor::{factor_integer, FactorTable};
pub use field::{ExtField, Field, PrimeField, ZechField};
pub use intpoly::{IntPoly, Var};
pub use ntheory::{cyclotomic, divisors, euler_phi, mobius, nu};
pub use roots::{roots_mod_p, Fq, ModPoly};
