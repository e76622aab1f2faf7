//! Division polynomials indexed by isogenies: exact arithmetic over Q, Q(i),
//! F_p and F_p^2, Weierstrass curves and their function fields, explicit
//! isogenies, normalized kernel functions, symbolic identity checks and
//! elliptic nets.

pub mod curvefunc;
pub mod divpoly;
pub mod error;
pub mod field;
pub mod identities;
pub mod isogeny;
pub mod nets;
pub mod parse;
pub mod poly;
pub mod ratfun;
pub mod series;
pub mod weierstrass;

pub use curvefunc::{CurveFunction, CurveRationalFunction, Divisor, Value};
pub use divpoly::{
    audit_summary, classical_psi, convention_solve, kernel_function, psi_hat, psi_isogeny,
    psi_tilde, quadratic_identity_check, sqrt_hat_product, DifferentialScaling, Engine,
    KernelSymbol, KernelSymbolSum, NormalizedFunction, SymbolRole,
};
pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use identities::{ChainMode, Family, IdentityReport, SuiteSummary};
pub use isogeny::{degree_pairing, HomElement, Isogeny};
pub use nets::{ConsonantCollection, EllipticNet, RecoverReport};
pub use poly::Polynomial;
pub use ratfun::RatFun;
pub use series::LaurentSeries;
pub use weierstrass::{Point, TwoTorsion, WeierstrassCurve};
