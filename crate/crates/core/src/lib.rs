//! Exact arithmetic over local fields F_q((T)) and the matrix-algebra
//! invariants built on it.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod ff;
pub mod poly;
pub mod series;

pub use error::{Error, Result};
pub use ff::FiniteField;
pub use poly::{NewtonPolygon, SeriesPoly};
pub use series::{Series, TruncatedSeries};
pub mod algebra;
pub mod cli;
pub mod corpus;
pub mod ext;
pub mod factor;
pub mod field;
pub mod fpoly;
pub mod invariants;
pub mod lattice;
pub mod linalg;
pub mod mass;
pub mod matrix;
pub mod orders;
pub mod ratfunc;
pub mod roots;
pub mod strata;
