//! Real smooth points and real dimension of semi-algebraic sets, computed
//! with numerical homotopy continuation over complex double precision.

pub mod cli;
pub mod config;
pub mod critical;
pub mod io;
pub mod kuramoto;
pub mod linalg;
pub mod polar_defl;
pub mod poly;
pub mod realdim;
pub mod reduce;
pub mod solve;
