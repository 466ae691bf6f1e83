//! Resolution graphs, fundamental-group presentations, saddle dynamics and
//! rugosity geometry for singular holomorphic foliations.

pub mod graph;
pub mod lunule;
pub mod ode;
pub mod parse;
pub mod poly;
pub mod presentation;
pub mod rabotage;
pub mod report;
pub mod resolution;
pub mod rugosity;
pub mod saddle;
pub mod snf;
pub mod star;
