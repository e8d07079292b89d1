//! Random algebraic constructions of K_{s,t}-free bipartite graphs over
//! finite fields, together with the machinery to certify them.

pub mod acceptance;
pub mod arith;
pub mod gfarith;
pub mod graphs;
pub mod independence;
pub mod linalg;
pub mod polyrand;
pub mod projgeom;
pub mod report;
pub mod variety;
