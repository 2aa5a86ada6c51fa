pub mod error;
pub mod group;
pub mod quadrature;
pub mod radial;
pub mod specfun;
pub mod fan;
pub mod transform;
pub mod testfns;
pub mod paleywiener;
pub mod io;
pub mod cli;
