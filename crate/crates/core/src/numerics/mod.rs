pub mod grid;
pub mod interp;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use quadrature::{integral, integrate, IntegralResult, QuadratureSpec};
pub use roots::find_root;
pub use special::{erfc, log_integral, upper_incomplete_gamma};
