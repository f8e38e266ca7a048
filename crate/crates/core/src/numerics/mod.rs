//! Small numerical kernels used by the solvers: bracketing root finders, an
//! embedded Runge–Kutta integrator and adaptive quadrature.

pub mod ode;
pub mod quad;
pub mod roots;
