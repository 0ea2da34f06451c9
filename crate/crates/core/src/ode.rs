//! Fixed-step explicit integrators shared by the vector, matrix and
//! density-operator flows.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Euler,
    Rk4,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Euler => "euler",
            Method::Rk4 => "rk4",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Method::Euler),
            "rk4" => Ok(Method::Rk4),
            other => Err(Error::invalid("integrator method", format!("unknown method `{other}`"))),
        }
    }
}

/// Step size, horizon and projection policy of a fixed-step integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub t_end: f64,
    /// Divide each vector state by its sum after every step. Matrix and
    /// density-operator flows never project and ignore this flag.
    pub renormalize: bool,
}

impl IntegratorConfig {
    pub fn new(method: Method, dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            method,
            dt,
            t_end,
            renormalize: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn rk4(dt: f64, t_end: f64) -> Result<Self> {
        Self::new(Method::Rk4, dt, t_end)
    }

    pub fn with_renormalize(mut self, renormalize: bool) -> Self {
        self.renormalize = renormalize;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("integrator", format!("dt = {} must be > 0", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid("integrator", format!("t_end = {} must be > 0", self.t_end)));
        }
        if self.dt >= self.t_end {
            return Err(Error::invalid(
                "integrator",
                format!("dt = {} must be smaller than t_end = {}", self.dt, self.t_end),
            ));
        }
        Ok(())
    }

    /// Number of steps; the last sample lands within half a step of `t_end`.
    pub fn steps(&self) -> usize {
        ((self.t_end / self.dt).round() as usize).max(1)
    }

    /// Sample time of step `k`, computed without accumulating `dt`.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
}

/// State spaces the integrators can advance.
pub trait OdeState: Clone {
    /// `self + a * other`.
    fn axpy(&self, a: f64, other: &Self) -> Self;
    fn is_finite(&self) -> bool;
}

impl OdeState for DVector<f64> {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self + other * a
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for DMatrix<f64> {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self + other * a
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for DMatrix<Complex<f64>> {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self + other * Complex::new(a, 0.0)
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Advances `y` by one step of size `dt` under the autonomous field `rhs`.
pub fn step<S, F>(method: Method, y: &S, dt: f64, rhs: &mut F) -> S
where
    S: OdeState,
    F: FnMut(&S) -> S,
{
    match method {
        Method::Euler => y.axpy(dt, &rhs(y)),
        Method::Rk4 => {
            let k1 = rhs(y);
            let k2 = rhs(&y.axpy(0.5 * dt, &k1));
            let k3 = rhs(&y.axpy(0.5 * dt, &k2));
            let k4 = rhs(&y.axpy(dt, &k3));
            y.axpy(dt / 6.0, &k1)
                .axpy(dt / 3.0, &k2)
                .axpy(dt / 3.0, &k3)
                .axpy(dt / 6.0, &k4)
        }
    }
}

/// Time-dependent variant of [`step`]; `rhs` receives the stage time.
pub fn step_t<S, F>(method: Method, t: f64, y: &S, dt: f64, rhs: &mut F) -> S
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    match method {
        Method::Euler => y.axpy(dt, &rhs(t, y)),
        Method::Rk4 => {
            let k1 = rhs(t, y);
            let k2 = rhs(t + 0.5 * dt, &y.axpy(0.5 * dt, &k1));
            let k3 = rhs(t + 0.5 * dt, &y.axpy(0.5 * dt, &k2));
            let k4 = rhs(t + dt, &y.axpy(dt, &k3));
            y.axpy(dt / 6.0, &k1)
                .axpy(dt / 3.0, &k2)
                .axpy(dt / 3.0, &k3)
                .axpy(dt / 6.0, &k4)
        }
    }
}
