use nalgebra::{ComplexField, DMatrix};

pub(crate) fn commutator<T: ComplexField>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a * b - b * a
}

/// Largest entry modulus.
pub(crate) fn max_abs<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|v| v.clone().modulus()).fold(0.0, f64::max)
}

/// Largest entry modulus of `M - M†`.
pub(crate) fn hermiticity_defect<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    max_abs(&(m - m.adjoint()))
}
