//! Quadrature tomography (placeholder).
