"""Numerical ground truth: closed-form test functions, quadrature norms and checks."""
