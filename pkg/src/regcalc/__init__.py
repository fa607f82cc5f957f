"""Regularity calculus for graded function-space families."""
