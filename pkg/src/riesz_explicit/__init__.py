"""Riesz means of the singular series and the zeros of zeta."""
