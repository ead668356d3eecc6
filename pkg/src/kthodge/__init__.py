"""Hodge numbers of the Kodaira-Thurston four-manifold.

Computes d-bar-harmonic Hodge numbers h^{p,q} and explicit harmonic-form
bases for the two-parameter family of almost complex structures J_{a,b}
on KT^4 = S^1 x (H_3(Z)\\H_3(R)), for the standard almost-Kaehler metric
and for the one-parameter Hermitian deformations h_rho.

The computation reduces the harmonic PDE system to per-sector data: a
torus-type family of 2x2 linear systems (trigonometric sectors) and a
family of pencil ODEs y' = (Ax+B)y on the line (Heisenberg sectors),
whose L^2 solvability is decided exactly in Q(pi) and cross-checked by
independent numerical oracles.
"""

__version__ = "0.1.0"
