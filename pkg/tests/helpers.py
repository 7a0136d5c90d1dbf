"""Shared independent oracles for the test suite.

Everything here deliberately avoids the library's vectorized code paths:
recursive rational-arithmetic splines, scalar per-edge network evaluation,
and central finite differences.
"""
from fractions import Fraction

import numpy as np


def cox_de_boor(knots, m, k, x):
    """Textbook recursive B-spline basis B_{m,k}(x) over arbitrary knots.

    Works with Fractions for exact arithmetic when knots and x are rational.
    """
    if k == 0:
        return 1 if knots[m] <= x < knots[m + 1] else 0
    left = 0
    den = knots[m + k] - knots[m]
    if den != 0:
        left = (x - knots[m]) / den * cox_de_boor(knots, m, k - 1, x)
    right = 0
    den = knots[m + k + 1] - knots[m + 1]
    if den != 0:
        right = (knots[m + k + 1] - x) / den * cox_de_boor(knots, m + 1, k - 1, x)
    return left + right


def rational_basis(k, G, lo, hi, x):
    """All G+k basis values at rational x via the recursive definition."""
    h = (Fraction(hi) - Fraction(lo)) / G
    knots = [Fraction(lo) + h * i for i in range(-k, G + k + 1)]
    return [cox_de_boor(knots, m, k, Fraction(x)) for m in range(G + k)]


def scalar_silu(x):
    return x / (1.0 + np.exp(-x))


def kan_forward_scalar(shape, params, x):
    """Per-edge scalar-loop evaluation of the network, no matrix algebra."""
    from lbkan.spline import eval_basis

    M = shape.grid.num_basis
    eta = [float(v) for v in x]
    for l in range(shape.num_layers):
        theta_l = params.matrices[l]
        nxt = []
        for j in range(shape.layer_widths[l + 1]):
            acc = 0.0
            for i in range(shape.layer_widths[l]):
                row = theta_l[j, i * (M + 1) : (i + 1) * (M + 1)]
                basis = eval_basis(shape.grid, eta[i])
                val = row[0] * scalar_silu(eta[i])
                for m in range(M):
                    val += row[1 + m] * basis[m]
                acc += val
            nxt.append(acc)
        eta = nxt
    return np.array(eta)


def mlp_forward_scalar(widths, params, x):
    """Per-neuron scalar-loop MLP evaluation."""
    z = list(x) + [1.0]
    L = len(widths) - 1
    for l in range(L):
        W = params.matrices[l]
        a = [sum(W[j, i] * z[i] for i in range(len(z))) for j in range(widths[l + 1])]
        if l < L - 1:
            z = [np.tanh(v) for v in a] + [1.0]
    return np.array(a)


def central_diff_param_jacobian(f, flat, h=1e-6):
    """Central finite differences of a vector-valued f over all parameters."""
    cols = []
    for idx in range(flat.size):
        fp = flat.copy()
        fp[idx] += h
        fm = flat.copy()
        fm[idx] -= h
        cols.append((f(fp) - f(fm)) / (2.0 * h))
    return np.column_stack(cols)


def jacobian_close(analytic, fd, rel_tol=1e-5, abs_tol=1e-8):
    """Per-entry relative comparison with an absolute guard at the FD noise floor."""
    diff = np.abs(analytic - fd)
    denom = np.maximum(np.abs(analytic), np.abs(fd))
    ok = (diff <= abs_tol) | (diff <= rel_tol * denom)
    return bool(np.all(ok))
