"""Iterated maps built by conjugating a uniform map with transform pairs.

``factorize(R, U)`` yields the map x -> R^{-1}(U(R(x))), which leaves R's
target density invariant; ``transport(R_A, R_B, U)`` yields
x -> R_B^{-1}(U(R_A(x))), which carries samples of one density to samples of
another.  Orbits may be generated either by iterating the map directly or by
iterating the uniform map on the cube and pulling every state back through
the inverse transform; the two routes commute.

The log-Jacobian of a factorized map is evaluated exactly through the chain
rule as log rho_in(x) - log rho_out(M(x)) + log|J_U(R(x))|, never by finite
differences, so kinks and density zeros cause no trouble.

Orbit generation is sequential per orbit; distinct orbits can run in
parallel since all participating objects are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .rosenblatt import RosenblattTransform
from .uniform_maps import Baker, UniformMap, with_jitter

DEFAULT_START = 0.3


class IteratedMap:
    """R_out^{-1} after U after R_in; with R_out = R_in this solves invariance."""

    def __init__(
        self,
        transform_in: RosenblattTransform,
        uniform: UniformMap,
        transform_out: RosenblattTransform | None = None,
    ):
        if transform_out is None:
            transform_out = transform_in
        if transform_in.dim != uniform.dim or transform_out.dim != uniform.dim:
            raise ParameterError(
                f"dimension mismatch: transforms are {transform_in.dim}-D/"
                f"{transform_out.dim}-D, uniform map is {uniform.dim}-D"
            )
        self.transform_in = transform_in
        self.transform_out = transform_out
        self.uniform = uniform
        self.dim = uniform.dim

    @property
    def is_factorized(self) -> bool:
        return self.transform_out is self.transform_in

    def __call__(self, x):
        """Evaluate the map; accepts scalars/points or batches thereof."""
        z = self.transform_in.forward(x)
        w = self.uniform.apply_batch(z)
        return self.transform_out.inverse(w)

    def log_jacobian(self, x):
        """log |det J_M| via the exact density-ratio chain rule."""
        single = np.ndim(x) == 0 if self.dim == 1 else np.ndim(x) == 1
        if single:
            if self.dim == 1:
                z = float(self.transform_in.forward(x))
            else:
                z = tuple(np.asarray(self.transform_in.forward(x), dtype=float))
            lj_u = self.uniform.log_jacobian(z)
            mx = self(x)
            return (
                math.log(self.transform_in.model.pdf(x))
                - math.log(self.transform_out.model.pdf(mx))
                + lj_u
            )
        x_arr = np.asarray(x, dtype=float)
        z = np.asarray(self.transform_in.forward(x_arr))
        lj_u = self.uniform.log_jacobian_batch(z)
        mx = self.transform_out.inverse(self.uniform.apply_batch(z))
        with np.errstate(divide="ignore"):
            return (
                np.log(self.transform_in.model.pdf(x_arr))
                - np.log(self.transform_out.model.pdf(mx))
                + lj_u
            )

    def preimages(self, y) -> list:
        """All x with M(x) = y, via preimages of the uniform map."""
        zy = self.transform_out.forward(y)
        zs = self.uniform.inverse_images(zy if self.dim == 2 else float(zy))
        if self.dim == 1:
            return [float(self.transform_in.inverse(z)) for z in zs]
        return [tuple(self.transform_in.inverse(np.asarray(z))) for z in zs]

    def step_scalar(self, uniform: UniformMap | None = None):
        """Fused scalar step closure for orbit loops."""
        u = self.uniform if uniform is None else uniform
        fwd = self.transform_in.forward_scalar()
        inv = self.transform_out.inverse_scalar()
        uap = u.apply

        def _step(x):
            return inv(uap(fwd(x)))

        return _step


def factorize(transform: RosenblattTransform, uniform: UniformMap) -> IteratedMap:
    """Map with the transform's density as invariant distribution."""
    return IteratedMap(transform, uniform)


def transport(
    transform_from: RosenblattTransform,
    transform_to: RosenblattTransform,
    uniform: UniformMap,
) -> IteratedMap:
    """Map sending samples of one density to samples of another."""
    return IteratedMap(transform_from, uniform, transform_out=transform_to)


class ConjugateUniform:
    """The uniform map recovered from an invariant map: z -> R(M(R^{-1}(z)))."""

    def __init__(self, map_like, transform: RosenblattTransform):
        self._m = map_like
        self._t = transform
        self.dim = transform.dim

    def apply(self, z):
        x = self._t.inverse(z)
        return self._t.forward(self._m(x))

    def apply_batch(self, zs):
        x = self._t.inverse(np.asarray(zs, dtype=float))
        return np.asarray(self._t.forward(self._m(x)))


def conjugate_uniform(map_like, transform: RosenblattTransform) -> ConjugateUniform:
    """Recover the conjugating uniform map of an invariant iterated map.

    ``map_like`` may be an :class:`IteratedMap` or any callable acting on
    points/batches.  Verifying that the result actually preserves the uniform
    distribution is the caller's job (see diagnostics).
    """
    return ConjugateUniform(map_like, transform)


@dataclass
class Orbit:
    """Forward iterates of a map, with the accumulated log-Jacobian sum.

    ``points`` holds the n new states after x0 (thinned if requested);
    ``log_jac_sum`` accumulates log|J_M| over all n pre-step states starting
    at x0, so ``log_jac_sum / n_steps`` is the empirical Lyapunov exponent.
    """

    x0: object
    points: np.ndarray | None
    log_jac_sum: float
    n_steps: int
    dim: int

    def __len__(self):
        return 0 if self.points is None else len(self.points)


def _resolve_jitter(uniform: UniformMap, jitter):
    if jitter is None or jitter == "auto":
        return with_jitter(uniform) if uniform.is_chaotic else uniform
    if jitter is True:
        return with_jitter(uniform)
    if jitter is False:
        return uniform
    return with_jitter(uniform, float(jitter))


def _shift_bit_stream(z1_0: float, nbits: int) -> np.ndarray:
    """Binary expansion of frac(z1_0 + frac(sqrt 2)), as a 0/1 byte array.

    Doubling-type maps consume one bit of their state per step, so a double
    holds only ~53 steps of orbit; longer orbits need the start supplied as a
    bit stream.  Offsetting the requested start by an irrational constant
    makes the stream aperiodic while moving the start point by < 2^-53.
    """
    p = nbits + 16
    root = math.isqrt(2 << (2 * p))  # floor(2^p * sqrt(2))
    frac_sqrt2 = root - (1 << p)
    t = ((int(z1_0 * 2**53) << (p - 53)) + frac_sqrt2) % (1 << p)
    nbytes = (p + 7) // 8
    bits = np.unpackbits(np.frombuffer(t.to_bytes(nbytes, "big"), dtype=np.uint8))
    start = nbytes * 8 - p
    return bits[start : start + nbits]


def _orbit_baker(m: IteratedMap, x0, n: int, burnin: int, thin: int, store: bool) -> Orbit:
    """Baker's-map orbits via an exact expanding-coordinate bit stream.

    The first coordinate of the baker's map is a binary shift; in floating
    point every additive jitter is exactly conjugate to the unjittered map,
    so orbits collapse onto a fixed point regardless.  Instead the expanding
    coordinate is driven by the exact binary expansion of an irrational
    start, which by the orbit-commuting identity yields the exact map orbit
    of a point within 2^-53 of the requested one.
    """
    x0t = (float(x0[0]), float(x0[1]))
    fwd = m.transform_in.forward_scalar()
    inv = m.transform_out.inverse_scalar()
    pdf_in = _pdf_scalar(m.transform_in)
    log = math.log
    z1, z2 = fwd(x0t)
    bits = _shift_bit_stream(z1, burnin + n + 53)
    # exact 53-bit window of the stream at the current step
    z1 = 0.0
    for j in range(53):
        z1 += float(bits[j]) * 0.5 ** (j + 1)
    pos = 0
    for _ in range(burnin):
        top = float(bits[pos])
        z1 = (2.0 * z1 - top) + float(bits[pos + 53]) * 0.5**53
        z2 = 0.5 * (z2 + top)
        pos += 1
    pts = np.empty((n // thin, 2)) if store else None
    lj = 0.0
    idx = 0
    x = inv((z1, z2))
    px = pdf_in(*x)
    for k in range(1, n + 1):
        top = float(bits[pos])
        z1 = (2.0 * z1 - top) + float(bits[pos + 53]) * 0.5**53
        z2 = 0.5 * (z2 + top)
        pos += 1
        xn = inv((z1, z2))
        pn = pdf_in(*xn)
        lj += log(px) - log(pn)  # |det J| of the baker's map is 1
        px = pn
        x = xn
        if store and k % thin == 0:
            pts[idx] = x
            idx += 1
    return Orbit(x0=x0t, points=pts, log_jac_sum=lj, n_steps=n, dim=2)


def orbit(
    m: IteratedMap,
    x0=None,
    n: int = 1,
    *,
    burnin: int = 0,
    thin: int = 1,
    jitter=None,
    store: bool = True,
) -> Orbit:
    """Iterate the map directly: x0, M(x0), M^2(x0), ...

    ``jitter`` is ``None``/"auto" (tiny mod-1 shift composed onto chaotic
    uniform maps, off otherwise), a bool, or an explicit shift value.  The
    shift breaks the binary-arithmetic orbit collapse of exactly
    representable piecewise-linear maps and leaves the invariant density
    untouched.
    """
    if n < 1:
        raise ParameterError("orbit length must be >= 1")
    if thin < 1:
        raise ParameterError("thinning stride must be >= 1")
    if burnin < 0:
        raise ParameterError("burn-in must be >= 0")
    x0 = _default_start(m.dim) if x0 is None else x0
    if isinstance(m.uniform, Baker):
        return _orbit_baker(m, x0, n, burnin, thin, store)
    u = _resolve_jitter(m.uniform, jitter)
    fwd = m.transform_in.forward_scalar()
    inv = m.transform_out.inverse_scalar()
    uap = u.apply
    ulj = u.log_jacobian
    pdf_in = _pdf_scalar(m.transform_in)
    pdf_out = _pdf_scalar(m.transform_out)
    same_model = m.transform_out.model is m.transform_in.model
    log = math.log

    if m.dim == 1:
        x = float(x0)
        for _ in range(burnin):
            x = inv(uap(fwd(x)))
        pts = np.empty(n // thin) if store else None
        lj = 0.0
        idx = 0
        px = pdf_in(x)
        for k in range(1, n + 1):
            z = fwd(x)
            xn = inv(uap(z))
            pn = pdf_out(xn)
            lj += log(px) - log(pn) + ulj(z)
            if not same_model:
                pn = pdf_in(xn)
            px = pn
            x = xn
            if store and k % thin == 0:
                pts[idx] = x
                idx += 1
        return Orbit(x0=float(x0), points=pts, log_jac_sum=lj, n_steps=n, dim=1)

    x = (float(x0[0]), float(x0[1]))
    start = x
    for _ in range(burnin):
        x = inv(uap(fwd(x)))
    pts = np.empty((n // thin, 2)) if store else None
    lj = 0.0
    idx = 0
    px = pdf_in(*x)
    for k in range(1, n + 1):
        z = fwd(x)
        xn = inv(uap(z))
        pn = pdf_out(*xn)
        lj += log(px) - log(pn) + ulj(z)
        if not same_model:
            pn = pdf_in(*xn)
        px = pn
        x = xn
        if store and k % thin == 0:
            pts[idx] = x
            idx += 1
    return Orbit(x0=start, points=pts, log_jac_sum=lj, n_steps=n, dim=2)


def orbit_via_uniform(
    m: IteratedMap,
    x0=None,
    n: int = 1,
    *,
    burnin: int = 0,
    thin: int = 1,
    jitter=None,
    store: bool = True,
) -> Orbit:
    """Iterate the uniform map on the cube and pull every state back.

    Produces an orbit targeting the same density as :func:`orbit`; under a
    chaotic map the two floating-point paths separate, but their statistics
    agree.
    """
    if n < 1:
        raise ParameterError("orbit length must be >= 1")
    if thin < 1:
        raise ParameterError("thinning stride must be >= 1")
    x0 = _default_start(m.dim) if x0 is None else x0
    if isinstance(m.uniform, Baker):
        return _orbit_baker(m, x0, n, burnin, thin, store)
    u = _resolve_jitter(m.uniform, jitter)
    fwd = m.transform_in.forward_scalar()
    inv = m.transform_out.inverse_scalar()
    uap = u.apply
    ulj = u.log_jacobian
    pdf_in = _pdf_scalar(m.transform_in)
    pdf_out = _pdf_scalar(m.transform_out)
    log = math.log

    if m.dim == 1:
        z = fwd(float(x0))
        x = float(x0)
        for _ in range(burnin):
            z = uap(z)
        pts = np.empty(n // thin) if store else None
        lj = 0.0
        idx = 0
        for k in range(1, n + 1):
            lj += log(pdf_in(x)) + ulj(z)
            z = uap(z)
            x = inv(z)
            lj -= log(pdf_out(x))
            if store and k % thin == 0:
                pts[idx] = x
                idx += 1
        return Orbit(x0=float(x0), points=pts, log_jac_sum=lj, n_steps=n, dim=1)

    z = fwd((float(x0[0]), float(x0[1])))
    x = (float(x0[0]), float(x0[1]))
    for _ in range(burnin):
        z = uap(z)
    pts = np.empty((n // thin, 2)) if store else None
    lj = 0.0
    idx = 0
    for k in range(1, n + 1):
        lj += log(pdf_in(*x)) + ulj(z)
        z = uap(z)
        x = inv(z)
        lj -= log(pdf_out(*x))
        if store and k % thin == 0:
            pts[idx] = x
            idx += 1
    return Orbit(x0=(float(x0[0]), float(x0[1])), points=pts, log_jac_sum=lj, n_steps=n, dim=2)


def _default_start(dim: int):
    return DEFAULT_START if dim == 1 else (DEFAULT_START, DEFAULT_START)


def _pdf_scalar(transform: RosenblattTransform):
    return transform.model.pdf_scalar()
