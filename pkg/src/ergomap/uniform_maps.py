"""Catalog of maps that leave the uniform distribution on [0,1]^d invariant.

Atoms: identity, mod-1 translation, sawtooth and triangle waves, the
asymmetric triangle, the baker's map and the cat map.  Composite maps are
built with :func:`product` (coordinate-wise action) and :func:`compose`
(pipeline application: ``compose(a, b)`` applies ``a`` first, then ``b``).

Conventions:

* ``mod 1`` results live in [0,1); the value 1.0 wraps to 0.0.
* at branch boundaries the lower/left branch is used, so evaluation is
  deterministic and replayable.
* every map exposes exact piecewise-constant log-Jacobians and, for the
  piecewise-affine 1-D structure, complete preimage enumeration.

Iterating piecewise-linear maps with exactly representable constants on
binary floating point can collapse orbits onto short cycles; composing a map
with a tiny mod-1 translation whose shift has no finite binary expansion
avoids this.  :data:`JITTER_SHIFT` is that shift and
:func:`with_jitter` performs the composition.  Orbit drivers enable it by
default for chaotic maps and leave it off for the identity and translations.
"""

from __future__ import annotations

import math
from itertools import product as _iterproduct

import numpy as np

from .errors import CapabilityError, ParameterError, ParseError

JITTER_SHIFT = (1.0 / 3.0) * 1e-9


def _frac(v: float) -> float:
    return v - math.floor(v)


class UniformMap:
    """Base class; maps are immutable expression trees and evaluation is pure."""

    dim = 1

    def apply(self, z):
        raise NotImplementedError

    def apply_batch(self, zs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_jacobian(self, z) -> float:
        raise NotImplementedError

    def log_jacobian_batch(self, zs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse_images(self, y) -> list:
        raise CapabilityError(f"{type(self).__name__} does not enumerate preimages")

    def branch_points(self) -> tuple:
        """Interior branch boundaries (1-D maps only)."""
        if self.dim != 1:
            raise CapabilityError("branch points are defined for 1-D maps")
        return ()

    def entropy(self):
        """Closed-form expansion rate; per-axis tuple for coordinate-wise maps."""
        raise CapabilityError(f"{type(self).__name__} has no closed-form rate")

    @property
    def is_chaotic(self) -> bool:
        return True

    def spec(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"<UniformMap {self.spec()}>"


class Identity(UniformMap):
    def __init__(self, dim: int = 1):
        if dim not in (1, 2):
            raise ParameterError("identity map supports dim 1 or 2")
        self.dim = dim

    def apply(self, z):
        return z

    def apply_batch(self, zs):
        return np.asarray(zs, dtype=float)

    def log_jacobian(self, z):
        return 0.0

    def log_jacobian_batch(self, zs):
        zs = np.asarray(zs, dtype=float)
        n = zs.shape[0] if zs.ndim else 1
        return np.zeros(n)

    def inverse_images(self, y):
        return [y]

    def entropy(self):
        return 0.0 if self.dim == 1 else (0.0, 0.0)

    @property
    def is_chaotic(self):
        return False

    def spec(self):
        return "identity"


class Translation(UniformMap):
    """Mod-1 translation by c in [0,1)."""

    def __init__(self, c: float):
        c = float(c)
        if not 0.0 <= c < 1.0:
            raise ParameterError(f"translation shift must be in [0,1), got {c}")
        self.c = c

    def apply(self, z):
        return _frac(z + self.c)

    def apply_batch(self, zs):
        v = np.asarray(zs, dtype=float) + self.c
        return v - np.floor(v)

    def log_jacobian(self, z):
        return 0.0

    def log_jacobian_batch(self, zs):
        return np.zeros(np.asarray(zs, dtype=float).shape[0])

    def inverse_images(self, y):
        return [_frac(y - self.c)]

    def branch_points(self):
        return (1.0 - self.c,) if self.c > 0.0 else ()

    def entropy(self):
        return 0.0

    @property
    def is_chaotic(self):
        return False

    def spec(self):
        return f"translation:{self.c!r}"


class Sawtooth(UniformMap):
    """l periods of the sawtooth wave: z -> l z mod 1."""

    def __init__(self, periods: int):
        if int(periods) != periods or periods < 1:
            raise ParameterError(f"sawtooth periods must be a positive integer, got {periods}")
        self.periods = int(periods)

    def apply(self, z):
        return _frac(self.periods * z)

    def apply_batch(self, zs):
        v = self.periods * np.asarray(zs, dtype=float)
        return v - np.floor(v)

    def log_jacobian(self, z):
        return math.log(self.periods)

    def log_jacobian_batch(self, zs):
        return np.full(np.asarray(zs, dtype=float).shape[0], math.log(self.periods))

    def inverse_images(self, y):
        l = self.periods
        return [(y + k) / l for k in range(l)]

    def branch_points(self):
        l = self.periods
        return tuple(k / l for k in range(1, l))

    def entropy(self):
        return math.log(self.periods)

    def spec(self):
        return f"sawtooth:{self.periods}"


class Triangle(UniformMap):
    """l periods of the triangle wave: z -> 1 - 2|l z mod 1 - 1/2|."""

    def __init__(self, periods: int):
        if int(periods) != periods or periods < 1:
            raise ParameterError(f"triangle periods must be a positive integer, got {periods}")
        self.periods = int(periods)

    def apply(self, z):
        # branch forms 2s / 2(1-s) of 1 - 2|s - 1/2| keep tiny s exact
        s = _frac(self.periods * z)
        return 2.0 * s if s <= 0.5 else 2.0 * (1.0 - s)

    def apply_batch(self, zs):
        v = self.periods * np.asarray(zs, dtype=float)
        s = v - np.floor(v)
        return np.where(s <= 0.5, 2.0 * s, 2.0 * (1.0 - s))

    def log_jacobian(self, z):
        return math.log(2 * self.periods)

    def log_jacobian_batch(self, zs):
        return np.full(np.asarray(zs, dtype=float).shape[0], math.log(2 * self.periods))

    def inverse_images(self, y):
        l = self.periods
        half = 0.5 * y
        out = []
        for k in range(l):
            out.append((k + half) / l)
            out.append((k + 1 - half) / l)
        return out

    def branch_points(self):
        l = self.periods
        return tuple(k / (2 * l) for k in range(1, 2 * l))

    def entropy(self):
        return math.log(2 * self.periods)

    def spec(self):
        return f"triangle:{self.periods}"


class AsymTriangle(UniformMap):
    """Asymmetric triangle with peak at c: z/c on [0,c], (1-z)/(1-c) on [c,1]."""

    def __init__(self, c: float):
        c = float(c)
        if not 0.0 < c < 1.0:
            raise ParameterError(f"asymmetric-triangle peak must be in (0,1), got {c}")
        self.c = c

    def apply(self, z):
        if z <= self.c:
            v = z / self.c
        else:
            v = (1.0 - z) / (1.0 - self.c)
        return 0.0 if v < 0.0 else (1.0 if v > 1.0 else v)

    def apply_batch(self, zs):
        z = np.asarray(zs, dtype=float)
        v = np.where(z <= self.c, z / self.c, (1.0 - z) / (1.0 - self.c))
        return np.clip(v, 0.0, 1.0)

    def log_jacobian(self, z):
        return -math.log(self.c) if z <= self.c else -math.log(1.0 - self.c)

    def log_jacobian_batch(self, zs):
        z = np.asarray(zs, dtype=float)
        return np.where(z <= self.c, -math.log(self.c), -math.log(1.0 - self.c))

    def inverse_images(self, y):
        return [self.c * y, 1.0 - (1.0 - self.c) * y]

    def branch_points(self):
        return (self.c,)

    def entropy(self):
        c = self.c
        return -c * math.log(c) - (1.0 - c) * math.log(1.0 - c)

    def spec(self):
        return f"asym:{self.c!r}"


class Baker(UniformMap):
    """Baker's map: stretch x1 by two, cut, and stack; bijective a.e. with |det J| = 1."""

    dim = 2

    def apply(self, z):
        z1, z2 = z
        step = 1.0 if z1 > 0.5 else 0.0
        return (_frac(2.0 * z1), 0.5 * (z2 + step))

    def apply_batch(self, zs):
        z = np.asarray(zs, dtype=float)
        v = 2.0 * z[..., 0]
        y1 = v - np.floor(v)
        y2 = 0.5 * (z[..., 1] + (z[..., 0] > 0.5))
        return np.stack([y1, y2], axis=-1)

    def log_jacobian(self, z):
        return 0.0

    def log_jacobian_batch(self, zs):
        return np.zeros(np.asarray(zs, dtype=float).shape[0])

    def inverse_images(self, y):
        y1, y2 = y
        if y2 < 0.5:
            return [(0.5 * y1, 2.0 * y2)]
        return [(0.5 * (y1 + 1.0), 2.0 * y2 - 1.0)]

    def entropy(self):
        return math.log(2.0)

    def spec(self):
        return "baker"


class ArnoldCat(UniformMap):
    """Cat map: (z1, z2) -> (2 z1 + z2 mod 1, z1 + z2 mod 1); bijective on the torus."""

    dim = 2

    def apply(self, z):
        z1, z2 = z
        return (_frac(2.0 * z1 + z2), _frac(z1 + z2))

    def apply_batch(self, zs):
        z = np.asarray(zs, dtype=float)
        a = 2.0 * z[..., 0] + z[..., 1]
        b = z[..., 0] + z[..., 1]
        return np.stack([a - np.floor(a), b - np.floor(b)], axis=-1)

    def log_jacobian(self, z):
        return 0.0

    def log_jacobian_batch(self, zs):
        return np.zeros(np.asarray(zs, dtype=float).shape[0])

    def inverse_images(self, y):
        y1, y2 = y
        return [(_frac(y1 - y2), _frac(2.0 * y2 - y1))]

    def spec(self):
        return "arnold"


class Product(UniformMap):
    """Coordinate-wise action of 1-D uniform maps; arity equals the dimension."""

    def __init__(self, *factors):
        if len(factors) == 1 and isinstance(factors[0], (list, tuple)):
            factors = tuple(factors[0])
        if len(factors) < 2:
            raise ParameterError("product needs at least two factors")
        for f in factors:
            if not isinstance(f, UniformMap) or f.dim != 1:
                raise ParameterError("product factors must be 1-D uniform maps")
        self.factors = tuple(factors)
        self.dim = len(factors)

    def apply(self, z):
        return tuple(f.apply(zi) for f, zi in zip(self.factors, z))

    def apply_batch(self, zs):
        z = np.asarray(zs, dtype=float)
        cols = [f.apply_batch(z[..., i]) for i, f in enumerate(self.factors)]
        return np.stack(cols, axis=-1)

    def log_jacobian(self, z):
        return sum(f.log_jacobian(zi) for f, zi in zip(self.factors, z))

    def log_jacobian_batch(self, zs):
        z = np.asarray(zs, dtype=float)
        out = np.zeros(z.shape[0])
        for i, f in enumerate(self.factors):
            out += f.log_jacobian_batch(z[..., i])
        return out

    def inverse_images(self, y):
        per_axis = [f.inverse_images(yi) for f, yi in zip(self.factors, y)]
        return [tuple(combo) for combo in _iterproduct(*per_axis)]

    def entropy(self):
        return tuple(f.entropy() for f in self.factors)

    @property
    def is_chaotic(self):
        return any(f.is_chaotic for f in self.factors)

    def spec(self):
        return "product(" + ", ".join(f.spec() for f in self.factors) + ")"


class Compose(UniformMap):
    """Pipeline composition: children are applied in listed order."""

    def __init__(self, children):
        children = tuple(children)
        if len(children) < 2:
            raise ParameterError("compose needs at least two maps")
        dims = {c.dim for c in children}
        if len(dims) != 1:
            raise ParameterError("composed maps must share the same dimension")
        self.children = children
        self.dim = children[0].dim

    def apply(self, z):
        for c in self.children:
            z = c.apply(z)
        return z

    def apply_batch(self, zs):
        z = np.asarray(zs, dtype=float)
        for c in self.children:
            z = c.apply_batch(z)
        return z

    def log_jacobian(self, z):
        lj = 0.0
        for c in self.children:
            lj += c.log_jacobian(z)
            z = c.apply(z)
        return lj

    def log_jacobian_batch(self, zs):
        z = np.asarray(zs, dtype=float)
        lj = np.zeros(z.shape[0])
        for c in self.children:
            lj += c.log_jacobian_batch(z)
            z = c.apply_batch(z)
        return lj

    def inverse_images(self, y):
        points = [y]
        for c in reversed(self.children):
            points = [x for p in points for x in c.inverse_images(p)]
        return points

    def branch_points(self):
        if self.dim != 1:
            raise CapabilityError("branch points are defined for 1-D maps")
        pts = set()
        prefix: list[UniformMap] = []
        for child in self.children:
            for p in child.branch_points():
                back = [p]
                for earlier in reversed(prefix):
                    back = [q for b in back for q in earlier.inverse_images(b)]
                pts.update(back)
            prefix.append(child)
        return tuple(sorted(pts))

    def entropy(self):
        parts = [c.entropy() for c in self.children]
        if all(isinstance(p, tuple) for p in parts):
            return tuple(sum(axis) for axis in zip(*parts))
        if any(isinstance(p, tuple) for p in parts):
            raise CapabilityError("cannot sum scalar and per-axis rates in a composition")
        return sum(parts)

    @property
    def is_chaotic(self):
        return any(c.is_chaotic for c in self.children)

    def spec(self):
        return "compose(" + ", ".join(c.spec() for c in self.children) + ")"


# ---------------------------------------------------------------------------
# constructors and helpers
# ---------------------------------------------------------------------------

def compose(first: UniformMap, second: UniformMap, *rest) -> Compose:
    """Pipeline composition: apply ``first``, then ``second`` (then any rest)."""
    return Compose((first, second) + rest)


def product(*factors) -> Product:
    return Product(*factors)


def with_jitter(u: UniformMap, shift: float = JITTER_SHIFT) -> UniformMap:
    """Compose ``u`` with a trailing per-axis mod-1 translation by ``shift``."""
    if u.dim == 1:
        tail: UniformMap = Translation(shift)
    else:
        tail = Product(*(Translation(shift) for _ in range(u.dim)))
    return Compose((u, tail))


def period(numerator: int, denominator: int) -> int:
    """Orbit period of the mod-1 translation by the rational numerator/denominator."""
    n, d = int(numerator), int(denominator)
    if d == 0:
        raise ParameterError("denominator must be non-zero")
    return abs(d) // math.gcd(n, d)


def iterate(u: UniformMap, z0, n: int) -> np.ndarray:
    """Iterate a uniform map, returning the n new states after z0."""
    if n < 1:
        raise ParameterError("orbit length must be >= 1")
    if u.dim == 1:
        out = np.empty(n)
        z = float(z0)
        apply = u.apply
        for k in range(n):
            z = apply(z)
            out[k] = z
        return out
    out = np.empty((n, u.dim))
    z = tuple(float(v) for v in z0)
    apply = u.apply
    for k in range(n):
        z = apply(z)
        out[k] = z
    return out


# ---------------------------------------------------------------------------
# text spec mini-language
# ---------------------------------------------------------------------------
#
#   spec     := node
#   node     := name '(' node (',' node)* ')'        -- product / compose
#             | name (':' param)*                    -- atom
#   param    := float | int | INT '/' INT
#
# e.g.  translation:0.3   sawtooth:3   product(asym:0.3, asym:0.9)
#       compose(sawtooth:3, triangle:1)

_ATOM_ARITY = {
    "identity": 0,
    "translation": 1,
    "sawtooth": 1,
    "triangle": 1,
    "asym": 1,
    "baker": 0,
    "arnold": 0,
}


class _SpecParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise ParseError(message, position=self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def read_name(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        if self.pos == start:
            self.error("expected a map name")
        return self.text[start : self.pos].lower()

    def read_param(self) -> float:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in ":,()" and not self.text[self.pos].isspace():
            self.pos += 1
        token = self.text[start : self.pos]
        if not token:
            self.error("expected a parameter")
        if "/" in token:
            num, _, den = token.partition("/")
            try:
                return int(num) / int(den)
            except (ValueError, ZeroDivisionError):
                self.pos = start
                self.error(f"malformed rational parameter '{token}'")
        try:
            return float(token)
        except ValueError:
            self.pos = start
            self.error(f"malformed numeric parameter '{token}'")

    def parse_node(self) -> UniformMap:
        name = self.read_name()
        self.skip_ws()
        if self.peek() == "(":
            if name not in ("product", "compose"):
                self.error(f"'{name}' does not take arguments")
            self.pos += 1
            args = [self.parse_node()]
            self.skip_ws()
            while self.peek() == ",":
                self.pos += 1
                args.append(self.parse_node())
                self.skip_ws()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            try:
                return Product(*args) if name == "product" else Compose(args)
            except ParameterError as exc:
                raise ParseError(str(exc), position=self.pos) from None
        if name in ("product", "compose"):
            self.error(f"'{name}' requires a parenthesized argument list")
        if name not in _ATOM_ARITY:
            self.error(f"unknown map '{name}'")
        params = []
        self.skip_ws()
        while self.peek() == ":":
            self.pos += 1
            params.append(self.read_param())
        if len(params) != _ATOM_ARITY[name]:
            self.error(f"'{name}' takes {_ATOM_ARITY[name]} parameter(s), got {len(params)}")
        try:
            if name == "identity":
                return Identity()
            if name == "translation":
                return Translation(params[0])
            if name == "sawtooth":
                if params[0] != int(params[0]):
                    raise ParameterError("sawtooth periods must be an integer")
                return Sawtooth(int(params[0]))
            if name == "triangle":
                if params[0] != int(params[0]):
                    raise ParameterError("triangle periods must be an integer")
                return Triangle(int(params[0]))
            if name == "asym":
                return AsymTriangle(params[0])
            if name == "baker":
                return Baker()
            return ArnoldCat()
        except ParameterError as exc:
            raise ParseError(str(exc), position=self.pos) from None


def make_uniform(spec) -> UniformMap:
    """Build a uniform map from a spec string (or pass one through)."""
    if isinstance(spec, UniformMap):
        return spec
    parser = _SpecParser(str(spec))
    node = parser.parse_node()
    parser.skip_ws()
    if parser.pos != len(parser.text):
        parser.error("unexpected trailing input")
    return node
