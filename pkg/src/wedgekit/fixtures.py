"""Named fixture registry.

Test functions, boundary data and point-mass lists are selectable from the
CLI by ``tag:params`` strings (positional or key=value), or as JSON
descriptors ``{"family": ..., "params": [...]}`` for batch runs.  Complex
numbers are written with an ``i`` suffix, e.g. ``0.5i`` or ``1-0.3i``.
"""

from __future__ import annotations

from .errors import InvalidArgument
from .functionals import (
    cauchy_transform,
    gaussian,
    heat_probe,
    poly_gaussian,
    polynomial_boundary,
    rational_boundary,
)


def parse_complex(text):
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "")
    if not s:
        raise InvalidArgument("empty complex literal")
    try:
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise InvalidArgument(f"cannot parse complex number {text!r}") from exc


def _split_params(body):
    positional, named = [], {}
    if not body:
        return positional, named
    for chunk in body.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" in chunk:
            key, val = chunk.split("=", 1)
            named[key.strip()] = val.strip()
        else:
            positional.append(chunk)
    return positional, named


def _tag_and_params(descriptor):
    if isinstance(descriptor, dict):
        try:
            tag = descriptor["family"]
        except KeyError as exc:
            raise InvalidArgument("fixture descriptor needs a 'family' key") from exc
        params = descriptor.get("params", [])
        if isinstance(params, dict):
            return tag, [], {k: v for k, v in params.items()}
        return tag, list(params), {}
    text = str(descriptor)
    tag, _, body = text.partition(":")
    positional, named = _split_params(body)
    return tag.strip(), positional, named


def parse_test_function(descriptor):
    """gaussian:c,s | polygauss:c0,c1,... | heat:xi,t (key=value accepted)."""
    tag, pos, named = _tag_and_params(descriptor)
    if tag == "gaussian":
        center = parse_complex(named.get("c", pos[0] if pos else 0.0))
        width = float(named.get("s", pos[1] if len(pos) > 1 else 1.0))
        return gaussian(center, width)
    if tag in ("polygauss", "poly_gaussian"):
        coeffs = [parse_complex(p) for p in pos] or [parse_complex(v) for v in named.values()]
        return poly_gaussian(coeffs)
    if tag in ("heat", "heat_probe"):
        xi = float(named.get("xi", pos[0] if pos else 0.0))
        t = float(named.get("t", pos[1] if len(pos) > 1 else 0.1))
        return heat_probe(xi, t)
    raise InvalidArgument(f"unknown test-function fixture {tag!r}")


def parse_masses(descriptor):
    """Point masses: ``1@0.3i;-0.5@-0.3i`` or just ``0.3i`` for a unit mass."""
    if isinstance(descriptor, (list, tuple)):
        return tuple((parse_complex(c), parse_complex(w)) for c, w in descriptor)
    masses = []
    for chunk in str(descriptor).split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "@" in chunk:
            c, w = chunk.split("@", 1)
            masses.append((parse_complex(c), parse_complex(w)))
        else:
            masses.append((1.0 + 0.0j, parse_complex(chunk)))
    if not masses:
        raise InvalidArgument(f"no point masses in {descriptor!r}")
    return tuple(masses)


def parse_boundary_function(descriptor, side, ell):
    """poly:c0,c1,... | rational:p1,p2,... | chilbert:w1;w2 (one tube side)."""
    tag, pos, named = _tag_and_params(descriptor)
    if tag in ("poly", "polynomial"):
        coeffs = [parse_complex(p) for p in pos]
        if not coeffs:
            raise InvalidArgument("polynomial fixture needs coefficients")
        return polynomial_boundary(coeffs, side, ell)
    if tag == "rational":
        poles = [parse_complex(p) for p in pos] or [parse_complex(v) for v in named.values()]
        if not poles:
            raise InvalidArgument("rational fixture needs pole locations")
        return rational_boundary(poles, side, ell)
    if tag in ("chilbert", "cauchy"):
        body = ";".join(pos) if pos else named.get("w", "")
        masses = parse_masses(body)
        upper, lower = cauchy_transform(masses, ell)
        return upper if side > 0 else lower
    raise InvalidArgument(f"unknown boundary fixture {tag!r}")
