"""Shared deterministic generators for the test suite."""

from __future__ import annotations

import random

import pytest

from quatcert import GF, FqPoly, GaussInt, make_elem


def rand_gauss(rng: random.Random, height: int) -> GaussInt:
    """Random nonzero Gaussian integer with |re|, |im| <= height."""
    while True:
        z = GaussInt(rng.randint(-height, height),
                     rng.randint(-height, height))
        if not z.is_zero():
            return z


def rand_gauss_elem(rng: random.Random, height: int, den_height: int = 0):
    num = rand_gauss(rng, height)
    if den_height > 0 and rng.random() < 0.25:
        return make_elem(num, GaussInt(rng.randint(1, den_height)))
    return make_elem(num)


def rand_poly(rng: random.Random, field, max_deg: int) -> FqPoly:
    """Random nonzero polynomial of degree <= max_deg."""
    while True:
        deg = rng.randint(0, max_deg)
        coeffs = [field.from_encoding(rng.randrange(field.q))
                  for _ in range(deg)]
        coeffs.append(field.from_encoding(rng.randrange(1, field.q)))
        p = FqPoly.make(field, coeffs)
        if not p.is_zero():
            return p


def rand_ff_elem(rng: random.Random, q: int, max_deg: int,
                 with_den: bool = False):
    field = GF(q)
    num = rand_poly(rng, field, max_deg)
    if with_den and rng.random() < 0.25:
        return make_elem(num, rand_poly(rng, field, max(1, max_deg // 2)))
    return make_elem(num)


@pytest.fixture
def rng():
    return random.Random(20240614)
