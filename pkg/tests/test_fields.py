import numpy as np
import pytest

from robinsym import fields
from robinsym.grid import gradient_magnitude, field_to_samples
from robinsym.rearrange import check_weight_condition, decreasing_rearrangement

from conftest import cached_domain


def test_deterministic(square32):
    a = fields.random_smooth_field(square32, 42).field.values
    b = fields.random_smooth_field(square32, 42).field.values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, fields.random_smooth_field(square32, 43).field.values)


def test_nonnegative_100_seeds(square32):
    for seed in range(100):
        assert fields.random_smooth_field(square32, seed).field.values.min() >= 0


@pytest.mark.parametrize("kind", ["square", "lshape"])
def test_gradient_bound(kind):
    d = cached_domain(kind, 1 / 128)
    for seed in range(100):
        sf = fields.random_smooth_field(d, seed)
        assert gradient_magnitude(sf.field).values.max() <= sf.gradient_bound(d.h)


def test_weight_fields_satisfy_condition(square128):
    for seed in range(20):
        f = fields.random_weight_field(square128, seed, ratio=2.0)
        assert f.values.min() >= 1 and f.values.max() <= 2
        assert check_weight_condition(decreasing_rearrangement(field_to_samples(f)), 2).holds


def test_dirichlet_fields_vanish(square128):
    from robinsym.grid import boundary_values

    for seed in range(5):
        u = fields.random_dirichlet_field(square128, seed)
        assert u.values.min() >= 0
        assert np.max(boundary_values(u)) < 2 * square128.h * gradient_magnitude(u).values.max()


def test_expression(square32):
    u = fields.make_field(square32, {"kind": "expression", "params": {"expression": "x + 2 * y"}})
    c = square32.centers
    np.testing.assert_allclose(u.values, np.maximum(c[:, 0] + 2 * c[:, 1], 0))


def test_expression_rejects_names(square32):
    with pytest.raises(ValueError, match="unknown names"):
        fields.expression_field(square32, "__import__('os')")


def test_presets(disk128):
    u = fields.make_field(disk128, {"kind": "preset", "params": {"name": "cone"}})
    r = np.hypot(*disk128.centers.T)
    np.testing.assert_allclose(u.values, np.maximum(np.sqrt(disk128.area / np.pi) - r, 0))
    c = fields.make_field(disk128, {"kind": "preset", "params": {"name": "constant", "value": 2.5}})
    assert np.all(c.values == 2.5)
    with pytest.raises(ValueError):
        fields.make_field(disk128, {"kind": "preset", "params": {"name": "nope"}})


def test_random_smooth_requires_seed(square32):
    with pytest.raises(ValueError, match="seed"):
        fields.make_field(square32, {"kind": "random-smooth"})
    a = fields.make_field(square32, {"kind": "random-smooth", "seed": 3})
    b = fields.make_field(square32, {"kind": "random-smooth"}, seed=3)
    assert np.array_equal(a.values, b.values)
