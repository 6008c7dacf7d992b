import json

import numpy as np
import pytest

from clearnet import ValidationError, gen_random_network, ingest
from clearnet.scenario import loads


def write(tmp_path, obj, name="s.json"):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return path


def test_minimal_single_bank(tmp_path):
    sc = ingest(write(tmp_path, {"n": 1, "cash": [2.0], "liabilities": [[0]]}))
    assert sc.network.n == 1
    np.testing.assert_array_equal(sc.network.relative, [[1.0]])


def test_holdings_row_too_large_names_row(tmp_path):
    raw = {"cash": [1, 1], "liabilities": [[0, 1], [1, 0]], "holdings": [[0, 0.5], [1.2, 0]]}
    with pytest.raises(ValidationError, match="row 1"):
        ingest(write(tmp_path, raw))


def test_triplets_equal_dense(tmp_path):
    dense = {"cash": [1, 2, 0], "liabilities": [[0, 1, 0], [0, 0, 4], [2, 0, 0]],
             "holdings": [[0, .2, 0], [0, 0, 0], [0, .5, 0]]}
    trip = {"cash": [1, 2, 0],
            "liabilities": [{"from": 0, "to": 1, "amount": 1}, {"from": 1, "to": 2, "amount": 4},
                            {"from": 2, "to": 0, "amount": 2}],
            "holdings": [{"from": 0, "to": 1, "amount": .2}, {"from": 2, "to": 1, "amount": .5}]}
    a = ingest(write(tmp_path, dense, "a.json")).network
    b = ingest(write(tmp_path, trip, "b.json")).network
    np.testing.assert_array_equal(a.liabilities, b.liabilities)
    np.testing.assert_array_equal(a.holdings, b.holdings)


def test_parse_error_reports_position(tmp_path):
    with pytest.raises(ValidationError, match="line 2, column"):
        ingest(write(tmp_path, '{"cash": [1],\n "liabilities": [[0]],,}'))


@pytest.mark.parametrize("raw, match", [
    ({"cash": [1], "liabilities": [[0]], "extra": 1}, "unknown field 'extra'"),
    ({"cash": [1], "liabilities": [[0]], "alpha": "high"}, "alpha"),
    ({"cash": [1], "liabilities": [[0]], "seed": 1.5}, "seed"),
    ({"cash": [1], "liabilities": [[0, 1]]}, "liabilities"),
    ([1, 2, 3], "JSON object"),
])
def test_rejects_bad_fields(raw, match):
    with pytest.raises(ValidationError, match=match):
        loads(json.dumps(raw))


def test_missing_file(tmp_path):
    with pytest.raises(ValidationError, match="cannot read"):
        ingest(tmp_path / "nope.json")


def test_dump_and_ingest_round_trip(tmp_path):
    sc = gen_random_network(3, 6)
    path = tmp_path / "g.json"
    sc.dump(path)
    back = ingest(path)
    assert back.name == sc.name and back.seed == 3
    np.testing.assert_array_equal(back.network.liabilities, sc.network.liabilities)
    np.testing.assert_array_equal(back.network.holdings, sc.network.holdings)
    assert back.network.alpha == sc.network.alpha


def test_generator_is_deterministic():
    assert gen_random_network(11, 8).dumps() == gen_random_network(11, 8).dumps()
    assert gen_random_network(11, 8).dumps() != gen_random_network(12, 8).dumps()


def test_generator_properties():
    for seed in range(30):
        net = gen_random_network(seed, 7, density=0.4).network
        assert net.uniform_charges and 0 < net.alpha <= 1
        assert net.holdings_norm <= 0.9
        assert np.all(np.diag(net.liabilities) == 0)
        assert np.all(net.liabilities <= 10) and np.all(net.cash <= 5)


def test_generator_shock_and_density():
    np.testing.assert_array_equal(gen_random_network(5, 6, shock=1.0).network.cash, 0)
    sparse = gen_random_network(5, 30, density=0.01).network
    identity_rows = np.sum(np.all(sparse.relative == np.eye(30), axis=1))
    assert identity_rows >= 20
    assert gen_random_network(5, 4, alpha=0.3).network.gamma == 0.3


@pytest.mark.parametrize("kw", [{"density": 0.0}, {"density": 1.5}, {"shock": -0.1}, {"alpha": 2.0},
                                {"n": 0}])
def test_generator_rejects(kw):
    args = {"seed": 1, "n": 3, **kw}
    with pytest.raises(ValidationError):
        gen_random_network(**args)
