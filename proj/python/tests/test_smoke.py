import itertools
import json

import numpy as np
import pytest

import qgroupoid as qg


@pytest.fixture(scope="module")
def s3():
    return qg.build_example("group-algebra", "s3")


def test_group_algebra_shape(s3):
    assert s3.dim == 6
    assert sorted(s3.blocks) == [1, 1, 2]
    assert s3.delta.shape == (36, 6)
    report = qg.verify_axioms(s3)
    assert report["pass"]


def test_unit_and_coproduct(s3):
    one = s3.unit()
    x = np.arange(1, 7, dtype=complex)
    assert np.allclose(s3.mul(one, x), x)
    # group algebras are Hopf algebras, so the target counital map is eps(x) 1
    assert np.allclose(s3.eps_t(x), (s3.eps @ x) * one)
    assert s3.coproduct(one).shape == (6, 6)


def test_json_round_trip_is_stable(s3):
    text = s3.to_json()
    again = qg.wha_from_json(text)
    assert again.to_json() == text
    doc = json.loads(text)
    assert doc["basis"] == "matrix-units"


def test_malformed_json_raises():
    with pytest.raises(qg.IoError):
        qg.wha_from_json('{"format": "something-else"}')


def test_unknown_example_raises():
    with pytest.raises(ValueError):
        qg.build_example("group-algebra", "a5")


def test_corrupted_coproduct_fails_axioms(s3):
    doc = json.loads(s3.to_json())
    doc["delta"][0][3] += 0.25
    broken = qg.wha_from_json(json.dumps(doc))
    report = qg.verify_axioms(broken)
    assert not report["pass"]


def test_dual_of_group_algebra_is_commutative(s3):
    dual, pairing = qg.dual(s3)
    assert dual.blocks == [1] * 6
    assert pairing.shape == (6, 6)
    assert abs(np.linalg.det(pairing)) > 1e-6
    assert qg.verify_axioms(dual)["pass"]
    assert qg.bidual_residual(s3) < 1e-9


def test_haar_projection_is_idempotent_and_integral(s3):
    p = qg.haar_projection(s3)
    assert np.allclose(s3.mul(p, p), p, atol=1e-10)
    assert abs(s3.eps @ p - 1) < 1e-10
    x = np.random.default_rng(7).normal(size=6) + 0j
    assert np.allclose(s3.mul(x, p), (s3.eps @ x) * p, atol=1e-10)


def test_strong_invariance_on_groupoid():
    pair = qg.build_example("groupoid-function-algebra", "pair:2")
    phi = qg.haar_functional(pair)
    report = qg.strong_invariance(pair, phi)
    assert report["worst"] < 1e-9


def test_heisenberg_double_of_cyclic_group_is_full_matrix_algebra():
    z3 = qg.build_example("group-algebra", "cyclic:3")
    assert qg.heisenberg_blocks(z3) == [3]


def test_coideal_lattice_of_s3(s3):
    lattice, bases = qg.coideals(s3)
    # coideals of C[S3] are the group algebras of its six subgroups
    assert len(lattice["nodes"]) == 6
    assert sorted(n["dim"] for n in lattice["nodes"]) == [1, 2, 2, 2, 3, 6]
    assert all(b.shape[0] == 6 for b in bases)
    for Q in bases:
        assert np.allclose(Q.conj().T @ Q, np.eye(Q.shape[1]), atol=1e-9)


def test_principal_graph_of_whole_algebra(s3):
    report, dot = qg.principal_graph(s3)
    assert dot.startswith("graph") or dot.startswith("digraph")
    assert report["norm_sq"] == pytest.approx(6.0, abs=1e-8)


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_depth_formula_matches_graph(n):
    # the formula takes the depth of N subset M and predicts the depth of N subset M_k
    depth = qg.depth_from_graph(qg.path_graph(n))["depth"]
    for k in range(4):
        assert qg.depth_from_graph(qg.path_graph(n), k)["depth"] == qg.reduced_depth_formula(depth, k)


def test_tower_dimensions_follow_fibonacci():
    summary = qg.tower_summary(qg.path_graph(4), 6)
    dims = [level["dim"] for level in summary["levels"]]
    # level 0 is N itself, level j + 1 is N' cap M_j
    assert dims == [1, 1, 2, 5, 13, 34, 89]


def test_extraction_from_a4_tower():
    W, report = qg.extract(qg.path_graph(4), 1)
    assert W.dim == 13
    assert sorted(W.blocks) == [2, 3]
    assert report["biconnected"]
    golden = (3 + 5 ** 0.5) / 2
    assert report["principal_norm_sq"] == pytest.approx(golden, abs=1e-8)
    assert qg.verify_axioms(W)["pass"]


def test_extraction_precondition_failure():
    with pytest.raises(qg.AlgebraError):
        qg.extract(qg.path_graph(4), 0)


def test_presentation_input_matches_builtin():
    # Z/2 as a named multiplication table
    pres = {"elements": ["e", "a"], "multiplication": [["e", "a"], ["a", "e"]]}
    W = qg.build_from_presentation("function-algebra", json.dumps(pres))
    ref = qg.build_example("function-algebra", "cyclic:2")
    assert W.blocks == ref.blocks == [1, 1]
    assert np.allclose(W.delta, ref.delta)
    assert qg.verify_axioms(W)["pass"]


def test_all_builtin_kinds_pass_axioms():
    for kind, ex in itertools.product(
        ["group-algebra", "function-algebra"], ["cyclic:2", "cyclic:4", "s3"]
    ):
        assert qg.verify_axioms(qg.build_example(kind, ex))["pass"], (kind, ex)
    for kind in ["groupoid-algebra", "groupoid-function-algebra"]:
        assert qg.verify_axioms(qg.build_example(kind, "pair:3"))["pass"], kind
