import numpy as np
import pytest

from latquant import constructions as C
from latquant.cvp import int_det
from latquant.lattices import (GeneratorMatrix, LatticeError, LatticeRecord,
                               UnknownLatticeError, catalog_get, catalog_names,
                               direct_sum, gram, load_catalog, scale, volume)

A2_ROWS = np.array([[1.0, 0.0], [-0.5, np.sqrt(3) / 2]])


def test_gram_identity():
    assert np.array_equal(gram(GeneratorMatrix(np.eye(2))), np.eye(2))


def test_gram_hexagonal():
    g = gram(GeneratorMatrix(A2_ROWS))
    assert np.allclose(g, [[1, -0.5], [-0.5, 1]], atol=1e-15)


def test_gram_scaling():
    g = gram(GeneratorMatrix(2 * np.eye(3)))
    assert np.allclose(g, 4 * np.eye(3))


def test_volume_identity():
    for n in (1, 2, 5):
        assert volume(GeneratorMatrix(np.eye(n))) == pytest.approx(1.0)


def test_volume_scaled_identity():
    assert volume(GeneratorMatrix(3.0 * np.eye(4))) == pytest.approx(81.0)


def test_volume_hexagonal():
    # 2x2 determinant by hand: 1 * sqrt(3)/2 - 0
    assert volume(GeneratorMatrix(A2_ROWS)) == pytest.approx(np.sqrt(3) / 2, rel=1e-14)


def test_scale_volume_law():
    G = GeneratorMatrix(A2_ROWS)
    assert np.array_equal(scale(G, 3.0).rows, 3.0 * A2_ROWS)
    assert scale(G, 1.0).rows == pytest.approx(A2_ROWS)
    assert volume(scale(G, 2.0)) == pytest.approx(2 * np.sqrt(3), rel=1e-14)


def test_scale_volume_law_random_factors():
    rng = np.random.default_rng(1)
    G = GeneratorMatrix(rng.normal(size=(4, 4)))
    for a in rng.uniform(0.5, 2.0, size=10):
        assert volume(scale(G, a)) == pytest.approx(a ** 4 * volume(G), rel=1e-12)


def test_scale_rejects_nonpositive():
    with pytest.raises(LatticeError):
        scale(GeneratorMatrix(np.eye(2)), 0.0)
    with pytest.raises(LatticeError):
        scale(GeneratorMatrix(np.eye(2)), -1.0)


def test_direct_sum_identity():
    out = direct_sum(GeneratorMatrix(np.eye(1)), GeneratorMatrix(np.eye(1)))
    assert np.array_equal(out.rows, np.eye(2))


def test_direct_sum_block_structure():
    G = direct_sum(GeneratorMatrix(A2_ROWS), GeneratorMatrix(np.eye(1)))
    assert G.dim == 3
    assert np.array_equal(G.rows[:2, :2], A2_ROWS)
    assert G.rows[2, 2] == 1.0
    assert volume(G) == pytest.approx(np.sqrt(3) / 2, rel=1e-12)


def test_direct_sum_volume_multiplicative():
    rng = np.random.default_rng(2)
    for _ in range(5):
        G1 = GeneratorMatrix(rng.normal(size=(3, 3)))
        G2 = GeneratorMatrix(rng.normal(size=(4, 4)))
        assert volume(direct_sum(G1, G2)) == pytest.approx(
            volume(G1) * volume(G2), rel=1e-10)


def test_generator_rejects_singular():
    with pytest.raises(LatticeError):
        GeneratorMatrix(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_generator_rejects_nonsquare():
    with pytest.raises(LatticeError):
        GeneratorMatrix(np.ones((2, 3)))


def test_record_volume_consistency_enforced():
    with pytest.raises(LatticeError):
        LatticeRecord(name="bad", generator=GeneratorMatrix(np.eye(2)),
                      reference_volume=2.0)


# ---------------------------------------------------------------------------
# catalog

def test_catalog_z1():
    rec = catalog_get("Z1")
    assert rec.dim == 1
    assert rec.generator.rows[0, 0] == 1.0
    assert rec.reference_nsm == pytest.approx(1 / 12, abs=1e-9)


def test_catalog_z_alias_and_any_n():
    assert catalog_get("Z").dim == 1
    assert catalog_get("Z13").dim == 13
    assert catalog_get("Z22").reference_nsm == pytest.approx(1 / 12)


def test_catalog_k12():
    rec = catalog_get("K12")
    assert rec.dim == 12
    g = gram(rec.generator)
    assert np.linalg.det(g) == pytest.approx(729.0, abs=1e-6)
    assert abs(volume(rec.generator) - 27.0) < 1e-9 * 27


def test_catalog_l16():
    rec = catalog_get("L16")
    assert rec.dim == 16
    assert np.linalg.det(gram(rec.generator)) == pytest.approx(256.0, abs=1e-6)


def test_catalog_unknown_name_lists_available():
    with pytest.raises(UnknownLatticeError) as exc:
        catalog_get("Q7")
    msg = str(exc.value)
    assert "K12" in msg and "L16" in msg


def test_all_catalog_records_validate():
    for name in catalog_names():
        rec = catalog_get(name)
        v = volume(rec.generator)
        assert abs(v - rec.reference_volume) <= 1e-9 * rec.reference_volume
        g = gram(rec.generator)
        assert np.abs(g - g.T).max() < 1e-14 * max(1.0, np.abs(g).max())
        np.linalg.cholesky(g)  # positive definite


def test_catalog_direct_sum_volume_pairs():
    names = ["Z1", "A2", "A3s", "D4", "E6", "K12"]
    for a in names:
        for b in names:
            Ga, Gb = catalog_get(a).generator, catalog_get(b).generator
            assert volume(direct_sum(Ga, Gb)) == pytest.approx(
                volume(Ga) * volume(Gb), rel=1e-9)


def test_catalog_round_trips_decimal_strings(tmp_path):
    import json
    from latquant.lattices import catalog_path
    with open(catalog_path(), encoding="utf-8") as fh:
        data = json.load(fh)
    entry = next(e for e in data["lattices"] if e["name"] == "K12")
    # entries are strings and survive a json round trip byte-for-byte
    assert all(isinstance(x, str) for row in entry["rows"] for x in row)
    blob = json.dumps(data)
    assert json.loads(blob)["lattices"][0]["rows"] == data["lattices"][0]["rows"]


def test_catalog_env_override(tmp_path, monkeypatch):
    import json
    alt = tmp_path / "cat.json"
    alt.write_text(json.dumps({"lattices": [{
        "name": "T2", "dim": 2, "rows": [["2", "0"], ["0", "2"]],
        "reference_volume": 4.0, "reference_nsm": None}]}))
    monkeypatch.setenv("LATQUANT_CATALOG", str(alt))
    assert catalog_get("T2").dim == 2
    with pytest.raises(UnknownLatticeError):
        catalog_get("K12")


# ---------------------------------------------------------------------------
# constructions regenerate the checked-in data

def test_constructions_match_catalog_file():
    for name in ["A2", "A3s", "D4", "D5s", "E6", "E6s", "E7", "E8", "K12", "L16"]:
        rec = catalog_get(name)
        built = C.build_generator(name)
        assert np.allclose(rec.generator.rows, built.rows, atol=1e-15), name


def test_k12_gram_det_exact():
    assert int_det(C.k12_gram()) == 729


def test_l16_gram_det_exact():
    assert int_det(C.l16_gram()) == 256


def test_hexacode_weight_distribution():
    words = C.hexacode_words()
    weights = {}
    for w in words:
        k = sum(1 for x in w if x != 0)
        weights[k] = weights.get(k, 0) + 1
    assert weights == {0: 1, 4: 45, 6: 18}


def test_dual_volumes_reciprocal():
    for name in ["A2", "A3", "D4", "D5", "E6"]:
        v = volume(C.build_generator(name))
        vd = volume(C.build_generator(name + "s"))
        assert v * vd == pytest.approx(1.0, rel=1e-10)
