from hypothesis import given, settings
from hypothesis import strategies as st

from imforge.certify import EmbeddingCertificate, verify, verify_unit
from imforge.expanders import Star, Unit, build_unit
from imforge.graphs import build_graph

from helpers import complete, cycle, petersen


def k3_identity_cert():
    return EmbeddingCertificate(
        kind="immersion",
        branch=[0, 1, 2],
        pairs={(0, 1): [0, 1], (0, 2): [0, 2], (1, 2): [1, 2]},
        ell=0,
    )


def test_verify_k3_identity():
    report = verify(complete(3), k3_identity_cert())
    assert report.valid
    assert report.strong_immersion
    assert report.length_histogram == {1: 3}
    assert report.t == 3 and report.path_count == 3


def test_verify_edge_reuse():
    cert = EmbeddingCertificate(
        kind="immersion",
        branch=[0, 1, 2],
        pairs={(0, 1): [0, 1], (0, 2): [0, 1, 2], (1, 2): [1, 2]},
    )
    report = verify(cycle(3), cert)
    assert not report.valid
    assert any(code == "EDGE_REUSE" for code, _ in report.violations)


def test_verify_subdivision_vs_immersion_semantics():
    # two paths through the same internal vertex: fine as an immersion when
    # edges differ, an INTERNAL_REUSE violation as a subdivision
    g = build_graph(6, [(0, 4), (4, 1), (2, 4), (4, 3), (0, 2), (0, 3), (1, 2), (1, 3)])
    pairs = {(0, 1): [0, 4, 1], (2, 3): [2, 4, 3], (0, 2): [0, 2],
             (0, 3): [0, 3], (1, 2): [1, 2], (1, 3): [1, 3]}
    base = dict(kind="immersion", branch=[0, 1, 2, 3], pairs=pairs)
    as_immersion = verify(g, EmbeddingCertificate(**base))
    assert as_immersion.valid
    base["kind"] = "subdivision"
    as_subdivision = verify(g, EmbeddingCertificate(**base))
    assert not as_subdivision.valid
    assert any(code == "INTERNAL_REUSE" for code, _ in as_subdivision.violations)


def test_verify_missing_pair_and_edge():
    cert = EmbeddingCertificate(kind="immersion", branch=[0, 1, 2],
                                pairs={(0, 1): [0, 1], (0, 2): [0, 2]})
    report = verify(cycle(6), cert)
    codes = {code for code, _ in report.violations}
    assert "MISSING_PAIR" in codes
    assert "MISSING_EDGE" in codes  # (0, 2) is not an edge of C6


def test_verify_branch_internal_blocks_strong():
    g = complete(4)
    cert = EmbeddingCertificate(kind="immersion", branch=[0, 1],
                                pairs={(0, 1): [0, 2, 1]})
    report = verify(g, cert)
    assert report.valid and report.strong_immersion
    g5 = complete(5)
    cert2 = EmbeddingCertificate(kind="immersion", branch=[0, 1, 2],
                                 pairs={(0, 1): [0, 2, 1], (0, 2): [0, 3, 2],
                                        (1, 2): [1, 4, 2]})
    report2 = verify(g5, cert2)
    assert report2.valid and not report2.strong_immersion


def test_verify_length_contract():
    cert = EmbeddingCertificate(kind="immersion", branch=[0, 3],
                                pairs={(0, 1): [0, 1, 2, 3]}, ell=1)
    report = verify(cycle(4), cert)
    assert any(code == "LENGTH_MISMATCH" for code, _ in report.violations)


def test_verify_trivial_certificate():
    cert = EmbeddingCertificate(kind="immersion", branch=[5], pairs={})
    assert verify(petersen(), cert).valid


def test_certificate_json_round_trip():
    cert = k3_identity_cert()
    again = EmbeddingCertificate.from_json(cert.to_json())
    assert again == cert
    assert again.to_json() == cert.to_json()


def test_verify_unit_round_trip():
    g = complete(20)
    unit = build_unit(g, (), (), h1=3, h2=2, h3=2, seed=0)
    report = verify_unit(g, unit)
    assert report.valid, report.violations


def test_verify_unit_missing_edge():
    g = cycle(8)
    unit = Unit(center=0, branches=[[0, 3]], stars=[Star(3, (2, 4))],
                h_params=(1, 2, 1))
    report = verify_unit(g, unit)
    assert any(code == "MISSING_EDGE" for code, _ in report.violations)


def test_verify_unit_star_overlap():
    g = complete(8)
    unit = Unit(center=0, branches=[[0, 1], [0, 2]],
                stars=[Star(1, (3, 4)), Star(2, (4, 5))], h_params=(2, 2, 1))
    report = verify_unit(g, unit)
    assert any(code == "STAR_OVERLAP" for code, _ in report.violations)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=100))
def test_verify_rejects_any_single_edge_drop(t, salt):
    # mutate a valid complete-graph certificate by deleting one path edge
    g = complete(t + 2)
    branch = list(range(t))
    pairs = {}
    for i in range(t):
        for j in range(i + 1, t):
            pairs[(i, j)] = [branch[i], branch[j]]
    cert = EmbeddingCertificate(kind="immersion", branch=branch, pairs=pairs)
    assert verify(g, cert).valid
    keys = sorted(pairs)
    victim = keys[salt % len(keys)]
    broken = {k: (v if k != victim else [v[0], v[0] + t + 1, v[1]])
              for k, v in pairs.items()}
    mutated = EmbeddingCertificate(kind="immersion", branch=branch, pairs=broken)
    report = verify(g, mutated)
    # the rerouted path stays valid unless it collides; force a real defect
    broken[victim] = [v := pairs[victim][0], v]
    mutated = EmbeddingCertificate(kind="immersion", branch=branch, pairs=broken)
    assert not verify(g, mutated).valid
