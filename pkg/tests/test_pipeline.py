"""Pipeline-level behavior: verdict routing, soundness gates, invariants."""

from imapk.interval_map import eval_multivalued
from imapk.ktheory import unimodal_minpoly, unimodal_orbit_data
from imapk.orbit import critical_closure, forward_orbit
from imapk.report import run
from imapk.specfile import parse_spec
from imapk.stepfun import apply_int_poly, indicator


def test_cuntz_krieger_verdict_for_realization():
    spec = parse_spec(
        "map { family = markov_realization; matrix = [[0,1,1],[1,0,1],[1,1,0]] }"
    )
    report, code = run("classify", spec)
    assert code == 0
    cls = report["classification"]
    assert cls["verdict"] == "cuntz_krieger"
    assert cls["k0"] == {"torsion": [2, 2], "free_rank": 0}
    assert cls["k1"] == {"free_rank": 0}
    assert report["markov"]["separation"]["status"] == "separates"


def test_identity_map_flags_and_kgroups():
    spec = parse_spec("map { partition = [0, 1]; branch = {slope=1, intercept=0} }")
    report, code = run("all", spec)
    assert code == 0
    d = report["dynamics"]
    assert d["surjective"] == "yes"
    assert d["essentially_injective"] == "yes"
    assert d["transitive"] == "no"
    assert d["exact"] == "no"
    assert report["markov"]["data"]["matrix"] == [[1]]
    kg = report["kgroups"]["incidence_route"]
    assert kg["k0"] == {"torsion": [], "free_rank": 1}
    assert kg["k1"] == {"free_rank": 1}
    assert report["classification"]["verdict"] == "invariants_only"


def test_rotation_realization_not_transitive():
    spec = parse_spec("map { family = markov_realization; matrix = [[0,1],[1,0]] }")
    report, _ = run("classify", spec)
    assert report["dynamics"]["transitive"] == "no"
    assert report["markov"]["separation"]["status"] == "fails"
    assert report["classification"]["verdict"] == "invariants_only"


def test_no_certificate_blocks_identification():
    # slope below sqrt(2): no family certificate, so no Cuntz identification
    spec = parse_spec("map { family = restricted_tent; s = 13/10 }")
    report, code = run("classify", spec)
    assert report["dynamics"]["transitive"] == "unknown"
    cls = report["classification"]
    assert cls["verdict"] == "invariants_only"
    # the invariants themselves are still reported through the orbit route
    kg = report["kgroups"]["minpoly_route"]
    assert kg["k0"] == {"torsion": [], "free_rank": 1}
    assert kg["label"] == "unconditional"


def test_conditional_verdict_for_capped_unimodal():
    # slope 1 + sqrt(2)/2 is above sqrt(2) (exactness certified) but the orbit
    # of 0 reaches the cap without closing and without a growth certificate
    spec = parse_spec(
        "field { poly = [-2,0,1]; iso = [1,2] }\n"
        'map { family = restricted_tent; s = "poly:[-2,0,1]; iso:[1,2]; elem:[1,1/2]" }\n'
        "options { cap = 300 }"
    )
    report, code = run("classify", spec)
    assert code == 0
    cls = report["classification"]
    assert cls["verdict"] == "cuntz_infinity"
    assert cls["conditional"]
    kg = report["kgroups"]["minpoly_route"]
    assert kg["label"].startswith("conditional")


def test_markov_quartic_tent_found_by_closure():
    # slope 2^(1/4): the critical orbit closes with preperiod 3 and period 2,
    # |m(1)| = 0, and the map is identified through its incidence matrix
    spec = parse_spec(
        "field { poly = [-2,0,0,0,1]; iso = [1,2] }\n"
        "map { family = restricted_tent; s = alg:[0,1] }"
    )
    data, _ = unimodal_orbit_data(spec.map, 300)
    signs, k, p, case = data
    assert (k, p, case) == (3, 5, "eventually_periodic_k>1")
    report, code = run("classify", spec)
    assert code == 0
    assert report["minimal_polynomial"]["n"] == 0
    assert report["classification"]["verdict"] == "cuntz_krieger"
    checks = {c["check"]: c["status"] for c in report["consistency"]}
    assert checks["closed-form vs iterated minimal polynomial"] == "pass"
    assert checks["|m(1)| equals the torsion of the incidence cokernel"] == "pass"


def test_critical_closure_is_invariant(tent, golden_beta, offdiag_realization):
    for m in (tent, golden_beta, offdiag_realization):
        cc = critical_closure(m)
        assert cc.complete
        pts = set(cc.points)
        for p in cc.points:
            for v in eval_multivalued(m, p):
                assert v in pts


def test_orbit_determinism(golden_beta):
    first = forward_orbit(golden_beta, 1)
    second = forward_orbit(golden_beta, 1)
    assert first.as_dict() == second.as_dict()


def test_closed_form_polynomials_annihilate(tent, golden_field):
    from imapk.families import FamilySpec, build

    phi = golden_field.alpha()
    for m in (tent, build(FamilySpec("restricted_tent", {"s": phi})).map):
        data, _ = unimodal_orbit_data(m)
        signs, k, p, case = data
        poly = unimodal_minpoly(signs, k, p, case)
        assert apply_int_poly(m, poly, indicator(0, 1)).is_zero


def test_nonsurjective_markov_restricts_to_eventual_range():
    # tent-like map with peak 1/2 is Markov on {0, 1/2, 1} but not surjective
    spec = parse_spec(
        "map { partition = [0, 1/2, 1]; "
        "branch = {slope=1, intercept=0}; branch = {slope=-1, intercept=1} }"
    )
    report, code = run("ktheory", spec)
    assert code == 0
    assert report["dynamics"]["surjective"] == "no"
    assert report["dynamics"]["eventually_surjective"] == "yes"
    kg = report["kgroups"]["incidence_route"]
    assert kg is not None


def test_orbit_command_sections(tent):
    spec = parse_spec("map { family = tent }")
    report, code = run("orbit", spec)
    assert code == 0
    assert report["orbits"]["critical_closure"]["complete"]
    seeds = [o["seed"] for o in report["orbits"]["partition_orbits"]]
    assert seeds == ["0", "1/2", "1"]
    assert "kgroups" not in report
