import json
from math import comb

import pytest
from hypothesis import given, strategies as st

from eqcsm.csmcalc import (AtZero, ConeClassSpec, HeavyRunRefused, Inconsistent, Underdetermined,
                           degree_zero_anchor, degreewise_residuals, euler_characteristic,
                           gkm_solve, h_inverse, h_reduce, h_substitution, lift_from_zero,
                           load_cached, omega1_base_point, omega1_groups, omega1_known_table,
                           omega1_local, omega1_raw_top_degree, omega1_stratum_class,
                           omega1_summands, projective_cone_class, raw_top_degree,
                           recover_local_class, remainder_from_summands, scalar_cone_class,
                           smooth_local_class, store_cached, toric_quadric_oracle)
from eqcsm.grassloc import (GrassPoint, LocalClassTable, euler_class, fixed_points, gkm_graph,
                            tangent_weights)
from eqcsm.polyarith import FractionTerm, LinearForm, MultiPoly, parse_poly
from eqcsm.positivity import is_translation_invariant
from eqcsm.symfunc import is_symmetric
from strategies import translation_invariant

DEG1 = "t3 + t4 - t1 - t2"
DEG3_FACTOR = "2*t1*t2 - t1*t3 - t2*t3 - t1*t4 - t2*t4 + 2*t3*t4"


def P(text, n):
    return parse_poly(text, n)


def diff(n, j, i):
    return LinearForm.diff(n, j, i)


@pytest.fixture(scope="module")
def omega():
    """f_1..f_3 by each method, computed once."""
    return {m: omega1_local(3, m) for m in ("direct", "gkm", "grouped")}


def f2():
    return omega1_local(2).f


# --- smooth classes and anchors -------------------------------------------------

def test_smooth_local_class_examples():
    assert smooth_local_class([diff(2, 2, 1)], []) == P("1 + t2 - t1", 2)
    p = GrassPoint((1, 2), 4)
    assert smooth_local_class([], tangent_weights(p)) == euler_class(p)
    with pytest.raises(ValueError):
        smooth_local_class([], [])


def test_stratum_class_at_p13():
    want = P("t4 - t1", 4) * P("1 + t2 - t1", 4) * P("1 + t2 - t3", 4) * P("1 + t4 - t3", 4)
    f_table = {1: P("t2 - t1", 2)}
    got = omega1_stratum_class(GrassPoint((1, 3), 4), 2, f_table)
    assert got == want
    normal = [diff(4, 4, 1)]
    tangent = [w for w in tangent_weights(GrassPoint((1, 3), 4)) if w not in normal]
    assert got == smooth_local_class(tangent, normal)


def test_stratum_class_outside_and_at_base():
    f_table = {1: P("t2 - t1", 2)}
    assert omega1_stratum_class(GrassPoint((3, 4), 4), 2, f_table).is_zero()
    with pytest.raises(ValueError):
        omega1_stratum_class(GrassPoint((1, 2), 4), 2, f_table)


def test_stratum_class_level_two():
    f = omega1_local(2).f_table
    got = omega1_stratum_class(GrassPoint((1, 2, 6), 6), 3, f)
    residual = [diff(6, 3, 6), diff(6, 4, 6), diff(6, 5, 6), diff(6, 3, 1), diff(6, 3, 2)]
    want = f[2].embed(6, [1, 2, 4, 5])
    for w in residual:
        want = want * (w.to_poly() + 1)
    assert got == want


def test_anchor():
    p = GrassPoint((1, 2), 4)
    assert degree_zero_anchor(p, True) == euler_class(p)
    assert degree_zero_anchor(p, False).is_zero()
    assert degree_zero_anchor(GrassPoint((1,), 2), True) == P("t2 - t1", 2)


# --- recovery by localization ---------------------------------------------------

def test_recover_omega1_2_degree_parts():
    known = omega1_known_table(2, {1: P("t2 - t1", 2)})
    p0 = omega1_base_point(2)
    f = recover_local_class(known, p0, True, codim=1)
    d1 = P(DEG1, 4)
    assert f.homogeneous_component(0).is_zero()
    assert f.homogeneous_component(1) == d1
    assert f.homogeneous_component(2) == d1 * d1
    assert f.homogeneous_component(3) == d1 * P(DEG3_FACTOR, 4)
    assert f.homogeneous_component(4) == euler_class(p0)
    assert raw_top_degree(known, p0) == euler_class(p0).scale(-4)


def test_recover_smooth_point_class():
    # P^2 as a whole: class (1 + w) at every point
    table = LocalClassTable(1, 3)
    for p in fixed_points(1, 3):
        table[p] = smooth_local_class(tangent_weights(p), [])
    p0 = GrassPoint((1,), 3)
    assert recover_local_class(table.without(p0), p0, True) == table[p0]


def test_recover_flags_low_degree_parts():
    # a point class placed in the wrong table gives a nonzero degree-0 part
    table = LocalClassTable(1, 2)
    table[(2,)] = MultiPoly.const(2, 1)
    with pytest.raises(Inconsistent):
        recover_local_class(table, GrassPoint((1,), 2), True, codim=1)


def test_at_zero_and_lift():
    f = f2()
    shifted = lift_from_zero(f.set_zero(1))
    assert shifted == f
    term = FractionTerm.make(f, [diff(4, 3, 2)])
    z = AtZero(term).degree_part(2)
    assert z.numerator == f.homogeneous_component(3).set_zero(1)


@given(translation_invariant(4))
def test_lift_inverts_restriction(p):
    assert lift_from_zero(p.set_zero(1)) == p


def test_translation_reduction_matches_plain_sum():
    ft = {1: P("t2 - t1", 2), 2: f2()}
    summands = omega1_summands(3, ft)
    plain = remainder_from_summands(summands, 6, range(3))
    reduced = remainder_from_summands(summands, 6, range(3), translation_invariant=True)
    assert plain == reduced


def test_groups_cover_every_point():
    groups = omega1_groups(3)
    pts = [p for g in groups for p in g]
    assert len(pts) == len(set(pts)) == comb(6, 3) - 2
    assert [len(g) for g in groups] == [9, 9]


# --- table checks ---------------------------------------------------------------

def test_euler_characteristic_examples():
    table = LocalClassTable(1, 2)
    table[(1,)] = euler_class(GrassPoint((1,), 2))
    table[(2,)] = MultiPoly.zero(2)
    assert euler_characteristic(table) == 1
    assert euler_characteristic(omega1_local(2).full_table()) == 5


def test_omega1_3_table_properties(omega):
    table = omega["direct"].full_table()
    assert euler_characteristic(table) == comb(6, 3) - 1
    assert all(r.is_zero() for r in degreewise_residuals(table).values())


def test_anchor_consistency(omega):
    for n in (2, 3):
        res = omega1_local(n)
        table = res.full_table()
        top = n * n
        for p in table.points():
            member = any(i <= n for i in p.subset)
            want = euler_class(p) if member else MultiPoly.zero(2 * n)
            assert table[p].homogeneous_component(top) == want


# --- Omega_1(n) -----------------------------------------------------------------

def test_omega1_base_case():
    assert omega1_local(1).f == P("t2 - t1", 2)


@pytest.mark.parametrize("n", [1, 2])
def test_methods_agree_small(n):
    fs = [omega1_local(n, m).f for m in ("direct", "gkm", "grouped")]
    assert fs[0] == fs[1] == fs[2]


def test_methods_agree_n3(omega):
    tables = [omega[m].full_table() for m in ("direct", "gkm", "grouped")]
    for p in tables[0].points():
        assert tables[0][p] == tables[1][p] == tables[2][p]


def test_degree_one_floor(omega):
    fs = omega["direct"].f_table
    for n in (1, 2, 3):
        f = fs[n]
        deg1 = sum((MultiPoly.var(2 * n, j) for j in range(n + 1, 2 * n + 1)), MultiPoly.zero(2 * n))
        deg1 = deg1 - sum((MultiPoly.var(2 * n, i) for i in range(1, n + 1)), MultiPoly.zero(2 * n))
        assert f.low_degree() == 1
        assert f.homogeneous_component(1) == deg1


def test_two_group_symmetry_and_translation_invariance(omega):
    for n, f in omega["direct"].f_table.items():
        assert is_symmetric(f, range(1, n + 1))
        assert is_symmetric(f, range(n + 1, 2 * n + 1))
        assert is_translation_invariant(f)


def test_raw_top_degree_n2():
    assert omega1_raw_top_degree(2, {1: P("t2 - t1", 2)}) == euler_class(omega1_base_point(2)).scale(-4)


def test_toric_oracle():
    toric = toric_quadric_oracle()
    d1 = P(DEG1, 4)
    assert toric.homogeneous_component(1) == d1
    a, b, c, d = (diff(4, j, i).to_poly() for i, j in ((1, 3), (1, 4), (2, 3), (2, 4)))
    assert toric.homogeneous_component(2) == a * b + a * c + b * d + c * d == d1 * d1
    assert toric == f2()


def test_heavy_gate():
    with pytest.raises(HeavyRunRefused):
        omega1_local(4)
    with pytest.raises(ValueError):
        omega1_local(0)
    with pytest.raises(ValueError):
        omega1_local(2, "magic")


def test_cache_round_trip(tmp_path):
    first = omega1_local(3, cache_dir=tmp_path)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["f_1.json", "f_2.json", "f_3.json"]
    data = json.loads((tmp_path / "f_2.json").read_text())
    assert data["k"] == 2 and data["nvars"] == 4 and data["format_version"] == 1
    assert load_cached(tmp_path, 2) == first.lower[2]
    before = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    again = omega1_local(3, cache_dir=tmp_path)
    assert again.f == first.f
    assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == before


def test_stale_cache_is_ignored(tmp_path):
    store_cached(tmp_path, 2, f2())
    path = tmp_path / "f_2.json"
    data = json.loads(path.read_text())
    data["format_version"] = 0
    path.write_text(json.dumps(data))
    assert load_cached(tmp_path, 2) is None
    store_cached(tmp_path, 2, P("t1", 3).embed(6, [1, 2, 3]))
    assert load_cached(tmp_path, 2) is None
    assert load_cached(tmp_path, 5) is None


def test_deleting_cache_reproduces_files(tmp_path):
    omega1_local(3, cache_dir=tmp_path)
    before = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    for p in tmp_path.iterdir():
        p.unlink()
    omega1_local(3, cache_dir=tmp_path)
    assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == before


# --- GKM ------------------------------------------------------------------------

def test_gkm_on_projective_line():
    g = gkm_graph(1, 2)
    known = LocalClassTable(1, 2)
    known[(2,)] = P("1 + t1 - t2", 2)
    got = gkm_solve(g, known, GrassPoint((1,), 2), True)
    assert got == P("1 + t2 - t1", 2)


def test_gkm_matches_recovery_n2():
    f1 = {1: P("t2 - t1", 2)}
    known = omega1_known_table(2, f1)
    p0 = omega1_base_point(2)
    want = recover_local_class(known, p0, True)
    g = gkm_graph(2, 4)
    assert gkm_solve(g, known, p0, True) == want
    assert gkm_solve(g, known, p0, True, solver="linear") == want


def test_gkm_solvers_agree_n3():
    res = omega1_local(2)
    known = omega1_known_table(3, res.f_table)
    g = gkm_graph(3, 6)
    p0 = omega1_base_point(3)
    assert gkm_solve(g, known, p0, True) == gkm_solve(g, known, p0, True, solver="linear")


def test_gkm_detects_inconsistent_neighbours():
    g = gkm_graph(1, 3)
    known = LocalClassTable(1, 3)
    known[(2,)] = MultiPoly.const(3, 1)
    known[(3,)] = MultiPoly.const(3, 2)
    with pytest.raises(Inconsistent):
        gkm_solve(g, known, GrassPoint((1,), 3), True)
    with pytest.raises(Inconsistent):
        gkm_solve(g, known, GrassPoint((1,), 3), True, solver="linear")


def test_gkm_proportional_labels_are_underdetermined():
    from eqcsm.grassloc import GKMGraph
    p, q, r = (GrassPoint((i,), 3) for i in (1, 2, 3))
    w = diff(3, 2, 1)
    g = GKMGraph(1, 3, [p, q, r], [(p, q, w), (p, r, w)])
    known = LocalClassTable(1, 3)
    known[q] = P("t1", 3)
    known[r] = P("t3", 3)
    with pytest.raises(Underdetermined):
        gkm_solve(g, known, p, True)


# --- cones ----------------------------------------------------------------------

def test_scalar_cone_examples():
    t = MultiPoly.var(1, 1)
    assert scalar_cone_class([0, 1], 2) == t + t * t
    assert scalar_cone_class([0, 4, 2 * (1 - 2)], 3) == P("4*t1 - 2*t1^2 + t1^3", 1)
    for n in range(1, 6):
        assert scalar_cone_class([comb(n, i) for i in range(n)], n) == (t + 1) ** n
    with pytest.raises(ValueError):
        scalar_cone_class([1], 2)


def test_projective_cone_examples():
    ws = [MultiPoly.var(3, i) for i in (1, 2, 3)]
    full = (ws[0] + 1) * (ws[1] + 1) * (ws[2] + 1)
    e0 = ws[0] * ws[1] * ws[2]
    assert projective_cone_class(ConeClassSpec(ws, full - e0)) == full
    assert projective_cone_class(ConeClassSpec(ws, 0)) == e0
    with pytest.raises(ValueError):
        projective_cone_class(ConeClassSpec(ws, e0))


def test_projective_matches_scalar_case():
    t = MultiPoly.var(1, 1)
    a = [0, 4, -2]
    b0 = sum(((t ** i).scale(c) for i, c in enumerate(a)), MultiPoly.zero(1))
    assert projective_cone_class(ConeClassSpec([t, t, t], b0)) == scalar_cone_class(a, 3)


def test_h_reduce_examples():
    w = MultiPoly.var(1, 1)
    assert h_reduce({1: 1}, [w]) == {0: -w}
    ws = [MultiPoly.var(3, i) for i in (1, 2, 3)]
    e1 = ws[0] + ws[1] + ws[2]
    e2 = ws[0] * ws[1] + ws[0] * ws[2] + ws[1] * ws[2]
    e3 = ws[0] * ws[1] * ws[2]
    assert h_reduce({3: 1}, ws) == {0: -e3, 1: -e2, 2: -e1}


@given(st.integers(1, 3), st.integers(0, 6))
def test_h_reduce_is_remainder(n, k):
    # evaluating at h = -w_j kills the relation, so h^k and its reduction agree there
    ws = [MultiPoly.var(n, i) for i in range(1, n + 1)]
    red = h_reduce({k: 1}, ws)
    assert all(d < n for d in red)
    for j in range(n):
        h = -ws[j]
        value = sum((c * h ** d for d, c in red.items()), MultiPoly.zero(n))
        assert value == h ** k


@given(st.integers(1, 4))
def test_h_times_inverse_is_one(n):
    ws = [MultiPoly.var(n, i) for i in range(1, n + 1)]
    nums, sigma_n = h_inverse(ws)
    prod = h_reduce({d + 1: c for d, c in nums.items()}, ws)
    assert prod == {0: sigma_n}


def test_h_substitution_examples():
    t = MultiPoly.var(1, 1)
    assert h_substitution([1]) == [MultiPoly.const(1, 1)]
    assert h_substitution([0, 1]) == [t, MultiPoly.const(1, 1)]


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=5), st.integers(-3, 3), st.integers(-3, 3))
def test_h_substitution_preserves_values(a, x, tv):
    b = h_substitution(a)
    lhs = sum(c * x ** i for i, c in enumerate(a))
    rhs = sum(bj.evaluate([tv]) * (x - tv) ** j for j, bj in enumerate(b))
    assert lhs == rhs
