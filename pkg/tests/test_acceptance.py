"""The twelve acceptance criteria, each at its stated tolerance and time budget."""

import math
import time
from itertools import permutations

import numpy as np
import pytest

from maxrep.boundary import (
    chart_indices,
    contraction_exponent,
    fixed_point_chart,
    qi_scan,
    rectifiable_length,
    sample_limit_curve,
    verify_maximality,
    verify_monotonicity,
    verify_transversality,
)
from maxrep.maslov import (
    complex_structure_from_triple,
    maslov_index,
    maslov_via_sign,
    permutation_sign,
)
from maxrep.representations import (
    CentralizerElement,
    algebra_span,
    amalgam_z_rep,
    direct_sum,
    irreducible_rep,
)
from maxrep.surface import double_torus, one_holed_torus
from maxrep.symplectic import (
    LagrangianFrame,
    is_transverse,
    random_rational_lagrangian,
    random_rational_symplectic,
    random_symplectic,
)
from maxrep.toledo import toledo

MAXIMAL = ("polydisk", "irreducible", "rho_z")


def pairwise_transverse(ls):
    return all(is_transverse(a, b)[0] for i, a in enumerate(ls) for b in ls[i + 1:])


@pytest.fixture(scope="module")
def rho_z_sample(reps, h):
    start = time.perf_counter()
    s = sample_limit_curve(reps["rho_z"], h, 6)
    return s, time.perf_counter() - start


def test_criterion_01_cocycle_alternation_invariance(acceptance):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    bad = checked = 0
    for n in (1, 2, 3):
        for _ in range(1000):
            l = [random_rational_lagrangian(n, rng) for _ in range(4)]
            b = maslov_index
            bad += b(l[1], l[2], l[3]) - b(l[0], l[2], l[3]) + b(l[0], l[1], l[3]) - b(l[0], l[1], l[2]) != 0
            v = b(l[0], l[1], l[2])
            bad += any(b(*(l[i] for i in p)) != permutation_sign(p) * v for p in permutations(range(3)))
            g = random_rational_symplectic(n, rng, size=2)
            bad += b(*(x.transform(g) for x in l[:3])) != v
            checked += 1
    elapsed = time.perf_counter() - start
    acceptance(1, bad == 0 and elapsed < 30,
               f"{checked} exact quadruples (n=1,2,3), {bad} failures, {elapsed:.1f}s")


def test_criterion_02_cross_oracle(acceptance):
    rng = np.random.default_rng(2)
    found = bad = 0
    while found < 1000:
        n = 1 + found % 3
        tri = [random_rational_lagrangian(n, rng) for _ in range(3)]
        if not (is_transverse(tri[0], tri[2])[0] and is_transverse(tri[1], tri[2])[0]):
            continue
        found += 1
        bad += maslov_via_sign(*tri) != maslov_index(*tri)
    acceptance(2, bad == 0, f"{found} transverse triples, {bad} discrepancies")


def test_criterion_03_orbits_and_parity(acceptance):
    rng = np.random.default_rng(3)
    values = {}
    found = extreme_not_transverse = 0
    while found < 1000:
        tri = [random_rational_lagrangian(2, rng) for _ in range(3)]
        if not pairwise_transverse(tri):
            continue
        found += 1
        v = maslov_index(*tri)
        values[v] = values.get(v, 0) + 1
    # extreme values force transversality: scan degenerate triples too
    for _ in range(1000):
        tri = [random_rational_lagrangian(2, rng) for _ in range(3)]
        if abs(maslov_index(*tri)) == 2 and not pairwise_transverse(tri):
            extreme_not_transverse += 1
    ok = set(values) == {-2, 0, 2} and extreme_not_transverse == 0
    acceptance(3, ok, f"values {dict(sorted(values.items()))}, |beta|=n without transversality: {extreme_not_transverse}")


def random_maximal_triple(n, rng):
    a = rng.normal(size=(n, n))
    s = a @ a.T + 0.2 * np.eye(n)
    base = (LagrangianFrame.coordinate(n, "e", exact=False), LagrangianFrame.graph(s),
            LagrangianFrame.coordinate(n, "f", exact=False))
    g = random_symplectic(n, rng, scale=0.4)
    return [l.transform(g).orthonormal() for l in base]


def test_criterion_04_complex_structure(acceptance):
    rng = np.random.default_rng(4)
    worst_sq = worst_eq = 0.0
    min_eig = np.inf
    for k in range(500):
        n = 1 + k % 3
        tri = random_maximal_triple(n, rng)
        j = complex_structure_from_triple(*tri)
        worst_sq = max(worst_sq, float(np.max(np.abs(j.J @ j.J + np.eye(2 * n)))))
        min_eig = min(min_eig, float(np.min(np.linalg.eigvalsh(j.gram))))
        g = random_symplectic(n, rng, scale=0.4)
        jg = complex_structure_from_triple(*(l.transform(g) for l in tri))
        worst_eq = max(worst_eq, float(np.max(np.abs(jg.J - g @ j.J @ np.linalg.inv(g)))))
    ok = worst_sq < 1e-9 and min_eig > 1e-9 and worst_eq < 1e-8
    acceptance(4, ok, f"500 triples: |J^2+I| {worst_sq:.1e}, min eig q_J {min_eig:.2e}, equivariance {worst_eq:.1e}")


def test_criterion_05_and_06_toledo(acceptance, reps, pair, rng):
    h1, h2 = pair
    start = time.perf_counter()
    results = {name: toledo(reps[name]) for name in ("trivial", "h", "polydisk", "irreducible", "degenerate")}
    zs = [CentralizerElement.rotation(phi) for phi in np.linspace(0.0, 2 * math.pi, 8, endpoint=False)]
    z_results = [toledo(amalgam_z_rep(h1, h2, z)) for z in zs]
    elapsed = time.perf_counter() - start
    expect = {"trivial": 0, "h": 2, "polydisk": 4, "irreducible": 4, "degenerate": 0}
    ok = all(abs(results[k].T) == v for k, v in expect.items())
    ok &= results["trivial"].T == 0 and results["trivial"].winding == 0
    ok &= all(abs(r.T) == 4 for r in z_results) and len({r.T for r in z_results}) == 1
    every = list(results.values()) + z_results
    ok &= all(abs(r.winding - r.T) < 1e-3 for r in every)
    ok &= elapsed < 120
    values = {k: r.T for k, r in results.items()}
    acceptance(5, ok, f"T {values}, rho_z over 8 z: {[r.T for r in z_results]}, "
                      f"max |winding - T| {max(abs(r.winding - r.T) for r in every):.1e}, {elapsed:.1f}s")

    # Milnor-Wood over everything computed here plus conjugates and block sums
    extra = [toledo(reps[name].conjugate(random_symplectic(2, rng, scale=0.3))) for name in MAXIMAL]
    extra.append(toledo(direct_sum(reps["h"], reps["rho_z"])))
    extra.append(toledo(direct_sum(reps["degenerate"], reps["irreducible"])))
    every += extra
    over = [r for r in every if abs(r.T) > r.bound]
    acceptance(6, not over, f"{len(every)} representations, max |T|/bound "
                            f"{max(abs(r.T) / r.bound for r in every):.2f}, violations {len(over)}")


def test_criterion_07_central_identity(acceptance, rho_z_sample):
    sample, sample_time = rho_z_sample
    start = time.perf_counter()
    rep = verify_maximality(sample, trials=20000, seed=0)
    elapsed = sample_time + time.perf_counter() - start
    ok = len(sample) >= 100 and math.comb(len(sample), 3) >= 160_000 and rep.checked == 20000
    ok &= rep.violations == 0 and elapsed < 120
    acceptance(7, ok, f"{len(sample)} samples, {rep.checked} triples (seed 0), "
                      f"{rep.violations} violations, {elapsed:.1f}s")


def test_criterion_08_transversality_monotonicity(acceptance, rho_z_sample, reps, h):
    sample, _ = rho_z_sample
    tr = verify_transversality(sample)
    mo = verify_monotonicity(sample, trials=20000, seed=0)
    deg = verify_maximality(sample_limit_curve(reps["degenerate"], h, 6), trials=20000, seed=0)
    ok = tr.ok and mo.ok and deg.violations > 0
    acceptance(8, ok, f"transversality {tr.violations}/{tr.checked}, monotonicity {mo.violations}/{mo.checked}, "
                      f"degenerate maximality violations {deg.violations}")


def test_criterion_09_rectifiability(acceptance, rho_z_sample, reps, h):
    long, _ = rho_z_sample
    short = sample_limit_curve(reps["rho_z"], h, 4)
    # chart from the repelling to the attracting point of a1, clipped at two
    # interior words of the coarse sample so the bound is the same for both
    inner = chart_indices(short, *fixed_point_chart(short, (1,)))
    words = (short.words[inner[1]], short.words[inner[-2]])
    res = []
    for s in (short, long):
        clip = tuple(s.index_of(w) for w in words)
        res.append(rectifiable_length(s, fixed_point_chart(s, (1,)), clip=clip))
    ok = all(r.within_bound for r in res)
    ok &= res[1].length >= res[0].length - 1e-12 and abs(res[1].bound - res[0].bound) <= 1e-9 * res[0].bound
    acceptance(9, ok, f"lengths L=4 {res[0].length:.6f} ({res[0].samples} pts), L=6 {res[1].length:.6f} "
                      f"({res[1].samples} pts), trace bound {res[1].bound:.6f}")


def test_criterion_10_quasi_isometry(acceptance, reps):
    start = time.perf_counter()
    r = qi_scan(reps["rho_z"], 8)
    elapsed = time.perf_counter() - start
    d = qi_scan(reps["degenerate"], 8)
    ok = r.slope > 0.1 and r.minima_nondecreasing(3) and np.all(d.minima[1:] == 0) and elapsed < 180
    acceptance(10, ok, f"slope A {r.slope:.3f}, minima {np.round(r.minima, 3).tolist()}, "
                       f"{int(r.counts.sum())} words in {elapsed:.1f}s, degenerate minima ell>=2 max {d.minima[1:].max():.1e}")


def test_criterion_11_contraction(acceptance, reps, h):
    rows = []
    ok = True
    for name in MAXIMAL:
        sample = sample_limit_curve(reps[name], h, 3)
        for word in [(1,), (2,), (1, 2)]:
            c = contraction_exponent(reps[name], h, word, sample=sample)
            ok &= c.meets_prediction and c.monotone
            rows.append(c.measured - c.predicted)
    acceptance(11, ok, f"{len(rows)} (rep, word) pairs, measured - predicted in [{min(rows):.4f}, {max(rows):.4f}], "
                       "norm decay monotone")


def test_criterion_12_structural_gates(acceptance, pair, reps):
    h1, h2 = pair
    a, b, _, tr = one_holed_torus(3.0, 3.0, math.pi / 2)
    residual = double_torus(a, b).relator_residual()
    w = np.sort(np.linalg.eigvals(irreducible_rep(np.diag([2.0, 0.5]), 2)).real)
    spec_err = float(np.max(np.abs(w - np.array([1 / 8, 1 / 2, 2, 8]))))
    span_z = algebra_span(reps["rho_z"], 4)
    span_id = algebra_span(amalgam_z_rep(h1, h2, CentralizerElement(1, 0, 0, 1)), 4)
    ok = residual < 1e-9 and tr < -2 and spec_err < 1e-9 and span_z == 16 and span_id <= 8
    acceptance(12, ok, f"relator residual {residual:.1e}, tr[A,B] {tr:.3f}, spectrum error {spec_err:.1e}, "
                       f"span rho_z {span_z}, span z=Id {span_id}")
