import random
from fractions import Fraction
from itertools import chain, islice

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modrecon.arith import PrimeStream
from modrecon.modframe import (
    BadPrimeType,
    FaultPlan,
    ModularJob,
    PrimeRejected,
    RoundsExhausted,
    RoundState,
    RunConfig,
    arnold_ideal,
    assign_round_weights,
    basis_from_strings,
    delete_by_majority_vote,
    fingerprint_hash,
    groebner_job,
    lift_basis,
    linear_solve_job,
    p_test,
    run_job,
    solution_from_basis,
    type5_sextic_job,
)
from modrecon.poly import GroebnerBasis, MonomialOrdering, Ring, buchberger, clear_denominators

XY = Ring(("x", "y"), MonomialOrdering("lex"))
X1 = Ring(("x",), MonomialOrdering("lex"))


def B(ring, p, *polys):
    return basis_from_strings(ring, polys, p)


# -- vote ------------------------------------------------------------------------------------


def test_vote_strict_majority():
    good = [(p, B(XY, p, "x - y", "y^2 - 1"), 1) for p in (7, 11, 13, 17)]
    bad = (19, B(XY, 19, "x - 1", "y - 1"), 1)
    out = delete_by_majority_vote(RoundState(accepted=good + [bad]))
    assert out.primes == [7, 11, 13, 17]
    assert out.rejected == [(19, BadPrimeType.TYPE4)]


def test_vote_tie_goes_to_smaller_fingerprint():
    a = [(p, B(XY, p, "x - y", "y^2 - 1"), 1) for p in (7, 11, 13)]
    b = [(p, B(XY, p, "x - 1", "y - 1"), 3) for p in (17,)]
    out = delete_by_majority_vote(RoundState(accepted=a + b))
    fa, fb = a[0][1].fingerprint(), b[0][1].fingerprint()
    winner = min(fa, fb)
    assert all(G.fingerprint() == winner for _, G, _ in out.accepted)
    assert len(out.rejected) == (3 if winner == fb else 1)


def test_vote_keeps_type5_prime():
    plan, _ = type5_sextic_job()
    acc = [(p, plan.compute(p), 1) for p in (7, 11, 13, 5)]
    assert len({G.fingerprint() for _, G, _ in acc}) == 1
    out = delete_by_majority_vote(RoundState(accepted=acc))
    assert out.primes == [7, 11, 13, 5] and out.rejected == []


def test_vote_needs_input():
    with pytest.raises(ValueError):
        delete_by_majority_vote(RoundState())


@settings(max_examples=200)
@given(st.lists(st.integers(1, 20), min_size=1, max_size=8), st.lists(st.tuples(st.integers(0, 2), st.integers(1, 20)), max_size=8))
def test_vote_soundness(good_w, bad):
    bases = [B(XY, 101, "x - y", "y^2 - 1"), B(XY, 101, "x - 1", "y - 1"), B(XY, 101, "x^2", "y"), B(XY, 101, "1")]
    acc = [(1000 + i, bases[0], w) for i, w in enumerate(good_w)]
    acc += [(2000 + i, bases[1 + k], w) for i, (k, w) in enumerate(bad)]
    if sum(good_w) <= sum(w for _, w in bad):
        return
    out = delete_by_majority_vote(RoundState(accepted=acc))
    assert sorted(out.primes) == [1000 + i for i in range(len(good_w))]
    assert {k for _, k in out.rejected} <= {BadPrimeType.TYPE4}


# -- weights ---------------------------------------------------------------------------------


@pytest.mark.parametrize("total, k, w", [(0, 4, 1), (4, 4, 2), (7, 3, 3)])
def test_round_weights(total, k, w):
    state = RoundState(accepted=[(10**6 + 3, None, total)] if total else [])
    out = assign_round_weights(state, list(range(2, 2 + k)))
    assert set(out.pending.values()) == {w}
    assert w * k > total


def test_round_weights_reject_reused_primes():
    state = RoundState(accepted=[(7, None, 1)], rejected=[(3, BadPrimeType.TYPE1)])
    for p in (7, 3):
        with pytest.raises(ValueError):
            assign_round_weights(state, [p, 11])


@given(st.lists(st.integers(1, 10**6), max_size=10), st.integers(1, 12))
def test_weight_escalation(old, k):
    state = RoundState(accepted=[(10**7 + i, None, w) for i, w in enumerate(old)])
    out = assign_round_weights(state, list(range(2, 2 + k)))
    assert sum(out.pending.values()) > state.total_weight


# -- lifting ---------------------------------------------------------------------------------


def test_lift_basis_tolerates_a_corrupted_constant():
    bases = [(5, B(X1, 5, "x - 13/12")), (7, B(X1, 7, "x - 2")), (11, B(X1, 11, "x - 13/12")), (101, B(X1, 101, "x - 13/12"))]
    assert bases[1][1] != B(X1, 7, "x - 13/12")
    G = lift_basis(bases)
    assert list(G) == [X1.parse("x - 13/12")]


def test_lift_basis_single_prime_unit_coefficients():
    G = lift_basis([(101, B(XY, 101, "x + y", "y^2 + 1"))])
    assert G == B(XY, 0, "x + y", "y^2 + 1")


def test_lift_basis_missing_monomial_is_zero():
    # the x*y coefficient 11 vanishes mod 11
    primes = [11, 13, 17, 19, 23]
    bases = [(p, B(XY, p, "x^2 + 11*x*y + 1/3")) for p in primes]
    assert 2 in {len(G[0].terms) for _, G in bases}
    assert lift_basis(bases) == B(XY, 0, "x^2 + 11*x*y + 1/3")


def test_lift_basis_failure_and_errors():
    # 6 mod 35 has no short preimage
    assert lift_basis([(5, B(X1, 5, "x + 6")), (7, B(X1, 7, "x + 6"))]) is None
    with pytest.raises(ValueError):
        lift_basis([(5, B(XY, 5, "x")), (7, B(XY, 7, "y"))])
    with pytest.raises(ValueError):
        lift_basis([(5, B(XY, 5, "x")), (5, B(XY, 5, "x"))])


def test_type5_fixture_lift_threshold():
    plan, _ = type5_sextic_job()
    target = B(Ring(("x", "y", "z"), MonomialOrdering("degrevlex")), 0, "y", "x^2 + 2*x*z - 24*z^2")
    good_primes = [7, 11, 13, 101, 103]
    prod = 1
    for i, p in enumerate(good_primes):
        prod *= p
        bases = [(q, plan.compute(q)) for q in [5] + good_primes[: i + 1]]
        G = lift_basis(bases)
        if prod > 2885:
            assert G == target
    assert prod > 2885


# -- pTest -----------------------------------------------------------------------------------


def test_p_test_examples():
    plan, _ = type5_sextic_job()
    job = plan.as_job()
    ring = job.ring
    good = B(ring, 0, "y", "x^2 + 2*x*z - 24*z^2")
    off = B(ring, 0, "y", "x^2 + 2*x*z - 23*z^2")
    rng = random.Random(1)
    assert p_test(job, good, set(), job.generators, rng)
    assert not p_test(job, off, set(), job.generators, rng)


def test_p_test_with_corrupted_fresh_prime():
    plan, _ = type5_sextic_job()
    inner = plan.as_job()

    def compute(p):
        G = inner.compute(p)
        return B(inner.ring, p, "y", "x^2 - z^2") if p > 1000 else G

    job = ModularJob(compute, inner.verify, inner.ring, inner.generators)
    good = B(inner.ring, 0, "y", "x^2 + 2*x*z - 24*z^2")
    assert not p_test(job, good, set(), job.generators, random.Random(0))


def test_p_test_avoids_used_and_rejected_primes():
    seen = []

    def compute(p):
        seen.append(p)
        if len(seen) == 1:
            raise PrimeRejected(BadPrimeType.TYPE2)
        return B(X1, p, "x - 1/2")

    job = ModularJob(compute, lambda G: True, X1)
    used = set()
    assert p_test(job, B(X1, 0, "x - 1/2"), used, [], random.Random(3))
    assert len(seen) == 2 and seen[0] in used


# -- run_job ----------------------------------------------------------------------------------


def test_run_job_small_ideal():
    gens = [XY.parse("x^2 - 1"), XY.parse("x*y - 1")]
    G, report = run_job(groebner_job(gens), RunConfig(seed=5))
    assert G == buchberger(gens)
    assert report.rounds == 1
    assert all(r.status == "good" for r in report.records)
    assert "S-polynomials" in report.verify_note


def test_run_job_arnold_unlucky_primes_first():
    ring, gens = arnold_ideal()
    unlucky = [3, 5, 11, 809, 65179]
    cfg = RunConfig(batch=5, primes=chain(unlucky, PrimeStream.random_primes(seed=2)))
    G, report = run_job(groebner_job(gens, ring), cfg)
    status = {r.prime: r.status for r in report.records}
    assert {status[p] for p in unlucky} == {"type-4"}
    assert [clear_denominators(g).LC for g in G][-1] == 264627


def test_run_job_type5_fixture():
    plan, _ = type5_sextic_job()
    primes = PrimeStream(start=5)
    G, report = run_job(plan.as_job(), RunConfig(batch=4, primes=primes))
    assert G == B(plan.wrapped.ring, 0, "y", "x^2 + 2*x*z - 24*z^2")
    status = {r.prime: r.status for r in report.records}
    assert status[5] == "type-5-suspected"
    assert 5 in report.bad_factors
    assert report.good_product > 2885


def test_linear_solve_examples():
    for A, b, x in [
        ([[2, 1], [1, 1]], [1, 0], [1, -1]),
        ([[3, 0], [0, 1]], [1, 0], [Fraction(1, 3), 0]),
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [Fraction(-7, 5), 4, 0], [Fraction(-7, 5), 4, 0]),
    ]:
        G, report = run_job(linear_solve_job(A, b), RunConfig(primes=PrimeStream()))
        assert solution_from_basis(G) == x
        status = {r.prime: r.status for r in report.records}
        if A[0][0] == 3:
            assert status[3] == "type-2"
        elif A[0][0] == 2:
            assert "type-2" not in status.values()
        else:
            assert status[5] == "type-1"


def test_linear_solve_rejects_bad_shape():
    with pytest.raises(ValueError):
        linear_solve_job([[1, 2]], [1])


def test_verification_gate():
    job = groebner_job([XY.parse("x^2 - 1")])
    job.verify = lambda G: False
    with pytest.raises(RoundsExhausted) as info:
        run_job(job, RunConfig(max_rounds=3))
    assert info.value.report.rounds == 3
    assert sum("verification over Q failed" in e for e in info.value.report.events) == 3


def test_finite_prime_list_exhausts_cleanly():
    job = linear_solve_job([[1]], [Fraction(10**30, 7)])
    with pytest.raises(RoundsExhausted) as info:
        run_job(job, RunConfig(batch=2, primes=[11, 13, 17, 19, 23]))
    assert "prime stream exhausted" in info.value.report.events[-1]


def test_empty_ideal_job():
    job = groebner_job([XY.zero()], XY)
    G, _ = run_job(job, RunConfig())
    assert list(G) == []


def test_run_job_deterministic_across_thread_counts():
    ring, gens = arnold_ideal()
    job = groebner_job(gens, ring)
    outs = [run_job(job, RunConfig(seed=11, threads=t)) for t in (1, 4)]
    assert outs[0][0] == outs[1][0]
    assert outs[0][1].to_dict() == outs[1][1].to_dict()


def test_threads_env_var(monkeypatch):
    monkeypatch.setenv("MODRECON_THREADS", "3")
    assert RunConfig().worker_count() == 3
    monkeypatch.setenv("MODRECON_THREADS", "0")
    assert RunConfig().worker_count() >= 1
    assert RunConfig(threads=2).worker_count() == 2


def test_report_text_format():
    _, report = run_job(linear_solve_job([[3, 0], [0, 1]], [1, 0]), RunConfig(primes=PrimeStream()))
    lines = report.to_text().splitlines()
    assert lines[0].startswith("p 2 weight 1 status good fingerprint ")
    assert lines[1] == "p 3 weight 1 status type-2 fingerprint -"
    assert any(line.startswith("rounds ") for line in lines)
    assert len(fingerprint_hash(((1, 0),))) == 10


# -- fault tolerance -----------------------------------------------------------------------------


def _random_fault(rng, ring_p, p, n):
    kind = rng.randrange(4)
    if kind == 0:
        return rng.choice([BadPrimeType.TYPE1, BadPrimeType.TYPE2, BadPrimeType.TYPE3])
    if kind == 1:  # wrong values, right fingerprint
        return GroebnerBasis.from_polys([ring_p.gen(i) - rng.randrange(p) for i in range(n)], ring_p)
    if kind == 2:  # wrong fingerprint
        return GroebnerBasis.from_polys([ring_p.one()], ring_p)
    return GroebnerBasis.from_polys([ring_p.gen(0) ** 2 - 1] + [ring_p.gen(i) for i in range(1, n)], ring_p)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32))
def test_random_fault_plans_do_not_change_the_answer(seed):
    rng = random.Random(seed)
    A = [[Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(2)] for _ in range(2)]
    A[0][0] += 20
    A[1][1] += 20
    b = [Fraction(rng.randint(-99, 99), rng.randint(1, 9)) for _ in range(2)]
    base = linear_solve_job(A, b)
    primes = list(islice(PrimeStream(start=1000), 80))
    clean, _ = run_job(base, RunConfig(primes=primes, seed=seed))
    bad = rng.sample(primes[:8], rng.randint(1, 6))
    plan = FaultPlan(base, {p: _random_fault(rng, base.ring.with_char(p), p, 2) for p in bad})
    runs = [run_job(plan.as_job(), RunConfig(primes=primes, seed=seed, max_rounds=20)) for _ in range(2)]
    assert runs[0][0] == clean
    assert runs[0][1].to_dict() == runs[1][1].to_dict()
    status = {r.prime: r.status for r in runs[0][1].records}
    assert all(status[p] != "good" for p in bad if p in status)
