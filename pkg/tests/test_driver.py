import math
from fractions import Fraction as F

import mpmath
import pytest
from mpmath import mpc, mpf

from nsroots.bench import format_error
from nsroots.driver import (
    RunPolicy,
    Termination,
    acoc,
    acoc_from_iterates,
    admissibility_floor,
    coc,
    coc_from_errors,
    iterate,
)
from nsroots.errors import DomainError, ExactRootReached, InsufficientData
from nsroots.methods import MethodId
from nsroots.numeric import BENCH_PRECISION, Precision
from nsroots.problems import get_problem, shifted_exponential


def test_table1_slss_trace():
    trace = iterate(get_problem("t1"), MethodId.SLSS)
    assert trace.steps == 3
    assert trace.termination is Termination.MAX_ITERS
    got = [format_error(e) for e in trace.errors[1:]]
    # mantissa within one unit of the third digit, exponent exact
    assert [g.split("e")[1] for g in got] == ["-14", "-157", "-1733"]
    for g, want in zip(got, ("0.949", "0.486", "0.314")):
        assert abs(int(g[2:5]) - int(want[2:])) <= 1
    assert (trace.f_evals, trace.fprime_evals) == (9, 3)


def test_linear_terminates_at_root(linear):
    for method in (MethodId.NEWTON, MethodId.SLSS, MethodId.CL):
        trace = iterate(linear, method, x0="5", policy=RunPolicy(max_iters=5), precision=Precision(40))
        assert trace.termination is Termination.AT_ROOT
        assert trace.steps == 1
        assert trace.errors[-1] == 0


def test_pole_start_is_step_error():
    trace = iterate(get_problem("b1"), MethodId.NEWTON, x0="0")
    assert trace.termination is Termination.STEP_ERROR
    assert isinstance(trace.detail, DomainError)
    assert trace.steps == 0


def test_residual_stop():
    trace = iterate(get_problem("t3"), MethodId.NEWTON, policy=RunPolicy(max_iters=50, residual_tol=mpf("1e-30")),
                    precision=Precision(100))
    assert trace.termination is Termination.RESIDUAL
    with mpmath.workdps(100):
        assert abs(get_problem("t3").f(trace.iterates[-1])) < mpf("1e-30")
    # the residual check is not charged to the oracle
    assert trace.total_evals == 2 * trace.steps


def test_divergence():
    trace = iterate(get_problem("t2"), MethodId.NEWTON, x0="2", policy=RunPolicy(max_iters=50), precision=Precision(50))
    assert trace.termination is Termination.DIVERGED
    assert abs(trace.iterates[-1]) > 10**10


def test_complex_start_on_b1():
    trace = iterate(get_problem("b1"), MethodId.SLSS, x0="0.3+1.1j", policy=RunPolicy(max_iters=6), precision=Precision(60))
    with mpmath.workdps(60):
        assert abs(trace.iterates[-1] - mpc(0, 1)) < mpf(10) ** -40


@pytest.mark.parametrize("method", list(MethodId), ids=str)
def test_eval_count_invariant(method):
    trace = iterate(get_problem("t3"), method, policy=RunPolicy(max_iters=2), precision=Precision(300))
    assert trace.steps == 2
    assert trace.total_evals == method.evals * trace.steps


def test_run_policy_validation():
    with pytest.raises(ValueError):
        RunPolicy(max_iters=0)
    with pytest.raises(ValueError):
        RunPolicy(divergence_bound=0)


def test_coc_examples():
    with mpmath.workdps(50):
        assert coc_from_errors([mpf("1e-1"), mpf("1e-2"), mpf("1e-4")], 0) == pytest.approx(2.0)
        assert coc_from_errors([mpf("1e-1"), mpf("1e-8"), mpf("1e-64")], 0) == pytest.approx(8.0)
        with pytest.raises(InsufficientData):
            coc_from_errors([mpf("1e-1"), mpf("1e-2")], 0)
        with pytest.raises(ExactRootReached):
            coc_from_errors([mpf("1e-1"), mpf("1e-2"), 0], 0)


def test_coc_uses_last_window():
    errs = [mpf(10) ** -k for k in (1, 3, 9, 27)]
    with mpmath.workdps(50):
        assert coc_from_errors(errs, 0) == pytest.approx(3.0)
        # shifting the index does not matter
        assert coc_from_errors([mpf(1)] + errs, 0) == pytest.approx(3.0)


def test_admissibility_floor():
    with BENCH_PRECISION.context():
        assert admissibility_floor(1800) == mpf(10) ** -1750
    with mpmath.workdps(40):
        assert admissibility_floor(40) == mpf(10) ** -30


def _acoc_oracle(xs):
    d = [xs[k + 1] - xs[k] for k in range(3)]
    return math.log(abs(d[2] / d[1])) / math.log(abs(d[1] / d[0]))


def test_acoc_example_against_rational_oracle():
    xs = [F(1, 10), F(1, 100), F(1, 10**4), F(1, 10**8)]
    expected = _acoc_oracle(xs)
    assert expected == pytest.approx(2.081852, abs=1e-6)
    with mpmath.workdps(50):
        got = acoc_from_iterates([mpf(x.numerator) / x.denominator for x in xs])
    assert float(got) == pytest.approx(expected, rel=1e-12)


def test_acoc_constant_sequence():
    with pytest.raises(InsufficientData):
        acoc_from_iterates([mpf(1)] * 4)
    with pytest.raises(InsufficientData):
        acoc_from_iterates([mpf(1), mpf(2), mpf(3)])


def test_t3_slss_orders():
    trace = iterate(get_problem("t3"), MethodId.SLSS)
    assert float(coc(trace)) == pytest.approx(9.0, abs=0.01)
    # without a probe iterate the root-free estimate lags slightly
    assert float(acoc(trace)) == pytest.approx(9.0, abs=0.1)


def test_coc_with_explicit_root():
    problem = shifted_exponential()
    trace = iterate(problem, MethodId.TWO_POINT4, policy=RunPolicy(max_iters=4))
    assert float(coc(trace, root="0.2")) == pytest.approx(4.0, abs=0.05)


@pytest.mark.parametrize("pid", ["t3", "t4"])
def test_newton_is_quadratic_when_c2_nonzero(pid):
    trace = iterate(get_problem(pid), MethodId.NEWTON, policy=RunPolicy(max_iters=9))
    assert 1.9 <= float(coc(trace)) <= 2.1
