"""The acceptance battery: eight criteria, each a list of named checks with a time budget.

Each criterion function returns a :class:`CriterionResult`; a criterion
passes only if every check passes and it finishes within its budget.
Tolerances are pinned here and are not parameters.
"""

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .alignment import build_subspace_pair, lemma1_matrix, numeric_rank, random_generators
from .channel import random_extension, sample_channel
from .delay import DelaySchedule, INTERFERENCE, DESIRED, simulate, throughput
from .exceptions import RankFailureError
from .link import general_builder, perfect_builder, rate_curve
from .oracles import vertex_max
from .outerbound import DofRegionSpec, region_constraints, solve_lp, total_dof_bound
from .relay import compose_two_hop, relay_dof, sample_topology
from .schemes import (alignment_residual, build_2xm_reciprocal, build_general, build_mx2,
                      compute_zero_forcing, general_dof, general_extension_length, verify_plan)

RANK_TOL = 1e-9
MX2_RESIDUAL_TOL = 1e-12
CROSS_GAIN_TOL = 1e-9
LEMMA2_SHIFT_TOL = 1e-12
SLOPE_REL_TOL = 0.03
GAP_TOL_BITS = 0.1

GENERAL_CASES = ((2, 2, 1), (2, 2, 2), (2, 2, 3), (2, 3, 1), (2, 3, 2),
                 (3, 2, 1), (3, 2, 2), (3, 3, 1))
DELAY_CONFIGS = ((0, 1, 0, 2), (3, 4, 6, 8), (0, 4, 3, 5), (9, 1, 3, 2), (6, 7, 12, 11))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    checks: tuple
    elapsed: float
    budget: float

    @property
    def within_budget(self):
        return self.elapsed < self.budget

    @property
    def passed(self):
        return self.within_budget and all(c.passed for c in self.checks)

    def failed_checks(self):
        out = [c for c in self.checks if not c.passed]
        if not self.within_budget:
            out.append(Check("runtime", False, f"{self.elapsed:.2f}s >= {self.budget:g}s"))
        return out


def _timed(number, title, budget, body):
    t0 = time.perf_counter()
    checks = tuple(body())
    return CriterionResult(number, title, checks, time.perf_counter() - t0, budget)


def criterion_outerbound(seed=0):
    def body():
        wrong = []
        for M in range(1, 7):
            for N in range(1, 7):
                sol = solve_lp(region_constraints(DofRegionSpec(M, N)))
                if not (sol.exact and sol.value == Fraction(M * N, M + N - 1)):
                    wrong.append((M, N, sol.value))
        yield Check("sum-DoF LP equals MN/(M+N-1) for M,N <= 6", not wrong, f"mismatches {wrong}")
        lp = region_constraints(DofRegionSpec(3, 3, null_mask={(1, 1), (2, 2), (3, 3)}))
        sol = solve_lp(lp)
        oracle, _ = vertex_max(lp)
        yield Check("3x3 null-diagonal LP equals vertex enumeration", sol.exact and sol.value == oracle,
                    f"simplex {sol.value}, oracle {oracle}")
        yield Check("3x3 null-diagonal value is 3/2", sol.value == Fraction(3, 2), f"{sol.value}")
    return _timed(1, "outerbound values", 1.0, body)


def criterion_perfect(seed=0, seeds=100):
    def body():
        for M in (2, 3, 4, 5):
            worst, full, dof_ok = 0.0, 0, True
            for s in range(seed, seed + seeds):
                ext = random_extension(M, 2, M + 1, s)
                plan = build_mx2(ext, s)
                worst = max(worst, alignment_residual(plan, ext))
                try:
                    plan = compute_zero_forcing(plan, ext, RANK_TOL)
                except RankFailureError:
                    continue
                rep = verify_plan(plan, ext, RANK_TOL)
                full += all(r == plan.mu for r in rep.lambda_rank.values())
                dof_ok &= rep.achieved_dof == Fraction(2 * M, M + 1)
            yield Check(f"M={M}: alignment residual < {MX2_RESIDUAL_TOL:g}",
                        worst < MX2_RESIDUAL_TOL, f"max {worst:.2e}")
            yield Check(f"M={M}: Lambda full rank in >= 99/100 seeds",
                        full * 100 >= 99 * seeds, f"{full}/{seeds}")
            yield Check(f"M={M}: achieved dof = {Fraction(2 * M, M + 1)}", dof_ok)
    return _timed(2, "perfect Mx2 alignment", 10.0, body)


def criterion_reciprocity(seed=0, seeds=100):
    def body():
        for M in (2, 3, 4):
            passed, worst, same = 0, 0.0, True
            for s in range(seed, seed + seeds):
                ext = random_extension(M, 2, M + 1, s)
                try:
                    primal = compute_zero_forcing(build_mx2(ext, s), ext, RANK_TOL)
                    dual = build_2xm_reciprocal(primal, ext)
                except (RankFailureError, RuntimeError):
                    continue
                rep = verify_plan(dual, ext.transpose(), RANK_TOL)
                worst = max(worst, rep.max_cross_gain)
                passed += rep.passed and rep.max_cross_gain < CROSS_GAIN_TOL
                same &= dual.total_streams == primal.total_streams and dual.mu == primal.mu
            yield Check(f"M={M}: dual 2x{M} plan verifies in all seeds", passed == seeds,
                        f"{passed}/{seeds}, max cross gain {worst:.2e}")
            yield Check(f"M={M}: stream totals and mu preserved", same)
    return _timed(3, "reciprocity", float("inf"), body)


def criterion_general(seed=0, seeds=50):
    def body():
        dofs = {}
        for M, N, n in GENERAL_CASES:
            G = (M - 1) * (N - 1)
            mu = general_extension_length(M, N, n)
            ok, dim_ok, detail = 0, True, ""
            for s in range(seed, seed + seeds):
                ext = random_extension(M, N, mu, s)
                try:
                    plan = compute_zero_forcing(build_general(M, N, n, ext, s), ext, RANK_TOL)
                except RankFailureError as exc:
                    detail = str(exc)
                    continue
                rep = verify_plan(plan, ext, RANK_TOL)
                ok += rep.passed
                dim_ok &= all(d == (N - 1) * (n + 1) ** G for d in rep.interference_dim.values())
                if not rep.passed:
                    detail = "; ".join(rep.failures)
                dofs[(M, N, n)] = rep.achieved_dof
            yield Check(f"{M}x{N} n={n}: verify_plan passes", ok == seeds, f"{ok}/{seeds} {detail}")
            yield Check(f"{M}x{N} n={n}: interference dimension (N-1)(n+1)^G", dim_ok)
            yield Check(f"{M}x{N} n={n}: dof = {general_dof(M, N, n)}",
                        dofs.get((M, N, n)) == general_dof(M, N, n), f"{dofs.get((M, N, n))}")
        for M, N in {(M, N) for M, N, _ in GENERAL_CASES}:
            seq = [dofs.get((M, N, n)) for n in sorted(n for a, b, n in GENERAL_CASES if (a, b) == (M, N))]
            if len(seq) > 1:
                inc = all(a is not None and b is not None and a < b for a, b in zip(seq, seq[1:]))
                yield Check(f"{M}x{N}: dof strictly increasing in n, below {total_dof_bound(M, N)}",
                            inc and seq[-1] < total_dof_bound(M, N), f"{seq}")
    return _timed(4, "general partial alignment", 60.0, body)


def slope_builders():
    out = [perfect_builder(M, 2) for M in (2, 3, 4, 5)]
    out += [general_builder(M, N, n) for M, N, n in GENERAL_CASES]
    return out


def criterion_slope(seed=0, trials=200):
    def body():
        for b in slope_builders():
            perfect = b.label.startswith("perfect")
            rho_db = [40.0, 50.0, 60.0, 70.0] if perfect else [40.0, 60.0]
            proc = sample_channel(b.M, b.N, trials * b.mu, seed)
            curve = rate_curve(b, proc, rho_db, trials, seed)
            slope = curve.slope(0, rho_db.index(60.0))
            err = slope / float(b.dof) - 1
            yield Check(f"{b.label}: slope 40-60 dB within 3% of {b.dof}",
                        abs(err) <= SLOPE_REL_TOL and curve.rank_failures == 0,
                        f"slope {slope:.4f} ({err:+.2%}), rank failures {curve.rank_failures}")
            if perfect:
                var = curve.gap_variation(b.dof)
                yield Check(f"{b.label}: O(1) gap variation 40-70 dB < {GAP_TOL_BITS} bit",
                            var < GAP_TOL_BITS, f"{var:.3f} bit")
    return _timed(5, "DoF slope", 120.0, body)


def criterion_monomial_pairs(seed=0, lemma1_seeds=1000, lemma2_seeds=100):
    def body():
        for M in range(1, 7):
            full = sum(numeric_rank(lemma1_matrix(M, seed=s), RANK_TOL)[0] == M
                       for s in range(seed, seed + lemma1_seeds))
            yield Check(f"monomial matrix M={M}: full rank >= 999/1000", full * 1000 >= 999 * lemma1_seeds,
                        f"{full}/{lemma1_seeds}")
        for G in (1, 2, 3):
            for n in (1, 2):
                mu = (n + 1) ** G + 1
                shift_err, rank_ok = 0.0, 0
                for s in range(seed, seed + lemma2_seeds):
                    T, w = random_generators(G, mu, s)
                    pair = build_subspace_pair(T, w, n)
                    V, Vp = pair.raw_V(), pair.raw_Vp()
                    for i in range(G):
                        for c in range(V.shape[1]):
                            ref = Vp[:, pair.shifted_column(c, i)]
                            err = np.max(np.abs(T[i] * V[:, c] - ref)) / np.max(np.abs(ref))
                            shift_err = max(shift_err, err)
                    rank_ok += numeric_rank(pair.Vp, RANK_TOL)[0] == (n + 1) ** G
                yield Check(f"subspace pair G={G}, n={n}: T_i V column maps onto Vp column",
                            shift_err < LEMMA2_SHIFT_TOL, f"max rel err {shift_err:.1e}")
                yield Check(f"subspace pair G={G}, n={n}: rank Vp = {(n + 1) ** G}",
                            rank_ok == lemma2_seeds, f"{rank_ok}/{lemma2_seeds}, mu={mu}")
    return _timed(6, "monomial and subspace-pair suites", float("inf"), body)


def criterion_delay(seed=0, horizon=300):
    def body():
        for cfg in DELAY_CONFIGS:
            sim = simulate(DelaySchedule.from_tuple(cfg, horizon))
            per = throughput(sim, per_message=True)
            tot = throughput(sim)
            confined = all(len(sim.residues(j, INTERFERENCE)) == 1
                           and not sim.residues(j, INTERFERENCE) & sim.residues(j, DESIRED)
                           for j in (1, 2))
            yield Check(f"delays {cfg}: throughput 4/3, 1/3 per message",
                        tot == Fraction(4, 3) and all(v == Fraction(1, 3) for v in per.values()),
                        f"{tot}")
            yield Check(f"delays {cfg}: no collisions", not sim.collisions(),
                        f"{len(sim.collisions())} collisions")
            yield Check(f"delays {cfg}: interference in one residue class", confined)
    return _timed(7, "delay example", float("inf"), body)


def criterion_relay(seed=0):
    def body():
        grid = [(M, K) for M in range(1, 7) for K in range(1, 7)]
        bad = [(M, K) for M, K in grid
               if relay_dof(M, K) != solve_lp(region_constraints(DofRegionSpec(M, K))).value / 2]
        yield Check("relay_dof = half the single-hop LP optimum on a 6x6 grid", not bad, f"{bad}")
        yield Check("relay_dof(2, 1000) > 0.999", relay_dof(2, 1000) > Fraction(999, 1000))
        for M, K in ((2, 2), (3, 2), (2, 3)):
            top = sample_topology(M, K, 64, seed)
            d = compose_two_hop(top, scheme="perfect", seed=seed).dof
            yield Check(f"perfect composition on ({M},{K}) = {relay_dof(M, K)}",
                        d == relay_dof(M, K), f"{d}")
        seq = []
        for n in (1, 2, 3):
            top = sample_topology(2, 2, 64, seed)
            seq.append(compose_two_hop(top, n, seed=seed).dof)
        yield Check("general composition on (2,2) increases in n toward 2/3",
                    all(a < b for a, b in zip(seq, seq[1:])) and seq[-1] < relay_dof(2, 2)
                    and seq[0] == Fraction(3, 5), f"{seq}")
    return _timed(8, "relay composition", float("inf"), body)


CRITERIA = {1: criterion_outerbound, 2: criterion_perfect, 3: criterion_reciprocity,
            4: criterion_general, 5: criterion_slope, 6: criterion_monomial_pairs,
            7: criterion_delay, 8: criterion_relay}


def run_suite(seed=0, trials=200, only=None):
    """Run the selected criteria (default: all) in order."""
    out = []
    for k, fn in CRITERIA.items():
        if only and k not in only:
            continue
        out.append(fn(seed, trials) if k == 5 else fn(seed))
    return out


def summary_line(result):
    status = "PASS" if result.passed else "FAIL"
    line = f"criterion {result.number} [{status}] {result.title} ({result.elapsed:.2f}s)"
    bad = result.failed_checks()
    if bad:
        line += " -- " + "; ".join(f"{c.name}: {c.detail}" for c in bad)
    return line
