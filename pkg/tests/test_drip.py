import json

import numpy as np
import pytest

from framecs.drip import (
    exact_drip,
    exact_rip,
    random_lower_bound,
    support_deviation,
    support_spectrum_range,
)
from framecs.errors import ContractViolation, EnumerationLimitError
from framecs.frames import make_identity_frame, make_random_tight_frame
from framecs.sensing import gen_gaussian


class TestExactDrip:
    def test_identity_measurement_any_frame(self):
        frame = make_random_tight_frame(4, 7, seed=1)
        for s in (1, 2, 3):
            assert exact_drip(np.eye(4), frame, s).delta <= 1e-12

    def test_scaled_identity(self):
        frame = make_identity_frame(3)
        rep = exact_drip(2.0 * np.eye(3), frame, 1)
        assert rep.delta == pytest.approx(3.0, abs=1e-12)

    def test_diag_s1(self):
        rep = exact_drip(np.diag([1.0, 0.5]), make_identity_frame(2), 1)
        assert rep.delta == pytest.approx(0.75, abs=1e-12)
        assert rep.witness_support == (1,)
        assert rep.supports_examined == 2

    def test_diag_s2(self):
        rep = exact_drip(np.diag([1.0, 0.5]), make_identity_frame(2), 2)
        assert rep.delta == pytest.approx(0.75, abs=1e-12)
        assert rep.supports_examined == 1

    def test_monotone_in_s(self):
        for seed in range(6):
            frame = make_random_tight_frame(5, 8, seed=seed)
            a = gen_gaussian(10, 5, seed=seed + 100)
            deltas = [exact_drip(a, frame, s).delta for s in (1, 2, 3, 4)]
            for lo, hi in zip(deltas, deltas[1:]):
                assert hi >= lo - 1e-12

    def test_witness_reproduces_delta(self):
        for seed in range(6):
            frame = make_random_tight_frame(4, 7, seed=seed)
            a = gen_gaussian(9, 4, seed=seed + 200)
            rep = exact_drip(a, frame, 2)
            assert support_deviation(a, frame, rep.witness_support) \
                == pytest.approx(rep.delta, abs=1e-10)

    def test_definition_sampling(self):
        rng = np.random.default_rng(31)
        frame = make_random_tight_frame(5, 9, seed=4)
        a = gen_gaussian(12, 5, seed=5)
        s = 2
        delta = exact_drip(a, frame, s).delta
        d = frame.matrix
        for _ in range(1000):
            v = np.zeros(9)
            sup = rng.choice(9, s, replace=False)
            v[sup] = rng.standard_normal(s)
            dv = d @ v
            adv = a @ dv
            ndv = dv @ dv
            assert (1 - delta - 1e-8) * ndv <= adv @ adv <= (1 + delta + 1e-8) * ndv

    def test_inner_product_bound(self):
        # for s-sparse u, v: <ADu, ADv> <= delta_2s ||Du|| ||Dv|| + <Du, Dv>
        rng = np.random.default_rng(32)
        frame = make_random_tight_frame(5, 8, seed=6)
        a = gen_gaussian(11, 5, seed=7)
        s = 2
        delta2 = exact_drip(a, frame, 2 * s).delta
        d = frame.matrix
        for _ in range(1000):
            u = np.zeros(8)
            v = np.zeros(8)
            u[rng.choice(8, s, replace=False)] = rng.standard_normal(s)
            v[rng.choice(8, s, replace=False)] = rng.standard_normal(s)
            du, dv = d @ u, d @ v
            lhs = (a @ du) @ (a @ dv)
            rhs = delta2 * np.linalg.norm(du) * np.linalg.norm(dv) + du @ dv
            assert lhs <= rhs + 1e-8

    def test_rank_deficient_supports(self):
        # union of a basis with itself: the support {i, n+i} spans a single
        # direction, so the pair behaves exactly like the singleton {i}
        from framecs.frames import make_union_frame
        frame = make_union_frame(np.eye(3), np.eye(3))
        rng = np.random.default_rng(77)
        a = rng.standard_normal((5, 3)) / np.sqrt(5)
        singles = exact_drip(a, frame, 1).delta
        for i in range(3):
            pair_dev = support_deviation(a, frame, (i, 3 + i))
            single_dev = support_deviation(a, frame, (i,))
            assert pair_dev == pytest.approx(single_dev, abs=1e-12)
        assert exact_drip(a, frame, 2).delta >= singles - 1e-12

    def test_enumeration_guard(self):
        frame = make_random_tight_frame(8, 60, seed=8)
        a = gen_gaussian(16, 8, seed=9)
        with pytest.raises(EnumerationLimitError, match="random_lower_bound"):
            exact_drip(a, frame, 8)

    def test_rejects_bad_s(self):
        with pytest.raises(ContractViolation):
            exact_drip(np.eye(3), make_identity_frame(3), 0)


class TestExactRip:
    def test_orthonormal_columns(self):
        q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((6, 4)))
        assert exact_rip(q, 2).delta <= 1e-12

    def test_diag(self):
        rep = exact_rip(np.diag([1.0, 0.5]), 1)
        assert rep.delta == pytest.approx(0.75, abs=1e-12)

    def test_matches_drip_with_identity_frame(self):
        for seed in range(50):
            n = 4 + seed % 4
            a = gen_gaussian(2 * n, n, seed=seed)
            s = 1 + seed % 3
            frame = make_identity_frame(n)
            assert exact_rip(a, s).delta \
                == pytest.approx(exact_drip(a, frame, s).delta, abs=1e-10)

    def test_order_scaling_bound(self):
        # delta at order c*s is at most c times delta at order 2s (c >= 2)
        for seed in range(8):
            a = gen_gaussian(20, 8, seed=seed + 400)
            d2 = exact_rip(a, 2).delta
            for c in (2, 3, 4):
                dc = exact_rip(a, c).delta
                assert dc <= c * d2 + 1e-10


class TestRandomLowerBound:
    def test_never_exceeds_exact(self):
        for seed in range(10):
            frame = make_random_tight_frame(4, 7, seed=seed)
            a = gen_gaussian(8, 4, seed=seed + 300)
            exact = exact_drip(a, frame, 2).delta
            lower = random_lower_bound(a, frame, 2, trials=40, seed=seed).delta
            assert lower <= exact + 1e-10

    def test_exhaustive_coincides(self):
        frame = make_random_tight_frame(3, 5, seed=11)
        a = gen_gaussian(6, 3, seed=12)
        exact = exact_drip(a, frame, 1).delta
        # 200 draws over 5 singleton supports covers all of them
        lower = random_lower_bound(a, frame, 1, trials=200, seed=13)
        assert lower.delta == pytest.approx(exact, abs=1e-12)

    def test_deterministic(self):
        frame = make_random_tight_frame(4, 6, seed=14)
        a = gen_gaussian(7, 4, seed=15)
        r1 = random_lower_bound(a, frame, 2, trials=25, seed=16)
        r2 = random_lower_bound(a, frame, 2, trials=25, seed=16)
        assert r1 == r2


class TestSupportSpectrumRange:
    def test_scaling_law(self):
        frame = make_random_tight_frame(4, 6, seed=17)
        a = gen_gaussian(9, 4, seed=18)
        lo, hi = support_spectrum_range(a, frame, 2)
        lo2, hi2 = support_spectrum_range(2.0 * a, frame, 2)
        assert lo2 == pytest.approx(4 * lo, rel=1e-10)
        assert hi2 == pytest.approx(4 * hi, rel=1e-10)

    def test_consistent_with_delta(self):
        frame = make_random_tight_frame(4, 6, seed=19)
        a = gen_gaussian(9, 4, seed=20)
        lo, hi = support_spectrum_range(a, frame, 2)
        delta = exact_drip(a, frame, 2).delta
        assert delta == pytest.approx(max(hi - 1.0, 1.0 - lo), abs=1e-12)


class TestSerialization:
    def test_json_fields(self):
        rep = exact_drip(np.diag([1.0, 0.5]), make_identity_frame(2), 1)
        payload = json.loads(rep.to_json())
        assert payload["s"] == 1
        assert payload["method"] == "exact"
        assert payload["witness_support"] == [1]
        assert payload["supports_examined"] == 2
        assert payload["delta"] == 0.75
