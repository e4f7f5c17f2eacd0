import numpy as np
import pytest

from groupoidalg import (
    GroupoidFunction,
    HaarWeights,
    HilbertBundle,
    UnitaryRep,
    check_commutation,
    check_equivariance,
    commutant,
    contains_in_span,
    norm_bound,
    operator_norm,
    quantize,
    random_operator_from,
    simple_extension,
    spectral_norm,
    trivial_rep,
    validate_rep,
)
from groupoidalg.cli import _identity_translations, _regular_rep
from groupoidalg.errors import PreconditionError


@pytest.fixture(scope="module")
def reg_z2(fix_gauge_2_z2):
    return _regular_rep(fix_gauge_2_z2)


@pytest.fixture(scope="module")
def reg_s3(fix_gauge_3_s3):
    return _regular_rep(fix_gauge_3_s3)


class TestValidateRep:
    def test_trivial_rep_valid(self, fix_gauge_2_z2, fix_pair):
        for g in (fix_gauge_2_z2, fix_pair):
            assert validate_rep(trivial_rep(g)).ok

    def test_regular_rep_valid(self, reg_z2, reg_s3):
        assert validate_rep(reg_z2).ok
        assert validate_rep(reg_s3).ok

    def test_scaled_rep_fails_unitarity(self, fix_gauge_2_z2, reg_z2):
        scaled = UnitaryRep(
            fix_gauge_2_z2, reg_z2.bundle, {a: 2.0 * m for a, m in reg_z2.U.items()}
        )
        report = validate_rep(scaled)
        assert not report.ok
        assert any(c == "unitarity" for c, _, _ in report.violations)

    def test_broken_composition_detected(self, fix_gauge_2_z2, reg_z2):
        g = fix_gauge_2_z2
        U = dict(reg_z2.U)
        # an order-2 arrow must not get a unitary of order 4
        bad = next(a for a in U if not g.is_identity(a))
        U[bad] = np.diag([1.0, 1j])
        report = validate_rep(UnitaryRep(g, reg_z2.bundle, U))
        assert not report.ok
        assert any(c == "composition" for c, _, _ in report.violations)

    def test_wrong_shape_rejected(self, fix_gauge_2_z2):
        bundle = HilbertBundle((2, 2))
        U = {fix_gauge_2_z2.identity[0]: np.eye(3)}
        with pytest.raises(PreconditionError):
            validate_rep(UnitaryRep(fix_gauge_2_z2, bundle, U))


class TestSimpleExtension:
    def test_identity_translations_z2(self, fix_gauge_2_z2, reg_z2, decomposition_2_z2):
        sd = decomposition_2_z2.sd
        I = _identity_translations(fix_gauge_2_z2, sd.g1)
        assert check_commutation(reg_z2, I, sd).ok
        ext = simple_extension(reg_z2, I, sd)
        assert set(ext.U) == set(sd.arrows())
        assert validate_rep(ext).ok

    def test_identity_translations_s3(self, fix_gauge_3_s3, reg_s3, decomposition_3_s3):
        sd = decomposition_3_s3.sd
        I = _identity_translations(fix_gauge_3_s3, sd.g1)
        ext = simple_extension(reg_s3, I, sd)
        assert validate_rep(ext).ok

    def test_swap_translations_give_second_extension(
        self, fix_gauge_2_z2, reg_z2, decomposition_2_z2
    ):
        # abelian fiber group: conjugating by any unitary family that is
        # itself a representation still satisfies the commutation relation
        g = fix_gauge_2_z2
        sd = decomposition_2_z2.sd
        swap = np.array([[0, 1], [1, 0]], dtype=complex)
        I = {}
        for a1 in sd.g1.arrows:
            I[a1] = np.eye(2, dtype=complex) if g.src[a1] == g.tgt[a1] else swap
        ext = simple_extension(reg_z2, I, sd)
        assert validate_rep(ext).ok
        ident = _identity_translations(g, sd.g1)
        other = simple_extension(reg_z2, ident, sd)
        assert any(
            np.max(np.abs(ext.U[i] - other.U[i])) > 0.5 for i in sd.arrows()
        )

    def test_non_representation_family_rejected(
        self, fix_gauge_2_z2, reg_z2, decomposition_2_z2
    ):
        g = fix_gauge_2_z2
        sd = decomposition_2_z2.sd
        swap = np.array([[0, 1], [1, 0]], dtype=complex)
        I = _identity_translations(g, sd.g1)
        # break functoriality in one direction only
        bad = next(a1 for a1 in sd.g1.arrows if g.src[a1] != g.tgt[a1])
        I[bad] = swap
        with pytest.raises(PreconditionError):
            simple_extension(reg_z2, I, sd)

    def test_commutation_failure_rejected(
        self, fix_gauge_3_s3, reg_s3, decomposition_3_s3
    ):
        # conjugate the fiber at base point 0 by a transposition: the family
        # is still a representation of the translations, but it no longer
        # intertwines the (trivial) conjugation action on a nonabelian fiber
        g = fix_gauge_3_s3
        sd = decomposition_3_s3.sd
        G = g.bundle.group
        t = next(a for a in range(G.order) if G.element_order(a) == 2)
        V = [np.eye(6, dtype=complex) for _ in range(3)]
        V[0] = reg_s3.U[g.triple_index[(0, t, 0)]]
        I = {}
        for a1 in sd.g1.arrows:
            y, x = g.tgt[a1], g.src[a1]
            I[a1] = V[y] @ V[x].conj().T
        rep = check_commutation(reg_s3, I, sd)
        assert not rep.ok
        with pytest.raises(PreconditionError):
            simple_extension(reg_s3, I, sd)


class TestQuantize:
    def test_constant_z2(self, fix_gauge_2_z2, reg_z2):
        g = fix_gauge_2_z2
        w = HaarWeights.counting(g)
        fiber = g.isotropy_fiber(0)
        a = GroupoidFunction.zero(g)
        a.values[fiber] = 1.0
        m = quantize(a, reg_z2, 0, w)
        assert np.allclose(m, np.array([[1, 1], [1, 1]]))

    def test_delta_gives_unitary(self, fix_gauge_3_s3, reg_s3):
        g = fix_gauge_3_s3
        w = HaarWeights.counting(g)
        for g0 in g.isotropy_fiber(1):
            m = quantize(GroupoidFunction.delta(g, g0), reg_s3, 1, w)
            assert np.allclose(m, reg_s3.U[g0])

    def test_off_fiber_support_rejected(self, fix_gauge_2_z2, reg_z2):
        g = fix_gauge_2_z2
        w = HaarWeights.counting(g)
        off = next(a for a in g.arrows() if g.src[a] != g.tgt[a])
        with pytest.raises(PreconditionError):
            quantize(GroupoidFunction.delta(g, off), reg_z2, 0, w)

    def test_multiplicative_via_fiber_convolution(self, fix_gauge_3_s3, reg_s3, rng):
        from groupoidalg import fiber_convolve

        g = fix_gauge_3_s3
        w = HaarWeights.counting(g)
        fiber = g.isotropy_fiber(2)
        a1 = GroupoidFunction.random(g, rng, support=fiber)
        a2 = GroupoidFunction.random(g, rng, support=fiber)
        lhs = quantize(fiber_convolve(a1, a2, 2, w), reg_s3, 2, w)
        rhs = quantize(a1, reg_s3, 2, w) @ quantize(a2, reg_s3, 2, w)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestNorms:
    def test_spectral_norm_matches_svd(self, rng):
        for _ in range(10):
            m = rng.random((5, 5)) + 1j * rng.random((5, 5))
            assert spectral_norm(m) == pytest.approx(np.linalg.norm(m, 2), abs=1e-9)

    def test_delta_identity_norm_one(self, fix_gauge_3_s3, reg_s3):
        g = fix_gauge_3_s3
        w = HaarWeights.counting(g)
        vals = np.zeros(g.n_arrows, dtype=complex)
        for e in g.identity:
            vals[e] = 1.0
        ro = random_operator_from(GroupoidFunction(g, vals), reg_s3, w)
        assert operator_norm(ro) == pytest.approx(1.0, abs=1e-9)

    def test_z2_constant_norm_two(self, fix_gauge_2_z2, reg_z2):
        g = fix_gauge_2_z2
        w = HaarWeights.counting(g)
        iso = [a for x in g.base() for a in g.isotropy_fiber(x)]
        a = GroupoidFunction.zero(g)
        a.values[iso] = 1.0
        ro = random_operator_from(a, reg_z2, w)
        assert operator_norm(ro) == pytest.approx(2.0, abs=1e-9)

    def test_bound_inequality_random(self, fix_gauge_3_s3, reg_s3, rng):
        g = fix_gauge_3_s3
        w = HaarWeights.counting(g)
        iso = [a for x in g.base() for a in g.isotropy_fiber(x)]
        for _ in range(20):
            a = GroupoidFunction.random(g, rng, support=iso)
            ro = random_operator_from(a, reg_s3, w)
            assert operator_norm(ro) <= norm_bound(a, w)

    def test_non_isotropy_support_rejected(self, fix_gauge_2_z2, reg_z2):
        g = fix_gauge_2_z2
        w = HaarWeights.counting(g)
        off = next(a for a in g.arrows() if g.src[a] != g.tgt[a])
        with pytest.raises(PreconditionError):
            random_operator_from(GroupoidFunction.delta(g, off), reg_z2, w)


class TestEquivariance:
    def test_z2_regular(self, fix_gauge_2_z2, reg_z2, decomposition_2_z2, rng):
        g = fix_gauge_2_z2
        sd = decomposition_2_z2.sd
        w = HaarWeights.counting(g)
        I = _identity_translations(g, sd.g1)
        iso = [a for x in g.base() for a in g.isotropy_fiber(x)]
        a = GroupoidFunction.random(g, rng, support=iso)
        rep = check_equivariance(a, reg_z2, I, sd, w)
        assert rep.ok
        assert rep.max_deviation <= 1e-9

    def test_s3_regular_many_trials(self, fix_gauge_3_s3, reg_s3, decomposition_3_s3):
        g = fix_gauge_3_s3
        sd = decomposition_3_s3.sd
        w = HaarWeights.counting(g)
        I = _identity_translations(g, sd.g1)
        iso = [a for x in g.base() for a in g.isotropy_fiber(x)]
        rng = np.random.default_rng(99)
        for _ in range(50):
            a = GroupoidFunction.random(g, rng, support=iso)
            assert check_equivariance(a, reg_s3, I, sd, w).ok


class TestCommutant:
    def test_z2_regular_block(self):
        # 2x2 regular representation of the two-element group
        I2 = np.eye(2, dtype=complex)
        swap = np.array([[0, 1], [1, 0]], dtype=complex)
        first = commutant([I2, swap], levels=1)
        second = commutant([I2, swap], levels=2)
        assert first.dimension == 2
        assert second.dimension == 2
        for m in (I2, swap):
            assert contains_in_span(second.basis, m)

    def test_identity_only_has_full_commutant(self):
        res = commutant([np.eye(2, dtype=complex)])
        assert res.dimension == 4

    def test_block_generators_gauge_z2(self, fix_gauge_2_z2, reg_z2):
        from groupoidalg import block_diagonal_generators

        g = fix_gauge_2_z2
        w = HaarWeights.counting(g)
        gens = block_diagonal_generators(g, reg_z2, w)
        first = commutant(gens, levels=1)
        second = commutant(gens, levels=2)
        # block-diagonal algebra over two 2-dim group-algebra blocks
        assert first.dimension == 4
        assert second.dimension == 4
        assert all(contains_in_span(second.basis, m) for m in gens)

    def test_size_cap(self):
        from groupoidalg.errors import SizeCapError

        with pytest.raises(SizeCapError):
            commutant([np.eye(40, dtype=complex)], max_entries=100)

    def test_commutant_members_commute(self, rng):
        m = rng.random((4, 4)) + 1j * rng.random((4, 4))
        res = commutant([m])
        for b in res.basis:
            assert np.max(np.abs(b @ m - m @ b)) < 1e-8
