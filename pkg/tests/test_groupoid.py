import dataclasses

import pytest

from groupoidalg import (
    group_groupoid,
    isotropy_subgroupoid,
    pair_groupoid,
    quotient_by_isotropy,
    selection_to_groupoid,
    subgroupoid_properties,
    symmetric,
    validate_groupoid,
)
from groupoidalg.errors import PreconditionError
from groupoidalg.groupoid import (
    AXIOM_ASSOCIATIVITY,
    AXIOM_IDENTITY,
    AXIOM_INVERSE,
    AXIOM_SOURCE_TARGET,
    SubgroupoidSelection,
)
from groupoidalg.morphism import find_isomorphism, verify_morphism


def with_fields(g, **kwargs):
    return dataclasses.replace(g, **kwargs)


def arrow_by_label(g, label):
    return g.arrow_labels.index(label)


class TestValidation:
    def test_fixtures_valid(self, fix_pair, fix_z3, fix_gauge_2_z2, fix_gauge_3_s3):
        for g in (fix_pair, fix_z3, fix_gauge_2_z2, fix_gauge_3_s3):
            assert validate_groupoid(g).ok

    def test_corrupt_inverse_cites_inverse_axiom(self, fix_pair):
        a = arrow_by_label(fix_pair, "(0,1)")
        inv = list(fix_pair.inv)
        inv[a] = a  # (0,1) is not its own inverse
        bad = with_fields(fix_pair, inv=tuple(inv))
        report = validate_groupoid(bad)
        assert not report.ok
        assert AXIOM_INVERSE in report.axioms_cited()
        assert any(a in v.witness for v in report.violations)

    def test_corrupt_compose_cites_identity_axiom(self, fix_gauge_2_z2):
        g = fix_gauge_2_z2
        # break eps(r(gamma)) ∘ gamma for one non-identity arrow
        gamma = next(a for a in g.arrows() if not g.is_identity(a))
        e = g.identity[g.tgt[gamma]]
        other = next(
            a
            for a in g.arrows()
            if a != gamma and g.src[a] == g.src[gamma] and g.tgt[a] == g.tgt[gamma]
        )
        comp = dict(g.compose_table)
        comp[(e, gamma)] = other
        report = validate_groupoid(with_fields(g, compose_table=comp))
        assert not report.ok
        assert AXIOM_IDENTITY in report.axioms_cited()

    def test_corrupt_endpoints_cites_source_target(self, fix_gauge_2_z2):
        g = fix_gauge_2_z2
        (a, b), c = next(
            ((p, q), r)
            for (p, q), r in g.compose_table.items()
            if not g.is_identity(p) and not g.is_identity(q)
        )
        wrong = next(
            r2
            for r2 in g.arrows()
            if g.src[r2] != g.src[c] or g.tgt[r2] != g.tgt[c]
        )
        comp = dict(g.compose_table)
        comp[(a, b)] = wrong
        report = validate_groupoid(with_fields(g, compose_table=comp))
        assert not report.ok
        assert AXIOM_SOURCE_TARGET in report.axioms_cited()

    def test_corrupt_product_cites_associativity(self, fix_gauge_2_z2):
        g = fix_gauge_2_z2
        # swap a non-identity product for a parallel arrow; endpoints stay
        # consistent so the defect is associativity (or the identity law)
        (a, b), c = next(
            ((p, q), r)
            for (p, q), r in g.compose_table.items()
            if not g.is_identity(p) and not g.is_identity(q) and not g.is_identity(r)
        )
        other = next(
            r2
            for r2 in g.arrows()
            if r2 != c and g.src[r2] == g.src[c] and g.tgt[r2] == g.tgt[c]
        )
        comp = dict(g.compose_table)
        comp[(a, b)] = other
        report = validate_groupoid(with_fields(g, compose_table=comp))
        assert not report.ok
        assert report.axioms_cited() & {AXIOM_ASSOCIATIVITY, AXIOM_IDENTITY, AXIOM_INVERSE}

    def test_malformed_entry_is_not_axiom_violation(self, fix_pair):
        g = fix_pair
        a, b = next(
            (p, q)
            for p in g.arrows()
            for q in g.arrows()
            if not g.composable(p, q)
        )
        comp = dict(g.compose_table)
        comp[(a, b)] = 0
        report = validate_groupoid(with_fields(g, compose_table=comp))
        assert not report.ok
        assert all(v.kind == "malformed" for v in report.violations)

    def test_inverse_involution_and_antihomomorphism(self, fix_gauge_3_s3):
        g = fix_gauge_3_s3
        for a in g.arrows():
            assert g.inv[g.inv[a]] == a
        for (a, b), c in g.compose_table.items():
            assert g.compose_table[(g.inv[b], g.inv[a])] == g.inv[c]


class TestSubgroupoids:
    def test_pair_isotropy_is_identities(self, fix_pair):
        iso = isotropy_subgroupoid(fix_pair)
        assert iso.arrows == frozenset(fix_pair.identity)

    def test_z3_isotropy_is_everything(self, fix_z3):
        assert isotropy_subgroupoid(fix_z3).arrows == frozenset(fix_z3.arrows())

    def test_gauge_isotropy(self, fix_gauge_2_z2):
        iso = isotropy_subgroupoid(fix_gauge_2_z2)
        assert len(iso.arrows) == 4
        assert all(
            fix_gauge_2_z2.src[a] == fix_gauge_2_z2.tgt[a] for a in iso.arrows
        )

    def test_isotropy_properties(self, fix_gauge_2_z2):
        iso = isotropy_subgroupoid(fix_gauge_2_z2)
        props = subgroupoid_properties(fix_gauge_2_z2, iso)
        assert props == {"is_wide": True, "is_transitive": False, "is_closed": True}

    def test_full_selection_properties(self, fix_pair):
        sel = SubgroupoidSelection(fix_pair, frozenset(fix_pair.arrows()))
        props = subgroupoid_properties(fix_pair, sel)
        assert props == {"is_wide": True, "is_transitive": True, "is_closed": True}

    def test_selection_must_be_subset(self, fix_pair, fix_z3):
        sel = SubgroupoidSelection(fix_pair, frozenset({99}))
        with pytest.raises(PreconditionError):
            subgroupoid_properties(fix_pair, sel)

    def test_selection_to_groupoid_valid(self, fix_gauge_2_z2):
        iso = isotropy_subgroupoid(fix_gauge_2_z2)
        sub, incl = selection_to_groupoid(iso)
        assert validate_groupoid(sub).ok
        assert verify_morphism(incl).ok

    def test_non_closed_selection_rejected(self, fix_z3):
        gen = next(a for a in fix_z3.arrows() if not fix_z3.is_identity(a))
        sel = SubgroupoidSelection(fix_z3, frozenset({gen}))
        with pytest.raises(PreconditionError):
            selection_to_groupoid(sel)


class TestQuotient:
    def test_gauge_quotient_is_pair_groupoid(self, fix_gauge_2_z2):
        iso = isotropy_subgroupoid(fix_gauge_2_z2)
        q, rho = quotient_by_isotropy(fix_gauge_2_z2, iso)
        assert q.n_arrows == 4
        assert validate_groupoid(q).ok
        assert verify_morphism(rho).ok
        assert find_isomorphism(q, pair_groupoid(2)) is not None

    def test_pair_quotient_is_identity(self, fix_pair):
        iso = isotropy_subgroupoid(fix_pair)
        q, rho = quotient_by_isotropy(fix_pair, iso)
        assert q.n_arrows == fix_pair.n_arrows
        assert find_isomorphism(q, fix_pair) is not None

    def test_z3_quotient_collapses(self, fix_z3):
        iso = isotropy_subgroupoid(fix_z3)
        q, rho = quotient_by_isotropy(fix_z3, iso)
        assert q.n_arrows == 1
        assert validate_groupoid(q).ok

    def test_s3_gauge_quotient(self, fix_gauge_3_s3):
        iso = isotropy_subgroupoid(fix_gauge_3_s3)
        q, rho = quotient_by_isotropy(fix_gauge_3_s3, iso)
        assert q.n_arrows == 9
        assert validate_groupoid(q).ok
        assert verify_morphism(rho).ok
        assert find_isomorphism(q, pair_groupoid(3)) is not None

    def test_projection_surjective(self, fix_gauge_2_z2):
        iso = isotropy_subgroupoid(fix_gauge_2_z2)
        q, rho = quotient_by_isotropy(fix_gauge_2_z2, iso)
        assert set(rho.arrow_map) == set(q.arrows())

    def test_non_normal_selection_rejected(self):
        s3 = group_groupoid(symmetric(3))
        # subgroup generated by one transposition is not normal in S3
        swap = next(
            a
            for a in s3.arrows()
            if not s3.is_identity(a) and s3.compose_table[(a, a)] == s3.identity[0]
        )
        sel = SubgroupoidSelection(s3, frozenset({s3.identity[0], swap}))
        with pytest.raises(PreconditionError):
            quotient_by_isotropy(s3, sel)

    def test_non_wide_selection_rejected(self, fix_pair):
        sel = SubgroupoidSelection(fix_pair, frozenset({fix_pair.identity[0]}))
        with pytest.raises(PreconditionError):
            quotient_by_isotropy(fix_pair, sel)

    def test_non_isotropy_selection_rejected(self, fix_pair):
        sel = SubgroupoidSelection(fix_pair, frozenset(fix_pair.arrows()))
        with pytest.raises(PreconditionError):
            quotient_by_isotropy(fix_pair, sel)
