import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fvskernel import (
    ALL_RULES,
    CONFLUENT_RULES,
    Digraph,
    PreconditionError,
    Redex,
    ReductionKind,
    all_normal_forms,
    apply_redex,
    check_precondition,
    commutation_square_check,
    dome_counterexample,
    find_redexes,
    isomorphic,
    local_joinability,
    one_step_reducts,
    replay,
    sampled_normal_forms,
)
from fvskernel.confluence import _iso_representatives
from support import digraphs, naive_normal_forms

K = ReductionKind


def twin_chain():
    """Contracting from either end of the x->y chain keeps a different label."""
    return Digraph(
        arcs=[
            ("a", "b"), ("b", "a"), ("a", "d"), ("d", "a"), ("d", "b"),
            ("b", "x"), ("d", "x"), ("x", "y"), ("y", "b"), ("y", "d"),
        ]
    )


def test_one_step_reducts():
    assert one_step_reducts(Digraph(arcs=[("a", "b"), ("b", "a")]), {K.PIE}) == []
    loop = Digraph(arcs=[("a", "a")])
    assert one_step_reducts(loop, {K.LOOP}) == [(Redex(K.LOOP, "a"), Digraph())]
    g = dome_counterexample()
    reducts = dict(one_step_reducts(g, {K.DOME}))
    assert reducts[Redex(K.DOME, ("c", "e"))] == g.delete_arc(("c", "e"))
    assert reducts[Redex(K.DOME, ("d", "e"))] == g.delete_arc(("d", "e"))


def test_all_normal_forms_empty_graph():
    report = all_normal_forms(Digraph(), ALL_RULES)
    assert report.normal_forms == (Digraph(),)
    assert report.explored == 1
    assert not report.truncated


def test_all_normal_forms_counterexample():
    report = all_normal_forms(dome_counterexample(), ALL_RULES)
    assert len(report.normal_forms) >= 2
    assert not report.truncated
    for nf, witness in zip(report.normal_forms, report.witnesses):
        assert find_redexes(nf, ALL_RULES) == []
        assert witness.final == nf
        assert replay(witness).kernel == nf


def test_all_normal_forms_confluent_rules_on_counterexample():
    report = all_normal_forms(dome_counterexample(), CONFLUENT_RULES)
    assert len(report.normal_forms) == 1


def test_truncation_reported_not_raised():
    g = Digraph(arcs=[("a", "b"), ("b", "c"), ("c", "d")])
    report = all_normal_forms(g, CONFLUENT_RULES, state_cap=2)
    assert report.truncated


def test_twin_chain_collapses_to_one_class():
    report = all_normal_forms(twin_chain(), CONFLUENT_RULES)
    assert len(report.normal_forms) == 1
    assert report.labeled_normal_forms == 2
    pairs = local_joinability(twin_chain(), CONFLUENT_RULES)
    assert pairs and all(p.joined for p in pairs)


@given(digraphs(max_vertices=5))
def test_confluent_rules_yield_single_class(g):
    report = all_normal_forms(g, CONFLUENT_RULES, state_cap=500_000)
    assert not report.truncated
    assert len(report.normal_forms) == 1


@settings(max_examples=30)
@given(digraphs(max_vertices=4))
def test_matches_naive_unmemoized_dfs(g):
    assume(len(g.arcs) <= 5)
    for kinds in (CONFLUENT_RULES, ALL_RULES):
        naive = naive_normal_forms(g, kinds)
        report = all_normal_forms(g, kinds, state_cap=500_000)
        assert not report.truncated
        assert report.labeled_normal_forms == len(naive)
        assert {nf.canonical_bytes() for nf in report.normal_forms} <= set(naive)
        naive_graphs = sorted(naive.values(), key=Digraph.canonical_bytes)
        assert len(_iso_representatives(naive_graphs)) == len(report.normal_forms)


def test_sampled_normal_forms_counterexample():
    report = sampled_normal_forms(dome_counterexample(), ALL_RULES, trials=64, seed=0)
    assert len(report.normal_forms) >= 2
    assert report.truncated


def test_sampled_normal_forms_single_trial():
    report = sampled_normal_forms(Digraph(arcs=[("a", "a")]), ALL_RULES, trials=1)
    assert report.normal_forms == (Digraph(),)


def test_sampled_normal_forms_rejects_zero_trials():
    with pytest.raises(ValueError):
        sampled_normal_forms(Digraph(), ALL_RULES, trials=0)


@given(digraphs(max_vertices=5), st.integers(0, 2 ** 32))
def test_sampled_confluent_rules_single_kernel(g, seed):
    report = sampled_normal_forms(g, CONFLUENT_RULES, trials=8, seed=seed)
    assert len(report.normal_forms) == 1


def test_local_joinability_counterexample_pair_unjoined():
    pairs = local_joinability(dome_counterexample(), ALL_RULES)
    assert len(pairs) == 1
    (pair,) = pairs
    assert pair.left == Redex(K.DOME, ("c", "e"))
    assert pair.right == Redex(K.DOME, ("d", "e"))
    assert not pair.joined
    assert pair.join_witnesses is None
    assert not pair.capped


def test_local_joinability_irreducible_graph():
    kernel = dome_counterexample().delete_arc(("c", "e"))
    assert find_redexes(kernel, ALL_RULES) == []
    assert local_joinability(kernel, ALL_RULES) == []


@settings(max_examples=30)
@given(digraphs(max_vertices=5))
def test_local_joinability_confluent_rules_all_joined(g):
    for pair in local_joinability(g, CONFLUENT_RULES, state_cap=500_000):
        assert pair.joined and not pair.capped
        left, right = pair.join_witnesses
        assert isomorphic(left.final, right.final)


@settings(max_examples=25)
@given(digraphs(max_vertices=4))
def test_newman_consistency(g):
    # terminating relation: every pair joinable iff the normal form is unique
    for kinds in (CONFLUENT_RULES, ALL_RULES):
        pairs = local_joinability(g, kinds, state_cap=500_000)
        report = all_normal_forms(g, kinds, state_cap=500_000)
        assert not report.truncated
        assert all(p.joined for p in pairs) == (len(report.normal_forms) == 1)


def test_commutation_square_spec_cases():
    # arc deletion commutes with a contraction elsewhere
    g = Digraph(arcs=[("p", "x"), ("x", "q"), ("u", "v")])
    assert commutation_square_check(g, ("u", "v"), Redex(K.INDICLIQUE, "x"))
    # loop removal commutes even when it touches the deleted arc's endpoints
    g2 = Digraph(arcs=[("u", "u"), ("u", "v")])
    assert commutation_square_check(g2, ("u", "v"), Redex(K.LOOP, "u"))
    # two arc deletions commute
    g3 = Digraph(arcs=[("a", "b"), ("c", "d")])
    assert commutation_square_check(g3, ("a", "b"), Redex(K.PIE, ("c", "d")))


def test_commutation_square_contraction_of_endpoint():
    # contracting the arc's own tail: the bypass arcs (p, v) disappear too
    g = Digraph(arcs=[("p", "u"), ("u", "v"), ("p", "v")])
    assert commutation_square_check(g, ("u", "v"), Redex(K.INDICLIQUE, "u"))
    assert commutation_square_check(g, ("u", "v"), Redex(K.OUTDICLIQUE, "v"))


def test_commutation_square_errors():
    g = Digraph(arcs=[("a", "b"), ("b", "c")])
    with pytest.raises(PreconditionError):
        commutation_square_check(g, ("a", "b"), Redex(K.DOME, ("b", "c")))
    with pytest.raises(PreconditionError):
        commutation_square_check(g, ("a", "b"), Redex(K.LOOP, "c"))
    cyc = Digraph(arcs=[("a", "b"), ("b", "c"), ("c", "a")])
    with pytest.raises(PreconditionError):
        commutation_square_check(cyc, ("a", "b"), Redex(K.INDICLIQUE, "a"))


@given(digraphs(max_vertices=6))
def test_commutation_squares_always_close(g):
    pies = [r for r in find_redexes(g, {K.PIE})]
    others = find_redexes(g, {K.LOOP, K.INDICLIQUE, K.OUTDICLIQUE, K.PIE})
    for pie in pies[:4]:
        for other in others[:6]:
            assert commutation_square_check(g, pie.target, other)


@given(digraphs(max_vertices=6))
def test_contraction_keeps_bypass_arcs_off_circuits(g):
    # the commutation argument needs the created bypass arcs to stay
    # deletable: created one-way arcs must avoid circuits of the one-way part
    for u, v in sorted(g.arcs):
        pie = Redex(K.PIE, (u, v))
        if not check_precondition(g, pie):
            continue
        if check_precondition(g, Redex(K.INDICLIQUE, v)):
            contracted = g.contract(v)
            one_way = contracted.one_way()
            for s in g.successors(v):
                arc = (u, s)
                if arc in one_way.arcs:
                    assert not one_way.arc_on_circuit(arc)
        if check_precondition(g, Redex(K.OUTDICLIQUE, u)):
            contracted = g.contract(u)
            one_way = contracted.one_way()
            for p in g.predecessors(u):
                arc = (p, v)
                if arc in one_way.arcs:
                    assert not one_way.arc_on_circuit(arc)


def test_counterexample_caption_checks():
    g = dome_counterexample()
    one_way = g.one_way()
    assert one_way.predecessors("c") == {"a", "b"}
    assert one_way.predecessors("d") == {"a", "c"}
    assert g.predecessors("e") == {"a", "b", "c", "d"}
    after = g.delete_arc(("c", "e"))
    assert after.predecessors("e") == {"a", "b", "d"}
    assert find_redexes(after, ALL_RULES) == []


def test_counterexample_is_deterministic():
    assert dome_counterexample() == dome_counterexample()


@given(digraphs(max_vertices=6))
def test_packed_enumeration_mirrors_find_redexes(g):
    # the packed search core must agree with the reference enumeration,
    # including order, for witnesses to be deterministic
    from fvskernel._bitsearch import _VERTEX_KINDS, BitUniverse

    universe = BitUniverse(g.vertices)
    state = universe.pack(g)
    for kinds in (CONFLUENT_RULES, ALL_RULES):
        vertex_kinds = tuple(k for k in _VERTEX_KINDS if k in kinds)
        found = universe.children(
            state, vertex_kinds, K.PIE in kinds, K.DOME in kinds
        )
        assert [
            universe.redex(kind, target) for kind, target, _, _ in found
        ] == find_redexes(g, kinds)
        for kind, target, alive2, adj2 in found:
            redex = universe.redex(kind, target)
            expected = apply_redex(g, redex).reduced
            assert universe.unpack(alive2, adj2) == expected
