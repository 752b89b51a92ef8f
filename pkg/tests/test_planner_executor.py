import itertools

import numpy as np
import pytest
from conftest import graph_from_edges
from hypothesis import given, settings
from hypothesis import strategies as st

from matgraph.cypher import PlanError, parse
from matgraph.cypher.ast import IN
from matgraph.executor import NodeRef, execute
from matgraph.khop import KHopQuery, k_hop_count, k_hop_frontier
from matgraph.planner import (
    Traverse,
    VarLenTraverse,
    check_plan,
    explain,
    operators,
    plan,
)
from matgraph.protocol import format_result
from matgraph.sparse import ContractError
from matgraph.store import ANY, PropertyGraph

PATH = [(0, 1), (1, 2), (2, 3)]
TRIANGLE = [(0, 1), (1, 2), (2, 0)]


def run(g, q):
    return execute(plan(parse(q), g), g)


def test_plan_single_hop():
    g = PropertyGraph()
    assert explain(plan(parse("MATCH (a)-[:R]->(b) RETURN b"), g)) == "NodeScan(a) -> Traverse(a,R,->,b) -> Project(b)"


def test_plan_varlen():
    p = plan(parse("MATCH (a:Person)-[*2..2]->(b) RETURN count(b)"), PropertyGraph())
    assert explain(p) == "NodeScan(a,Person) -> VarLenTraverse(a,ANY,->,2,2,b,exact) -> Aggregate(count(b))"


def test_plan_type_error():
    g = PropertyGraph()
    g.create_node((), {"age": 3})
    with pytest.raises(PlanError) as ei:
        plan(parse("MATCH (a) WHERE a.age > 'x' RETURN a"), g)
    assert "a.age" in str(ei.value) and ei.value.offset == len("MATCH (a) WHERE ")


def test_plan_bool_ordering_error():
    g = PropertyGraph()
    g.create_node((), {"ok": True})
    with pytest.raises(PlanError):
        plan(parse("MATCH (a) WHERE a.ok < true RETURN a"), g)
    plan(parse("MATCH (a) WHERE a.ok = true RETURN a"), g)


def test_plan_int_float_comparable():
    g = PropertyGraph()
    g.create_node((), {"x": 3})
    assert run(g, "MATCH (a) WHERE a.x < 3.5 RETURN count(a)").rows == [(1,)]


def test_plan_rejects_edge_variables_in_expressions():
    with pytest.raises(PlanError):
        plan(parse("MATCH (a)-[r]->(b) RETURN r"), PropertyGraph())
    with pytest.raises(PlanError):
        plan(parse("MATCH (a)-[r]->(b) WHERE r.w = 1 RETURN a"), PropertyGraph())


def test_plan_rejects_edge_props_in_match():
    with pytest.raises(PlanError):
        plan(parse("MATCH (a)-[:R {w: 1}]->(b) RETURN a"), PropertyGraph())


def test_plan_modes_and_limit():
    text = explain(plan(parse("MATCH (a)<-[:R*1..3]-(b)-[*2..4]->(c) WHERE c.x = 1 RETURN c LIMIT 2"), PropertyGraph()))
    assert text == (
        "NodeScan(a) -> VarLenTraverse(a,R,<-,1,3,b,cumulative) -> VarLenTraverse(b,ANY,->,2,4,c,range)"
        " -> Filter(c.x = 1) -> Project(c) -> Limit(2)"
    )


def test_plan_predicates_pushed_to_binding_point():
    text = explain(plan(parse("MATCH (a {id: 0})-->(b:L)-->(a:M) WHERE b.k = 'x' RETURN a"), PropertyGraph()))
    assert text == (
        "NodeScan(a) -> Filter(a.id = 0) -> Traverse(a,ANY,->,b,L) -> Filter(b.k = 'x')"
        " -> Traverse(b,ANY,->,a) -> Filter(a:M) -> Project(a)"
    )


def test_plan_invariants_hold():
    for q in [
        "MATCH (a)-->(b), (c)-->(b) RETURN count(c)",
        "MATCH (a)-[:R]->()-[:R]->(c) RETURN c",
        "CREATE (a)-[:R]->(b)",
        "MATCH (a), (b) WHERE a.x = b.x RETURN a, b",
    ]:
        check_plan(plan(parse(q), PropertyGraph()))


def test_path_count():
    g = graph_from_edges(4, PATH)
    assert run(g, "MATCH (a)-[:R]->(b) RETURN count(b)").rows == [(3,)]


def test_empty_graph():
    g = PropertyGraph()
    assert run(g, "MATCH (a)-[:R]->(b) RETURN a, b").rows == []
    assert run(g, "MATCH (a) RETURN count(a)").rows == [(0,)]


def test_triangle_two_hop_from_id():
    g = graph_from_edges(3, TRIANGLE, ids=True)
    t = run(g, "MATCH (a)-[:R*2..2]->(b) WHERE a.id = 0 RETURN count(b)")
    assert t.rows == [(1,)]
    t = run(g, "MATCH (a)-[:R*2..2]->(b) WHERE a.id = 0 RETURN b")
    assert t.rows == [(NodeRef(2),)]


def test_rows_sorted_by_binding_tuple():
    g = graph_from_edges(4, [(3, 0), (0, 2), (0, 1), (2, 1)])
    t = run(g, "MATCH (a)-->(b) RETURN b, a")
    assert t.rows == [(NodeRef(1), NodeRef(0)), (NodeRef(2), NodeRef(0)), (NodeRef(1), NodeRef(2)), (NodeRef(0), NodeRef(3))]


def test_in_direction_uses_transpose():
    g = graph_from_edges(4, PATH)
    assert run(g, "MATCH (a)<-[:R]-(b) RETURN a, b").rows == [(NodeRef(1), NodeRef(0)), (NodeRef(2), NodeRef(1)), (NodeRef(3), NodeRef(2))]


def test_count_property_skips_missing():
    g = PropertyGraph()
    g.create_node((), {"x": 1})
    g.create_node()
    assert run(g, "MATCH (a) RETURN count(a), count(a.x)").rows == [(2, 1)]


def test_project_missing_property_is_none():
    g = PropertyGraph()
    g.create_node()
    assert run(g, "MATCH (a) RETURN a.nope").rows == [(None,)]


def test_create_then_match():
    g = PropertyGraph()
    execute(plan(parse("CREATE (a:P {n: 1})-[:R {w: 2}]->(b:P {n: 2}), (b)-[:R]->(a)"), g), g)
    assert g.node_count == 2
    assert g.edge_props(0, "R", 1) == {"w": 2}
    assert run(g, "MATCH (x:P)-[:R]->(y)-[:R]->(x) RETURN x.n").rows == [(1,), (2,)]
    execute(plan(parse("CREATE (a)<-[:S]-(b)"), g), g)
    assert g.relation_matrix("S").row(3).tolist() == [2]


# -- k-hop -------------------------------------------------------------------


def khop(g, seed, k, mode="exact"):
    return k_hop_frontier(g, KHopQuery(seed, k, ANY, mode)).to_set()


def test_khop_examples():
    path = graph_from_edges(4, PATH)
    assert khop(path, 0, 2) == {2}
    assert khop(graph_from_edges(1, []), 0, 1) == set()
    assert khop(graph_from_edges(3, TRIANGLE), 0, 3) == set()
    assert khop(path, 0, 6, "cumulative") == {1, 2, 3}
    assert k_hop_count(path, KHopQuery(0, 2)) == 1


def test_khop_contract():
    g = graph_from_edges(2, [(0, 1)])
    with pytest.raises(ContractError):
        k_hop_count(g, KHopQuery(5, 1))
    with pytest.raises(ContractError):
        KHopQuery(0, 0)
    with pytest.raises(ContractError):
        KHopQuery(0, 33)
    with pytest.raises(ContractError):
        KHopQuery(0, 1, mode="within")


def test_khop_typed_relation():
    g = graph_from_edges(3, [(0, 1)], relation="A")
    g.create_edge(1, "B", 2)
    assert k_hop_count(g, KHopQuery(0, 2, "A")) == 0
    assert k_hop_count(g, KHopQuery(0, 2)) == 1


def test_frontiers_disjoint(rng):
    from matgraph.bench import RmatParams, build_graph, rmat_generate
    from matgraph.khop import bfs_levels

    g = build_graph(rmat_generate(RmatParams(scale=8, edge_factor=4, rng_seed=3)), 256, with_ids=False)
    A = g.relation_matrix()
    for seed in rng.integers(0, 256, 20).tolist():
        levels = bfs_levels(A, seed, 8)
        seen = {seed}
        for lv in levels:
            s = lv.to_set()
            assert not (s & seen)
            seen |= s


# -- brute-force oracle over small random graphs ------------------------------


def _dist(adj, n, src, max_d):
    dist = {src: 0}
    frontier = [src]
    d = 0
    while frontier and d < max_d:
        d += 1
        nxt = []
        for u in frontier:
            for v in range(n):
                if adj[u][v] and v not in dist:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    return dist


def brute_force(g: PropertyGraph, n, rels, text):
    """Enumerate every assignment of pattern variables; no matrices, no planner."""
    q = parse(text)
    m, ret = q.clauses
    order, anon = [], 0
    paths = []
    for p in m.paths:
        names = []
        for node in p.nodes:
            if node.var is None:
                names.append(f"@{anon}")
                anon += 1
            else:
                names.append(node.var)
            if names[-1] not in order:
                order.append(names[-1])
        paths.append((p, names))

    def adj_for(rel, direction):
        a = [[False] * n for _ in range(n)]
        for (s, r, d) in rels:
            if rel is None or r == rel:
                if direction == IN:
                    a[d][s] = True
                else:
                    a[s][d] = True
        return a

    def value(env, operand):
        if hasattr(operand, "kind"):
            return operand.value
        return g.node_props(env[operand.var]).get(operand.key)

    def cmp(a, op, b):
        if a is None or b is None or isinstance(a, bool) != isinstance(b, bool) or isinstance(a, str) != isinstance(b, str):
            return False
        return {"=": a == b, "<>": a != b, "<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op] if not isinstance(a, bool) or op in ("=", "<>") else False

    rows = []
    for combo in itertools.product(range(n), repeat=len(order)):
        env = dict(zip(order, combo))
        ok = True
        for p, names in paths:
            for node, name in zip(p.nodes, names):
                if node.label and node.label not in g.node_labels(env[name]):
                    ok = False
                for k, lit in node.props:
                    if not cmp(g.node_props(env[name]).get(k), "=", lit.value):
                        ok = False
            for i, e in enumerate(p.edges):
                a = adj_for(e.rel_type, e.direction)
                s, d = env[names[i]], env[names[i + 1]]
                if e.min_hops is None:
                    ok &= a[s][d]
                else:
                    dist = _dist(a, n, s, e.max_hops)
                    ok &= d != s and e.min_hops <= dist.get(d, -1) <= e.max_hops
        for c in m.where:
            ok &= cmp(value(env, c.left), c.op, value(env, c.right))
        if ok:
            rows.append(env)
    from matgraph.cypher import CountAgg, Variable

    if any(isinstance(i, CountAgg) for i in ret.items):
        out = []
        for item in ret.items:
            if isinstance(item.arg, Variable):
                out.append(len(rows))
            else:
                out.append(sum(1 for env in rows if value(env, item.arg) is not None))
        table = [tuple(out)]
    else:
        table = [
            tuple(NodeRef(env[i.name]) if isinstance(i, Variable) else value(env, i) for i in ret.items)
            for env in rows
        ]
    if ret.limit is not None:
        table = table[: ret.limit]
    return table


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 4))
    g = PropertyGraph(capacity=draw(st.integers(1, 8)))
    for _ in range(n):
        labels = draw(st.lists(st.sampled_from(["P", "Q"]), unique=True, max_size=2))
        props = draw(st.dictionaries(st.sampled_from(["v", "w"]), st.integers(-2, 2), max_size=2))
        g.create_node(labels, props)
    rels = draw(st.lists(st.tuples(st.integers(0, n - 1), st.sampled_from(["R", "S"]), st.integers(0, n - 1)), max_size=10))
    for s, r, d in rels:
        g.create_edge(s, r, d)
    return g, n, rels


@st.composite
def small_queries(draw, allow_self_loop_sensitive=True):
    vars_ = ["a", "b", "c"]

    def node():
        var = draw(st.one_of(st.none(), st.sampled_from(vars_)))
        label = draw(st.one_of(st.none(), st.sampled_from(["P", "Q"])))
        props = ""
        if draw(st.integers(0, 4)) == 0:
            props = " {v: %d}" % draw(st.integers(-2, 2))
        inner = (var or "") + (f":{label}" if label else "") + props
        return f"({inner})", var

    def edge():
        rel = draw(st.one_of(st.none(), st.sampled_from(["R", "S"])))
        hops = ""
        if draw(st.booleans()):
            lo = draw(st.integers(1, 3))
            hops = f"*{lo}..{draw(st.integers(lo, 4))}"
        body = (f":{rel}" if rel else "") + hops
        if draw(st.booleans()):
            return f"<-[{body}]-"
        return f"-[{body}]->"

    parts, bound = [], []
    for _ in range(draw(st.integers(1, 2))):
        text, v = node()
        path = text
        if v:
            bound.append(v)
        for _ in range(draw(st.integers(0, 2))):
            text, v = node()
            path += edge() + text
            if v:
                bound.append(v)
        parts.append(path)
    if not bound:
        parts[0] = "(a)" + parts[0][parts[0].index(")") + 1:]
        bound.append("a")
    bound = sorted(set(bound))
    where = []
    for _ in range(draw(st.integers(0, 2))):
        v = draw(st.sampled_from(bound))
        where.append(f"{v}.{draw(st.sampled_from(['v', 'w']))} {draw(st.sampled_from(['=', '<>', '<', '>=']))} {draw(st.integers(-2, 2))}")
    if draw(st.booleans()):
        items = ["count(%s)" % draw(st.sampled_from(bound + [f"{bound[0]}.v"]))]
    else:
        items = draw(st.lists(st.sampled_from(bound + [f"{b}.w" for b in bound]), min_size=1, max_size=3))
    q = "MATCH " + ", ".join(parts)
    if where:
        q += " WHERE " + " AND ".join(where)
    q += " RETURN " + ", ".join(items)
    if draw(st.integers(0, 3)) == 0:
        q += f" LIMIT {draw(st.integers(0, 4))}"
    return q


@settings(max_examples=300, deadline=None)
@given(small_graphs(), small_queries())
def test_executor_matches_brute_force(gr, q):
    g, n, rels = gr
    p = plan(parse(q), g)
    check_plan(p)
    assert execute(p, g).rows == brute_force(g, n, rels, q), q


@settings(max_examples=100, deadline=None)
@given(small_graphs(), small_queries())
def test_execute_deterministic(gr, q):
    g, _, _ = gr
    a = format_result(execute(plan(parse(q), g), g))
    b = format_result(execute(plan(parse(q), g), g))
    assert a == b


@settings(max_examples=100, deadline=None)
@given(small_graphs(), st.sampled_from(["R", "S"]))
def test_count_equals_nvals(gr, rel):
    g, _, _ = gr
    assert run(g, f"MATCH (a)-[:{rel}]->(b) RETURN count(b)").rows == [(g.relation_matrix(rel).nvals,)]


@settings(max_examples=150, deadline=None)
@given(small_graphs(), st.sampled_from(["", ":R", ":S"]), st.booleans())
def test_varlen_one_hop_equals_traverse(gr, rel, incoming):
    g, n, rels = gr
    loops = {(s, r) for s, r, d in rels if s == d and (not rel or r == rel[1:])}
    if loops:
        return  # shortest-distance semantics drop the seed, a one-hop Traverse keeps self-loops
    pat = "(a)<-[{}]-(b)" if incoming else "(a)-[{}]->(b)"
    one = run(g, f"MATCH {pat.format(rel)} RETURN a, b").rows
    var = run(g, f"MATCH {pat.format(rel + '*1..1')} RETURN a, b").rows
    assert one == var
    ops1 = operators(plan(parse(f"MATCH {pat.format(rel)} RETURN a"), g))
    ops2 = operators(plan(parse(f"MATCH {pat.format(rel + '*1..1')} RETURN a"), g))
    assert isinstance(ops1[1], Traverse) and isinstance(ops2[1], VarLenTraverse)


def test_varlen_one_hop_self_loop_difference():
    g = graph_from_edges(2, [(0, 0), (0, 1)])
    assert run(g, "MATCH (a)-[:R]->(b) RETURN count(b)").rows == [(2,)]
    assert run(g, "MATCH (a)-[:R]->(b) RETURN a, b").rows == [(NodeRef(0), NodeRef(0)), (NodeRef(0), NodeRef(1))]
    assert run(g, "MATCH (a)-[:R*1..1]->(b) RETURN a, b").rows == [(NodeRef(0), NodeRef(1))]


def test_trace_records_one_thread():
    g = graph_from_edges(4, PATH)
    trace = []
    execute(plan(parse("MATCH (a)-[:R*1..2]->(b) WHERE a.id = 0 RETURN count(b)"), g), g, trace)
    assert len(trace) == len(operators(plan(parse("MATCH (a)-[:R*1..2]->(b) WHERE a.id = 0 RETURN count(b)"), g)))
    assert len(set(trace)) == 1
    assert np.isscalar(trace[0])
