#!/usr/bin/env python3
"""Generate golden expectations for the corpus.

Each model is expanded by hand below: every process is a Python successor
function whose guards mirror the FSP text. Composites are built as the full
cartesian product of their parts, with transitions computed for every tuple;
reachable states are then numbered breadth-first. Analysis (safety, deadlock,
terminal sets via networkx, progress) follows the same conventions as the
checker:

* labels order component-wise, integers before words;
* successors are visited by label, ties in source order (primitive
  processes) or by target tuple (composites), ERROR last;
* the shortest trace is the breadth-first parent path.

Writes NAME.expect.json and, except for the large stress model,
NAME.aut.golden next to each NAME.fsp.

    python3 corpus/gen_goldens.py
"""

import itertools
import json
import sys
from collections import deque
from pathlib import Path

import networkx as nx

ERROR = "ERROR"
STOP = "STOP"
HERE = Path(__file__).resolve().parent


# ---- labels ----

def L(*parts):
    return tuple(parts)


def key(label):
    return tuple((0, p) if isinstance(p, int) else (1, p.encode()) for p in label)


def show(label):
    return ".".join(str(p) for p in label)


# ---- explicit LTS ----

class Lts:
    def __init__(self, name, alphabet, trans, end, stop):
        self.name = name
        self.alphabet = sorted(set(alphabet), key=key)
        self.trans = trans  # list of sorted [(label, target)], target int or ERROR
        self.end = set(end)
        self.stop = set(stop)

    def n(self):
        return len(self.trans)

    def ntrans(self):
        return sum(len(t) for t in self.trans)


def tkey(t):
    return (1, 0) if t == ERROR else (0, t)


def sort_out(out):
    return sorted(set(out), key=lambda lt: (key(lt[0]), tkey(lt[1])))


def compile_proc(name, init, succ, end=()):
    """BFS over hand-expanded states; succ(state) lists (label, next) in
    source order. STOP is the shared stop state."""
    index = {init: 0}
    states = [init]
    trans = []
    i = 0
    while i < len(states):
        s = states[i]
        moves = [] if s in (STOP, "END") else succ(s)
        moves = sorted(moves, key=lambda m: key(m[0]))  # stable
        out = []
        for lab, nxt in moves:
            if nxt == ERROR:
                out.append((lab, ERROR))
                continue
            if nxt not in index:
                index[nxt] = len(states)
                states.append(nxt)
            out.append((lab, index[nxt]))
        trans.append(sort_out(out))
        i += 1
    alphabet = {lab for out in trans for lab, _ in out}
    stop = {index[STOP]} if STOP in index else set()
    ends = {index[e] for e in end if e in index}
    if "END" in index:
        ends.add(index["END"])
    return Lts(name, alphabet, trans, ends, stop)


def make_property(lts):
    trans = []
    for s, out in enumerate(lts.trans):
        have = {lab for lab, _ in out}
        labs = [lab for lab, _ in out]
        assert len(labs) == len(have), "property must be deterministic"
        extra = [] if s in lts.end else [(a, ERROR) for a in lts.alphabet if a not in have]
        trans.append(sort_out(out + extra))
    return Lts(lts.name, lts.alphabet, trans, lts.end, lts.stop)


def map_labels(lts, f):
    trans = [sort_out([(f(a), t) for a, t in out]) for out in lts.trans]
    return Lts(lts.name, [f(a) for a in lts.alphabet], trans, lts.end, lts.stop)


def prefix(lts, p):
    return map_labels(lts, lambda a: tuple(p) + a)


def relabel(lts, pairs):
    def f(a):
        for new, old in pairs:
            if a[: len(old)] == old:
                return new + a[len(old):]
        return a
    return map_labels(lts, f)


def compose(name, parts):
    """Naive product: transitions for every tuple of the full cartesian
    product, then breadth-first numbering of the reachable part."""
    if len(parts) == 1:
        p = parts[0]
        return Lts(name, p.alphabet, p.trans, p.end, p.stop)
    alphabet = sorted({a for p in parts for a in p.alphabet}, key=key)
    owners = {a: [i for i, p in enumerate(parts) if a in set(p.alphabet)] for a in alphabet}
    local = [
        [{} for _ in p.trans] for p in parts
    ]
    for i, p in enumerate(parts):
        for s, out in enumerate(p.trans):
            for a, t in out:
                local[i][s].setdefault(a, []).append(t)

    def moves(tup):
        out = []
        cand = sorted({a for i, s in enumerate(tup) for a in local[i][s]}, key=key)
        for a in cand:
            own = owners[a]
            if not all(a in local[i][tup[i]] for i in own):
                continue
            for pick in itertools.product(*(local[i][tup[i]][a] for i in own)):
                if ERROR in pick:
                    out.append((a, ERROR))
                    continue
                nxt = list(tup)
                for i, t in zip(own, pick):
                    nxt[i] = t
                out.append((a, tuple(nxt)))
        return out

    product = {tup: moves(tup) for tup in itertools.product(*(range(p.n()) for p in parts))}

    def tup_key(t):
        return (1, ()) if t == ERROR else (0, t)

    behaving = [i for i, p in enumerate(parts) if p.alphabet] or list(range(len(parts)))
    init = tuple(0 for _ in parts)
    index = {init: 0}
    order = [init]
    trans = []
    i = 0
    while i < len(order):
        tup = order[i]
        out = []
        for a, t in sorted(product[tup], key=lambda m: (key(m[0]), tup_key(m[1]))):
            if t == ERROR:
                out.append((a, ERROR))
                continue
            if t not in index:
                index[t] = len(order)
                order.append(t)
            out.append((a, index[t]))
        trans.append(sort_out(out))
        i += 1
    end = {k for k, t in enumerate(order) if all(t[j] in parts[j].end for j in behaving)}
    stop = {k for k, t in enumerate(order) if all(t[j] in parts[j].stop for j in range(len(parts)))}
    return Lts(name, alphabet, trans, end, stop)


# ---- analysis ----

def bfs(lts):
    parent = {0: None}
    order = []
    q = deque([0])
    while q:
        s = q.popleft()
        order.append(s)
        for a, t in lts.trans[s]:
            if t != ERROR and t not in parent:
                parent[t] = (s, a)
                q.append(t)
    return order, parent


def trace_to(parent, s):
    out = []
    while parent[s] is not None:
        p, a = parent[s]
        out.append(a)
        s = p
    return out[::-1]


def terminal_sets(lts):
    g = nx.DiGraph()
    g.add_nodes_from(range(lts.n()))
    for s, out in enumerate(lts.trans):
        for _, t in out:
            if t != ERROR:
                g.add_edge(s, t)
    reach = nx.descendants(g, 0) | {0}
    sub = g.subgraph(reach)
    sets = []
    for comp in nx.strongly_connected_components(sub):
        if all(t in comp for s in comp for t in sub.successors(s)):
            labels = {a for s in comp for a, t in lts.trans[s] if t != ERROR and t in comp}
            sets.append((sorted(comp), labels))
    sets.sort(key=lambda x: x[0][0])
    return sets


def shortest_cycle(lts, members, start):
    parent = {}
    q = deque([start])
    while q:
        s = q.popleft()
        for a, t in lts.trans[s]:
            if t == ERROR or t not in members:
                continue
            if t == start:
                out = [a]
                cur = s
                while cur != start:
                    p, pa = parent[cur]
                    out.append(pa)
                    cur = p
                return out[::-1]
            if t not in parent:
                parent[t] = (s, a)
                q.append(t)
    return []


def analyze(lts, progress=()):
    order, parent = bfs(lts)
    violations = []
    warnings = []
    for s in order:
        bad = [a for a, t in lts.trans[s] if t == ERROR]
        if bad:
            violations.append(dict(kind="safety", subject=lts.name,
                                   trace=trace_to(parent, s) + [bad[0]], cycle=None))
            break
    for s in order:
        if not lts.trans[s] and s not in lts.end:
            v = dict(kind="deadlock", subject="DEADLOCK", trace=trace_to(parent, s), cycle=None)
            if s in lts.stop:
                v["note"] = "terminal-STOP"
            violations.append(v)
            break
    sets = terminal_sets(lts)
    set_of = {s: i for i, (members, _) in enumerate(sets) for s in members}
    alpha = set(lts.alphabet)
    for name, actions in progress:
        for a in sorted(actions, key=key):
            if a not in alpha:
                warnings.append(f"progress {name}: `{show(a)}` is not in the alphabet")
        for s in order:
            if s in set_of and not (sets[set_of[s]][1] & set(actions)):
                members = set(sets[set_of[s]][0])
                violations.append(dict(kind="progress", subject=name, trace=trace_to(parent, s),
                                       cycle=shortest_cycle(lts, members, s)))
                break
    for v in violations:
        v["trace"] = [show(a) for a in v["trace"]]
        if v["cycle"] is not None:
            v["cycle"] = [show(a) for a in v["cycle"]]
    return dict(
        schemaVersion="1",
        target=lts.name,
        result="FAIL" if violations else "PASS",
        stats=dict(states=lts.n(), transitions=lts.ntrans(), alphabet=len(lts.alphabet), elapsed_ms=0),
        violations=violations,
        warnings=warnings,
        terminal_sets=len(sets),
    )


def aut(lts):
    n = lts.n()
    has_error = any(t == ERROR for out in lts.trans for _, t in out)
    lines = [f"des (0, {lts.ntrans()}, {n + (1 if has_error else 0)})"]
    for s, out in enumerate(lts.trans):
        for a, t in out:
            lines.append(f'({s}, "{show(a)}", {n if t == ERROR else t})')
    return "\n".join(lines) + "\n"


# ---- hand-expanded models ----

R = range(1, 10)


def route_succ(state):
    kind, v = state
    out = []
    if kind == "FULL":
        if v == 7:
            out.append((L("readunloadSign"), ("FULL", v)))
        if v != 7:
            out.append((L("readSign", v), ("FULL", v)))
        if v >= 1 and v <= 6:
            out.append((L("movetonext"), ("FULL", v + 1)))
        if v == 7:
            out.append((L("waitforunloading"), ("EMPTY", 7)))
    else:
        if v == 1:
            out.append((L("readloadSign"), ("EMPTY", 1)))
        if v != 1:
            out.append((L("readSign", v), ("EMPTY", v)))
        if v == 7:
            out.append((L("movetonext"), ("EMPTY", v + 1)))
        if v == 8:
            out.append((L("movetonext"), ("EMPTY", 5)))
        if v == 5:
            out.append((L("movetonext"), ("EMPTY", v - 1)))
        if v == 4:
            out.append((L("movetonext"), ("EMPTY", v - 1)))
        if v == 3:
            out.append((L("movetonext"), ("EMPTY", 9)))
        if v == 9:
            out.append((L("movetonext"), ("EMPTY", 1)))
        if v == 3:
            out.append((L("movetoprevious"), ("EMPTY", v + 1)))
        if v == 4:
            out.append((L("movetoprevious"), ("EMPTY", v + 1)))
        if v == 5:
            out.append((L("movetoprevious"), ("EMPTY", 8)))
        if v == 1:
            out.append((L("waitforloading"), ("FULL", 1)))
    for _, nxt in out:
        assert nxt[1] in R
    return out


def route():
    return compile_proc("ROUTE", ("EMPTY", 9), route_succ)


def carrier_succ(state):
    return {
        "MOVE_EMPTY": [(L("readSign", s), "ME_signed") for s in R] + [(L("readloadSign"), "ME_load")],
        "ME_signed": [(L("movetonext"), "MOVE_EMPTY"), (L("movetoprevious"), "MOVE_EMPTY")],
        "ME_load": [(L("waitforloading"), "MOVE_FULL")],
        "MOVE_FULL": [(L("readSign", s), "MF_signed") for s in R] + [(L("readunloadSign"), "MF_unload")],
        "MF_signed": [(L("movetonext"), "MOVE_FULL")],
        "MF_unload": [(L("waitforunloading"), "MOVE_EMPTY")],
    }[state]


def carrier():
    return compile_proc("CARRIER", "MOVE_EMPTY", carrier_succ)


MAXS = 2
S = range(0, MAXS + 1)


def stock_full_succ(state):
    kind, st = state
    if kind == "send":
        return [(L("send"), ("FULL", st - 1))]
    out = [(L("stockCountA", st), ("FULL", st))]
    if st > 0:
        out.append((L("decrementStockA"), ("send", st)))
    if st == 0:
        out.append((L("stockEmptyA"), STOP))
    return out


def stock_empty_succ(state):
    kind, st = state
    if kind == "inc":
        return [(L("incrementStockB"), ("EMPTY", st + 1))]
    out = [(L("stockCountB", st), ("EMPTY", st))]
    if st < MAXS:
        out.append((L("receive"), ("inc", st)))
    if st >= MAXS:
        out.append((L("stockFullB"), STOP))
    return out


def stocksystem():
    full = compile_proc("STOCKFULL_MANAGEMENT", ("FULL", MAXS), stock_full_succ)
    empty = compile_proc("STOCKEMPTY_MANAGEMENT", ("EMPTY", 0), stock_empty_succ)
    pairs = [(L("decrementStockA"), L("receive")), (L("incrementStockB"), L("send"))]
    return compose("STOCKSYSTEM", [relabel(full, pairs), relabel(empty, pairs)])


MIN, MAX = 0, 3


def noloss_succ(state):
    if state == "NOLOSS_Stock":
        return [(L("empty", "loaded"), ("ONTHEWAY", 1))]
    _, part = state
    out = []
    if part > MIN and part < MAX:
        out.append((L("full", "moveto", part), ("ONTHEWAY", part + 1)))
    if part == MAX:
        out.append((L("full", "unloaded"), "NOLOSS_Stock"))
    return out


def noloss_stock():
    return make_property(compile_proc("NOLOSS_Stock", "NOLOSS_Stock", noloss_succ))


def noloss():
    return compose("NOLOSS", [prefix(noloss_stock(), L("c", i)) for i in (1, 2)])


def cycle_proc(name, labels):
    """name = (l0 -> l1 -> ... -> name)."""
    k = len(labels)
    return compile_proc(name, 0, lambda i: [(labels[i], (i + 1) % k)])


def bad():
    driver = cycle_proc("BADDRIVER", [L("c", 1, "full", "moveto", 1), L("c", 1, "empty", "loaded")])
    return compose("BAD", [driver, prefix(noloss_stock(), L("c", 1))])


def good():
    driver = cycle_proc("GOODDRIVER", [
        L("c", 1, "empty", "loaded"),
        L("c", 1, "full", "moveto", 1),
        L("c", 1, "full", "moveto", 2),
        L("c", 1, "full", "unloaded"),
    ])
    return compose("GOOD", [driver, prefix(noloss_stock(), L("c", 1))])


def loader():
    return cycle_proc("LOADER", [L("waitforloading")])


def unloader():
    return cycle_proc("UNLOADER", [L("waitforunloading")])


def stop_only():
    return compile_proc("P", STOP, lambda s: [])


UNLOAD = ("UNLOAD", {L("waitforunloading")})
LOAD = ("LOAD", {L("waitforloading")})

FIXTURES = {
    "route": (route, ()),
    "carrier": (carrier, ()),
    "stock": (stocksystem, ()),
    "noloss": (noloss, ()),
    "carrier_route": (lambda: compose("CARRIER_ROUTE", [carrier(), route()]), (UNLOAD,)),
    "transport": (lambda: compose("TRANSPORT", [carrier(), route(), loader(), unloader()]), (LOAD, UNLOAD)),
    "baddriver": (bad, ()),
    "gooddriver": (good, ()),
    "loader": (loader, ()),
    "unloader": (unloader, ()),
    "progress_stop": (stop_only, (UNLOAD,)),
    "carriers6": (lambda: compose("CARRIERS", [prefix(carrier(), L("c", i)) for i in range(1, 7)]), ()),
}

NO_AUT = {"carriers6"}


def main():
    names = sys.argv[1:] or list(FIXTURES)
    for name in names:
        build, progress = FIXTURES[name]
        lts = build()
        report = analyze(lts, progress)
        (HERE / f"{name}.expect.json").write_text(json.dumps(report, indent=2) + "\n")
        if name not in NO_AUT:
            (HERE / f"{name}.aut.golden").write_text(aut(lts))
        s = report["stats"]
        print(f"{name}: {report['result']} states={s['states']} transitions={s['transitions']}")


if __name__ == "__main__":
    main()
