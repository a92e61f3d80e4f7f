"""Reduced ordered binary decision diagrams.

A :class:`BDD` manager owns a node store with a uniqueness table, so two
:class:`NodeRef` handles are equal exactly when they denote the same Boolean
function under the manager's fixed variable order.  Internally nodes are
plain integers (``0`` is FALSE, ``1`` is TRUE); the recursive operations work
on integers and the public API wraps them in ``NodeRef``.

There are no complement edges and no dynamic reordering.  Nodes reachable
from a live :class:`NodeRef` survive garbage collection; unreachable slots go
to a free list and are reused.  Collection only runs at the entry of public
operations, where every intermediate result is held by a handle.
"""
from __future__ import annotations

import random
import sys
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

__all__ = ["BDD", "NodeRef", "ManagerMismatch"]

_LEAF = 1 << 30
_FREE = -1
_CACHE_LIMIT = 1 << 21
_GC_THRESHOLD = 1 << 20

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class ManagerMismatch(ValueError):
    """Operands belong to different managers."""


class NodeRef:
    """Handle to a node of a :class:`BDD` manager."""

    __slots__ = ("bdd", "node")

    def __init__(self, bdd: "BDD", node: int):
        self.bdd = bdd
        self.node = node
        refs = bdd._refs
        refs[node] = refs.get(node, 0) + 1

    def __del__(self):
        try:
            refs = self.bdd._refs
            c = refs[self.node] - 1
        except (AttributeError, KeyError):
            return
        if c:
            refs[self.node] = c
        else:
            del refs[self.node]

    def _other(self, other: "NodeRef") -> int:
        if not isinstance(other, NodeRef):
            raise TypeError(f"expected NodeRef, got {type(other).__name__}")
        if other.bdd is not self.bdd:
            raise ManagerMismatch("operands come from different managers")
        return other.node

    def __and__(self, other):
        self.bdd._maybe_gc()
        return NodeRef(self.bdd, self.bdd._and(self.node, self._other(other)))

    def __or__(self, other):
        self.bdd._maybe_gc()
        return NodeRef(self.bdd, self.bdd._or(self.node, self._other(other)))

    def __xor__(self, other):
        self.bdd._maybe_gc()
        return NodeRef(self.bdd, self.bdd._xor(self.node, self._other(other)))

    def __invert__(self):
        self.bdd._maybe_gc()
        return NodeRef(self.bdd, self.bdd._not(self.node))

    def implies(self, other: "NodeRef") -> "NodeRef":
        return ~self | other

    def iff(self, other: "NodeRef") -> "NodeRef":
        return ~(self ^ other)

    def __le__(self, other: "NodeRef") -> bool:
        """Containment: ``f <= g`` iff ``f -> g`` is valid."""
        return self.bdd._and(self.node, self.bdd._not(self._other(other))) == 0

    def __eq__(self, other):
        if not isinstance(other, NodeRef):
            return NotImplemented
        return self.bdd is other.bdd and self.node == other.node

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((id(self.bdd), self.node))

    def __bool__(self):
        raise TypeError("NodeRef has no truth value; compare with bdd.true/false")

    @property
    def is_false(self) -> bool:
        return self.node == 0

    @property
    def is_true(self) -> bool:
        return self.node == 1

    @property
    def var(self) -> Optional[int]:
        v = self.bdd._var[self.node]
        return None if v == _LEAF else v

    @property
    def low(self) -> "NodeRef":
        return NodeRef(self.bdd, self.bdd._lo[self.node])

    @property
    def high(self) -> "NodeRef":
        return NodeRef(self.bdd, self.bdd._hi[self.node])

    def __len__(self):
        return self.bdd.node_count([self])

    def __repr__(self):
        if self.node < 2:
            return f"NodeRef({bool(self.node)})"
        return f"NodeRef(#{self.node}, var={self.bdd.var_name(self.var)})"


class BDD:
    """Decision-diagram manager with a fixed variable order.

    Variable indices are positions in the order: index 0 is tested first.
    """

    def __init__(self, names: Iterable[str] = (), gc_threshold: int = _GC_THRESHOLD):
        self._refs: Dict[int, int] = {}
        self._free: List[int] = []
        self._gc_base = gc_threshold
        self._gc_next = gc_threshold
        self.gc_runs = 0
        self._var: List[int] = [_LEAF, _LEAF]
        self._lo: List[int] = [0, 1]
        self._hi: List[int] = [0, 1]
        self._unique: Dict[tuple, int] = {}
        self._names: List[str] = []
        self._index: Dict[str, int] = {}
        self._and_cache: Dict[tuple, int] = {}
        self._or_cache: Dict[tuple, int] = {}
        self._xor_cache: Dict[tuple, int] = {}
        self._not_cache: Dict[int, int] = {}
        self._ite_cache: Dict[tuple, int] = {}
        self._quant_caches: Dict[tuple, dict] = {}
        for name in names:
            self.declare(name)

    # -- variables -------------------------------------------------------
    def declare(self, name: str) -> int:
        if name in self._index:
            raise ValueError(f"variable {name!r} already declared")
        idx = len(self._names)
        self._names.append(name)
        self._index[name] = idx
        return idx

    @property
    def num_vars(self) -> int:
        return len(self._names)

    def var_name(self, v: int) -> str:
        return self._names[v]

    def var_index(self, name: str) -> int:
        return self._index[name]

    @property
    def var_names(self) -> List[str]:
        return list(self._names)

    @property
    def true(self) -> NodeRef:
        return NodeRef(self, 1)

    @property
    def false(self) -> NodeRef:
        return NodeRef(self, 0)

    def const(self, value: bool) -> NodeRef:
        return NodeRef(self, 1 if value else 0)

    def mk_var(self, v) -> NodeRef:
        """Node testing variable ``v`` (index or name); high is TRUE."""
        if isinstance(v, str):
            v = self._index[v]
        if not 0 <= v < len(self._names):
            raise IndexError(f"unknown variable index {v}")
        return NodeRef(self, self._mk(v, 0, 1))

    def wrap(self, node: int) -> NodeRef:
        if not 0 <= node < len(self._var) or self._var[node] == _FREE:
            raise IndexError(node)
        return NodeRef(self, node)

    def _check(self, f: NodeRef) -> int:
        if not isinstance(f, NodeRef):
            raise TypeError(f"expected NodeRef, got {type(f).__name__}")
        if f.bdd is not self:
            raise ManagerMismatch("operand comes from a different manager")
        return f.node

    def __len__(self):
        """Number of allocated nodes, terminals included."""
        return len(self._var) - len(self._free)

    # -- core ------------------------------------------------------------
    def _mk(self, v: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (v, lo, hi)
        r = self._unique.get(key)
        if r is None:
            if self._free:
                r = self._free.pop()
                self._var[r] = v
                self._lo[r] = lo
                self._hi[r] = hi
            else:
                r = len(self._var)
                self._var.append(v)
                self._lo.append(lo)
                self._hi.append(hi)
            self._unique[key] = r
        return r

    # -- garbage collection ---------------------------------------------
    def _maybe_gc(self) -> None:
        if len(self._unique) > self._gc_next:
            self.collect_garbage()

    def collect_garbage(self) -> int:
        """Free every node unreachable from a live handle; returns the
        number of nodes freed.  Operation caches are cleared."""
        var, lo, hi = self._var, self._lo, self._hi
        mark = bytearray(len(var))
        mark[0] = mark[1] = 1
        stack = list(self._refs)
        while stack:
            n = stack.pop()
            if mark[n]:
                continue
            mark[n] = 1
            stack.append(lo[n])
            stack.append(hi[n])
        unique = self._unique
        freed = []
        for n in range(2, len(var)):
            if not mark[n] and var[n] != _FREE:
                del unique[(var[n], lo[n], hi[n])]
                var[n] = _FREE
                lo[n] = hi[n] = 0
                freed.append(n)
        freed.reverse()
        self._free.extend(freed)
        self._free.sort(reverse=True)
        self.clear_caches()
        self.gc_runs += 1
        self._gc_next = max(self._gc_base, 2 * len(unique))
        return len(freed)

    def clear_caches(self) -> None:
        self._and_cache.clear()
        self._or_cache.clear()
        self._xor_cache.clear()
        self._not_cache.clear()
        self._ite_cache.clear()
        self._quant_caches.clear()

    def clear_caches_if_large(self, limit: int = _CACHE_LIMIT) -> None:
        size = (len(self._and_cache) + len(self._or_cache) + len(self._xor_cache)
                + len(self._not_cache) + len(self._ite_cache)
                + sum(len(c) for c in self._quant_caches.values()))
        if size > limit:
            self.clear_caches()

    def _not(self, u: int) -> int:
        if u < 2:
            return 1 - u
        cache = self._not_cache
        r = cache.get(u)
        if r is not None:
            return r
        r = self._mk(self._var[u], self._not(self._lo[u]), self._not(self._hi[u]))
        cache[u] = r
        return r

    def _and(self, u: int, v: int) -> int:
        if u == v:
            return u
        if u == 0 or v == 0:
            return 0
        if u == 1:
            return v
        if v == 1:
            return u
        if u > v:
            u, v = v, u
        key = (u, v)
        cache = self._and_cache
        r = cache.get(key)
        if r is not None:
            return r
        var, lo, hi = self._var, self._lo, self._hi
        a, b = var[u], var[v]
        if a == b:
            r = self._mk(a, self._and(lo[u], lo[v]), self._and(hi[u], hi[v]))
        elif a < b:
            r = self._mk(a, self._and(lo[u], v), self._and(hi[u], v))
        else:
            r = self._mk(b, self._and(u, lo[v]), self._and(u, hi[v]))
        cache[key] = r
        return r

    def _or(self, u: int, v: int) -> int:
        if u == v:
            return u
        if u == 1 or v == 1:
            return 1
        if u == 0:
            return v
        if v == 0:
            return u
        if u > v:
            u, v = v, u
        key = (u, v)
        cache = self._or_cache
        r = cache.get(key)
        if r is not None:
            return r
        var, lo, hi = self._var, self._lo, self._hi
        a, b = var[u], var[v]
        if a == b:
            r = self._mk(a, self._or(lo[u], lo[v]), self._or(hi[u], hi[v]))
        elif a < b:
            r = self._mk(a, self._or(lo[u], v), self._or(hi[u], v))
        else:
            r = self._mk(b, self._or(u, lo[v]), self._or(u, hi[v]))
        cache[key] = r
        return r

    def _xor(self, u: int, v: int) -> int:
        if u == v:
            return 0
        if u == 0:
            return v
        if v == 0:
            return u
        if u == 1:
            return self._not(v)
        if v == 1:
            return self._not(u)
        if u > v:
            u, v = v, u
        key = (u, v)
        cache = self._xor_cache
        r = cache.get(key)
        if r is not None:
            return r
        var, lo, hi = self._var, self._lo, self._hi
        a, b = var[u], var[v]
        if a == b:
            r = self._mk(a, self._xor(lo[u], lo[v]), self._xor(hi[u], hi[v]))
        elif a < b:
            r = self._mk(a, self._xor(lo[u], v), self._xor(hi[u], v))
        else:
            r = self._mk(b, self._xor(u, lo[v]), self._xor(u, hi[v]))
        cache[key] = r
        return r

    def _ite(self, f: int, g: int, h: int) -> int:
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        if g == 0 and h == 1:
            return self._not(f)
        if g == 1:
            return self._or(f, h)
        if h == 0:
            return self._and(f, g)
        key = (f, g, h)
        cache = self._ite_cache
        r = cache.get(key)
        if r is not None:
            return r
        var, lo, hi = self._var, self._lo, self._hi
        top = min(var[f], var[g], var[h])
        f0, f1 = (lo[f], hi[f]) if var[f] == top else (f, f)
        g0, g1 = (lo[g], hi[g]) if var[g] == top else (g, g)
        h0, h1 = (lo[h], hi[h]) if var[h] == top else (h, h)
        r = self._mk(top, self._ite(f0, g0, h0), self._ite(f1, g1, h1))
        cache[key] = r
        return r

    # -- public Boolean operations --------------------------------------
    def apply(self, op: str, f: NodeRef, g: NodeRef) -> NodeRef:
        self._maybe_gc()
        u, v = self._check(f), self._check(g)
        if op == "and":
            return NodeRef(self, self._and(u, v))
        if op == "or":
            return NodeRef(self, self._or(u, v))
        if op == "xor":
            return NodeRef(self, self._xor(u, v))
        if op == "implies":
            return NodeRef(self, self._or(self._not(u), v))
        if op == "iff":
            return NodeRef(self, self._not(self._xor(u, v)))
        raise ValueError(f"unknown operator {op!r}")

    def neg(self, f: NodeRef) -> NodeRef:
        self._maybe_gc()
        return NodeRef(self, self._not(self._check(f)))

    def ite(self, f: NodeRef, g: NodeRef, h: NodeRef) -> NodeRef:
        self._maybe_gc()
        return NodeRef(self, self._ite(self._check(f), self._check(g), self._check(h)))

    def conj(self, fs: Iterable[NodeRef]) -> NodeRef:
        r = 1
        for f in fs:
            r = self._and(r, self._check(f))
        return NodeRef(self, r)

    def disj(self, fs: Iterable[NodeRef]) -> NodeRef:
        r = 0
        for f in fs:
            r = self._or(r, self._check(f))
        return NodeRef(self, r)

    # -- quantification --------------------------------------------------
    def _qset(self, vars) -> frozenset:
        out = set()
        for v in vars:
            if isinstance(v, str):
                v = self._index[v]
            if not 0 <= v < len(self._names):
                raise IndexError(f"unknown variable index {v}")
            out.add(v)
        return frozenset(out)

    def _quant_cache(self, kind: str, qs: frozenset) -> dict:
        key = (kind, qs)
        cache = self._quant_caches.get(key)
        if cache is None:
            if len(self._quant_caches) > 256:
                self._quant_caches.clear()
            cache = self._quant_caches[key] = {}
        return cache

    def _exists(self, u: int, qs: frozenset, last: int, cache: dict) -> int:
        if u < 2:
            return u
        v = self._var[u]
        if v > last:
            return u
        r = cache.get(u)
        if r is not None:
            return r
        lo = self._exists(self._lo[u], qs, last, cache)
        if v in qs:
            r = 1 if lo == 1 else self._or(lo, self._exists(self._hi[u], qs, last, cache))
        else:
            r = self._mk(v, lo, self._exists(self._hi[u], qs, last, cache))
        cache[u] = r
        return r

    def exists(self, vars, f: NodeRef) -> NodeRef:
        """Disjunction of the cofactors of ``f`` over every variable in ``vars``."""
        self._maybe_gc()
        u = self._check(f)
        qs = self._qset(vars)
        if not qs:
            return f
        cache = self._quant_cache("exists", qs)
        return NodeRef(self, self._exists(u, qs, max(qs), cache))

    def forall(self, vars, f: NodeRef) -> NodeRef:
        return ~self.exists(vars, ~f)

    def _and_exists(self, u: int, v: int, qs: frozenset, last: int, cache: dict) -> int:
        if u == 0 or v == 0:
            return 0
        if u == 1 and v == 1:
            return 1
        if u == 1 or u == v:
            return self._exists(v, qs, last, self._quant_cache("exists", qs))
        if v == 1:
            return self._exists(u, qs, last, self._quant_cache("exists", qs))
        if u > v:
            u, v = v, u
        var = self._var
        a, b = var[u], var[v]
        top = a if a < b else b
        if top > last:
            return self._and(u, v)
        key = (u, v)
        r = cache.get(key)
        if r is not None:
            return r
        lo, hi = self._lo, self._hi
        u0, u1 = (lo[u], hi[u]) if a == top else (u, u)
        v0, v1 = (lo[v], hi[v]) if b == top else (v, v)
        r0 = self._and_exists(u0, v0, qs, last, cache)
        if top in qs:
            if r0 == 1:
                r = 1
            else:
                r = self._or(r0, self._and_exists(u1, v1, qs, last, cache))
        else:
            r = self._mk(top, r0, self._and_exists(u1, v1, qs, last, cache))
        cache[key] = r
        return r

    def and_exists(self, f: NodeRef, g: NodeRef, vars) -> NodeRef:
        """Relational product ``exists vars. f & g`` in one traversal."""
        self._maybe_gc()
        u, v = self._check(f), self._check(g)
        qs = self._qset(vars)
        if not qs:
            return NodeRef(self, self._and(u, v))
        cache = self._quant_cache("and_exists", qs)
        return NodeRef(self, self._and_exists(u, v, qs, max(qs), cache))

    # -- cofactor / compose / rename -------------------------------------
    def _cofactor(self, u: int, v: int, pol: int, cache: dict) -> int:
        if u < 2:
            return u
        w = self._var[u]
        if w > v:
            return u
        if w == v:
            return self._hi[u] if pol else self._lo[u]
        r = cache.get(u)
        if r is not None:
            return r
        r = self._mk(w, self._cofactor(self._lo[u], v, pol, cache),
                     self._cofactor(self._hi[u], v, pol, cache))
        cache[u] = r
        return r

    def cofactor(self, f: NodeRef, v, polarity) -> NodeRef:
        """``f`` with variable ``v`` fixed to ``polarity``."""
        self._maybe_gc()
        u = self._check(f)
        if isinstance(v, str):
            v = self._index[v]
        if not 0 <= v < len(self._names):
            raise IndexError(f"unknown variable index {v}")
        cache = self._quant_cache("cofactor" + ("1" if polarity else "0"), frozenset((v,)))
        return NodeRef(self, self._cofactor(u, v, 1 if polarity else 0, cache))

    def compose(self, f: NodeRef, v, g: NodeRef) -> NodeRef:
        """``f`` with variable ``v`` replaced by the function ``g``."""
        self._check(g)
        f1 = self.cofactor(f, v, 1)
        f0 = self.cofactor(f, v, 0)
        return NodeRef(self, self._ite(g.node, f1.node, f0.node))

    def _let(self, u: int, values: Mapping[int, int], last: int, cache: dict) -> int:
        if u < 2:
            return u
        v = self._var[u]
        if v > last:
            return u
        r = cache.get(u)
        if r is not None:
            return r
        b = values.get(v)
        if b is None:
            r = self._mk(v, self._let(self._lo[u], values, last, cache),
                         self._let(self._hi[u], values, last, cache))
        else:
            r = self._let(self._hi[u] if b else self._lo[u], values, last, cache)
        cache[u] = r
        return r

    def let(self, assignment, f: NodeRef) -> NodeRef:
        """``f`` with several variables fixed to constants at once."""
        self._maybe_gc()
        u = self._check(f)
        values = {}
        for k, b in assignment.items():
            k = self._index[k] if isinstance(k, str) else k
            if not 0 <= k < len(self._names):
                raise IndexError(f"unknown variable index {k}")
            values[k] = 1 if b else 0
        if not values:
            return f
        return NodeRef(self, self._let(u, values, max(values), {}))

    def _rename(self, u: int, mapping: Mapping[int, int], cache: dict) -> int:
        if u < 2:
            return u
        r = cache.get(u)
        if r is not None:
            return r
        v = self._var[u]
        r = self._mk(mapping.get(v, v), self._rename(self._lo[u], mapping, cache),
                     self._rename(self._hi[u], mapping, cache))
        cache[u] = r
        return r

    def rename(self, f: NodeRef, mapping: Mapping) -> NodeRef:
        """Simultaneous variable substitution.

        The mapping must keep the relative order of the support of ``f``;
        otherwise :class:`ValueError` is raised.
        """
        self._maybe_gc()
        u = self._check(f)
        m = {}
        for a, b in mapping.items():
            a = self._index[a] if isinstance(a, str) else a
            b = self._index[b] if isinstance(b, str) else b
            if not (0 <= a < len(self._names) and 0 <= b < len(self._names)):
                raise IndexError(f"unknown variable in mapping {a}->{b}")
            if a != b:
                m[a] = b
        if not m:
            return f
        support = sorted(self._support(u))
        image = [m.get(v, v) for v in support]
        if any(x >= y for x, y in zip(image, image[1:])):
            raise ValueError("rename mapping is not order-preserving on the support")
        key = tuple(sorted(m.items()))
        cache = self._quant_cache("rename", frozenset(key))
        return NodeRef(self, self._rename(u, m, cache))

    # -- care-set minimisation -------------------------------------------
    def _restrict(self, f: int, c: int, cache: dict) -> int:
        if c == 0:
            return 0
        if c == 1 or f < 2:
            return f
        key = (f, c)
        r = cache.get(key)
        if r is not None:
            return r
        var, lo, hi = self._var, self._lo, self._hi
        vf, vc = var[f], var[c]
        if vc < vf:
            r = self._restrict(f, self._or(lo[c], hi[c]), cache)
        else:
            f0, f1 = lo[f], hi[f]
            if vc == vf:
                c0, c1 = lo[c], hi[c]
            else:
                c0 = c1 = c
            if c0 == 0:
                r = self._restrict(f1, c1, cache)
            elif c1 == 0:
                r = self._restrict(f0, c0, cache)
            else:
                r = self._mk(vf, self._restrict(f0, c0, cache), self._restrict(f1, c1, cache))
        cache[key] = r
        return r

    def restrict_min(self, f: NodeRef, care: NodeRef) -> NodeRef:
        """A function agreeing with ``f`` wherever ``care`` holds.

        Sibling-substitution restrict: where the care set is empty on one
        branch the node is replaced by the other branch.  Falls back to ``f``
        when the heuristic result is larger.
        """
        self._maybe_gc()
        u, c = self._check(f), self._check(care)
        r = self._restrict(u, c, {})
        if r != u and self._count([r]) > self._count([u]):
            r = u
        return NodeRef(self, r)

    # -- inspection ------------------------------------------------------
    def _support(self, u: int) -> set:
        seen = set()
        out = set()
        stack = [u]
        var, lo, hi = self._var, self._lo, self._hi
        while stack:
            n = stack.pop()
            if n < 2 or n in seen:
                continue
            seen.add(n)
            out.add(var[n])
            stack.append(lo[n])
            stack.append(hi[n])
        return out

    def support(self, f: NodeRef) -> frozenset:
        return frozenset(self._support(self._check(f)))

    def _count(self, roots: Sequence[int]) -> int:
        seen = set()
        stack = list(roots)
        lo, hi = self._lo, self._hi
        while stack:
            n = stack.pop()
            if n < 2 or n in seen:
                continue
            seen.add(n)
            stack.append(lo[n])
            stack.append(hi[n])
        return len(seen)

    def node_count(self, fs: Iterable[NodeRef]) -> int:
        """Number of distinct internal nodes reachable from ``fs``."""
        return self._count([self._check(f) for f in fs])

    def nodes(self, fs: Iterable[NodeRef]) -> List[int]:
        """Internal node ids reachable from ``fs``, children before parents."""
        order: List[int] = []
        seen = set()
        lo, hi = self._lo, self._hi

        def visit(n):
            if n < 2 or n in seen:
                return
            seen.add(n)
            visit(lo[n])
            visit(hi[n])
            order.append(n)

        for f in fs:
            visit(self._check(f))
        return order

    def node_triple(self, node: int):
        return self._var[node], self._lo[node], self._hi[node]

    def evaluate(self, f: NodeRef, assignment) -> bool:
        """Value of ``f`` under ``assignment`` (index or name -> bool).

        Unassigned variables in the support raise :class:`KeyError`.
        """
        u = self._check(f)
        vals = {}
        for k, b in assignment.items():
            vals[self._index[k] if isinstance(k, str) else k] = b
        var, lo, hi = self._var, self._lo, self._hi
        while u > 1:
            u = hi[u] if vals[var[u]] else lo[u]
        return u == 1

    def pick_assignment(self, f: NodeRef, vars, rng: Optional[random.Random] = None):
        """A satisfying assignment of ``f`` restricted to ``vars``.

        Without ``rng`` the walk prefers the FALSE branch at every node and
        sets variables off the path to FALSE.  With ``rng`` both choices are
        randomised.  Returns ``None`` when ``f`` is FALSE.  Support variables
        of ``f`` outside ``vars`` are chosen along the way and dropped.
        """
        u = self._check(f)
        if u == 0:
            return None
        idx = [self._index[v] if isinstance(v, str) else v for v in vars]
        chosen = {}
        var, lo, hi = self._var, self._lo, self._hi
        while u > 1:
            l, h = lo[u], hi[u]
            if l == 0:
                bit = 1
            elif h == 0:
                bit = 0
            elif rng is not None:
                bit = rng.getrandbits(1)
            else:
                bit = 0
            chosen[var[u]] = bool(bit)
            u = h if bit else l
        out = {}
        for v in idx:
            if v in chosen:
                out[v] = chosen[v]
            else:
                out[v] = bool(rng.getrandbits(1)) if rng is not None else False
        return out

    def cube(self, assignment) -> NodeRef:
        """Conjunction of literals from an index/name -> bool mapping."""
        items = []
        for k, b in assignment.items():
            items.append((self._index[k] if isinstance(k, str) else k, bool(b)))
        r = 1
        for v, b in sorted(items, reverse=True):
            r = self._mk(v, 0, r) if b else self._mk(v, r, 0)
        return NodeRef(self, r)

    def sat_count(self, f: NodeRef, nvars: Optional[int] = None) -> int:
        """Number of satisfying assignments over variables ``0..nvars-1``."""
        u = self._check(f)
        n = self.num_vars if nvars is None else nvars
        var, lo, hi = self._var, self._lo, self._hi
        memo: Dict[int, int] = {}

        def level(x):
            return n if x < 2 else var[x]

        def count(x):
            if x < 2:
                return x
            r = memo.get(x)
            if r is None:
                l, h = lo[x], hi[x]
                r = (count(l) << (level(l) - var[x] - 1)) + (count(h) << (level(h) - var[x] - 1))
                memo[x] = r
            return r

        return count(u) << level(u)

    def to_dot(self, fs: Sequence[NodeRef], names: Sequence[str] = ()) -> str:
        """DOT text: solid edges for high children, dashed for low."""
        roots = [self._check(f) for f in fs]
        lines = ["digraph bdd {"]
        lines.append('  n0 [label="0", shape=box];')
        lines.append('  n1 [label="1", shape=box];')
        for n in self.nodes(fs):
            v, l, h = self.node_triple(n)
            lines.append(f'  n{n} [label="{self._names[v]}"];')
            lines.append(f"  n{n} -> n{h};")
            lines.append(f"  n{n} -> n{l} [style=dashed];")
        for i, r in enumerate(roots):
            label = names[i] if i < len(names) else f"f{i}"
            lines.append(f'  r{i} [label="{label}", shape=plaintext];')
            lines.append(f"  r{i} -> n{r};")
        lines.append("}")
        return "\n".join(lines) + "\n"
