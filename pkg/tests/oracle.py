"""Small reference evaluators used as independent oracles in the tests."""
from mvlaws.syntax import Atom, Const, Exists, Forall, Ident, Op


def naive_value(M, node, env):
    """Direct recursive evaluation over the full domain, no compilation or shortcuts."""
    A = M.algebra
    if isinstance(node, Atom):
        return int(M.tables[node.rel][tuple(env[v] for v in node.args)])
    if isinstance(node, Ident):
        return A.top if env[node.left] == env[node.right] else A.bottom
    if isinstance(node, Const):
        return A.index(node.label)
    if isinstance(node, Op):
        return A.apply(node.name, *(naive_value(M, a, env) for a in node.args))
    if isinstance(node, (Forall, Exists)):
        vals = [naive_value(M, node.body, {**env, node.var: i}) for i in range(M.n)]
        return A.meet_all(vals) if isinstance(node, Forall) else A.join_all(vals)
    raise TypeError(node)


def boolean_value(tables, node, env, n):
    """Two-valued semantics with Python booleans."""
    if isinstance(node, Atom):
        t = tables[node.rel]
        for v in node.args:
            t = t[env[v]]
        return bool(t)
    if isinstance(node, Ident):
        return env[node.left] == env[node.right]
    if isinstance(node, Op):
        a = [boolean_value(tables, x, env, n) for x in node.args]
        return {"and": lambda: a[0] and a[1], "or": lambda: a[0] or a[1], "not": lambda: not a[0],
                "imp": lambda: (not a[0]) or a[1], "oplus": lambda: a[0] or a[1],
                "odot": lambda: a[0] and a[1]}[node.name]()
    if isinstance(node, Forall):
        return all(boolean_value(tables, node.body, {**env, node.var: i}, n) for i in range(n))
    if isinstance(node, Exists):
        return any(boolean_value(tables, node.body, {**env, node.var: i}, n) for i in range(n))
    raise TypeError(node)
