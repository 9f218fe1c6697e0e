"""A walk through the library on the bundled example algebras.

Run with ``python3 demos/tour.py``.
"""

from taylorlab import corpus
from taylorlab.absorption import absorbs, min_taylor_3abs
from taylorlab.classify import four_types, omitting_types
from taylorlab.clone import is_minimal_taylor, unified_operation
from taylorlab.edges import edge_graph
from taylorlab.manifest import load_fixture


def show_edges(alg):
    g = edge_graph(alg, minimal_only=True)
    for a, b, kind, _ in g.arcs:
        print(f"  {a} -> {b}: {kind}")


def main():
    rps = corpus.rock_paper_scissors()
    print("rock-paper-scissors")
    print("  minimal Taylor:", is_minimal_taylor(rps)[0])
    print("  four types case:", four_types(rps).case)
    show_edges(rps)

    # {0,1} absorbs through a 4-ary term, but it is not a center
    m = load_fixture("maj-first")
    res = absorbs(m, [0, 1])
    print("\nmajority with first-argument default")
    print("  {0,1} absorbs with", res.witness, f"(arity {res.witness.arity})")
    print("  {0,1} is a center:", min_taylor_3abs(m, [0, 1]))

    star = load_fixture("star")
    print("\nstar algebra")
    print("  {3} absorbs up to arity 4:", absorbs(star, [3]).verdict)
    show_edges(star)

    print("\nomitting types")
    for alg in corpus.boolean_four():
        rep = omitting_types(alg)
        free = [k for k, v in rep.free.items() if v]
        print(f"  {alg.name:10} free of: {', '.join(free) or 'nothing'}")

    z3 = corpus.affine_zp(3)
    print("\nunified operation on Z3:", unified_operation(z3))


if __name__ == "__main__":
    main()
