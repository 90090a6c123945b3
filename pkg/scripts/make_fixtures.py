"""Regenerate the shipped fixtures in src/hcork/fixtures."""

import json
import pathlib

from hcork.grouppres import Word, commutator_factors, free_reduce, invert_letters
from hcork.kirby import akbulut_cork

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "hcork" / "fixtures"


def dump(name, data):
    (OUT / name).write_text(json.dumps(data, indent=1) + "\n")


def letters_witness(word):
    # z_k is the dual of the killer H_k, so any word is a product of those duals
    return [{"relator": abs(a), "conjugator": [], "sign": 1 if a > 0 else -1} for a in word]


def stage5():
    s, t = 1, 2
    # binary icosahedral group: perfect, nontrivial
    r3 = (s, t, s, t, -s, -s, -s)
    r4 = (s, s, s, -t, -t, -t, -t, -t)
    f3 = (-s, t, t)
    f4 = (-t, s, -t, -t, s, -t, -t, s)
    witnesses = []
    for l, r, f in ((3, r3, f3), (4, r4, f4)):
        k = Word(free_reduce(invert_letters(r) + f))
        for a, b, c in commutator_factors(k):
            witnesses.append({"relator": l, "a": list(a.reduced), "b": list(b.reduced),
                              "c": list(c.reduced), "b_witness": letters_witness(b.reduced)})
    return {
        "name": "stage5-icosahedral",
        "n": 1,
        "boundary3": [[1]],
        "intersections": [{"i": 1, "j": 1, "signs": [1]}],
        "ordering": "careful",
        "ambient": {"r": 1, "t": 2, "handles": [
            {"relator_L1": [1], "relator_L3": [1]},
            {"relator_L1": [2], "relator_L3": [2]},
            {"relator_L1": [], "relator_L3": list(r3)},
            {"relator_L1": [], "relator_L3": list(r4)},
        ]},
        "witnesses": witnesses,
        "realize_arcs": True,
        # the perfect complement is searched once before the witnesses are
        # used; a large budget there only burns time
        "budgets": {"stage5": 2000},
    }


def main():
    OUT.mkdir(exist_ok=True)
    dump("minimal.json", {"name": "minimal", "n": 1, "boundary3": [[1]],
                          "intersections": [{"i": 1, "j": 1, "signs": [1]}],
                          "ordering": "careful", "ambient": {"r": 0, "t": 0}})
    dump("akbulut.json", {"name": "akbulut", "n": 1, "boundary3": [[1]],
                          "intersections": [{"i": 1, "j": 1, "signs": [1, 1, -1]}],
                          "ordering": "careful",
                          "ambient": {"r": 0, "t": 0, "handles": [
                              {"relator_L1": [1, 2], "relator_L3": []},
                              {"relator_L1": [2, 3], "relator_L3": []},
                              {"relator_L1": [3], "relator_L3": []}]}})
    inter = [{"i": 1, "j": 1, "signs": [1, 1, -1]}, {"i": 2, "j": 1, "signs": [1, -1]},
             {"i": 1, "j": 2, "signs": [1, -1]}, {"i": 2, "j": 2, "signs": [1, 1, -1]}]
    for order in ("natural", "careful"):
        dump(f"interleaved-{order}.json", {"name": f"interleaved-{order}", "n": 2,
                                          "intersections": inter, "ordering": order,
                                          "ambient": {"r": 0, "t": 0}})
    dump("slid.json", {"name": "slid", "n": 2, "boundary3": [[1, 1], [0, 1]],
                       "intersections": [{"i": 1, "j": 1, "signs": [1]},
                                         {"i": 1, "j": 2, "signs": [1]},
                                         {"i": 2, "j": 2, "signs": [1]}],
                       "ambient": {"r": 0, "t": 0}})
    dump("swapped.json", {"name": "swapped", "n": 2, "boundary3": [[0, 1], [1, 0]],
                          "intersections": [{"i": 1, "j": 2, "signs": [1, 1, -1]},
                                            {"i": 2, "j": 1, "signs": [1]}],
                          "ambient": {"r": 0, "t": 0}})
    dump("stage5.json", stage5())
    dump("akbulut-diagram.json", akbulut_cork().to_json())
    (OUT / "x-squared.txt").write_text("# <x | x^2>\nrank 1\n1 1\n")
    (OUT / "two-generator.txt").write_text("rank 2\n1 2\n1\n")


if __name__ == "__main__":
    main()
