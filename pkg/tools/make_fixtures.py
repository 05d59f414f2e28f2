"""Regenerate the shipped JSON fixtures (run from the repository root)."""

from pathlib import Path

import numpy as np

from hydrobracket.bracket import HydroBracket
from hydrobracket.io import bracket_to_dict, dumps
from hydrobracket.liealg import check_linear_form, to_bracket, vector_field_data
from hydrobracket.symexpr import parse

OUT = Path(__file__).resolve().parents[1] / "src" / "hydrobracket" / "fixtures"
U2 = ("u1", "u2")


def metric(rows, coords=U2):
    return np.array([[parse(s, coords) for s in r] for r in rows], dtype=object)


def save(name, doc):
    (OUT / f"{name}.json").write_text(dumps(doc), encoding="utf-8")


def main():
    OUT.mkdir(exist_ok=True)
    for n in (1, 2, 3):
        save(f"torus_n{n}", bracket_to_dict(to_bracket(vector_field_data(n))))

    c6 = HydroBracket.from_metrics([metric([["1", "0"], ["0", "-1"]]),
                                    metric([["2*u2", "u1 + u2"], ["u1 + u2", "2*u1"]])], U2)
    save("canonical_c6", bracket_to_dict(c6))

    torus = to_bracket(vector_field_data(2))
    b = [t.copy() for t in torus.b]
    b[0] = np.vectorize(lambda e: e.zero_like(), otypes=[object])(b[0])
    save("broken_a2", bracket_to_dict(HydroBracket(torus.g, b, U2)))

    # metrics only: b is derived by the tool
    save("constant_flat", {"components": 2, "dimension": 2, "coordinates": list(U2),
                           "metrics": [[["1", "0"], ["0", "1"]], [["1", "0"], ["0", "-1"]]]})
    zero_b = [[["0"] * 2] * 2] * 2
    save("constant_pair", {"components": 2, "dimension": 2, "coordinates": list(U2),
                           "metrics": [[["1", "0"], ["0", "1"]], [["2", "0"], ["0", "3"]]],
                           "b": [zero_b, zero_b]})

    save("one_component_n3", {"components": 1, "dimension": 3, "coordinates": ["u1"],
                              "metrics": [[["2*u1"]], [["4*u1"]], [["6*u1"]]],
                              "b": [[[["1"]]], [[["2"]]], [[["3"]]]]})
    save("one_component_nonproportional", {"components": 1, "dimension": 2, "coordinates": ["u1"],
                                           "metrics": [[["2*u1"]], [["u1^2 + 1"]]],
                                           "b": [[[["1"]]], [[["u1"]]]]})

    # diagonal pair of the form g = diag(g^i), f^i(u^i) g^i with f = (u1, u2^2); second metric is f*first
    save("diagonal_form_pair", {"components": 2, "dimension": 2, "coordinates": list(U2),
                          "metrics": [[["u1 + u2", "0"], ["0", "u1*u2 + 1"]],
                                      [["u1^2 + u1*u2", "0"], ["0", "u1*u2^3 + u2^2"]]]})

    # flat but incompatible: diag(1, -1) and the push-forward of the identity under (u1, u2 + u1^2)
    save("incompatible_flat_pair", {"components": 2, "dimension": 2, "coordinates": list(U2),
                                    "metrics": [[["1", "0"], ["0", "-1"]],
                                                [["1", "2*u1"], ["2*u1", "4*u1^2 + 1"]]]})

    # almost compatible but not compatible (found by tests/test_compat_search.py):
    # eta = antidiag(1, 1, 1) and u1*eta; (b1) holds, (b3) fails, the pair is singular
    U3 = ["u1", "u2", "u3"]
    antidiag = lambda x: [["0", "0", x], ["0", x, "0"], [x, "0", "0"]]
    save("almost_compatible_pair", {"components": 3, "dimension": 2, "coordinates": U3,
                                    "metrics": [antidiag("1"), antidiag("u1")]})

    quad = ["(u1^2 - u2^2)/2", "(u1 + u2)/2"]
    rat = ["u2 + u1/(2*u2)", "u2 - u1/(2*u2)"]
    save("torus_to_canonical", {"forward": rat, "inverse": quad})
    save("canonical_to_torus", {"forward": quad, "inverse": rat})
    save("identity_change", {"forward": ["u1", "u2"], "inverse": ["u1", "u2"]})

    save("constants_torus_n2", {"b0": [np.asarray(t).astype(int).tolist() for t in vector_field_data(2).b0]})
    L = check_linear_form(c6)
    save("constants_canonical", {"b0": [np.asarray(t).astype(int).tolist() for t in L.b0],
                                 "g0": [np.asarray(m).astype(int).tolist() for m in L.g0]})


if __name__ == "__main__":
    main()
