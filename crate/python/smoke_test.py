"""Smoke test for the sdym extension module.

Build and install first:  cd crates/python && maturin develop --release
"""

import os
import tempfile

import sdym


def check(cond, msg):
    if not cond:
        raise SystemExit(f"FAIL: {msg}")
    print(f"ok   {msg}")


def main():
    dims = [3, 3, 3, 3]

    a = sdym.ConnectionField.zero(dims)
    f = sdym.curvature(a)
    check(sdym.residual_norm(f, "euclid", "sd") == 0.0, "flat connection has zero residual")

    a = sdym.ConnectionField.random(dims, algebra="sl2c", seed=1, scale=0.5)
    f = sdym.curvature(a)
    for metric in ("euclid", "mink"):
        sign = 1.0 if metric == "euclid" else -1.0
        check(sdym.double_star(f, metric) == f.diagonal_down_shift() * sign, f"{metric} double star is a signed diagonal shift")
        for dual in ("sd", "asd"):
            d = sdym.residual_componentwise(a, metric, dual).max_abs_diff(sdym.residual(f, metric, dual))
            check(d <= 1e-13, f"{metric}/{dual} componentwise residual agrees ({d:.1e})")

    v = [[0.5j, 1 + 0j], [-1 + 0j, -0.5j]]
    imp = sdym.CurvatureField.impulse([4, 4, 4, 4], [0, 1, 2, 3], "13", v)
    s = sdym.star(imp, "euclid")
    check(s.get([1, 1, 3, 3], "24") == [[-x for x in row] for row in v], "star sends a 13 impulse to 24 with sign -1")

    for metric in ("euclid", "mink"):
        for dual in ("sd", "asd"):
            syn = sdym.CurvatureField.synthetic([3, 4, 3, 2], metric, dual, seed=5)
            check(sdym.residual_norm(syn, metric, dual) == 0.0, f"synthetic {metric}/{dual} field is exact")
            check(sdym.check_diagonal_relation(syn)[0], f"synthetic {metric}/{dual} field obeys the diagonal relation")

    box = sdym.CurvatureField.impulse([6, 6, 6, 6], [1, 1, 1, 1], "12", v, boundary="zero")
    verdict = sdym.verify_triviality_theorem(box, [3, 3, 3, 3], "euclid", "sd")
    check(verdict == "violates_duality", f"compact impulse verdict is {verdict}")

    a0 = sdym.ConnectionField.random(dims, seed=2024, scale=1e-2)
    a1, report = sdym.solve(a0, "euclid", "sd")
    trace = [r for _, r, _ in report["trace"]]
    check(report["converged"] and report["final_residual"] <= 1e-8, f"solver converged in {report['iterations']} steps")
    check(all(b < a for a, b in zip(trace, trace[1:])), "solver trace strictly decreases")

    g = sdym.gradient(a0, "mink", "asd")
    check(len(g) == len(sdym.coordinates(a0)), "gradient has one entry per coordinate")

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "a.field")
        sdym.save(a1, path, metric="euclid")
        check(sdym.load(path) == a1, "field file round trip")
        with open(path) as fh:
            text = fh.read()
        with open(path, "w") as fh:
            fh.write(text.replace('"format_version": 1', '"format_version": 5'))
        try:
            sdym.load(path)
            check(False, "unsupported version rejected")
        except ValueError as e:
            check("format_version" in str(e), "unsupported version rejected")

    check(sdym.format_g17(0.1) == "0.10000000000000001", "17-digit formatting")
    print("all smoke tests passed")


if __name__ == "__main__":
    main()
