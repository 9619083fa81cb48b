"""Command-line front end.

Exit codes: 0 when every check passes, 1 on a mathematical failure,
2 on unreadable or malformed input.
"""

import argparse
import json
import shlex
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import gaussian as G
from . import io
from . import metaplectic as mp
from . import selftest
from . import symplectic as sp
from .errors import MpkError
from .numerics import GridFunction, ground_energy, weyl_quadratic_hermite, wigner_grid

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def fmt(x):
    if isinstance(x, (complex, np.complexfloating)):
        return f"{x.real:.12g}{x.imag:+.12g}i"
    if isinstance(x, (float, np.floating)):
        return f"{x:.12g}"
    return str(x)


@dataclass
class RunReport:
    """What a command computed, each numerical claim with its residual and tolerance."""

    command: str
    digest: str = ""
    outputs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    wall_time: float = 0.0

    def output(self, name, value):
        self.outputs[name] = value

    def check(self, name, residual, tolerance, relation="<="):
        ok = residual <= tolerance if relation == "<=" else residual >= tolerance
        self.checks.append({"name": name, "residual": float(residual), "tolerance": float(tolerance),
                            "relation": relation, "passed": bool(ok)})
        return ok

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def render(self):
        lines = [f"command: {self.command}"]
        if self.digest:
            lines.append(f"input sha256: {self.digest}")
        for k, v in self.outputs.items():
            if isinstance(v, (list, tuple)):
                v = "[" + ", ".join(fmt(x) for x in v) + "]"
            lines.append(f"{k}: {fmt(v)}")
        for c in self.checks:
            tag = "PASS" if c["passed"] else "FAIL"
            lines.append(f"{tag} {c['name']}: {fmt(c['residual'])} {c['relation']} {fmt(c['tolerance'])}")
        lines.extend(f"note: {n}" for n in self.notes)
        lines.append(f"wall time: {self.wall_time:.3f} s")
        return "\n".join(lines)

    def to_json(self):
        def clean(v):
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            if isinstance(v, (complex, np.complexfloating)):
                return [float(v.real), float(v.imag)]
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            return v

        return {"command": self.command, "input_sha256": self.digest,
                "outputs": {k: clean(v) for k, v in self.outputs.items()},
                "checks": self.checks, "notes": self.notes, "passed": self.passed,
                "wall_time": self.wall_time}


def _load(path, parser):
    obj, digest = io.load_json(path)
    return parser(obj), digest


def cmd_verify(args, report):
    M, report.digest = _load(args.matrix, io.parse_matrix)
    check = sp.is_symplectic(M, args.tol)
    report.output("residual", check.residual)
    report.output("det", check.det)
    n = M.shape[0] // 2
    ranks = {k: int(np.linalg.matrix_rank(B, tol=1e-9 * max(1.0, np.max(np.abs(M)))))
             for k, B in (("11", M[:n, :n]), ("12", M[:n, n:]), ("21", M[n:, :n]), ("22", M[n:, n:]))}
    for k, r in ranks.items():
        report.output(f"rank block {k}", r)
    if len(set(ranks.values())) == 1:
        report.notes.append(f"all four blocks rank {ranks['11']}")
    report.check("symplectic residual |M^T J M - J|", check.residual, args.tol)


def cmd_mu(args, report):
    M, report.digest = _load(args.matrix, io.parse_matrix)
    r = sp.mu_report(sp.SymplecticMatrix(M))
    report.output("mu", r.mu)
    report.output("singular values of Xi12", list(r.singular_values))
    report.output("trace norm (4 pi mu)", r.trace_norm)


def cmd_factor(args, report):
    M, report.digest = _load(args.matrix, io.parse_matrix)
    xi = sp.SymplecticMatrix(M)
    scale = max(1.0, np.max(np.abs(M)))
    if args.form == "free":
        try:
            d = sp.factor_free(xi)
        except MpkError as exc:
            report.notes.append("the two-free form always exists: use --form two-free")
            raise
        factors = io.free_data_to_json(d)
        back = sp.make_lambda_plq(d).matrix
    elif args.form == "abc":
        d = sp.factor_abc(xi)
        factors = io.abc_data_to_json(d)
        back = sp.make_xi_abc(d).matrix
    else:
        d1, d2 = sp.factor_two_free(xi, seed=args.seed)
        factors = [io.free_data_to_json(d1), io.free_data_to_json(d2)]
        back = sp.make_lambda_plq(d1).matrix @ sp.make_lambda_plq(d2).matrix
    report.output("factors", json.dumps(factors))
    report.check("round-trip residual", np.max(np.abs(back - M)) / scale, args.tol)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"form": args.form, "factors": factors}, fh, indent=2)


def parse_t_grid(text):
    try:
        a, b, steps = text.split(":")
        a, b, steps = float(a), float(b), int(steps)
    except ValueError as exc:
        raise io.ParseError(f"--t-grid expects a:b:steps, got {text!r}") from exc
    if a <= 0 or b <= 0 or steps < 1:
        raise io.ParseError("--t-grid needs positive bounds and at least one step")
    return np.geomspace(a, b, steps)


def cmd_sweep(args, report):
    w, report.digest = _load(args.word, io.parse_word)
    ts = parse_t_grid(args.t_grid)
    xi = w.psi
    mu = sp.mu_of_symplectic(xi)
    rows = []
    if sp.is_invertible(xi.xi12):
        d = sp.factor_free(xi)
        f = mp.FreeFactor(d, min(mp.maslov_set(d.L)))
        report.notes.append("family: Gaussians adapted to |Xi12| with variance parameter t")
        for t in ts:
            pt = G.optimizer_family(f, t, chirped=args.chirped)
            rows.append((t, pt.product, pt.sqrt_product, mu, pt.gap))
    else:
        report.notes.append("Xi12 is singular: family concentrates on its kernel with width 1/t")
        for t in ts:
            g = G.adapted_gaussian(xi, 1.0 / t)
            prod = G.variance_product(w, g)
            rows.append((t, prod, np.sqrt(prod), mu, np.sqrt(prod) - mu))
    columns = ["t", "variance_product", "sqrt_product", "limit", "gap"]
    if args.out:
        with open(args.out, "w") as fh:
            io.write_table_csv(fh, columns, rows)
    else:
        io.write_table_csv(sys.stdout, columns, rows)
    gaps = np.array([r[4] for r in rows])
    report.output("limit mu", mu)
    report.output("final sqrt product", rows[-1][2])
    report.check("final gap", abs(gaps[-1]), args.tol)
    report.check("gap increase along the sweep", float(np.max(np.diff(gaps), initial=0.0)), 1e-12)


def cmd_wigner(args, report):
    func, report.digest = _load(args.function, io.parse_function)
    try:
        N, L = args.grid.split(",")
        N, L = int(N), float(L)
    except ValueError as exc:
        raise io.ParseError(f"--grid expects N,L, got {args.grid!r}") from exc
    u = GridFunction.sample(func, 1, N, L)
    u.check_guard()
    W = wigner_grid(u)
    i, j = np.unravel_index(np.argmax(W.values.real), W.values.shape)
    k, l = np.unravel_index(np.argmin(W.values.real), W.values.shape)
    report.output("max value", float(W.values.real[i, j]))
    report.output("max at (x, xi)", [float(W.x[i]), float(W.xi[j])])
    report.output("min value", float(W.values.real[k, l]))
    report.output("min at (x, xi)", [float(W.x[k]), float(W.xi[l])])
    if W.values.real[k, l] < -1e-10 * W.values.real[i, j]:
        report.notes.append("the Wigner distribution takes negative values")
    expected = float(u.norm_sq())
    report.check("norm identity | ||W(u,u)|| - ||u||^2 |", abs(W.norm() - expected), 1e-8 * max(1.0, expected))
    report.check("imaginary part of W(u,u)", float(np.max(np.abs(W.values.imag))), 1e-10 * max(1.0, expected))
    if args.out:
        if args.format == "csv" or (args.format is None and args.out.endswith(".csv")):
            io.write_grid_csv(args.out, (W.x, W.xi), W.values)
        else:
            io.write_binary(args.out, W.values)


def cmd_spectrum(args, report):
    q, report.digest = _load(args.symbol, io.parse_symbol)
    h = weyl_quadratic_hermite(q, args.N)
    cert = ground_energy(h, tol=args.tol)
    report.output("ground energy", cert.value)
    report.output(f"ground energy at truncation {args.N + 16}", cert.next_value)
    report.output("certificate |E(N) - E(N+16)|", cert.delta)
    if args.strict:
        report.check("truncation certificate |E(N) - E(N+16)|", cert.delta, args.tol)
    if not cert.converged:
        report.notes.append("truncation has not converged; the infimum may not be attained "
                            "(energies keep decreasing as the basis grows)")
        if not args.strict:
            report.notes.append(f"certificate moved {fmt(cert.delta)} > {fmt(args.tol)} (pass --strict to fail on this)")


def cmd_selftest(args, report):
    results = selftest.run(args.group or None, seed=args.seed, threads=args.threads)
    for r in results:
        report.notes.append(f"[{r.key} {r.name}] {r.title}: {'PASS' if r.passed else 'FAIL'} "
                            f"({r.elapsed:.2f} s of {r.budget:g} s)")
        if r.error:
            report.checks.append({"name": f"{r.key}: {r.error}", "residual": float("nan"),
                                  "tolerance": 0.0, "relation": "<=", "passed": False})
        for c in r.checks:
            report.checks.append({"name": f"{r.key}: {c.label}", "residual": c.value,
                                  "tolerance": c.tolerance, "relation": c.relation, "passed": c.passed})
        report.checks.append({"name": f"{r.key}: runtime (s)", "residual": r.elapsed, "tolerance": r.budget,
                              "relation": "<=", "passed": r.elapsed <= r.budget})


def build_parser():
    p = argparse.ArgumentParser(prog="mpk", description="Metaplectic operators and the uncertainty constant mu.")
    p.add_argument("--json", metavar="PATH", help="also write the run report as JSON")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", help="check that a matrix is symplectic")
    s.add_argument("matrix")
    s.add_argument("--tol", type=float, default=sp.SYMPLECTIC_TOL)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("mu", help="uncertainty constant of a symplectic matrix")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_mu)

    s = sub.add_parser("factor", help="free, ABC or two-free factorization")
    s.add_argument("matrix")
    s.add_argument("--form", choices=("free", "abc", "two-free"), default="free")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="write the factors as JSON")
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("sweep", help="variance products along the optimizer family")
    s.add_argument("word")
    s.add_argument("--t-grid", default="1:1000:13", help="a:b:steps, logarithmically spaced")
    s.add_argument("--out", help="CSV path (default: stdout)")
    s.add_argument("--tol", type=float, default=5e-7)
    s.add_argument("--chirped", action="store_true", help="add the chirp that cancels Q")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("wigner", help="Wigner distribution of a sampled function")
    s.add_argument("function")
    s.add_argument("--grid", default="256,8", help="N,L")
    s.add_argument("--out")
    s.add_argument("--format", choices=("bin", "csv"))
    s.set_defaults(func=cmd_wigner)

    s = sub.add_parser("spectrum", help="ground energy of a quadratic Hamiltonian")
    s.add_argument("symbol")
    s.add_argument("--basis", choices=("hermite",), default="hermite")
    s.add_argument("--N", type=int, default=64, help="basis size per axis")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--strict", action="store_true", help="fail when the truncation has not converged")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("selftest", help="run the acceptance groups")
    s.add_argument("--group", action="append", help="group number or name (repeatable)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int, default=None, help="default: MPK_THREADS or 1")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    report = RunReport("mpk " + " ".join(shlex.quote(a) for a in argv))
    start = time.perf_counter()
    code = EXIT_OK
    try:
        args.func(args, report)
        if not report.passed:
            code = EXIT_FAIL
    except io.ParseError as exc:
        report.notes.append(f"input error: {exc}")
        code = EXIT_INPUT
    except KeyError as exc:
        report.notes.append(f"input error: {exc}")
        code = EXIT_INPUT
    except (MpkError, np.linalg.LinAlgError) as exc:
        report.notes.append(f"{type(exc).__name__}: {exc}")
        code = EXIT_FAIL
    report.wall_time = time.perf_counter() - start
    out = sys.stderr if code == EXIT_INPUT else sys.stdout
    if args.command == "sweep" and not getattr(args, "out", None):
        out = sys.stderr  # keep stdout clean for the CSV
    print(report.render(), file=out)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report.to_json(), fh, indent=2)
    return code


if __name__ == "__main__":
    sys.exit(main())
