"""The named checks, bundled into one configurable verification run.

Each check exercises one identity from the underlying mathematics
through the public interfaces of the other modules and reports a
certificate: a flat dictionary with the observed dimensions and ranks,
a pass/fail/skipped status, and enough of an echo of the configuration
to reproduce the run.  Certificates are plain JSON-ready data; apart
from the elapsed-time field, two runs with the same configuration
produce identical certificates, and the command-line driver's
determinism audit depends on that.

A check that cannot run under the requested parameters (a character
string that does not parse, tame exponents without the roots of unity
to realize them, the chain model outside n = 2) reports status
"skipped" with the reason, never a silent pass.
"""

import itertools
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

from . import __version__
from .cache import CosetTableStore
from .fields import field_of_characteristic, root_of_unity
from .finitelevel import verify_free_basis, verify_lemma_finite, verify_transfF
from .group import (
    LocalGroup,
    SubgroupSpec,
    spec_K_m,
    spec_parahoric_pro_p,
    spec_pro_p_iwahori,
)
from .hecke import HeckeAlgebra, build_anti_character, convolve_oracle
from .principal import (
    PrincipalSeriesChar,
    chi_from_string,
    chi_to_string,
    verify_fiber,
    verify_invariant_rank,
    verify_normalization,
)
from .tree import build_ball, exactness_ladder, orbit_decomposition_check
from .weyl import (
    all_perms,
    apartment_stabilizer_check,
    facets_through_origin,
    is_antidominant,
)

_BOX = 2  # coweight window |lam_i| <= 2 for the exhaustive identities


@dataclass(frozen=True)
class VerifierConfig:
    """One run's worth of knobs.  chi is the character string
    ("z=[..];tame=[..]"); empty means the trivial character of the
    configured rank.  checks picks a subset of CHECK_NAMES."""

    n: int = 2
    q: int = 2
    char: int = 2
    ext_degree: int = 1
    chi: str = ""
    budget_L: int = 4
    radius: int = 2
    seed: int = 0
    checks: tuple = ()
    cache_dir: str = ""
    parallelism: int = 1

    def selected(self):
        return tuple(self.checks) if self.checks else CHECK_NAMES


class _Context:
    """Resolved, shareable state for one run: the matrix group, the
    coefficient field, the parsed character, and lazily built balls.
    Field or character trouble is recorded, not raised; checks that
    need the broken piece report it as their skip reason."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.LG = LocalGroup(cfg.n, cfg.q)
        self._lock = threading.Lock()
        self._balls = []
        self.k = None
        self.k_error = None
        self.chi = None
        self.chi_error = None
        try:
            self.k = field_of_characteristic(cfg.char, cfg.ext_degree)
        except (ValueError, ArithmeticError) as e:
            self.k_error = f"no coefficient field: {e}"
        if self.k is None:
            self.chi_error = self.k_error
        else:
            try:
                self.chi = self._resolve_chi()
            except (ValueError, ZeroDivisionError) as e:
                self.chi_error = str(e)

    def _resolve_chi(self):
        cfg, k = self.cfg, self.k
        if cfg.chi.strip():
            chi = chi_from_string(k, cfg.q, cfg.chi)
            if chi.n != cfg.n:
                raise ValueError(
                    f"character has {chi.n} slots, configuration says n = {cfg.n}")
        else:
            chi = PrincipalSeriesChar(k, cfg.q, (k.one,) * cfg.n,
                                      (0,) * cfg.n)
        if cfg.q > 2 and any(chi.tame):
            # fails right here, not deep inside a check, when k lacks
            # the (q-1)-st roots of unity the tame parts need
            root_of_unity(k, cfg.q - 1)
        return chi

    def balls(self, rmax):
        with self._lock:
            while len(self._balls) <= rmax:
                self._balls.append(build_ball(len(self._balls), self.cfg.q))
            return self._balls[: rmax + 1]

    def coset_store(self):
        return CosetTableStore(self.LG, self.cfg.cache_dir or None)


def _pass(data, **extra):
    return {"status": "pass", "data": data, **extra}


def _fail(data, witness):
    return {"status": "fail", "data": data, "witness": witness}


def _skip(reason):
    return {"status": "skipped", "data": {}, "reason": reason}


def _need_chi(ctx):
    return _skip(ctx.chi_error) if ctx.chi is None else None


def _need_field(ctx):
    return _skip(ctx.k_error) if ctx.k is None else None


# -- the individual runners ---------------------------------------------


def _run_contraction(ctx):
    LG = ctx.LG
    cases = 0
    antidominant = 0
    for lam in itertools.product(range(-_BOX, _BOX + 1), repeat=LG.n):
        want = is_antidominant(lam)
        for torus in itertools.product(range(1, LG.q), repeat=LG.n):
            cases += 1
            if LG.contraction_test(lam, torus) != want:
                return _fail(
                    {"box": _BOX, "cases": cases},
                    {"lam": list(lam), "torus": list(torus),
                     "antidominant": want})
            if want:
                antidominant += 1
    return _pass({"box": _BOX, "cases": cases,
                  "antidominant_cases": antidominant})


def _run_neighborhood(ctx):
    LG = ctx.LG
    F = LG.F
    checked = 0
    for m in (0, 1, 2):
        tm = LG.strongly_antidominant_lift(m) if m else LG.identity
        tmi = LG.inv(tm)
        for i in range(LG.n):
            for j in range(i):
                for c in range(1, LG.q):
                    u = LG.elementary(i, j, F.mul(F.from_int(c), F.t))
                    conj = LG.mul(LG.mul(tmi, u), tm)
                    deep = LG.is_member(conj, spec_K_m(m + 1))
                    lower = LG.is_member(conj, SubgroupSpec("IMinus"))
                    checked += 1
                    if not (deep and lower):
                        return _fail(
                            {"depths": [0, 1, 2], "checked": checked},
                            {"m": m, "position": [i, j], "scalar": c,
                             "in_congruence": deep, "in_lower": lower})
    return _pass({"depths": [0, 1, 2], "checked": checked})


def _random_pro_p_element(LG, rng, deg=3):
    """A random element of the pro-p Iwahori: unit diagonal in 1 + t[ ],
    integral above, t-divisible below."""
    F = LG.F
    rows = []
    for i in range(LG.n):
        row = []
        for j in range(LG.n):
            coeffs = tuple(rng.randrange(LG.q) for _ in range(deg))
            if i == j:
                row.append(F.make((1,) + coeffs))
            elif i < j:
                row.append(F.make(coeffs))
            else:
                row.append(F.make((0,) + coeffs))
        rows.append(row)
    return LG.mat(rows)


def _run_factorization(ctx):
    LG = ctx.LG
    rng = random.Random(f"{ctx.cfg.seed}:factorization")
    samples = 25
    for idx in range(samples):
        g = _random_pro_p_element(LG, rng)
        uplus, t0, uminus = LG.iwahori_factor(g)
        if LG.mul(LG.mul(uplus, t0), uminus) != g:
            return _fail({"samples": samples},
                         {"index": idx, "reason": "product mismatch"})
    return _pass({"samples": samples})


def _length_ball(W, lmax, box):
    out = []
    for perm in all_perms(W.n):
        for lam in itertools.product(range(-box, box + 1), repeat=W.n):
            for torus in itertools.product(range(1, W.q), repeat=W.n):
                w = W.make(perm, lam, torus)
                if W.length(w) <= lmax:
                    out.append(w)
    return out


def _run_braid(ctx):
    check = _need_field(ctx)
    if check:
        return check
    LG, cfg = ctx.LG, ctx.cfg
    W = LG.W
    H = HeckeAlgebra(W, ctx.k)
    L = cfg.budget_L
    box = _BOX if LG.n == 2 else 1
    pool = _length_ball(W, L, box)
    pairs = [(w, w2) for w in pool for w2 in pool
             if W.length(w) + W.length(w2) <= L]
    mode = "exhaustive"
    if LG.n != 2:
        # the rank-two pair list is the exhaustively affordable one;
        # higher rank gets a seeded sample of the same window
        rng = random.Random(f"{cfg.seed}:braid")
        pairs = sorted(rng.sample(pairs, min(len(pairs), 60)))
        mode = "sampled"
    store = ctx.coset_store()
    for w, w2 in pairs:
        got = H.multiply(H.basis(w), H.basis(w2))
        want = convolve_oracle(LG, ctx.k, w, w2, reps_cache=store)
        if got != want:
            return _fail(
                {"budget": L, "pool": len(pool), "pairs": len(pairs),
                 "mode": mode},
                {"w": list(map(list, w)), "w2": list(map(list, w2))})
    return _pass({"budget": L, "pool": len(pool), "pairs": len(pairs),
                  "mode": mode, "cache_hits": store.hits,
                  "cache_misses": store.misses})


def _facet_sweep(ctx, verify):
    """Run a per-facet certificate producer over every facet through
    the base vertex and fold the results."""
    cfg = ctx.cfg
    rows = []
    first_bad = None
    for types in facets_through_origin(cfg.n):
        cert = verify(sorted(types))
        rows.append(cert)
        if first_bad is None and not cert.get("ok"):
            first_bad = cert
    data = {"facets": [sorted(t) for t in facets_through_origin(cfg.n)],
            "certificates": rows}
    if first_bad is not None:
        return _fail(data, first_bad)
    return _pass(data)


def _run_free_basis(ctx):
    check = _need_field(ctx)
    if check:
        return check
    cfg = ctx.cfg
    return _facet_sweep(
        ctx, lambda t: verify_free_basis(t, ctx.k, cfg.n, cfg.q))


def _run_transf(ctx):
    check = _need_field(ctx)
    if check:
        return check
    cfg = ctx.cfg
    return _facet_sweep(
        ctx, lambda t: verify_transfF(t, ctx.k, cfg.n, cfg.q))


def _run_orbit(ctx):
    if ctx.cfg.n != 2:
        return _skip("the chain model is built for rank two only")
    check = _need_chi(ctx)
    if check:
        return check
    ball = ctx.balls(ctx.cfg.radius)[-1]
    cert = orbit_decomposition_check(ball, ctx.chi)
    if not cert["ok"]:
        return _fail(cert, cert)
    return _pass(cert)


def _translation_window(W, box):
    out = []
    for lam in itertools.product(range(-box, box + 1), repeat=W.n):
        for torus in itertools.product(range(1, W.q), repeat=W.n):
            out.append(W.make(tuple(range(W.n)), lam, torus))
    return out


def _run_roundtrip(ctx):
    check = _need_chi(ctx)
    if check:
        return check
    LG, chi = ctx.LG, ctx.chi
    W, F = LG.W, LG.F
    chibar = build_anti_character(chi)
    cases = 0
    for w in _translation_window(W, _BOX):
        direct = chibar.of_translation(w)
        recovered = chibar.value_via_antidominant(w)
        gi = LG.inv(LG.canonical_lift(w))
        through_chi = chi.borel_value(
            F, tuple(gi[i][i] for i in range(LG.n)))
        cases += 1
        if not (direct == recovered == through_chi):
            return _fail(
                {"box": _BOX, "cases": cases},
                {"w": list(map(list, w)),
                 "of_translation": str(direct),
                 "via_antidominant": str(recovered),
                 "through_character": str(through_chi)})
    return _pass({"box": _BOX, "cases": cases})


def _level_list(cfg):
    levels = [("pro-p Iwahori", spec_pro_p_iwahori()),
              ("K_1", spec_K_m(1))]
    for types in facets_through_origin(cfg.n):
        levels.append((f"facet {sorted(types)}",
                       spec_parahoric_pro_p(types)))
    return levels


def _run_invariant_rank(ctx):
    check = _need_chi(ctx)
    if check:
        return check
    rows = []
    first_bad = None
    for label, spec in _level_list(ctx.cfg):
        cert = verify_invariant_rank(ctx.LG, ctx.chi, spec)
        cert = {"at": label, **cert}
        rows.append(cert)
        if first_bad is None and not cert["ok"]:
            first_bad = cert
    data = {"levels": [r["at"] for r in rows], "certificates": rows}
    if first_bad is not None:
        return _fail(data, first_bad)
    return _pass(data)


def _run_normalization(ctx):
    check = _need_chi(ctx)
    if check:
        return check
    cert = verify_normalization(ctx.LG, ctx.chi, box=_BOX)
    if not cert["ok"]:
        return _fail(cert, {"failures": cert["failures"]})
    return _pass(cert)


def _run_fiber(ctx):
    check = _need_chi(ctx)
    if check:
        return check
    L = max(2, min(ctx.cfg.budget_L, 6))
    cert = verify_fiber(ctx.LG, ctx.chi, L=L)
    if not cert["ok"]:
        return _fail(cert, {"failed": cert["failed"]})
    return _pass(cert)


def _run_lemma_finite(ctx):
    check = _need_chi(ctx)
    if check:
        return check
    cfg = ctx.cfg
    return _facet_sweep(
        ctx, lambda t: verify_lemma_finite(t, ctx.chi, ctx.k, cfg.n, cfg.q))


def _run_apartment(ctx):
    cfg = ctx.cfg
    rows = []
    bad = None
    for types in facets_through_origin(cfg.n):
        ok = apartment_stabilizer_check(cfg.n, types, box=_BOX)
        rows.append({"facet": sorted(types), "ok": ok})
        if bad is None and not ok:
            bad = rows[-1]
    data = {"box": _BOX, "facets": rows}
    if bad is not None:
        return _fail(data, bad)
    return _pass(data)


def _run_ball_exactness(ctx):
    if ctx.cfg.n != 2:
        return _skip("the chain model is built for rank two only")
    check = _need_chi(ctx)
    if check:
        return check
    rmax = ctx.cfg.radius
    cert = exactness_ladder(ctx.cfg.q, ctx.chi, rmax,
                            balls=ctx.balls(rmax))
    data = {
        "radii": cert["radii"],
        "boundary_ranks": cert["boundary_ranks"],
        "augmentation_ranks": cert["augmentation_ranks"],
        "growth_ok": cert["growth_ok"],
        "reports": [
            {k: v for k, v in rep.items() if k != "statement"}
            for rep in cert["reports"]
        ],
    }
    if not cert["ok"]:
        bad = next((rep for rep in cert["reports"] if not rep["ok"]),
                   {"growth_ok": cert["growth_ok"]})
        return _fail(data, bad)
    return _pass(data)


# Registry: check name -> (anchor text for the certificate, runner).
# The names and anchor strings are the stable external vocabulary of
# the verifier; everything else in this package names things by what
# they compute.
CHECKS = {
    "braid_vs_oracle": (
        "Section 2.3: tau_w tau_w' = tau_{ww'} when lengths add, "
        "against the convolution oracle",
        _run_braid),
    "iwahori_factorization": (
        "Section 2.4: I = I+ I0 I-",
        _run_factorization),
    "lemma2_1": (
        "Lemma 2.1: T^{++} characterization via contraction",
        _run_contraction),
    "lemma2_3": (
        "Lemma 2.3: neighborhood containment t^-m u t^m in K_{m+1}",
        _run_neighborhood),
    "lemma3_2_free": (
        "Lemma 3.2: h_{x0} free over h_F with basis {tau_d}",
        _run_free_basis),
    "lemma4_1_roundtrip": (
        "Lemma 4.1: character bijection round trip",
        _run_roundtrip),
    "lemma4_2": (
        "Lemma 4.2: rank equal to |B\\G/Omega|",
        _run_invariant_rank),
    "lemma4_5": (
        "Lemma 4.5: specialized tensor identity at the finite level",
        _run_lemma_finite),
    "lemma6_1": (
        "Lemma 6.1: P_F dagger cap B inside B_0 Z",
        _run_apartment),
    "prop3_3": (
        "Prop 3.3: chains isomorphic to the direct sum of induced "
        "orbit modules",
        _run_orbit),
    "prop4_3_norm": (
        "Prop 4.3: normalization f_1 tau = chibar(tau) f_1",
        _run_normalization),
    "prop4_4": (
        "Prop 4.4: isomorphic to xi tensor_{A_anti} H",
        _run_fiber),
    "theorem1_1_ball": (
        "Theorem 1.1: yields an exact resolution (finite-ball shadow)",
        _run_ball_exactness),
    "transfF": (
        "Isomorphism (3.3): h_{x0} tensor_{h_F} X_F -> X_{x0}^{I_F}",
        _run_transf),
}

CHECK_NAMES = tuple(sorted(CHECKS))


def _jsonable(x):
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((_jsonable(v) for v in x), key=repr)
    if isinstance(x, dict):
        return {k if isinstance(k, str) else repr(k): _jsonable(v)
                for k, v in x.items()}
    return str(x)


def validate_config(cfg):
    if cfg.n not in (2, 3):
        raise ValueError(f"n = {cfg.n} is not supported (2 or 3)")
    if cfg.q not in (2, 3):
        raise ValueError(f"q = {cfg.q} is not supported (2 or 3)")
    if cfg.char < 0:
        raise ValueError("characteristic must be 0 or a prime")
    if cfg.ext_degree < 1:
        raise ValueError("extension degree must be at least 1")
    if cfg.budget_L < 1:
        raise ValueError("length budget must be at least 1")
    if not 0 <= cfg.radius <= 4:
        raise ValueError("radius must be between 0 and 4")
    if cfg.parallelism < 1:
        raise ValueError("parallelism must be at least 1")
    unknown = [c for c in cfg.selected() if c not in CHECKS]
    if unknown:
        raise ValueError(
            f"unknown checks {unknown}; valid names: {list(CHECK_NAMES)}")


def run_suite(config):
    """All selected checks, one certificate each, sorted by name."""
    validate_config(config)
    ctx = _Context(config)
    params = _jsonable(asdict(config))
    names = sorted(set(config.selected()))

    def run_one(name):
        anchor, runner = CHECKS[name]
        start = time.perf_counter()
        try:
            result = runner(ctx)
        except Exception as e:  # a crash is a failure, not an abort
            result = _fail({}, {"error": f"{type(e).__name__}: {e}"})
        elapsed = int(round((time.perf_counter() - start) * 1000))
        cert = {
            "check": name,
            "anchor": anchor,
            "params": params,
            "status": result["status"],
            "data": _jsonable(result.get("data", {})),
            "witness": _jsonable(result.get("witness")),
            "reason": result.get("reason"),
            "elapsed_ms": elapsed,
            "version": __version__,
        }
        return cert

    if config.parallelism > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            certs = list(pool.map(run_one, names))
    else:
        certs = [run_one(name) for name in names]
    return sorted(certs, key=lambda c: c["check"])


def aggregate_ok(certificates):
    """Overall verdict: nothing failed and something actually ran."""
    statuses = [c["status"] for c in certificates]
    return ("fail" not in statuses) and ("pass" in statuses)
