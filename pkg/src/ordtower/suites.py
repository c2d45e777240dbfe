"""Verification suites run by the command line front end.

Every job is a plain function of JSON-like keyword arguments returning a JSON-like
dict with at least "name" and "pass".  Jobs are independent so they can run in a
worker pool; randomness comes only from the seed passed in.
"""
from __future__ import annotations

import hashlib
import random

from .algebra import GF, ExactMatrix
from .curves import (ArtinSchreierCurve, CartierMismatchError, DivisorData, EllipticCurve,
                     ProjectiveLine, RatFunc, cartier_apply, hasse_witt, nakajima_check,
                     residue_at, residue_sum)
from .curves.model import UnsupportedCurveError
from .fiber import (cross_validate, chain_check, frobenius_splitting_check,
                    gamma_map, inertia_composition_check, list_components,
                    modular_carrier, nonfree_carrier, ordinary_contraction_check,
                    pullback_i_star, residue_sum_check, section, singular_frobenius_carrier,
                    synthetic_carrier, table_dump, teichmuller_decompose, up_apply,
                    up_power_closed_form, upstar_apply, upstar_power_closed_form)
from .fiber.carrier import CarrierConfigError, RelationError
from .modular import verify_d_identity
from .tower import (PairingCompatibilityError, PairingFamily, broken_fixtures,
                    build_lambda_pairing, check_lambda_bilinear, check_specialization,
                    check_tower_hypotheses, control_isomorphism, random_dual_pair,
                    random_free_tower, truncated_limit)


class CurveSpecError(ValueError):
    pass


def job_seed(seed: int, *parts) -> int:
    """Stable per-job seed derived from the run seed and the job's identity."""
    h = hashlib.sha256(repr((seed,) + parts).encode()).digest()
    return int.from_bytes(h[:8], "big")


# -- verify-identity ----------------------------------------------------------------------

def identity_job(p: int, N: int, form: str = "literal") -> dict:
    t = verify_d_identity(p, N)
    out = t.as_dict()
    if form == "literal":
        ok = t.holds
    else:
        ok = t.top_holds and t.igusa_holds is not False
    out.update({"name": f"d-identity p={p} N={N}", "form": form, "pass": bool(ok)})
    return out


# -- curves -----------------------------------------------------------------------------

def build_curve(spec: dict):
    """Curve from a spec: projective-line, elliptic (ainvs) or artin-schreier (poles)."""
    if not isinstance(spec, dict):
        raise CurveSpecError("curve spec must be an object")
    kind = spec.get("kind")
    p = spec.get("p")
    if not isinstance(p, int) or p < 3:
        raise CurveSpecError(f"curve spec needs an odd prime p, got {p!r}")
    try:
        F = GF(p)
    except ValueError as e:
        raise CurveSpecError(str(e)) from None
    try:
        if kind == "projective-line":
            return ProjectiveLine(F)
        if kind == "elliptic":
            ainvs = spec.get("ainvs")
            if not isinstance(ainvs, list) or len(ainvs) != 5:
                raise CurveSpecError("elliptic spec needs five a-invariants")
            return EllipticCurve(F, [int(a) % p for a in ainvs])
        if kind == "artin-schreier":
            poles = spec.get("poles")
            if not isinstance(poles, list) or not poles:
                raise CurveSpecError("artin-schreier spec needs a nonempty pole list")
            x = RatFunc.x(F)
            f = RatFunc.zero(F)
            for entry in poles:
                if not isinstance(entry, list) or len(entry) not in (2, 3):
                    raise CurveSpecError(f"bad pole entry {entry!r}")
                a, m = entry[0], int(entry[1])
                c = int(entry[2]) % p if len(entry) == 3 else 1
                if m < 1:
                    raise CurveSpecError("pole orders must be positive")
                if a == "inf":
                    term = x ** m
                else:
                    term = (x - RatFunc.const(F, int(a) % p)).inverse() ** m
                f = f + term.scale(c)
            return ArtinSchreierCurve(F, f)
    except UnsupportedCurveError as e:
        raise CurveSpecError(str(e)) from None
    raise CurveSpecError(f"unknown curve kind {kind!r}")


def curve_label(spec: dict) -> str:
    kind = spec.get("kind")
    if kind == "elliptic":
        return f"elliptic p={spec['p']} a={spec['ainvs']}"
    if kind == "artin-schreier":
        return f"artin-schreier p={spec['p']} poles={spec['poles']}"
    return f"{kind} p={spec.get('p')}"


def hasse_witt_job(spec: dict) -> dict:
    c = build_curve(spec)
    hw = hasse_witt(c)
    out = {"name": "hasse-witt " + curve_label(spec), "genus": c.genus(), "gamma": hw.gamma}
    ok = 0 <= hw.gamma <= c.genus()
    if isinstance(c, EllipticCurve):
        ap = c.p + 1 - c.count_points()
        out["a_p"] = ap
        out["point_count_ordinary"] = ap % c.p != 0
        ok = ok and (hw.gamma == 1) == (ap % c.p != 0)
    if isinstance(c, ArtinSchreierCurve):
        # Deuring-Shafarevich over the projective line
        s = len(c.branch_points())
        out["deuring_shafarevich"] = (s - 1) * (c.p - 1)
        ok = ok and hw.gamma == (s - 1) * (c.p - 1)
    out["pass"] = bool(ok)
    return out


def nakajima_job(spec: dict) -> dict:
    c = build_curve(spec)
    if not isinstance(c, ArtinSchreierCurve):
        raise CurveSpecError("nakajima needs an artin-schreier cover")
    res = nakajima_check(c, c.branch_points())
    s = len(c.branch_points())
    out = res.as_dict()
    dim_ok = res.ordinary_dim == (s - 1) * c.p
    out.update({"name": "nakajima " + curve_label(spec), "branch_points": s,
                "expected_dim": (s - 1) * c.p, "pass": bool(res.holds and dim_ok)})
    return out


def _random_divisor(c, rng, max_places=3, max_mult=3):
    places = c.rational_places()
    rng.shuffle(places)
    chosen = places[:rng.randint(1, min(max_places, len(places)))]
    return DivisorData.of(*[(pl, rng.randint(1, max_mult)) for pl in chosen]), chosen


def residue_job(spec: dict, seed: int, count: int = 100) -> dict:
    """Global vs local Cartier, res(V w)^p = res(w) and the residue theorem on random w."""
    c = build_curve(spec)
    rng = random.Random(seed)
    F = c.F
    tested = agree = res_ok = thm_ok = 0
    D, places = _random_divisor(c, rng)
    S = c.differential_space(D)
    for i in range(count):
        if i and i % 25 == 0:
            D, places = _random_divisor(c, rng)
            S = c.differential_space(D)
        w = S.element([rng.randrange(F.q) for _ in range(S.dim)])
        tested += 1
        try:
            v = cartier_apply(c, w, check_places=places)
            agree += 1
        except CartierMismatchError:
            v = c.cartier(w)
        if all(F.frob(residue_at(v, pl), 1) == residue_at(w, pl) for pl in places):
            res_ok += 1
        if residue_sum(w) == F.zero:
            thm_ok += 1
    return {"name": "residues " + curve_label(spec), "differentials": tested,
            "cartier_agree": agree, "residue_identity": res_ok, "residue_theorem": thm_ok,
            "pass": tested == agree == res_ok == thm_ok}


# -- tower -------------------------------------------------------------------------------

def tower_job(p: int, r_max: int, d: int, seed: int) -> dict:
    rng = random.Random(seed)
    F = GF(p)
    t = random_free_tower(F, p, r_max, d, random_np(rng))
    rep = check_tower_hypotheses(t)
    out = {"name": f"tower p={p} r_max={r_max} d={d}", "hypotheses": rep.holds, "d": rep.d}
    ok = rep.holds and rep.d == d
    if ok:
        lim = truncated_limit(t, rep)
        ctrl = all(control_isomorphism(t, r, s, rep).holds
                   for r in range(1, r_max + 1) for s in range(1, r + 1))
        out.update({"limit_compatible": lim.specialization_ok, "control": ctrl})
        ok = lim.specialization_ok and ctrl
    out["pass"] = bool(ok)
    return out


def random_np(rng):
    """numpy Generator seeded from a stdlib Random (the tower helpers expect numpy's API)."""
    import numpy as np
    return np.random.default_rng(rng.getrandbits(63))


def broken_tower_job(p: int, r_max: int, d: int, seed: int) -> dict:
    rng = random.Random(seed)
    F = GF(p)
    rows = []
    ok = True
    for name, t, level in broken_fixtures(F, p, r_max, d, random_np(rng)):
        rep = check_tower_hypotheses(t)
        hit = (not rep.holds) and rep.first_failure == level
        rows.append({"fixture": name, "expected_level": level, "detected_level": rep.first_failure})
        ok = ok and hit
    return {"name": f"broken towers p={p} r_max={r_max} d={d}", "fixtures": rows, "pass": ok}


def pairing_job(p: int, r_max: int, d: int, seed: int) -> dict:
    rng = random.Random(seed)
    npr = random_np(rng)
    F = GF(p)
    t, t2, pf = random_dual_pair(F, p, r_max, d, npr)
    pairings = build_lambda_pairing(t, t2, pf)
    perfect = all(lp.perfect for lp in pairings)
    spec_ok = bil_ok = True
    for r in range(1, r_max + 1):
        M, M2 = t.module(r), t2.module(r)
        for _ in range(3):
            x = tuple(rng.randrange(p) for _ in range(M.dim))
            y = tuple(rng.randrange(p) for _ in range(M2.dim))
            bil_ok = bil_ok and check_lambda_bilinear(pf, t, t2, r, x, y)
            for s in range(1, r + 1):
                spec_ok = spec_ok and check_specialization(pf, t, t2, r, s, x, y)
    # a perturbed top-level Gram matrix must be rejected; one level has nothing to break
    detected = None
    if r_max >= 2:
        grams = list(pf.grams)
        G = grams[-1]
        bump = ExactMatrix.from_rows(F, [[1 if (i, j) == (0, 0) else 0 for j in range(G.cols)]
                                         for i in range(G.rows)], G.cols)
        grams[-1] = G + bump
        try:
            build_lambda_pairing(t, t2, PairingFamily(tuple(grams)))
            detected = False
        except PairingCompatibilityError:
            detected = True
    return {"name": f"lambda pairing p={p} r_max={r_max} d={d}", "perfect": perfect,
            "bilinear": bil_ok, "specialization": spec_ok, "violation_detected": detected,
            "pass": perfect and bil_ok and spec_ok and detected is not False}


# -- fiber -------------------------------------------------------------------------------

def _random_section(c, r, rng):
    parts = {k: tuple(rng.randrange(c.p) for _ in range(c.dims[k.level]))
             for k in list_components(c.p, r)}
    return section(c, r, parts)


def closed_form_job(p: int, r_max: int, d: int, seed: int, n_max: int | None = None,
                    samples: int = 2) -> dict:
    rng = random.Random(seed)
    c = synthetic_carrier(p, r_max, d, rng, nil_dim=1)
    checked = 0
    ok = True
    for r in range(1, r_max + 1):
        top = max(2 * r, 6 if n_max is None else n_max)
        for _ in range(samples):
            eta = _random_section(c, r, rng)
            it_u, it_s = eta, eta
            for n in range(1, top + 1):
                it_u = up_apply(c, it_u)
                it_s = upstar_apply(c, it_s)
                if n >= r:
                    ok = ok and up_power_closed_form(c, eta, n) == it_u
                    ok = ok and upstar_power_closed_form(c, eta, n) == it_s
                    checked += 2
    return {"name": f"closed form p={p} r_max={r_max} d={d}", "comparisons": checked, "pass": ok}


def contraction_job(p: int, r_max: int, d: int, seed: int) -> dict:
    rng = random.Random(seed)
    c = synthetic_carrier(p, r_max, d, rng, nil_dim=1)
    rows = []
    ok = True
    for r in range(1, r_max + 1):
        con = ordinary_contraction_check(c, r)
        spl = frobenius_splitting_check(c, r, random.Random(job_seed(seed, "split", r)))
        res = [residue_sum_check(c, star, nu, r).holds
               for star in ("inf", "0") for nu in c.ordinary_basis(r)[:2]]
        inv = all(pullback_i_star(gamma_map(c, star, nu, r), star) == tuple(nu)
                  for star in ("inf", "0") for nu in c.ordinary_basis(r)[:2])
        rows.append({"r": r, "contraction": con.as_dict(), "splitting": spl.as_dict(),
                     "residues": all(res), "pullback_gamma": inv})
        ok = ok and con.holds and spl.holds and all(res) and inv and \
            spl.ranks == (d, 2 * d, d)
    return {"name": f"contraction p={p} r_max={r_max} d={d}", "levels": rows, "pass": ok}


def refusal_job(p: int, d: int, seed: int) -> dict:
    """Deliberately broken carriers must be refused or flagged."""
    rng = random.Random(seed)
    out = {"name": f"carrier refusals p={p} d={d}"}
    bad = nonfree_carrier(p, 2, d, rng)
    try:
        ordinary_contraction_check(bad)
        out["nonfree_refused"] = False
    except RelationError:
        out["nonfree_refused"] = True
    out["nonfree_flagged"] = not frobenius_splitting_check(bad).holds
    try:
        ordinary_contraction_check(singular_frobenius_carrier(p, d, rng))
        out["singular_refused"] = False
    except CarrierConfigError:
        out["singular_refused"] = True
    out["pass"] = out["nonfree_refused"] and out["nonfree_flagged"] and out["singular_refused"]
    return out


def modular_fiber_job(p: int, N: int) -> dict:
    c = modular_carrier(p, N)
    blocks = c._cache["block_dims"]
    con = ordinary_contraction_check(c, 1)
    spl = frobenius_splitting_check(c, 1)
    d = c.dims[1]
    tm = teichmuller_decompose(c.F, c.teich[1], p)
    want = [0] * (p - 1)
    for k, v in blocks.items():
        want[(k - 2) % (p - 1)] += v
    ok = con.holds and spl.holds and spl.ranks == (d, 2 * d, d) and tm.dims == want \
        and all(tm.check().values())
    return {"name": f"level-one carrier p={p} N={N}", "d": d,
            "block_dims": {str(k): v for k, v in sorted(blocks.items())},
            "contraction": con.as_dict(), "splitting": spl.as_dict(),
            "teichmuller_dims": tm.dims, "pass": bool(ok)}


def tables_job(p: int, r_max: int) -> dict:
    fails = []
    for r in range(1, r_max + 1):
        cv = cross_validate(p, r)
        fails.extend(cv.failures)
        for label in ("sigma", "rho"):
            fails.extend(chain_check(label, p, r))
        units = [u for u in range(2, p ** r) if u % p][:3]
        for a in units:
            for b in units:
                fails.extend(inertia_composition_check(a, b, p, r))
    return {"name": f"relation tables p={p} r<={r_max}", "failures": fails,
            "components": {str(r): len(list_components(p, r)) for r in range(1, r_max + 1)},
            "pass": not fails}


def table_dump_job(p: int, r: int) -> dict:
    return {"name": f"table dump p={p} r={r}",
            "components": [str(k) for k in list_components(p, r)],
            "maps_into_level": table_dump(p, r - 1) if r >= 2 else {}, "pass": True}


JOBS = {
    "identity": identity_job, "hasse_witt": hasse_witt_job, "nakajima": nakajima_job,
    "residues": residue_job, "tower": tower_job, "broken_tower": broken_tower_job,
    "pairing": pairing_job, "closed_form": closed_form_job, "contraction": contraction_job,
    "refusal": refusal_job, "modular_fiber": modular_fiber_job, "tables": tables_job,
    "table_dump": table_dump_job,
}


def run_job(job) -> dict:
    """Entry point for worker processes: (suite, kind, kwargs) -> result dict."""
    suite, kind, kwargs = job
    try:
        out = JOBS[kind](**kwargs)
    except (CurveSpecError, ValueError, ArithmeticError) as e:
        out = {"name": f"{kind} {kwargs}", "pass": False, "error": f"{type(e).__name__}: {e}"}
    out["suite"] = suite
    out["kind"] = kind
    return out
