"""Suite configuration, orchestration, and machine-readable reporting.

The runner executes the registered checks in dependency order for each
configured parameter set, re-running the character-dependent ones for every
configured twist, and emits a deterministic text or JSON report (wall times
are withheld unless explicitly requested so reports stay byte-identical for
a fixed config and seed).  Exit status: 0 all pass, 1 some check failed,
2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field as dc_field

from . import __version__
from .ffield import AdditiveCharacter, FieldDescriptor, least_nonsquare
from .spgroup import SubgroupId, SymplecticSpace, enumerate_subgroup, sp_order
from .steinberg import SteinbergModule


class ConfigError(Exception):
    pass


TIERS: dict[str, list[tuple[int, int]]] = {
    "core": [(1, 3)],
    "full": [(1, 3), (1, 5), (1, 7), (2, 3)],
    "stretch": [(1, 3), (1, 5), (1, 7), (2, 3), (2, 5), (3, 3)],
}

# matrix-level-only sets: group-algebra checks are excluded there
MATRIX_ONLY = {(3, 3)}


@dataclass
class RunConfig:
    n: int | None = None
    q: int | None = None
    q_modulus: tuple[int, ...] | None = None
    l: int = 2
    m: int | None = None
    l_modulus: tuple[int, ...] | None = None
    tier: str | None = None
    twists: str | list[int] = "auto"
    seed: int = 0
    cache_dir: str | None = None
    report: str = "text"
    out: str | None = None
    cap: int = 10 ** 7
    timing: bool = False


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | skipped | vacuous
    params: dict
    detail: dict | None = None
    wall_time: float = 0.0

    def to_json(self, timing: bool) -> dict:
        out = {"name": self.name, "status": self.status, "params": self.params}
        if self.detail is not None:
            out["detail"] = self.detail
        if timing:
            out["wall_time_ms"] = round(self.wall_time * 1000.0, 3)
        return out


def coefficient_degree(p: int, l: int) -> int:
    """Least m with p dividing l^m - 1: the order of l modulo p."""
    if l % p == 0:
        raise ConfigError("coefficient characteristic must differ from p")
    m, acc = 1, l % p
    while acc != 1:
        acc = (acc * l) % p
        m += 1
    return m


@dataclass
class ParamContext:
    """Everything shared by the checks at one (n, q, l, m) parameter set."""

    n: int
    q_field: FieldDescriptor
    coeff_field: FieldDescriptor
    space: SymplecticSpace
    psi: AdditiveCharacter
    twists: list[int]
    cap: int
    seed: int
    ga_allowed: bool
    cache_dir: str | None
    _stein: SteinbergModule | None = None
    _sub_cache: dict = dc_field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.q_field.size

    @property
    def p(self) -> int:
        return self.q_field.p

    @property
    def l(self) -> int:
        return self.coeff_field.p

    def params_dict(self, twist: int | None = None) -> dict:
        out = {"n": self.n, "q": self.q, "l": self.l,
               "m": self.coeff_field.m}
        if twist is not None:
            out["twist"] = twist
        return out

    def subgroup(self, sid: SubgroupId):
        got = self._sub_cache.get(sid)
        if got is None:
            got = enumerate_subgroup(self.space, sid, self.cap)
            self._sub_cache[sid] = got
        return got

    def steinberg(self, twist: int = 1) -> SteinbergModule:
        if self._stein is None:
            self._stein = SteinbergModule(self.space, self.coeff_field,
                                          self.psi, self.cap, self.cache_dir)
        if twist == 1:
            return self._stein
        return self._stein.with_character(self.psi.twisted(twist))

    def rng(self, tag: str) -> random.Random:
        return random.Random((self.seed, self.n, self.q, self.l, tag).__repr__())


def resolve_twists(cfg_twists, fq: FieldDescriptor) -> list[int]:
    if cfg_twists == "auto":
        if fq.p == 2:
            return [1]
        return [1, least_nonsquare(fq)]
    twists = [int(t) for t in cfg_twists]
    if not twists or any(not 0 < t < fq.size for t in twists):
        raise ConfigError("twists must be nonzero field codes")
    return twists


def build_contexts(cfg: RunConfig) -> list[ParamContext]:
    if cfg.tier is not None and (cfg.n is not None or cfg.q is not None):
        raise ConfigError("give either --tier or an explicit --n/--q set")
    if cfg.tier is not None:
        if cfg.tier not in TIERS:
            raise ConfigError(f"unknown tier {cfg.tier!r}")
        sets = [(n, q, None) for (n, q) in TIERS[cfg.tier]]
    else:
        if cfg.n is None or cfg.q is None:
            raise ConfigError("need --n and --q (or --tier)")
        sets = [(cfg.n, cfg.q, cfg.q_modulus)]
    out = []
    for (n, q, q_modulus) in sets:
        if n < 1:
            raise ConfigError("n must be at least 1")
        p, mq = _prime_power(q)
        if p is None:
            raise ConfigError(f"q = {q} is not a prime power")
        try:
            fq = FieldDescriptor(p, mq, q_modulus)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if cfg.l == p:
            raise ConfigError("coefficient characteristic l must differ from p")
        m = cfg.m if cfg.m is not None else coefficient_degree(p, cfg.l)
        try:
            coeff = FieldDescriptor(cfg.l, m, cfg.l_modulus)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if (coeff.size - 1) % p != 0:
            raise ConfigError(
                f"GF({cfg.l}^{m}) has no primitive {p}-th root of unity")
        space = SymplecticSpace(n, fq)
        psi = AdditiveCharacter(fq, coeff)
        twists = resolve_twists(cfg.twists, fq)
        ga_allowed = (n, q) not in MATRIX_ONLY and sp_order(n, q) <= cfg.cap
        cache_dir = cfg.cache_dir
        if cache_dir is not None and q_modulus is not None and mq > 1:
            # the cache header cannot record a custom base-field modulus
            cache_dir = None
        out.append(ParamContext(n, fq, coeff, space, psi, twists, cfg.cap,
                                cfg.seed, ga_allowed, cache_dir))
    return out


def _prime_power(q: int) -> tuple[int | None, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            m = 0
            while q % p == 0:
                q //= p
                m += 1
            return (p, m) if q == 1 else (None, 0)
    return None, 0


# ---------------------------------------------------------------------------
# Check registry.
# ---------------------------------------------------------------------------

def _status_of(result: dict) -> tuple[str, dict]:
    ok = result.pop("ok", None)
    result.pop("name", None)
    if ok is None:
        return "vacuous", result
    return ("pass" if ok else "fail"), result


def _run_foundation_orders(ctx: ParamContext, psi) -> dict:
    space = ctx.space
    weyl = space.weyl
    sylow = ctx.subgroup(SubgroupId.sylow())
    ok = len(sylow) == ctx.q ** (ctx.n ** 2)
    for w in weyl.elements:
        minus = ctx.subgroup(SubgroupId.u_minus(w))
        plus = ctx.subgroup(SubgroupId.u_plus(w))
        ok = ok and len(minus) == ctx.q ** weyl.length(w)
        ok = ok and len(plus) * len(minus) == len(sylow)
    ok = ok and weyl.length(weyl.longest) == ctx.n ** 2
    borel = ctx.subgroup(SubgroupId.borel())
    ok = ok and len(borel) == ctx.q ** (ctx.n ** 2) * (ctx.q - 1) ** ctx.n
    return {"ok": ok, "sylow": len(sylow), "borel": len(borel),
            "weyl": len(weyl.elements)}


def _run_foundation_closure(ctx: ParamContext, psi) -> dict:
    from .spgroup import in_borel, in_sylow
    sylow = ctx.subgroup(SubgroupId.sylow())
    borel = ctx.subgroup(SubgroupId.borel())
    for g in sylow:
        if not in_sylow(g.inverse()):
            return {"ok": False, "witness": g.key}
    for g in sylow:
        for h in sylow:
            if not in_sylow(g * h):
                return {"ok": False, "witness": (g.key, h.key)}
    rng = ctx.rng("closure")
    for _ in range(500):
        g, h = rng.choice(borel), rng.choice(borel)
        if not in_borel(g * h) or not in_borel(g.inverse()):
            return {"ok": False, "witness": (g.key, h.key)}
    return {"ok": True, "sylow_pairs": len(sylow) ** 2, "borel_pairs": 500}


def _run_weyl_lengths(ctx: ParamContext, psi) -> dict:
    from .spgroup import length_by_inversions
    weyl = ctx.space.weyl
    for w in weyl.elements:
        if weyl.length(w) != length_by_inversions(w):
            return {"ok": False, "witness": w.perm}
    from .spgroup import in_torus
    for w in weyl.elements:
        lift = weyl.lift(w)
        if weyl.class_of(lift) != w:
            return {"ok": False, "witness": w.perm}
    # two lifts of one class differ by a torus element
    rng = ctx.rng("lifts")
    torus = ctx.subgroup(SubgroupId.torus())
    for _ in range(50):
        w = rng.choice(weyl.elements)
        h = rng.choice(torus)
        alt = weyl.lift(w) * h
        if not in_torus(weyl.lift(w).inverse() * alt):
            return {"ok": False, "witness": w.perm}
    return {"ok": True, "elements": len(weyl.elements)}


def _run_factor_unipotent(ctx: ParamContext, psi) -> dict:
    from .spgroup import factor_unipotent
    space = ctx.space
    weyl = space.weyl
    sylow = ctx.subgroup(SubgroupId.sylow())
    checked = 0
    for w in weyl.elements:
        minus = ctx.subgroup(SubgroupId.u_minus(w))
        for u in sylow:
            up, um = factor_unipotent(space, u, w, minus)
            if up * um != u:
                return {"ok": False, "witness": (u.key, w.perm)}
            checked += 1
    return {"ok": True, "factorizations": checked}


def _run_parabolic_enumeration(ctx: ParamContext, psi) -> dict:
    from .spgroup import parabolic_orders
    nb, npj = parabolic_orders(ctx.space, ctx.cap)
    return {"ok": npj == (ctx.q + 1) * nb, "borel": nb, "parabolic": npj}


def _run_index_valuation(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_index_valuation
    return check_index_valuation(ctx.n, ctx.q)


def _run_center_probe(ctx: ParamContext, psi) -> dict:
    from .spgroup import sign_flip, transvection
    space = ctx.space
    # basis transvections alone are centralized by the diagonal sign torus;
    # the pair sums pin the center down to the scalars
    vectors = [space.u_vector(i) for i in range(1, ctx.n + 1)]
    vectors += [space.v_vector(i) for i in range(1, ctx.n + 1)]
    vectors += [space.add_vec(space.u_vector(i), space.u_vector(i + 1))
                for i in range(1, ctx.n)]
    trans = [transvection(space, v, 1) for v in vectors]
    cn = sign_flip(space, ctx.n)
    probe = ctx.subgroup(SubgroupId.borel())
    ident = space.identity
    neg_ident = -ident
    central = []
    for b in probe:
        for g in (b, cn * b * cn.inverse()):
            if all(g * t == t * g for t in trans):
                central.append(g)
    ok = all(g in (ident, neg_ident) for g in central)
    return {"ok": ok, "central_found": len(central)}


def _run_char_homomorphism(ctx: ParamContext, psi) -> dict:
    from .characters import PairingCharacter
    space = ctx.space
    f = ctx.coeff_field
    vn = (0,) * (ctx.n - 1) + (1,)
    chi = PairingCharacter.from_n_coords(space, psi, vn)
    stab = ctx.subgroup(SubgroupId.vector_stabilizer(vn))
    for g in stab:
        for h in stab:
            if chi.value(g * h) != f.mul(chi.value(g), chi.value(h)):
                return {"ok": False, "witness": (g.key, h.key)}
    return {"ok": True, "pairs": len(stab) ** 2}


def _run_char_distinctness(ctx: ParamContext, psi) -> dict:
    from .characters import PairingCharacter
    from .weilmod import all_n_tuples, neg_tuple
    space = ctx.space
    pointwise = ctx.subgroup(SubgroupId.pointwise_m())
    tables = {}
    for v in all_n_tuples(space):
        chi = PairingCharacter.from_n_coords(space, psi, v)
        tables[v] = tuple(chi.value(s) for s in pointwise)
    for v, tv in tables.items():
        for w, tw in tables.items():
            equal = tv == tw
            expected = v == w or v == neg_tuple(space, w)
            if equal != expected:
                return {"ok": False, "witness": (v, w)}
    return {"ok": True, "pairs": len(tables) ** 2}


def _run_char_root_values(ctx: ParamContext, psi) -> dict:
    from .characters import PairingCharacter
    from .spgroup import root_element, sign_flip
    space = ctx.space
    n = ctx.n
    cn_cls = space.weyl.class_of(sign_flip(space, n))
    uplus = ctx.subgroup(SubgroupId.u_plus(cn_cls))
    for alpha in ctx.q_field.nonzero_codes():
        chi = PairingCharacter.from_n_coords(
            space, psi, (0,) * (n - 1) + (alpha,))
        if any(chi.value(u) != 1 for u in uplus):
            return {"ok": False, "witness": ("positive_part", alpha)}
        for i in range(1, n):
            if any(chi.value(root_element(space, i, i + 1, a)) != 1
                   for a in range(ctx.q)):
                return {"ok": False, "witness": ("fundamental", i, alpha)}
        values = {chi.value(root_element(space, n, 2 * n, a))
                  for a in range(ctx.q)}
        if len(values) == 1:
            return {"ok": False, "witness": ("last_root_constant", alpha)}
    return {"ok": True, "alphas": ctx.q - 1}


def _run_char_conjugation(ctx: ParamContext, psi) -> dict:
    from .characters import PairingCharacter
    space = ctx.space
    f = ctx.coeff_field
    weyl = space.weyl
    sylow = ctx.subgroup(SubgroupId.sylow())
    vn = (0,) * (ctx.n - 1) + (1,)
    chi = PairingCharacter.from_n_coords(space, psi, vn)
    for w in weyl.elements:
        g0 = weyl.lift(w)
        conj = chi.conjugated(g0)
        g0_inv = g0.inverse()
        for g in sylow:
            if chi.value(g0_inv * g * g0) != conj.value(g):
                return {"ok": False, "witness": (w.perm, g.key)}
    return {"ok": True, "pairs": len(weyl.elements) * len(sylow)}


def _run_char_determinant(ctx: ParamContext, psi) -> dict:
    from .characters import determinant_character
    from .ffield import is_square
    from .spgroup import mat_det
    space = ctx.space
    f = ctx.coeff_field
    sp_m = ctx.subgroup(SubgroupId.m_stabilizer())
    rng = ctx.rng("theta")
    squares = {ctx.q_field.mul(a, a) for a in ctx.q_field.nonzero_codes()}
    for _ in range(100):
        g, h = rng.choice(sp_m), rng.choice(sp_m)
        if determinant_character(space, f, g * h) != f.mul(
                determinant_character(space, f, g),
                determinant_character(space, f, h)):
            return {"ok": False, "witness": (g.key, h.key)}
        det = mat_det(ctx.q_field, g.n_block(), ctx.n)
        legendre_oracle = 1 if det in squares else f.minus_one
        if determinant_character(space, f, g) != legendre_oracle:
            # the diagonal part's N-block determinant equals g's
            return {"ok": False, "witness": ("legendre", g.key)}
    for s in ctx.subgroup(SubgroupId.pointwise_m()):
        if determinant_character(space, f, s) != 1:
            return {"ok": False, "witness": ("pointwise", s.key)}
    for t in ctx.subgroup(SubgroupId.torus_part()):
        if determinant_character(space, f, t) != 1:
            return {"ok": False, "witness": ("torus_part", t.key)}
    return {"ok": True}


def _run_char_twist_separation(ctx: ParamContext, psi) -> dict:
    from .characters import PairingCharacter
    from .weilmod import all_n_tuples
    space = ctx.space
    kappa = least_nonsquare(ctx.q_field)
    psi_k = psi.twisted(kappa)
    pointwise = ctx.subgroup(SubgroupId.pointwise_m())
    nonzero = [v for v in all_n_tuples(space) if any(v)]
    for v in nonzero:
        tv = tuple(PairingCharacter.from_n_coords(space, psi, v).value(s)
                   for s in pointwise)
        for w in nonzero:
            tw = tuple(PairingCharacter.from_n_coords(space, psi_k, w).value(s)
                       for s in pointwise)
            if tv == tw:
                return {"ok": False, "witness": (v, w)}
    return {"ok": True, "pairs": len(nonzero) ** 2}


def _run_x_homomorphism(ctx: ParamContext, psi) -> dict:
    from .repcore import f_matmul
    from .weilmod import x_monomial
    space = ctx.space
    f = ctx.coeff_field
    sp_m = ctx.subgroup(SubgroupId.m_stabilizer())
    rng = ctx.rng("x-hom")
    pairs = [(rng.choice(sp_m), rng.choice(sp_m)) for _ in range(200)]
    if len(ctx.subgroup(SubgroupId.borel())) <= 50:
        borel = ctx.subgroup(SubgroupId.borel())
        pairs += [(g, h) for g in borel for h in borel]
    for g, h in pairs:
        lhs = x_monomial(space, psi, g * h).to_matrix(f)
        rhs = f_matmul(f, x_monomial(space, psi, g).to_matrix(f),
                       x_monomial(space, psi, h).to_matrix(f))
        if not (lhs == rhs).all():
            return {"ok": False, "witness": (g.key, h.key)}
    return {"ok": True, "pairs": len(pairs)}


def _run_x_irreducibility(ctx: ParamContext, psi) -> dict:
    from .ffield import transversal
    from .repcore import commutant_dimension, irreducible_exhaustive
    from .spgroup import (borel_generators, m_stabilizer_generators,
                          sylow_generators)
    from .weilmod import (induced_rep_layer, induced_rep_piece,
                          induced_rep_signed)
    space = ctx.space
    u_gens = sylow_generators(space)
    b_gens = borel_generators(space)
    m_gens = m_stabilizer_generators(space)
    results = []
    for parity in ("+", "-"):
        for i in range(1, ctx.n + 1):
            for alpha in transversal(ctx.q_field):
                rep = induced_rep_piece(space, psi, u_gens, alpha, i, parity)
                good = rep.dim == ctx.q ** (ctx.n - i) and \
                    irreducible_exhaustive(rep, ctx.cap) and \
                    commutant_dimension(rep) == 1
                results.append((f"piece{parity}{alpha},{i}", good))
            layer = induced_rep_layer(space, psi, b_gens, i, parity)
            good = irreducible_exhaustive(layer, ctx.cap) and \
                commutant_dimension(layer) == 1
            results.append((f"layer{parity}{i}", good))
        signed = induced_rep_signed(space, psi, m_gens, parity)
        expected_dim = (ctx.q ** ctx.n - 1) // 2 if ctx.p != 2 \
            else ctx.q ** ctx.n - 1
        good = signed.dim == expected_dim and \
            irreducible_exhaustive(signed, ctx.cap) and \
            commutant_dimension(signed) == 1
        results.append((f"signed{parity}", good))
    bad = [name for name, good in results if not good]
    return {"ok": not bad, "certified": len(results), "failed": bad}


def _run_x_nonisomorphism(ctx: ParamContext, psi) -> dict:
    from .ffield import transversal
    from .repcore import intertwiner_space
    from .spgroup import borel_generators, sylow_generators
    from .weilmod import induced_rep_layer, induced_rep_piece
    space = ctx.space
    fq = ctx.q_field
    u_gens = sylow_generators(space)
    b_gens = borel_generators(space)
    reps_t = transversal(fq)
    for i in range(1, ctx.n + 1):
        pieces = {alpha: induced_rep_piece(space, psi, u_gens, alpha, i)
                  for alpha in reps_t}
        for a in reps_t:
            for b in reps_t:
                dim = len(intertwiner_space(pieces[a], pieces[b]))
                if (dim > 0) != (a == b):
                    return {"ok": False, "witness": ("piece", i, a, b)}
        if ctx.p != 2:
            minus = induced_rep_piece(space, psi, u_gens, reps_t[0], i, "-")
            if len(intertwiner_space(pieces[reps_t[0]], minus)) == 0:
                return {"ok": False, "witness": ("parity", i)}
    layers = {i: induced_rep_layer(space, psi, b_gens, i)
              for i in range(1, ctx.n + 1)}
    for i in layers:
        for j in layers:
            if i != j and layers[i].dim == layers[j].dim:
                if len(intertwiner_space(layers[i], layers[j])) > 0:
                    return {"ok": False, "witness": ("layer", i, j)}
    return {"ok": True}


def _run_x_quotient_map(ctx: ParamContext, psi) -> dict:
    from .weilmod import check_x_quotient_map
    return {"ok": check_x_quotient_map(ctx.space, psi)}


def _run_heisenberg(ctx: ParamContext, psi) -> dict:
    from .weilmod import check_heisenberg_homomorphism
    return check_heisenberg_homomorphism(ctx.space, psi)


def _run_weil_intertwining(ctx: ParamContext, psi) -> dict:
    from .weilmod import check_intertwining
    return check_intertwining(ctx.space, psi)


def _run_weil_single_valued(ctx: ParamContext, psi) -> dict:
    from .weilmod import check_weil_single_valued
    return check_weil_single_valued(ctx.space, psi, ctx.rng("weil-words"))


def _run_gauss_sum(ctx: ParamContext, psi) -> dict:
    from .ffield import gauss_sum
    value = gauss_sum(psi)
    ok = value == 1 if ctx.l == 2 else value != 0
    return {"ok": ok, "value": value}


def _run_flip_closed_forms(ctx: ParamContext, psi) -> dict:
    from .weilmod import check_flip_closed_forms
    res = check_flip_closed_forms(ctx.space, psi)
    if res["flip_second"] is None and ctx.n == 1:
        return {"ok": res["flip_last"], "second": "vacuous at n = 1"}
    return {"ok": res["flip_last"] and res["flip_second"]}


def _run_twist_classes(ctx: ParamContext, psi) -> dict:
    from .ffield import is_square
    from .weilmod import check_twist_classes
    fq = ctx.q_field
    kappas = [least_nonsquare(fq)]
    square = next((a for a in fq.nonzero_codes()
                   if a != 1 and is_square(fq, a)), 1)
    kappas.append(square)
    out = []
    certify = fq.size ** ((ctx.q ** ctx.n - 1) // 2) <= ctx.cap
    for kappa in kappas:
        res = check_twist_classes(ctx.space, psi, kappa, certify=certify)
        out.append(res)
    return {"ok": all(r["ok"] for r in out), "cases": out}


def _run_y_quotient(ctx: ParamContext, psi) -> dict:
    from .weilmod import check_y_quotient_structure
    return check_y_quotient_structure(ctx.space, psi, ctx.rng("y-quotient"))


def _run_steinberg_generator(ctx: ParamContext, psi) -> dict:
    stein = ctx.steinberg()
    e = stein.generator
    weyl = stein.weyl
    torus = ctx.subgroup(SubgroupId.torus())
    rng = ctx.rng("lift-choice")
    translates = {w: rng.choice(torus) for w in weyl.elements}
    rebuilt = stein.build_generator(lift_translates=translates)
    return {"ok": rebuilt == e, "support": e.support_size,
            "cells": len(weyl.elements) * len(stein.borel)}


def _run_coords_roundtrip(ctx: ParamContext, psi) -> dict:
    import numpy as np
    stein = ctx.steinberg()
    f = ctx.coeff_field
    rng = ctx.rng("coords")
    e = stein.generator
    for trial in range(100):
        coords = np.array([rng.randrange(f.size)
                           for _ in range(len(stein.sylow))], dtype=np.int64)
        vec = stein.reconstruct(coords)
        back = stein.coords(vec)
        if not np.array_equal(back, coords):
            return {"ok": False, "witness": trial}
    # the ideal is the regular module: u0 (u e) = (u0 u) e
    for trial in range(50):
        u0 = rng.choice(stein.sylow)
        u = rng.choice(stein.sylow)
        if e.translate(u).translate(u0) != e.translate(u0 * u):
            return {"ok": False, "witness": ("regular", u0.key, u.key)}
    return {"ok": True, "trials": 100}


def _run_rank_one(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_rank_one_relation
    stein = ctx.steinberg()
    cases = []
    for a in ctx.q_field.nonzero_codes():
        for i in range(1, ctx.n):
            cases.append(check_rank_one_relation(stein, "swap", i, a))
        cases.append(check_rank_one_relation(stein, "flip", ctx.n, a))
    return {"ok": all(c["ok"] for c in cases), "instances": len(cases)}


def _run_reflection_recursion(ctx: ParamContext, psi) -> dict:
    from .characters import in_stabilizer
    from .spgroup import adjacent_swap
    from .steinberg import check_reflection_recursion
    from .weilmod import all_n_tuples
    if ctx.n < 2:
        return {"ok": None, "vacuous": "no adjacent swaps at n = 1"}
    stein = ctx.steinberg().with_character(psi)
    instances = 0
    for i in range(1, ctx.n):
        wcls = ctx.space.weyl.class_of(adjacent_swap(ctx.space, i))
        uplus = stein.u_plus(wcls)
        for v in all_n_tuples(ctx.space):
            if all(in_stabilizer(ctx.space, v, u) for u in uplus):
                res = check_reflection_recursion(stein, i, v)
                if not res["ok"]:
                    return res
                instances += 1
    return {"ok": True, "instances": instances}


def _run_reflection_on_eigenvector(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_reflection_on_eigenvector
    if ctx.n < 2:
        return {"ok": None, "vacuous": "no adjacent swaps at n = 1"}
    stein = ctx.steinberg().with_character(psi)
    cases = [check_reflection_on_eigenvector(stein, a) for a in range(ctx.q)]
    return {"ok": all(c["ok"] for c in cases), "alphas": ctx.q}


def _run_eigenvector_stabilizer(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_eigenvector_stabilizer
    stein = ctx.steinberg().with_character(psi)
    return check_eigenvector_stabilizer(stein, cap=ctx.cap)


def _run_weyl_cosets(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_weyl_coset_eigenvectors
    stein = ctx.steinberg().with_character(psi)
    return check_weyl_coset_eigenvectors(stein)


def _run_flip_last(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_last_flip
    return check_last_flip(ctx.steinberg().with_character(psi))


def _run_flip_second(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_second_flip
    res = check_second_flip(ctx.steinberg().with_character(psi),
                            seed=ctx.seed)
    return res


def _run_conjugation_relations(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_conjugation_relations
    return check_conjugation_relations(ctx.space)


def _run_embedding(ctx: ParamContext, psi) -> dict:
    from .steinberg import build_weil_embedding, check_torus_permutes_blocks
    stein = ctx.steinberg()
    twist = _twist_of(ctx, psi)
    emb = build_weil_embedding(stein, twist)
    blocks = check_torus_permutes_blocks(stein, emb)
    expected = (ctx.q ** ctx.n - 1) // 2
    return {"ok": emb.dim == expected and blocks["ok"], "dim": emb.dim,
            "torus_blocks": blocks["ok"]}


def _run_embedding_isomorphisms(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_embedding_isomorphisms
    return check_embedding_isomorphisms(ctx.steinberg(), _twist_of(ctx, psi))


def _run_main_theorem(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_weil_above_socle
    return check_weil_above_socle(ctx.steinberg(), tuple(ctx.twists[:2]),
                                  seed=ctx.seed)


def _run_ideal_involution(ctx: ParamContext, psi) -> dict:
    from .steinberg import check_ideal_involution
    return check_ideal_involution(ctx.steinberg(), seed=ctx.seed)


def _twist_of(ctx: ParamContext, psi) -> int:
    fq = ctx.q_field
    return fq.mul(psi.twist, fq.inv(ctx.psi.twist))


# gates ----------------------------------------------------------------------

def _odd_p(ctx):
    return ctx.p != 2 or "odd base characteristic required"


def _char_two(ctx):
    if ctx.p == 2:
        return "odd base characteristic required"
    return ctx.l == 2 or "coefficient characteristic 2 required"


def _ga(ctx):
    return ctx.ga_allowed or "group-algebra vectors out of budget here"


def _ga_char_two(ctx):
    g = _ga(ctx)
    if g is not True:
        return g
    return _char_two(ctx)


def _ga_divides(ctx):
    g = _ga(ctx)
    if g is not True:
        return g
    if ctx.n == 1 or (ctx.q + 1) % ctx.l == 0:
        return True
    return "needs l dividing q+1 (or n = 1)"


def _small_sp_m(ctx):
    from .spgroup import gl_order
    order = ctx.q ** (ctx.n * (ctx.n + 1) // 2) * gl_order(ctx.n, ctx.q)
    return order <= 20000 or "M-stabilizer too large for exhaustive pass"


def _small_heisenberg(ctx):
    if ctx.p == 2:
        return "odd base characteristic required"
    return ctx.q ** (2 * (2 * ctx.n + 1)) <= 10 ** 7 or \
        "too many Heisenberg pairs"


def _irreducibility_budget(ctx):
    dim = (ctx.q ** ctx.n - 1) // 2 if ctx.p != 2 else ctx.q ** ctx.n - 1
    return ctx.coeff_field.size ** dim <= ctx.cap or \
        "exhaustive spinning out of budget"


def _stab_budget(ctx):
    g = _ga_divides(ctx)
    if g is not True:
        return g
    return _small_sp_m(ctx)


CHECKS = [
    ("foundation_orders", False, lambda ctx: True, _run_foundation_orders),
    ("foundation_closure", False, lambda ctx: ctx.q ** (2 * ctx.n ** 2) <= 10 ** 5
     or "too many pairs", _run_foundation_closure),
    ("weyl_lengths", False, lambda ctx: True, _run_weyl_lengths),
    ("factor_unipotent", False,
     lambda ctx: len(ctx.space.weyl.elements) * ctx.q ** (ctx.n ** 2) <= 10 ** 4
     or "too many factorizations", _run_factor_unipotent),
    ("parabolic_enumeration", False,
     lambda ctx: (ctx.q + 1) * ctx.q ** (ctx.n ** 2) * (ctx.q - 1) ** ctx.n <= 10 ** 6
     or "parabolic too large", _run_parabolic_enumeration),
    ("index_valuation", False,
     lambda ctx: ctx.q % 4 == 1 or "stated for q = 1 mod 4",
     _run_index_valuation),
    ("center_probe", False,
     lambda ctx: (ctx.p != 2 or "odd base characteristic required")
     if ctx.q ** (ctx.n ** 2) * (ctx.q - 1) ** ctx.n <= 10 ** 4
     else "probe set too large", _run_center_probe),
    ("char_homomorphism", True, _small_sp_m, _run_char_homomorphism),
    ("char_distinctness", True,
     lambda ctx: ctx.q ** (2 * ctx.n) * ctx.q ** (ctx.n * (ctx.n + 1) // 2) <= 10 ** 6
     or "too many pairs", _run_char_distinctness),
    ("char_root_values", True, lambda ctx: True, _run_char_root_values),
    ("char_conjugation", True,
     lambda ctx: len(ctx.space.weyl.elements) * ctx.q ** (ctx.n ** 2) <= 10 ** 5
     or "too many pairs", _run_char_conjugation),
    ("char_determinant", False,
     lambda ctx: _odd_p(ctx) if _small_sp_m(ctx) is True
     else _small_sp_m(ctx), _run_char_determinant),
    ("char_twist_separation", False,
     lambda ctx: _odd_p(ctx) if ctx.q ** (2 * ctx.n) <= 100
     else "too many vector pairs", _run_char_twist_separation),
    ("x_homomorphism", True, _small_sp_m, _run_x_homomorphism),
    ("x_irreducibility", True, _irreducibility_budget, _run_x_irreducibility),
    ("x_nonisomorphism", True, _irreducibility_budget, _run_x_nonisomorphism),
    ("x_quotient_map", True, _char_two, _run_x_quotient_map),
    ("heisenberg_homomorphism", True, _small_heisenberg, _run_heisenberg),
    ("weil_intertwining", True, _small_heisenberg, _run_weil_intertwining),
    ("weil_single_valued", True, _odd_p, _run_weil_single_valued),
    ("gauss_sum_value", True, _odd_p, _run_gauss_sum),
    ("flip_closed_forms", True, _char_two, _run_flip_closed_forms),
    ("twist_classes", False,
     lambda ctx: _odd_p(ctx) if _irreducibility_budget(ctx) is True
     else _irreducibility_budget(ctx), _run_twist_classes),
    ("y_quotient_structure", False, _char_two, _run_y_quotient),
    ("steinberg_generator", False, _ga, _run_steinberg_generator),
    ("coords_roundtrip", False, _ga, _run_coords_roundtrip),
    ("rank_one_relation", False, _ga, _run_rank_one),
    ("reflection_recursion", True, _ga, _run_reflection_recursion),
    ("reflection_on_eigenvector", True, _ga, _run_reflection_on_eigenvector),
    ("eigenvector_stabilizer", True, _stab_budget, _run_eigenvector_stabilizer),
    ("weyl_coset_eigenvectors", True, _ga_divides, _run_weyl_cosets),
    ("flip_last_eigenvector", True, _ga_char_two, _run_flip_last),
    ("flip_second_eigenvector", True, _ga_char_two, _run_flip_second),
    ("conjugation_relations", False,
     lambda ctx: True if ctx.n >= 2 else None, _run_conjugation_relations),
    ("embedding", True, _ga_divides, _run_embedding),
    ("embedding_isomorphisms", True,
     lambda ctx: _ga_divides(ctx) if _irreducibility_budget(ctx) is True
     else _irreducibility_budget(ctx), _run_embedding_isomorphisms),
    ("weil_above_socle", False, _ga_char_two, _run_main_theorem),
    ("ideal_involution", False,
     lambda ctx: _ga(ctx) if sp_order(ctx.n, ctx.q) <= 100
     else "sanity check runs at the smallest parameters only",
     _run_ideal_involution),
]


def run_suite(cfg: RunConfig) -> dict:
    contexts = build_contexts(cfg)
    results: list[CheckResult] = []
    for ctx in contexts:
        for name, per_twist, gate, runner in CHECKS:
            twists = ctx.twists if per_twist else [None]
            for twist in twists:
                params = ctx.params_dict(twist)
                gate_result = gate(ctx)
                if gate_result is None:
                    results.append(CheckResult(name, "vacuous", params,
                                               {"reason": "not defined here"}))
                    continue
                if gate_result is not True:
                    results.append(CheckResult(name, "skipped", params,
                                               {"reason": gate_result}))
                    continue
                psi = ctx.psi if twist in (None, 1) \
                    else ctx.psi.twisted(twist)
                start = time.perf_counter()
                try:
                    raw = runner(ctx, psi)
                except Exception as exc:  # a crash is a failing check
                    raw = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
                elapsed = time.perf_counter() - start
                status, detail = _status_of(dict(raw))
                results.append(CheckResult(name, status, params,
                                           detail or None, elapsed))
    summary = {"pass": 0, "fail": 0, "skipped": 0, "vacuous": 0}
    for r in results:
        summary[r.status] += 1
    params_echo = {
        "tier": cfg.tier,
        "sets": [ctx.params_dict() | {"twists": ctx.twists}
                 for ctx in contexts],
        "cap": cfg.cap,
    }
    return {
        "params": params_echo,
        "version": __version__,
        "seed": cfg.seed,
        "results": [r.to_json(cfg.timing) for r in results],
        "summary": summary,
    }


def render_text(report: dict) -> str:
    lines = [f"steinweil {report['version']} seed={report['seed']}"]
    for r in report["results"]:
        p = r["params"]
        where = f"n={p['n']} q={p['q']} l={p['l']} m={p['m']}"
        if "twist" in p:
            where += f" twist={p['twist']}"
        line = f"{r['status'].upper():8s} {r['name']:28s} [{where}]"
        if r["status"] == "fail" and r.get("detail"):
            line += f"  {json.dumps(r['detail'], default=str)}"
        if "wall_time_ms" in r:
            line += f"  ({r['wall_time_ms']} ms)"
        lines.append(line)
    s = report["summary"]
    lines.append(f"summary: {s['pass']} pass, {s['fail']} fail, "
                 f"{s['skipped']} skipped, {s['vacuous']} vacuous")
    return "\n".join(lines) + "\n"


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, default=str) + "\n"


def _parse_modulus(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad modulus {text!r}") from exc


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steinweil",
        description="Exact verification suite for the Weil constituents of "
                    "the Steinberg module of Sp(2n,q).")
    parser.add_argument("--n", type=int, default=None)
    parser.add_argument("--q", type=int, default=None)
    parser.add_argument("--q-modulus", type=str, default=None,
                        help="comma-separated coefficients, constant first")
    parser.add_argument("--l", type=int, default=2)
    parser.add_argument("--m", type=int, default=None)
    parser.add_argument("--l-modulus", type=str, default=None)
    parser.add_argument("--tier", choices=sorted(TIERS), default=None)
    parser.add_argument("--twists", type=str, default="auto",
                        help="'auto' or comma-separated nonzero codes")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--cache-dir", type=str,
                        default=os.environ.get("STEINWEIL_CACHE"))
    parser.add_argument("--report", choices=["text", "json"], default="text")
    parser.add_argument("--out", type=str, default=None)
    parser.add_argument("--cap", type=int, default=10 ** 7)
    parser.add_argument("--timing", action="store_true",
                        help="include wall times (breaks byte-identical reports)")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        twists = "auto" if args.twists == "auto" else \
            [int(t) for t in args.twists.split(",")]
        cfg = RunConfig(
            n=args.n, q=args.q,
            q_modulus=_parse_modulus(args.q_modulus) if args.q_modulus else None,
            l=args.l, m=args.m,
            l_modulus=_parse_modulus(args.l_modulus) if args.l_modulus else None,
            tier=args.tier if (args.tier or args.n or args.q) else "core",
            twists=twists, seed=args.seed, cache_dir=args.cache_dir,
            report=args.report, out=args.out, cap=args.cap,
            timing=args.timing)
        report = run_suite(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    text = render_json(report) if cfg.report == "json" else render_text(report)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["summary"]["fail"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
