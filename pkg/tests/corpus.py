"""Shared corpora: fields, unimodular class tables, and standard-form sweeps."""

from __future__ import annotations

import itertools

from padiczeta.fields import FieldDesc
from padiczeta.quadform import UnimodularClass, square_class_reps

F3 = FieldDesc.make(3)
F5 = FieldDesc.make(5)
Z2 = FieldDesc.make(2)
F4 = FieldDesc.make(2, 2)
F8 = FieldDesc.make(2, 3)

ODD_FIELDS = (F3, F5)
TWO_FIELDS = (Z2, F4)


def table_classes(field: FieldDesc, rmax: int) -> list[UnimodularClass]:
    """Every table shape of rank <= rmax with canonical square coefficients."""
    reps = square_class_reps(field)
    out = [UnimodularClass.zero(field)]
    for r in range(1, rmax + 1):
        if field.p != 2:
            if r % 2:
                for a in reps:
                    out.append(UnimodularClass(field, (r - 1) // 2, False, (a,)))
            else:
                out.append(UnimodularClass.hyp(field, r // 2))
                out.append(UnimodularClass(field, (r - 2) // 2, True, ()))
        else:
            if r % 2:
                for a in reps:
                    out.append(UnimodularClass(field, (r - 1) // 2, False, (a,)))
                    if r >= 3:
                        out.append(UnimodularClass(field, (r - 3) // 2, True, (a,)))
            else:
                out.append(UnimodularClass.hyp(field, r // 2))
                out.append(UnimodularClass(field, (r - 2) // 2, True, ()))
                for a, b in itertools.combinations_with_replacement(reps, 2):
                    out.append(UnimodularClass(field, (r - 2) // 2, False, (a, b)))
                    if r >= 4:
                        out.append(UnimodularClass(field, (r - 4) // 2, True, (a, b)))
    return out


def jordan_sweep_odd(field: FieldDesc, rank_max: int = 3,
                     exponents: tuple[int, ...] = (0, 1, 2)):
    """All block assignments over the exponent window with total rank <= rank_max."""
    per_slot = [None] + table_classes(field, rank_max)[1:]
    for combo in itertools.product(per_slot, repeat=len(exponents)):
        blocks = [(e, c) for e, c in zip(exponents, combo) if c is not None]
        if sum(c.rank for _, c in blocks) > rank_max:
            continue
        yield blocks


def jordan_sweep_two(field: FieldDesc, rank_max: int = 3,
                     exponents: tuple[int, ...] = (0, 1)):
    per_slot = [None] + table_classes(field, rank_max)[1:]
    for combo in itertools.product(per_slot, repeat=len(exponents)):
        blocks = [(e, c) for e, c in zip(exponents, combo) if c is not None]
        if sum(c.rank for _, c in blocks) > rank_max:
            continue
        yield blocks


def dispatch_variants_odd(field: FieldDesc, blocks):
    """(lam, c) pairs covering the three odd-p dispatch cases, standard-form or
    evaluator-droppable."""
    p = field.p
    variants = [(None, 0)]                      # homogeneous
    variants.append((3, 0))                     # linear dominates, empty-c
    variants.append((3, p ** 3))                # tie v(c) = lambda
    variants.append((3, p ** 4))                # v(c) > lambda
    variants.append((None, 1))                  # constant dominates, kappa = 0
    variants.append((None, p))                  # kappa = 1
    variants.append((3, 1))                     # kappa = 0 < lambda
    variants.append((3, p))                     # kappa = 1 < lambda
    return variants
