"""
Algebraicity verdicts for Tropiscope
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from limitset.estimate import LimitSetEstimate
from polyhedra.spherical import (VERTEX, BalanceReport, SphericalComplex, balance_check,
                                 complex_dim_and_homogeneity, directed_hausdorff, vertex_hausdorff)

logger = logging.getLogger(__name__)

ALGEBRAIC_CONSISTENT = "AlgebraicConsistent"
NOT_ALGEBRAIC = "NotAlgebraic"
INCONCLUSIVE = "Inconclusive"

MIN_SHELLS = 3
ORACLE_CLOUD_POINTS = 2000
ORACLE_DENSE_SAMPLES = 256


@dataclass
class Verdict:
    decision: str
    dim_estimate: int
    cells: List[Dict[str, Any]]
    balance: Dict[str, Any]
    homogeneous: bool
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "decision": self.decision,
            "dim_estimate": self.dim_estimate,
            "cells": self.cells,
            "balance": self.balance,
            "diagnostics": dict(self.diagnostics, homogeneous=self.homogeneous),
        }


def oracle_comparison(estimate: LimitSetEstimate, oracle: SphericalComplex, k: int,
                      vertex_tol: float = 2e-2, cloud_tol: float = 0.1) -> Dict[str, Any]:
    """Distances between the estimate and the exact limit set of a polynomial"""
    outer = estimate.cloud.outermost().directions
    if len(outer) > ORACLE_CLOUD_POINTS:
        outer = outer[np.linspace(0, len(outer) - 1, ORACLE_CLOUD_POINTS).astype(int)]
    dense = oracle.dense_samples(ORACLE_DENSE_SAMPLES)
    cloud_distance = max(directed_hausdorff(outer, dense), directed_hausdorff(dense, outer))
    result: Dict[str, Any] = {"cloud_hausdorff": cloud_distance, "oracle_cells": len(oracle.cells)}
    if k == 1:
        distance = vertex_hausdorff(estimate.complex, oracle)
        result["vertex_hausdorff"] = distance
        result["agrees"] = bool(distance <= vertex_tol)
    else:
        result["agrees"] = bool(cloud_distance <= cloud_tol)
    return result


class VerdictBuilder:
    """Applies the decision rules to a limit set estimate"""

    def __init__(self, k: int, oracle: Optional[SphericalComplex] = None,
                 vertex_tol: float = 2e-2, cloud_tol: float = 0.1, seed: int = 0):
        self.k = k
        self.oracle = oracle
        self.vertex_tol = vertex_tol
        self.cloud_tol = cloud_tol
        self.seed = seed
        self.logger = logging.getLogger(__name__)

    def build(self, estimate: LimitSetEstimate) -> Verdict:
        k = self.k
        cells = estimate.cells
        uncertain = [c for c in cells if c.cell.low_confidence or c.ambiguous]
        confirmed = [c for c in cells if not (c.cell.low_confidence or c.ambiguous)]
        dim_estimate = max((c.cell.dim for c in cells), default=-1)
        confirmed_dim = max((c.cell.dim for c in confirmed), default=-1)
        _, homogeneous = complex_dim_and_homogeneity(estimate.complex)

        balance = self._balance(estimate.complex)
        diagnostics: Dict[str, Any] = {
            "k": k,
            "eps": estimate.eps,
            "shells": [{"radius": s.radius, "points": len(s)} for s in estimate.samples],
            "components_per_shell": estimate.components_per_shell,
            "shell_stable": estimate.shell_stable,
            "low_confidence_cells": sum(c.cell.low_confidence for c in cells),
            "ambiguous_cells": sum(c.ambiguous for c in cells),
        }
        if self.oracle is not None:
            diagnostics["oracle"] = oracle_comparison(estimate, self.oracle, k, self.vertex_tol, self.cloud_tol)

        reasons: List[str] = []
        persistent = [c for c in cells if c.persistent_irrational]
        if confirmed_dim >= k:
            decision = NOT_ALGEBRAIC
            reasons.append(f"a confirmed cell of dimension {confirmed_dim} >= k = {k}")
        elif persistent:
            decision = NOT_ALGEBRAIC
            reasons.append(f"{len(persistent)} irrational isolated direction(s) persist across shells")
        else:
            if dim_estimate != k - 1:
                reasons.append(f"estimated dimension {dim_estimate} differs from k - 1 = {k - 1}")
            if not all(c.cell.rational for c in cells if c.cell.kind == VERTEX):
                reasons.append("a vertex slope is not rational")
            if not balance.balanced:
                reasons.append("the directions are not balanced")
            if uncertain:
                reasons.append(f"{len(uncertain)} low-confidence or ambiguous cell(s)")
            if estimate.shells < MIN_SHELLS:
                reasons.append(f"fewer than {MIN_SHELLS} shells")
            if not estimate.shell_stable:
                reasons.append("component count changes between the outermost shells")
            if k >= 2:
                if self.oracle is None:
                    reasons.append("no exact limit set to compare with for k >= 2")
                elif not diagnostics["oracle"]["agrees"]:
                    reasons.append("the estimate disagrees with the exact limit set")
            decision = INCONCLUSIVE if reasons else ALGEBRAIC_CONSISTENT

        diagnostics["reasons"] = reasons
        self.logger.info(f"Verdict {decision} (dimension {dim_estimate}, k={k})"
                         + (f": {'; '.join(reasons)}" if reasons else ""))
        return Verdict(decision, dim_estimate, [c.to_dict() for c in cells], balance.to_dict(),
                       homogeneous, diagnostics)

    def _balance(self, complex_: SphericalComplex) -> BalanceReport:
        if not complex_.cells:
            return BalanceReport(False, 0, False, False, False, None)
        return balance_check(complex_, seed=self.seed)


def algebraicity_verdict(estimate: LimitSetEstimate, k: int, oracle: Optional[SphericalComplex] = None,
                         vertex_tol: float = 2e-2, cloud_tol: float = 0.1) -> Verdict:
    return VerdictBuilder(k, oracle, vertex_tol, cloud_tol).build(estimate)
