"""SVG figures of trajectories."""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from ...domain.instance import FloatArray
from .paths import prepare_output
from .trajectory_repository import TrajectoryTable

matplotlib.use("Agg")

# Fixed salt and no date keep SVG output byte-stable.
_SVG_RC = {"svg.hashsalt": "opinion-pds", "svg.fonttype": "none"}
_LEGEND_LIMIT = 12


class SvgPlotRenderer:
    """Opinions, total allocations and distance to equilibrium over time."""

    def render(
        self,
        path: Path,
        table: TrajectoryTable,
        *,
        equilibrium: FloatArray | None = None,
        costs: FloatArray | None = None,
        budgets: FloatArray | None = None,
    ) -> Path:
        out = prepare_output(path)
        panels = 1 + (costs is not None) + (equilibrium is not None)
        with matplotlib.rc_context(_SVG_RC):
            fig = Figure(figsize=(7.0, 3.0 * panels))
            axes = fig.subplots(panels, 1, sharex=True, squeeze=False)[:, 0]

            ax = axes[0]
            for i in range(table.n):
                agent = table.agent_states(i)
                for j in range(table.m):
                    ax.plot(table.times, agent[:, j], linewidth=1.2, label=f"agent {i + 1}, topic {j + 1}")
            ax.set_ylabel("opinion $z_i^j(t)$")
            if table.n * table.m <= _LEGEND_LIMIT:
                ax.legend(loc="best", fontsize=7)

            k = 1
            if costs is not None:
                ax = axes[k]
                k += 1
                c = np.asarray(costs, dtype=np.float64).reshape(table.n, table.m)
                for i in range(table.n):
                    line = ax.plot(table.times, table.agent_states(i) @ c[i], label=f"agent {i + 1}")[0]
                    if budgets is not None:
                        ax.axhline(float(budgets[i]), color=line.get_color(), linestyle="--", linewidth=0.8)
                ax.set_ylabel("allocation $c_i^T z_i(t)$")
                if table.n <= _LEGEND_LIMIT:
                    ax.legend(loc="best", fontsize=7)

            if equilibrium is not None:
                ax = axes[k]
                target = np.asarray(equilibrium, dtype=np.float64).reshape(1, -1)
                dist = np.linalg.norm(table.states - target, axis=1)
                ax.semilogy(table.times, np.maximum(dist, np.finfo(float).tiny), color="black")
                ax.set_ylabel("$\\|z(t) - z^*\\|$")

            axes[-1].set_xlabel("time $t$")
            fig.tight_layout()
            fig.savefig(out, format="svg", metadata={"Date": None})
        return out
