"""Tabular and graphical summaries of certificate sizes.

The stats path emits a tab-separated table and, on request, a matplotlib
figure rendered to a file next to it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import size_metrics
from .constructions import Certificate

COLUMNS = (
    "label",
    "gates",
    "wires",
    "instance_vars",
    "proof_size",
    "min_convention",
    "claimed_linear",
    "claimed_degree",
)


@dataclass(frozen=True)
class StatsRow:
    label: str
    gates: int
    wires: int
    instance_vars: int
    proof_size: int
    min_convention: int
    claimed_linear: bool | None
    claimed_degree: int | None

    def as_tuple(self) -> tuple:
        return (
            self.label,
            self.gates,
            self.wires,
            self.instance_vars,
            self.proof_size,
            self.min_convention,
            self.claimed_linear,
            self.claimed_degree,
        )


def stats_row(label: str, cert: Certificate, instance_vars: int | None = None) -> StatsRow:
    n_vars = instance_vars if instance_vars is not None else len(cert.circuit.input_variables())
    m = size_metrics(cert.circuit, n_vars)
    return StatsRow(
        label=label,
        gates=m.gate_count,
        wires=m.wire_count,
        instance_vars=m.instance_vars,
        proof_size=m.proof_size,
        min_convention=m.min_convention,
        claimed_linear=cert.claims.y_linear,
        claimed_degree=cert.claims.exact_degree,
    )


def render_table(rows: list[StatsRow]) -> str:
    out = ["\t".join(COLUMNS)]
    for r in rows:
        out.append("\t".join("" if v is None else str(v) for v in r.as_tuple()))
    return "\n".join(out) + "\n"


def render_figure(rows: list[StatsRow], path: str) -> None:
    """Bar chart of gate counts and reported proof sizes, written to a file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [r.label for r in rows]
    gates = [r.gates for r in rows]
    sizes = [r.proof_size for r in rows]
    x = range(len(rows))
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(rows) + 2.0), 3.6))
    ax.bar([i - 0.2 for i in x], gates, width=0.4, label="gates")
    ax.bar([i + 0.2 for i in x], sizes, width=0.4, label="proof size")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("count")
    if max(gates + sizes, default=1) > 50 * max(1, min(gates + sizes, default=1)):
        ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
