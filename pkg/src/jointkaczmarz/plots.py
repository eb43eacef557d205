"""SVG figures: reconstructions against the phantom and per-iteration metrics."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import ContractError  # noqa: E402
from .metrics import SsimOptions, ssim_1d  # noqa: E402

# fixed hash salt and no timestamp keep the SVG output byte-stable
_RC = {"svg.hashsalt": "jointkaczmarz", "svg.fonttype": "path"}
_META = {"Date": None, "Creator": None}


def emit_plots(history, instance, out_dir, others=None, prefix=""):
    """Write ``reconstruction.svg`` and ``metrics.svg`` into ``out_dir``.

    Args:
        history: non-empty :class:`~jointkaczmarz.joint.JointHistory`.
        others: optional ``{label: image}`` of extra reconstructions to
            overlay (e.g. image-only methods).

    Returns:
        List of written file paths.
    """
    if history is None or not len(history):
        raise ContractError("cannot plot an empty history")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        x = np.arange(instance.dims[1])
        if instance.c_true is not None:
            ax.step(x, instance.c_true, where="mid", color="k", lw=1.5, label="phantom")
        ax.step(x, history.c_final, where="mid", lw=1.2, label="(c,S) reconstruction")
        for label, c in (others or {}).items():
            ax.step(x, c, where="mid", lw=1.0, label=label)
        ax.set_xlabel("pixel")
        ax.set_ylabel("concentration")
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{prefix}reconstruction.svg")
        fig.savefig(path, format="svg", metadata=_META)
        plt.close(fig)
        paths.append(path)

        fig, ax = plt.subplots(figsize=(6, 3.5))
        it = [r.outer_index + 1 for r in history]
        ax.semilogy(it, [r.objective.total for r in history], label="J")
        if instance.c_true is not None:
            ax.semilogy(it, [r.l2_error for r in history], label="l2 error")
            ax2 = ax.twinx()
            ax2.plot(it, [ssim_1d(r.c, instance.c_true, SsimOptions()) for r in history],
                     color="tab:green", label="SSIM")
            ax2.set_ylabel("SSIM")
            ax2.legend(loc="upper right", fontsize=8)
        ax.set_xlabel("outer iteration")
        ax.legend(loc="upper left", fontsize=8)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{prefix}metrics.svg")
        fig.savefig(path, format="svg", metadata=_META)
        plt.close(fig)
        paths.append(path)
    return paths
