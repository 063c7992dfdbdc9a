"""SVG figures of profile families."""
import io

import matplotlib

matplotlib.use('Agg')  # Non-interactive backend
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .rotational import catenoid_height  # noqa: E402

plt.rcParams['svg.hashsalt'] = 'betalab'
plt.rcParams['svg.fonttype'] = 'path'


def profiles_svg(profiles, catenoid=False, title=None):
    """Overlay f(r) of every profile; optionally the beta = 0 catenoid for reference."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    try:
        for profile in profiles:
            ax.plot(profile.r_grid, profile.f, linewidth=1.4, label=f"beta = {profile.beta:g}")
        if catenoid and profiles:
            reference = profiles[0]
            magnitude = np.hypot(reference.c1, reference.c2)
            r = reference.r_grid[reference.r_grid > magnitude]
            if magnitude > 0 and r.size > 1 and reference.c1 != 0:
                offset = reference.f0 - catenoid_height(r[0], reference.c1, reference.c2)
                ax.plot(r, catenoid_height(r, reference.c1, reference.c2) + offset,
                        linestyle='--', color='black', linewidth=1.0, label='catenoid')
        ax.set_xlabel('r')
        ax.set_ylabel('f(r)')
        ax.set_title(title or 'Rotational profiles')
        ax.grid(True, linewidth=0.3)
        ax.legend(loc='best')

        buffer = io.StringIO()
        fig.savefig(buffer, format='svg', metadata={'Date': None})
        return buffer.getvalue()
    finally:
        plt.close(fig)
