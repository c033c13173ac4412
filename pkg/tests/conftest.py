import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

import greenrate as gr


def make_halfspace(eps_lower, eps_upper=1.0):
    return gr.LayeredStack(
        layers=(
            gr.Layer(gr.Constant(eps_upper), np.inf),
            gr.Layer(gr.Constant(eps_lower), np.inf),
        ),
        source_layer=0,
    )


def drude_lorentz_halfspace(gamma):
    """Vacuum above a single-resonance medium (the recurring figure setup)."""
    return gr.LayeredStack(
        layers=(
            gr.Layer(gr.Constant(1.0), np.inf),
            gr.Layer(gr.DrudeLorentz(omega_p=0.5, omega_t=1.0, gamma=gamma), np.inf),
        ),
        source_layer=0,
    )


def random_passive_eps(rng, min_im=0.05):
    re = rng.uniform(-8.0, 8.0)
    im = rng.uniform(min_im, 2.0)
    return complex(re, im)


def random_planar_scenario(rng, five_layer: bool):
    """A randomized lossy stack with in-layer positions for property suites."""
    if five_layer:
        eps_core = complex(rng.uniform(1.5, 4.0), rng.uniform(0.0, 0.02))
        d_core = rng.uniform(0.15, 0.6)
        stack = gr.LayeredStack(
            layers=(
                gr.Layer(gr.Constant(1.0), np.inf),
                gr.Layer(gr.Constant(random_passive_eps(rng)), rng.uniform(0.02, 0.1)),
                gr.Layer(gr.Constant(eps_core), d_core),
                gr.Layer(gr.Constant(random_passive_eps(rng)), rng.uniform(0.02, 0.1)),
                gr.Layer(gr.Constant(1.0), np.inf),
            ),
            source_layer=2,
        )
        z_a = rng.uniform(0.2, 0.8) * d_core
        z_b = rng.uniform(0.2, 0.8) * d_core
    else:
        stack = make_halfspace(random_passive_eps(rng))
        z_a = rng.uniform(0.02, 0.3)
        z_b = rng.uniform(0.02, 0.3)
    rx = rng.uniform(0.0, 0.4)
    pos = gr.InLayerPositions(z_a=z_a, z_b=z_b, rx=rx)
    omega = rng.uniform(0.7, 1.3)
    return stack, pos, omega
