"""Named experiment presets: every headline construction as a checked-in config."""

import math

_ROT = 1.0 / math.sqrt(math.pi)
_C45 = math.cos(math.pi / 4)
_S45 = math.sin(math.pi / 4)

PRESETS = {
    "identity-1d": {
        "command": "verify-onb",
        "description": "Classical Fourier basis: E(Z, id) over Lebesgue[0,1].",
        "config": {
            "measure": {"kind": "lebesgue_box", "lo": [0.0], "hi": [1.0]},
            "phase": {"kind": "identity", "dim": 1},
            "spectrum": {"kind": "lattice", "A": [[1.0]], "radius": 32},
            "quad": {"scheme": "tensor-gauss", "order": 64},
            "seed": 1,
            "tol_orth": 1e-10,
            "tol_complete": 0.02,
        },
    },
    "cantor4": {
        "command": "verify-onb",
        "description": (
            "Binary-to-quaternary digit phase on Lebesgue[0,1] with the "
            "four-adic binary spectrum (level 6); the pushforward is the "
            "middle-fourth Cantor measure."
        ),
        "config": {
            "measure": {"kind": "lebesgue_box", "lo": [0.0], "hi": [1.0]},
            "phase": {
                "kind": "digit_map",
                "in_base": 2,
                "in_digits": [0, 1],
                "out_base": 4,
                "digit_map": {"0": 0.0, "1": 2.0},
                "depth": 30,
            },
            "spectrum": {"kind": "lambda4", "n": 6},
            "quad": {"scheme": "self-similar-digit", "depth": 40},
            "seed": 1,
            "tol_orth": 1e-6,
            "tol_complete": 0.05,
        },
    },
    "cantor3": {
        "command": "verify-onb",
        "description": (
            "Ternary-to-quaternary digit phase on the middle-third Cantor "
            "measure with the four-adic binary spectrum (level 6)."
        ),
        "config": {
            "measure": {
                "kind": "self_similar",
                "ratio": 3,
                "digits": [[0.0, 0.5], [2.0, 0.5]],
            },
            "phase": {
                "kind": "digit_map",
                "in_base": 3,
                "in_digits": [0, 2],
                "out_base": 4,
                "digit_map": {"0": 0.0, "2": 2.0},
                "depth": 30,
            },
            "spectrum": {"kind": "lambda4", "n": 6},
            "quad": {"scheme": "self-similar-digit", "depth": 40},
            "seed": 1,
            "tol_orth": 1e-6,
            "tol_complete": 0.05,
        },
    },
    "unipotent-sin": {
        "command": "verify-onb",
        "description": (
            "Unipotent phase (x1 + sin(2 pi x2), x2) on [0,1]^2 with the "
            "integer lattice spectrum."
        ),
        "config": {
            "measure": {"kind": "lebesgue_box", "lo": [0.0, 0.0], "hi": [1.0, 1.0]},
            "phase": {"kind": "unipotent", "l": ["sin(2*pi*x2)"]},
            "spectrum": {"kind": "lattice", "A": [[1.0, 0.0], [0.0, 1.0]], "radius": 8},
            "quad": {"scheme": "tensor-gauss", "order": 64},
            "seed": 1,
            "tol_orth": 1e-8,
            "tol_complete": 0.02,
            "battery": "periodic",
        },
    },
    "square-phase-1d": {
        "command": "verify-onb",
        "description": (
            "Negative instance: phase x^2 on Lebesgue[0,1] with integer "
            "frequencies; orthogonality fails (Fresnel-size entries)."
        ),
        "config": {
            "measure": {"kind": "lebesgue_box", "lo": [0.0], "hi": [1.0]},
            "phase": {"kind": "custom", "expr": ["x1^2"], "in_dim": 1},
            "spectrum": {"kind": "lattice", "A": [[1.0]], "radius": 8},
            "quad": {"scheme": "tensor-gauss", "order": 64},
            "seed": 1,
        },
    },
    "holhos-disc": {
        "command": "verify-onb",
        "description": (
            "Disc-to-square area-preserving phase over the unit disc with the "
            "rotated lattice spectrum of the image square.  Orthogonality is "
            "the claim under test; at this small truncation the completeness "
            "proxy stays INCONCLUSIVE (exit 2) by design."
        ),
        "config": {
            "measure": {"kind": "lebesgue_disc", "center": [0.0, 0.0], "radius": 1.0},
            "phase": {"kind": "holhos"},
            "spectrum": {
                "kind": "lattice",
                "A": [[_C45 * _ROT, -_S45 * _ROT], [_S45 * _ROT, _C45 * _ROT]],
                "radius": 1.2,
            },
            "quad": {"scheme": "adaptive", "abs_tol": 2e-5, "max_subdivisions": 600, "order": 16},
            "seed": 1,
            "tol_orth": 1e-3,
        },
    },
    "halfbox-frame": {
        "command": "frame-bounds",
        "description": (
            "E(Z cap [-256, 256], id) over Lebesgue[0, 1/2]: restriction of a "
            "Parseval frame, tight bound 1."
        ),
        "config": {
            "measure": {"kind": "lebesgue_box", "lo": [0.0], "hi": [0.5]},
            "phase": {"kind": "identity", "dim": 1},
            "spectrum": {"kind": "lattice", "A": [[1.0]], "radius": 256},
            "quad": {"scheme": "tensor-gauss", "order": 24},
            "seed": 1,
            "basis": {"kind": "dyadic", "m": 64},
        },
    },
    "counterexample-exp": {
        "command": "tiling-check",
        "description": (
            "Triangular phase with z = e^{x2}: measure preserving but the "
            "image of [0,1)^2 overlaps its (1,0)-translate; not a tile."
        ),
        "config": {
            "phase": {"kind": "triangular2d", "z": "exp(x2)", "f": "0", "K": 0.0},
            "box": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]},
            "lattice": {"A": [[1.0, 0.0], [0.0, 1.0]]},
            "n": 200000,
            "bins": 16,
            "seed": 1,
        },
    },
    "unipotent-tiling": {
        "command": "tiling-check",
        "description": "Unipotent image of [0,1)^2 tiles under the integer lattice.",
        "config": {
            "phase": {"kind": "unipotent", "l": ["sin(2*pi*x2)"]},
            "box": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]},
            "lattice": {"A": [[1.0, 0.0], [0.0, 1.0]]},
            "n": 200000,
            "bins": 16,
            "seed": 1,
        },
    },
    "density-z2": {
        "command": "density",
        "description": "Beurling density of the integer lattice Z^2.",
        "config": {
            "spectrum": {"kind": "lattice", "A": [[1.0, 0.0], [0.0, 1.0]], "radius": 64},
            "windows": [10, 20, 40],
            "seed": 1,
        },
    },
    "density-lambda4": {
        "command": "density",
        "description": (
            "Four-adic binary spectrum: window counts 2^n on [0, 4^n), "
            "density decreasing toward zero."
        ),
        "config": {
            "spectrum": {"kind": "lambda4", "n": 8},
            "windows": [4, 16, 64, 256],
            "seed": 1,
        },
    },
    "heisenberg": {
        "command": "repdisc",
        "description": (
            "Gabor atoms from the 3-d nilpotent group phase (1, -t); blocks "
            "over [-2, 3) reproduce the classical integer Gabor system."
        ),
        "config": {
            "group": "heisenberg",
            "omega": {"lo": [0.0], "hi": [1.0]},
            "gamma": [[-2.0], [-1.0], [0.0], [1.0], [2.0]],
            "spectrum": {
                "kind": "explicit",
                "points": [[0.0, float(k)] for k in range(-8, 9)],
            },
            "window": {"lo": [-2.0], "hi": [3.0]},
            "mode": "onb",
            "quad": {"scheme": "tensor-gauss", "order": 48},
            "tol": 1e-10,
            "seed": 1,
        },
    },
    "poly2d": {
        "command": "repdisc",
        "description": (
            "Polynomial phase (1, -t1, -t2 + t1^2/2) from the 5-d nilpotent "
            "group; windowed atoms form an orthonormal block system."
        ),
        "config": {
            "group": "poly2d",
            "omega": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]},
            "gamma": [
                [float(a), float(b)] for a in range(-2, 3) for b in range(-2, 3)
            ],
            "spectrum": {
                "kind": "explicit",
                "points": [
                    [0.0, float(k1), float(k2)]
                    for k1 in range(-4, 5)
                    for k2 in range(-4, 5)
                ],
            },
            "window": {"lo": [-2.0, -2.0], "hi": [3.0, 3.0]},
            "mode": "onb",
            "quad": {"scheme": "tensor-gauss", "order": 48},
            "tol": 1e-10,
            "seed": 1,
        },
    },
    "axb": {
        "command": "repdisc",
        "description": (
            "Affine (ax+b) phase e^{-s} on the window [-1/2, 1/2); the "
            "pushforward is the dx/x law and the scaled integer spectrum "
            "gives a frame (spectrum choice recorded in the report)."
        ),
        "config": {
            "group": "axb",
            "omega": {"lo": [-0.5], "hi": [0.5]},
            "gamma": [[-1.0], [0.0], [1.0]],
            "spectrum": {
                "kind": "explicit",
                # lattice step 1/(e^{1/2} - e^{-1/2}) matched to the image interval
                "points": [[k / (math.exp(0.5) - math.exp(-0.5))] for k in range(-24, 25)],
            },
            "window": {"lo": [-1.5], "hi": [1.5]},
            "mode": "frame",
            "quad": {"scheme": "tensor-gauss", "order": 48},
            "basis_size": 32,
            "seed": 1,
        },
    },
    "shearlet": {
        "command": "repdisc",
        "description": (
            "Anisotropic dilation-shear phase (e^{-t1}, -t2 e^{-t1}); "
            "exploratory frame run with a rectangular spectrum scaled to the "
            "image box (no canonical spectrum is shipped)."
        ),
        "config": {
            "group": "shearlet",
            "omega": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]},
            "gamma": [[0.0, 0.0]],
            "spectrum": {
                "kind": "lattice",
                "A": [[1.0 / (1.0 - math.exp(-1.0)), 0.0], [0.0, 1.0]],
                "radius": 6.0,
            },
            "window": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]},
            "mode": "frame",
            "quad": {"scheme": "tensor-gauss", "order": 48},
            "basis_size": 16,
            "exploratory": True,
            "seed": 1,
        },
    },
    "probe-x2": {
        "command": "probe-injectivity",
        "description": (
            "x -> x^2 on Lebesgue[-1,1]: mirror pairs collide; the probe "
            "refutes essential injectivity (exit 1)."
        ),
        "config": {
            "measure": {"kind": "lebesgue_box", "lo": [-1.0], "hi": [1.0]},
            "phase": {"kind": "custom", "expr": ["x1^2"], "in_dim": 1},
            "n": 10000,
            "delta_x": 0.1,
            "delta_y": 0.01,
            "seed": 1,
        },
    },
    "probe-digitmap": {
        "command": "probe-injectivity",
        "description": (
            "Binary-to-quaternary digit phase on Lebesgue[0,1]: strictly "
            "increasing off the dyadic rationals, no collisions at the "
            "default probe scales (the image is Hoelder-compressed, so "
            "delta_y must stay well below delta_x)."
        ),
        "config": {
            "measure": {"kind": "lebesgue_box", "lo": [0.0], "hi": [1.0]},
            "phase": {
                "kind": "digit_map",
                "in_base": 2,
                "in_digits": [0, 1],
                "out_base": 4,
                "digit_map": {"0": 0.0, "1": 2.0},
                "depth": 30,
            },
            "n": 10000,
            "seed": 1,
        },
    },
    "reconstruct-sawtooth": {
        "command": "reconstruct",
        "description": (
            "Expand f(x) = x over the classical basis on [0,1], resynthesize, "
            "and report the truncation-tail L2 error."
        ),
        "config": {
            "measure": {"kind": "lebesgue_box", "lo": [0.0], "hi": [1.0]},
            "phase": {"kind": "identity", "dim": 1},
            "spectrum": {"kind": "lattice", "A": [[1.0]], "radius": 16},
            "quad": {"scheme": "tensor-gauss", "order": 64},
            "f": "x1",
            "seed": 1,
        },
    },
}
