"""Templated natural-language system descriptions.

Rendering is deterministic: the same (params, flags) pair always produces the
same bytes, and embedding stores key on those exact bytes, so the template
strings below must never drift (three of them intentionally carry spelling
quirks: "looke", "sytem", "evolvution"). Sentences join with single spaces,
in the fixed order basic / boundary / coefficient / qualitative.
"""

import math
from dataclasses import dataclass

from .pde.params import BCType, Equation, SystemParams

HEAT_STRONG_DIFFUSION = 0.005
BURGERS_ADVECTION_RATIO = 200.0
NS_HIGH_VISCOSITY = 1e-6
NS_MODERATE_VISCOSITY = 1e-8
NS_STRONG_FORCING = 7e-4
NS_MODERATE_FORCING = 3e-4


@dataclass(frozen=True)
class DescriptionFlags:
    """Which optional sections to render: Boundary, Coefficient, Qualitative."""

    boundary: bool = False
    coefficients: bool = False
    qualitative: bool = False

    @classmethod
    def parse(cls, text):
        """'none' or any subset of the letters b, c, q (e.g. 'bcq', 'bq')."""
        text = text.strip().lower()
        if text in ("", "none"):
            return cls()
        letters = set(text)
        if not letters <= {"b", "c", "q"}:
            raise ValueError(f"flags must be drawn from 'bcq', got {text!r}")
        return cls("b" in letters, "c" in letters, "q" in letters)

    def __str__(self):
        s = ("b" if self.boundary else "") + ("c" if self.coefficients else "") + (
            "q" if self.qualitative else ""
        )
        return s or "none"

    def issubset(self, other):
        return (
            (not self.boundary or other.boundary)
            and (not self.coefficients or other.coefficients)
            and (not self.qualitative or other.qualitative)
        )


ALL_FLAG_SETS = tuple(
    DescriptionFlags(b, c, q) for b in (False, True) for c in (False, True) for q in (False, True)
)


@dataclass(frozen=True)
class SystemDescription:
    text: str
    flags: DescriptionFlags
    params_digest: bytes


BASIC = {
    Equation.HEAT: [
        "The Heat equation models how a quantity such as heat diffuses through a given region.",
        "The Heat equation is a linear parabolic partial differential equation.",
    ],
    Equation.BURGERS: [
        "Burgers equation models a conservative system that can develop shock wave discontinuities.",
        "Burgers equation is a second order partial differential equation.",
    ],
    Equation.NAVIER_STOKES: [
        "The incompressible Navier Stokes equations describe the motion of a viscous fluid with constant density.",
        "We are predicting the vorticity field, which describes the local spinning motion of the fluid.",
    ],
    Equation.SHALLOW_WATER: [
        "The Shallow-Water equations are a set of hyperbolic partial differential equations that describe the flow below a pressure surface in a fluid.",
    ],
}

PERIODIC_SPACE = [
    "This system has periodic boundary conditions.",
    "The simulation space is a torus.",
]
PERIODIC_CELL = [
    "This system has periodic boundary conditions.",
    "The simulation cell is a torus.",
]
SHALLOW_WATER_BOUNDARY = [
    "This system has homogeneous Neumann boundary conditions with a derivative of 0 at the boundary.",
]
SHALLOW_WATER_QUALITATIVE = [
    "This system simulates a radial dam break.",
    "Waves propagate outward in a circular pattern.",
]


def format_value(x):
    """Shortest decimal that round-trips the 64-bit value; exponent without
    padding zeros (5e-8, not 5e-08)."""
    s = repr(float(x))
    if "e" in s:
        mantissa, exp = s.split("e")
        s = f"{mantissa}e{int(exp)}"
    return s


def _boundary_sentences(params):
    eq = params.equation
    if eq is Equation.SHALLOW_WATER:
        return list(SHALLOW_WATER_BOUNDARY)
    if params.bc_type is BCType.PERIODIC:
        return list(PERIODIC_CELL if eq is Equation.NAVIER_STOKES else PERIODIC_SPACE)
    v = format_value(params.bc_value)
    if params.bc_type is BCType.NEUMANN:
        return [
            "This system has Neumann boundary conditions.",
            "Neumann boundary conditions have a constant gradient.",
            f"In this case we have a gradient of {v} on the boundary.",
        ]
    return [
        "This system has Dirichlet boundary conditions.",
        "Dirichlet boundary conditions have a constant value.",
        f"In this case we have a value of {v} on the boundary.",
    ]


def _coefficient_sentences(params):
    eq = params.equation
    if eq is Equation.HEAT:
        return [f"In this case, the diffusion term has a coefficient of {format_value(params.beta)}."]
    if eq is Equation.BURGERS:
        return [
            f"In this case, the advection term has a coefficient of {format_value(params.alpha_x)} "
            f"in the x direction, {format_value(params.alpha_y)} in the y direction, and the "
            f"diffusion term has a coefficient of {format_value(params.beta)}."
        ]
    if eq is Equation.NAVIER_STOKES:
        return [
            f"In this case, the viscosity is {format_value(params.nu)}.",
            "This system is driven by a forcing term of the form "
            "f(x,y) = A*(sin(2*pi*(x+y)) + cos(2*pi*(x+y))) with amplitude "
            f"A={format_value(params.amplitude)}.",
        ]
    return []  # the dam-break set has no coefficient sentence


def classify_qualitative(params):
    """Qualitative sentences from the fixed thresholds (boundaries inclusive
    on the upper tier: nu >= 1e-8 is moderate, A >= 3e-4 is moderate)."""
    eq = params.equation
    if eq is Equation.HEAT:
        if params.beta > HEAT_STRONG_DIFFUSION:
            return [
                "This system is strongly diffusive.",
                "The predicted state should look smoother than the inputs.",
            ]
        return [
            "This system is weakly diffusive.",
            "The predicted state should looke smoother than the inputs.",
        ]
    if eq is Equation.BURGERS:
        ratio = math.hypot(params.alpha_x, params.alpha_y) / params.beta
        if ratio > BURGERS_ADVECTION_RATIO:
            return [
                "This system is advection dominated and does not behave similarly to heat equation.",
                "The predicted state should develop shocks.",
            ]
        return [
            "This system is diffusion dominated and does behave similarly to heat equation.",
            "The predicted state should look smoother than the inputs.",
        ]
    if eq is Equation.NAVIER_STOKES:
        out = []
        if params.nu >= NS_HIGH_VISCOSITY:
            out.append("This system has high viscosity and will not develop small scale structure.")
        elif params.nu >= NS_MODERATE_VISCOSITY:
            out.append("This sytem has moderate viscosity and will have some small scale structure.")
        else:
            out.append(
                "This system has low viscosity and will have chaotic evolution with small scale structure."
            )
        if params.amplitude >= NS_STRONG_FORCING:
            out.append(
                "This system has a strong forcing term and evolution will be heavily influenced by it."
            )
        elif params.amplitude >= NS_MODERATE_FORCING:
            out.append(
                "This system has a moderate forcing term and evolution will be moderately influenced by it."
            )
        else:
            out.append(
                "This system has a weak forcing term and evolvution will be weakly influenced by it."
            )
        return out
    return list(SHALLOW_WATER_QUALITATIVE)


def render_description(params: SystemParams, flags: DescriptionFlags) -> SystemDescription:
    sentences = list(BASIC[params.equation])
    if flags.boundary:
        sentences += _boundary_sentences(params)
    if flags.coefficients:
        sentences += _coefficient_sentences(params)
    if flags.qualitative:
        sentences += classify_qualitative(params)
    return SystemDescription(
        text=" ".join(sentences), flags=flags, params_digest=params.digest()
    )
