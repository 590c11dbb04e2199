"""Built-in parameter sets S1-S4 and the initial conditions used with them."""

from .model import ModelParams, PopulationState

PRESET_PARAMS = {
    "S1": ModelParams(a1=4.5, a2=3.8, a3=0.005, b1=0.075, k1=100, k2=160,
                      c1=2.8, c2=1.97, c3=1.95, theta=0.0937, p=0.047),
    "S2": ModelParams(a1=4.5, a2=3.8, a3=0.005, b1=0.075, k1=100, k2=20,
                      c1=2.8, c2=1.97, c3=0.005, theta=0.0937, p=0.047),
    "S3": ModelParams(a1=5.0, a2=7.8, a3=1.5, b1=0.0005, k1=50, k2=55,
                      c1=1.7, c2=1.05, c3=1.0, theta=0.0217, p=0.73),
    "S4": ModelParams(a1=4.0, a2=6.0, a3=0.05, b1=0.005, k1=100, k2=200,
                      c1=0.08, c2=0.7, c3=0.50, theta=0.002537, p=0.93),
}

# reference initial conditions, grouped by parameter set
PRESET_INITIAL_CONDITIONS = {name: [PopulationState(*map(float, ic)) for ic in ics] for name, ics in {
    "S1": [(50, 40, 80)],
    "S2": [(50, 10, 80), (100, 200, 0)],
    "S3": [(20, 90, 80), (40, 40, 0), (100, 20, 300)],
    "S4": [(7, 150, 80), (50, 1450, 80)],
}.items()}
