from .constellation import Constellation, MiEvaluation
from .fading import AsymptoticExpansion, FadingFamily, MixtureGamma
from .montecarlo import McEstimate, MonteCarloSimulator
from .secrecy import SecrecyAnalyzer, SecrecyScenario
from .sweep import SweepRunner, SweepSpec
