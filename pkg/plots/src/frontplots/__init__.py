"""Figure rendering for solver CSV outputs: front scatters and profiles."""

__version__ = "0.1.0"

from .render import PLOT_KINDS, PlotSpec, plot_fronts, plot_profiles
from .schemas import SchemaError, read_front_csv, read_profiles_csv
