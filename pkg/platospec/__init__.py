from platospec.graph import MetricGraph
from platospec.platonic import Solid, build_platonic
from platospec.coupling import CouplingAssignment, CouplingSpec
from platospec.secular import SecularSystem
from platospec.rootfind import RootFindOpts, Spectrum, scan_spectrum
from platospec.executor import SweepExecutor
from platospec.oracles import oracle_union_spectrum
from platospec.asymptotics import check_theorem, kirchhoff_drift
from platospec.version import __version__

__all__ = [
    'MetricGraph',
    'Solid',
    'build_platonic',
    'CouplingAssignment',
    'CouplingSpec',
    'SecularSystem',
    'RootFindOpts',
    'Spectrum',
    'scan_spectrum',
    'SweepExecutor',
    'oracle_union_spectrum',
    'check_theorem',
    'kirchhoff_drift',
    '__version__',
]
