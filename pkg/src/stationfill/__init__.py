"""stationfill: QC and gap imputation for small hourly weather-station networks.

A network is one target station plus six neighbor input stations measuring
the same parameter (air temperature or relative humidity) on an hourly grid,
with missing readings carried in-band as the sentinel value -999.0. The
package quality-controls the raw series (range, spike, flatline checks),
assembles a 39-feature design matrix (three hourly lags per station, date
fields, and per-lag availability bits), trains six regressor families on it
(linear, regression tree, tree ensemble, Levenberg-Marquardt neural net,
Gaussian process, support vector regression), benchmarks them over all 64
input-station availability states, and fills target gaps causally.

Numeric hot spots (tree split search, SVR coordinate passes) run on a
compiled extension when it is available and fall back to pure NumPy
otherwise; set ``STATIONFILL_PURE=1`` to force the fallback. See
``stationfill.kernels.backend()``.
"""

from .errors import StationFillError
from .features import Dataset, MaskPolicy, Scaler, SplitSpec, build_dataset
from .kernels import backend
from .models import RegressorKind, TrainConfig, TrainedModel, load_model, save_model, train
from .qc import QcReport, QcRuleSet, apply_qc, apply_qc_network, missing_probabilities
from .timeseries import (
    SENTINEL,
    HourStamp,
    Parameter,
    StationNetwork,
    StationSeries,
    align_network,
    build_series,
    is_sentinel,
    load_station_csvs,
    write_station_csv,
)

__version__ = "0.1.0"

__all__ = [
    "SENTINEL",
    "Dataset",
    "HourStamp",
    "MaskPolicy",
    "Parameter",
    "QcReport",
    "QcRuleSet",
    "RegressorKind",
    "Scaler",
    "SplitSpec",
    "StationFillError",
    "StationNetwork",
    "StationSeries",
    "TrainConfig",
    "TrainedModel",
    "__version__",
    "align_network",
    "apply_qc",
    "apply_qc_network",
    "backend",
    "build_dataset",
    "build_series",
    "is_sentinel",
    "load_model",
    "load_station_csvs",
    "missing_probabilities",
    "save_model",
    "train",
    "write_station_csv",
]
