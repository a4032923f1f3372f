"""The identified observer model: prediction, residuals, (de)serialization.

An observer model advances its state with the measured output,

    x(t+1) = f_o(x(t), y(t)),        yhat(t | t-1) = h_o(x(t)),

so the one-step prediction at time ``t`` depends only on the initial state
and outputs strictly before ``t``.  Both maps are monomial maps; ``f_o``
takes the stacked vector ``(x, y)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    DimensionMismatchError,
    DivergenceError,
    InvalidInputError,
    ParseError,
    ValidationError,
)
from .genred import MonomialMap, eval_monomial_map_many
from .monomials import PowerMatrix
from .series import TimeSeriesSet

#: Any state component beyond this magnitude aborts prediction.
STATE_OVERFLOW_GUARD = 1e12

DOCUMENT_FORMAT = "polysid-model"
DOCUMENT_VERSION = 1


@dataclass(frozen=True)
class OutputScaling:
    """Per-dimension affine output transform ``y_scaled = (y - mean) / std``."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=float)
        std = np.asarray(self.std, dtype=float)
        if mean.shape != std.shape or mean.ndim != 1:
            raise InvalidInputError("scaling mean and std must be equal-length vectors")
        if (std <= 0).any() or not np.isfinite(std).all() or not np.isfinite(mean).all():
            raise InvalidInputError("scaling std must be finite and positive")
        mean.setflags(write=False)
        std.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    def apply(self, y: np.ndarray) -> np.ndarray:
        """Raw outputs to scaled units; broadcasts over trailing axes."""
        extra = (None,) * (y.ndim - 1)
        return (y - self.mean[(slice(None),) + extra]) / self.std[(slice(None),) + extra]

    def invert(self, y_scaled: np.ndarray) -> np.ndarray:
        extra = (None,) * (y_scaled.ndim - 1)
        return y_scaled * self.std[(slice(None),) + extra] + self.mean[(slice(None),) + extra]


@dataclass(frozen=True)
class ObserverModel:
    """Discrete-time polynomial observer system.

    Attributes:
        n: State dimension.
        d_y: Output dimension.
        f_o: Dynamics map over ``n + d_y`` variables ``(x, y)`` with ``n`` outputs.
        h_o: Output map over ``n`` state variables with ``d_y`` outputs.
        X0: Per-series initial states from training, shape ``(n, s)``.
        scaling: Optional affine output transform applied during training;
            prediction consumes and reports raw units transparently.
        g_io: Optional past-window lifting ``x = g_io(y_minus)`` enabling
            initial-state computation from measured history.
        t_minus: Past-window length expected by ``g_io``.
        meta: Free-form provenance (config echo, horizons, anchor).
    """

    n: int
    d_y: int
    f_o: MonomialMap
    h_o: MonomialMap
    X0: np.ndarray
    scaling: OutputScaling | None = None
    g_io: MonomialMap | None = None
    t_minus: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1 or self.d_y < 1:
            raise InvalidInputError("state and output dimensions must be positive")
        if self.f_o.n_vars != self.n + self.d_y or self.f_o.m != self.n:
            raise DimensionMismatchError(
                f"f_o must map {self.n + self.d_y} -> {self.n} variables, "
                f"got {self.f_o.n_vars} -> {self.f_o.m}"
            )
        if self.h_o.n_vars != self.n or self.h_o.m != self.d_y:
            raise DimensionMismatchError(
                f"h_o must map {self.n} -> {self.d_y} variables, "
                f"got {self.h_o.n_vars} -> {self.h_o.m}"
            )
        X0 = np.asarray(self.X0, dtype=float)
        if X0.ndim != 2 or X0.shape[0] != self.n:
            raise DimensionMismatchError(
                f"X0 must have shape ({self.n}, s), got {X0.shape}"
            )
        if self.g_io is not None:
            if self.g_io.m != self.n:
                raise DimensionMismatchError("g_io output dimension must equal n")
            if self.t_minus is None or self.g_io.n_vars != self.t_minus * self.d_y:
                raise DimensionMismatchError(
                    "g_io input dimension must equal t_minus * d_y"
                )
        if self.scaling is not None and self.scaling.mean.size != self.d_y:
            raise DimensionMismatchError("scaling dimension must equal d_y")
        X0 = X0.copy()
        X0.setflags(write=False)
        object.__setattr__(self, "X0", X0)


@dataclass(frozen=True)
class PredictionReport:
    """One-step predictions, residuals and error summaries.

    Times are 1-based within the evaluated series; predictions cover
    ``t = t_start .. t_start + T' - 1``.  Residuals are exactly
    ``y(t) - yhat(t | t-1)``.  Relative RMSE divides by the per-dimension
    standard deviation of the measured outputs over the evaluated range.
    """

    t_start: int
    predictions: np.ndarray  # (T', d_y, s)
    residuals: np.ndarray    # (T', d_y, s)
    rmse: np.ndarray         # (d_y,)
    relative_rmse: np.ndarray  # (d_y,)
    per_series_rmse: np.ndarray  # (s,)

    @property
    def max_relative_rmse(self) -> float:
        return float(self.relative_rmse.max())


def _summarize(t_start: int, measured: np.ndarray, predicted: np.ndarray) -> PredictionReport:
    residuals = measured - predicted
    rmse = np.sqrt(np.mean(residuals**2, axis=(0, 2)))
    std = measured.std(axis=(0, 2))
    std = np.where(std > 0, std, 1.0)
    per_series = np.sqrt(np.mean(residuals**2, axis=(0, 1)))
    return PredictionReport(
        t_start=t_start,
        predictions=predicted,
        residuals=residuals,
        rmse=rmse,
        relative_rmse=rmse / std,
        per_series_rmse=per_series,
    )


def predict_one_step(
    model: ObserverModel,
    ts: TimeSeriesSet,
    x0: np.ndarray,
    t_start: int = 1,
) -> PredictionReport:
    """Run the observer over measured outputs, emitting one-step predictions.

    For each series, starting from state ``x0`` at time ``t_start``:
    ``yhat(t | t-1) = h_o(x(t))`` and ``x(t+1) = f_o(x(t), y(t))`` with the
    *measured* ``y(t)``, never the prediction.  Output scaling, when present,
    is applied and inverted internally so the report is in raw units.

    Args:
        model: The observer model.
        ts: Measured series; ``ts.d_y`` must equal ``model.d_y``.
        x0: Initial states, shape ``(n, s)`` (one column per series).
        t_start: 1-based time of the first prediction.

    Raises:
        DivergenceError: If any state component exceeds the overflow guard;
            the message names the series and time step.
    """
    if ts.d_y != model.d_y:
        raise DimensionMismatchError(
            f"model output dimension {model.d_y} does not match data dimension {ts.d_y}"
        )
    x = np.asarray(x0, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape != (model.n, ts.s):
        raise DimensionMismatchError(
            f"x0 must have shape ({model.n}, {ts.s}), got {x.shape}"
        )
    if not 1 <= t_start <= ts.t_1:
        raise InvalidInputError(f"t_start {t_start} outside 1..{ts.t_1}")

    Ys = model.scaling.apply(ts.Y.transpose(1, 0, 2)).transpose(1, 0, 2) if model.scaling else ts.Y
    steps = ts.t_1 - t_start + 1
    predicted_scaled = np.empty((steps, model.d_y, ts.s))
    x = x.copy()
    for i in range(steps):
        t = t_start + i
        predicted_scaled[i] = eval_monomial_map_many(model.h_o, x.T)
        xy = np.vstack([x, Ys[t - 1]])
        x = eval_monomial_map_many(model.f_o, xy.T)
        worst = np.abs(x).max(axis=0)
        if (worst > STATE_OVERFLOW_GUARD).any():
            k = int(worst.argmax())
            raise DivergenceError(
                f"state diverged in series {k + 1} after time {t} "
                f"(|x| > {STATE_OVERFLOW_GUARD:g})"
            )
    predicted = (
        model.scaling.invert(predicted_scaled.transpose(1, 0, 2)).transpose(1, 0, 2)
        if model.scaling
        else predicted_scaled
    )
    measured = ts.Y[t_start - 1 :]
    return _summarize(t_start, measured, predicted)


def initial_state_from_past(model: ObserverModel, y_past: np.ndarray) -> np.ndarray:
    """Compute the state after a measured history via the stored past lifting.

    Args:
        y_past: The ``t_minus`` most recent outputs, shape ``(t_minus, d_y)``
            in time order (oldest first); may also carry a trailing series
            axis ``(t_minus, d_y, s)``.

    Returns:
        State column(s) at the time immediately after the window.

    Raises:
        InvalidInputError: If the model carries no past lifting.
    """
    if model.g_io is None or model.t_minus is None:
        raise InvalidInputError("model does not store a past-output lifting")
    Y = np.asarray(y_past, dtype=float)
    squeeze = Y.ndim == 2
    if squeeze:
        Y = Y[:, :, None]
    if Y.shape[0] != model.t_minus or Y.shape[1] != model.d_y:
        raise DimensionMismatchError(
            f"past window must have shape ({model.t_minus}, {model.d_y}, s), got {Y.shape}"
        )
    if model.scaling is not None:
        Y = model.scaling.apply(Y.transpose(1, 0, 2)).transpose(1, 0, 2)
    # Stack most recent output first, matching the past-window convention.
    window = Y[::-1].reshape(model.t_minus * model.d_y, Y.shape[2])
    x = eval_monomial_map_many(model.g_io, window.T)
    return x[:, 0] if squeeze else x


def predict_with_burn_in(model: ObserverModel, ts: TimeSeriesSet) -> PredictionReport:
    """Predict a series set using its own first ``t_minus`` samples as history.

    The initial state at time ``t_minus + 1`` comes from the stored past
    lifting; predictions cover ``t = t_minus + 1 .. t_1``.
    """
    if ts.d_y != model.d_y:
        raise DimensionMismatchError(
            f"model output dimension {model.d_y} does not match data dimension {ts.d_y}"
        )
    if model.g_io is None or model.t_minus is None:
        raise InvalidInputError("model does not store a past-output lifting")
    if ts.t_1 < model.t_minus + 1:
        raise InvalidInputError(
            f"series of length {ts.t_1} too short for a past window of {model.t_minus}"
        )
    x0 = initial_state_from_past(model, ts.Y[: model.t_minus])
    return predict_one_step(model, ts, x0, t_start=model.t_minus + 1)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _encode_map(M: MonomialMap) -> dict:
    return {
        "n_vars": M.n_vars,
        "k_max": list(M.K.k_max),
        "K": M.K.K.tolist(),
        "L": M.L.tolist(),
    }


def _decode_map(obj: dict, where: str) -> MonomialMap:
    try:
        n_vars = int(obj["n_vars"])
        k_max = tuple(int(v) for v in obj["k_max"])
        K_rows = obj["K"]
        L_rows = obj["L"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: malformed monomial map: {exc}") from exc
    K = np.asarray(K_rows, dtype=np.int64).reshape(len(K_rows), n_vars)
    L = np.asarray(L_rows, dtype=float).reshape(len(L_rows), len(K_rows))
    try:
        return MonomialMap(L, PowerMatrix(K, k_max))
    except InvalidInputError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def serialize_model(model: ObserverModel) -> str:
    """Encode a model as a human-readable JSON document.

    Coefficients are written as decimal literals that round-trip to the exact
    binary value (Python's shortest-exact float encoding, at most 17
    significant digits); exponents are plain integers.
    """
    doc: dict[str, Any] = {
        "format": DOCUMENT_FORMAT,
        "version": DOCUMENT_VERSION,
        "n": model.n,
        "d_y": model.d_y,
        "f_o": _encode_map(model.f_o),
        "h_o": _encode_map(model.h_o),
        "X0": model.X0.tolist(),
        "g_io": None if model.g_io is None else _encode_map(model.g_io),
        "t_minus": model.t_minus,
        "scaling": None
        if model.scaling is None
        else {"mean": model.scaling.mean.tolist(), "std": model.scaling.std.tolist()},
        "meta": model.meta,
    }
    return json.dumps(doc, indent=2)


def deserialize_model(text: str) -> ObserverModel:
    """Decode a model document, validating every structural invariant.

    Raises:
        ParseError: On malformed JSON (message carries line/column).
        ValidationError: On schema or invariant violations, including
            all-zero coefficient columns (trivial generators).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"model document is not valid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict) or doc.get("format") != DOCUMENT_FORMAT:
        raise ValidationError("document is not a polysid model")
    try:
        n = int(doc["n"])
        d_y = int(doc["d_y"])
        X0 = np.asarray(doc["X0"], dtype=float).reshape(n, -1)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed model document: {exc}") from exc
    f_o = _decode_map(doc["f_o"], "f_o")
    h_o = _decode_map(doc["h_o"], "h_o")
    for name, M in (("f_o", f_o), ("h_o", h_o)):
        if not M.is_nontrivial():
            raise ValidationError(f"{name} has an all-zero coefficient column")
    g_io = None if doc.get("g_io") is None else _decode_map(doc["g_io"], "g_io")
    t_minus = doc.get("t_minus")
    scaling = None
    if doc.get("scaling") is not None:
        sc = doc["scaling"]
        scaling = OutputScaling(
            np.asarray(sc["mean"], dtype=float), np.asarray(sc["std"], dtype=float)
        )
    try:
        return ObserverModel(
            n=n,
            d_y=d_y,
            f_o=f_o,
            h_o=h_o,
            X0=X0,
            scaling=scaling,
            g_io=g_io,
            t_minus=None if t_minus is None else int(t_minus),
            meta=doc.get("meta", {}),
        )
    except InvalidInputError as exc:
        raise ValidationError(str(exc)) from exc
