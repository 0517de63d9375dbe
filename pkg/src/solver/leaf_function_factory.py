import logging
import math
import re
from pathlib import Path

import numpy as np

from core.exceptions import ConfigurationError
from core.spec_grammar import reject_unknown, split_spec, to_float, to_int
from solver.leaf_function import (
    BaseLeafFunction,
    ConstantFunction,
    PolynomialFunction,
    SampledFunction,
    TrigonometricFunction,
)

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

_MODE_KEY = re.compile(r"^([ab])(\d+)$")
_POLY_KEY = re.compile(r"^c(\d+)$")


class LeafFunctionFactory:
    """Factory for building catalog leaf functions from ``kind:params`` specs."""

    @staticmethod
    def create_leaf_function(spec: str) -> BaseLeafFunction:
        """
        Create a leaf function from its spec.

        Args:
            spec: One of ``const:c``, ``sin[:k=,amp=,P=]``, ``cos[:k=,amp=,P=]``,
                ``fourier:P=,a0=,a1=,b1=,...``, ``poly:c0=,c1=,...,lo=,hi=`` or
                ``samples:file=,order=,periodic=``.

        Returns:
            The catalog function.
        """
        kind, params = split_spec(spec)

        if kind == "const":
            key = "value" if "value" in params else "c"
            reject_unknown(params, [key], kind)
            return ConstantFunction(to_float(params, key, 0.0))

        elif kind in ("sin", "cos"):
            return LeafFunctionFactory._harmonic(kind, params)

        elif kind == "fourier":
            return LeafFunctionFactory._fourier(params)

        elif kind == "poly":
            return LeafFunctionFactory._polynomial(params)

        elif kind == "samples":
            return LeafFunctionFactory._samples(params)

        raise ConfigurationError(f"Unknown function kind '{kind}' in '{spec}'")

    @staticmethod
    def _harmonic(kind: str, params: dict) -> TrigonometricFunction:
        reject_unknown(params, ["k", "amp", "P"], kind)
        k = to_int(params, "k", 1)
        if k < 1:
            raise ConfigurationError(f"Harmonic index k must be >= 1, got {k}")
        amplitude = to_float(params, "amp", 1.0)
        period = to_float(params, "P", 2.0 * math.pi)
        coefficients = [0.0] * k
        coefficients[-1] = amplitude
        if kind == "sin":
            return TrigonometricFunction(period, sines=coefficients)
        return TrigonometricFunction(period, cosines=coefficients)

    @staticmethod
    def _fourier(params: dict) -> TrigonometricFunction:
        period = to_float(params, "P", 2.0 * math.pi)
        constant = to_float(params, "a0", 0.0)
        cosines: dict[int, float] = {}
        sines: dict[int, float] = {}
        for key in params:
            if key in ("P", "a0"):
                continue
            match = _MODE_KEY.match(key)
            if not match or int(match.group(2)) < 1:
                raise ConfigurationError(f"Unknown parameter '{key}' for kind 'fourier'")
            target = cosines if match.group(1) == "a" else sines
            target[int(match.group(2))] = to_float(params, key)

        size = max([0, *cosines, *sines])
        return TrigonometricFunction(
            period,
            constant=constant,
            cosines=[cosines.get(k, 0.0) for k in range(1, size + 1)],
            sines=[sines.get(k, 0.0) for k in range(1, size + 1)],
        )

    @staticmethod
    def _polynomial(params: dict) -> PolynomialFunction:
        lo = to_float(params, "lo", -50.0)
        hi = to_float(params, "hi", 50.0)
        coefficients: dict[int, float] = {}
        for key in params:
            if key in ("lo", "hi"):
                continue
            match = _POLY_KEY.match(key)
            if not match:
                raise ConfigurationError(f"Unknown parameter '{key}' for kind 'poly'")
            coefficients[int(match.group(1))] = to_float(params, key)
        if not coefficients:
            raise ConfigurationError("poly needs at least one coefficient c0, c1, ...")
        degree = max(coefficients)
        return PolynomialFunction(
            [coefficients.get(k, 0.0) for k in range(degree + 1)], (lo, hi)
        )

    @staticmethod
    def _samples(params: dict) -> SampledFunction:
        reject_unknown(params, ["file", "order", "periodic"], "samples")
        if "file" not in params:
            raise ConfigurationError("samples needs file=<path to t,v CSV>")
        path = Path(params["file"])
        try:
            data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        except OSError as e:
            raise ConfigurationError(f"Cannot read samples from {path}: {e}") from e
        if data.shape[1] < 2:
            raise ConfigurationError(f"{path} needs two columns t,v")
        logger.info(f"Loaded {data.shape[0]} samples from {path}")
        return SampledFunction(
            data[:, 0],
            data[:, 1],
            order=to_int(params, "order", 1),
            periodic=bool(to_int(params, "periodic", 0)),
            source=str(path),
        )
