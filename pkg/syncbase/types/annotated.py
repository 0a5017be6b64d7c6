"""Annotated types for Pydantic models."""

from typing import Annotated, Literal, TypeAlias

import numpy as np
import numpy.typing as npt
from annotated_types import Ge, Gt, Le, Lt
from pydantic import AfterValidator

from syncbase.utils.validate import (
    validate_channel_name,
    validate_finite,
    validate_is_power_of_2,
    validate_snr_db,
)

# Generic types
Uint32 = Annotated[int, Ge(0), Lt(2**32)]
Uint64 = Annotated[int, Ge(0), Lt(2**64)]
Count = Annotated[int, Ge(1)]
PowerOfTwo = Annotated[int, Gt(0), AfterValidator(validate_is_power_of_2)]

# Array aliases used on hot paths (not validated by pydantic)
ComplexArray: TypeAlias = npt.NDArray[np.complexfloating]
RealArray: TypeAlias = npt.NDArray[np.floating]
Tensor: TypeAlias = npt.NDArray[np.floating]

# Signal types
SampleRate = Annotated[float, Gt(0), AfterValidator(validate_finite)]
RollOff = Annotated[float, Ge(0), Le(1)]
PskOrder = Literal[2, 4, 8]
SymbolIndex = Annotated[int, Ge(0), Lt(8)]

# Channel types
SnrDb = Annotated[float, AfterValidator(validate_snr_db)]
DelaySpread = Annotated[float, Gt(0), AfterValidator(validate_finite)]
ChannelName = Annotated[str, AfterValidator(validate_channel_name)]

# Training types
LearningRate = Annotated[float, Gt(0), AfterValidator(validate_finite)]
DecayFactor = Annotated[float, Gt(0), Lt(1)]
