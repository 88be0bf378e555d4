from typing import Protocol

import numpy as np
from numpy.typing import NDArray


class CriticSolver(Protocol):
    """Minimizes the separable weighted cross-entropy loss over logits.

    The loss of one entry is -A log σ(ℓ) - B log(1 - σ(ℓ)) with A, B >= 0, so
    its minimizer satisfies σ(ℓ) = A / (A + B), i.e. exp(ℓ) = A / B.
    """

    def fit(
        self,
        logits: NDArray[np.float64],
        pos_weight: NDArray[np.float64],
        neg_weight: NDArray[np.float64],
    ) -> NDArray[np.float64]: ...
