"""First-order jets of array-valued fields.

A :class:`Jet` holds the value of a field at one point together with its
partial derivatives in the point's coordinates.  The gradient carries one
trailing axis more than the value.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

__all__ = ["Jet", "jet_einsum", "stack"]


@dataclass(frozen=True, eq=False)
class Jet:
    value: np.ndarray
    grad: np.ndarray

    def __post_init__(self) -> None:
        if self.grad.shape[:-1] != self.value.shape:
            raise ValueError(
                f"gradient shape {self.grad.shape} does not extend value shape "
                f"{self.value.shape}"
            )

    @classmethod
    def constant(cls, value: np.ndarray | float, order: int) -> Jet:
        value = np.asarray(value, dtype=float)
        return cls(value, np.zeros(value.shape + (order,)))

    @property
    def order(self) -> int:
        """Number of coordinates the gradient is taken over."""
        return self.grad.shape[-1]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def __getitem__(self, index: object) -> Jet:
        return Jet(self.value[index], self.grad[index])

    def __add__(self, other: Jet) -> Jet:
        return Jet(self.value + other.value, self.grad + other.grad)

    def __sub__(self, other: Jet) -> Jet:
        return Jet(self.value - other.value, self.grad - other.grad)

    def __neg__(self) -> Jet:
        return Jet(-self.value, -self.grad)

    def scale(self, factor: float) -> Jet:
        return Jet(self.value * factor, self.grad * factor)

    def pullback(self, jacobian: np.ndarray) -> Jet:
        """Chain the gradient through ``x(u)`` with ``jacobian[i, a] = dx_i/du_a``."""
        return Jet(self.value, self.grad @ jacobian)

    def derivative(self, direction: np.ndarray) -> np.ndarray:
        """Directional derivatives; *direction* is ``(order,)`` or ``(order, F)``."""
        return self.grad @ direction

    def transpose(self, *axes: int) -> Jet:
        return Jet(self.value.transpose(axes), self.grad.transpose(axes + (len(axes),)))


def _split(subscripts: str) -> tuple[list[str], str]:
    compact = subscripts.replace(" ", "")
    if "->" not in compact:
        raise ValueError("jet_einsum needs an explicit output ('->')")
    if "z" in compact or "." in compact:
        raise ValueError("jet_einsum reserves 'z' and does not support ellipsis")
    inputs, output = compact.split("->")
    return inputs.split(","), output


def jet_einsum(subscripts: str, *operands: Jet | np.ndarray) -> Jet:
    """``np.einsum`` over jets, differentiated with the product rule.

    Plain arrays are treated as constants.  At least one operand must be a
    :class:`Jet`; all jets must share the same order.
    """
    terms, output = _split(subscripts)
    if len(terms) != len(operands):
        raise ValueError(f"{len(terms)} subscripts for {len(operands)} operands")
    values = [op.value if isinstance(op, Jet) else np.asarray(op) for op in operands]
    orders = {op.order for op in operands if isinstance(op, Jet)}
    if len(orders) != 1:
        raise ValueError("jet_einsum needs jets of a single order")
    (order,) = orders
    value = np.einsum(subscripts, *values)
    grad = np.zeros(np.shape(value) + (order,))
    for i, op in enumerate(operands):
        if not isinstance(op, Jet):
            continue
        spec = ",".join(t + "z" if j == i else t for j, t in enumerate(terms))
        args = [op.grad if j == i else values[j] for j in range(len(operands))]
        grad = grad + np.einsum(f"{spec}->{output}z", *args)
    return Jet(np.asarray(value), grad)


def stack(jets: Sequence[Jet]) -> Jet:
    """Stack jets along a new last value axis (a field family)."""
    if not jets:
        raise ValueError("cannot stack an empty family")
    value = np.stack([j.value for j in jets], axis=-1)
    grad = np.stack([j.grad for j in jets], axis=-2)
    return Jet(value, grad)
