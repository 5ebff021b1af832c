"""Algebra morphisms between free Grassmann algebras, given by generator images.

A morphism sends each even generator to an even element and each odd
generator to an odd element of the target.  It extends to the whole source by

    f(x) t^{i1}...t^{ik}  |->  Phi_f(images of x) * image(t^{i1}) ... image(t^{ik})

using the smooth operation Phi_f on the even images.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .coeff import Polynomial
from .errors import ArgumentError, ParityError, PreconditionError
from .grassmann import (
    AlgebraSignature,
    GrassmannElement,
    apply_smooth,
    gmul,
    mask_indices,
    weight_component,
)
from .linalg import invert_matrix


class Morphism:
    __slots__ = ("source", "target", "images")

    def __init__(self, source: AlgebraSignature, target: AlgebraSignature,
                 images: Sequence[GrassmannElement]):
        images = tuple(images)
        if len(images) != source.p + source.q:
            raise ArgumentError(
                f"need {source.p + source.q} generator images, got {len(images)}")
        names = source.generator_names
        for k, img in enumerate(images):
            if img.signature != target:
                raise ArgumentError(f"image of {names[k]} is not in the target algebra")
            if k < source.p and not img.is_even():
                raise ParityError(f"image of even generator {names[k]} must be even")
            if k >= source.p and not img.is_odd():
                raise ParityError(f"image of odd generator {names[k]} must be odd")
        self.source = source
        self.target = target
        self.images = images

    @classmethod
    def identity(cls, sig: AlgebraSignature) -> "Morphism":
        return cls(sig, sig, GrassmannElement.generators(sig))

    @classmethod
    def from_mapping(cls, source: AlgebraSignature, target: AlgebraSignature,
                     mapping: Mapping[str, GrassmannElement]) -> "Morphism":
        """Images by generator name; omitted generators go to the same-named target generator."""
        unknown = set(mapping) - set(source.generator_names)
        if unknown:
            raise ArgumentError(f"unknown source generators: {sorted(unknown)}")
        target_gens = dict(zip(target.generator_names, GrassmannElement.generators(target)))
        images = []
        for name in source.generator_names:
            if name in mapping:
                images.append(mapping[name])
            elif name in target_gens:
                images.append(target_gens[name])
            else:
                raise ArgumentError(f"no image for {name} and no same-named target generator")
        return cls(source, target, images)

    @property
    def even_images(self) -> tuple[GrassmannElement, ...]:
        return self.images[: self.source.p]

    @property
    def odd_images(self) -> tuple[GrassmannElement, ...]:
        return self.images[self.source.p:]

    def apply(self, a: GrassmannElement) -> GrassmannElement:
        if a.signature != self.source:
            raise ArgumentError("element is not in the source algebra")
        result = GrassmannElement.zero(self.target)
        even = list(self.even_images)
        odd = self.odd_images
        for mask, poly in a.items():
            if even:
                coeff = apply_smooth(poly, even)
            else:
                coeff = GrassmannElement.scalar(self.target, poly.constant_term())
            for j in mask_indices(mask):
                coeff = gmul(coeff, odd[j - 1])
                if not coeff:
                    break
            result = result + coeff
        return result

    __call__ = apply

    def then(self, other: "Morphism") -> "Morphism":
        """The composite 'first self, then other'."""
        if other.source != self.target:
            raise ArgumentError("morphisms are not composable")
        return Morphism(self.source, other.target, [other.apply(img) for img in self.images])

    def graded(self) -> "Morphism":
        """The induced map on associated graded algebras.

        Even generators keep the body of their image, odd generators the
        weight-1 part.
        """
        images = [GrassmannElement.from_polynomial(self.target, img.body()) for img in self.even_images]
        images += [weight_component(img, 1) for img in self.odd_images]
        return Morphism(self.source, self.target, images)

    def inverse(self) -> "Morphism":
        """Exact two-sided inverse.

        Requires an affine body with invertible constant linear part and an
        odd weight-1 part with constant invertible matrix.  The inverse is
        lambda^{-1} followed by a Neumann series for the unipotent remainder,
        which terminates because the remainder raises weight.
        """
        src, tgt = self.source, self.target
        if (src.p, src.q) != (tgt.p, tgt.q):
            raise PreconditionError("only morphisms between equal dimensions can be inverted")
        lin = self._linear_part()
        lin_inv = lin._affine_inverse()
        unipotent = self.then(lin_inv)  # source -> source
        gens = GrassmannElement.generators(src)
        inv_images = []
        for g in gens:
            term = g
            total = g
            for _ in range(src.q + 1):
                term = -(unipotent.apply(term) - term)
                if not term:
                    break
                total = total + term
            inv_images.append(total)
        u_inv = Morphism(src, src, inv_images)
        result = lin_inv.then(u_inv)
        if self.then(result) != Morphism.identity(src) or result.then(self) != Morphism.identity(tgt):
            raise PreconditionError("inverse verification failed; the morphism may not be invertible")
        return result

    def _linear_part(self) -> "Morphism":
        tgt = self.target
        images = []
        for k, img in enumerate(self.even_images):
            body = img.body()
            if body.degree() > 1:
                raise PreconditionError(
                    f"inverse needs an affine body; image of {self.source.even_names[k]} has degree {body.degree()}")
            images.append(GrassmannElement.from_polynomial(tgt, body))
        for k, img in enumerate(self.odd_images):
            lin = weight_component(img, 1)
            if any(not p.is_constant() for _, p in lin.items()):
                raise PreconditionError(
                    f"inverse needs constant odd coefficients; image of {self.source.odd_names[k]} is {lin}")
            images.append(lin)
        return Morphism(self.source, tgt, images)

    def _affine_inverse(self) -> "Morphism":
        src, tgt = self.source, self.target
        p, q = src.p, src.q
        A = [[img.body().coefficient(_unit(p, j)) for j in range(p)] for img in self.even_images]
        shift = [img.body().constant_term() for img in self.even_images]
        L = [[img.coefficient(1 << j).constant_term() for j in range(q)] for img in self.odd_images]
        A_inv = invert_matrix(A)
        L_inv = invert_matrix(L)
        if A_inv is None or L_inv is None:
            raise PreconditionError("linear part of the morphism is singular")
        # y = A x + c  =>  x = A^{-1} (y - c);  eta = L theta  =>  theta = L^{-1} eta
        images = []
        for i in range(p):
            poly = Polynomial.constant(p, -sum(A_inv[i][j] * shift[j] for j in range(p)))
            for j in range(p):
                poly = poly + Polynomial.variable(p, j + 1).scale(A_inv[i][j])
            images.append(GrassmannElement.from_polynomial(src, poly))
        for i in range(q):
            elem = GrassmannElement.zero(src)
            for j in range(q):
                if L_inv[i][j]:
                    elem = elem + GrassmannElement.theta(src, j + 1).scale(L_inv[i][j])
            images.append(elem)
        return Morphism(tgt, src, images)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Morphism):
            return NotImplemented
        return (self.source, self.target, self.images) == (other.source, other.target, other.images)

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.images))

    def __repr__(self) -> str:
        pairs = ", ".join(f"{n} -> {img}" for n, img in zip(self.source.generator_names, self.images))
        return f"Morphism({pairs})"


def _unit(p: int, j: int) -> tuple[int, ...]:
    return tuple(int(i == j) for i in range(p))


def truncate_images(m: Morphism, max_weight: int) -> Morphism:
    return Morphism(m.source, m.target, [img.truncate_weight(max_weight) for img in m.images])
