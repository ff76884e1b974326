from enum import Enum
from typing import Any, Callable, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator


class DomainKind(str, Enum):
    """Supported ways of describing a bounded domain."""
    BALL = "ball"
    ELLIPSE = "ellipse"
    RECTANGLE = "rectangle"
    CONVEX_POLYGON = "convex-polygon"
    SMOOTH_CURVE = "smooth-curve"
    REVOLUTION = "revolution-profile"
    IMPLICIT = "implicit"

    @property
    def is_convex(self) -> bool:
        return self in (DomainKind.BALL, DomainKind.ELLIPSE, DomainKind.RECTANGLE, DomainKind.CONVEX_POLYGON)

    @property
    def is_polygonal(self) -> bool:
        return self in (DomainKind.RECTANGLE, DomainKind.CONVEX_POLYGON)


class CurveSpec(BaseModel):
    """A closed planar curve given by a named parametrization."""
    model_config = ConfigDict(extra="ignore")

    name: Literal["kite", "circle", "superellipse"]
    params: Dict[str, float] = Field(default_factory=dict, description="Shape parameters of the named curve")


class ProfileSpec(BaseModel):
    """Meridian profile rho(z) of a domain of revolution about the z-axis."""
    model_config = ConfigDict(extra="ignore")

    name: Literal["sphere", "cylinder", "catenoid", "dumbbell"]
    params: Dict[str, float] = Field(default_factory=dict, description="Shape parameters of the named profile")


class ImplicitSpec(BaseModel):
    """A domain given by a level function, positive inside."""
    model_config = ConfigDict(extra="ignore")

    name: Literal["superellipse", "cassini", "callback"]
    params: Dict[str, float] = Field(default_factory=dict)
    bbox: List[List[float]] = Field(..., description="[[xmin, ymin], [xmax, ymax]] enclosing the domain")

    @model_validator(mode="after")
    def _check_bbox(self):
        if len(self.bbox) != 2 or any(len(c) != 2 for c in self.bbox):
            raise ValueError("bbox must be [[xmin, ymin], [xmax, ymax]]")
        if not (self.bbox[0][0] < self.bbox[1][0] and self.bbox[0][1] < self.bbox[1][1]):
            raise ValueError("bbox lower corner must lie below the upper corner")
        return self


class DomainSpec(BaseModel):
    """
    A bounded domain in R^N.

    Planar kinds live in R^2; revolution profiles describe a solid of
    revolution about the z-axis in R^3 and are stored through their
    meridian profile.
    """
    model_config = ConfigDict(extra="ignore", arbitrary_types_allowed=True)

    id: str = Field(default="domain", description="Identifier used in reports")
    kind: DomainKind
    dimension: int = Field(default=2, ge=2, le=3)
    center: List[float] = Field(default_factory=lambda: [0.0, 0.0])
    radius: Optional[float] = Field(default=None, gt=0)
    semi_axes: Optional[List[float]] = None
    lower: Optional[List[float]] = None
    upper: Optional[List[float]] = None
    vertices: Optional[List[List[float]]] = None
    curve: Optional[CurveSpec] = None
    profile: Optional[ProfileSpec] = None
    implicit: Optional[ImplicitSpec] = None
    sdf_callback: Optional[Callable[..., Any]] = Field(default=None, exclude=True,
                                                       description="Level function for implicit callback domains")

    _shape: Any = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_kind_params(self):
        kind = self.kind
        if kind == DomainKind.BALL and self.radius is None:
            raise ValueError("ball requires radius")
        if kind == DomainKind.ELLIPSE:
            if not self.semi_axes or len(self.semi_axes) != 2 or min(self.semi_axes) <= 0:
                raise ValueError("ellipse requires two positive semi_axes")
        if kind == DomainKind.RECTANGLE:
            if not self.lower or not self.upper or len(self.lower) != 2 or len(self.upper) != 2:
                raise ValueError("rectangle requires lower and upper corners")
            if not (self.lower[0] < self.upper[0] and self.lower[1] < self.upper[1]):
                raise ValueError("rectangle lower corner must lie below the upper corner")
        if kind == DomainKind.CONVEX_POLYGON and (not self.vertices or len(self.vertices) < 3):
            raise ValueError("convex-polygon requires at least three vertices")
        if kind == DomainKind.SMOOTH_CURVE and self.curve is None:
            raise ValueError("smooth-curve requires a curve")
        if kind == DomainKind.REVOLUTION:
            if self.profile is None:
                raise ValueError("revolution-profile requires a profile")
            self.dimension = 3
        if kind == DomainKind.IMPLICIT:
            if self.implicit is None:
                raise ValueError("implicit requires an implicit spec")
            if self.implicit.name == "callback" and self.sdf_callback is None:
                raise ValueError("implicit callback domains require sdf_callback")
        if kind != DomainKind.REVOLUTION and kind != DomainKind.BALL and self.dimension != 2:
            raise ValueError(f"{kind.value} domains are planar")
        if len(self.center) != self.dimension and kind == DomainKind.BALL:
            raise ValueError("ball center must match the dimension")
        return self

    @property
    def shape(self):
        """Geometric backend for this domain, built on first use."""
        if self._shape is None:
            from hotspot.services.shape_library import build_shape
            self._shape = build_shape(self)
        return self._shape


class GeomSummary(BaseModel):
    """Geometric quantities consumed by the bounds."""
    model_config = ConfigDict(extra="ignore")

    r_in: float = Field(..., gt=0, description="Inradius")
    incenters: List[List[float]] = Field(default_factory=list)
    diam: float = Field(..., gt=0)
    r_e: Optional[float] = Field(default=None, ge=0, description="Exterior sphere radius")
    r_e_unbounded: bool = False
    M0_minus: Optional[float] = Field(default=None, ge=0)
    min_mean_curvature: Optional[float] = None
    john_center: Optional[List[float]] = None
    john_axes: Optional[List[float]] = None
    volume: Optional[float] = Field(default=None, gt=0)

    @property
    def incenter(self) -> List[float]:
        """Lexicographically smallest incenter."""
        return min(self.incenters) if self.incenters else []

    @model_validator(mode="after")
    def _check_consistency(self):
        if self.r_in > self.diam / 2 * (1 + 1e-6):
            raise ValueError("inradius exceeds half the diameter")
        if self.john_axes is not None:
            if any(a <= 0 for a in self.john_axes):
                raise ValueError("John axes must be positive")
            if list(self.john_axes) != sorted(self.john_axes):
                raise ValueError("John axes must be sorted ascending")
        return self


class ExteriorRadius(BaseModel):
    """Uniform exterior sphere radius with how it was obtained."""
    model_config = ConfigDict(extra="ignore")

    radius: float = Field(..., ge=0)
    unbounded: bool = False
    degenerate: bool = False
    supplied: bool = False
