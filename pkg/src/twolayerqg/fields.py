"""Grids, discrete fields, differential operators, and elliptic inversions.

Two derivative schemes sit behind one interface:

* ``fd2`` (default): second-order central differences, wrapping indices on
  doubly periodic grids and falling back to one-sided second-order stencils
  on the channel walls.
* ``spectral``: Fourier differentiation, available on doubly periodic grids
  only.

The Helmholtz solve (laplacian - mu) psi = rhs is performed in transform
space using the eigenvalues of the *same* discrete operator that the
derivative scheme applies, so the round trip
``invert_helmholtz(laplacian(psi) - mu*psi)`` reproduces ``psi`` to
round-off rather than to discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dstn, idstn

__all__ = [
    "GridSpec",
    "Field2D",
    "DomainError",
    "SolvabilityError",
    "ddx",
    "ddy",
    "laplacian",
    "poisson_bracket",
    "invert_helmholtz",
    "coordinate_fields",
    "write_field",
    "read_field",
]

TOPOLOGIES = ("doubly_periodic", "channel")
SCHEMES = ("fd2", "spectral")


class DomainError(ValueError):
    """A precondition of an operation is violated; message names it."""


class SolvabilityError(DomainError):
    """The elliptic problem has no solution for the supplied data."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [0, Lx) x [0, Ly] (periodic or channel in y).

    ``ny`` counts cells in y; a channel grid carries ny + 1 node rows so
    that both walls y = 0 and y = Ly lie on grid nodes.  x is always
    periodic with nx nodes.
    """

    nx: int
    ny: int
    Lx: float
    Ly: float
    topology: str = "doubly_periodic"

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise DomainError(
                f"topology must be one of {TOPOLOGIES}, got {self.topology!r}"
            )
        if self.nx < 8 or self.ny < 8:
            raise DomainError("grid needs nx, ny >= 8")
        if not (self.Lx > 0 and self.Ly > 0):
            raise DomainError("domain lengths must be positive")

    @property
    def hx(self) -> float:
        return self.Lx / self.nx

    @property
    def hy(self) -> float:
        return self.Ly / self.ny

    @property
    def ny_nodes(self) -> int:
        return self.ny if self.topology == "doubly_periodic" else self.ny + 1

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols) = (y nodes, x nodes); row-major with x fastest."""
        return (self.ny_nodes, self.nx)

    def x_nodes(self) -> np.ndarray:
        return self.hx * np.arange(self.nx)

    def y_nodes(self) -> np.ndarray:
        return self.hy * np.arange(self.ny_nodes)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """X, Y arrays of shape ``self.shape``."""
        return np.meshgrid(self.x_nodes(), self.y_nodes())

    def refine(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.nx * factor, self.ny * factor, self.Lx, self.Ly, self.topology)


class Field2D:
    """An immutable real field sampled on a :class:`GridSpec`."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: GridSpec, values):
        values = np.array(values, dtype=float)
        if values.shape != grid.shape:
            raise DomainError(
                f"field shape {values.shape} does not match grid shape {grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("field contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("Field2D is immutable")

    # Arithmetic stays on one grid; mixing grids is a caller bug.
    def _check(self, other: "Field2D"):
        if self.grid != other.grid:
            raise DomainError("fields in one expression must share a grid")

    def __add__(self, other):
        if isinstance(other, Field2D):
            self._check(other)
            return Field2D(self.grid, self.values + other.values)
        return Field2D(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field2D):
            self._check(other)
            return Field2D(self.grid, self.values - other.values)
        return Field2D(self.grid, self.values - other)

    def __rsub__(self, other):
        return Field2D(self.grid, other - self.values)

    def __mul__(self, other):
        if isinstance(other, Field2D):
            self._check(other)
            return Field2D(self.grid, self.values * other.values)
        return Field2D(self.grid, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return Field2D(self.grid, -self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> float:
        return float(np.mean(self.values))


def coordinate_fields(grid: GridSpec) -> tuple[Field2D, Field2D]:
    """The coordinate fields x and y as Field2D (useful for beta*y terms)."""
    X, Y = grid.meshgrid()
    return Field2D(grid, X), Field2D(grid, Y)


def _require_finite(f: Field2D, op: str):
    if not np.all(np.isfinite(f.values)):
        raise DomainError(f"{op}: input field has non-finite values")


# ---------------------------------------------------------------------------
# Derivatives
# ---------------------------------------------------------------------------

def _ddx_fd(v: np.ndarray, hx: float) -> np.ndarray:
    return (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)) / (2 * hx)


def _ddy_fd_periodic(v: np.ndarray, hy: float) -> np.ndarray:
    return (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / (2 * hy)


def _ddy_fd_channel(v: np.ndarray, hy: float) -> np.ndarray:
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2 * hy)
    out[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * hy)
    out[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * hy)
    return out


def _d2y_fd_channel(v: np.ndarray, hy: float) -> np.ndarray:
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / hy**2
    out[0] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / hy**2
    out[-1] = (2 * v[-1] - 5 * v[-2] + 4 * v[-3] - v[-4]) / hy**2
    return out


def _wavenumbers(grid: GridSpec):
    kx = 2 * np.pi * np.fft.fftfreq(grid.nx, d=grid.hx)
    ky = 2 * np.pi * np.fft.fftfreq(grid.ny, d=grid.hy)
    return np.meshgrid(kx, ky)


def _spectral_only(grid: GridSpec, op: str):
    if grid.topology != "doubly_periodic":
        raise DomainError(f"{op}: spectral scheme requires a doubly periodic grid")


def ddx(f: Field2D, scheme: str = "fd2") -> Field2D:
    _require_finite(f, "ddx")
    if scheme == "fd2":
        return Field2D(f.grid, _ddx_fd(f.values, f.grid.hx))
    _spectral_only(f.grid, "ddx")
    KX, _ = _wavenumbers(f.grid)
    return Field2D(f.grid, np.real(np.fft.ifft2(1j * KX * np.fft.fft2(f.values))))


def ddy(f: Field2D, scheme: str = "fd2") -> Field2D:
    _require_finite(f, "ddy")
    if scheme == "fd2":
        if f.grid.topology == "doubly_periodic":
            return Field2D(f.grid, _ddy_fd_periodic(f.values, f.grid.hy))
        return Field2D(f.grid, _ddy_fd_channel(f.values, f.grid.hy))
    _spectral_only(f.grid, "ddy")
    _, KY = _wavenumbers(f.grid)
    return Field2D(f.grid, np.real(np.fft.ifft2(1j * KY * np.fft.fft2(f.values))))


def laplacian(f: Field2D, scheme: str = "fd2") -> Field2D:
    """Discrete nabla^2 f with the selected scheme."""
    _require_finite(f, "laplacian")
    grid = f.grid
    v = f.values
    if scheme == "fd2":
        d2x = (np.roll(v, -1, axis=1) - 2 * v + np.roll(v, 1, axis=1)) / grid.hx**2
        if grid.topology == "doubly_periodic":
            d2y = (np.roll(v, -1, axis=0) - 2 * v + np.roll(v, 1, axis=0)) / grid.hy**2
        else:
            d2y = _d2y_fd_channel(v, grid.hy)
        return Field2D(grid, d2x + d2y)
    _spectral_only(grid, "laplacian")
    KX, KY = _wavenumbers(grid)
    return Field2D(grid, np.real(np.fft.ifft2(-(KX**2 + KY**2) * np.fft.fft2(v))))


def poisson_bracket(a: Field2D, b: Field2D, scheme: str = "fd2") -> Field2D:
    """{a, b} = a_x b_y - a_y b_x, antisymmetric by construction."""
    if a.grid != b.grid:
        raise DomainError("poisson_bracket: fields must share a grid")
    ax, ay = ddx(a, scheme).values, ddy(a, scheme).values
    bx, by = ddx(b, scheme).values, ddy(b, scheme).values
    return Field2D(a.grid, ax * by - ay * bx)


# ---------------------------------------------------------------------------
# Helmholtz / Poisson inversion
# ---------------------------------------------------------------------------

def _fd_eigenvalues(grid: GridSpec):
    """Eigenvalues of the 5-point Laplacian on the periodic Fourier basis."""
    jx = np.arange(grid.nx)
    jy = np.arange(grid.ny)
    lx = (2 * np.cos(2 * np.pi * jx / grid.nx) - 2) / grid.hx**2
    ly = (2 * np.cos(2 * np.pi * jy / grid.ny) - 2) / grid.hy**2
    LX, LY = np.meshgrid(lx, ly)
    return LX + LY


def invert_helmholtz(
    rhs: Field2D,
    mu: float,
    scheme: str = "fd2",
    wall_south=None,
    wall_north=None,
) -> Field2D:
    """Solve laplacian(psi) - mu*psi = rhs for psi (mu >= 0).

    Doubly periodic grids: mu = 0 requires a zero-mean right-hand side and
    returns the zero-mean solution (the stream-function gauge is fixed by
    the constant-shift symmetry of the model).  Channel grids: Dirichlet
    wall data may be supplied per wall (arrays over x, default zero); the
    equation is enforced on interior nodes.
    """
    if mu < 0:
        raise DomainError("invert_helmholtz: mu must be nonnegative")
    _require_finite(rhs, "invert_helmholtz")
    grid = rhs.grid

    if grid.topology == "doubly_periodic":
        if scheme == "spectral":
            KX, KY = _wavenumbers(grid)
            denom = -(KX**2 + KY**2) - mu
        else:
            denom = _fd_eigenvalues(grid) - mu
        rhat = np.fft.fft2(rhs.values)
        if mu == 0:
            mean = rhat[0, 0] / (grid.nx * grid.ny)
            scale = np.max(np.abs(rhs.values)) or 1.0
            if abs(mean) > 1e-12 * scale:
                raise SolvabilityError(
                    "invert_helmholtz: mu = 0 on a periodic grid requires a "
                    f"zero-mean right-hand side (mean = {mean.real:.3e}); the "
                    "constant mode is in the kernel of the Laplacian"
                )
            denom = denom.copy()
            denom[0, 0] = 1.0  # gauge: zero-mean solution
            rhat = rhat.copy()
            rhat[0, 0] = 0.0
        psi = np.real(np.fft.ifft2(rhat / denom))
        return Field2D(grid, psi)

    # Channel: lift inhomogeneous Dirichlet data with a profile linear in y,
    # then solve for the remainder in the sine basis (which diagonalizes the
    # interior 3-point operator with homogeneous walls).
    nyn = grid.ny_nodes
    south = np.zeros(grid.nx) if wall_south is None else np.asarray(wall_south, float)
    north = np.zeros(grid.nx) if wall_north is None else np.asarray(wall_north, float)
    if south.shape != (grid.nx,) or north.shape != (grid.nx,):
        raise DomainError("invert_helmholtz: wall data must be arrays over x nodes")
    y = grid.y_nodes()[:, None] / grid.Ly
    lift = south[None, :] * (1 - y) + north[None, :] * y
    lift_field = Field2D(grid, lift)
    rhs_int = rhs.values - (laplacian(lift_field).values - mu * lift)

    interior = rhs_int[1:-1, :]
    fhat = np.fft.fft(interior, axis=1)
    shat = dstn(fhat, type=1, axes=[0])
    jx = np.arange(grid.nx)
    m = np.arange(1, nyn - 1)
    lx = (2 * np.cos(2 * np.pi * jx / grid.nx) - 2) / grid.hx**2
    ly = (2 * np.cos(np.pi * m / (nyn - 1)) - 2) / grid.hy**2
    denom = lx[None, :] + ly[:, None] - mu
    if np.any(np.abs(denom) < 1e-14):
        raise SolvabilityError("invert_helmholtz: singular interior mode (mu too small)")
    shat = shat / denom
    interior_psi = np.real(np.fft.ifft(idstn(shat, type=1, axes=[0]), axis=1))
    psi = np.zeros_like(rhs.values)
    psi[1:-1, :] = interior_psi
    psi += lift
    return Field2D(grid, psi)


# ---------------------------------------------------------------------------
# Field file format
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_field(f: Field2D, t: float, path) -> None:
    """Write a field file: header line then one row of x values per y node."""
    g = f.grid
    header = (
        f"# nx={g.nx} ny={g.ny} Lx={_fmt(g.Lx)} Ly={_fmt(g.Ly)} "
        f"t={_fmt(t)} topology={g.topology}"
    )
    lines = [header]
    for row in f.values:
        lines.append(" ".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_field(path) -> tuple[Field2D, float]:
    """Read a field file written by :func:`write_field`; bit-exact round trip."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise DomainError(f"{path}: missing field file header")
        meta = {}
        for item in header[1:].split():
            key, _, val = item.partition("=")
            meta[key] = val
        try:
            grid = GridSpec(
                nx=int(meta["nx"]),
                ny=int(meta["ny"]),
                Lx=float(meta["Lx"]),
                Ly=float(meta["Ly"]),
                topology=meta["topology"],
            )
            t = float(meta["t"])
        except KeyError as exc:
            raise DomainError(f"{path}: header missing key {exc}") from exc
        rows = []
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.split()])
    values = np.array(rows, dtype=float)
    if values.shape != grid.shape:
        raise DomainError(
            f"{path}: expected {grid.shape[0]} rows of {grid.shape[1]} values, "
            f"got array of shape {values.shape}"
        )
    return Field2D(grid, values), t
