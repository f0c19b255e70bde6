# /pg_fold/geometry/projective.py
# タイトル: Projective Space P(m, GF(q)) over a Galois Field Extension
# 役割: 点・超平面の列挙、トレース形式による接続判定、点集合のspan、接続二部グラフの構成を行う。

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import settings
from ..errors import GeometryError
from .galois import FiniteField, field_from, prime_power

logger = logging.getLogger(__name__)


def phi(n: int, l: int, s: int) -> int:
    """
    n次元射影空間に含まれる l次元射影部分空間の個数。
    phi(n, l, s) = Π_{i=0..l} (s^(n+1-i) - 1) / (s^(i+1) - 1)
    """
    if s < 2 or l < 0 or n < l:
        raise GeometryError(f"phi の引数が範囲外です: n={n}, l={l}, s={s}", n=n, l=l, s=s)
    numerator, denominator = 1, 1
    for i in range(l + 1):
        numerator *= s ** (n + 1 - i) - 1
        denominator *= s ** (i + 1) - 1
    return numerator // denominator


def points_in(vector_dim: int, q: int) -> int:
    """ベクトル次元 vector_dim の部分空間に含まれる点の個数 (q^v - 1)/(q - 1)。"""
    return (q ** vector_dim - 1) // (q - 1)


@dataclass(frozen=True)
class ProjParams:
    """P(m, GF(q)) のパラメータ。poly は全体の体 GF(q^(m+1)) の原始多項式（省略時は既定値）。"""
    m: int
    q: int
    poly: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.m < 1:
            raise GeometryError(f"射影次元 m={self.m} は1以上が必要です。", m=self.m)
        if prime_power(self.q) is None:
            raise GeometryError(f"q={self.q} は素数冪ではありません。", q=self.q)

    @property
    def p(self) -> int:
        return prime_power(self.q)[0]

    @property
    def b(self) -> int:
        return prime_power(self.q)[1]

    @property
    def field_degree(self) -> int:
        return self.b * (self.m + 1)

    @property
    def field_order(self) -> int:
        return self.q ** (self.m + 1)

    @property
    def num_points(self) -> int:
        return points_in(self.m + 1, self.q)


@dataclass(frozen=True)
class ProjPoint:
    """点 = 指数の同値類 {α^(i + jN)}。index は代表指数 i ∈ [0, N)。"""
    index: int


@dataclass(frozen=True)
class Hyperplane:
    """双対指数 b の超平面 {x : Tr(α^b · α^x) = 0}。"""
    index: int


@dataclass(frozen=True)
class Flat:
    """射影部分空間。点集合を明示的に保持する。"""
    dim: int
    points: Tuple[int, ...]
    basis: Tuple[int, ...] = field(default=(), compare=False)

    def __contains__(self, point: int) -> bool:
        return point in self.point_set

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def point_set(self) -> frozenset:
        return frozenset(self.points)

    def issubset(self, other: 'Flat') -> bool:
        return self.point_set <= other.point_set

    def isdisjoint(self, other: 'Flat') -> bool:
        return self.point_set.isdisjoint(other.point_set)


PointLike = Union[int, ProjPoint]
HyperplaneLike = Union[int, Hyperplane]


class ProjectiveSpace:
    """
    GF(q^(m+1)) の乗法群を GF(q)* で割った剰余類として P(m, GF(q)) を実現する。
    点 i と超平面 b の接続は Tr_{GF(q^(m+1))→GF(q)}(α^(i+b)) = 0 で判定する。
    """

    def __init__(self, params: ProjParams, field_: FiniteField):
        self.params = params
        self.field = field_
        self.m = params.m
        self.q = params.q
        self.N = params.num_points
        self.degree = phi(self.m - 1, 0, self.q)
        # GF(q)* = <α^N>
        self.scalar_exponents = np.arange(self.q - 1, dtype=np.int64) * self.N
        traces = field_.trace_vectors(np.arange(self.N, dtype=np.int64), params.b)
        self._trace_zero = traces == 0
        self._trace_zero.flags.writeable = False

    def __repr__(self) -> str:
        return f"P({self.m}, GF({self.q}))"

    @property
    def num_points(self) -> int:
        return self.N

    @property
    def num_hyperplanes(self) -> int:
        return self.N

    # --- 点と超平面 ---
    def point(self, exponent: int) -> ProjPoint:
        return ProjPoint(int(exponent) % self.N)

    def incident(self, point: PointLike, hyperplane: HyperplaneLike) -> bool:
        i = point.index if isinstance(point, ProjPoint) else int(point)
        b = hyperplane.index if isinstance(hyperplane, Hyperplane) else int(hyperplane)
        return bool(self._trace_zero[(i + b) % self.N])

    def hyperplane_points(self, hyperplane: HyperplaneLike) -> Tuple[int, ...]:
        b = hyperplane.index if isinstance(hyperplane, Hyperplane) else int(hyperplane)
        idx = (np.arange(self.N) + b) % self.N
        return tuple(np.nonzero(self._trace_zero[idx])[0].tolist())

    @cached_property
    def incidence_matrix(self) -> np.ndarray:
        """行 = 点、列 = 超平面のブール接続行列（巡回行列）。"""
        idx = (np.arange(self.N)[:, None] + np.arange(self.N)[None, :]) % self.N
        matrix = self._trace_zero[idx]
        matrix.flags.writeable = False
        return matrix

    def hyperplanes_containing(self, points: Iterable[int]) -> Tuple[int, ...]:
        """与えられた点を全て含む超平面の添字（双対フラット）。"""
        rows = sorted(set(int(x) % self.N for x in points))
        if not rows:
            return tuple(range(self.N))
        mask = self.incidence_matrix[rows, :].all(axis=0)
        return tuple(np.nonzero(mask)[0].tolist())

    def hyperplanes_through_count(self, vector_dim: int) -> int:
        """ベクトル次元 vector_dim の部分空間を含む超平面の個数。"""
        return points_in(self.m + 1 - vector_dim, self.q)

    # --- ベクトル表現とspan ---
    def point_vectors(self, point: int) -> np.ndarray:
        """点の非零スカラー倍 α^(x + jN) の符号化ベクトル。"""
        return self.field.exp_table[(int(point) + self.scalar_exponents) % self.field.n]

    def flat_vectors(self, flat: Flat) -> np.ndarray:
        """フラットに対応するベクトル部分空間の全元（零ベクトルを含む）。"""
        pts = np.asarray(flat.points, dtype=np.int64)
        exps = (pts[:, None] + self.scalar_exponents[None, :]) % self.field.n
        return np.unique(np.concatenate(([0], self.field.exp_table[exps].ravel())))

    def _close(self, vectors: np.ndarray, basis: list, points: Sequence[int]) -> Tuple[np.ndarray, list]:
        members = set(vectors.tolist())
        for x in points:
            code = int(self.field.exp_table[x])
            if code in members:
                continue
            multiples = np.concatenate(([0], self.point_vectors(x)))
            vectors = np.unique(self.field.add_vectors(vectors[:, None], multiples[None, :]).ravel())
            members = set(vectors.tolist())
            basis.append(x)
        return vectors, basis

    def _flat_from_vectors(self, vectors: np.ndarray, basis: list) -> Flat:
        nonzero = vectors[vectors != 0]
        points = np.unique(self.field.log_table[nonzero] % self.N)
        return Flat(dim=len(basis) - 1, points=tuple(points.tolist()), basis=tuple(basis))

    def span(self, points: Iterable[PointLike]) -> Flat:
        """点集合を含む最小のフラット。代表ベクトルを加法と GF(q) スカラー倍で閉包する。"""
        pts = sorted(set(
            (p.index if isinstance(p, ProjPoint) else int(p)) % self.N for p in points
        ))
        if not pts:
            raise GeometryError("空の点集合のspanは定義されていません。")
        vectors, basis = self._close(np.zeros(1, dtype=np.int64), [], pts)
        return self._flat_from_vectors(vectors, basis)

    def join(self, *flats: Flat) -> Flat:
        """フラットの和（span of union）。最初のフラットのベクトル空間から閉包を始める。"""
        if not flats:
            raise GeometryError("join には1つ以上のフラットが必要です。")
        first = flats[0]
        vectors = self.flat_vectors(first)
        basis = list(first.basis) if first.basis else list(self.span(first.points).basis)
        rest = sorted(set(x for f in flats[1:] for x in f.points))
        vectors, basis = self._close(vectors, basis, rest)
        return self._flat_from_vectors(vectors, basis)

    def is_flat(self, points: Iterable[int]) -> bool:
        pts = tuple(sorted(set(int(x) % self.N for x in points)))
        return bool(pts) and self.span(pts).points == pts

    def shift(self, flat: Flat, i: int) -> Flat:
        """α^i を掛けた像。指数に i を足すことに相当する。"""
        points = tuple(sorted((x + i) % self.N for x in flat.points))
        basis = tuple((x + i) % self.N for x in flat.basis)
        return Flat(flat.dim, points, basis)


def build_space(params: ProjParams) -> ProjectiveSpace:
    """P(m, GF(q)) を構成する。全体の体 GF(q^(m+1)) はサイズ上限内である必要がある。"""
    if params.field_order > settings.FIELD_SIZE_BOUND:
        raise GeometryError(
            f"GF({params.q}^{params.m + 1}) の位数 {params.field_order} がサイズ上限 "
            f"{settings.FIELD_SIZE_BOUND} を超えています。",
            order=params.field_order, bound=settings.FIELD_SIZE_BOUND
        )
    field_ = field_from(params.p, params.field_degree, params.poly)
    space = ProjectiveSpace(params, field_)
    logger.info(f"射影空間を構成しました: {space} (点 {space.N} 個, 超平面 {space.N} 個, 次数 {space.degree})")
    return space


@dataclass(frozen=True)
class IncidenceGraph:
    """点-超平面の正則平衡二部グラフ。辺は (点, 超平面) の辞書式順で番号付けする。"""
    num_vertices: int
    degree: int
    point_adjacency: Tuple[Tuple[int, ...], ...]
    hyperplane_adjacency: Tuple[Tuple[int, ...], ...]
    edges: Tuple[Tuple[int, int], ...]
    edge_index: Dict[Tuple[int, int], int] = field(compare=False, repr=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def point_edges(self, point: int) -> Tuple[int, ...]:
        return tuple(self.edge_index[(point, h)] for h in self.point_adjacency[point])

    def hyperplane_edges(self, hyperplane: int) -> Tuple[int, ...]:
        return tuple(self.edge_index[(x, hyperplane)] for x in self.hyperplane_adjacency[hyperplane])


def incidence_graph(space: ProjectiveSpace) -> IncidenceGraph:
    """接続行列から二部グラフを構成する。"""
    matrix = space.incidence_matrix
    pairs = np.argwhere(matrix)
    edges = tuple((int(x), int(h)) for x, h in pairs)
    point_adj = tuple(tuple(np.nonzero(matrix[x, :])[0].tolist()) for x in range(space.N))
    hyper_adj = tuple(tuple(np.nonzero(matrix[:, h])[0].tolist()) for h in range(space.N))
    graph = IncidenceGraph(
        num_vertices=space.N,
        degree=space.degree,
        point_adjacency=point_adj,
        hyperplane_adjacency=hyper_adj,
        edges=edges,
        edge_index={edge: i for i, edge in enumerate(edges)},
    )
    logger.info(f"接続グラフを構成しました: 辺 {graph.num_edges} 本")
    return graph
