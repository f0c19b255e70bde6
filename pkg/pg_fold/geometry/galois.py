# /pg_fold/geometry/galois.py
# タイトル: Galois Field in Discrete-Log Form
# 役割: 原始多項式から GF(p^e) の指数表・対数表を構成し、体演算・相対トレース・部分体構造を提供する。
#       素数判定・原始多項式の判定と探索は galois パッケージに委ねる。

import logging
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence, Tuple

import galois
import numpy as np

from ..config import settings
from ..errors import FieldConstructionError, FieldDomainError

logger = logging.getLogger(__name__)


def prime_power(q: int) -> Optional[Tuple[int, int]]:
    """q = p^b ならば (p, b) を、素数冪でなければ None を返す。"""
    if q < 2 or not galois.is_prime_power(q):
        return None
    primes, multiplicities = galois.factors(q)
    return int(primes[0]), int(multiplicities[0])


def subgroup_stride(group_order: int, subgroup_order: int) -> int:
    """
    巡回群 <α> (位数 group_order) の部分群 <α^β> の生成ストライド β を返す。
    β = group_order / subgroup_order
    """
    if subgroup_order <= 0 or group_order % subgroup_order != 0:
        raise FieldDomainError(
            f"部分群の位数 {subgroup_order} は群の位数 {group_order} を割り切りません。",
            group_order=group_order, subgroup_order=subgroup_order
        )
    return group_order // subgroup_order


def _check_prime(p: int):
    if not galois.is_prime(p):
        raise FieldConstructionError(f"p={p} は素数ではありません。", p=p)


def _validate_poly(p: int, poly: Sequence[int]) -> Tuple[int, ...]:
    poly = tuple(int(c) for c in poly)
    if len(poly) < 2:
        raise FieldConstructionError(f"多項式の次数は1以上が必要です: {poly}", poly=list(poly))
    if poly[0] != 1:
        raise FieldConstructionError(f"多項式はモニック（先頭係数1）である必要があります: {poly}", poly=list(poly))
    if any(c < 0 or c >= p for c in poly):
        raise FieldConstructionError(f"係数は GF({p}) の元である必要があります: {poly}", poly=list(poly))
    return poly


def _as_poly(p: int, poly: Sequence[int]) -> galois.Poly:
    # galois.Poly も先頭係数から並べる
    return galois.Poly(list(poly), field=galois.GF(p))


def is_primitive(p: int, poly: Sequence[int]) -> bool:
    """poly（先頭係数から並べた係数列）が GF(p) 上の原始多項式かどうかを判定する。"""
    poly = _validate_poly(p, poly)
    if poly[-1] == 0:
        return False
    return bool(_as_poly(p, poly).is_primitive())


def _multiplicative_order(p: int, poly: Sequence[int]) -> int:
    """x の剰余類の位数を逐次計算する。可逆でなければ 0。"""
    f = _as_poly(p, poly)
    one = galois.Poly([1], field=f.field)
    x = galois.Poly([1, 0], field=f.field) % f
    current = x
    for i in range(1, p ** f.degree + 1):
        if current == one:
            return i
        current = (current * x) % f
    return 0


def default_primitive_poly(p: int, e: int) -> Tuple[int, ...]:
    """辞書式順序で最小の次数 e の原始多項式を返す（先頭係数から並べた係数列）。"""
    _check_prime(p)
    if e < 1:
        raise FieldConstructionError(f"拡大次数 e={e} は1以上が必要です。", e=e)
    if p ** e > settings.FIELD_SIZE_BOUND:
        raise FieldConstructionError(
            f"体の位数 {p}^{e} がサイズ上限 {settings.FIELD_SIZE_BOUND} を超えています。",
            order=p ** e, bound=settings.FIELD_SIZE_BOUND
        )
    candidate = tuple(int(c) for c in galois.primitive_poly(p, e, method="min").coeffs)
    logger.debug(f"GF({p}^{e}) の既定原始多項式: {candidate}")
    return candidate


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^e) の構成パラメータ。poly は先頭係数1から並べた長さ e+1 の係数列。"""
    p: int
    e: int
    poly: Tuple[int, ...]

    @classmethod
    def default(cls, p: int, e: int) -> 'FieldSpec':
        return cls(p, e, default_primitive_poly(p, e))

    def poly_str(self) -> str:
        terms = []
        for power, c in zip(range(self.e, -1, -1), self.poly):
            if not c:
                continue
            if power == 0:
                terms.append(str(c))
                continue
            mono = "x" if power == 1 else f"x^{power}"
            terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(terms)


@dataclass(frozen=True)
class FieldElement:
    """ZERO（exponent=None）または α^exponent。"""
    field: 'FiniteField' = dc_field(compare=False, repr=False)
    exponent: Optional[int]

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    @property
    def vector(self) -> int:
        return self.field.vector(self)

    def __add__(self, other): return self.field.add(self, other)
    def __sub__(self, other): return self.field.sub(self, other)
    def __mul__(self, other): return self.field.mul(self, other)
    def __truediv__(self, other): return self.field.div(self, other)
    def __pow__(self, k: int): return self.field.pow(self, k)
    def __neg__(self): return self.field.neg(self)

    def __repr__(self) -> str:
        return "0" if self.exponent is None else f"α^{self.exponent}"


class FiniteField:
    """
    離散対数表現の GF(p^e)。
    元の係数ベクトルは p 進整数（低次係数が最下位桁）で符号化し、
    exp_table[i] = α^i の符号、log_table[v] = 符号 v の指数（v=0 は -1）を保持する。
    """

    def __init__(self, spec: FieldSpec, exp_table: np.ndarray, log_table: np.ndarray):
        self.spec = spec
        self.p = spec.p
        self.e = spec.e
        self.order = spec.p ** spec.e
        self.n = self.order - 1
        self.exp_table = exp_table
        self.log_table = log_table
        self.exp_table.flags.writeable = False
        self.log_table.flags.writeable = False
        self._powers = self.p ** np.arange(self.e, dtype=np.int64)
        self._digits = None
        if self.p != 2:
            codes = np.arange(self.order, dtype=np.int64)
            self._digits = (codes[:, None] // self._powers[None, :]) % self.p
        self.zero = FieldElement(self, None)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.e})[{self.spec.poly_str()}]"

    # --- 元の生成 ---
    def element(self, exponent: int) -> FieldElement:
        return FieldElement(self, exponent % self.n)

    @property
    def one(self) -> FieldElement:
        return self.element(0)

    @property
    def alpha(self) -> FieldElement:
        return self.element(1)

    def from_vector(self, code: int) -> FieldElement:
        code = int(code)
        if code == 0:
            return self.zero
        return FieldElement(self, int(self.log_table[code]))

    def vector(self, a: FieldElement) -> int:
        return 0 if a.exponent is None else int(self.exp_table[a.exponent])

    def coefficients(self, code: int) -> Tuple[int, ...]:
        """符号化ベクトルの係数を高次から並べて返す。"""
        digits = []
        for _ in range(self.e):
            digits.append(code % self.p)
            code //= self.p
        return tuple(reversed(digits))

    # --- ベクトル演算（numpy配列にブロードキャスト可能） ---
    def add_vectors(self, u, v):
        if self.p == 2:
            return np.bitwise_xor(u, v)
        return ((self._digits[u] + self._digits[v]) % self.p) @ self._powers

    def neg_vectors(self, u):
        if self.p == 2:
            return u
        return ((self.p - self._digits[u]) % self.p) @ self._powers

    # --- 体演算 ---
    def _check(self, *elements: FieldElement):
        for a in elements:
            if a.field is not self:
                raise FieldDomainError(f"異なる体の元は演算できません: {a.field} と {self}")

    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        self._check(a, b)
        return self.from_vector(self.add_vectors(self.vector(a), self.vector(b)))

    def neg(self, a: FieldElement) -> FieldElement:
        self._check(a)
        return self.from_vector(self.neg_vectors(self.vector(a)))

    def sub(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self.add(a, self.neg(b))

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        self._check(a, b)
        if a.is_zero or b.is_zero:
            return self.zero
        return self.element(a.exponent + b.exponent)

    def inv(self, a: FieldElement) -> FieldElement:
        self._check(a)
        if a.is_zero:
            raise FieldDomainError("ゼロの逆元は定義されていません。")
        return self.element(-a.exponent)

    def div(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self.mul(a, self.inv(b))

    def pow(self, a: FieldElement, k: int) -> FieldElement:
        self._check(a)
        if a.is_zero:
            if k < 0:
                raise FieldDomainError("ゼロの負冪は定義されていません。")
            return self.one if k == 0 else self.zero
        return self.element(a.exponent * k)

    # --- 部分体とトレース ---
    def _check_sub_degree(self, sub_degree: int):
        if sub_degree < 1 or self.e % sub_degree != 0:
            raise FieldDomainError(
                f"部分体の次数 {sub_degree} は拡大次数 {self.e} の約数ではありません。",
                e=self.e, sub_degree=sub_degree
            )

    def subfield_exponents(self, sub_degree: int) -> np.ndarray:
        """部分体 GF(p^sub_degree)* の元の指数。"""
        self._check_sub_degree(sub_degree)
        stride = subgroup_stride(self.n, self.p ** sub_degree - 1)
        return np.arange(0, self.n, stride, dtype=np.int64)

    def relative_trace(self, x: FieldElement, sub_degree: int) -> FieldElement:
        """Tr_{GF(p^e)/GF(p^sub_degree)}(x) = Σ_i x^(p^(sub_degree·i))"""
        self._check(x)
        self._check_sub_degree(sub_degree)
        if x.is_zero:
            return self.zero
        acc = 0
        for i in range(self.e // sub_degree):
            acc = self.add_vectors(acc, int(self.exp_table[(x.exponent * pow(self.p, sub_degree * i, self.n)) % self.n]))
        return self.from_vector(acc)

    def trace_vectors(self, exponents: np.ndarray, sub_degree: int) -> np.ndarray:
        """指数配列の各元の相対トレースを符号化ベクトルで返す（ベクトル化版）。"""
        self._check_sub_degree(sub_degree)
        exponents = np.asarray(exponents, dtype=np.int64) % self.n
        acc = np.zeros(exponents.shape, dtype=np.int64)
        for i in range(self.e // sub_degree):
            multiplier = pow(self.p, sub_degree * i, self.n)
            acc = self.add_vectors(acc, self.exp_table[(exponents * multiplier) % self.n])
        return acc


def build_field(spec: FieldSpec) -> FiniteField:
    """
    FieldSpec から指数表・対数表を構成する。
    原始性は仮定せず検証し、失敗した場合は実際に見つかった x の位数を報告する。
    """
    p, e = spec.p, spec.e
    _check_prime(p)
    if e < 1:
        raise FieldConstructionError(f"拡大次数 e={e} は1以上が必要です。", e=e)
    poly = _validate_poly(p, spec.poly)
    if len(poly) != e + 1:
        raise FieldConstructionError(
            f"多項式の長さ {len(poly)} が e+1={e + 1} と一致しません。", poly=list(poly), e=e
        )
    order = p ** e
    if order > settings.FIELD_SIZE_BOUND:
        raise FieldConstructionError(
            f"体の位数 {order} がサイズ上限 {settings.FIELD_SIZE_BOUND} を超えています。",
            order=order, bound=settings.FIELD_SIZE_BOUND
        )
    if not is_primitive(p, poly):
        order_found = _multiplicative_order(p, poly)
        raise FieldConstructionError(
            f"多項式 {poly} は GF({p}) 上で原始的ではありません（x の位数 {order_found}、必要 {order - 1}）。",
            poly=list(poly), order_found=order_found, order_required=order - 1
        )

    n = order - 1
    poly_low = poly[::-1]
    exp_table = np.zeros(n, dtype=np.int64)
    log_table = np.full(order, -1, dtype=np.int64)
    vec = [1] + [0] * (e - 1)
    for i in range(n):
        code = 0
        for digit in reversed(vec):
            code = code * p + digit
        exp_table[i] = code
        log_table[code] = i
        # vec <- vec * x mod poly
        top = vec[-1]
        vec = [0] + vec[:-1]
        if top:
            for j in range(e):
                vec[j] = (vec[j] - top * poly_low[j]) % p

    field_ = FiniteField(FieldSpec(p, e, poly), exp_table, log_table)
    logger.info(f"有限体を構成しました: {field_} (非零元 {n} 個)")
    return field_


def field_from(p: int, e: int, poly: Optional[Sequence[int]] = None) -> FiniteField:
    """多項式を省略した場合は既定の原始多項式を用いて体を構成する。"""
    spec = FieldSpec(p, e, tuple(poly)) if poly is not None else FieldSpec.default(p, e)
    return build_field(spec)
