"""
射影幾何・フォールディングで使用するEnum定義
"""
from enum import Enum

class FoldCase(Enum):
    """m+1 = (k+1)*t の分解に応じた2つの構成ケース"""
    ODD = "odd"                          # t = 2: キャリアはブロック自身
    EVEN_FACTORABLE = "even_factorable"  # t >= 3: キャリアは t-1 個のブロックの張る部分空間

class CarrierStrategy(Enum):
    """キャリア割当の戦略"""
    EQUIVARIANT = "equivariant"
    MATCHING = "matching"
