from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .schemas import Report


class CntSetsError(Exception):
    """検査ツール全体の基底例外"""


class InputError(CntSetsError, ValueError):
    """インスタンスの形式不正・参照切れ・前提条件違反"""


class CapacityError(InputError):
    """台集合が設定上限を超えている"""


class PreconditionError(InputError):
    """操作の前提条件を満たしていない"""


class DomainError(InputError):
    """部分関数の表が定義域と一致しない"""


class OperatorInvalidError(CntSetsError):
    """列挙作用素の出力がイデアルにならなかった"""


class WitnessInvalidError(CntSetsError):
    """overt/discrete の証拠集合が条件を満たさない"""

    def __init__(self, message: str, report: Optional["Report"] = None):
        super().__init__(message)
        self.report = report


class CommandError(CntSetsError):
    """コマンドの実行中に想定外のエラーが起きた"""
