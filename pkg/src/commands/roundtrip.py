from pathlib import Path

from ..models.errors import CntSetsError, CommandError
from ..models.schemas import CommandOptions, Report
from ..services.check_service import CheckService
from ..services.instance_service import InstanceService
from ..services.kernel import Fuel


def roundtrip(path: Path, options: CommandOptions) -> Report:
    """同値の往復（𝓖∘𝓕 = id、θ/θ′ の自然同型）を検査する"""
    try:
        instance = InstanceService.load(path, closure=options.closure)
        fuel = Fuel(options.fuel)
        report = CheckService.check(instance, fuel)
        if not report.ok:
            return report
        return CheckService.roundtrip(instance, fuel)
    except CntSetsError:
        raise
    except Exception as e:
        raise CommandError(f"往復検査に失敗しました: {str(e)}") from e
