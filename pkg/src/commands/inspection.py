from pathlib import Path

from ..models.errors import CntSetsError, CommandError, InputError
from ..models.models import OvertDiscreteWitness, Per, TransitiveRelation
from ..models.schemas import CommandOptions, Report
from ..services.check_service import CheckService
from ..services.cntsets_service import CntSetsService
from ..services.ideal_service import IdealSpaceService
from ..services.instance_service import InstanceService
from ..services.kernel import Fuel
from ..services.law_service import LawService


def check(path: Path, options: CommandOptions) -> Report:
    """インスタンスを読み込んで検査する"""
    try:
        instance = InstanceService.load(path, closure=options.closure)
        return CheckService.check(instance, Fuel(options.fuel))
    except CntSetsError:
        raise
    except Exception as e:
        raise CommandError(f"インスタンスの検査に失敗しました: {str(e)}") from e


def ideals(path: Path, options: CommandOptions) -> Report:
    """関係（PER・証拠の場合はその関係）のイデアルを正準順序で列挙する"""
    try:
        instance = InstanceService.load(path, closure=options.closure)
        if isinstance(instance, Per):
            relation = CntSetsService.e_obj(instance)
        elif isinstance(instance, OvertDiscreteWitness):
            relation = instance.relation
        elif isinstance(instance, TransitiveRelation):
            relation = instance
        else:
            raise InputError(f"ideals は relation/per/witness のみ扱えます: {InstanceService.kind_of(instance)}")

        report = IdealSpaceService.check_relation(relation)
        if not report.ok:
            return report
        points = [sorted(ideal.elements or ()) for ideal in IdealSpaceService.enumerate_ideals(relation)]
        return report.with_data({"points": points})
    except CntSetsError:
        raise
    except Exception as e:
        raise CommandError(f"イデアルの列挙に失敗しました: {str(e)}") from e


def laws(path: Path, options: CommandOptions) -> Report:
    """検査に通ったインスタンスについて、構成の法則を確かめる"""
    try:
        instance = InstanceService.load(path, closure=options.closure)
        fuel = Fuel(options.fuel)
        report = CheckService.check(instance, fuel)
        if not report.ok:
            return report
        return LawService.run_laws(instance, fuel)
    except CntSetsError:
        raise
    except Exception as e:
        raise CommandError(f"法則の検査に失敗しました: {str(e)}") from e
