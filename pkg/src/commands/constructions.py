from pathlib import Path
from typing import Any, Optional

from ..models.errors import CntSetsError, CommandError, InputError, WitnessInvalidError
from ..models.models import (
    ActionInstance,
    CntMorphism,
    EquivariantMapInstance,
    FunctorInstance,
    NatTransInstance,
    OvertDiscreteWitness,
)
from ..models.schemas import CommandOptions, Report
from ..services.category_service import CategoryService
from ..services.check_service import CheckService
from ..services.cntsets_service import CntSetsService
from ..services.equivalence_service import EquivalenceService
from ..services.ideal_service import IdealSpaceService
from ..services.instance_service import InstanceService
from ..services.kernel import Fuel


def spatialize(path: Path, options: CommandOptions) -> Report:
    """overt/discrete の証拠から PER と点の対応 g, h を復元する"""
    try:
        witness = InstanceService.load(path, closure=options.closure)
        if not isinstance(witness, OvertDiscreteWitness):
            raise InputError(f"spatialize は witness のみ扱えます: {InstanceService.kind_of(witness)}")
        report = IdealSpaceService.check_relation(witness.relation)
        if not report.ok:
            return report
        try:
            result = CntSetsService.spatialize(witness)
        except WitnessInvalidError as e:
            if e.report is None:
                raise
            return e.report

        return Report.from_findings([], subject="spatialize").with_data(
            {
                "per": InstanceService.payload(result.per),
                "support": sorted(result.support),
                "g": list(result.g_map),
                "h": list(result.h_map),
            }
        )
    except CntSetsError:
        raise
    except Exception as e:
        raise CommandError(f"空間化に失敗しました: {str(e)}") from e


def compose(second_path: Path, first_path: Path, options: CommandOptions) -> Report:
    """second ∘ first を計算する（CntSets の射、または自然変換の縦合成）"""
    try:
        second = InstanceService.load(second_path, closure=options.closure)
        first = InstanceService.load(first_path, closure=options.closure)
        fuel = Fuel(options.fuel)
        report = CheckService.check(second, fuel).merged(CheckService.check(first, fuel))
        if not report.ok:
            return report

        composite: Any
        if isinstance(second, CntMorphism) and isinstance(first, CntMorphism):
            composite = CntSetsService.saturate(CntSetsService.compose_cnt(second, first))
        elif isinstance(second, NatTransInstance) and isinstance(first, NatTransInstance):
            composite = CategoryService.vertical_compose(second, first)
        else:
            raise InputError("compose は cnt-morphism どうし、または nat-trans どうしのみ合成できます")

        result = CheckService.check(composite, fuel)
        return Report(status=result.status, subject="compose", findings=result.findings).with_data(
            {"document": InstanceService.payload(composite)}
        )
    except CntSetsError:
        raise
    except Exception as e:
        raise CommandError(f"合成に失敗しました: {str(e)}") from e


def to_etale(path: Path, output: Optional[Path], options: CommandOptions) -> Report:
    """関手を C-集合に（自然変換を同変写像に）変換する"""
    try:
        instance = InstanceService.load(path, closure=options.closure)
        if isinstance(instance, FunctorInstance):
            result: Any = EquivalenceService.to_cset(instance)
        elif isinstance(instance, NatTransInstance):
            result = EquivalenceService.nat_to_equivariant(instance)
        else:
            raise InputError(f"to-etale は functor/nat-trans のみ扱えます: {InstanceService.kind_of(instance)}")
        return _emit(result, output, "to-etale", Fuel(options.fuel))
    except CntSetsError:
        raise
    except Exception as e:
        raise CommandError(f"C-集合への変換に失敗しました: {str(e)}") from e


def to_functor(path: Path, output: Optional[Path], options: CommandOptions) -> Report:
    """C-集合を関手に（同変写像を自然変換に）変換する"""
    try:
        instance = InstanceService.load(path, closure=options.closure)
        fuel = Fuel(options.fuel)
        if isinstance(instance, ActionInstance):
            result: Any = EquivalenceService.to_functor(instance, fuel)
        elif isinstance(instance, EquivariantMapInstance):
            result = EquivalenceService.equivariant_to_nat(instance, fuel)
        else:
            raise InputError(f"to-functor は cset/equivariant のみ扱えます: {InstanceService.kind_of(instance)}")
        return _emit(result, output, "to-functor", fuel)
    except CntSetsError:
        raise
    except Exception as e:
        raise CommandError(f"関手への変換に失敗しました: {str(e)}") from e


def _emit(result: Any, output: Optional[Path], subject: str, fuel: Fuel) -> Report:
    # 構成の結果も検査してから書き出す
    checked = CheckService.check(result, fuel)
    report = Report(status=checked.status, subject=subject, findings=checked.findings)
    if output is not None:
        InstanceService.write(result, output)
        return report.with_data({"output": str(output)})
    return report.with_data({"document": InstanceService.payload(result)})
