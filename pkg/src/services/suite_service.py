import asyncio
import logging
from pathlib import Path
from typing import List, Tuple

from .. import config
from ..models.errors import CntSetsError
from ..models.schemas import CommandOptions, Finding, Report
from .check_service import ROUNDTRIP_KINDS, CheckService
from .instance_service import InstanceService
from .kernel import Fuel
from .law_service import LawService

logger = logging.getLogger(__name__)


class SuiteService:
    """ディレクトリ内のインスタンスファイルをまとめて検査する"""

    @staticmethod
    def run_file(path: Path, options: CommandOptions) -> Report:
        """check → laws → roundtrip（対応する種類のみ）の順に検査し、報告をまとめる"""
        try:
            instance = InstanceService.load(path, closure=options.closure)
            fuel = Fuel(options.fuel)
            report = CheckService.check(instance, fuel)
            if report.ok:
                report = report.merged(LawService.run_laws(instance, fuel))
            if report.ok and InstanceService.kind_of(instance) in ROUNDTRIP_KINDS:
                report = report.merged(CheckService.roundtrip(instance, fuel))
            return Report(status=report.status, subject=path.name, findings=report.findings)
        except CntSetsError as e:
            return Report.input_error(str(e), subject=path.name)
        except Exception as e:
            logger.exception("%s の検査中に想定外のエラーが発生しました", path.name)
            return Report.input_error(f"検査に失敗しました: {str(e)}", subject=path.name)

    @staticmethod
    async def run(directory: Path, options: CommandOptions) -> List[Tuple[str, Report]]:
        """*.json を並行に検査し、ファイル名順に結果を返す"""
        paths = sorted(directory.glob("*.json"), key=lambda p: p.name)
        if not paths:
            logger.warning("検査するファイルがありません: %s", directory)

        sem = asyncio.Semaphore(config.SUITE_WORKERS)

        async def check_one(path: Path) -> Tuple[str, Report]:
            async with sem:
                return path.name, await asyncio.to_thread(SuiteService.run_file, path, options)

        tasks = [asyncio.create_task(check_one(path)) for path in paths]
        results = await asyncio.gather(*tasks)
        return sorted(results, key=lambda item: item[0])

    @staticmethod
    def summarize(results: List[Tuple[str, Report]]) -> Report:
        """ファイルごとの報告を1つにまとめる（findings にはファイル名を付ける）"""
        findings = [
            Finding(rule=finding.rule, message=f"{name}: {finding.message}", witness={"file": name, **finding.witness})
            for name, report in results
            for finding in report.findings
        ]
        files = [{"file": name, "status": report.status} for name, report in results]
        if any(report.status == "input-error" for _, report in results):
            summary = Report(status="input-error", subject="suite", findings=findings)
        else:
            summary = Report.from_findings(findings, subject="suite")
        return summary.with_data({"files": files})
