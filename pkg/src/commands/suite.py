import asyncio
from pathlib import Path

from ..models.errors import InputError
from ..models.schemas import CommandOptions, Report
from ..services.suite_service import SuiteService


def suite(directory: Path, options: CommandOptions) -> Report:
    """ディレクトリ内の全インスタンスに check・laws・roundtrip を適用する"""
    if not directory.is_dir():
        raise InputError(f"ディレクトリが見つかりません: {directory}")
    results = asyncio.run(SuiteService.run(directory, options))
    return SuiteService.summarize(results)
