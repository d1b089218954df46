import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import config
from .commands import constructions, inspection, roundtrip, suite
from .models.errors import CntSetsError
from .models.schemas import CommandOptions, Report

logger = logging.getLogger(__name__)

EXIT_CODES = {"ok": 0, "violation": 1, "input-error": 2}


def build_parser() -> argparse.ArgumentParser:
    """サブコマンドごとの引数を定義する"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=config.DEFAULT_FUEL, help="半決定手続きのステップ数")
    common.add_argument("--json", action="store_true", help="報告を JSON で出力する")
    common.add_argument("--closure", action="store_true", help="検査の前に関係の推移閉包を取る")

    parser = argparse.ArgumentParser(
        prog="cntsets",
        description="計算可能位相空間・CntSets・C-集合の有限インスタンス検査ツール",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("check", "インスタンスを検査する"),
        ("ideals", "関係のイデアルを列挙する"),
        ("spatialize", "overt/discrete の証拠から PER を復元する"),
        ("laws", "構成の法則を確かめる"),
        ("roundtrip", "同値の往復を検査する"),
    ):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("file", type=Path)

    sub = commands.add_parser("compose", parents=[common], help="second ∘ first を計算する")
    sub.add_argument("second", type=Path)
    sub.add_argument("first", type=Path)

    for name, help_text in (
        ("to-etale", "関手を C-集合に変換する"),
        ("to-functor", "C-集合を関手に変換する"),
    ):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("file", type=Path)
        sub.add_argument("-o", "--output", type=Path, default=None)

    sub = commands.add_parser("suite", parents=[common], help="ディレクトリ内の全ファイルを検査する")
    sub.add_argument("directory", type=Path)
    return parser


def run(args: argparse.Namespace) -> Report:
    options = CommandOptions(fuel=args.fuel, closure=args.closure)
    command = args.command
    if command == "check":
        return inspection.check(args.file, options)
    if command == "ideals":
        return inspection.ideals(args.file, options)
    if command == "laws":
        return inspection.laws(args.file, options)
    if command == "spatialize":
        return constructions.spatialize(args.file, options)
    if command == "compose":
        return constructions.compose(args.second, args.first, options)
    if command == "to-etale":
        return constructions.to_etale(args.file, args.output, options)
    if command == "to-functor":
        return constructions.to_functor(args.file, args.output, options)
    if command == "roundtrip":
        return roundtrip.roundtrip(args.file, options)
    return suite.suite(args.directory, options)


def render(report: Report, as_json: bool) -> str:
    """報告を出力用の文字列にする（--json のときは1つの JSON 文書）"""
    if as_json:
        payload = report.model_dump(mode="json", exclude_none=True)
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)

    data = report.data if isinstance(report.data, dict) else {}
    if report.ok and "document" in data:
        return json.dumps(data["document"], sort_keys=True, indent=2, ensure_ascii=False)

    lines = [f"{report.status}: {report.subject or ''}".rstrip()]
    for finding in report.findings:
        lines.append(f"  [{finding.rule}] {finding.message}")
    if "points" in data:
        lines.append(f"  点の数: {len(data['points'])}")
        lines.extend(f"  {json.dumps(point)}" for point in data["points"])
    if "per" in data:
        lines.append(f"  PER: {json.dumps(data['per']['pairs'])}")
        lines.append(f"  S: {json.dumps(data['support'])}")
        lines.append(f"  g: {json.dumps(data['g'])}")
        lines.append(f"  h: {json.dumps(data['h'])}")
    if "files" in data:
        lines.extend(f"  {entry['status']}: {entry['file']}" for entry in data["files"])
    if "output" in data:
        lines.append(f"  書き出し先: {data['output']}")
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    """コマンドラインのエントリポイント。終了コードは ok=0, violation=1, input-error=2"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=config.LOG_LEVEL,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        report = run(args)
    except CntSetsError as e:
        report = Report.input_error(str(e), subject=args.command)
    except Exception as e:
        logger.exception("コマンド %s の実行に失敗しました", args.command)
        report = Report.input_error(f"コマンドの実行に失敗しました: {str(e)}", subject=args.command)

    print(render(report, args.json))
    return EXIT_CODES[report.status]


if __name__ == "__main__":
    sys.exit(main())
