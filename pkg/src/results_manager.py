#!/usr/bin/env python3
"""
Report serialization and the results/ directory
"""

import csv
import io
import json
import logging
import math
import os
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from src.sdc_classes import ExperimentReport
from src.sdc_errors import ArgumentError, InputError, ReportWriteError

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12
EXTENSIONS = {"json": "json", "csv": "csv", "pretty": "txt"}


def canonical_value(value: Any) -> Any:
    """Plain JSON-ready value; floats rounded to 12 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        x = float(f"{x:.{SIGNIFICANT_DIGITS}g}")
        return 0.0 if x == 0.0 else x
    if isinstance(value, dict):
        return {str(k): canonical_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [canonical_value(v) for v in value]
    return value


def to_canonical_json(report: ExperimentReport) -> str:
    data = canonical_value(report.to_json_dict())
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _csv_cell(value: Any) -> str:
    value = canonical_value(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return str(value)


def to_csv(report: ExperimentReport) -> str:
    if not report.columns:
        raise ArgumentError(f"report '{report.command}' has no CSV columns")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_csv_cell(row.get(column)) for column in report.columns])
    return buffer.getvalue()


def _pretty_value(value: Any) -> str:
    value = canonical_value(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, dict):
        return ", ".join(f"{k}={_pretty_value(v)}" for k, v in sorted(value.items()))
    return str(value)


def to_pretty(report: ExperimentReport) -> str:
    """Human-oriented rendering; the layout is not stable."""
    lines = ["=" * 50, f"🔬 Superdense coding experiment: {report.command}", "=" * 50]
    lines.append(f"seed: {report.seed}")
    lines.append("")
    lines.append("📋 設定 (config)")
    for key in sorted(report.config):
        if key != "seed":
            lines.append(f"  {key}: {_pretty_value(report.config[key])}")
    lines.append("")
    lines.append("📊 結果 (results)")
    for key in sorted(report.results):
        lines.append(f"  {key}: {_pretty_value(report.results[key])}")
    if report.rows and report.columns:
        lines.append("")
        lines.append("-" * 50)
        widths = [max(len(c), *(len(_pretty_value(r.get(c))) for r in report.rows)) for c in report.columns]
        lines.append("  ".join(c.rjust(w) for c, w in zip(report.columns, widths)))
        for row in report.rows:
            lines.append("  ".join(_pretty_value(row.get(c)).rjust(w) for c, w in zip(report.columns, widths)))
    if report.notes:
        lines.append("")
        for note in report.notes:
            lines.append(f"📝 {note}")
    lines.append("=" * 50)
    return "\n".join(lines) + "\n"


def write_report(report: ExperimentReport, fmt: str) -> str:
    """Serialize ``report`` as json, csv or pretty text."""
    if fmt == "json":
        return to_canonical_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "pretty":
        return to_pretty(report)
    raise ArgumentError(f"unknown output format {fmt!r}")


@dataclass
class ReportSummary:
    """保存済みレポートの要約情報"""
    timestamp: int
    filename: str
    command: str
    seed: Optional[int]
    file_path: str


class ResultsManager:
    def __init__(self, results_dir: str = "results"):
        self.results_dir = results_dir

    def ensure_results_dir(self):
        """resultsディレクトリの存在確認と作成"""
        try:
            os.makedirs(self.results_dir, exist_ok=True)
        except OSError as e:
            raise ReportWriteError(f"cannot create results directory {self.results_dir}: {e}")

    def report_filename(self, report: ExperimentReport, fmt: str) -> str:
        return f"{report.command}_seed{report.seed}.{EXTENSIONS[fmt]}"

    def save_report(self, report: ExperimentReport, fmt: str) -> str:
        """Write ``report`` under results_dir; returns the path."""
        self.ensure_results_dir()
        path = os.path.join(self.results_dir, self.report_filename(report, fmt))
        text = write_report(report, fmt)
        try:
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as e:
            raise ReportWriteError(f"cannot write report to {path}: {e}")
        logger.info("report saved to %s", path)
        return path

    def get_all_reports(self) -> List[ReportSummary]:
        """保存済みJSONレポートの一覧（新しい順）"""
        if not os.path.isdir(self.results_dir):
            return []
        reports = []
        for filename in os.listdir(self.results_dir):
            match = re.fullmatch(r"(.+)_seed(-?\d+)\.json", filename)
            if not match:
                continue
            file_path = os.path.join(self.results_dir, filename)
            reports.append(ReportSummary(
                timestamp=int(os.path.getmtime(file_path)),
                filename=filename,
                command=match.group(1),
                seed=int(match.group(2)),
                file_path=file_path,
            ))
        reports.sort(key=lambda r: (r.timestamp, r.filename), reverse=True)
        return reports

    def get_report_details(self, filename: str) -> Dict[str, Any]:
        """Load a saved JSON report back."""
        file_path = os.path.join(self.results_dir, filename)
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                return json.load(f)
        except FileNotFoundError:
            raise InputError(f"report {file_path} not found", file_path)
        except json.JSONDecodeError as e:
            raise InputError(f"report {file_path} is not valid JSON: {e}", file_path)

    def print_summary(self):
        """保存済みレポートの要約を表示"""
        reports = self.get_all_reports()
        print("\n📊 Superdense coding experiments - Results Summary")
        print("=" * 60)
        print(f"総レポート数: {len(reports)}")
        if reports:
            counts: Dict[str, int] = {}
            for r in reports:
                counts[r.command] = counts.get(r.command, 0) + 1
            print("\nコマンド別統計:")
            for command, count in sorted(counts.items(), key=lambda x: x[1], reverse=True):
                print(f"  {command}: {count}件")
            print("\n最近のレポート (最新5件):")
            for i, r in enumerate(reports[:5], 1):
                print(f"  {i}. {r.command} (seed {r.seed}) - {r.filename}")
        print("=" * 60)
