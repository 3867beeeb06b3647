#!/usr/bin/env python3
"""
保存済みレポートの一覧表示
"""

import argparse
import os
import sys
import inspect

# Add the project root to the Python path
current_dir = os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe())))
project_root = os.path.dirname(current_dir)
sys.path.insert(0, project_root)

from src.results_manager import ResultsManager


def main():
    parser = argparse.ArgumentParser(description="Saved experiment reports")
    parser.add_argument("--results-dir", default="results", help="レポートのディレクトリ")
    parser.add_argument("--show", help="表示するレポートのファイル名")
    args = parser.parse_args()

    manager = ResultsManager(args.results_dir)
    if args.show:
        details = manager.get_report_details(args.show)
        print(f"\n📋 {args.show}")
        print("=" * 60)
        for key, value in sorted(details.get("results", {}).items()):
            print(f"  {key}: {value}")
        print("=" * 60)
        return
    manager.print_summary()


if __name__ == "__main__":
    main()
