#!/usr/bin/env python3
"""
Experiment defaults management
実験デフォルト設定の管理
"""

import json
import logging
import os
from typing import Any, Callable, Dict, Optional, Tuple

from src.sdc_classes import ExperimentConfig
from src.sdc_errors import ArgumentError

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "SDC_SEED"

BUILTIN_DEFAULTS: Dict[str, Any] = {
    "trials": 2000,
    "epsilon": 0.5,
    "d": 2,
    "d_a": 16,
    "d_a1": 2,
    "ensemble_size": 64,
    "l": 10,
    "seed": 0,
    "state": "product",
    "output": "pretty",
    "workers": 1,
    "results_dir": "results",
}


def _convert(key: str, value: Any, convert: Callable[[Any], Any]) -> Any:
    """Coerce a config value, naming the key when it has the wrong type."""
    if value is None or isinstance(value, (bool, list, dict)):
        raise ArgumentError(f"config value {key}={value!r} is not a valid {convert.__name__}")
    try:
        return convert(value)
    except (TypeError, ValueError):
        raise ArgumentError(f"config value {key}={value!r} is not a valid {convert.__name__}")


class ConfigManager:
    def __init__(self, config_file: str = os.path.join(os.path.dirname(__file__), "experiment_defaults.json")):
        self.config_file = config_file
        self.defaults = dict(BUILTIN_DEFAULTS)
        self.defaults.update(self._load_defaults())

    def _load_defaults(self) -> Dict[str, Any]:
        """デフォルト設定を読み込む"""
        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError:
            logger.warning("設定ファイル %s が見つかりません。組み込みの既定値を使用します。", self.config_file)
            return {}
        except OSError as e:
            logger.warning("設定ファイル %s を読み込めません: %s", self.config_file, e)
            return {}
        except ValueError as e:
            logger.warning("設定ファイルの形式が正しくありません: %s", e)
            return {}
        defaults = data.get("defaults", {}) if isinstance(data, dict) else None
        if not isinstance(defaults, dict):
            logger.warning("設定ファイル %s の defaults がオブジェクトではありません。", self.config_file)
            return {}
        unknown = sorted(set(defaults) - set(BUILTIN_DEFAULTS))
        if unknown:
            logger.warning("未知の設定キーを無視します: %s", ", ".join(unknown))
        return {k: v for k, v in defaults.items() if k in BUILTIN_DEFAULTS}

    def get(self, key: str) -> Any:
        return self.defaults[key]

    def resolve_seed(self, flag_seed: Optional[int]) -> Tuple[int, str]:
        """Seed and where it came from: --seed, then SDC_SEED, then the defaults file."""
        if flag_seed is not None:
            return int(flag_seed), "flag"
        env_value = os.environ.get(SEED_ENV_VAR)
        if env_value is not None and env_value.strip():
            try:
                return int(env_value.strip(), 0), "env"
            except ValueError:
                raise ArgumentError(f"{SEED_ENV_VAR}={env_value!r} is not an integer")
        return _convert("seed", self.defaults["seed"], int), "default"

    def build_config(self, command: str, overrides: Dict[str, Any]) -> ExperimentConfig:
        """ExperimentConfig from CLI overrides; None means "use the default"."""
        values = {k: v for k, v in overrides.items() if v is not None}
        seed, source = self.resolve_seed(values.pop("seed", None))

        def pick(key: str, convert: Callable[[Any], Any] = int) -> Any:
            return _convert(key, values.get(key, self.defaults[key]), convert)

        config = ExperimentConfig(
            command=command,
            d=pick("d"),
            d_a=pick("d_a"),
            d_a1=pick("d_a1"),
            epsilon=pick("epsilon", float),
            trials=pick("trials"),
            ensemble_size=pick("ensemble_size"),
            seed=seed,
            seed_source=source,
            state_spec=pick("state", str),
            output=pick("output", str),
            l=pick("l"),
            workers=pick("workers"),
            save=bool(values.get("save", False)),
            results_dir=pick("results_dir", str),
        )
        logger.debug("resolved config %s", config)
        return config
