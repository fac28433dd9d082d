"""
config.py - framelab configuration
JSON-backed settings for quadrature, estimation and runtime behaviour
"""
import json
import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


class ConfigManager:
    """
    Centralized configuration manager.
    One JSON file per concern under the config directory, each backed by defaults.
    """

    def __init__(self, config_dir: str = None, verbose: bool = False):
        """
        Initialize ConfigManager.

        Args:
            config_dir: Directory containing configuration files
            verbose: Log every file loaded
        """
        self.verbose = verbose

        if config_dir is None:
            package_dir = Path(__file__).resolve().parent.parent
            self.config_dir = package_dir / "config"
        else:
            self.config_dir = Path(config_dir)

        if self.verbose:
            logger.info(f"Config directory: {self.config_dir.absolute()}")

        self._configs: Dict[str, Dict[str, Any]] = {}
        self._load_all_configs()

    def _load_config(self, filename: str, default: Optional[Dict] = None) -> Dict:
        """Load a JSON configuration file, layered over its defaults."""
        default = default or {}
        filepath = self.config_dir / filename

        if not filepath.exists():
            logger.warning(f"{filename} not found in {self.config_dir}, using defaults")
            return _deep_merge(default, {})

        try:
            with open(filepath, "r", encoding="utf-8") as f:
                loaded = json.load(f)
            if self.verbose:
                logger.info(f"Loaded {filename}")
            return _deep_merge(default, loaded)
        except json.JSONDecodeError as e:
            logger.error(f"Error parsing {filename}: {e}")
        except OSError as e:
            logger.error(f"Error loading {filename}: {e}")
        return _deep_merge(default, {})

    def _save_config(self, filename: str, config: Dict) -> None:
        """Save configuration to JSON file."""
        filepath = self.config_dir / filename
        try:
            with open(filepath, "w", encoding="utf-8") as f:
                json.dump(config, f, indent=2)
            if self.verbose:
                logger.info(f"Saved {filename}")
        except OSError as e:
            logger.error(f"Error saving {filename}: {e}")

    def _load_all_configs(self) -> None:
        """Load all configuration files with defaults."""
        self._configs["config"] = self._load_config("config.json", CONFIG_DEFAULTS)
        self._configs["numerics"] = self._load_config("numerics.json", NUMERICS_DEFAULTS)
        self._configs["estimation"] = self._load_config("estimation.json", ESTIMATION_DEFAULTS)

    def save_defaults(self) -> None:
        """Write the current settings back to the config directory."""
        self.config_dir.mkdir(parents=True, exist_ok=True)
        for name, values in self._configs.items():
            self._save_config(f"{name}.json", values)

    # Application
    def get_app_name(self) -> str:
        return self._configs["config"].get("app_name", "framelab")

    def get_version(self) -> str:
        return self._configs["config"].get("version", "1.0.0")

    def get_logging_level(self) -> str:
        return self._configs["config"].get("logging", {}).get("level", "INFO")

    def get_logging_format(self) -> str:
        return self._configs["config"].get("logging", {}).get(
            "format", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )

    def configure_logging(self, verbose: bool = False) -> None:
        """Apply the logging section (DEBUG when verbose)."""
        level = logging.DEBUG if verbose else getattr(logging, self.get_logging_level(), 20)
        logging.basicConfig(level=level, format=self.get_logging_format())

    def get_threads_env_name(self) -> str:
        return self._configs["config"].get("threads_env", "FRAMELAB_THREADS")

    def get_max_workers(self) -> int:
        """
        Get the worker cap from the threads environment variable.

        Returns:
            Number of workers (1 when unset or invalid)
        """
        raw = os.getenv(self.get_threads_env_name(), "").strip()
        if not raw:
            return 1
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning(f"Ignoring invalid {self.get_threads_env_name()}={raw!r}")
            return 1

    def get_csv_float_format(self) -> str:
        return self._configs["config"].get("output", {}).get("csv_float_format", "%.17g")

    def get_json_indent(self) -> int:
        return self._configs["config"].get("output", {}).get("json_indent", 2)

    # Numerics
    def get_panels_per_unit(self) -> int:
        return self._configs["numerics"].get("quadrature", {}).get("panels_per_unit", 64)

    def get_nodes_per_panel(self) -> int:
        return self._configs["numerics"].get("quadrature", {}).get("nodes_per_panel", 8)

    def get_merge_tolerance(self) -> float:
        return self._configs["numerics"].get("atom_merge_tolerance", 1e-12)

    def get_tail_tolerance(self) -> float:
        return self._configs["numerics"].get("self_similar", {}).get("tail_tolerance", 1e-10)

    def get_max_depth(self) -> int:
        return self._configs["numerics"].get("self_similar", {}).get("max_depth", 200)

    def get_sup_grid_points(self) -> int:
        return self._configs["numerics"].get("sup_norm", {}).get("points_per_axis", 2048)

    def get_sup_grid_cap(self) -> int:
        return self._configs["numerics"].get("sup_norm", {}).get("max_total_points", 4194304)

    def get_min_norm(self) -> float:
        return self._configs["numerics"].get("min_norm", 1e-12)

    def get_batch_budget(self) -> int:
        return self._configs["numerics"].get("batch_budget", 4000000)

    # Estimation
    def get_random_starts(self) -> int:
        return self._configs["estimation"].get("random_starts", 200)

    def get_refine_steps(self) -> int:
        return self._configs["estimation"].get("refine_steps", 50)

    def get_initial_step(self) -> float:
        return self._configs["estimation"].get("initial_step", 0.25)

    def get_step_decay(self) -> float:
        return self._configs["estimation"].get("step_decay", 0.5)

    def get_trig_window(self) -> int:
        return self._configs["estimation"].get("trig_window", 32)

    def get_trig_terms(self) -> int:
        return self._configs["estimation"].get("trig_terms", 8)

    def get_modulation_values(self) -> List[float]:
        return self._configs["estimation"].get("modulation_values", [1.0, 10.0, 100.0])

    def get_lebesgue_window(self) -> float:
        return self._configs["estimation"].get("lebesgue_window", 64.0)

    def get_sup_window(self) -> float:
        return self._configs["estimation"].get("sup_window", 64.0)

    def get_ball_search_radius(self) -> float:
        return self._configs["estimation"].get("ball_search_radius", 1.0)

    def get_ball_probes(self) -> int:
        return self._configs["estimation"].get("ball_probes", 257)

    def print_summary(self) -> None:
        """Print configuration summary."""
        print("\n" + "=" * 70)
        print(f"🔧 {self.get_app_name()} {self.get_version()} - Configuration Summary")
        print("=" * 70)

        print("\n📐 Quadrature:")
        print(f"  Panels per unit length: {self.get_panels_per_unit()}")
        print(f"  Nodes per panel: {self.get_nodes_per_panel()}")
        print(f"  Atom merge tolerance: {self.get_merge_tolerance():g}")
        print(f"  Self-similar tail tolerance: {self.get_tail_tolerance():g}")

        print("\n🎯 Estimation:")
        print(f"  Random starts: {self.get_random_starts()}")
        print(f"  Refine steps: {self.get_refine_steps()}")
        print(f"  Step: {self.get_initial_step()} (decay x{self.get_step_decay()})")
        print(f"  Trig window: [-{self.get_trig_window()}, {self.get_trig_window()}]")

        print("\n⚙️  Runtime:")
        print(f"  Workers: {self.get_max_workers()} (${self.get_threads_env_name()})")
        print(f"  Logging: {self.get_logging_level()}")
        print("=" * 70 + "\n")


CONFIG_DEFAULTS: Dict[str, Any] = {
    "app_name": "framelab",
    "version": "1.0.0",
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    },
    "threads_env": "FRAMELAB_THREADS",
    "output": {"csv_float_format": "%.17g", "json_indent": 2},
}

NUMERICS_DEFAULTS: Dict[str, Any] = {
    "quadrature": {"panels_per_unit": 64, "nodes_per_panel": 8},
    "atom_merge_tolerance": 1e-12,
    "self_similar": {"tail_tolerance": 1e-10, "max_depth": 200},
    "sup_norm": {"points_per_axis": 2048, "max_total_points": 4194304},
    "min_norm": 1e-12,
    "batch_budget": 4000000,
}

ESTIMATION_DEFAULTS: Dict[str, Any] = {
    "random_starts": 200,
    "refine_steps": 50,
    "initial_step": 0.25,
    "step_decay": 0.5,
    "trig_window": 32,
    "trig_terms": 8,
    "modulation_values": [1.0, 10.0, 100.0],
    "lebesgue_window": 64.0,
    "sup_window": 64.0,
    "ball_search_radius": 1.0,
    "ball_probes": 257,
}


def _deep_merge(base: Dict, override: Dict) -> Dict:
    merged = json.loads(json.dumps(base))
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


@lru_cache(maxsize=1)
def get_config() -> ConfigManager:
    """Process-wide default configuration."""
    return ConfigManager()


if __name__ == "__main__":
    get_config().print_summary()
