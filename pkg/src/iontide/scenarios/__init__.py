"""Config-driven runs of the transport, switching and squeezing experiments."""

from .config import SCENARIO_NAMES, ConfigError, ScenarioConfig, build_config, load_config
from .csvio import Table, read_table, write_table
from .report import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, Check, RunReport
from .runners import DESCRIPTIONS, RUNNERS, ScenarioResult, run_scenario
