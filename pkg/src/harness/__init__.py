from src.harness.catalog import CATALOG, catalog_entries
from src.harness.engine import exit_code, run_experiment, run_property

__all__ = ["CATALOG", "catalog_entries", "exit_code", "run_experiment", "run_property"]
