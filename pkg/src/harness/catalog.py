"""The property catalog. Importing this module registers every check."""

from typing import List, Tuple

from src.harness import commutator_checks, norm_checks, operator_checks, young_checks  # noqa: F401
from src.harness.base import PROPERTY_REGISTRY

# Report assembly follows this order
CATALOG = (
    "HOLDER_BALL",
    "CHI_NORM",
    "MEAN_BOUND",
    "INVERSE_SANDWICH",
    "COMPL_PRODUCT",
    "GOODLAMBDA",
    "DYADIC_MODULAR",
    "SHARP_LOWER",
    "SHARP_EQUIV",
    "SHARP_MORREY",
    "BRIDGE",
    "JN_EQUIV",
    "CHAIN",
    "OSC_GROWTH",
    "TAIL_CZ",
    "TAIL_IR",
    "TAIL_IR_PSI",
    "MR_POINTWISE",
    "MR_BOUNDED",
    "COMM_PW_CZ",
    "COMM_PW_IR",
    "MEAN_VANISH",
    "COMM_BOUND_CZ",
    "COMM_BOUND_IR",
    "COMM_BOUND_CZ_DEC",
    "COMM_BOUND_IR_DEC",
    "NECESSITY_RATIO",
    "TAIL_CZ_PSI",
    "HOLDER_OM",
    "MEAN_P_BOUND",
    "THETA_IDENTITY",
    "MAXIMAL_MODULAR",
    "M_BOUNDED",
    "IR_BOUNDED",
    "TWO_BALL",
    "L2_BOUND",
)

if set(CATALOG) != set(PROPERTY_REGISTRY):
    raise RuntimeError(
        f"Property catalog out of sync with the registry: {sorted(set(CATALOG) ^ set(PROPERTY_REGISTRY))}"
    )


def catalog_entries() -> List[Tuple[str, str]]:
    """(name, description) in catalog order."""
    return [(name, PROPERTY_REGISTRY[name].description) for name in CATALOG]


def validate_names(names: List[str]) -> None:
    unknown = [name for name in names if name not in PROPERTY_REGISTRY]
    if unknown:
        raise ValueError(f"Unknown property: {', '.join(unknown)}")


def in_catalog_order(names: List[str]) -> List[str]:
    return sorted(dict.fromkeys(names), key=CATALOG.index)
