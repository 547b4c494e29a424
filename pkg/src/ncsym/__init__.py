"""Noncommutative symmetric algebras of bimodules with symmetric duals:
graded pieces, species representations, tilting and the Beilinson checks."""

__version__ = "0.1.0"

from .fields import ExtensionField, base_field, field_make  # noqa: E402
from .linalg import PrimeField, prime_field  # noqa: E402
from .bimodule import Bimodule, DualTower, make_symmetric_duals  # noqa: E402
from .algebra import IndexedAlgebra, VerificationReport  # noqa: E402
from .species import DerivedObject, SpeciesModule, SpeciesRing, derived_hom, hom_space  # noqa: E402
from .tilting import Tilting  # noqa: E402
from .instances import InstanceConfig, parse_config, preset  # noqa: E402

__all__ = ["ExtensionField", "base_field", "field_make", "PrimeField", "prime_field", "Bimodule", "DualTower",
           "make_symmetric_duals", "IndexedAlgebra", "VerificationReport", "DerivedObject", "SpeciesModule",
           "SpeciesRing", "derived_hom", "hom_space", "Tilting", "InstanceConfig", "parse_config", "preset"]
