__version__ = "0.1.0"

# Easy access to the main objects

from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.cyclicity import decide, krylov_oracle
from blaschke_cyclicity.core.hardy import HardyFunction
from blaschke_cyclicity.core.lacunary import LacunarySpec
from blaschke_cyclicity.core.model_space import ModelSpaceBasis
from blaschke_cyclicity.core.policy import NumericPolicy
from blaschke_cyclicity.core.toeplitz import decompose


def set_output_path(path):
    """Set the folder where the command line writes its reports."""
    from pathlib import Path
    from blaschke_cyclicity.config import CyclicityPaths

    CyclicityPaths.output = Path(path).resolve()


__all__ = [
    "set_output_path",
    "BlaschkeProduct",
    "HardyFunction",
    "LacunarySpec",
    "ModelSpaceBasis",
    "NumericPolicy",
    "decide",
    "decompose",
    "krylov_oracle",
]
