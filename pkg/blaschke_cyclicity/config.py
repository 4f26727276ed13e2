import logging
from pathlib import Path


class CyclicityPaths:
    """Class to store the paths to the package, fixture and output folders."""

    project = Path(__file__).resolve().parent.parent
    scripts = project / "blaschke_cyclicity"
    fixtures = scripts / "fixtures"
    output = project / "output"


logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")

logger = logging.getLogger("blaschke_cyclicity")
