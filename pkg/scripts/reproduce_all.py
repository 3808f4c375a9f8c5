#!/usr/bin/env python3
"""
csqs-lab - reproduce every figure's data in one go

Development helper: runs without installing the package.
"""

import logging
import sys
from pathlib import Path

# Make the package importable from a source checkout
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from csqs_lab.core.config import ConfigManager, set_config_manager
from csqs_lab.core.exceptions import CsqsLabError
from csqs_lab.core.figures import reproduce


def main():
    """Write all panels under figures/ using config/config.yaml when present."""
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    log = logging.getLogger("reproduce_all")

    config_path = project_root / "config" / "config.yaml"
    if not config_path.exists():
        log.info(f"No config file at {config_path}, using defaults")
        config_path = None

    try:
        set_config_manager(ConfigManager(config_path))
        manifest = reproduce("all", project_root / "figures")
    except KeyboardInterrupt:
        log.info("Interrupted")
        sys.exit(130)
    except CsqsLabError as e:
        log.error(f"{type(e).__name__}: {e.message} {e.details}")
        sys.exit(e.exit_code)

    for entry in manifest:
        log.info(f"{entry.figure}{entry.panel}: {entry.path} ({entry.description})")


if __name__ == "__main__":
    main()
