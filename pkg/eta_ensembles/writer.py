from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable

logger = logging.getLogger(__name__)


class FileWriter:
    """Writes rendered result files to disk.

    Content goes to a sibling ``.tmp`` file first and is moved into place, so
    a crashed run never leaves a half-written result under the final name.
    """

    def write(self, target: Path, content: str) -> None:
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp_path = target.with_suffix(target.suffix + ".tmp")
        try:
            tmp_path.write_text(content, encoding="utf-8")
            tmp_path.replace(target)
        except OSError:
            tmp_path.unlink(missing_ok=True)
            raise
        logger.info("Wrote %s", target)

    def remove(self, targets: Iterable[Path]) -> None:
        """Delete result files and leftover temporaries of a failed run."""
        for target in targets:
            for path in (target, target.with_suffix(target.suffix + ".tmp")):
                if path.exists():
                    path.unlink()
                    logger.info("Removed partial output %s", path)
