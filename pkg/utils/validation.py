import math
import re
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd


class InputValidator:
    """Validates CSV columns and output paths before they reach the models"""

    # Longest cell text echoed back in an error message
    MAX_CELL_ECHO = 40

    def check_required_columns(self, columns: Iterable[str], required: List[str]) -> Tuple[bool, Optional[str]]:
        """
        Checks that a CSV header carries every required column

        Args:
            columns: Header names found in the file
            required: Names the loader needs

        Returns:
            Tuple of (is_valid, error_message)
        """
        present = {c.strip() for c in columns}
        missing = [name for name in required if name not in present]
        if missing:
            return False, f"missing required column(s): {', '.join(missing)}"
        return True, None

    def check_numeric_column(self, cells: pd.Series, name: str) -> Tuple[bool, Optional[str], Optional[int]]:
        """
        Checks that every cell of a column parses to a finite number

        Args:
            cells: Raw column as read from the CSV (strings)
            name: Column name for the message

        Returns:
            Tuple of (is_valid, error_message, 1-based data row of the first bad cell)
        """
        numeric = pd.to_numeric(cells, errors="coerce")
        for position, (raw, value) in enumerate(zip(cells, numeric)):
            row = position + 1
            if value is None or (isinstance(value, float) and math.isnan(value)):
                shown = self.sanitize_for_log("" if raw is None or raw != raw else str(raw), self.MAX_CELL_ECHO)
                return False, f"non-numeric value '{shown}' in column {name}, row {row}", row
            if not np.isfinite(value):
                return False, f"non-finite value in column {name}, row {row}", row
        return True, None, None

    def check_output_path(self, path: Path, force: bool) -> Tuple[bool, Optional[str]]:
        """
        Checks that an output file may be written

        Args:
            path: Target file
            force: Overwrite an existing file

        Returns:
            Tuple of (is_valid, error_message)
        """
        if path.exists() and path.is_dir():
            return False, f"output path {path} is a directory"
        if path.exists() and not force:
            return False, f"output file {path} already exists (use --force to overwrite)"
        if not path.parent.exists():
            return False, f"output directory {path.parent} does not exist"
        return True, None

    def sanitize_for_log(self, text: str, max_length: int = 100) -> str:
        """
        Strips control characters and truncates text for log and error messages

        Args:
            text: Text to sanitize
            max_length: Maximum length of sanitized output

        Returns:
            Sanitized text
        """
        sanitized = re.sub(r'[\x00-\x1f\x7f-\x9f]', '', text)
        if len(sanitized) > max_length:
            sanitized = sanitized[:max_length] + "..."
        return sanitized
