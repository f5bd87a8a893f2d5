"""Single source of the tool version string echoed into CSV metadata."""

VERSION = "0.1.0"
