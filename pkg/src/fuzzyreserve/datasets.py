"""Bundled example data."""

import hashlib
from importlib import resources

from .triangle import RunOffTriangle, parse_triangle

TAYLOR_ASHE_SHA256 = "a531ba0e004e4692c6c92b126399a14ebd9b834f7c5960ab89948f9558794737"


def taylor_ashe_path():
    return resources.files("fuzzyreserve").joinpath("data", "taylor_ashe.csv")


def load_taylor_ashe(verify: bool = True) -> RunOffTriangle:
    """Taylor & Ashe (1983) incremental triangle, k = 10."""
    raw = taylor_ashe_path().read_bytes()
    if verify and hashlib.sha256(raw).hexdigest() != TAYLOR_ASHE_SHA256:
        raise RuntimeError("taylor_ashe.csv does not match its recorded checksum")
    return parse_triangle(raw.decode())
