from ._native import abelianization, dulac, holonomy, report, resolve

__all__ = ["abelianization", "dulac", "holonomy", "report", "resolve"]
