# app/models/__init__.py
__all__ = [
    "census_run",
]
