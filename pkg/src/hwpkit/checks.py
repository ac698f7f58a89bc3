"""Tiny verdict type shared by the verifiers: truthy on pass, carries a reason."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Check:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    @staticmethod
    def passed() -> "Check":
        return Check(True)

    @staticmethod
    def failed(reason: str) -> "Check":
        return Check(False, reason)
