"""Machine-readable run reports for the command line.

Every check carries a stable claim identifier naming the mathematical
statement it verifies, a pass/fail/inconclusive status and an optional
witness.  Inconclusive is never counted as a pass.
"""

from __future__ import annotations

import hashlib
import json


class RunReport:
    def __init__(self, command: str, inputs=None):
        self.command = command
        payload = json.dumps(inputs, sort_keys=True, default=str) if inputs else ""
        self.inputs_digest = hashlib.sha256(
            (command + "\x00" + payload).encode()
        ).hexdigest()[:16]
        self.checks = []

    def add(self, name: str, claim: str, status, witness=None):
        if isinstance(status, bool):
            status = "pass" if status else "fail"
        if status not in ("pass", "fail", "inconclusive"):
            raise ValueError(f"bad status {status!r}")
        self.checks.append(
            {"name": name, "claim": claim, "status": status, "witness": witness}
        )

    @property
    def ok(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "inputs_digest": self.inputs_digest,
                "ok": self.ok,
                "checks": self.checks,
            },
            sort_keys=True,
            default=str,
        )

    def pretty(self) -> str:
        lines = [f"# {self.command}  [{self.inputs_digest}]"]
        for c in self.checks:
            mark = {"pass": "ok", "fail": "FAIL", "inconclusive": "?"}[c["status"]]
            line = f"  [{mark:4}] {c['name']}  ({c['claim']})"
            if c["witness"] is not None and c["status"] != "pass":
                line += f"\n         witness: {c['witness']}"
            lines.append(line)
        lines.append("PASS" if self.ok else "FAIL")
        return "\n".join(lines)
