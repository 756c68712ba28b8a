"""Syntax checkers behind the compilation-accuracy metric.

The builtin checkers are deliberately shallow line-shape grammars; real
toolchain checking is delegated to external commands run on a temp file with a
mandatory timeout. A snippet failing a check scores 0; checker infrastructure
problems (missing binary, sandbox failure) raise CheckerError instead.
"""

from __future__ import annotations

import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import CheckerError, ConfigError

CHECKER_KINDS = ("builtin-assembly-subset", "builtin-python-like", "external-command")


@dataclass(frozen=True)
class CheckResult:
    accepted: bool
    diagnostic: str = ""


_LABEL = re.compile(r"[A-Za-z_.$][\w.$]*:")
_OPCODE = re.compile(r"[A-Za-z.][\w.]*$")

_PY_BLOCK_HEADS = frozenset(
    ("if", "elif", "else", "for", "while", "def", "class", "try", "except", "finally", "with")
)
_BRACKETS = {")": "(", "]": "[", "}": "{"}


def _check_assembly_line(line: str) -> str | None:
    """None when the line fits `label:`? `opcode (operand (, operand)*)?`."""
    line = line.split(";", 1)[0].strip()
    if not line:
        return None
    m = _LABEL.match(line)
    if m:
        line = line[m.end() :].strip()
        if not line:
            return None
    parts = line.split(None, 1)
    opcode = parts[0]
    if not _OPCODE.match(opcode):
        return f"bad opcode {opcode!r}"
    if len(parts) == 1:
        return None
    operands = parts[1]
    for operand in operands.split(","):
        if not operand.strip():
            return "empty operand"
    return None


def _check_python_like(snippet: str) -> str | None:
    """Bracket/quote balance plus colon endings on block-statement heads."""
    stack: list[str] = []
    quote: str | None = None
    escaped = False
    for ch in snippet:
        if quote is not None:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == quote:
                quote = None
            continue
        if ch in "'\"":
            quote = ch
        elif ch in "([{":
            stack.append(ch)
        elif ch in ")]}":
            if not stack or stack[-1] != _BRACKETS[ch]:
                return f"unbalanced {ch!r}"
            stack.pop()
    if quote is not None:
        return "unterminated string"
    if stack:
        return f"unclosed {stack[-1]!r}"
    for line in snippet.split("\n"):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        head = re.split(r"[^\w]", stripped, 1)[0]
        if head in _PY_BLOCK_HEADS and not stripped.endswith(":"):
            return f"{head!r} statement missing ':'"
    return None


@dataclass(frozen=True)
class SyntaxChecker:
    """A named syntax check: builtin grammar or an external command template.

    External commands get the snippet path substituted for `{file}`, run under
    `timeout` seconds, and accept the snippet iff they exit 0.
    """

    name: str
    kind: str
    command: str = ""
    timeout: float = 10.0
    suffix: str = ".txt"

    def __post_init__(self) -> None:
        if self.kind not in CHECKER_KINDS:
            raise ConfigError(f"unknown checker kind {self.kind!r}")
        if self.kind == "external-command":
            if not self.command or "{file}" not in self.command:
                raise ConfigError("external checker needs a command template with {file}")
            if not self.timeout or self.timeout <= 0:
                raise ConfigError("external checker needs a positive timeout")

    def check(self, snippet: str) -> CheckResult:
        if self.kind == "builtin-assembly-subset":
            for lineno, line in enumerate(snippet.split("\n"), 1):
                problem = _check_assembly_line(line)
                if problem:
                    return CheckResult(False, f"line {lineno}: {problem}")
            return CheckResult(True)
        if self.kind == "builtin-python-like":
            problem = _check_python_like(snippet)
            return CheckResult(problem is None, problem or "")
        return self._check_external(snippet)

    def _check_external(self, snippet: str) -> CheckResult:
        with tempfile.NamedTemporaryFile(
            "w", suffix=self.suffix, delete=False, encoding="utf-8"
        ) as fh:
            fh.write(snippet)
            path = Path(fh.name)
        try:
            argv = [part.format(file=str(path)) for part in shlex.split(self.command)]
            try:
                proc = subprocess.run(
                    argv,
                    stdout=subprocess.DEVNULL,
                    stderr=subprocess.PIPE,
                    timeout=self.timeout,
                )
            except subprocess.TimeoutExpired:
                return CheckResult(False, f"checker timed out after {self.timeout}s")
            except FileNotFoundError as exc:
                raise CheckerError(f"checker command not found: {argv[0]!r}") from exc
            except OSError as exc:
                raise CheckerError(f"checker failed to run: {exc}") from exc
            stderr = proc.stderr.decode("utf-8", "replace").strip()
            if proc.returncode == 0:
                return CheckResult(True, stderr)
            return CheckResult(False, stderr or f"exit status {proc.returncode}")
        finally:
            path.unlink(missing_ok=True)


ASSEMBLY_CHECKER = SyntaxChecker(name="assembly-subset", kind="builtin-assembly-subset")
PYTHON_LIKE_CHECKER = SyntaxChecker(name="python-like", kind="builtin-python-like")


def checker_for_language(selector: str, language: str) -> SyntaxChecker | None:
    """Resolve a checker selector: none | auto | assembly | python | cmd:<template>."""
    if selector == "none":
        return None
    if selector == "assembly":
        return ASSEMBLY_CHECKER
    if selector == "python":
        return PYTHON_LIKE_CHECKER
    if selector == "auto":
        return ASSEMBLY_CHECKER if language == "assembly" else PYTHON_LIKE_CHECKER
    if selector.startswith("cmd:"):
        return SyntaxChecker(name="external", kind="external-command", command=selector[4:])
    raise ConfigError(f"unknown checker selector {selector!r}")
