"""Run configuration: INI-style ``key = value`` text with section headers.

Example (the manufactured-solution convergence run)::

    [run]
    mode = verify

    [environment]
    alpha = 2
    q_re = 0.252252311
    q_im = -0.0135135138
    p_rule = q+1/2
    gamma = one-plus-y
    bottom = exp
    R = 1

    [grid]
    J_list = 40, 80, 160, 320, 640
    k_rule = h

Run manifests reuse the same sections plus ``[manifest]``, ``[timing]`` and
``[invertibility]``, so a manifest can be read back with :meth:`RunConfig.from_text`.
"""

import configparser
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .errors import ConfigError

MODES = ("verify", "conserve", "tl")
GAMMA_PRESETS = ("zero", "one-plus-y")
BOTTOM_PARAMS = {
    "exp": {"s0": 1.0, "rate": 1.0},
    "linear": {"s0": 2.0, "slope": 1.0},
    "cos": {"mean": 2.0, "amplitude": 1.0, "period": 1.0},
    "csv": {},
}
REPORT_SECTIONS = ("manifest", "timing", "invertibility")


@dataclass
class EnvironmentBlock:
    q: complex
    R: float
    alpha: Optional[float] = None
    frequency: Optional[float] = None
    c0: Optional[float] = None
    p_rule: str = "q+1/2"
    p: Optional[complex] = None
    gamma: str = "zero"
    bottom: str = "exp"
    bottom_params: dict = field(default_factory=dict)
    bottom_csv: Optional[str] = None


@dataclass
class GridBlock:
    J: Optional[int] = None
    J_list: Optional[tuple] = None
    k: Optional[float] = None
    N: Optional[int] = None
    k_rule: Optional[str] = None


@dataclass
class SourceBlock:
    frequency: float
    c0: float
    z_s: float
    M: int
    starter: str = "modes"


@dataclass
class ReceiverBlock:
    z_rec: float
    stride: int = 1


@dataclass
class RunConfig:
    mode: str
    environment: EnvironmentBlock
    grid: GridBlock
    source: Optional[SourceBlock] = None
    receiver: Optional[ReceiverBlock] = None
    initial: str = "cubic"
    solution: str = "reference"
    out_dir: str = "."
    seed: int = 0
    workers: int = 1

    @classmethod
    def from_text(cls, text):
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"unreadable config: {exc}") from exc
        return _from_parser(parser)

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_text(fh.read())

    def to_text(self):
        """Canonical text form; ``from_text(to_text())`` returns an equal config."""
        sections = {
            "run": {
                "mode": self.mode,
                "seed": self.seed,
                "workers": self.workers,
                "initial": self.initial,
                "solution": self.solution,
            }
        }
        env = self.environment
        e = {"q_re": env.q.real, "q_im": env.q.imag, "R": env.R, "p_rule": env.p_rule}
        for key in ("alpha", "frequency", "c0"):
            if getattr(env, key) is not None:
                e[key] = getattr(env, key)
        if env.p is not None:
            e["p_re"], e["p_im"] = env.p.real, env.p.imag
        e["gamma"] = env.gamma
        e["bottom"] = env.bottom
        for key, value in sorted(env.bottom_params.items()):
            e[f"bottom_{key}"] = value
        if env.bottom_csv is not None:
            e["bottom_csv"] = env.bottom_csv
        sections["environment"] = e
        g = {}
        for key, value in asdict(self.grid).items():
            if value is None:
                continue
            g[key] = ", ".join(str(j) for j in value) if key == "J_list" else value
        sections["grid"] = g
        if self.source is not None:
            sections["source"] = asdict(self.source)
        if self.receiver is not None:
            sections["receiver"] = asdict(self.receiver)
        sections["output"] = {"dir": self.out_dir}
        return render_sections(sections)


def render_sections(sections):
    lines = []
    for name, items in sections.items():
        lines.append(f"[{name}]")
        for key, value in items.items():
            lines.append(f"{key} = {_render(value)}")
        lines.append("")
    return "\n".join(lines) + "\n"


def _render(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _num(section, key, kind=float, required=True, default=None):
    raw = section.get(key) if section is not None else None
    if raw is None or raw.strip() == "":
        if required:
            name = section.name if section is not None else "?"
            raise ConfigError(f"missing [{name}] {key}")
        return default
    try:
        value = kind(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not a valid {kind.__name__}") from exc
    if not math.isfinite(value):
        raise ConfigError(f"[{section.name}] {key} must be finite")
    return value


def _from_parser(parser):
    known = {"run", "environment", "grid", "source", "receiver", "output", *REPORT_SECTIONS}
    unknown = set(parser.sections()) - known
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    for name in ("run", "environment", "grid"):
        if not parser.has_section(name):
            raise ConfigError(f"missing [{name}] section")
    run = parser["run"]
    mode = run.get("mode", "").strip()
    if mode not in MODES:
        raise ConfigError(f"[run] mode must be one of {', '.join(MODES)}, got {mode!r}")

    env_sec = parser["environment"]
    q = complex(_num(env_sec, "q_re"), _num(env_sec, "q_im", required=False, default=0.0))
    p_rule = env_sec.get("p_rule", "q+1/2").strip()
    p = None
    if p_rule == "explicit":
        p = complex(_num(env_sec, "p_re"), _num(env_sec, "p_im", required=False, default=0.0))
    elif p_rule != "q+1/2":
        raise ConfigError(f"[environment] p_rule must be 'q+1/2' or 'explicit', got {p_rule!r}")
    gamma = env_sec.get("gamma", "zero").strip()
    if gamma not in GAMMA_PRESETS and not gamma.startswith("csv:"):
        raise ConfigError(f"[environment] gamma must be zero, one-plus-y or csv:<path>, got {gamma!r}")
    bottom = env_sec.get("bottom", "exp").strip()
    if bottom not in BOTTOM_PARAMS:
        raise ConfigError(f"[environment] bottom must be one of {', '.join(BOTTOM_PARAMS)}")
    params = {
        key: _num(env_sec, f"bottom_{key}", required=False, default=default)
        for key, default in BOTTOM_PARAMS[bottom].items()
    }
    bottom_csv = env_sec.get("bottom_csv")
    if bottom == "csv" and not bottom_csv:
        raise ConfigError("[environment] bottom = csv needs bottom_csv")
    environment = EnvironmentBlock(
        q=q,
        R=_num(env_sec, "R"),
        alpha=_num(env_sec, "alpha", required=False),
        frequency=_num(env_sec, "frequency", required=False),
        c0=_num(env_sec, "c0", required=False),
        p_rule=p_rule,
        p=p,
        gamma=gamma,
        bottom=bottom,
        bottom_params=params,
        bottom_csv=bottom_csv.strip() if bottom_csv else None,
    )
    if environment.R < 0:
        raise ConfigError("[environment] R must be non-negative")

    grid_sec = parser["grid"]
    J_list = grid_sec.get("J_list")
    if J_list:
        try:
            J_list = tuple(int(x) for x in J_list.replace(",", " ").split())
        except ValueError as exc:
            raise ConfigError(f"[grid] J_list = {J_list!r} is not a list of integers") from exc
    grid = GridBlock(
        J=_num(grid_sec, "J", int, required=False),
        J_list=J_list or None,
        k=_num(grid_sec, "k", required=False),
        N=_num(grid_sec, "N", int, required=False),
        k_rule=(grid_sec.get("k_rule") or "").strip() or None,
    )
    if grid.k_rule not in (None, "h"):
        raise ConfigError("[grid] k_rule must be 'h' (k = h = 1/J)")

    source = receiver = None
    if parser.has_section("source"):
        s = parser["source"]
        source = SourceBlock(
            frequency=_num(s, "frequency"),
            c0=_num(s, "c0"),
            z_s=_num(s, "z_s"),
            M=_num(s, "M", int),
            starter=s.get("starter", "modes").strip(),
        )
    if parser.has_section("receiver"):
        s = parser["receiver"]
        receiver = ReceiverBlock(z_rec=_num(s, "z_rec"), stride=_num(s, "stride", int, required=False, default=1))

    out_dir = parser.get("output", "dir", fallback=".").strip() if parser.has_section("output") else "."
    cfg = RunConfig(
        mode=mode,
        environment=environment,
        grid=grid,
        source=source,
        receiver=receiver,
        initial=run.get("initial", "cubic").strip(),
        solution=run.get("solution", "reference").strip(),
        out_dir=out_dir,
        seed=_num(run, "seed", int, required=False, default=0),
        workers=_num(run, "workers", int, required=False, default=1),
    )
    _check_mode_blocks(cfg)
    return cfg


def _check_mode_blocks(cfg):
    env, grid = cfg.environment, cfg.grid
    if cfg.mode == "verify":
        if not grid.J_list and grid.J is None:
            raise ConfigError("verify mode needs [grid] J_list (or J)")
        if cfg.solution not in ("reference", "zero"):
            raise ConfigError(f"[run] solution must be reference or zero, got {cfg.solution!r}")
    else:
        if grid.J is None:
            raise ConfigError(f"{cfg.mode} mode needs [grid] J")
        if grid.k is None and grid.N is None and grid.k_rule is None:
            raise ConfigError(f"{cfg.mode} mode needs [grid] k, N or k_rule")
    if cfg.mode == "conserve" and cfg.initial not in ("cubic", "zero"):
        raise ConfigError(f"[run] initial must be cubic or zero, got {cfg.initial!r}")
    if cfg.mode == "tl":
        if cfg.source is None:
            raise ConfigError("tl mode needs a [source] section")
        if cfg.receiver is None:
            raise ConfigError("tl mode needs a [receiver] section")
    elif env.alpha is None and (env.frequency is None or env.c0 is None):
        raise ConfigError("[environment] needs alpha, or frequency and c0")
