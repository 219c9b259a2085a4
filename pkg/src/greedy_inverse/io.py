"""Readers and writers for configs, visibilities, images, selections and metric tables."""

from __future__ import annotations

import csv
import functools
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np
import yaml

from .errors import IoError, ValidationError
from .fourier import ImageGrid
from .greedy import SelectionResult
from .landweber import LandweberConfig
from .pipeline import ExperimentConfig
from .simulation import GaussianComponent, SourceConfig, Visibilities, fixture

VIS_COLUMNS = ("u", "v", "re", "im", "sigma")
METRIC_COLUMNS = ("mode", "method", "chi2", "chi2_sq", "rmse", "mre", "n_used")

# section -> {yaml key: ExperimentConfig field}
_SECTIONS = {
    "frequencies": {"n": "n_frequencies", "r_max": "r_max"},
    "noise": {"level": "noise_level", "seed": "seed"},
    "kernel": {"family": "kernel_family", "shape": "kernel_shape"},
    "greedy": {"n": "n_select", "tau": "tau", "initial_index": "initial_index",
               "residual_forward": "residual_forward"},
    "image": {"size": "image_size", "pixel_size": "pixel_size"},
}
_LANDWEBER_KEYS = ("step", "max_iters", "positivity", "stop_rtol")
_REQUIRED = ("source",)


def _fmt(x: float) -> str:
    return repr(float(x))


def _io(func):
    """Re-raise operating-system failures as :class:`IoError`."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except IoError:
            raise
        except OSError as exc:
            raise IoError(f"{func.__name__}: {exc}") from exc
    return wrapper


# ---------------------------------------------------------------- config

def source_from_dict(d) -> tuple[SourceConfig, str]:
    if isinstance(d, str):
        return fixture(d), d
    if not isinstance(d, dict):
        raise ValidationError("config field 'source' must be a fixture name or a mapping")
    for key in ("shape", "components"):
        if key not in d:
            raise ValidationError(f"missing config field 'source.{key}'")
    try:
        comps = tuple(GaussianComponent(**c) for c in d["components"])
    except TypeError as exc:
        raise ValidationError(f"bad config field 'source.components': {exc}") from None
    return SourceConfig(d["shape"], comps, float(d.get("curvature", 0.0))), d.get("name", d["shape"])


def source_to_dict(src: SourceConfig, name: str) -> dict:
    return {"name": name, "shape": src.shape, "curvature": src.curvature,
            "components": [asdict(c) for c in src.components]}


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ValidationError("config must be a mapping")
    for key in _REQUIRED:
        if key not in d:
            raise ValidationError(f"missing config field '{key}'")
    unknown = set(d) - set(_SECTIONS) - {"source", "landweber"}
    if unknown:
        raise ValidationError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    source, name = source_from_dict(d["source"])
    kwargs = {"source": source, "source_name": name}
    for section, keys in _SECTIONS.items():
        sub = d.get(section) or {}
        bad = set(sub) - set(keys)
        if bad:
            raise ValidationError(f"unknown config field(s): {', '.join(section + '.' + b for b in sorted(bad))}")
        for k, attr in keys.items():
            if k in sub:
                kwargs[attr] = sub[k]
    lw = d.get("landweber") or {}
    bad = set(lw) - set(_LANDWEBER_KEYS)
    if bad:
        raise ValidationError(f"unknown config field(s): {', '.join('landweber.' + b for b in sorted(bad))}")
    kwargs["landweber"] = LandweberConfig(**lw)
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ValidationError(str(exc)) from None


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out = {"source": cfg.source_name if _is_fixture(cfg) else source_to_dict(cfg.source, cfg.source_name)}
    for section, keys in _SECTIONS.items():
        out[section] = {k: getattr(cfg, attr) for k, attr in keys.items()}
    out["landweber"] = cfg.landweber.to_dict()
    return out


def _is_fixture(cfg: ExperimentConfig) -> bool:
    try:
        return fixture(cfg.source_name) == cfg.source
    except ValidationError:
        return False


@_io
def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ValidationError(f"{path}: not a valid config document: {exc}") from None
    return config_from_dict(doc or {})


@_io
def save_config(cfg: ExperimentConfig, path) -> Path:
    path = Path(path)
    path.write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))
    return path


# ---------------------------------------------------------------- visibilities

@_io
def write_visibilities_csv(vis: Visibilities, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(VIS_COLUMNS)
        for (u, v), y, s in zip(vis.xi, vis.values, vis.sigma):
            w.writerow([_fmt(u), _fmt(v), _fmt(y.real), _fmt(y.imag), _fmt(s)])
    return path


@_io
def read_visibilities_csv(path) -> Visibilities:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != VIS_COLUMNS:
        raise ValidationError(f"{path}: expected header {','.join(VIS_COLUMNS)}")
    try:
        a = np.array(rows[1:], dtype=float).reshape(-1, 5)
    except ValueError as exc:
        raise ValidationError(f"{path}: malformed visibility rows: {exc}") from None
    return Visibilities(a[:, :2], a[:, 2] + 1j * a[:, 3], a[:, 4])


@_io
def write_visibilities_json(vis: Visibilities, path) -> Path:
    path = Path(path)
    doc = {"meta": vis.meta, "u": vis.xi[:, 0].tolist(), "v": vis.xi[:, 1].tolist(),
           "re": vis.values.real.tolist(), "im": vis.values.imag.tolist(), "sigma": vis.sigma.tolist()}
    path.write_text(json.dumps(doc))
    return path


@_io
def read_visibilities_json(path) -> Visibilities:
    d = json.loads(Path(path).read_text())
    return Visibilities(np.column_stack([d["u"], d["v"]]), np.array(d["re"]) + 1j * np.array(d["im"]),
                        np.array(d["sigma"]), d.get("meta", {}))


# ---------------------------------------------------------------- images

@_io
def write_image_csv(image: ImageGrid, path) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(f"# pixel_size={_fmt(image.pixel_size)}\n")
        for row in image.pixels:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    return path


@_io
def read_image_csv(path) -> ImageGrid:
    lines = Path(path).read_text().splitlines()
    pixel_size = 1.0
    if lines and lines[0].startswith("# pixel_size="):
        pixel_size = float(lines.pop(0).split("=", 1)[1])
    return ImageGrid(np.array([[float(x) for x in ln.split(",")] for ln in lines if ln]), pixel_size)


@_io
def write_pgm(image: ImageGrid, path) -> Path:
    """16-bit binary PGM, linearly scaled so the image maximum maps to 65535.

    The scale and pixel size are stored in header comments; negative values clip to 0.
    """
    path = Path(path)
    px = np.clip(image.pixels, 0.0, None)
    vmax = float(px.max())
    scale = vmax / 65535.0 if vmax > 0 else 1.0
    data = np.round(px / scale).astype(">u2")
    m = image.size
    header = f"P5\n# scale={_fmt(scale)}\n# pixel_size={_fmt(image.pixel_size)}\n{m} {m}\n65535\n"
    path.write_bytes(header.encode("ascii") + data.tobytes())
    return path


@_io
def read_pgm(path) -> ImageGrid:
    raw = Path(path).read_bytes()
    pos, tokens, meta = 0, [], {}
    while len(tokens) < 4:
        end = raw.index(b"\n", pos)
        line = raw[pos:end].decode("ascii")
        pos = end + 1
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k] = float(v)
        else:
            tokens += line.split()
    if tokens[0] != "P5":
        raise ValidationError(f"{path}: not a binary PGM")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    dtype = ">u2" if maxval > 255 else "u1"
    data = np.frombuffer(raw[pos:], dtype=dtype, count=w * h).reshape(h, w).astype(float)
    return ImageGrid(data * meta.get("scale", 1.0), meta.get("pixel_size", 1.0))


# ---------------------------------------------------------------- selections and metrics

@_io
def write_selection(sel: SelectionResult, path) -> Path:
    path = Path(path)
    path.write_text(sel.to_json() + "\n")
    return path


@_io
def read_selection(path) -> SelectionResult:
    return SelectionResult.from_json(Path(path).read_text())


@_io
def write_metrics_csv(rows, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        for r in rows:
            w.writerow([r["mode"], r["method"], _fmt(r["chi2"]), _fmt(r["chi2_sq"]), _fmt(r["rmse"]),
                        _fmt(r["mre"]), int(r["n_used"])])
    return path


@_io
def read_metrics_csv(path) -> list:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for k in ("chi2", "chi2_sq", "rmse", "mre"):
            r[k] = float(r[k])
        r["n_used"] = int(r["n_used"])
    return rows


_MODE_TITLES = {"all": "All points", "error": "Error-based", "residual": "Residual-based"}


def format_table(rows, title: str = "") -> str:
    """Plain-text metric block: one group per sampling mode, one line per method."""
    lines = []
    if title:
        lines.append(f"{title} configuration")
    header = f"{'Sampling':<16}{'chi2':>12}{'chi2_sq':>12}{'RMSE':>10}{'MRE':>10}{'n':>6}"
    lines += [header, "-" * len(header)]
    for r in rows:
        lines.append(_MODE_TITLES.get(r["mode"], r["mode"]))
        lines.append(f"  {r['method']:<14}{r['chi2']:>12.4g}{r['chi2_sq']:>12.4g}{r['rmse']:>10.4f}"
                     f"{r['mre']:>10.4f}{r['n_used']:>6d}")
    return "\n".join(lines) + "\n"
