"""Command-line pipeline: synth, clean, train, assign, compare, hac-curve,
tables, transitions and report.

Exit codes: 0 on success, 1 on a runtime or data error, 2 on a usage or
configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dataset, macroclass, quality, som, svg, topology, trajectory
from ._io import atomic_write, csv_text, fmt6

log = logging.getLogger("graphsom")

ROLE_KEYS = ("id", "time", "period")


class ConfigError(Exception):
    """Bad command line or configuration file."""


@dataclass
class PipelineConfig:
    data_path: Path | None = None
    column_map: dict | None = None
    schema: dataset.FeatureSchema | None = None
    scaled_features: tuple | None = None
    topology_spec: str = "strings 5x8"
    training: som.TrainingConfig = field(default_factory=som.TrainingConfig)
    macro: str = "auto"
    n_classes: int = 5
    out: Path = Path("out")
    max_lines: int = 200
    source: str = ""

    def topology(self) -> topology.MapTopology:
        try:
            return topology.parse_spec(self.topology_spec)
        except topology.TopologyError as exc:
            raise ConfigError(f"invalid topology spec {self.topology_spec!r}: {exc}") from None

    def macro_method(self, topo: topology.MapTopology) -> str:
        if self.macro != "auto":
            return self.macro
        return {"strings": "components", "star": "star_rays"}.get(topo.kind, "hac")


def _read_ini(path: str | None) -> configparser.ConfigParser:
    ini = configparser.ConfigParser()
    ini.optionxform = str
    if path:
        if not Path(path).is_file():
            raise ConfigError(f"config file {path} not found")
        ini.read(path, encoding="utf-8")
    return ini


def _apply_overrides(ini: configparser.ConfigParser, args) -> None:
    flag_map = {
        "data": ("data", "path"),
        "topology": ("topology", "spec"),
        "epochs": ("training", "epochs"),
        "alpha_start": ("training", "alpha_start"),
        "alpha_end": ("training", "alpha_end"),
        "sigma_start": ("training", "sigma_start"),
        "sigma_end": ("training", "sigma_end"),
        "kernel": ("training", "kernel"),
        "seed": ("training", "seed"),
        "macro": ("macro", "method"),
        "classes": ("macro", "classes"),
        "max_lines": ("report", "max_lines"),
        "out": ("output", "dir"),
    }
    for attr, (section, key) in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            if not ini.has_section(section):
                ini.add_section(section)
            ini.set(section, key, str(value))
    for item in getattr(args, "set", None) or []:
        lhs, sep, value = item.partition("=")
        section, dot, key = lhs.partition(".")
        if not sep or not dot:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        if not ini.has_section(section):
            ini.add_section(section)
        ini.set(section, key, value)


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def resolve_config(args, config_path: str | None = None) -> PipelineConfig:
    ini = _read_ini(config_path if config_path is not None else getattr(args, "config", None))
    _apply_overrides(ini, args)
    base = Path(config_path or getattr(args, "config", None) or ".").resolve()
    base_dir = base.parent if base.is_file() else Path.cwd()
    try:
        cfg = PipelineConfig()
        if ini.has_section("data"):
            d = ini["data"]
            if "path" in d:
                p = Path(d["path"])
                from_flag = getattr(args, "data", None) is not None
                cfg.data_path = p if p.is_absolute() or from_flag else (base_dir / p)
                cfg.source = d["path"]
            cfg.column_map = {d.get(role, role): role for role in ROLE_KEYS}
            if "multiplier" in d:
                cfg.column_map[d["multiplier"]] = "multiplier"
            for attr in _split(d.get("attributes", "")):
                cfg.column_map[attr] = f"attr:{attr}"
            if "scaled_features" in d:
                cfg.scaled_features = tuple(_split(d["scaled_features"]))
            names = _split(d.get("features", ""))
            if d.get("schema", "").lower() == "psid":
                cfg.schema = dataset.PSID_SCHEMA
            elif names:
                bounds = []
                for n in names:
                    raw = ini.get("bounds", n, fallback=None)
                    bounds.append(tuple(float(v) for v in _split(raw)) if raw else (-np.inf, np.inf))
                cfg.schema = dataset.FeatureSchema(tuple(names), tuple(bounds))
            if cfg.schema is not None:
                cfg.column_map.update({n: n for n in cfg.schema.names})
        if ini.has_section("topology"):
            cfg.topology_spec = ini["topology"].get("spec", cfg.topology_spec)
        t = ini["training"] if ini.has_section("training") else {}
        sigma_start = t.get("sigma_start", None)
        cfg.training = som.TrainingConfig(
            epochs=int(t.get("epochs", 20)),
            alpha_start=float(t.get("alpha_start", 0.5)),
            alpha_end=float(t.get("alpha_end", 0.01)),
            sigma_start=None if sigma_start in (None, "", "auto") else float(sigma_start),
            sigma_end=float(t.get("sigma_end", 0.5)),
            kernel=t.get("kernel", "gaussian"),
            seed=int(t.get("seed", 0)),
        )
        if ini.has_section("macro"):
            cfg.macro = ini["macro"].get("method", "auto")
            cfg.n_classes = int(ini["macro"].get("classes", 5))
        if cfg.macro not in ("auto", "components", "star_rays", "hac"):
            raise ConfigError(f"unknown macro method {cfg.macro!r}")
        if ini.has_section("report"):
            cfg.max_lines = int(ini["report"].get("max_lines", 200))
        if ini.has_section("output") and "dir" in ini["output"]:
            cfg.out = Path(ini["output"]["dir"])
    except (ValueError, dataset.DataError) as exc:
        raise ConfigError(str(exc)) from None
    topo = cfg.topology()
    if cfg.macro_method(topo) == "star_rays" and topo.kind != "star":
        raise ConfigError("macro method star_rays requires a star topology")
    return cfg


def _infer_schema(path: Path, column_map: dict) -> dataset.FeatureSchema:
    with path.open(newline="", encoding="utf-8") as fh:
        header = [h.strip() for h in next(csv.reader(fh))]
    return dataset.FeatureSchema(tuple(h for h in header if h not in column_map))


def load_table(cfg: PipelineConfig) -> dataset.SampleTable:
    """Load the configured file. Without declared features every column that
    is neither a role nor a declared attribute is a feature."""
    if cfg.data_path is None:
        raise ConfigError("no data path: set [data] path or pass --data")
    if not cfg.data_path.is_file():
        raise FileNotFoundError(f"data file {cfg.data_path} not found")
    column_map = dict(cfg.column_map or {r: r for r in ROLE_KEYS})
    schema = cfg.schema or _infer_schema(cfg.data_path, column_map)
    column_map.update({n: n for n in schema.names})
    return dataset.load_samples(cfg.data_path, schema, column_map, cfg.scaled_features)


def prepared(cfg: PipelineConfig):
    """Loaded, cleaned and standardized table plus the cleaned raw table."""
    raw, report = dataset.clean(load_table(cfg))
    if len(report):
        log.info("clean: %d rows rejected", len(report))
    z, stdz = dataset.standardize(raw)
    return raw, z, stdz, report


def _partition(cfg: PipelineConfig, trained: som.CodebookMap):
    method = cfg.macro_method(trained.topology)
    if method == "components":
        return macroclass.macro_from_components(trained.topology)
    if method == "star_rays":
        return macroclass.macro_from_star(trained.topology)
    part, _ = macroclass.hac(trained, cfg.n_classes)
    return part


def _labels_text(table, units, classes) -> str:
    rows = [
        (table.ids[i], int(table.times[i]), int(table.periods[i]), int(units[i]), int(classes[i]))
        for i in range(len(table))
    ]
    return csv_text(("id", "time", "period", "unit", "class"), rows)


def _out(cfg: PipelineConfig) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg.out


# -- commands ---------------------------------------------------------------


def cmd_synth(args) -> int:
    attrs = {}
    for item in args.attribute or []:
        key, _, values = item.partition("=")
        attrs[key] = tuple(_split(values))
    conf = dataset.five_cluster_config(
        n_individuals=args.individuals,
        n_times=args.times,
        n_periods=args.periods,
        attributes=attrs or None,
        separation=args.separation,
    )
    table = dataset.generate_synthetic_panel(conf, args.seed if args.seed is not None else 0)
    out = Path(args.out or "out")
    dataset.write_samples(table, out / "samples.csv")
    attr_keys = ",".join(sorted(table.attributes))
    atomic_write(out / "config.ini", (
        "[data]\npath = samples.csv\n"
        f"features = {','.join(table.schema.names)}\n"
        f"attributes = {attr_keys}\n\n"
        "[topology]\nspec = strings 5x8\n\n"
        "[training]\nepochs = 20\nseed = 0\n\n"
        "[macro]\nmethod = auto\nclasses = 5\n"
    ))
    print(f"wrote {len(table)} rows to {out / 'samples.csv'} (config: {out / 'config.ini'})")
    return 0


def cmd_clean(args) -> int:
    cfg = resolve_config(args)
    table = load_table(cfg)
    kept, report = dataset.clean(table)
    out = _out(cfg)
    dataset.write_samples(kept, out / "cleaned.csv")
    atomic_write(out / "rejections.csv", report.to_text())
    print(f"kept {len(kept)} of {len(table)} rows; {len(report)} rejected")
    return 0


def train_pipeline(cfg: PipelineConfig):
    raw, z, stdz, _ = prepared(cfg)
    trained = som.train(z, cfg.topology(), cfg.training)
    part = _partition(cfg, trained)
    units = som.assign(trained, z)
    report = quality.quality_report(trained, z, part)
    return raw, z, stdz, trained, part, units, report


def cmd_train(args) -> int:
    cfg = resolve_config(args)
    raw, z, stdz, trained, part, units, report = train_pipeline(cfg)
    out = _out(cfg)
    som.write_codebook(trained, out / "codebook.csv")
    atomic_write(out / "standardization.csv", stdz.to_text(z.schema.names))
    part.write(out / "partition.csv")
    atomic_write(out / "labels.csv", _labels_text(z, units, part.classes_of(units)))
    report.write(out / "quality.txt")
    sys.stdout.write(report.to_text())
    return 0


def cmd_assign(args) -> int:
    cfg = resolve_config(args)
    trained, part = _load_trained(cfg)
    raw, _ = dataset.clean(load_table(cfg))
    stdz = dataset.Standardization.read(cfg.out / "standardization.csv")
    z = raw.with_features(stdz.apply(raw.features))
    units = som.assign(trained, z)
    target = Path(args.labels_out) if args.labels_out else cfg.out / "labels.csv"
    atomic_write(target, _labels_text(z, units, part.classes_of(units)))
    print(f"assigned {len(units)} rows -> {target}")
    return 0


def cmd_compare(args) -> int:
    configs = []
    if args.configs:
        configs = [resolve_config(args, path) for path in args.configs]
    if args.topologies:
        for spec in args.topologies:
            args.topology = spec
            configs.append(resolve_config(args))
    if len(configs) < 2:
        raise ConfigError("compare needs at least 2 configurations (need >=2)")
    sources = {str(c.data_path.resolve()) if c.data_path else None for c in configs}
    if len(sources) != 1 or None in sources:
        raise ConfigError(f"configurations reference different data: {sorted(map(str, sources))}")
    rows = []
    for c in configs:
        _, _, _, trained, part, _, report = train_pipeline(c)
        rows.append((
            trained.topology.descriptor,
            part.provenance,
            part.n_classes,
            f"{100 * report.rqe:.2f}",
            f"{100 * report.rqe_ext:.2f}",
            f"{100 * report.rqe_macro:.2f}",
        ))
    text = csv_text(("topology", "macro", "S", "rqe_pct", "rqe_ext_pct", "rqe_macro_pct"), rows)
    atomic_write(_out(configs[0]) / "compare.csv", text)
    sys.stdout.write(text)
    return 0


def _load_trained(cfg: PipelineConfig):
    path = cfg.out / "codebook.csv"
    if not path.is_file():
        raise FileNotFoundError(f"missing artifact {path}; run `graphsom train` first")
    topo = cfg.topology()
    trained = som.read_codebook(path, topo if topo.kind == "custom" else None)
    part_path = cfg.out / "partition.csv"
    part = macroclass.MacroPartition.read(part_path) if part_path.is_file() else _partition(cfg, trained)
    return trained, part


def _load_labels(cfg: PipelineConfig, table: dataset.SampleTable, path: Path | None = None):
    path = path or cfg.out / "labels.csv"
    if not path.is_file():
        raise FileNotFoundError(f"missing artifact {path}; run `graphsom train` first")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    lookup = {(r["id"], int(r["time"])): (int(r["unit"]), int(r["class"])) for r in rows}
    try:
        pairs = [lookup[(str(i), int(t))] for i, t in zip(table.ids, table.times)]
    except KeyError as exc:
        raise dataset.DataError(f"{path} has no label for observation {exc.args[0]}") from None
    units = np.array([p[0] for p in pairs], dtype=np.int64)
    classes = np.array([p[1] for p in pairs], dtype=np.int64)
    return units, classes


def cmd_hac_curve(args) -> int:
    cfg = resolve_config(args)
    trained, _ = _load_trained(cfg)
    if trained.topology.kind != "grid":
        log.warning("hac-curve on a %s map; the curve is still defined", trained.topology.kind)
    _, z, _, _ = prepared(cfg)
    units = som.assign(trained, z)
    _, trace = macroclass.hac(trained, 1)
    trace = macroclass.hac_curve(trace, z, units)
    out = _out(cfg)
    atomic_write(out / "hac_curve.csv",
                 csv_text(("S", "rqe_macro"), [(s, fmt6(r)) for s, r in trace.rqe_macro_curve]))
    merges = [(m.step, m.class_a, m.class_b, fmt6(m.cost)) for m in trace.merges]
    atomic_write(out / "hac_merges.csv", csv_text(("step", "class_a", "class_b", "cost"), merges))
    xs = [s for s, _ in trace.rqe_macro_curve]
    ys = [100 * r for _, r in trace.rqe_macro_curve]
    atomic_write(out / "hac_curve.svg",
                 svg.line_plot(xs, ys, "RQE_macro by number of macro-classes",
                               "number of macro-classes", "RQE_macro (%)"))
    print(f"wrote {len(xs)} curve points to {out / 'hac_curve.csv'}")
    return 0


def cmd_tables(args) -> int:
    cfg = resolve_config(args)
    raw, z, _, _ = prepared(cfg)
    trained, part = _load_trained(cfg)
    units, classes = _load_labels(cfg, z)
    out = _out(cfg)
    profile = macroclass.class_means(z, units, part, raw=raw)
    atomic_write(out / "class_means.csv", profile.to_text())
    keys = ["period", *sorted(raw.attributes)]
    for key in keys:
        dist = macroclass.slice_distribution(classes, raw, key, part.n_classes)
        atomic_write(out / f"slices_{key}.csv", dist.to_text())
    if args.against:
        _, other = _load_labels(cfg, z, Path(args.against) / "labels.csv")
        atomic_write(out / "crosstab.csv", macroclass.cross_tab(classes, other).to_text())
    print(f"wrote class means and {len(keys)} slice tables to {out}")
    return 0


def _parse_slice(text: str | None):
    if not text:
        return None
    key, sep, value = text.partition("=")
    if not sep:
        raise ConfigError(f"--slice expects attribute=value, got {text!r}")
    return key, value


def _limit_or_diagnostic(tm: trajectory.TransitionMatrix):
    try:
        return trajectory.stationary(tm), ""
    except trajectory.MarkovError as exc:
        return None, str(exc)


def _replay(args) -> int:
    matrix, kind = trajectory.read_matrix(args.matrix)
    tm = trajectory.from_probabilities(matrix, percent=args.percent or kind == "counts")
    pi = trajectory.stationary(tm)
    out = Path(args.out or "out")
    rows = [("limit", *(fmt6(v) for v in pi))]
    header = ("distribution", *(f"class_{s}" for s in range(1, len(pi) + 1)))
    atomic_write(out / "replay_limit.csv", csv_text(header, rows))
    print("limit " + " ".join(f"{v:.4f}" for v in pi))
    return 0


def cmd_transitions(args) -> int:
    if args.matrix:
        return _replay(args)
    cfg = resolve_config(args)
    raw, z, _, _ = prepared(cfg)
    _, part = _load_trained(cfg)
    _, classes = _load_labels(cfg, z)
    slice_ = _parse_slice(args.slice)
    periods = [args.period] if args.period is not None else sorted(set(raw.periods.tolist()))
    out = _out(cfg)
    suffix = f"_{slice_[0]}-{slice_[1]}" if slice_ else ""
    dist_rows = []
    s = part.n_classes
    for period in periods:
        trajs = trajectory.build_trajectories(classes, raw, s, period=period)
        if slice_:
            trajs = trajectory.filter_trajectories(trajs, raw, *slice_)
        tag = f"p{period}{suffix}"
        if trajs.n_transitions == 0:
            msg = f"period {period}: no transitions" + (f" for {slice_[0]}={slice_[1]}" if slice_ else "")
            print(msg + " (empty set)")
            atomic_write(out / f"transitions_{tag}_diagnostic.txt", msg + "\n")
            continue
        tm = trajectory.transition_matrix(trajs)
        trajectory.write_matrix(tm.counts, out / f"transitions_{tag}_counts.txt", "counts")
        pct_rows = [(f"class_{i + 1}", int(tm.row_counts[i]), *(fmt6(v) for v in tm.percent()[i]))
                    for i in range(s)]
        header = ("from", "n", *(f"class_{j}" for j in range(1, s + 1)))
        atomic_write(out / f"transitions_{tag}_percent.csv", csv_text(header, pct_rows))
        emp = trajectory.empirical_distribution(trajs)
        dist_rows.append((period, "empirical", *(fmt6(v) for v in emp)))
        limit, diag = _limit_or_diagnostic(tm)
        if limit is None:
            dist_rows.append((period, "limit", *([""] * s)))
            atomic_write(out / f"transitions_{tag}_diagnostic.txt", diag + "\n")
            print(f"period {period}: {diag}")
        else:
            dist_rows.append((period, "limit", *(fmt6(v) for v in limit)))
        atomic_write(
            out / f"transitions_{tag}.svg",
            svg.matrix_heatmap(tm.percent(), f"Transitions, period {period}{suffix} (%)"),
        )
        print(f"period {period}: {trajs.n_transitions} transitions over {len(trajs)} individuals")
    header = ("period", "distribution", *(f"class_{j}" for j in range(1, s + 1)))
    atomic_write(out / f"distributions{suffix}.csv", csv_text(header, dist_rows))
    return 0


def cmd_report(args) -> int:
    cfg = resolve_config(args)
    trained, part = _load_trained(cfg)
    _, z, _, _ = prepared(cfg)
    units, _ = _load_labels(cfg, z)
    out = _out(cfg) / "report"
    names = trained.feature_names or tuple(f"f{j + 1}" for j in range(trained.dim))
    cb = trained.codebook
    positions = trained.topology.layout()
    ids = [str(u) for u in range(1, trained.unit_count + 1)]
    for j, name in enumerate(names):
        constant = np.all(cb[:, j] == cb[0, j])
        note = "constant across units" if constant else ""
        atomic_write(out / f"plane_{j + 1:02d}_{name}.svg",
                     svg.heatmap(cb[:, j], positions, f"Component plane: {name}",
                                 cell_labels=ids, note=note))
    ylim = (float(cb.min()), float(cb.max()))
    rng = np.random.default_rng(cfg.training.seed)
    for s in range(1, part.n_classes + 1):
        members = part.members(s)
        atomic_write(out / f"profile_class_{s}.svg",
                     svg.profile_plot(cb[np.array(members) - 1], names,
                                      f"Macro-class {s}: code-vectors", ylim=ylim))
        panels = []
        for u in members:
            rows = z.features[units == u]
            if len(rows) > cfg.max_lines:
                rows = rows[np.sort(rng.choice(len(rows), cfg.max_lines, replace=False))]
            panels.append((u, cb[u - 1], rows))
        atomic_write(out / f"content_class_{s}.svg", svg.content_panels(panels, names, s))
    print(f"wrote report SVGs to {out}")
    return 0


# -- argument parsing --------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--seed", type=int, help="training / synthesis seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--percent", action="store_true", help="matrix entered in percent")
    p.add_argument("--data", help="observation file ([data] path)")
    p.add_argument("--topology", help="e.g. 'strings 5x8', 'grid 5x8', 'star 5x8', 'adjacency:FILE'")
    p.add_argument("--epochs", type=int)
    p.add_argument("--alpha-start", dest="alpha_start", type=float)
    p.add_argument("--alpha-end", dest="alpha_end", type=float)
    p.add_argument("--sigma-start", dest="sigma_start", type=float)
    p.add_argument("--sigma-end", dest="sigma_end", type=float)
    p.add_argument("--kernel", choices=som.KERNELS)
    p.add_argument("--macro", choices=("auto", "components", "star_rays", "hac"))
    p.add_argument("--classes", type=int, help="macro-class count for hac")
    p.add_argument("--max-lines", dest="max_lines", type=int)
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                   help="override any config key")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="graphsom", parents=[common],
                                     description="Self-organizing maps on graph lattices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="write the bundled synthetic panel")
    p.add_argument("--individuals", type=int, default=1000)
    p.add_argument("--times", type=int, default=5)
    p.add_argument("--periods", type=int, default=1)
    p.add_argument("--separation", type=float, default=3.5)
    p.add_argument("--attribute", action="append", metavar="KEY=V1,V2")
    p.set_defaults(func=cmd_synth)

    for name, func, text in (
        ("clean", cmd_clean, "drop out-of-bound rows"),
        ("train", cmd_train, "train a map and write codebook, labels and quality"),
        ("hac-curve", cmd_hac_curve, "RQE_macro curve of Ward merges"),
        ("report", cmd_report, "SVG component planes and class profiles"),
    ):
        sub.add_parser(name, parents=[common], help=text).set_defaults(func=func)

    p = sub.add_parser("assign", parents=[common], help="label rows with a trained map")
    p.add_argument("--labels-out", dest="labels_out")
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("compare", parents=[common], help="compare topologies on the same data")
    p.add_argument("configs", nargs="*", help="config files sharing one data file")
    p.add_argument("--topologies", nargs="+", help="topology specs to run with --config")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("tables", parents=[common], help="class means, slices, cross-tab")
    p.add_argument("--against", help="output dir of another run to cross-tabulate with")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("transitions", parents=[common], help="Markov transition analysis")
    p.add_argument("--slice", help="attribute=value filter")
    p.add_argument("--period", type=int)
    p.add_argument("--matrix", help="replay a published matrix file instead of data")
    p.set_defaults(func=cmd_transitions)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for attr in ("config", "seed", "out", "data", "topology", "epochs", "alpha_start",
                 "alpha_end", "sigma_start", "sigma_end", "kernel", "macro", "classes",
                 "max_lines", "set", "slice", "period", "matrix", "against", "configs",
                 "topologies", "labels_out"):
        if not hasattr(args, attr):
            setattr(args, attr, None)
    args.percent = getattr(args, "percent", False)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"graphsom {args.command}: usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"graphsom {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
