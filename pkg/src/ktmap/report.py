"""Pipeline orchestration and the KT map report.

run_pipeline executes parse -> select -> fit -> score -> fronts -> metrics
-> hubs -> main path and assembles a single self-contained JSON report: the
map of where the corpus sits on the basic-clinical axis, how its research
fronts nest, and which nodes bridge them. Intermediate artifacts are written
to the output directory so every CLI stage can also run standalone from the
previous stage's files.

All numeric content is deterministic for a fixed config and input; the only
run-dependent field is generated_at.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from . import __version__
from .axis import (DEFAULT_HIGH, DEFAULT_LOW, classify, front_score_summary,
                   homophily_assortativity, score_documents)
from .corpus import (CitationNetwork, Document, Lexicon,
                     co_citation_projection, count_terms, load_corpus,
                     write_corpus)
from .errors import KTMapError, StageError
from .fronts import FrontTree, hierarchical_fronts
from .hubs import (HubCandidate, HubConfig, MainPath,
                   detect_translational_hubs, hub_regions, main_path)
from .metrics import ck_scaling, node_metrics_table
from .selection import fit_power_law, select_top_cited

log = logging.getLogger("ktmap.report")

_BOOL_KEYS = ("lenient",)
_INT_KEYS = ("max_depth", "min_front_size", "bootstrap", "seed")
_FLOAT_KEYS = ("fraction", "low", "high", "min_q_gain", "degree_pct",
               "c_max", "p_min", "t_spread_min")


@dataclass
class PipelineConfig:
    """Fully resolved pipeline configuration; embedded in the report."""

    nodes: str
    edges: str
    out_dir: str = "."
    lexicon_basic: str | None = None
    lexicon_clinical: str | None = None
    lenient: bool = False
    fraction: float = 0.20
    rank_by: str = "in_degree"
    low: float = DEFAULT_LOW
    high: float = DEFAULT_HIGH
    max_depth: int = 4
    min_front_size: int = 10
    min_q_gain: float = 0.05
    mode: str = "citation"
    binning: str = "log2"
    degree_pct: float = 0.90
    c_max: float | None = None
    p_min: float = 0.3
    t_spread_min: float = 0.2
    bootstrap: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("citation", "cocitation"):
            raise ValueError(f"mode must be citation|cocitation, got {self.mode!r}")
        if (self.lexicon_basic is None) != (self.lexicon_clinical is None):
            raise ValueError("lexicon-basic and lexicon-clinical go together")

    def hub_config(self) -> HubConfig:
        return HubConfig(degree_pct=self.degree_pct, c_max=self.c_max,
                         p_min=self.p_min, t_spread_min=self.t_spread_min)

    def validate_paths(self) -> None:
        for label, p in (("nodes", self.nodes), ("edges", self.edges),
                         ("lexicon_basic", self.lexicon_basic),
                         ("lexicon_clinical", self.lexicon_clinical)):
            if p is not None and not Path(p).exists():
                raise ValueError(f"{label} file not found: {p}")

    def to_json_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "PipelineConfig":
        """Read key=value lines (# comments allowed), then apply overrides."""
        raw: dict = {}
        base = Path(path).parent
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value")
                key, _, value = line.partition("=")
                raw[key.strip()] = value.strip()
        cfg: dict = {}
        for key, value in raw.items():
            if key in ("nodes", "edges", "lexicon_basic", "lexicon_clinical"):
                # paths are relative to the config file
                cfg[key] = str((base / value))
            elif key in _BOOL_KEYS:
                cfg[key] = value.lower() in ("1", "true", "yes")
            elif key in _INT_KEYS:
                cfg[key] = int(value)
            elif key in _FLOAT_KEYS:
                cfg[key] = None if value.lower() == "none" else float(value)
            elif key in ("rank_by", "mode", "binning", "out_dir"):
                cfg[key] = value
            else:
                raise ValueError(f"{path}: unknown config key {key!r}")
        if overrides:
            cfg.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**cfg)


@dataclass(frozen=True)
class KTReport:
    """Machine-readable map of the analysis; serializes to the report schema."""

    config: PipelineConfig
    n_documents: int
    n_edges: int
    n_selected: int
    n_selected_edges: int
    power_law: dict
    ck_fit: dict | None
    assortativity: float | None
    fronts_mode: str
    q_top: float | None
    front_table: list[dict]
    hub_thresholds: dict
    hubs: list[dict]
    regions: list[list[str]]
    main_path_nodes: list[str]
    main_path_spc: list[int]
    n_removed_edges: int
    generated_at: str = ""

    def to_json_dict(self) -> dict:
        return {
            "tool": {"name": "ktmap", "version": __version__},
            "generated_at": self.generated_at,
            "seed": self.config.seed,
            "config": self.config.to_json_dict(),
            "corpus": {
                "n_documents": self.n_documents,
                "n_edges": self.n_edges,
                "n_selected": self.n_selected,
                "n_selected_edges": self.n_selected_edges,
            },
            "power_law": self.power_law,
            "ck_scaling": self.ck_fit,
            "assortativity": self.assortativity,
            "fronts": {
                "mode": self.fronts_mode,
                "q_top": self.q_top,
                "table": self.front_table,
            },
            "hubs": {
                "thresholds": self.hub_thresholds,
                "candidates": self.hubs,
                "regions": self.regions,
            },
            "main_path": {
                "nodes": self.main_path_nodes,
                "spc": self.main_path_spc,
                "n_removed_edges": self.n_removed_edges,
            },
        }


def load_report_schema() -> dict:
    with resources.files("ktmap.data").joinpath("report.schema.json").open(
            encoding="utf-8") as fh:
        return json.load(fh)


def validate_report(doc: dict) -> None:
    """Raise jsonschema.ValidationError if the report violates the schema."""
    import jsonschema

    jsonschema.validate(doc, load_report_schema())


def _stage(name: str):
    def wrap(fn):
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except StageError:
                raise
            except (KTMapError, ValueError, OSError) as exc:
                raise StageError(name, exc)
        return run
    return wrap


def front_table_rows(tree: FrontTree, scores, low: float,
                     high: float) -> list[dict]:
    """Flatten the front tree into per-front summary rows (level >= 2)."""
    rows = []
    for node in tree.root.walk():
        if node.level < 2:
            continue
        members = {m: 1 for m in node.members}
        summary = front_score_summary(members, {m: scores[m] for m in members},
                                      low, high)[1]
        stratum = (classify(summary.mean_t, low, high).value
                   if summary.mean_t is not None else "unscored")
        rows.append({
            "path": ".".join(str(c) for c in node.path),
            "level": node.level,
            "size": node.size,
            "mean_t": summary.mean_t,
            "share_unscored": summary.share_unscored,
            "stratum": stratum,
            "q_split": node.q_split,
        })
    return rows


def run_pipeline(config: PipelineConfig) -> KTReport:
    """Execute the full analysis and write all artifacts to config.out_dir."""
    config.validate_paths()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    net = _stage("parse")(_parse_stage)(config, out)
    core = _stage("select")(_select_stage)(config, net, out)
    power_law = _stage("fit-degrees")(_fit_stage)(config, net, out)
    scores, assort = _stage("score")(_score_stage)(config, core, out)
    tree, partition, front_graph = _stage("fronts")(_fronts_stage)(config, core, out)
    ck_fit = _stage("metrics")(_metrics_stage)(config, core, partition, out)
    hubs, regions = _stage("hubs")(_hubs_stage)(config, core, partition, scores, out)
    path = _stage("mainpath")(_mainpath_stage)(core, out)

    front_rows = front_table_rows(tree, scores, config.low, config.high)
    report = KTReport(
        config=config,
        n_documents=net.n_docs,
        n_edges=net.n_edges,
        n_selected=core.n_docs,
        n_selected_edges=core.n_edges,
        power_law=power_law,
        ck_fit=ck_fit,
        assortativity=assort,
        fronts_mode=config.mode,
        q_top=tree.root.q_split,
        front_table=front_rows,
        hub_thresholds=_hub_thresholds_dict(config),
        hubs=[_hub_dict(h) for h in hubs],
        regions=[list(r) for r in regions],
        main_path_nodes=list(path.nodes),
        main_path_spc=list(path.spc),
        n_removed_edges=len(path.removed_edges),
        generated_at=datetime.now(timezone.utc).isoformat(),
    )
    doc = report.to_json_dict()
    validate_report(doc)
    write_json(out / "report.json", doc)
    return report


# -- stages ------------------------------------------------------------------


def _parse_stage(config: PipelineConfig, out: Path) -> CitationNetwork:
    net = load_corpus(config.nodes, config.edges, lenient=config.lenient)
    if net.n_docs == 0:
        raise KTMapError("corpus has no documents")
    if config.lexicon_basic:
        lexicon = Lexicon.load(config.lexicon_basic, config.lexicon_clinical)
        net = apply_lexicon(net, lexicon)
    write_corpus(net, out / "corpus.nodes.jsonl", out / "corpus.edges.csv")
    write_json(out / "corpus.summary.json", {
        "n_documents": net.n_docs,
        "n_edges": net.n_edges,
        "n_skipped_edges": len(net.skipped_edges),
    })
    return net


def apply_lexicon(net: CitationNetwork, lexicon: Lexicon) -> CitationNetwork:
    """Fill term counts from raw term lists; explicit counts take precedence."""
    docs = []
    for doc_id in net.ids:
        doc = net.docs[doc_id]
        if doc.raw_terms is not None and doc.basic_terms == 0 and doc.clinical_terms == 0:
            basic, clinical = count_terms(doc.raw_terms, lexicon)
            doc = Document(id=doc.id, year=doc.year, kind=doc.kind,
                           basic_terms=basic, clinical_terms=clinical,
                           raw_terms=doc.raw_terms, ext_citations=doc.ext_citations)
        docs.append(doc)
    return CitationNetwork(docs, net.edges)


def _select_stage(config: PipelineConfig, net: CitationNetwork,
                  out: Path) -> CitationNetwork:
    core = select_top_cited(net, config.fraction, rank_by=config.rank_by)
    write_corpus(core, out / "core.nodes.jsonl", out / "core.edges.csv")
    write_json(out / "selection.json", {
        "fraction": config.fraction,
        "rank_by": config.rank_by,
        "n_selected": core.n_docs,
        "n_selected_edges": core.n_edges,
    })
    return core


def _fit_stage(config: PipelineConfig, net: CitationNetwork, out: Path) -> dict:
    values = [net.in_degree(i) for i in net.ids]
    fit = fit_power_law(values, bootstrap=config.bootstrap, seed=config.seed)
    doc = {"alpha": fit.alpha, "xmin": fit.xmin, "ks": fit.ks_distance,
           "n_tail": fit.n_tail, "p_value": fit.p_value}
    write_json(out / "powerlaw.json", doc)
    return doc


def _score_stage(config: PipelineConfig, core: CitationNetwork, out: Path):
    scores = score_documents(core)
    with open(out / "scores.csv", "w", encoding="utf-8") as fh:
        fh.write("id,t,stratum\n")
        for doc_id in core.ids:
            t = scores[doc_id]
            stratum = classify(t, config.low, config.high).value
            fh.write(f"{doc_id},{'' if t is None else repr(t)},{stratum}\n")
    try:
        assort = homophily_assortativity(core, scores)
    except KTMapError:
        log.warning("assortativity undefined: no scored citation pairs")
        assort = None
    write_json(out / "assortativity.json", {"r": assort})
    return scores, assort


def _fronts_stage(config: PipelineConfig, core: CitationNetwork, out: Path):
    graph = (core.projection if config.mode == "citation"
             else co_citation_projection(core))
    tree = hierarchical_fronts(graph, max_depth=config.max_depth,
                               min_front_size=config.min_front_size,
                               min_q_gain=config.min_q_gain)
    paths = tree.path_strings()
    with open(out / "fronts.csv", "w", encoding="utf-8") as fh:
        fh.write("id,path\n")
        for node in sorted(paths):
            fh.write(f"{node},{paths[node]}\n")
    level2 = tree.level_assignment(2)
    write_json(out / "fronts.json", {
        "mode": config.mode,
        "q_top": tree.root.q_split,
        "n_level2": len(set(level2.values())),
        "fronts": [{"path": ".".join(str(c) for c in n.path),
                    "size": n.size, "q_split": n.q_split}
                   for n in tree.root.walk() if n.level >= 2],
    })
    return tree, level2, graph


def _metrics_stage(config: PipelineConfig, core: CitationNetwork,
                   partition, out: Path) -> dict | None:
    graph = core.projection
    rows = node_metrics_table(graph, partition if set(partition) == set(graph.ids)
                              else None)
    with open(out / "metrics.csv", "w", encoding="utf-8") as fh:
        fh.write("id,k,c,p,z\n")
        for row in rows:
            cells = [row.id, str(row.k)]
            for val in (row.c, row.p, row.z):
                cells.append("" if val is None else repr(val))
            fh.write(",".join(cells) + "\n")
    try:
        fit = ck_scaling(graph, binning=config.binning)
        doc = {"slope": fit.slope, "intercept": fit.intercept,
               "r2": fit.r2, "n_bins": fit.n_bins}
    except KTMapError as exc:
        log.warning("C(k) scaling fit unavailable: %s", exc)
        doc = None
    write_json(out / "ck_fit.json", doc)
    return doc


def _hubs_stage(config: PipelineConfig, core: CitationNetwork, partition,
                scores, out: Path):
    if set(partition) != set(core.ids):
        # co-citation partitions cover only cited documents
        sub = core.induced(partition.keys())
        hubs = detect_translational_hubs(sub, partition,
                                         {i: scores[i] for i in sub.ids},
                                         config.hub_config())
        regions = hub_regions(sub, hubs)
    else:
        hubs = detect_translational_hubs(core, partition, scores,
                                         config.hub_config())
        regions = hub_regions(core, hubs)
    write_json(out / "hubs.json", {
        "thresholds": _hub_thresholds_dict(config),
        "candidates": [_hub_dict(h) for h in hubs],
        "regions": [list(r) for r in regions],
    })
    return hubs, regions


def _mainpath_stage(core: CitationNetwork, out: Path) -> MainPath:
    path = main_path(core)
    write_json(out / "main_path.json", {
        "nodes": list(path.nodes),
        "spc": list(path.spc),
        "n_removed_edges": len(path.removed_edges),
    })
    return path


# -- helpers -----------------------------------------------------------------


def _hub_dict(h: HubCandidate) -> dict:
    return {"id": h.id, "k": h.k, "c": h.c, "p": h.p,
            "bridged_fronts": list(h.bridged_fronts),
            "t_spread": h.t_spread, "hub_score": h.hub_score, "rank": h.rank}


def _hub_thresholds_dict(config: PipelineConfig) -> dict:
    return {"degree_pct": config.degree_pct, "c_max": config.c_max,
            "p_min": config.p_min, "t_spread_min": config.t_spread_min}


def write_json(path, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
