"""Annotated graph export: GraphML for interchange, dot for rendering.

Node attributes carried on export: front path, translational score, stratum,
and the hub flag. A minimal GraphML reader is provided so round-trips can be
verified.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Mapping
from xml.sax.saxutils import escape

from .corpus import CitationNetwork

FORMATS = ("graphml", "dot")

_GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def export_graph(net: CitationNetwork, path, fmt: str,
                 front_paths: Mapping[str, str] | None = None,
                 scores: Mapping[str, float | None] | None = None,
                 strata: Mapping[str, str] | None = None,
                 hub_ids: set[str] | None = None) -> None:
    """Write the citation graph with analysis annotations as node attributes."""
    if fmt == "graphml":
        text = to_graphml(net, front_paths, scores, strata, hub_ids)
    elif fmt == "dot":
        text = to_dot(net, front_paths, scores, strata, hub_ids)
    else:
        raise ValueError(f"unknown format {fmt!r}; supported: {', '.join(FORMATS)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def to_graphml(net: CitationNetwork,
               front_paths: Mapping[str, str] | None = None,
               scores: Mapping[str, float | None] | None = None,
               strata: Mapping[str, str] | None = None,
               hub_ids: set[str] | None = None) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<graphml xmlns="{_GRAPHML_NS}">',
        '  <key id="d_year" for="node" attr.name="year" attr.type="int"/>',
        '  <key id="d_kind" for="node" attr.name="kind" attr.type="string"/>',
        '  <key id="d_front" for="node" attr.name="front" attr.type="string"/>',
        '  <key id="d_t" for="node" attr.name="t" attr.type="double"/>',
        '  <key id="d_stratum" for="node" attr.name="stratum" attr.type="string"/>',
        '  <key id="d_hub" for="node" attr.name="hub" attr.type="boolean"/>',
        '  <graph id="G" edgedefault="directed">',
    ]
    for doc_id in net.ids:
        doc = net.docs[doc_id]
        lines.append(f'    <node id="{escape(doc_id)}">')
        if doc.year is not None:
            lines.append(f'      <data key="d_year">{doc.year}</data>')
        lines.append(f'      <data key="d_kind">{doc.kind}</data>')
        if front_paths and doc_id in front_paths:
            lines.append(f'      <data key="d_front">{escape(front_paths[doc_id])}</data>')
        if scores is not None and scores.get(doc_id) is not None:
            lines.append(f'      <data key="d_t">{scores[doc_id]!r}</data>')
        if strata and doc_id in strata:
            lines.append(f'      <data key="d_stratum">{strata[doc_id]}</data>')
        lines.append(f'      <data key="d_hub">'
                     f'{"true" if hub_ids and doc_id in hub_ids else "false"}</data>')
        lines.append('    </node>')
    for citing, cited in net.edges:
        lines.append(f'    <edge source="{escape(citing)}" target="{escape(cited)}"/>')
    lines.append('  </graph>')
    lines.append('</graphml>')
    return "\n".join(lines) + "\n"


def read_graphml(path) -> tuple[list[str], list[tuple[str, str]], dict[str, dict]]:
    """Read node ids, directed edges, and node attributes back from GraphML."""
    tree = ET.parse(path)
    root = tree.getroot()
    ns = {"g": _GRAPHML_NS}
    key_names = {k.get("id"): k.get("attr.name")
                 for k in root.findall("g:key", ns)}
    nodes, attrs = [], {}
    graph = root.find("g:graph", ns)
    for node in graph.findall("g:node", ns):
        node_id = node.get("id")
        nodes.append(node_id)
        attrs[node_id] = {key_names[d.get("key")]: d.text
                          for d in node.findall("g:data", ns)}
    edges = [(e.get("source"), e.get("target"))
             for e in graph.findall("g:edge", ns)]
    return nodes, edges, attrs


def to_dot(net: CitationNetwork,
           front_paths: Mapping[str, str] | None = None,
           scores: Mapping[str, float | None] | None = None,
           strata: Mapping[str, str] | None = None,
           hub_ids: set[str] | None = None) -> str:
    lines = ["digraph citations {", "  node [shape=circle];"]
    for doc_id in net.ids:
        parts = []
        if front_paths and doc_id in front_paths:
            parts.append(f'front="{front_paths[doc_id]}"')
        if scores is not None and scores.get(doc_id) is not None:
            parts.append(f't="{scores[doc_id]!r}"')
        if strata and doc_id in strata:
            parts.append(f'stratum="{strata[doc_id]}"')
        if hub_ids and doc_id in hub_ids:
            parts.append('hub="true"')
            parts.append("shape=doublecircle")
        attr = (" [" + ", ".join(parts) + "]") if parts else ""
        lines.append(f'  "{doc_id}"{attr};')
    for citing, cited in net.edges:
        lines.append(f'  "{citing}" -> "{cited}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
