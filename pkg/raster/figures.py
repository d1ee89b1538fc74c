"""
Figure output for Tropiscope
SVG (one rect per horizontal run of occupied cells) and binary PPM
"""

import logging
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import List, Tuple

import numpy as np
from PIL import Image

from raster.raster import Raster

logger = logging.getLogger(__name__)

FILL = "#1f4e79"
STROKE = "#555555"
BACKGROUND_RGB = (255, 255, 255)
FILL_RGB = (31, 78, 121)
SVG_NS = "http://www.w3.org/2000/svg"


def horizontal_runs(mask: np.ndarray) -> List[Tuple[int, int, int]]:
    """(row, first column, length) of every maximal run of True cells, row 0 first"""
    runs = []
    for row in range(mask.shape[0]):
        padded = np.concatenate([[False], mask[row], [False]]).astype(np.int8)
        edges = np.flatnonzero(np.diff(padded))
        for start, stop in zip(edges[::2], edges[1::2]):
            runs.append((row, int(start), int(stop - start)))
    return runs


def svg_document(r: Raster) -> ET.Element:
    root = ET.Element("svg", {
        "xmlns": SVG_NS,
        "version": "1.1",
        "width": str(r.width),
        "height": str(r.height),
        "viewBox": f"0 0 {r.width} {r.height}",
    })
    if r.provenance:
        ET.SubElement(root, "title").text = r.provenance
    group = ET.SubElement(root, "g", {"fill": FILL, "shape-rendering": "crispEdges"})
    # SVG rows grow downwards, raster rows upwards
    for row, column, length in horizontal_runs(r.mask):
        ET.SubElement(group, "rect", {
            "x": str(column),
            "y": str(r.height - 1 - row),
            "width": str(length),
            "height": "1",
        })
    if r.disk:
        ET.SubElement(root, "circle", {
            "cx": f"{r.width / 2:g}",
            "cy": f"{r.height / 2:g}",
            "r": f"{min(r.width, r.height) / 2:g}",
            "fill": "none",
            "stroke": STROKE,
            "stroke-width": "1",
        })
    return root


def render_svg(r: Raster, path) -> Path:
    """Write r as an SVG 1.1 file; identical rasters give identical bytes"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tree = ET.ElementTree(svg_document(r))
    ET.indent(tree)
    tree.write(path, encoding="utf-8", xml_declaration=True)
    logger.info(f"Wrote {path}")
    return path


def render_ppm(r: Raster, path) -> Path:
    """Write r as a binary (P6) PPM"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pixels = np.empty((r.height, r.width, 3), dtype=np.uint8)
    pixels[:] = BACKGROUND_RGB
    pixels[r.mask[::-1]] = FILL_RGB
    Image.fromarray(pixels).save(path, format="PPM")
    logger.info(f"Wrote {path}")
    return path
