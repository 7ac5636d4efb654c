#
# (C) Copyright Cloudlab URV 2020
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

import math
import logging
import itertools
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from platospec.graph import GraphError, MetricGraph, graph_from_edges

logger = logging.getLogger(__name__)

PHI = (1 + math.sqrt(5)) / 2
COORD_TOL = 1e-6


class Solid(Enum):
    TETRAHEDRON = 'tetrahedron'
    CUBE = 'cube'
    OCTAHEDRON = 'octahedron'
    DODECAHEDRON = 'dodecahedron'
    ICOSAHEDRON = 'icosahedron'

    @property
    def sector_count(self):
        """ Order of the rotation used for the symmetry sectors """
        return _SECTOR_COUNT[self]

    @classmethod
    def parse(cls, name):
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            choices = ', '.join(s.value for s in cls)
            raise GraphError(f"Unknown solid '{name}'. Choose one of: {choices}")


_SECTOR_COUNT = {
    Solid.TETRAHEDRON: 3,
    Solid.CUBE: 4,
    Solid.OCTAHEDRON: 4,
    Solid.DODECAHEDRON: 5,
    Solid.ICOSAHEDRON: 5,
}

# (vertex count, edge count, degree)
COMBINATORICS = {
    Solid.TETRAHEDRON: (4, 6, 3),
    Solid.CUBE: (8, 12, 3),
    Solid.OCTAHEDRON: (6, 12, 4),
    Solid.DODECAHEDRON: (20, 30, 3),
    Solid.ICOSAHEDRON: (12, 30, 5),
}


def _cyclic_permutations(point):
    x, y, z = point
    return [(x, y, z), (z, x, y), (y, z, x)]


def coordinates(solid: Solid) -> np.ndarray:
    """ Standard vertex coordinates, centred at the origin """
    if solid is Solid.TETRAHEDRON:
        points = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    elif solid is Solid.CUBE:
        points = list(itertools.product((-1, 1), repeat=3))
    elif solid is Solid.OCTAHEDRON:
        points = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    elif solid is Solid.ICOSAHEDRON:
        points = []
        for s1, s2 in itertools.product((-1, 1), repeat=2):
            points.extend(_cyclic_permutations((0, s1, s2 * PHI)))
    elif solid is Solid.DODECAHEDRON:
        points = list(itertools.product((-1, 1), repeat=3))
        for s1, s2 in itertools.product((-1, 1), repeat=2):
            points.extend(_cyclic_permutations((0, s1 / PHI, s2 * PHI)))
    else:
        raise GraphError(f'Unknown solid {solid}')
    return np.array(points, dtype=float)


def _skeleton(points):
    n = len(points)
    dist = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    edge_len = dist[~np.eye(n, dtype=bool)].min()
    return [(u, v) for u in range(n) for v in range(u + 1, n)
            if abs(dist[u, v] - edge_len) <= COORD_TOL * edge_len]


def _clockwise_order(points, edges, vertex):
    """
    Edge ids incident to `vertex`, sorted clockwise as seen from outside the
    solid, starting from the smallest edge id.
    """
    normal = points[vertex] / np.linalg.norm(points[vertex])
    incident = [(i, v if u == vertex else u) for i, (u, v) in enumerate(edges) if vertex in (u, v)]

    first = points[incident[0][1]] - points[vertex]
    e1 = first - normal * np.dot(first, normal)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)

    angles = []
    for edge, other in incident:
        w = points[other] - points[vertex]
        # counterclockwise angle seen from outside; negated for clockwise
        angles.append((-math.atan2(np.dot(w, e2), np.dot(w, e1)) % (2 * math.pi), edge))
    order = [edge for _, edge in sorted(angles)]
    start = order.index(min(order))
    return order[start:] + order[:start]


@lru_cache(maxsize=None)
def build_platonic(solid: Solid) -> MetricGraph:
    """
    Builds the 1-skeleton of a Platonic solid with unit edges.

    Vertex ids follow the coordinate list, edges are sorted by their
    endpoint pair and the endpoint with the smaller id is the Zero end. At
    every vertex the ends are listed clockwise as seen from the exterior.

    :param solid: the Solid to build
    :return: MetricGraph
    """
    points = coordinates(solid)
    edges = _skeleton(points)
    orders = {v: _clockwise_order(points, edges, v) for v in range(len(points))}
    graph = graph_from_edges(edges, vertex_ids=list(range(len(points))), orders=orders)

    nv, ne, degree = COMBINATORICS[solid]
    if graph.vertex_count != nv or graph.edge_count != ne or set(graph.degrees()) != {degree}:
        raise GraphError(f'Skeleton of {solid.value} has unexpected combinatorics')

    logger.debug(f'Built {solid.value}: {nv} vertices, {ne} edges, degree {degree}')
    return graph


_AXES = {
    Solid.TETRAHEDRON: (1.0, 1.0, 1.0),
    Solid.CUBE: (0.0, 0.0, 1.0),
    Solid.OCTAHEDRON: (0.0, 0.0, 1.0),
    Solid.DODECAHEDRON: (1.0, 0.0, PHI),
    Solid.ICOSAHEDRON: (0.0, 1.0, PHI),
}


def _rotation_matrix(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    cross = np.array([[0, -axis[2], axis[1]],
                      [axis[2], 0, -axis[0]],
                      [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * cross + (1 - math.cos(angle)) * cross @ cross


class RotationSymmetry:
    """
    A proper rotation of a Platonic solid of order p, seen as a graph
    automorphism. `vertex_map[v]` is the image of vertex v and
    `edge_map[e] = (e', flipped)` is the image edge, with `flipped` set when
    the Zero end of e lands on the One end of e'.
    """

    def __init__(self, order: int, vertex_map: Dict[int, int], edge_map: List[Tuple[int, bool]]):
        self.order = order
        self.vertex_map = vertex_map
        self.edge_map = edge_map

    def edge_orbits(self):
        """
        Returns (representatives, placement) where placement[e] = (rep, m,
        flipped) says that e is the image of rep under the m-th power.
        """
        placement = {}
        representatives = []
        for edge in range(len(self.edge_map)):
            if edge in placement:
                continue
            representatives.append(edge)
            current, flipped = edge, False
            for m in range(self.order):
                if current in placement:
                    raise GraphError(f'Edge orbit of {edge} is shorter than the rotation order')
                placement[current] = (edge, m, flipped)
                image, flip = self.edge_map[current]
                current, flipped = image, flipped != flip
            if current != edge or flipped:
                raise GraphError(f'Rotation does not return edge {edge} to itself')
        return representatives, placement

    def vertex_orbits(self):
        orbits = []
        seen = set()
        for v in sorted(self.vertex_map):
            if v in seen:
                continue
            orbit = [v]
            w = self.vertex_map[v]
            while w != v:
                orbit.append(w)
                w = self.vertex_map[w]
            seen.update(orbit)
            orbits.append(orbit)
        return orbits


@lru_cache(maxsize=None)
def rotation_symmetry(solid: Solid) -> RotationSymmetry:
    """
    Rotation of order `solid.sector_count` about a vertex axis (tetrahedron,
    octahedron, icosahedron) or a face axis (cube, dodecahedron), acting on
    the graph returned by build_platonic().
    """
    points = coordinates(solid)
    graph = build_platonic(solid)
    order = solid.sector_count
    rotated = points @ _rotation_matrix(_AXES[solid], 2 * math.pi / order).T

    vertex_map = {}
    for v, p in enumerate(rotated):
        matches = np.flatnonzero(np.linalg.norm(points - p, axis=1) < COORD_TOL)
        if len(matches) != 1:
            raise GraphError(f'Rotation of {solid.value} does not permute its vertices')
        vertex_map[v] = int(matches[0])

    endpoints = graph.edge_endpoints()
    by_pair = {frozenset(pair): i for i, pair in enumerate(endpoints)}
    edge_map = []
    for u, v in endpoints:
        su, sv = vertex_map[u], vertex_map[v]
        try:
            image = by_pair[frozenset((su, sv))]
        except KeyError:
            raise GraphError(f'Rotation of {solid.value} does not preserve the edge ({u}, {v})')
        edge_map.append((image, endpoints[image][0] != su))

    return RotationSymmetry(order, vertex_map, edge_map)
