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

import json
import logging
from collections import deque
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class GraphError(Exception):
    pass


class End(Enum):
    ZERO = 0
    ONE = 1

    @property
    def other(self):
        return End.ONE if self is End.ZERO else End.ZERO


class EdgeEnd(NamedTuple):
    edge: int
    end: End


class Vertex(NamedTuple):
    id: int
    ends: Tuple[EdgeEnd, ...]

    @property
    def degree(self):
        return len(self.ends)


class ValidationReport:

    def __init__(self, issues: Optional[List[str]] = None):
        self.issues = issues or []

    @property
    def ok(self):
        return not self.issues

    def __repr__(self):
        return f'ValidationReport(issues={self.issues})'


class MetricGraph:
    """
    Finite equilateral metric graph. Every edge is a copy of the interval
    (0, 1); each vertex lists the edge ends attached to it, in the cyclic
    order used by orientation-sensitive couplings.

    Instances are immutable: the edit helpers below return new graphs.
    """
    __slots__ = ('_vertices', '_edge_count', '_index')

    def __init__(self, vertices: Sequence[Vertex], edge_count: int):
        vertices = tuple(Vertex(int(v.id), tuple(EdgeEnd(int(e.edge), End(e.end)) for e in v.ends))
                         for v in vertices)
        object.__setattr__(self, '_vertices', vertices)
        object.__setattr__(self, '_edge_count', int(edge_count))
        object.__setattr__(self, '_index', {v.id: pos for pos, v in enumerate(vertices)})

    def __setattr__(self, name, value):
        raise AttributeError('MetricGraph is immutable')

    @property
    def vertices(self) -> Tuple[Vertex, ...]:
        return self._vertices

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def vertex_count(self) -> int:
        return len(self._vertices)

    @property
    def dimension(self) -> int:
        """ Number of unknowns of the secular system, two per edge """
        return 2 * self._edge_count

    def vertex(self, vertex_id: int) -> Vertex:
        try:
            return self._vertices[self._index[vertex_id]]
        except KeyError:
            raise GraphError(f'Unknown vertex id {vertex_id}')

    def position(self, vertex_id: int) -> int:
        try:
            return self._index[vertex_id]
        except KeyError:
            raise GraphError(f'Unknown vertex id {vertex_id}')

    def degrees(self) -> List[int]:
        return [v.degree for v in self._vertices]

    def edge_endpoints(self) -> List[Tuple[int, int]]:
        """
        Returns, per edge, the ids of the vertices holding its Zero and One
        ends. Requires a graph that passes validate().
        """
        endpoints = [[None, None] for _ in range(self._edge_count)]
        for v in self._vertices:
            for e in v.ends:
                endpoints[e.edge][e.end.value] = v.id
        if any(None in pair for pair in endpoints):
            raise GraphError('Graph has dangling edge ends')
        return [tuple(pair) for pair in endpoints]

    def adjacency_matrix(self) -> np.ndarray:
        """ Vertex adjacency matrix, rows and columns in vertex order """
        adj = np.zeros((self.vertex_count, self.vertex_count))
        for u, v in self.edge_endpoints():
            i, j = self._index[u], self._index[v]
            adj[i, j] += 1
            adj[j, i] += 1
        return adj

    def __eq__(self, other):
        if not isinstance(other, MetricGraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edge_count == other._edge_count

    def __hash__(self):
        return hash((self._vertices, self._edge_count))

    def __repr__(self):
        return f'MetricGraph(vertices={self.vertex_count}, edges={self._edge_count})'


def validate(graph: MetricGraph) -> ValidationReport:
    """
    Checks vertex id uniqueness, edge end pairing (every edge has exactly one
    Zero and one One end, each held by exactly one vertex), the degree sum and
    connectedness.
    """
    issues = []
    seen_ids = set()
    for v in graph.vertices:
        if v.id in seen_ids:
            issues.append(f'duplicate vertex: id {v.id}')
        seen_ids.add(v.id)

    holders: Dict[EdgeEnd, int] = {}
    for v in graph.vertices:
        for e in v.ends:
            if not 0 <= e.edge < graph.edge_count:
                issues.append(f'unknown edge: edge {e.edge} at vertex {v.id}')
                continue
            if e in holders:
                issues.append(f'duplicate end: edge {e.edge} end {e.end.value} '
                              f'at vertices {holders[e]} and {v.id}')
                continue
            holders[e] = v.id

    degree_sum = sum(graph.degrees())
    if degree_sum != 2 * graph.edge_count:
        issues.append(f'dangling end: degree sum {degree_sum} differs from 2N = {2 * graph.edge_count}')
    for edge in range(graph.edge_count):
        for end in End:
            if EdgeEnd(edge, end) not in holders:
                issues.append(f'dangling end: edge {edge} end {end.value} is not attached')

    if not issues and graph.vertex_count > 0:
        reached = _reachable(graph, graph.vertices[0].id)
        if len(reached) != graph.vertex_count:
            issues.append(f'disconnected: {graph.vertex_count - len(reached)} vertices '
                          f'not reachable from vertex {graph.vertices[0].id}')

    return ValidationReport(issues)


def _neighbours(graph: MetricGraph) -> Dict[int, List[int]]:
    nbrs = {v.id: [] for v in graph.vertices}
    for u, v in graph.edge_endpoints():
        nbrs[u].append(v)
        nbrs[v].append(u)
    return nbrs


def _reachable(graph, root):
    nbrs = _neighbours(graph)
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in nbrs[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def distance_profile(graph: MetricGraph, vertex_id: int) -> List[int]:
    """ Sizes of the breadth-first layers rooted at the given vertex """
    graph.vertex(vertex_id)
    nbrs = _neighbours(graph)
    dist = {vertex_id: 0}
    queue = deque([vertex_id])
    while queue:
        u = queue.popleft()
        for w in nbrs[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    profile = [0] * (max(dist.values()) + 1)
    for d in dist.values():
        profile[d] += 1
    return profile


def _replace_vertex(graph, vertex_id, ends):
    pos = graph.position(vertex_id)
    vertices = list(graph.vertices)
    vertices[pos] = Vertex(vertex_id, tuple(ends))
    return MetricGraph(vertices, graph.edge_count)


def rotate_vertex_order(graph: MetricGraph, vertex_id: int, shift: int) -> MetricGraph:
    """
    Returns a copy of the graph in which the end list of the given vertex is
    cyclically rotated by `shift` positions.
    """
    ends = graph.vertex(vertex_id).ends
    if not ends:
        return graph
    shift %= len(ends)
    return _replace_vertex(graph, vertex_id, ends[shift:] + ends[:shift])


def reorder_vertex(graph: MetricGraph, vertex_id: int, order: Sequence[int]) -> MetricGraph:
    """
    Returns a copy of the graph in which the end list of the given vertex is
    replaced by ends[order[0]], ends[order[1]], ...
    """
    ends = graph.vertex(vertex_id).ends
    if sorted(order) != list(range(len(ends))):
        raise GraphError(f'{list(order)} is not a permutation of the {len(ends)} ends of vertex {vertex_id}')
    return _replace_vertex(graph, vertex_id, [ends[i] for i in order])


def flip_edge(graph: MetricGraph, edge_id: int) -> MetricGraph:
    """ Swaps the Zero and One ends of one edge, reversing its parametrization """
    if not 0 <= edge_id < graph.edge_count:
        raise GraphError(f'Unknown edge id {edge_id}')
    vertices = []
    for v in graph.vertices:
        ends = tuple(EdgeEnd(e.edge, e.end.other) if e.edge == edge_id else e for e in v.ends)
        vertices.append(Vertex(v.id, ends))
    return MetricGraph(vertices, graph.edge_count)


def graph_from_edges(edges: Sequence[Tuple[int, int]], vertex_ids: Optional[Sequence[int]] = None,
                     orders: Optional[Dict[int, Sequence[int]]] = None) -> MetricGraph:
    """
    Builds a graph from a list of (u, v) vertex pairs; edge i gets its Zero end
    at u and its One end at v. `orders` optionally gives, per vertex id, the
    edge ids in the cyclic order wanted at that vertex.
    """
    if vertex_ids is None:
        vertex_ids = sorted({x for pair in edges for x in pair})
    ends = {vid: [] for vid in vertex_ids}
    for i, (u, v) in enumerate(edges):
        if u == v:
            raise GraphError(f'Edge {i} is a self-loop at vertex {u}')
        try:
            ends[u].append(EdgeEnd(i, End.ZERO))
            ends[v].append(EdgeEnd(i, End.ONE))
        except KeyError as e:
            raise GraphError(f'Edge {i} refers to unknown vertex {e.args[0]}')

    if orders:
        for vid, order in orders.items():
            by_edge = {e.edge: e for e in ends[vid]}
            if sorted(order) != sorted(by_edge):
                raise GraphError(f'Cyclic order for vertex {vid} does not match its edges')
            ends[vid] = [by_edge[edge] for edge in order]

    return MetricGraph([Vertex(vid, tuple(ends[vid])) for vid in vertex_ids], len(edges))


def to_json(graph: MetricGraph) -> dict:
    return {
        'vertices': [{'id': v.id, 'ends': [{'edge': e.edge, 'end': e.end.value} for e in v.ends]}
                     for v in graph.vertices],
        'edge_count': graph.edge_count
    }


def from_json(data: dict) -> MetricGraph:
    try:
        vertices = [Vertex(int(v['id']), tuple(EdgeEnd(int(e['edge']), End(int(e['end']))) for e in v['ends']))
                    for v in data['vertices']]
        edge_count = int(data['edge_count'])
    except (KeyError, TypeError, ValueError) as e:
        raise GraphError(f'Malformed graph document: {e}')
    return MetricGraph(vertices, edge_count)


def load_graph(filename: str) -> MetricGraph:
    logger.debug(f'Loading graph from {filename}')
    try:
        with open(filename, 'r') as graph_file:
            data = json.load(graph_file)
    except (OSError, json.JSONDecodeError) as e:
        raise GraphError(f'Unable to read graph file {filename}: {e}')

    graph = from_json(data)
    report = validate(graph)
    if not report.ok:
        raise GraphError(f'Invalid graph in {filename}: {"; ".join(report.issues)}')
    return graph


def dump_graph(graph: MetricGraph, filename: str):
    with open(filename, 'w') as graph_file:
        json.dump(to_json(graph), graph_file, indent=2)
