"""
Entidade RiverNetwork - rede fluvial dirigida (árvore) com distância à foz,
pesos de bacia, sub-bacias e barragens
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, TypeVar

import networkx as nx
import numpy as np

from ..exceptions import NetworkValidationError
from ..value_objects.hydro_values import NetworkLocation, NodeKind, TributaryClass

logger = logging.getLogger(__name__)

T = TypeVar("T")

_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class Node:
    id: str
    x_km: float
    y_km: float
    kind: NodeKind
    sub_basin_id: str


@dataclass(frozen=True)
class Edge:
    id: str
    up_node: str
    down_node: str
    length_km: float
    river_id: str
    trib_class: TributaryClass
    catchment_weight: float
    sub_basin_id: str


@dataclass
class RiverNetwork:
    """
    Rede fluvial imutável após a construção.

    A distância à foz (chainage) é pré-calculada para cada nó. Barragens não
    removem topologia: apenas cortam a conectividade de fluxo.
    """
    nodes: Dict[str, Node]
    edges: Dict[str, Edge]
    mouth_id: str
    distance_to_mouth: Dict[str, float]
    _graph: nx.DiGraph = field(repr=False)
    _downstream_edges: Dict[str, Tuple[str, ...]] = field(repr=False)
    _dam_free_outlet: Dict[str, bool] = field(repr=False)
    _basin_centroids: Dict[str, Tuple[float, float]] = field(repr=False)

    @classmethod
    def create(
        cls,
        node_records: Iterable[Mapping[str, Any]],
        edge_records: Iterable[Mapping[str, Any]],
    ) -> 'RiverNetwork':
        """
        Constrói e valida a rede a partir de registros de nós e trechos

        Args:
            node_records: registros com node_id, x_km, y_km, kind, sub_basin_id
            edge_records: registros com edge_id, up_node, down_node, length_km,
                river_id, trib_class, catchment_weight

        Returns:
            Rede validada com distância à foz por nó

        Raises:
            NetworkValidationError: ciclo, múltiplas fozes, comprimento não
                positivo, nó desconhecido ou peso não aditivo
        """
        nodes: Dict[str, Node] = {}
        for record in node_records:
            node_id = str(record["node_id"])
            if node_id in nodes:
                raise NetworkValidationError(f"Nó duplicado: {node_id}", node_id)
            nodes[node_id] = Node(
                id=node_id,
                x_km=float(record["x_km"]),
                y_km=float(record["y_km"]),
                kind=NodeKind.from_text(str(record["kind"])),
                sub_basin_id=str(record["sub_basin_id"]),
            )

        graph = nx.DiGraph()
        graph.add_nodes_from(nodes)
        edges: Dict[str, Edge] = {}
        for record in edge_records:
            edge_id = str(record["edge_id"])
            up, down = str(record["up_node"]), str(record["down_node"])
            if edge_id in edges:
                raise NetworkValidationError(f"Trecho duplicado: {edge_id}")
            for node_id in (up, down):
                if node_id not in nodes:
                    raise NetworkValidationError(f"Trecho {edge_id} referencia nó desconhecido {node_id}", node_id)
            length = float(record["length_km"])
            if not math.isfinite(length) or length <= 0:
                raise NetworkValidationError(f"Comprimento não positivo no trecho {edge_id}: {length}")
            weight = float(record["catchment_weight"])
            if not math.isfinite(weight) or weight < 0:
                raise NetworkValidationError(f"Peso de bacia negativo no trecho {edge_id}: {weight}")
            if graph.has_edge(up, down):
                raise NetworkValidationError(f"Trechos paralelos entre {up} e {down}", up)
            edges[edge_id] = Edge(
                id=edge_id,
                up_node=up,
                down_node=down,
                length_km=length,
                river_id=str(record["river_id"]),
                trib_class=TributaryClass.from_text(str(record["trib_class"])),
                catchment_weight=weight,
                sub_basin_id=nodes[up].sub_basin_id,
            )
            graph.add_edge(up, down, edge_id=edge_id)

        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise NetworkValidationError(f"Ciclo detectado: {cycle}", cycle[0][0])

        for node_id in graph.nodes:
            if graph.out_degree(node_id) > 1:
                raise NetworkValidationError(f"Nó {node_id} tem mais de um trecho de jusante", node_id)

        sinks = sorted(n for n in graph.nodes if graph.out_degree(n) == 0)
        if len(sinks) != 1:
            raise NetworkValidationError(f"A rede deve ter exatamente uma foz; encontradas {len(sinks)}: {sinks}")
        mouth_id = sinks[0]

        out_edge: Dict[str, str] = {u: data["edge_id"] for u, _, data in graph.edges(data=True)}

        cls._check_weights(graph, edges, out_edge)

        distance: Dict[str, float] = {mouth_id: 0.0}
        for node_id in reversed(list(nx.topological_sort(graph))):
            if node_id in out_edge:
                edge = edges[out_edge[node_id]]
                distance[node_id] = edge.length_km + distance[edge.down_node]

        downstream, dam_free = cls._trace_downstream(nodes, edges, out_edge)
        centroids = cls._basin_centroids_of(nodes, edges, graph, out_edge)

        logger.info(f"Rede construída: {len(nodes)} nós, {len(edges)} trechos, foz {mouth_id}")
        return cls(
            nodes=nodes,
            edges=edges,
            mouth_id=mouth_id,
            distance_to_mouth=distance,
            _graph=graph,
            _downstream_edges=downstream,
            _dam_free_outlet=dam_free,
            _basin_centroids=centroids,
        )

    @staticmethod
    def _check_weights(graph: nx.DiGraph, edges: Dict[str, Edge], out_edge: Dict[str, str]) -> None:
        for node_id in graph.nodes:
            if node_id not in out_edge:
                continue
            inflow = [edges[data["edge_id"]].catchment_weight for _, _, data in graph.in_edges(node_id, data=True)]
            if not inflow:
                continue
            outflow = edges[out_edge[node_id]].catchment_weight
            total = sum(inflow)
            tol = _WEIGHT_TOL * max(1.0, abs(outflow))
            if len(inflow) >= 2 and abs(total - outflow) > tol:
                raise NetworkValidationError(
                    f"Peso não aditivo no nó {node_id}: montante {total} != jusante {outflow}", node_id
                )
            if len(inflow) == 1 and outflow < total - tol:
                raise NetworkValidationError(
                    f"Peso decresce para jusante no nó {node_id}: {total} -> {outflow}", node_id
                )

    @staticmethod
    def _trace_downstream(
        nodes: Dict[str, Node], edges: Dict[str, Edge], out_edge: Dict[str, str]
    ) -> Tuple[Dict[str, Tuple[str, ...]], Dict[str, bool]]:
        downstream: Dict[str, Tuple[str, ...]] = {}
        dam_free: Dict[str, bool] = {}
        for edge_id, edge in edges.items():
            chain: List[str] = []
            node_id = edge.down_node
            blocked = False
            while True:
                if nodes[node_id].kind == NodeKind.DAM:
                    blocked = True
                    break
                if node_id not in out_edge:
                    break
                nxt = edges[out_edge[node_id]]
                chain.append(nxt.id)
                node_id = nxt.down_node
            downstream[edge_id] = tuple(chain)
            dam_free[edge_id] = not blocked
        return downstream, dam_free

    @staticmethod
    def _basin_centroids_of(
        nodes: Dict[str, Node], edges: Dict[str, Edge], graph: nx.DiGraph, out_edge: Dict[str, str]
    ) -> Dict[str, Tuple[float, float]]:
        # peso do nó = peso do trecho de jusante (foz: soma dos afluentes)
        members: Dict[str, List[Tuple[float, float, float]]] = {}
        for node in nodes.values():
            if node.id in out_edge:
                weight = edges[out_edge[node.id]].catchment_weight
            else:
                weight = sum(edges[d["edge_id"]].catchment_weight for _, _, d in graph.in_edges(node.id, data=True))
            members.setdefault(node.sub_basin_id, []).append((node.x_km, node.y_km, weight))
        centroids: Dict[str, Tuple[float, float]] = {}
        for basin_id, rows in members.items():
            arr = np.asarray(rows, dtype=float)
            weights = arr[:, 2]
            if weights.sum() <= 0:
                weights = np.ones(len(arr))
            centroids[basin_id] = (
                float(np.average(arr[:, 0], weights=weights)),
                float(np.average(arr[:, 1], weights=weights)),
            )
        return centroids

    # Consultas

    def edge(self, edge_id: str) -> Edge:
        try:
            return self.edges[edge_id]
        except KeyError:
            raise NetworkValidationError(f"Trecho desconhecido: {edge_id}")

    def is_valid_location(self, location: NetworkLocation) -> bool:
        edge = self.edges.get(location.edge_id)
        return edge is not None and 0.0 <= location.offset_km <= edge.length_km

    def chainage(self, location: NetworkLocation) -> float:
        """Distância ao longo do rio até a foz (km)"""
        edge = self.edge(location.edge_id)
        return self.distance_to_mouth[edge.down_node] + edge.length_km - location.offset_km

    def catchment_weight(self, location: NetworkLocation) -> float:
        return self.edge(location.edge_id).catchment_weight

    def sub_basin_of(self, location: NetworkLocation) -> str:
        return self.edge(location.edge_id).sub_basin_id

    def basin_centroid(self, sub_basin_id: str) -> Tuple[float, float]:
        return self._basin_centroids[sub_basin_id]

    @property
    def sub_basin_ids(self) -> List[str]:
        return sorted(self._basin_centroids)

    @property
    def edge_ids(self) -> List[str]:
        return sorted(self.edges)

    @property
    def river_ids(self) -> List[str]:
        return sorted({edge.river_id for edge in self.edges.values()})

    def edges_of_river(self, river_id: str) -> List[Edge]:
        return [self.edges[e] for e in self.edge_ids if self.edges[e].river_id == river_id]

    def river_chainage_range(self, river_id: str) -> Tuple[float, float]:
        """Intervalo de distância à foz coberto por um rio"""
        edges = self.edges_of_river(river_id)
        if not edges:
            raise NetworkValidationError(f"Rio desconhecido: {river_id}")
        lows = [self.distance_to_mouth[e.down_node] for e in edges]
        highs = [self.distance_to_mouth[e.up_node] for e in edges]
        return min(lows), max(highs)

    def downstream_edges(self, edge_id: str) -> Tuple[str, ...]:
        """Trechos a jusante alcançáveis sem atravessar barragem"""
        return self._downstream_edges[edge_id]

    def has_dam_free_outlet(self, edge_id: str) -> bool:
        return self._dam_free_outlet[edge_id]

    def location_of_node(self, node_id: str) -> NetworkLocation:
        """Localização de um nó: início do trecho de jusante (ou fim do afluente, na foz)"""
        if node_id not in self.nodes:
            raise NetworkValidationError(f"Nó desconhecido: {node_id}", node_id)
        for _, _, data in self._graph.out_edges(node_id, data=True):
            return NetworkLocation(data["edge_id"], 0.0)
        in_edges = sorted(data["edge_id"] for _, _, data in self._graph.in_edges(node_id, data=True))
        if not in_edges:
            raise NetworkValidationError(f"Nó isolado: {node_id}", node_id)
        return NetworkLocation(in_edges[0], self.edges[in_edges[0]].length_km)

    def is_flow_connected(self, a: NetworkLocation, b: NetworkLocation) -> bool:
        return self.river_distance(a, b) is not None

    def river_distance(self, a: NetworkLocation, b: NetworkLocation) -> Optional[float]:
        """
        Distância ao longo do rio entre dois pontos conectados por fluxo

        Returns:
            Distância em km, ou None se os pontos não estão conectados
            (nenhum está a jusante do outro, ou há barragem entre eles)
        """
        if a.edge_id == b.edge_id:
            return abs(self.chainage(a) - self.chainage(b))
        if b.edge_id in self._downstream_edges[a.edge_id] or a.edge_id in self._downstream_edges[b.edge_id]:
            return abs(self.chainage(a) - self.chainage(b))
        return None

    def basin_distance(self, a: NetworkLocation, b: NetworkLocation) -> float:
        """Distância euclidiana entre os centróides das sub-bacias (km)"""
        basin_a, basin_b = self.sub_basin_of(a), self.sub_basin_of(b)
        if basin_a == basin_b:
            return 0.0
        xa, ya = self._basin_centroids[basin_a]
        xb, yb = self._basin_centroids[basin_b]
        return math.hypot(xa - xb, ya - yb)

    def mask_upstream_of_dams(self, observations: Sequence[T]) -> List[T]:
        """
        Descarta observações a montante de barragens

        Args:
            observations: itens com atributo `location`

        Returns:
            Observações com caminho até a foz livre de barragens
        """
        kept = [obs for obs in observations if self._dam_free_outlet[obs.location.edge_id]]
        if len(kept) != len(observations):
            logger.info(f"Mascaramento de barragens removeu {len(observations) - len(kept)} observações")
        return kept

    @cached_property
    def connectivity(self) -> Tuple[Dict[str, int], np.ndarray]:
        """
        Matriz simétrica de conectividade de fluxo entre trechos

        Returns:
            (índice de cada trecho, matriz booleana E x E)
        """
        index = {edge_id: i for i, edge_id in enumerate(self.edge_ids)}
        matrix = np.eye(len(index), dtype=bool)
        for edge_id, chain in self._downstream_edges.items():
            for other in chain:
                matrix[index[edge_id], index[other]] = True
                matrix[index[other], index[edge_id]] = True
        return index, matrix

    @cached_property
    def basin_index(self) -> Tuple[Dict[str, int], np.ndarray]:
        """Índice de cada sub-bacia e matriz (B x 2) dos centróides"""
        order = self.sub_basin_ids
        centroids = np.array([self._basin_centroids[b] for b in order], dtype=float).reshape(len(order), 2)
        return {b: i for i, b in enumerate(order)}, centroids

    def to_records(self) -> Tuple[List[Dict[str, Any]], List[Dict[str, Any]]]:
        """Registros de nós e trechos no formato dos arquivos CSV"""
        node_rows = [
            {"node_id": n.id, "x_km": n.x_km, "y_km": n.y_km, "kind": n.kind.value, "sub_basin_id": n.sub_basin_id}
            for n in (self.nodes[k] for k in sorted(self.nodes))
        ]
        edge_rows = [
            {
                "edge_id": e.id,
                "up_node": e.up_node,
                "down_node": e.down_node,
                "length_km": e.length_km,
                "river_id": e.river_id,
                "trib_class": e.trib_class.value,
                "catchment_weight": e.catchment_weight,
            }
            for e in (self.edges[k] for k in self.edge_ids)
        ]
        return node_rows, edge_rows
