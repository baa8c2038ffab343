"""
Geração de redes fluviais sintéticas: rio principal com tributários em
ângulo, sub-bacias por tributário/trecho e pesos de bacia aditivos
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ...domain.entities.network import RiverNetwork
from ...domain.exceptions import NetworkValidationError
from ...domain.value_objects.hydro_values import NodeKind, TributaryClass

logger = logging.getLogger(__name__)

MAIN_RIVER = "main"


@dataclass(frozen=True)
class TributaryLayout:
    river_id: str
    junction_km: float
    length_km: float
    trib_class: TributaryClass = TributaryClass.MAJOR


@dataclass(frozen=True)
class SiteLayout:
    """Nó intermediário (régua ou barragem) num rio, por distância à foz"""
    river_id: str
    chainage_km: float
    kind: NodeKind = NodeKind.GAUGE_SITE
    node_id: str = ""


@dataclass(frozen=True)
class NetworkLayout:
    main_length_km: float
    tributaries: Tuple[TributaryLayout, ...] = ()
    sites: Tuple[SiteLayout, ...] = ()
    weight_per_km: float = 1.0
    angle_deg: float = 60.0

    def __post_init__(self):
        if self.main_length_km <= 0:
            raise ValueError("main_length_km deve ser > 0")
        for trib in self.tributaries:
            if not 0 < trib.junction_km < self.main_length_km:
                raise ValueError(f"Confluência de {trib.river_id} fora do rio principal")
            if trib.length_km <= 0:
                raise ValueError(f"Comprimento de {trib.river_id} deve ser > 0")
        junctions = [t.junction_km for t in self.tributaries]
        if len(set(junctions)) != len(junctions):
            raise ValueError("Dois tributários na mesma confluência")


@dataclass
class _River:
    river_id: str
    base_km: float
    length_km: float
    trib_class: TributaryClass
    origin: Tuple[float, float]
    direction: Tuple[float, float]
    breakpoints: Dict[float, Tuple[str, NodeKind]] = field(default_factory=dict)

    def xy(self, local_km: float) -> Tuple[float, float]:
        return (self.origin[0] + self.direction[0] * local_km, self.origin[1] + self.direction[1] * local_km)


def generate_network(layout: NetworkLayout) -> RiverNetwork:
    """
    Monta uma rede a partir do layout

    O rio principal corre ao longo do eixo x com a foz na origem; cada
    tributário sai da confluência com o ângulo do layout, alternando margens.
    O peso de bacia cresce com o comprimento drenado e soma nas confluências.

    Raises:
        NetworkValidationError: rios duplicados ou sítio fora do rio
    """
    rivers: Dict[str, _River] = {
        MAIN_RIVER: _River(MAIN_RIVER, 0.0, layout.main_length_km, TributaryClass.MAIN_STEM, (0.0, 0.0), (1.0, 0.0))
    }
    angle = math.radians(layout.angle_deg)
    for k, trib in enumerate(sorted(layout.tributaries, key=lambda t: (t.junction_km, t.river_id))):
        if trib.river_id in rivers:
            raise NetworkValidationError(f"Rio duplicado no layout: {trib.river_id}")
        side = 1.0 if k % 2 == 0 else -1.0
        rivers[trib.river_id] = _River(
            trib.river_id, trib.junction_km, trib.length_km, trib.trib_class,
            (trib.junction_km, 0.0), (math.cos(angle), side * math.sin(angle)),
        )

    main = rivers[MAIN_RIVER]
    main.breakpoints[0.0] = ("mouth", NodeKind.MOUTH)
    main.breakpoints[layout.main_length_km] = (f"{MAIN_RIVER}-source", NodeKind.SOURCE)
    for trib in layout.tributaries:
        junction = f"J-{trib.river_id}"
        main.breakpoints[trib.junction_km] = (junction, NodeKind.CONFLUENCE)
        rivers[trib.river_id].breakpoints[0.0] = (junction, NodeKind.CONFLUENCE)
        rivers[trib.river_id].breakpoints[trib.length_km] = (f"{trib.river_id}-source", NodeKind.SOURCE)
    for k, site in enumerate(layout.sites):
        river = rivers.get(site.river_id)
        if river is None:
            raise NetworkValidationError(f"Sítio em rio desconhecido: {site.river_id}")
        local = site.chainage_km - river.base_km
        if not 0 < local < river.length_km or local in river.breakpoints:
            raise NetworkValidationError(f"Sítio fora do rio ou sobre outro nó: {site.river_id} @ {site.chainage_km}")
        prefix = "G" if site.kind == NodeKind.GAUGE_SITE else "D"
        river.breakpoints[local] = (site.node_id or f"{prefix}-{site.river_id}-{k:02d}", site.kind)

    nodes: List[Dict[str, object]] = []
    edges: List[Dict[str, object]] = []
    seen: set = set()
    trib_weight = {t.river_id: t.length_km * layout.weight_per_km for t in layout.tributaries}
    for river in rivers.values():
        points = sorted(river.breakpoints)
        sub_basin = f"SB-{river.river_id}"
        for local in points:
            node_id, kind = river.breakpoints[local]
            if node_id in seen:
                continue
            seen.add(node_id)
            x, y = river.xy(local)
            if river.river_id == MAIN_RIVER:
                # sub-bacias do rio principal delimitadas pelas confluências
                sub_basin = f"SB-{MAIN_RIVER}-{sum(1 for t in layout.tributaries if t.junction_km < local)}"
            nodes.append({"node_id": node_id, "x_km": round(x, 6), "y_km": round(y, 6), "kind": kind.value,
                          "sub_basin_id": sub_basin})
        for k, (down, up) in enumerate(zip(points, points[1:])):
            if river.river_id == MAIN_RIVER:
                above = sum(w for t, w in trib_weight.items() if _junction_of(layout, t) > down)
                weight = _main_headwater(layout) * layout.weight_per_km + above
            else:
                weight = trib_weight[river.river_id]
            edges.append({
                "edge_id": f"{river.river_id}-{k:02d}",
                "up_node": river.breakpoints[up][0],
                "down_node": river.breakpoints[down][0],
                "length_km": up - down,
                "river_id": river.river_id,
                "trib_class": river.trib_class.value,
                "catchment_weight": weight,
            })

    network = RiverNetwork.create(nodes, edges)
    logger.info(f"Rede sintética: {len(rivers)} rios, {len(network.edges)} trechos")
    return network


def _junction_of(layout: NetworkLayout, river_id: str) -> float:
    return next(t.junction_km for t in layout.tributaries if t.river_id == river_id)


def _main_headwater(layout: NetworkLayout) -> float:
    """Comprimento do rio principal acima da confluência mais alta"""
    top = max((t.junction_km for t in layout.tributaries), default=0.0)
    return layout.main_length_km - top
