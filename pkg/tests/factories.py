"""
Construtores de registros e observações usados pelos testes
"""

import numpy as np

from src.domain.entities.observation import Observation
from src.domain.value_objects.hydro_values import NetworkLocation, NodeKind, OrbitClass, TributaryClass
from src.infrastructure.simulation.network_layout import NetworkLayout, SiteLayout, TributaryLayout, generate_network


def node(node_id, x_km, y_km, kind, sub_basin_id):
    return {"node_id": node_id, "x_km": x_km, "y_km": y_km, "kind": kind, "sub_basin_id": sub_basin_id}


def edge(edge_id, up, down, length_km, weight, river_id="main", trib_class="main-stem"):
    return {
        "edge_id": edge_id,
        "up_node": up,
        "down_node": down,
        "length_km": length_km,
        "river_id": river_id,
        "trib_class": trib_class,
        "catchment_weight": weight,
    }


def observation(edge_id, offset_km, epoch, height_m, mission="A", orbit=OrbitClass.SHORT_REPEAT, track="T1",
                std=0.3, quality=1.0):
    return Observation(
        location=NetworkLocation(edge_id, offset_km),
        epoch=epoch,
        height_m=height_m,
        mission=mission,
        orbit_class=orbit,
        track_id=track,
        along_track_std_m=std,
        quality_factor=quality,
    )


def random_network(rng, with_dam=False):
    """Rio principal com até quatro tributários sorteados; opcionalmente uma barragem no principal"""
    main_km = float(rng.uniform(100.0, 400.0))
    junctions = rng.choice(np.arange(10.0, main_km - 10.0, 10.0), size=int(rng.integers(0, 5)), replace=False)
    tributaries = tuple(
        TributaryLayout(f"t{k}", float(j), float(rng.uniform(20.0, 150.0)),
                        TributaryClass.MAJOR if k % 2 else TributaryClass.MINOR)
        for k, j in enumerate(sorted(junctions))
    )
    sites = ()
    if with_dam:
        sites = (SiteLayout("main", float(rng.integers(1, int(main_km // 10))) * 10.0 - 5.0, NodeKind.DAM, "D"),)
    return generate_network(NetworkLayout(main_length_km=main_km, tributaries=tributaries, sites=sites))
