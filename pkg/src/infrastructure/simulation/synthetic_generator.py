"""
Simulador sintético: campo verdade de nível d'água, amostragem por missão,
réguas diárias e campo residual com a covariância do modelo

O gerador pseudoaleatório é o PCG64 do numpy; cada missão recebe um fluxo
filho de `SeedSequence(seed)` na ordem da configuração.
"""

import logging
import math
from datetime import date, timedelta
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from ...application.interfaces.services import ISimulationService
from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import GaugeSeries, Observation
from ...domain.value_objects.hydro_values import CovarianceParams, NetworkLocation, OrbitClass
from ...domain.value_objects.simulation_values import MissionConfig, TruthConfig
from ..geostatistics.covariance_model import LocationArrays, SpatioTemporalCovariance

logger = logging.getLogger(__name__)

DAYS_PER_YEAR = 365.25
NON_REPEAT_CYCLE_DAYS = 365
OFFSET_DECIMALS = 3


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class SyntheticGenerator(ISimulationService):
    """Gerador determinístico dado (semente, configuração)"""

    def __init__(self, covariance: Optional[SpatioTemporalCovariance] = None):
        self.covariance = covariance or SpatioTemporalCovariance()

    # Campo verdade

    def truth_levels(self, network: RiverNetwork, config: TruthConfig, location: NetworkLocation,
                     epochs: Sequence[date]) -> np.ndarray:
        """Nível verdade num local para várias épocas"""
        chainage = network.chainage(location)
        ordinals = np.array([e.toordinal() for e in epochs], dtype=float)
        doy = np.array([e.timetuple().tm_yday for e in epochs], dtype=float)

        level = np.full(len(ordinals), config.profile_for(location.edge_id).level_at(chainage))
        level += config.seasonal_amplitude_m * np.cos(2 * np.pi * (doy - config.seasonal_peak_doy) / DAYS_PER_YEAR)

        for event in config.events:
            distance = network.river_distance(event.origin, location)
            if distance is None or chainage > network.chainage(event.origin):
                continue
            start = date(event.year, 1, 1).toordinal() + event.onset_doy - 1
            local = ordinals - start - distance / event.celerity_km_per_day
            active = (local >= 0) & (local <= event.duration_days)
            pulse = np.where(active, np.sin(np.pi * np.clip(local, 0, None) / event.duration_days), 0.0)
            attenuation_km = event.attenuation_km or config.attenuation_km
            damping = math.exp(-distance / attenuation_km) if attenuation_km else 1.0
            level += event.sign * event.amplitude_m * damping * pulse
        return level

    def truth_level(self, network: RiverNetwork, config: TruthConfig, location: NetworkLocation, epoch: date) -> float:
        """
        Nível verdade: perfil médio + senoide sazonal + pulsos de eventos

        Cada pulso é avaliado em t - distância/celeridade e vale zero a
        montante da origem ou fora da conexão de fluxo.
        """
        return float(self.truth_levels(network, config, location, [epoch])[0])

    # Amostragem

    def sample_missions(self, network: RiverNetwork, config: TruthConfig, missions: Sequence[MissionConfig],
                        era: Tuple[date, date], seed: int) -> List[Observation]:
        """
        Amostra todas as missões na era [início, fim)

        Args:
            network: rede fluvial
            config: campo verdade e contaminação
            missions: missões, na ordem que define os fluxos aleatórios
            era: intervalo semiaberto de datas
            seed: semente

        Returns:
            Observações ordenadas por (missão, época, trecho, offset)
        """
        era_start, era_end = era
        if era_end <= era_start:
            raise ValueError(f"Era vazia: {era_start} -> {era_end}")
        names = [m.name for m in missions]
        if len(set(names)) != len(names):
            raise ValueError("Nomes de missão duplicados")

        children = np.random.SeedSequence(seed).spawn(len(missions))
        observations: List[Observation] = []
        for mission, child in zip(missions, children):
            rng = np.random.Generator(np.random.PCG64(child))
            start = max(era_start, mission.start) if mission.start else era_start
            end = min(era_end, mission.end) if mission.end else era_end
            if end <= start:
                logger.warning(f"Missão {mission.name} fora da era; nenhuma observação")
                continue
            crossings = self._schedule(network, mission, start, end, rng)
            sampled = self._measure(network, config, mission, crossings, rng)
            logger.info(f"Missão {mission.name}: {len(sampled)} observações")
            observations.extend(sampled)

        observations.sort(key=lambda o: (o.mission, o.epoch, o.location.edge_id, o.location.offset_km, o.track_id))
        return observations

    def _schedule(self, network: RiverNetwork, mission: MissionConfig, start: date, end: date,
                  rng: np.random.Generator) -> List[Tuple[NetworkLocation, date, str]]:
        span = (end - start).days
        crossings: List[Tuple[NetworkLocation, date, str]] = []

        if mission.orbit_class == OrbitClass.SHORT_REPEAT:
            stations = list(mission.vs_locations) or self.virtual_stations(network, mission.vs_spacing_km or 70.0)
            for k, location in enumerate(stations):
                for day in range(mission.phase_day, span, mission.repeat_days):
                    crossings.append((location, start + timedelta(days=day), f"{mission.name}-VS{k:03d}"))

        elif mission.orbit_class == OrbitClass.LONG_REPEAT:
            locations = self.random_locations(network, mission.crossings_per_cycle, rng)
            phases = rng.integers(0, mission.repeat_days, size=len(locations))
            for k, (location, phase) in enumerate(zip(locations, phases)):
                for day in range(int(phase), span, mission.repeat_days):
                    crossings.append((location, start + timedelta(days=day), f"{mission.name}-T{k:04d}"))

        else:
            seen: Set[Tuple[NetworkLocation, date]] = set()
            for cycle, cycle_start in enumerate(range(0, span, NON_REPEAT_CYCLE_DAYS)):
                cycle_span = min(NON_REPEAT_CYCLE_DAYS, span - cycle_start)
                locations = self.random_locations(network, mission.crossings_per_cycle, rng)
                days = rng.integers(0, cycle_span, size=len(locations))
                for k, (location, day) in enumerate(zip(locations, days)):
                    epoch = start + timedelta(days=cycle_start + int(day))
                    if (location, epoch) in seen:
                        continue
                    seen.add((location, epoch))
                    crossings.append((location, epoch, f"{mission.name}-C{cycle:02d}-{k:04d}"))
        return crossings

    def _measure(self, network: RiverNetwork, config: TruthConfig, mission: MissionConfig,
                 crossings: List[Tuple[NetworkLocation, date, str]], rng: np.random.Generator) -> List[Observation]:
        if not crossings:
            return []
        by_location: Dict[NetworkLocation, List[int]] = {}
        for i, (location, _, _) in enumerate(crossings):
            by_location.setdefault(location, []).append(i)
        truth = np.empty(len(crossings))
        for location, rows in by_location.items():
            truth[rows] = self.truth_levels(network, config, location, [crossings[i][1] for i in rows])

        n = len(crossings)
        noise = rng.normal(0.0, mission.noise_std_m, size=n) if mission.noise_std_m > 0 else np.zeros(n)
        base_std = mission.noise_std_m if mission.noise_std_m > 0 else 0.1
        along_track = base_std * rng.uniform(0.8, 1.2, size=n)
        outlier = rng.random(n) < config.outlier_rate
        sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)

        heights = truth + mission.bias_m + noise + np.where(outlier, sign * config.outlier_magnitude_m, 0.0)
        along_track = np.where(outlier, along_track * config.outlier_std_factor, along_track)

        return [
            Observation(
                location=location,
                epoch=epoch,
                height_m=float(heights[i]),
                mission=mission.name,
                orbit_class=mission.orbit_class,
                track_id=track_id,
                along_track_std_m=float(along_track[i]),
                quality_factor=mission.quality_factor,
            )
            for i, (location, epoch, track_id) in enumerate(crossings)
        ]

    @staticmethod
    def virtual_stations(network: RiverNetwork, spacing_km: float) -> List[NetworkLocation]:
        """Estações virtuais a cada `spacing_km` ao longo de cada trecho, começando em meio espaçamento"""
        if spacing_km <= 0:
            raise ValueError("vs_spacing_km deve ser > 0")
        stations = []
        for edge_id in network.edge_ids:
            length = network.edges[edge_id].length_km
            offset = spacing_km / 2
            while offset < length:
                stations.append(NetworkLocation(edge_id, round(offset, OFFSET_DECIMALS)))
                offset += spacing_km
        return stations

    @staticmethod
    def random_locations(network: RiverNetwork, count: int, rng: np.random.Generator) -> List[NetworkLocation]:
        """Pontos uniformes ao longo da rede (trecho sorteado pelo comprimento)"""
        if count <= 0:
            return []
        edge_ids = network.edge_ids
        lengths = np.array([network.edges[e].length_km for e in edge_ids])
        chosen = rng.choice(len(edge_ids), size=count, p=lengths / lengths.sum())
        fractions = rng.random(count)
        return [
            NetworkLocation(edge_ids[k], round(float(f * lengths[k]), OFFSET_DECIMALS))
            for k, f in zip(chosen, fractions)
        ]

    # Réguas e verdade tabulada

    def simulate_gauges(self, network: RiverNetwork, config: TruthConfig, sites: Dict[str, NetworkLocation],
                        era: Tuple[date, date], seed: int) -> List[GaugeSeries]:
        """Leituras diárias (verdade + ruído da régua) em cada sítio, na era [início, fim)"""
        era_start, era_end = era
        epochs = [era_start + timedelta(days=k) for k in range((era_end - era_start).days)]
        rng = _generator(seed)
        gauges = []
        for gauge_id in sorted(sites):
            levels = self.truth_levels(network, config, sites[gauge_id], epochs)
            if config.gauge_noise_std_m > 0:
                levels = levels + rng.normal(0.0, config.gauge_noise_std_m, size=len(levels))
            gauges.append(GaugeSeries(
                gauge_id=gauge_id,
                location=sites[gauge_id],
                epochs=tuple(epochs),
                heights_m=tuple(float(v) for v in levels),
            ))
        logger.info(f"Réguas simuladas: {len(gauges)} sítios x {len(epochs)} dias")
        return gauges

    def truth_table(self, network: RiverNetwork, config: TruthConfig, observations: Sequence[Observation],
                    gauges: Sequence[GaugeSeries] = ()) -> pd.DataFrame:
        """Verdade sem ruído em cada (local, época) amostrado e nos dias das réguas"""
        points: Dict[NetworkLocation, Set[date]] = {}
        for obs in observations:
            points.setdefault(obs.location, set()).add(obs.epoch)
        for gauge in gauges:
            points.setdefault(gauge.location, set()).update(gauge.epochs)

        rows = []
        for location, epochs in points.items():
            ordered = sorted(epochs)
            levels = self.truth_levels(network, config, location, ordered)
            rows.extend(
                (location.edge_id, location.offset_km, epoch.isoformat(), float(level))
                for epoch, level in zip(ordered, levels)
            )
        frame = pd.DataFrame(rows, columns=["edge_id", "offset_km", "date", "height_m"])
        return frame.sort_values(["edge_id", "offset_km", "date"], kind="stable").reset_index(drop=True)

    # Campo residual

    def simulate_residual_field(self, network: RiverNetwork, params: CovarianceParams,
                                locations: Sequence[NetworkLocation], epochs: Sequence[date],
                                seed: int) -> np.ndarray:
        """
        Amostra gaussiana com covariância Sigma_U + nugget * I

        Args:
            network: rede fluvial
            params: parâmetros de covariância
            locations: local de cada ponto
            epochs: época de cada ponto (mesmo tamanho)
            seed: semente

        Returns:
            Vetor de resíduos (m)
        """
        if len(locations) != len(epochs):
            raise ValueError("locations e epochs devem ter o mesmo tamanho")
        if not locations:
            return np.zeros(0)
        arrays = LocationArrays.from_locations(network, locations)
        days = np.array([e.toordinal() for e in epochs], dtype=float)
        matrix = self.covariance.process_matrix(network, arrays, days, arrays, days, params)
        matrix[np.diag_indices_from(matrix)] += params.nugget
        jitter = 1e-10 * max(params.sill, 1.0)
        factor = np.linalg.cholesky(matrix + jitter * np.eye(len(matrix)))
        return factor @ _generator(seed).standard_normal(len(matrix))
