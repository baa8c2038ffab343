"""
Modelos Pydantic para o documento de configuração da simulação
"""

from datetime import date
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ...application.use_cases.simulate_scenario import SimulationPlan
from ...domain.entities.network import RiverNetwork
from ...domain.value_objects.hydro_values import EventClass, NetworkLocation, NodeKind, OrbitClass, TributaryClass
from ...domain.value_objects.simulation_values import FloodEvent, MeanProfile, MissionConfig, TruthConfig
from ...infrastructure.simulation.network_layout import NetworkLayout, SiteLayout, TributaryLayout, generate_network


class ConfigModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LocationModel(ConfigModel):
    edge_id: str = Field(..., min_length=1)
    offset_km: float = Field(..., ge=0)

    def to_domain(self) -> NetworkLocation:
        return NetworkLocation(self.edge_id, self.offset_km)


class NodeModel(ConfigModel):
    node_id: str
    x_km: float
    y_km: float
    kind: NodeKind
    sub_basin_id: str


class EdgeModel(ConfigModel):
    edge_id: str
    up_node: str
    down_node: str
    length_km: float
    river_id: str
    trib_class: TributaryClass
    catchment_weight: float


class TributaryModel(ConfigModel):
    river_id: str
    junction_km: float
    length_km: float
    trib_class: TributaryClass = TributaryClass.MAJOR


class SiteModel(ConfigModel):
    river_id: str
    chainage_km: float
    kind: NodeKind = NodeKind.GAUGE_SITE
    node_id: str = ""


class LayoutModel(ConfigModel):
    """Rede sintética descrita por comprimentos e confluências"""
    main_length_km: float = Field(..., gt=0)
    tributaries: List[TributaryModel] = Field(default_factory=list)
    sites: List[SiteModel] = Field(default_factory=list)
    weight_per_km: float = Field(1.0, gt=0)
    angle_deg: float = 60.0

    def to_domain(self) -> NetworkLayout:
        return NetworkLayout(
            main_length_km=self.main_length_km,
            tributaries=tuple(TributaryLayout(t.river_id, t.junction_km, t.length_km, t.trib_class)
                              for t in self.tributaries),
            sites=tuple(SiteLayout(s.river_id, s.chainage_km, s.kind, s.node_id) for s in self.sites),
            weight_per_km=self.weight_per_km,
            angle_deg=self.angle_deg,
        )


class NetworkModel(ConfigModel):
    """Registros explícitos (nodes/edges) ou um layout"""
    nodes: Optional[List[NodeModel]] = None
    edges: Optional[List[EdgeModel]] = None
    layout: Optional[LayoutModel] = None

    @model_validator(mode="after")
    def _one_form(self) -> 'NetworkModel':
        explicit = self.nodes is not None or self.edges is not None
        if explicit == (self.layout is not None):
            raise ValueError("informe 'layout' ou 'nodes' e 'edges'")
        if explicit and (self.nodes is None or self.edges is None):
            raise ValueError("'nodes' e 'edges' devem vir juntos")
        return self

    def build(self) -> RiverNetwork:
        if self.layout is not None:
            return generate_network(self.layout.to_domain())
        return RiverNetwork.create(
            [{**n.model_dump(), "kind": n.kind.value} for n in self.nodes],
            [{**e.model_dump(), "trib_class": e.trib_class.value} for e in self.edges],
        )


class ProfileModel(ConfigModel):
    intercept_m: float = 0.0
    slope_m_per_km: float = 0.05

    def to_domain(self) -> MeanProfile:
        return MeanProfile(self.intercept_m, self.slope_m_per_km)


class EventModel(ConfigModel):
    year: int
    amplitude_m: float = Field(..., ge=0)
    onset_doy: int = Field(..., ge=1, le=366)
    duration_days: float = Field(..., gt=0)
    origin: Optional[LocationModel] = None
    origin_node: Optional[str] = None
    celerity_km_per_day: float = Field(50.0, gt=0)
    kind: EventClass = EventClass.FLOOD
    attenuation_km: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def _one_origin(self) -> 'EventModel':
        if (self.origin is None) == (self.origin_node is None):
            raise ValueError("informe 'origin' ou 'origin_node'")
        return self

    def to_domain(self, network: RiverNetwork) -> FloodEvent:
        origin = self.origin.to_domain() if self.origin else network.location_of_node(self.origin_node)
        return FloodEvent(
            year=self.year,
            amplitude_m=self.amplitude_m,
            onset_doy=self.onset_doy,
            duration_days=self.duration_days,
            origin=origin,
            celerity_km_per_day=self.celerity_km_per_day,
            kind=self.kind,
            attenuation_km=self.attenuation_km,
        )


class TruthModel(ConfigModel):
    default_profile: ProfileModel = Field(default_factory=ProfileModel)
    edge_profiles: Dict[str, ProfileModel] = Field(default_factory=dict)
    seasonal_amplitude_m: float = Field(3.0, ge=0)
    seasonal_peak_doy: int = Field(244, ge=1, le=366)
    events: List[EventModel] = Field(default_factory=list)
    outlier_rate: float = Field(0.0, ge=0, le=1)
    outlier_magnitude_m: float = Field(5.0, ge=0)
    outlier_std_factor: float = Field(20.0, ge=1)
    gauge_noise_std_m: float = Field(0.02, ge=0)
    attenuation_km: Optional[float] = Field(None, gt=0)

    def to_domain(self, network: RiverNetwork) -> TruthConfig:
        return TruthConfig(
            default_profile=self.default_profile.to_domain(),
            edge_profiles={edge_id: p.to_domain() for edge_id, p in self.edge_profiles.items()},
            seasonal_amplitude_m=self.seasonal_amplitude_m,
            seasonal_peak_doy=self.seasonal_peak_doy,
            events=tuple(e.to_domain(network) for e in self.events),
            outlier_rate=self.outlier_rate,
            outlier_magnitude_m=self.outlier_magnitude_m,
            outlier_std_factor=self.outlier_std_factor,
            gauge_noise_std_m=self.gauge_noise_std_m,
            attenuation_km=self.attenuation_km,
        )


class MissionModel(ConfigModel):
    name: str = Field(..., min_length=1)
    orbit_class: OrbitClass
    repeat_days: Optional[int] = Field(None, gt=0)
    noise_std_m: float = Field(0.3, ge=0)
    start: Optional[date] = None
    end: Optional[date] = None
    vs_locations: List[LocationModel] = Field(default_factory=list)
    vs_spacing_km: Optional[float] = Field(None, gt=0)
    crossings_per_cycle: int = Field(0, ge=0)
    phase_day: int = 0
    bias_m: float = 0.0
    quality_factor: float = Field(1.0, ge=1)

    def to_domain(self) -> MissionConfig:
        return MissionConfig(
            name=self.name,
            orbit_class=self.orbit_class,
            repeat_days=self.repeat_days,
            noise_std_m=self.noise_std_m,
            start=self.start,
            end=self.end,
            vs_locations=tuple(v.to_domain() for v in self.vs_locations),
            vs_spacing_km=self.vs_spacing_km,
            crossings_per_cycle=self.crossings_per_cycle,
            phase_day=self.phase_day,
            bias_m=self.bias_m,
            quality_factor=self.quality_factor,
        )


class EraModel(ConfigModel):
    start: date
    end: date

    @model_validator(mode="after")
    def _ordered(self) -> 'EraModel':
        if self.end <= self.start:
            raise ValueError("era vazia: end deve ser posterior a start")
        return self


class SimulationConfig(ConfigModel):
    """Documento JSON do comando simulate"""
    network: NetworkModel
    truth: TruthModel = Field(default_factory=TruthModel)
    missions: List[MissionModel]
    era: EraModel
    gauges: bool = True

    @model_validator(mode="after")
    def _unique_missions(self) -> 'SimulationConfig':
        names = [m.name for m in self.missions]
        if len(set(names)) != len(names):
            raise ValueError("nomes de missão duplicados")
        return self

    def to_plan(self) -> SimulationPlan:
        """Constrói a rede e converte tudo para objetos de domínio"""
        network = self.network.build()
        return SimulationPlan(
            network=network,
            truth=self.truth.to_domain(network),
            missions=tuple(m.to_domain() for m in self.missions),
            era=(self.era.start, self.era.end),
            simulate_gauges=self.gauges,
        )
