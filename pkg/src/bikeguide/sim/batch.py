"""Deterministic batches of simulated episodes.

Episode i's randomness comes solely from sha256(master_seed:tag:i), so
results are byte-stable across runs and across worker counts. Workers
each rebuild the map artifacts and caches; merging is by episode index.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..ambiguity import AmbiguityIndex
from ..dialogue.agents import AgentConfig, build_agent
from ..dialogue.utterances import TemplateSet, load_templates
from ..execution.engine import EpisodeEngine
from ..world.compile import CompiledMap, compile_map
from ..world.model import MapSpec
from .episode import EpisodeTrace, run_episode
from .metrics import MetricsRow, MetricSummary, aggregate, count_metrics
from .user import SimulatedUser, UserConfig, episode_seed


@dataclass(frozen=True)
class BatchConfig:
    episodes: int = 1000
    master_seed: int = 0
    jobs: int = 1
    # None keeps the engine default; low-compliance users need more
    max_replans: Optional[int] = None

    def __post_init__(self):
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.max_replans is not None and self.max_replans < 1:
            raise ValueError("max_replans must be >= 1")


@dataclass
class BatchResult:
    map_name: str
    agent_kind: str
    rows: List[MetricsRow]
    summary: Dict[str, MetricSummary]


def _batch_tag(map_name: str, agent: AgentConfig, user: UserConfig) -> str:
    # changing any behavioural knob reseeds the episodes on purpose
    return (f"{map_name}|{agent.kind}|d{agent.delta}"
            f"|g{user.gamma}|ha{user.hesitate_ambiguous}"
            f"|ho{user.hesitate_otherwise}")


class _EpisodeRunner:
    """Holds the per-process compiled artifacts and shared caches."""

    def __init__(self, spec: MapSpec, agent_config: AgentConfig,
                 user_config: UserConfig,
                 templates: Optional[TemplateSet] = None,
                 max_replans: Optional[int] = None):
        self.spec = spec
        self.agent_config = agent_config
        self.user_config = user_config
        self.max_replans = max_replans
        self.templates = templates or load_templates()
        self.compiled: CompiledMap = compile_map(spec)
        self.index = AmbiguityIndex(spec, self.compiled.problem.actions)
        self.plan_cache: dict = {}
        self.agent_cache: dict = {}
        self.tag = _batch_tag(spec.name, agent_config, user_config)

    def run(self, episode_index: int, master_seed: int) -> EpisodeTrace:
        seed = episode_seed(master_seed, self.tag, episode_index)
        agent = build_agent(self.agent_config, self.spec, self.index,
                            templates=self.templates,
                            shared_cache=self.agent_cache)
        engine = EpisodeEngine(self.compiled.problem, self.compiled.sensing,
                               self.compiled.initial_belief_for(),
                               cost_fn=agent.planning_cost_fn(),
                               max_replans=self.max_replans,
                               plan_cache=self.plan_cache)
        user = SimulatedUser(self.user_config, seed)
        return run_episode(engine, agent, user, self.index,
                           self.spec.name, seed)


def _run_chunk(spec: MapSpec, agent_config: AgentConfig,
               user_config: UserConfig, master_seed: int,
               indices: List[int],
               max_replans: Optional[int] = None
               ) -> List[Tuple[int, MetricsRow]]:
    runner = _EpisodeRunner(spec, agent_config, user_config,
                            max_replans=max_replans)
    out = []
    for i in indices:
        trace = runner.run(i, master_seed)
        out.append((i, count_metrics(trace, episode=i)))
    return out


def run_batch(spec: MapSpec, agent_config: AgentConfig,
              user_config: Optional[UserConfig] = None,
              batch: Optional[BatchConfig] = None) -> BatchResult:
    """Run a batch and aggregate its metrics deterministically."""
    user_config = user_config or UserConfig()
    batch = batch or BatchConfig()
    indices = list(range(batch.episodes))

    if batch.jobs == 1:
        pairs = _run_chunk(spec, agent_config, user_config,
                           batch.master_seed, indices, batch.max_replans)
    else:
        chunks = [indices[k::batch.jobs] for k in range(batch.jobs)]
        chunks = [c for c in chunks if c]
        pairs = []
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [
                pool.submit(_run_chunk, spec, agent_config, user_config,
                            batch.master_seed, chunk, batch.max_replans)
                for chunk in chunks
            ]
            for future in futures:
                pairs.extend(future.result())
    pairs.sort(key=lambda p: p[0])
    rows = [row for _, row in pairs]
    return BatchResult(map_name=spec.name, agent_kind=agent_config.kind,
                       rows=rows, summary=aggregate(rows))
