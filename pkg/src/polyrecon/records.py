"""Run records: one planner execution with its solution and statistics.

Records serialize to canonical single-line JSON (sorted keys, fixed
separators) so byte-for-byte determinism can be asserted across runs.
Measured wall time is kept on the object but excluded from the canonical
bytes; pass ``include_timing=True`` to embed it.
"""

import json
from dataclasses import dataclass, field

from .planners import Dropoff

STATUS_SOLVED = "solved"
STATUS_STUCK = "stuck"
STATUS_NOT_FOUND = "not-found"
STATUS_INFEASIBLE = "infeasible"

EXIT_CODES = {
    STATUS_SOLVED: 0,
    STATUS_STUCK: 2,
    STATUS_NOT_FOUND: 3,
    STATUS_INFEASIBLE: 4,
}
EXIT_PARSE_ERROR = 5


@dataclass
class RunRecord:
    instance: str
    planner: str
    params: dict
    seed: int | None
    status: str
    sequence: list = field(default_factory=list)
    carry_time: int = 0
    empty_travel_time: int = 0
    total_cost: int = 0
    tree_cost: int | None = None
    nodes_created: int | None = None
    nodes_to_first_solution: int | None = None
    checkpoints: list = field(default_factory=list)
    wall_time: float | None = None

    def to_dict(self, include_timing=False):
        d = {
            "instance": self.instance,
            "planner": self.planner,
            "params": self.params,
            "seed": self.seed,
            "status": self.status,
            "sequence": [
                {
                    "source": list(m.source),
                    "target": list(m.target),
                    "pickup_dist": m.pickup_dist,
                    "dropoff_dist": m.dropoff_dist,
                }
                for m in self.sequence
            ],
            "carry_time": self.carry_time,
            "empty_travel_time": self.empty_travel_time,
            "total_cost": self.total_cost,
            "tree_cost": self.tree_cost,
            "nodes_created": self.nodes_created,
            "nodes_to_first_solution": self.nodes_to_first_solution,
            "checkpoints": [list(cp) for cp in self.checkpoints],
        }
        if include_timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, include_timing=False):
        return json.dumps(
            self.to_dict(include_timing), sort_keys=True, separators=(",", ":")
        )

    @classmethod
    def from_dict(cls, d):
        return cls(
            instance=d["instance"],
            planner=d["planner"],
            params=d.get("params", {}),
            seed=d.get("seed"),
            status=d["status"],
            sequence=[
                Dropoff(
                    tuple(m["source"]),
                    tuple(m["target"]),
                    int(m["pickup_dist"]),
                    int(m["dropoff_dist"]),
                )
                for m in d.get("sequence", [])
            ],
            carry_time=int(d.get("carry_time", 0)),
            empty_travel_time=int(d.get("empty_travel_time", 0)),
            total_cost=int(d.get("total_cost", 0)),
            tree_cost=d.get("tree_cost"),
            nodes_created=d.get("nodes_created"),
            nodes_to_first_solution=d.get("nodes_to_first_solution"),
            checkpoints=[tuple(cp) for cp in d.get("checkpoints", [])],
            wall_time=d.get("wall_time"),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def save_record(path, record, include_timing=False):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(record.to_json(include_timing) + "\n")


def load_record(path):
    with open(path, encoding="utf-8") as fh:
        return RunRecord.from_json(fh.read())
