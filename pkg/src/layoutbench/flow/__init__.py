from layoutbench.flow.thoughts import (
    EmptyPool,
    SteeringConfig,
    Thought,
    ThoughtPool,
    load_steering,
)
from layoutbench.flow.pipeline import (
    build_generator_request,
    generate_pool,
    generator_system_prompt,
    load_prompt,
    realize_thought,
    run_baseline,
    run_one,
)
from layoutbench.flow.assessor import build_assessor_prompt, pool_digest, run_solomon

__all__ = [
    "EmptyPool",
    "SteeringConfig",
    "Thought",
    "ThoughtPool",
    "build_assessor_prompt",
    "build_generator_request",
    "generate_pool",
    "generator_system_prompt",
    "load_prompt",
    "load_steering",
    "pool_digest",
    "realize_thought",
    "run_baseline",
    "run_one",
    "run_solomon",
]
