from src.frozen_er.enums.graph import ComponentStatus, TransitionKind
from src.frozen_er.enums.coalescent import EventKind
from src.frozen_er.enums.harness import ExperimentName, KernelFunction
