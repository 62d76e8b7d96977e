"""Network scenarios: capacity formula plus achievable schedule"""

from .base import BaseScenario
from .broadcast import BroadcastScenario
from .interference import InterferenceScenario, XChannelScenario
from .three_user import ThreeUserExampleScenario

__all__ = ["BaseScenario", "BroadcastScenario", "InterferenceScenario", "XChannelScenario",
           "ThreeUserExampleScenario"]
