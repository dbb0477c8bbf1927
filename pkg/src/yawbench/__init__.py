"""Goal-conditioned in-hand rotation workbench.

Offline training of a goal-conditioned policy on a finger-gaiting
rotation plant, scripted-trajectory evaluation with a full tracking
metric suite, and a real-time teleoperation service with a Pong
extension test.
"""

__version__ = "0.1.0"
