# Tracking package
from .Event import Assignment, Detection, Event, EventKind, TRACKING_FEATURE_DIM
from .TrackingInstance import TrackingInstance, enumerate_feasible, tracking_argmax
from .TrackingGenerator import TrackingGenConfig, generate_instance, planted_tracking_weights

__all__ = ['Assignment', 'Detection', 'Event', 'EventKind', 'TRACKING_FEATURE_DIM', 'TrackingInstance',
           'enumerate_feasible', 'tracking_argmax', 'TrackingGenConfig', 'generate_instance',
           'planted_tracking_weights']
